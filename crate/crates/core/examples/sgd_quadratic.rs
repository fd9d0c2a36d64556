//! Minibatch SGD on the tridiagonal quadratic driven by three allocation
//! policies, stopped at a suboptimality threshold.

use taskalloc::optimizer::OptimizerConfig;
use taskalloc::optimizer::QuadraticSgd;
use taskalloc::simulator::{Experiment, StopRule};
use taskalloc::{FleetFamily, FleetSpec, Policy};

fn main() -> taskalloc::Result<()> {
    let fleet = FleetSpec::make(&FleetFamily::SqrtExp { c: 29.0 }, 51)?;
    let opt = OptimizerConfig {
        d: 60,
        ..OptimizerConfig::default()
    };
    let stop = StopRule {
        max_rounds: 100_000,
        threshold: Some(1e-4),
    };
    for policy in [Policy::Gta, Policy::Ofta, Policy::AtaEmpirical { eta: 1.0 }] {
        let exp = Experiment::new(fleet.clone(), policy, 23, 1, stop)?
            .with_optimizer(Box::new(QuadraticSgd::new(&opt, 1)));
        let last = exp.last().expect("at least one round");
        println!(
            "{:<14} rounds {:>6}  runtime {:>12.1}  worker time {:>14.1}  f - f* {:.2e}",
            policy.label(),
            last.round,
            last.cum_runtime,
            last.cum_worker_time,
            last.suboptimality.unwrap_or(f64::NAN)
        );
    }
    Ok(())
}
