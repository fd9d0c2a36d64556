//! Optimal static allocation for known mean times, checked against
//! exhaustive search.

use taskalloc::allocation::{argmax_cardinality, brute_force_opt, proxy_loss, ras};
use taskalloc::{FleetFamily, FleetSpec};

fn main() -> taskalloc::Result<()> {
    let fleet = FleetSpec::make(&FleetFamily::SqrtExp { c: 29.0 }, 8)?;
    let means = fleet.means();
    for budget in [1, 4, 9, 23] {
        let a = ras(&means, budget);
        let loss = proxy_loss(&a, &means);
        let best = brute_force_opt(&means, budget)?;
        println!(
            "B={budget:>2}  a={a}  loss={loss:.2}  exhaustive={:.2}  busiest workers={} (min {})  optima={}",
            best.loss,
            argmax_cardinality(&a, &means),
            best.cardinality,
            best.minimizers
        );
    }
    Ok(())
}
