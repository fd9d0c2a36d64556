//! The built-in worker-time families: means, Orlicz bounds and sample means.

use taskalloc::rng::{stream, Domain};
use taskalloc::{FleetFamily, FleetSpec};

fn main() -> taskalloc::Result<()> {
    let families = [
        FleetFamily::SqrtExp { c: 29.0 },
        FleetFamily::LinearExp { c: 29.0 },
        FleetFamily::Heterogeneous { c: 29.0 },
        FleetFamily::ExpOnly { base: 2.0 },
    ];
    for family in &families {
        let fleet = FleetSpec::make(family, 5)?;
        println!("{} (eta = {:.3})", family.label(), fleet.eta());
        for (i, arm) in fleet.arms().iter().enumerate() {
            let mut rng = stream(42, Domain::Auxiliary, i as u64, 0);
            let draws = 100_000;
            let avg = (0..draws).map(|_| arm.sample(&mut rng)).sum::<f64>() / draws as f64;
            println!(
                "  worker {i}: mean {:>8.3}  sample mean {:>8.3}  orlicz bound {:>8.3}",
                arm.mean(),
                avg,
                arm.orlicz_bound()
            );
        }
    }
    Ok(())
}
