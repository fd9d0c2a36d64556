//! One round of greedy allocation next to the oracle static allocation, on
//! the same realized worker times.

use taskalloc::allocation::ras;
use taskalloc::simulator::{run_greedy_round, run_static_round, RoundStreams};
use taskalloc::{FleetFamily, FleetSpec};

fn main() -> taskalloc::Result<()> {
    let budget = 23;
    for n in [17, 51, 153, 459] {
        let fleet = FleetSpec::make(&FleetFamily::SqrtExp { c: 29.0 }, n)?;
        let oracle = ras(&fleet.means(), budget);
        let (mut gt, mut gw, mut st, mut sw) = (0.0, 0.0, 0.0, 0.0);
        let rounds = 2000;
        for k in 1..=rounds {
            let streams = RoundStreams::new(7, k);
            let g = run_greedy_round(&fleet, budget, &streams);
            let s = run_static_round(&oracle, &fleet, &streams);
            gt += g.round_time;
            gw += g.worker_time;
            st += s.round_time;
            sw += s.worker_time;
        }
        println!(
            "n={n:>3}  greedy: round {:>7.1} worker {:>9.1}   oracle static: round {:>7.1} worker {:>7.1}   worker-time ratio {:.1}",
            gt / rounds as f64,
            gw / rounds as f64,
            st / rounds as f64,
            sw / rounds as f64,
            gw / sw
        );
    }
    Ok(())
}
