//! Cumulative proxy-loss regret of both learning policies on Exp(2i) workers.

use taskalloc::config::ExperimentConfig;
use taskalloc::suite::regret_profile;

fn main() -> taskalloc::Result<()> {
    for policy in [
        "{ kind = \"ata\", alpha = 2.0 }",
        "{ kind = \"ata-empirical\", eta = 1.0 }",
    ] {
        let cfg = ExperimentConfig::from_toml_str(&format!(
            "n = 20\nbudget = 5\nrounds = 100000\nfamily = \"exp-only\"\npolicy = {policy}\n[optimizer]\nenabled = false"
        ))?;
        println!("{policy}");
        for seed in 1..=3 {
            let p = regret_profile(&cfg, seed, &[100, 1000, 10_000, 100_000], 1000)?;
            let cells: Vec<String> = p
                .checkpoints
                .iter()
                .map(|(k, r, _)| format!("R({k})={r:.0}"))
                .collect();
            println!(
                "  seed {seed}: {}  oracle share {:.3}",
                cells.join("  "),
                p.oracle_share
            );
        }
    }
    Ok(())
}
