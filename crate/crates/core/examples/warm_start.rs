//! Bandit-only prior rounds shorten the search for the oracle allocation.

use taskalloc::config::ExperimentConfig;

fn first_oracle_round(cfg: &ExperimentConfig, seed: u64) -> taskalloc::Result<Option<u64>> {
    let exp = cfg.experiment(seed)?;
    let oracle = exp.allocator().oracle().clone();
    Ok(exp
        .into_iter()
        .find(|r| r.allocation == oracle)
        .map(|r| r.round))
}

fn main() -> taskalloc::Result<()> {
    for prior in [0u64, 50_000, 500_000] {
        let cfg = ExperimentConfig::from_toml_str(&format!(
            "n = 51\nbudget = 23\nrounds = 100000\nfamily = \"linear-exp\"\nwarm_start = {prior}\n\
             policy = {{ kind = \"ata-empirical\", eta = 1.0 }}\n[optimizer]\nenabled = false"
        ))?;
        let hits: Vec<String> = (1..=3)
            .map(|s| {
                first_oracle_round(&cfg, s).map(|r| r.map_or("never".into(), |k| k.to_string()))
            })
            .collect::<taskalloc::Result<_>>()?;
        println!(
            "P = {prior:>6}: first oracle round per seed {}",
            hits.join(", ")
        );
    }
    Ok(())
}
