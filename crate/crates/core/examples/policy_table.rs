//! A small GTA-relative comparison table built from in-memory configs.

use taskalloc::config::ExperimentConfig;
use taskalloc::suite::{run_suite, table_ratios, SuiteOptions};

fn main() -> taskalloc::Result<()> {
    let mut configs = Vec::new();
    for n in [17, 51] {
        for policy in [
            "\"gta\"",
            "\"ofta\"",
            "\"uta\"",
            "{ kind = \"ata-empirical\", eta = 1.0 }",
        ] {
            configs.push(ExperimentConfig::from_toml_str(&format!(
                "name = \"n{n}-{}\"\nn = {n}\nbudget = 23\nrounds = 50000\nseeds = [1, 2]\nthreshold = 1e-4\n\
                 policy = {policy}\n[optimizer]\nd = 40",
                configs.len()
            ))?);
        }
    }
    let runs: Vec<_> = run_suite(&configs, &SuiteOptions::default())?
        .into_iter()
        .map(|r| r.summary)
        .collect();
    print!("{}", table_ratios(&runs).render());
    Ok(())
}
