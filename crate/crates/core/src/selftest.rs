//! Property checks runnable outside the test harness.

use rand::Rng;
use serde::Serialize;

use crate::allocation::{
    argmax_cardinality, brute_force_opt, k_gap, lcb_ata, lcb_empirical, proxy_loss, ras,
};
use crate::config::ExperimentConfig;
use crate::distributions::{FleetFamily, FleetSpec};
use crate::error::Result;
use crate::rng::{stream, Domain};
use crate::suite::{run_csv, run_one};
use crate::AllocatorState;

#[derive(Debug, Clone, Default, PartialEq, Serialize)]
pub struct RasReport {
    pub instances: usize,
    /// `ℓ(ras(s, B), s)` differs from the brute-force optimum.
    pub loss_mismatches: usize,
    /// argmax cardinality differs from the smallest among all optima.
    pub cardinality_mismatches: usize,
    /// Pairs with `aⱼsⱼ > (aᵢ + 1)sᵢ`.
    pub pair_violations: usize,
    /// `k_gap` outside {1, 2}.
    pub k_gap_violations: usize,
}

impl RasReport {
    pub fn clean(&self) -> bool {
        self.loss_mismatches
            + self.cardinality_mismatches
            + self.pair_violations
            + self.k_gap_violations
            == 0
    }
}

/// Compares RAS with exhaustive search on random instances with
/// `n ≤ max_n`, `B ≤ max_b` and scores uniform in (0, 10].
pub fn ras_check(instances: usize, max_n: usize, max_b: u32, seed: u64) -> Result<RasReport> {
    let mut rng = stream(seed, Domain::Auxiliary, 0, 0);
    let mut rep = RasReport {
        instances,
        ..Default::default()
    };
    for _ in 0..instances {
        let n = rng.random_range(1..=max_n);
        let b = rng.random_range(1..=max_b);
        let scores: Vec<f64> = (0..n).map(|_| 10.0 - rng.random_range(0.0..10.0)).collect();
        let a = ras(&scores, b);
        let loss = proxy_loss(&a, &scores);
        let opt = brute_force_opt(&scores, b)?;
        if loss != opt.loss {
            rep.loss_mismatches += 1;
        }
        if argmax_cardinality(&a, &scores) != opt.cardinality {
            rep.cardinality_mismatches += 1;
        }
        for i in 0..n {
            for j in 0..n {
                if a[j] as f64 * scores[j] > (a[i] + 1) as f64 * scores[i] {
                    rep.pair_violations += 1;
                }
            }
            if !matches!(k_gap(loss, a[i], scores[i]), Ok(1 | 2)) {
                rep.k_gap_violations += 1;
            }
        }
    }
    Ok(rep)
}

/// How often each lower bound lands above the true mean.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CoverageReport {
    pub family: String,
    pub round_k: u64,
    pub trials: usize,
    pub ata_rate: f64,
    pub empirical_rate: f64,
}

/// For every arm of the fleet and every sample size in `usage_counts`,
/// draws `trials` samples, forms both lower bounds at round `round_k`, and
/// counts how often they exceed the true mean. ATA uses the fleet's
/// largest Orlicz bound, ATA-Empirical the fleet's `η`.
pub fn coverage_check(
    fleet: &FleetSpec,
    family: &str,
    round_k: u64,
    usage_counts: &[u64],
    trials: usize,
    seed: u64,
) -> CoverageReport {
    let alpha = fleet.max_orlicz_bound();
    let eta = fleet.eta();
    let mut ata_hits = 0usize;
    let mut emp_hits = 0usize;
    let mut total = 0usize;
    for (i, arm) in fleet.arms().iter().enumerate() {
        for &count in usage_counts {
            let mut rng = stream(seed, Domain::Auxiliary, i as u64, count);
            for _ in 0..trials {
                let sum: f64 = (0..count).map(|_| arm.sample(&mut rng)).sum();
                let st = AllocatorState::from_history(vec![count], vec![sum], round_k);
                if lcb_ata(&st, alpha)[0] > arm.mean() {
                    ata_hits += 1;
                }
                if lcb_empirical(&st, eta)[0] > arm.mean() {
                    emp_hits += 1;
                }
                total += 1;
            }
        }
    }
    CoverageReport {
        family: family.to_string(),
        round_k,
        trials: total,
        ata_rate: ata_hits as f64 / total as f64,
        empirical_rate: emp_hits as f64 / total as f64,
    }
}

/// The fleets used by the coverage check, five workers each.
pub fn coverage_fleets() -> Result<Vec<(String, FleetSpec)>> {
    [
        FleetFamily::SqrtExp { c: 29.0 },
        FleetFamily::LinearExp { c: 29.0 },
        FleetFamily::Heterogeneous { c: 29.0 },
        FleetFamily::ExpOnly { base: 2.0 },
    ]
    .iter()
    .map(|f| Ok((f.label().to_string(), FleetSpec::make(f, 5)?)))
    .collect()
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Check {
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

/// A quick pass over RAS optimality, confidence-bound coverage and run
/// determinism.
pub fn run_selftest(seed: u64) -> Result<Vec<Check>> {
    let mut checks = Vec::new();
    let rep = ras_check(2000, 6, 6, seed)?;
    checks.push(Check {
        name: "ras matches exhaustive search".into(),
        passed: rep.clean(),
        detail: format!("{rep:?}"),
    });
    for (label, fleet) in coverage_fleets()? {
        let cov = coverage_check(&fleet, &label, 10, &[1, 5, 20], 400, seed);
        checks.push(Check {
            name: format!("lower bounds cover the mean ({label})"),
            passed: cov.ata_rate <= 0.02 && cov.empirical_rate <= 0.02,
            detail: format!(
                "ata {:.4}, empirical {:.4} over {} trials",
                cov.ata_rate, cov.empirical_rate, cov.trials
            ),
        });
    }
    let cfg = ExperimentConfig::from_toml_str(
        "n = 12\nbudget = 7\nrounds = 300\npolicy = { kind = \"ata-empirical\", eta = 1.0 }\n[optimizer]\nd = 20",
    )?;
    let a = run_csv(&run_one(&cfg, seed)?.rows);
    let b = run_csv(&run_one(&cfg, seed)?.rows);
    checks.push(Check {
        name: "identical reruns".into(),
        passed: a == b,
        detail: format!("{} bytes", a.len()),
    });
    Ok(checks)
}
