//! Batch runs, CSV output and the GTA-relative summary table.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use rayon::prelude::*;
use serde::Serialize;

use crate::config::ExperimentConfig;
use crate::error::{Error, Result};
use crate::simulator::RoundRecord;

pub const CSV_HEADER: &str =
    "round,round_time,cum_runtime,cum_worker_time,proxy_loss,cum_regret,suboptimality";

/// One CSV line; floats use Rust's shortest round-trip formatting so output
/// is byte-identical across runs.
pub fn csv_row(r: &RoundRecord) -> String {
    let sub = r.suboptimality.map(|s| s.to_string()).unwrap_or_default();
    format!(
        "{},{},{},{},{},{},{}",
        r.round, r.round_time, r.cum_runtime, r.cum_worker_time, r.proxy_loss, r.cum_regret, sub
    )
}

/// Writes through a temporary file in the same directory, then renames.
pub fn write_atomic(path: &Path, contents: &str) -> Result<()> {
    if let Some(dir) = path.parent() {
        std::fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    }
    let tmp = path.with_extension("tmp");
    std::fs::write(&tmp, contents).map_err(|e| Error::io(&tmp, e))?;
    std::fs::rename(&tmp, path).map_err(|e| Error::io(path, e))
}

/// End state of one (config, seed) run.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RunSummary {
    pub config: String,
    pub family: String,
    pub n: usize,
    pub budget: u32,
    pub policy: String,
    pub seed: u64,
    pub rounds: u64,
    pub threshold: Option<f64>,
    pub reached_threshold: bool,
    pub cum_runtime: f64,
    pub cum_worker_time: f64,
    pub cum_regret: f64,
    pub suboptimality: Option<f64>,
}

impl RunSummary {
    /// A threshold was set and the run hit the round cap first.
    pub fn threshold_missed(&self) -> bool {
        self.threshold.is_some() && !self.reached_threshold
    }
}

#[derive(Debug, Clone)]
pub struct RunResult {
    pub summary: RunSummary,
    /// The recorded (possibly thinned) rounds.
    pub rows: Vec<RoundRecord>,
}

/// Runs one seed of a config, keeping every `record_every`-th round and the
/// last one.
pub fn run_one(cfg: &ExperimentConfig, seed: u64) -> Result<RunResult> {
    let mut rows = Vec::new();
    let mut last = None;
    for rec in cfg.experiment(seed)? {
        if rec.round % cfg.record_every == 0 {
            rows.push(rec.clone());
        }
        last = Some(rec);
    }
    let last = last.expect("at least one round is always played");
    if rows.last().map(|r| r.round) != Some(last.round) {
        rows.push(last.clone());
    }
    let reached_threshold = match (cfg.threshold, last.suboptimality) {
        (Some(t), Some(s)) => s < t,
        _ => false,
    };
    let summary = RunSummary {
        config: cfg.name.clone(),
        family: cfg.family.label().to_string(),
        n: cfg.n,
        budget: cfg.budget,
        policy: cfg.policy.label().to_string(),
        seed,
        rounds: last.round,
        threshold: cfg.threshold,
        reached_threshold,
        cum_runtime: last.cum_runtime,
        cum_worker_time: last.cum_worker_time,
        cum_regret: last.cum_regret,
        suboptimality: last.suboptimality,
    };
    Ok(RunResult { summary, rows })
}

pub fn run_csv(rows: &[RoundRecord]) -> String {
    let mut out = String::with_capacity(64 * (rows.len() + 1));
    out.push_str(CSV_HEADER);
    out.push('\n');
    for r in rows {
        out.push_str(&csv_row(r));
        out.push('\n');
    }
    out
}

/// Per-round mean, standard deviation and count across seeds. A round
/// appears when at least one seed recorded it.
pub fn aggregate_csv(runs: &[&RunResult]) -> String {
    #[derive(Default)]
    struct Acc {
        values: [Vec<f64>; 4],
    }
    let mut by_round: BTreeMap<u64, Acc> = BTreeMap::new();
    for run in runs {
        for r in &run.rows {
            let acc = by_round.entry(r.round).or_default();
            acc.values[0].push(r.cum_runtime);
            acc.values[1].push(r.cum_worker_time);
            acc.values[2].push(r.cum_regret);
            if let Some(s) = r.suboptimality {
                acc.values[3].push(s);
            }
        }
    }
    let mut out = String::from("round,count");
    for m in [
        "cum_runtime",
        "cum_worker_time",
        "cum_regret",
        "suboptimality",
    ] {
        let _ = write!(out, ",{m}_mean,{m}_std");
    }
    out.push('\n');
    for (round, acc) in &by_round {
        let _ = write!(out, "{round},{}", acc.values[0].len());
        for v in &acc.values {
            match mean_std(v) {
                Some((m, s)) => {
                    let _ = write!(out, ",{m},{s}");
                }
                None => out.push_str(",,"),
            }
        }
        out.push('\n');
    }
    out
}

/// Sample mean and (n − 1) standard deviation; the deviation is 0 for one value.
pub fn mean_std(v: &[f64]) -> Option<(f64, f64)> {
    if v.is_empty() {
        return None;
    }
    let n = v.len() as f64;
    let mean = v.iter().sum::<f64>() / n;
    let var = if v.len() > 1 {
        v.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1.0)
    } else {
        0.0
    };
    Some((mean, var.sqrt()))
}

#[derive(Debug, Clone, Default)]
pub struct SuiteOptions {
    /// Where CSVs go; nothing is written when `None`.
    pub out_dir: Option<PathBuf>,
    pub parallel: bool,
}

/// Runs every (config, seed) pair. Results come back in input order
/// regardless of parallelism.
pub fn run_suite(configs: &[ExperimentConfig], opts: &SuiteOptions) -> Result<Vec<RunResult>> {
    let jobs: Vec<(&ExperimentConfig, u64)> = configs
        .iter()
        .flat_map(|c| c.seeds.iter().map(move |&s| (c, s)))
        .collect();
    let results: Vec<Result<RunResult>> = if opts.parallel {
        jobs.par_iter().map(|&(c, s)| run_one(c, s)).collect()
    } else {
        jobs.iter().map(|&(c, s)| run_one(c, s)).collect()
    };
    let results = results.into_iter().collect::<Result<Vec<_>>>()?;
    if let Some(dir) = &opts.out_dir {
        write_outputs(dir, configs, &results)?;
    }
    Ok(results)
}

fn write_outputs(dir: &Path, configs: &[ExperimentConfig], results: &[RunResult]) -> Result<()> {
    for r in results {
        let name = format!("{}_seed{}.csv", r.summary.config, r.summary.seed);
        write_atomic(&dir.join(name), &run_csv(&r.rows))?;
    }
    for cfg in configs {
        let runs: Vec<&RunResult> = results
            .iter()
            .filter(|r| r.summary.config == cfg.name)
            .collect();
        write_atomic(
            &dir.join(format!("{}_aggregate.csv", cfg.name)),
            &aggregate_csv(&runs),
        )?;
    }
    let summaries: Vec<&RunSummary> = results.iter().map(|r| &r.summary).collect();
    write_atomic(&dir.join("summary.csv"), &summary_csv(&summaries))
}

pub fn summary_csv(runs: &[&RunSummary]) -> String {
    let mut out = String::from(
        "config,family,n,budget,policy,seed,rounds,reached_threshold,cum_runtime,cum_worker_time,cum_regret,suboptimality\n",
    );
    for r in runs {
        let sub = r.suboptimality.map(|s| s.to_string()).unwrap_or_default();
        let _ = writeln!(
            out,
            "{},{},{},{},{},{},{},{},{},{},{},{}",
            r.config,
            r.family,
            r.n,
            r.budget,
            r.policy,
            r.seed,
            r.rounds,
            r.reached_threshold,
            r.cum_runtime,
            r.cum_worker_time,
            r.cum_regret,
            sub
        );
    }
    out
}

/// One policy relative to GTA on the same fleet and budget.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TableEntry {
    pub family: String,
    pub n: usize,
    pub budget: u32,
    pub policy: String,
    /// Mean over seeds of `policy runtime / GTA runtime` at the threshold.
    pub runtime_ratio: Option<f64>,
    /// Mean over seeds of `GTA worker time / policy worker time`.
    pub worker_time_saving: Option<f64>,
    /// Mean rounds to the threshold over the seeds used.
    pub rounds_to_threshold: Option<f64>,
    pub seeds_used: usize,
    /// Why the entry is unreliable, if it is.
    pub flag: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SummaryTable {
    pub entries: Vec<TableEntry>,
}

impl SummaryTable {
    pub fn flagged(&self) -> impl Iterator<Item = &TableEntry> {
        self.entries.iter().filter(|e| e.flag.is_some())
    }

    pub fn get(&self, family: &str, n: usize, policy: &str) -> Option<&TableEntry> {
        self.entries
            .iter()
            .find(|e| e.family == family && e.n == n && e.policy == policy)
    }

    pub fn to_csv(&self) -> String {
        let mut out =
            String::from("family,n,budget,policy,worker_time_saving,runtime_ratio,rounds_to_threshold,seeds_used,flag\n");
        for e in &self.entries {
            let f = |v: Option<f64>| v.map(|x| x.to_string()).unwrap_or_default();
            let _ = writeln!(
                out,
                "{},{},{},{},{},{},{},{},{}",
                e.family,
                e.n,
                e.budget,
                e.policy,
                f(e.worker_time_saving),
                f(e.runtime_ratio),
                f(e.rounds_to_threshold),
                e.seeds_used,
                e.flag.as_deref().unwrap_or("")
            );
        }
        out
    }

    /// Fixed-width text rendering.
    pub fn render(&self) -> String {
        let mut out = format!(
            "{:<14} {:>5} {:>4} {:<14} {:>12} {:>12} {:>10}  {}\n",
            "family", "n", "B", "policy", "wt saving", "rt ratio", "rounds", "flag"
        );
        for e in &self.entries {
            let f = |v: Option<f64>| v.map(|x| format!("{x:.2}")).unwrap_or_else(|| "-".into());
            let _ = writeln!(
                out,
                "{:<14} {:>5} {:>4} {:<14} {:>12} {:>12} {:>10}  {}",
                e.family,
                e.n,
                e.budget,
                e.policy,
                f(e.worker_time_saving),
                f(e.runtime_ratio),
                e.rounds_to_threshold
                    .map(|r| format!("{r:.0}"))
                    .unwrap_or_else(|| "-".into()),
                e.flag.as_deref().unwrap_or("")
            );
        }
        out
    }
}

/// Pairs every non-GTA run with the GTA run of the same fleet, budget and
/// seed, and averages the per-seed ratios. An entry is flagged when a run
/// missed the threshold or has no GTA partner.
pub fn table_ratios(runs: &[RunSummary]) -> SummaryTable {
    type Key = (String, usize, u32);
    let mut groups: BTreeMap<Key, Vec<&RunSummary>> = BTreeMap::new();
    for r in runs {
        groups
            .entry((r.family.clone(), r.n, r.budget))
            .or_default()
            .push(r);
    }
    let mut entries = Vec::new();
    for ((family, n, budget), group) in groups {
        let gta: BTreeMap<u64, &RunSummary> = group
            .iter()
            .filter(|r| r.policy == "gta")
            .map(|r| (r.seed, *r))
            .collect();
        let mut policies: Vec<&str> = group.iter().map(|r| r.policy.as_str()).collect();
        policies.sort_by_key(|p| policy_order(p));
        policies.dedup();
        for policy in policies {
            let mut rt = Vec::new();
            let mut wt = Vec::new();
            let mut rounds = Vec::new();
            let mut problems = Vec::new();
            for r in group.iter().filter(|r| r.policy == policy) {
                let Some(g) = gta.get(&r.seed) else {
                    problems.push(format!("no gta run for seed {}", r.seed));
                    continue;
                };
                if !r.reached_threshold {
                    problems.push(format!("seed {} missed threshold", r.seed));
                    continue;
                }
                if !g.reached_threshold {
                    problems.push(format!("gta seed {} missed threshold", g.seed));
                    continue;
                }
                rt.push(r.cum_runtime / g.cum_runtime);
                wt.push(g.cum_worker_time / r.cum_worker_time);
                rounds.push(r.rounds as f64);
            }
            entries.push(TableEntry {
                family: family.clone(),
                n,
                budget,
                policy: policy.to_string(),
                runtime_ratio: mean_std(&rt).map(|m| m.0),
                worker_time_saving: mean_std(&wt).map(|m| m.0),
                rounds_to_threshold: mean_std(&rounds).map(|m| m.0),
                seeds_used: rt.len(),
                flag: (!problems.is_empty()).then(|| problems.join("; ")),
            });
        }
    }
    SummaryTable { entries }
}

fn policy_order(p: &str) -> usize {
    ["ata", "ata-empirical", "ofta", "uta", "gta"]
        .iter()
        .position(|&q| q == p)
        .unwrap_or(usize::MAX)
}

/// Regret growth of one run: `R(K)/ln K` at checkpoints, and how often the
/// oracle allocation was played at the end.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RegretProfile {
    pub seed: u64,
    pub rounds: u64,
    /// `(K, R(K), R(K)/ln K)`.
    pub checkpoints: Vec<(u64, f64, f64)>,
    /// Fraction of the last `tail` rounds that played the oracle allocation.
    pub oracle_share: f64,
    pub tail: u64,
}

impl RegretProfile {
    /// `max/min` of `R(K)/ln K` over the checkpoints; infinite if any is ≤ 0.
    pub fn normalized_spread(&self) -> f64 {
        let v: Vec<f64> = self.checkpoints.iter().map(|c| c.2).collect();
        let lo = v.iter().copied().fold(f64::INFINITY, f64::min);
        let hi = v.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        if lo <= 0.0 {
            f64::INFINITY
        } else {
            hi / lo
        }
    }
}

/// Powers of ten from 10³ up to `rounds`.
pub fn decade_checkpoints(rounds: u64) -> Vec<u64> {
    std::iter::successors(Some(1000u64), |k| k.checked_mul(10))
        .take_while(|&k| k <= rounds)
        .collect()
}

pub fn regret_profile(
    cfg: &ExperimentConfig,
    seed: u64,
    checkpoints: &[u64],
    tail: u64,
) -> Result<RegretProfile> {
    let exp = cfg.experiment(seed)?;
    let oracle = exp.allocator().oracle().clone();
    let mut out = Vec::new();
    let mut hits = 0u64;
    let mut rounds = 0;
    for rec in exp {
        rounds = rec.round;
        if checkpoints.contains(&rec.round) {
            let lnk = (rec.round as f64).ln();
            out.push((rec.round, rec.cum_regret, rec.cum_regret / lnk));
        }
        if rec.round + tail > cfg.rounds && rec.allocation == oracle {
            hits += 1;
        }
    }
    Ok(RegretProfile {
        seed,
        rounds,
        checkpoints: out,
        oracle_share: hits as f64 / tail.min(rounds).max(1) as f64,
        tail,
    })
}
