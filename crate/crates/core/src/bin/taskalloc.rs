use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use taskalloc::config::{load_dir, ExperimentConfig};
use taskalloc::selftest::run_selftest;
use taskalloc::suite::{
    decade_checkpoints, mean_std, regret_profile, run_suite, table_ratios, write_atomic,
    RunSummary, SuiteOptions,
};
use taskalloc::Result;

#[derive(Parser)]
#[command(
    name = "taskalloc",
    version,
    about = "Simulate adaptive task allocation for parallel SGD"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,

    /// Run only this seed instead of the configured list.
    #[arg(long, global = true)]
    seed: Option<u64>,

    /// Directory for CSV and summary output.
    #[arg(long, global = true)]
    out_dir: Option<PathBuf>,

    /// Run seeds and configs on the rayon thread pool.
    #[arg(long, global = true)]
    parallel: bool,

    /// Override the suboptimality stopping threshold.
    #[arg(long, global = true)]
    threshold: Option<f64>,
}

#[derive(Subcommand)]
enum Command {
    /// Run one experiment config over its seeds.
    Simulate { config: PathBuf },
    /// Run every config in a directory and print ratios relative to GTA.
    Table { config_dir: PathBuf },
    /// Report R(K)/ln K at decades of K and the final share of oracle rounds.
    Regret { config: PathBuf },
    /// Run the built-in property checks.
    Selftest,
}

impl Cli {
    fn apply(&self, mut cfg: ExperimentConfig) -> Result<ExperimentConfig> {
        if let Some(s) = self.seed {
            cfg.seeds = vec![s];
        }
        if self.threshold.is_some() {
            cfg.threshold = self.threshold;
        }
        cfg.validate()?;
        Ok(cfg)
    }

    fn load(&self, path: &Path) -> Result<ExperimentConfig> {
        self.apply(ExperimentConfig::from_path(path)?)
    }

    fn options(&self) -> SuiteOptions {
        SuiteOptions {
            out_dir: self.out_dir.clone(),
            parallel: self.parallel,
        }
    }
}

fn print_runs(runs: &[&RunSummary]) -> usize {
    let mut flagged = 0;
    for r in runs {
        let sub = r
            .suboptimality
            .map(|s| format!("{s:.3e}"))
            .unwrap_or_else(|| "-".into());
        let note = if r.threshold_missed() {
            flagged += 1;
            "  FLAGGED: threshold not reached"
        } else {
            ""
        };
        println!(
            "{:<28} seed {:>3}  rounds {:>8}  runtime {:.4e}  worker time {:.4e}  regret {:.4e}  subopt {}{}",
            r.config, r.seed, r.rounds, r.cum_runtime, r.cum_worker_time, r.cum_regret, sub, note
        );
    }
    flagged
}

fn run(cli: &Cli) -> Result<usize> {
    match &cli.command {
        Command::Simulate { config } => {
            let cfg = cli.load(config)?;
            let results = run_suite(std::slice::from_ref(&cfg), &cli.options())?;
            let runs: Vec<&RunSummary> = results.iter().map(|r| &r.summary).collect();
            Ok(print_runs(&runs))
        }
        Command::Table { config_dir } => {
            let configs = load_dir(config_dir)?
                .into_iter()
                .map(|c| cli.apply(c))
                .collect::<Result<Vec<_>>>()?;
            let results = run_suite(&configs, &cli.options())?;
            let runs: Vec<RunSummary> = results.into_iter().map(|r| r.summary).collect();
            let table = table_ratios(&runs);
            print!("{}", table.render());
            if let Some(dir) = &cli.out_dir {
                write_atomic(&dir.join("table.csv"), &table.to_csv())?;
            }
            Ok(table.flagged().count())
        }
        Command::Regret { config } => {
            let cfg = cli.load(config)?;
            let checkpoints = decade_checkpoints(cfg.rounds);
            let tail = 1000.min(cfg.rounds);
            let mut flagged = 0;
            let mut per_checkpoint = vec![Vec::new(); checkpoints.len()];
            for &seed in &cfg.seeds {
                let p = regret_profile(&cfg, seed, &checkpoints, tail)?;
                let cells: Vec<String> = p
                    .checkpoints
                    .iter()
                    .map(|(k, r, norm)| format!("R({k})={r:.1} R/lnK={norm:.2}"))
                    .collect();
                println!(
                    "seed {seed:>3}  {}  oracle share (last {tail}) {:.3}",
                    cells.join("  "),
                    p.oracle_share
                );
                for (slot, c) in per_checkpoint.iter_mut().zip(&p.checkpoints) {
                    slot.push(c.1);
                }
            }
            let means: Vec<f64> = per_checkpoint
                .iter()
                .filter_map(|v| mean_std(v).map(|m| m.0))
                .collect();
            let norms: Vec<f64> = checkpoints
                .iter()
                .zip(&means)
                .map(|(&k, r)| r / (k as f64).ln())
                .collect();
            if norms.len() >= 2 {
                let lo = norms.iter().copied().fold(f64::INFINITY, f64::min);
                let hi = norms.iter().copied().fold(f64::NEG_INFINITY, f64::max);
                let spread = hi / lo;
                let flag = if lo > 0.0 && spread < 1.5 {
                    ""
                } else {
                    flagged += 1;
                    "  FLAGGED: R/lnK varies by 50% or more"
                };
                println!("mean R/lnK over checkpoints: max/min = {spread:.3}{flag}");
            }
            if cli.out_dir.is_some() {
                run_suite(std::slice::from_ref(&cfg), &cli.options())?;
            }
            Ok(flagged)
        }
        Command::Selftest => {
            let mut failed = 0;
            for c in run_selftest(cli.seed.unwrap_or(1))? {
                println!(
                    "{} {}: {}",
                    if c.passed { "PASS" } else { "FAIL" },
                    c.name,
                    c.detail
                );
                failed += usize::from(!c.passed);
            }
            Ok(failed)
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(0) => ExitCode::SUCCESS,
        Ok(flagged) => {
            eprintln!(
                "{flagged} flagged entr{}",
                if flagged == 1 { "y" } else { "ies" }
            );
            ExitCode::from(2)
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::FAILURE
        }
    }
}
