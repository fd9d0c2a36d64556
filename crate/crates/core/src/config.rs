//! Experiment configuration files (TOML or JSON).
//!
//! ```toml
//! name = "sqrt-n153-ata"
//! n = 153
//! budget = 23
//! rounds = 200000
//! seeds = [1, 2, 3, 4, 5]
//! threshold = 1e-5
//! family = "sqrt-exp"                     # or { kind = "sqrt-exp", c = 29.0 }
//! policy = { kind = "ata", alpha = 1434.6 } # or "ofta", "uta", "gta"
//!
//! [optimizer]
//! d = 330
//! ```

use std::path::Path;

use serde::Deserialize;
use serde_json::Value;

use crate::distributions::{FleetFamily, FleetSpec};
use crate::error::{Error, Result};
use crate::optimizer::{OptimizerConfig, QuadraticSgd};
use crate::simulator::{Experiment, StopRule};
use crate::Policy;

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawConfig {
    name: Option<String>,
    n: usize,
    #[serde(alias = "B")]
    budget: u32,
    #[serde(alias = "K")]
    rounds: u64,
    policy: Value,
    #[serde(default)]
    family: Option<Value>,
    #[serde(default)]
    seeds: Option<Vec<u64>>,
    #[serde(default)]
    threshold: Option<f64>,
    #[serde(default)]
    optimizer: Option<OptimizerConfig>,
    #[serde(default)]
    warm_start: u64,
    #[serde(default)]
    record_every: Option<u64>,
}

/// A validated experiment: one fleet, one policy, several seeds.
#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentConfig {
    pub name: String,
    pub n: usize,
    pub budget: u32,
    /// Round cap.
    pub rounds: u64,
    pub policy: Policy,
    pub family: FleetFamily,
    pub seeds: Vec<u64>,
    /// Stop a run once suboptimality drops below this.
    pub threshold: Option<f64>,
    /// `None` when the optimizer is disabled.
    pub optimizer: Option<OptimizerConfig>,
    /// Bandit-only rounds played before round 1.
    pub warm_start: u64,
    /// Keep every `record_every`-th round (plus the last) in the CSV output.
    pub record_every: u64,
}

fn policy_from_value(v: Value) -> Result<Policy> {
    let policy = match v {
        Value::String(s) => match s.as_str() {
            "ofta" => Policy::Ofta,
            "uta" => Policy::Uta,
            "gta" => Policy::Gta,
            "ata" => return Err(Error::config("policy.alpha", "required for ata")),
            "ata-empirical" => {
                return Err(Error::config("policy.eta", "required for ata-empirical"))
            }
            other => return Err(Error::config("policy", format!("unknown policy `{other}`"))),
        },
        Value::Object(_) => {
            serde_json::from_value(v).map_err(|e| Error::config("policy", e.to_string()))?
        }
        other => {
            return Err(Error::config(
                "policy",
                format!("expected a string or table, got {other}"),
            ))
        }
    };
    policy.validate()?;
    Ok(policy)
}

fn family_from_value(v: Option<Value>) -> Result<FleetFamily> {
    let v = match v {
        None => return Ok(FleetFamily::SqrtExp { c: 29.0 }),
        Some(Value::String(s)) => serde_json::json!({ "kind": s }),
        Some(v) => v,
    };
    serde_json::from_value(v).map_err(|e| Error::config("family", e.to_string()))
}

impl ExperimentConfig {
    pub fn from_path(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        let parsed = match path.extension().and_then(|e| e.to_str()) {
            Some("json") => Self::from_json_str(&text),
            _ => Self::from_toml_str(&text),
        };
        let mut cfg = parsed.map_err(|e| match e {
            Error::Parse { message, .. } => Error::Parse {
                path: path.to_path_buf(),
                message,
            },
            other => other,
        })?;
        if cfg.name.is_empty() {
            cfg.name = path
                .file_stem()
                .map(|s| s.to_string_lossy().into_owned())
                .unwrap_or_else(|| "experiment".into());
        }
        Ok(cfg)
    }

    pub fn from_toml_str(text: &str) -> Result<Self> {
        let raw: RawConfig = toml::from_str(text).map_err(|e| Error::Parse {
            path: "<toml>".into(),
            message: e.to_string(),
        })?;
        Self::from_raw(raw)
    }

    pub fn from_json_str(text: &str) -> Result<Self> {
        let raw: RawConfig = serde_json::from_str(text).map_err(|e| Error::Parse {
            path: "<json>".into(),
            message: e.to_string(),
        })?;
        Self::from_raw(raw)
    }

    fn from_raw(raw: RawConfig) -> Result<Self> {
        let policy = policy_from_value(raw.policy)?;
        let family = family_from_value(raw.family)?;
        let optimizer = match raw.optimizer {
            Some(o) if !o.enabled => None,
            Some(o) => Some(o),
            None => Some(OptimizerConfig::default()),
        };
        let cfg = ExperimentConfig {
            name: raw.name.unwrap_or_default(),
            n: raw.n,
            budget: raw.budget,
            rounds: raw.rounds,
            policy,
            family,
            seeds: raw.seeds.unwrap_or_else(|| (1..=5).collect()),
            threshold: raw.threshold,
            optimizer,
            warm_start: raw.warm_start,
            record_every: raw.record_every.unwrap_or(1),
        };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        if self.n == 0 {
            return Err(Error::config("n", "must be >= 1"));
        }
        if self.budget == 0 {
            return Err(Error::config("budget", "must be >= 1"));
        }
        if self.rounds == 0 {
            return Err(Error::config("rounds", "must be >= 1"));
        }
        if self.seeds.is_empty() {
            return Err(Error::config("seeds", "must not be empty"));
        }
        if self.record_every == 0 {
            return Err(Error::config("record_every", "must be >= 1"));
        }
        self.policy.validate()?;
        if let Some(t) = self.threshold {
            if !(t.is_finite() && t > 0.0) {
                return Err(Error::config(
                    "threshold",
                    format!("must be finite and > 0, got {t}"),
                ));
            }
            if self.optimizer.is_none() {
                return Err(Error::config("threshold", "needs the optimizer enabled"));
            }
        }
        if let Some(o) = &self.optimizer {
            if o.d == 0 {
                return Err(Error::config("optimizer.d", "must be >= 1"));
            }
            if !(o.sigma.is_finite() && o.sigma >= 0.0) {
                return Err(Error::config(
                    "optimizer.sigma",
                    format!("must be finite and >= 0, got {}", o.sigma),
                ));
            }
            if let Some(g) = o.gamma {
                if !(g.is_finite() && g > 0.0) {
                    return Err(Error::config(
                        "optimizer.gamma",
                        format!("must be finite and > 0, got {g}"),
                    ));
                }
            }
        }
        self.fleet().map_err(|e| match e {
            Error::Config { message, .. } => Error::config("family", message),
            other => other,
        })?;
        Ok(())
    }

    pub fn fleet(&self) -> Result<FleetSpec> {
        FleetSpec::make(&self.family, self.n)
    }

    pub fn stop_rule(&self) -> StopRule {
        StopRule {
            max_rounds: self.rounds,
            threshold: self.threshold,
        }
    }

    /// The configured run for one seed, warm start included.
    pub fn experiment(&self, seed: u64) -> Result<Experiment> {
        let mut exp = Experiment::new(
            self.fleet()?,
            self.policy,
            self.budget,
            seed,
            self.stop_rule(),
        )?;
        if let Some(o) = &self.optimizer {
            exp = exp.with_optimizer(Box::new(QuadraticSgd::new(o, seed)));
        }
        Ok(exp.with_warm_start(self.warm_start))
    }
}

/// Loads every `.toml` and `.json` file of a directory, sorted by file name.
pub fn load_dir(dir: impl AsRef<Path>) -> Result<Vec<ExperimentConfig>> {
    let dir = dir.as_ref();
    let mut paths: Vec<_> = std::fs::read_dir(dir)
        .map_err(|e| Error::io(dir, e))?
        .filter_map(|entry| entry.ok().map(|e| e.path()))
        .filter(|p| {
            matches!(
                p.extension().and_then(|e| e.to_str()),
                Some("toml" | "json")
            )
        })
        .collect();
    paths.sort();
    if paths.is_empty() {
        return Err(Error::config(
            "config-dir",
            format!("no .toml or .json files in {}", dir.display()),
        ));
    }
    paths.iter().map(ExperimentConfig::from_path).collect()
}
