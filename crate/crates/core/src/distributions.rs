//! Worker computation-time models.
//!
//! Each worker ("arm") draws i.i.d. task durations from a positive,
//! sub-exponential distribution. An [`ArmModel`] carries the sampler together
//! with its exact mean and an upper bound on the centered Orlicz norm
//! `‖X − μ‖ψ₁`, which the confidence bounds in [`crate::allocation`] need.

use std::f64::consts::{FRAC_2_PI, PI};

use rand::Rng;
use rand_distr::{Distribution, Exp, Gamma, LogNormal, Normal, Uniform};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Base law of a task duration, before the additive shift.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "dist", rename_all = "kebab-case", deny_unknown_fields)]
pub enum TimeDistribution {
    /// Exponential with the given scale (mean `scale`).
    Exponential {
        scale: f64,
    },
    Uniform {
        low: f64,
        high: f64,
    },
    /// `|N(0, sigma²)|`.
    HalfNormal {
        sigma: f64,
    },
    /// `exp(N(mu, sigma²))`.
    Lognormal {
        mu: f64,
        sigma: f64,
    },
    /// Shape/scale parameterization (mean `shape * scale`).
    Gamma {
        shape: f64,
        scale: f64,
    },
    /// Point mass.
    Deterministic {
        value: f64,
    },
}

/// Serializable description of one worker: a base law plus a constant shift.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ArmSpec {
    #[serde(flatten)]
    pub dist: TimeDistribution,
    #[serde(default)]
    pub shift: f64,
}

impl ArmSpec {
    pub fn shifted_exp(shift: f64, scale: f64) -> Self {
        ArmSpec {
            dist: TimeDistribution::Exponential { scale },
            shift,
        }
    }

    pub fn deterministic(value: f64) -> Self {
        ArmSpec {
            dist: TimeDistribution::Deterministic { value },
            shift: 0.0,
        }
    }
}

#[derive(Debug, Clone, Copy)]
enum Sampler {
    Exp(Exp<f64>),
    Uniform(Uniform<f64>),
    HalfNormal(Normal<f64>),
    Lognormal(LogNormal<f64>),
    Gamma(Gamma<f64>),
    Point(f64),
}

/// A validated worker model with its analytic mean and Orlicz-norm bound.
#[derive(Debug, Clone)]
pub struct ArmModel {
    spec: ArmSpec,
    sampler: Sampler,
    mean: f64,
    orlicz_bound: f64,
}

fn invalid(msg: String) -> Error {
    Error::InvalidParameter(msg)
}

fn require(cond: bool, msg: impl FnOnce() -> String) -> Result<()> {
    if cond {
        Ok(())
    } else {
        Err(invalid(msg()))
    }
}

fn finite_positive(name: &str, v: f64) -> Result<()> {
    require(v.is_finite() && v > 0.0, || {
        format!("{name} must be finite and > 0, got {v}")
    })
}

/// Bisection for an increasing function on `[lo, hi]`.
fn bisect(f: impl Fn(f64) -> f64, mut lo: f64, mut hi: f64) -> f64 {
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if f(mid) < 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

/// `‖E − β‖ψ₁ / β` for `E ~ Exp(scale β)`.
///
/// With `t = β/C`, `E exp(|E − β|/C) = (eᵗ − e⁻¹)/(1 + t) + e⁻¹/(1 − t)`;
/// the norm is `β/t*` where that expression equals 2.
pub fn centered_exp_orlicz_factor() -> f64 {
    let e_inv = (-1.0f64).exp();
    let g = |t: f64| (t.exp() - e_inv) / (1.0 + t) + e_inv / (1.0 - t) - 2.0;
    1.0 / bisect(g, 1e-12, 1.0 - 1e-12)
}

/// `‖U‖ψ₁ / h` for `U ~ Uniform(−h, h)`: with `t = h/C`, `(eᵗ − 1)/t = 2`.
pub fn centered_uniform_orlicz_factor() -> f64 {
    let g = |t: f64| t.exp_m1() / t - 2.0;
    1.0 / bisect(g, 1e-12, 10.0)
}

impl ArmModel {
    pub fn new(spec: ArmSpec) -> Result<Self> {
        let shift = spec.shift;
        require(shift.is_finite() && shift >= 0.0, || {
            format!("shift must be finite and >= 0, got {shift}")
        })?;
        let (sampler, base_mean, orlicz) = match spec.dist {
            TimeDistribution::Exponential { scale } => {
                finite_positive("exponential scale", scale)?;
                let exp = Exp::new(1.0 / scale).map_err(|e| invalid(e.to_string()))?;
                (
                    Sampler::Exp(exp),
                    scale,
                    Some(centered_exp_orlicz_factor() * scale),
                )
            }
            TimeDistribution::Uniform { low, high } => {
                require(
                    low.is_finite() && high.is_finite() && low >= 0.0 && low < high,
                    || format!("uniform needs 0 <= low < high, got [{low}, {high}]"),
                )?;
                let u = Uniform::new(low, high).map_err(|e| invalid(e.to_string()))?;
                let half = 0.5 * (high - low);
                (
                    Sampler::Uniform(u),
                    0.5 * (low + high),
                    Some(centered_uniform_orlicz_factor() * half),
                )
            }
            TimeDistribution::HalfNormal { sigma } => {
                finite_positive("half-normal sigma", sigma)?;
                let normal = Normal::new(0.0, sigma).map_err(|e| invalid(e.to_string()))?;
                (Sampler::HalfNormal(normal), sigma * FRAC_2_PI.sqrt(), None)
            }
            TimeDistribution::Lognormal { mu, sigma } => {
                require(mu.is_finite(), || {
                    format!("lognormal mu must be finite, got {mu}")
                })?;
                finite_positive("lognormal sigma", sigma)?;
                let ln = LogNormal::new(mu, sigma).map_err(|e| invalid(e.to_string()))?;
                (
                    Sampler::Lognormal(ln),
                    (mu + 0.5 * sigma * sigma).exp(),
                    None,
                )
            }
            TimeDistribution::Gamma { shape, scale } => {
                finite_positive("gamma shape", shape)?;
                finite_positive("gamma scale", scale)?;
                let g = Gamma::new(shape, scale).map_err(|e| invalid(e.to_string()))?;
                (Sampler::Gamma(g), shape * scale, None)
            }
            TimeDistribution::Deterministic { value } => {
                require(value.is_finite() && value >= 0.0, || {
                    format!("deterministic value must be finite and >= 0, got {value}")
                })?;
                (Sampler::Point(value), value, Some(0.0))
            }
        };
        let mean = shift + base_mean;
        finite_positive("mean", mean)?;
        // Families without a closed-form centered norm fall back to 2·mean.
        let orlicz_bound = orlicz.unwrap_or(2.0 * mean);
        Ok(ArmModel {
            spec,
            sampler,
            mean,
            orlicz_bound,
        })
    }

    pub fn spec(&self) -> &ArmSpec {
        &self.spec
    }

    pub fn mean(&self) -> f64 {
        self.mean
    }

    /// Upper bound on `‖X − μ‖ψ₁`.
    pub fn orlicz_bound(&self) -> f64 {
        self.orlicz_bound
    }

    pub fn is_deterministic(&self) -> bool {
        matches!(self.sampler, Sampler::Point(_))
    }

    /// One task duration. Never negative.
    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        let base = match &self.sampler {
            Sampler::Exp(d) => d.sample(rng),
            Sampler::Uniform(d) => d.sample(rng),
            Sampler::HalfNormal(d) => d.sample(rng).abs(),
            Sampler::Lognormal(d) => d.sample(rng),
            Sampler::Gamma(d) => d.sample(rng),
            Sampler::Point(v) => *v,
        };
        self.spec.shift + base
    }
}

/// Named fleet constructions used by the experiments.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
pub enum FleetFamily {
    /// Worker `i`: `c√i + Exp(c√i)`, mean `2c√i`.
    SqrtExp {
        #[serde(default = "default_c")]
        c: f64,
    },
    /// Worker `i`: `ci + Exp(ci)`, mean `2ci`.
    LinearExp {
        #[serde(default = "default_c")]
        c: f64,
    },
    /// Groups of five workers (exponential, uniform, half-normal, lognormal,
    /// gamma) sharing the mean `2m`, `m = c(5g + 1)` for group `g`.
    Heterogeneous {
        #[serde(default = "default_c")]
        c: f64,
    },
    /// Worker `i`: `Exp(base · i)`.
    ExpOnly {
        #[serde(default = "default_exp_base")]
        base: f64,
    },
    /// Explicit per-worker list; its length must equal `n`.
    Custom { arms: Vec<ArmSpec> },
}

fn default_c() -> f64 {
    29.0
}

fn default_exp_base() -> f64 {
    2.0
}

impl FleetFamily {
    pub fn label(&self) -> &'static str {
        match self {
            FleetFamily::SqrtExp { .. } => "sqrt-exp",
            FleetFamily::LinearExp { .. } => "linear-exp",
            FleetFamily::Heterogeneous { .. } => "heterogeneous",
            FleetFamily::ExpOnly { .. } => "exp-only",
            FleetFamily::Custom { .. } => "custom",
        }
    }

    /// The five members of heterogeneous group `g` (0-based).
    pub fn heterogeneous_group(c: f64, g: usize) -> [ArmSpec; 5] {
        let m = c * (5 * g + 1) as f64;
        let with_shift = |dist| ArmSpec { dist, shift: m };
        [
            with_shift(TimeDistribution::Exponential { scale: m }),
            with_shift(TimeDistribution::Uniform {
                low: 0.5 * m,
                high: 1.5 * m,
            }),
            with_shift(TimeDistribution::HalfNormal {
                sigma: m * (PI / 2.0).sqrt(),
            }),
            with_shift(TimeDistribution::Lognormal {
                mu: m.ln() / 2.0,
                sigma: m.ln().sqrt(),
            }),
            with_shift(TimeDistribution::Gamma {
                shape: m * m,
                scale: 1.0 / m,
            }),
        ]
    }

    pub fn arm_specs(&self, n: usize) -> Result<Vec<ArmSpec>> {
        if n == 0 {
            return Err(Error::config("n", "must be >= 1"));
        }
        let idx = |i: usize| (i + 1) as f64;
        Ok(match self {
            FleetFamily::SqrtExp { c } => (0..n)
                .map(|i| ArmSpec::shifted_exp(c * idx(i).sqrt(), c * idx(i).sqrt()))
                .collect(),
            FleetFamily::LinearExp { c } => (0..n)
                .map(|i| ArmSpec::shifted_exp(c * idx(i), c * idx(i)))
                .collect(),
            FleetFamily::Heterogeneous { c } => {
                if !n.is_multiple_of(5) {
                    return Err(Error::config(
                        "n",
                        format!("heterogeneous fleets need n divisible by 5, got {n}"),
                    ));
                }
                (0..n / 5)
                    .flat_map(|g| Self::heterogeneous_group(*c, g))
                    .collect()
            }
            FleetFamily::ExpOnly { base } => (0..n)
                .map(|i| ArmSpec {
                    dist: TimeDistribution::Exponential {
                        scale: base * idx(i),
                    },
                    shift: 0.0,
                })
                .collect(),
            FleetFamily::Custom { arms } => {
                if arms.len() != n {
                    return Err(Error::config(
                        "family.arms",
                        format!("expected {n} arms, got {}", arms.len()),
                    ));
                }
                arms.clone()
            }
        })
    }
}

/// The set of workers taking part in an experiment.
#[derive(Debug, Clone)]
pub struct FleetSpec {
    arms: Vec<ArmModel>,
    eta: f64,
}

impl FleetSpec {
    pub fn new(arms: Vec<ArmModel>) -> Result<Self> {
        if arms.is_empty() {
            return Err(invalid("fleet needs at least one arm".into()));
        }
        let eta = arms
            .iter()
            .map(|a| a.orlicz_bound() / a.mean())
            .fold(0.0, f64::max);
        Ok(FleetSpec { arms, eta })
    }

    pub fn from_specs(specs: impl IntoIterator<Item = ArmSpec>) -> Result<Self> {
        Self::new(
            specs
                .into_iter()
                .map(ArmModel::new)
                .collect::<Result<_>>()?,
        )
    }

    pub fn make(family: &FleetFamily, n: usize) -> Result<Self> {
        Self::from_specs(family.arm_specs(n)?)
    }

    /// A fleet of point masses, mostly for tests.
    pub fn deterministic(means: &[f64]) -> Result<Self> {
        Self::from_specs(means.iter().map(|&m| ArmSpec::deterministic(m)))
    }

    pub fn len(&self) -> usize {
        self.arms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.arms.is_empty()
    }

    pub fn arms(&self) -> &[ArmModel] {
        &self.arms
    }

    pub fn arm(&self, i: usize) -> &ArmModel {
        &self.arms[i]
    }

    pub fn means(&self) -> Vec<f64> {
        self.arms.iter().map(ArmModel::mean).collect()
    }

    /// `max_i α_i / μ_i`.
    pub fn eta(&self) -> f64 {
        self.eta
    }

    /// `max_i α_i`.
    pub fn max_orlicz_bound(&self) -> f64 {
        self.arms
            .iter()
            .map(ArmModel::orlicz_bound)
            .fold(0.0, f64::max)
    }
}
