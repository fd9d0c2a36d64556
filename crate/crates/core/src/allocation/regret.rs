use super::{proxy_loss, ras, AllocationVector};
use crate::distributions::FleetSpec;
use crate::error::{Error, Result};

/// Smallest `k ≥ 1` with `(āᵢ + k)μᵢ > ℓ̄`, i.e. how many extra units on
/// worker `i` make the oracle allocation strictly worse.
///
/// For `ā` produced by [`ras`] this is always 1 or 2; anything else is
/// reported as an invariant violation.
pub fn k_gap(ell_bar: f64, a_bar_i: u32, mu_i: f64) -> Result<u32> {
    for k in 1..=2u32 {
        if (a_bar_i + k) as f64 * mu_i > ell_bar {
            return Ok(k);
        }
    }
    let k = ((ell_bar / mu_i).floor() as i64 - a_bar_i as i64 + 1).max(3);
    Err(Error::Invariant(format!(
        "k_gap = {k} for ā_i = {a_bar_i}, μ_i = {mu_i}, ℓ̄ = {ell_bar}; expected 1 or 2"
    )))
}

/// `Σₖ ℓ(aₖ, μ) − K·ℓ(ā, μ)` for a sequence of played allocations.
pub fn cumulative_regret(history: &[AllocationVector], fleet: &FleetSpec, budget: u32) -> f64 {
    let mut tracker = RegretTracker::new(fleet, budget);
    for a in history {
        tracker.record(a);
    }
    tracker.cumulative()
}

/// Running proxy-loss regret against the oracle allocation.
#[derive(Debug, Clone)]
pub struct RegretTracker {
    means: Vec<f64>,
    optimum: AllocationVector,
    optimal_loss: f64,
    cumulative: f64,
}

impl RegretTracker {
    pub fn new(fleet: &FleetSpec, budget: u32) -> Self {
        let means = fleet.means();
        let optimum = ras(&means, budget);
        let optimal_loss = proxy_loss(&optimum, &means);
        RegretTracker {
            means,
            optimum,
            optimal_loss,
            cumulative: 0.0,
        }
    }

    pub fn optimum(&self) -> &AllocationVector {
        &self.optimum
    }

    pub fn optimal_loss(&self) -> f64 {
        self.optimal_loss
    }

    pub fn means(&self) -> &[f64] {
        &self.means
    }

    /// Adds one round; returns `ℓ(a, μ)`.
    pub fn record(&mut self, a: &AllocationVector) -> f64 {
        let loss = proxy_loss(a, &self.means);
        self.cumulative += loss - self.optimal_loss;
        loss
    }

    pub fn cumulative(&self) -> f64 {
        self.cumulative
    }
}
