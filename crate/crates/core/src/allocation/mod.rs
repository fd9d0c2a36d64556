//! Allocation of a per-round task budget across workers.
//!
//! An allocation `a ∈ ℕⁿ` with `Σ aᵢ = B` is scored by the proxy loss
//! `ℓ(a, λ) = maxᵢ aᵢλᵢ`. The learning policies estimate `λ` with lower
//! confidence bounds on the worker means and minimize `ℓ` exactly with
//! [`ras`].

mod bounds;
mod policy;
mod ras;
mod regret;
mod state;

pub use bounds::{conf_ata, conf_width, lcb_ata, lcb_empirical};
pub use policy::{uniform_over_zero_scores, Allocator, Policy};
pub use ras::{brute_force_opt, ras, BruteForceOptimum, BRUTE_FORCE_LIMIT};
pub use regret::{cumulative_regret, k_gap, RegretTracker};
pub use state::AllocatorState;

use std::fmt;

/// Number of tasks given to each worker in one round.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Default)]
pub struct AllocationVector(Vec<u32>);

impl AllocationVector {
    pub fn new(counts: Vec<u32>) -> Self {
        AllocationVector(counts)
    }

    pub fn zeros(n: usize) -> Self {
        AllocationVector(vec![0; n])
    }

    /// All `budget` tasks on worker `i`.
    pub fn single(n: usize, i: usize, budget: u32) -> Self {
        let mut v = vec![0; n];
        v[i] = budget;
        AllocationVector(v)
    }

    pub fn counts(&self) -> &[u32] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn total(&self) -> u64 {
        self.0.iter().map(|&c| c as u64).sum()
    }

    /// Indices with at least one task.
    pub fn support(&self) -> impl Iterator<Item = usize> + '_ {
        self.0
            .iter()
            .enumerate()
            .filter(|(_, &c)| c > 0)
            .map(|(i, _)| i)
    }

    pub(crate) fn counts_mut(&mut self) -> &mut [u32] {
        &mut self.0
    }
}

impl std::ops::Index<usize> for AllocationVector {
    type Output = u32;

    fn index(&self, i: usize) -> &u32 {
        &self.0[i]
    }
}

impl From<Vec<u32>> for AllocationVector {
    fn from(v: Vec<u32>) -> Self {
        AllocationVector(v)
    }
}

impl fmt::Display for AllocationVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (i, c) in self.0.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{c}")?;
        }
        write!(f, ")")
    }
}

/// `ℓ(a, λ) = maxᵢ aᵢλᵢ`; zero for the empty allocation.
///
/// Panics if the lengths differ.
pub fn proxy_loss(a: &AllocationVector, lambda: &[f64]) -> f64 {
    assert_eq!(
        a.len(),
        lambda.len(),
        "allocation has {} entries but score vector has {}",
        a.len(),
        lambda.len()
    );
    a.counts()
        .iter()
        .zip(lambda)
        .map(|(&c, &l)| c as f64 * l)
        .fold(0.0, f64::max)
}

/// `|argmaxᵢ aᵢλᵢ|`, the number of workers attaining the proxy loss.
pub fn argmax_cardinality(a: &AllocationVector, lambda: &[f64]) -> usize {
    let best = proxy_loss(a, lambda);
    a.counts()
        .iter()
        .zip(lambda)
        .filter(|(&c, &l)| c as f64 * l == best)
        .count()
}
