use rand::seq::index;
use rand::Rng;
use serde::{Deserialize, Serialize};

use super::{lcb_ata, lcb_empirical, ras, AllocationVector, AllocatorState};
use crate::distributions::FleetSpec;
use crate::error::{Error, Result};

/// How the per-round budget is distributed.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
pub enum Policy {
    /// Additive lower confidence bounds with Orlicz-norm bound `alpha`.
    Ata { alpha: f64 },
    /// Multiplicative lower confidence bounds with ratio bound `eta`.
    AtaEmpirical { eta: f64 },
    /// Oracle fixed allocation: exact optimum for the true means.
    Ofta,
    /// Uniform allocation.
    Uta,
    /// Greedy: every worker always busy, round ends at the B-th completion.
    Gta,
}

impl Policy {
    pub fn label(&self) -> &'static str {
        match self {
            Policy::Ata { .. } => "ata",
            Policy::AtaEmpirical { .. } => "ata-empirical",
            Policy::Ofta => "ofta",
            Policy::Uta => "uta",
            Policy::Gta => "gta",
        }
    }

    pub fn validate(&self) -> Result<()> {
        match *self {
            Policy::Ata { alpha } if !(alpha.is_finite() && alpha > 0.0) => Err(Error::config(
                "policy.alpha",
                format!("must be finite and > 0, got {alpha}"),
            )),
            Policy::AtaEmpirical { eta } if !(eta.is_finite() && eta > 0.0) => Err(Error::config(
                "policy.eta",
                format!("must be finite and > 0, got {eta}"),
            )),
            _ => Ok(()),
        }
    }

    /// Whether rounds are event-driven rather than a fixed allocation.
    pub fn is_greedy(&self) -> bool {
        matches!(self, Policy::Gta)
    }

    pub fn is_learning(&self) -> bool {
        matches!(self, Policy::Ata { .. } | Policy::AtaEmpirical { .. })
    }
}

/// Spreads `budget` evenly over the workers with zero score.
///
/// Each gets `⌊budget/|Z|⌋`; the remaining units go to consecutive members
/// of `Z` starting at offset `(round − 1) mod |Z|`, so the extra units visit
/// every zero-score worker over successive rounds. Returns `None` when no
/// score is zero.
pub fn uniform_over_zero_scores(
    scores: &[f64],
    budget: u32,
    round: u64,
) -> Option<AllocationVector> {
    let zeros: Vec<usize> = (0..scores.len()).filter(|&i| scores[i] == 0.0).collect();
    if zeros.is_empty() {
        return None;
    }
    let z = zeros.len();
    let base = budget / z as u32;
    let extra = (budget % z as u32) as usize;
    let mut a = AllocationVector::zeros(scores.len());
    let counts = a.counts_mut();
    for &i in &zeros {
        counts[i] = base;
    }
    let offset = (round.saturating_sub(1) % z as u64) as usize;
    for t in 0..extra {
        counts[zeros[(offset + t) % z]] += 1;
    }
    Some(a)
}

/// Chooses static allocations for a fixed fleet and budget.
///
/// The oracle allocation (exact optimum on the true means) is computed once
/// at construction; it is what OFTA plays and the reference for regret.
#[derive(Debug, Clone)]
pub struct Allocator {
    policy: Policy,
    budget: u32,
    oracle: AllocationVector,
}

impl Allocator {
    pub fn new(policy: Policy, fleet: &FleetSpec, budget: u32) -> Result<Self> {
        policy.validate()?;
        if budget == 0 {
            return Err(Error::config("budget", "must be >= 1"));
        }
        Ok(Allocator {
            policy,
            budget,
            oracle: ras(&fleet.means(), budget),
        })
    }

    pub fn policy(&self) -> Policy {
        self.policy
    }

    pub fn budget(&self) -> u32 {
        self.budget
    }

    /// `ā`, the proxy-loss optimum on the true means.
    pub fn oracle(&self) -> &AllocationVector {
        &self.oracle
    }

    /// Scores used by the learning policies; `None` for the others.
    pub fn scores(&self, state: &AllocatorState) -> Option<Vec<f64>> {
        match self.policy {
            Policy::Ata { alpha } => Some(lcb_ata(state, alpha)),
            Policy::AtaEmpirical { eta } => Some(lcb_empirical(state, eta)),
            _ => None,
        }
    }

    /// Allocation for the round `state.round()`. `rng` is only consumed by
    /// UTA. Panics for GTA, whose rounds have no fixed allocation.
    pub fn choose<R: Rng + ?Sized>(&self, state: &AllocatorState, rng: &mut R) -> AllocationVector {
        let n = state.len();
        assert_eq!(n, self.oracle.len(), "state and fleet sizes differ");
        match self.policy {
            Policy::Ata { .. } | Policy::AtaEmpirical { .. } => {
                let scores = self.scores(state).expect("learning policy");
                uniform_over_zero_scores(&scores, self.budget, state.round())
                    .unwrap_or_else(|| ras(&scores, self.budget))
            }
            Policy::Ofta => self.oracle.clone(),
            Policy::Uta => uniform_allocation(n, self.budget, rng),
            Policy::Gta => panic!("GTA rounds are event-driven and have no static allocation"),
        }
    }
}

fn uniform_allocation<R: Rng + ?Sized>(n: usize, budget: u32, rng: &mut R) -> AllocationVector {
    let mut a = AllocationVector::zeros(n);
    let counts = a.counts_mut();
    if n > budget as usize {
        for i in index::sample(rng, n, budget as usize) {
            counts[i] = 1;
        }
    } else {
        let base = budget / n as u32;
        counts.iter_mut().for_each(|c| *c = base);
        let extra = (budget % n as u32) as usize;
        for i in index::sample(rng, n, extra) {
            counts[i] += 1;
        }
    }
    a
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::{stream, Domain};

    fn fleet(means: &[f64]) -> FleetSpec {
        FleetSpec::deterministic(means).unwrap()
    }

    #[test]
    fn first_round_is_uniform() {
        let f = fleet(&[1.0, 2.0, 3.0, 4.0]);
        let mut rng = stream(0, Domain::Auxiliary, 0, 0);
        for policy in [
            Policy::Ata { alpha: 1.0 },
            Policy::AtaEmpirical { eta: 1.0 },
        ] {
            let alloc = Allocator::new(policy, &f, 8).unwrap();
            let a = alloc.choose(&AllocatorState::new(4), &mut rng);
            assert_eq!(a.counts(), &[2, 2, 2, 2]);
        }
    }

    #[test]
    fn zero_score_remainder_rotates() {
        let scores = [0.0, 5.0, 0.0, 0.0];
        let r1 = uniform_over_zero_scores(&scores, 4, 1).unwrap();
        assert_eq!(r1.counts(), &[2, 0, 1, 1]);
        let r2 = uniform_over_zero_scores(&scores, 4, 2).unwrap();
        assert_eq!(r2.counts(), &[1, 0, 2, 1]);
        let r3 = uniform_over_zero_scores(&scores, 4, 3).unwrap();
        assert_eq!(r3.counts(), &[1, 0, 1, 2]);
        assert!(uniform_over_zero_scores(&[1.0, 2.0], 3, 1).is_none());
    }

    #[test]
    fn ofta_plays_oracle() {
        let f = fleet(&[1.0, 2.0]);
        let alloc = Allocator::new(Policy::Ofta, &f, 3).unwrap();
        let mut rng = stream(0, Domain::Auxiliary, 0, 0);
        assert_eq!(
            alloc.choose(&AllocatorState::new(2), &mut rng).counts(),
            &[2, 1]
        );
        assert_eq!(alloc.oracle().counts(), &[2, 1]);
    }

    #[test]
    fn uta_spreads_budget() {
        let f = fleet(&[1.0; 10]);
        let alloc = Allocator::new(Policy::Uta, &f, 23).unwrap();
        for round in 0..20 {
            let mut rng = stream(3, Domain::Policy, 0, round);
            let a = alloc.choose(&AllocatorState::new(10), &mut rng);
            assert_eq!(a.total(), 23);
            assert!(a.counts().iter().all(|&c| c == 2 || c == 3));
            assert_eq!(a.counts().iter().filter(|&&c| c == 3).count(), 3);
        }
        let wide = Allocator::new(Policy::Uta, &fleet(&[1.0; 40]), 23).unwrap();
        let mut rng = stream(3, Domain::Policy, 0, 0);
        let a = wide.choose(&AllocatorState::new(40), &mut rng);
        assert_eq!(a.total(), 23);
        assert!(a.counts().iter().all(|&c| c <= 1));
    }

    #[test]
    fn learning_policy_uses_ras_once_scores_positive() {
        let f = fleet(&[1.0, 2.0, 3.0]);
        let alloc = Allocator::new(Policy::AtaEmpirical { eta: 1e-9 }, &f, 4).unwrap();
        let st = AllocatorState::from_history(vec![10, 10, 10], vec![10.0, 20.0, 30.0], 5);
        let mut rng = stream(0, Domain::Auxiliary, 0, 0);
        assert_eq!(alloc.choose(&st, &mut rng).counts(), &[3, 1, 0]);
    }

    #[test]
    fn validation() {
        let f = fleet(&[1.0]);
        assert!(Allocator::new(Policy::Ata { alpha: 0.0 }, &f, 1).is_err());
        assert!(Allocator::new(Policy::AtaEmpirical { eta: -1.0 }, &f, 1).is_err());
        assert!(Allocator::new(Policy::Ofta, &f, 0).is_err());
    }

    #[test]
    #[should_panic(expected = "event-driven")]
    fn gta_has_no_static_allocation() {
        let f = fleet(&[1.0]);
        let alloc = Allocator::new(Policy::Gta, &f, 1).unwrap();
        alloc.choose(
            &AllocatorState::new(1),
            &mut stream(0, Domain::Auxiliary, 0, 0),
        );
    }
}
