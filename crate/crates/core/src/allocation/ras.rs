//! Exact minimization of the proxy loss over the allocation simplex.

use std::cmp::Ordering;

use super::{argmax_cardinality, proxy_loss, AllocationVector};
use crate::error::{Error, Result};

/// Recursive allocation selection, unrolled into a loop over the budget.
///
/// Starting from the empty allocation, each of the `budget` units goes to the
/// worker that keeps `maxᵢ aᵢsᵢ` smallest. Candidates are limited to the
/// prefix of the score-sorted workers up to and including the first one
/// without a task. Among equally good candidates the one leaving the fewest
/// workers at the maximum wins, then the lowest sorted position. Equal
/// scores keep their original order.
///
/// The result minimizes `ℓ(·, s)` and, among minimizers, `|argmaxᵢ aᵢsᵢ|`.
/// Cost is `O(n log m + budget·m)` with `m = min(budget, n)`.
///
/// Panics unless every score is finite and strictly positive and
/// `budget >= 1`.
pub fn ras(scores: &[f64], budget: u32) -> AllocationVector {
    assert!(budget >= 1, "budget must be positive");
    assert!(!scores.is_empty(), "need at least one score");
    assert!(
        scores.iter().all(|&s| s.is_finite() && s > 0.0),
        "scores must be finite and strictly positive: {scores:?}"
    );
    let n = scores.len();
    let m = n.min(budget as usize);

    // Only the m smallest scores can ever receive a unit; (score, index)
    // is a total order, so this matches a stable sort restricted to them.
    let by_score = |&i: &usize, &j: &usize| {
        scores[i]
            .partial_cmp(&scores[j])
            .unwrap_or(Ordering::Equal)
            .then(i.cmp(&j))
    };
    let mut order: Vec<usize> = (0..n).collect();
    if m < n {
        order.select_nth_unstable_by(m - 1, by_score);
        order.truncate(m);
    }
    order.sort_by(by_score);
    let sorted: Vec<f64> = order.iter().map(|&i| scores[i]).collect();

    let mut counts = vec![0u32; m];
    let mut current = 0.0f64;
    let mut at_max = 0usize;
    let mut first_zero = 0usize;
    for _ in 0..budget {
        let r = if first_zero < m { first_zero + 1 } else { m };
        let mut best: Option<(f64, usize, usize)> = None;
        for (j, (&c, &s)) in counts[..r].iter().zip(&sorted[..r]).enumerate() {
            let bumped = (c + 1) as f64 * s;
            let value = current.max(bumped);
            let card = match bumped.partial_cmp(&current) {
                Some(Ordering::Greater) => 1,
                Some(Ordering::Equal) => at_max + 1,
                _ => at_max,
            };
            let better = match best {
                None => true,
                Some((bv, bc, _)) => value < bv || (value == bv && card < bc),
            };
            if better {
                best = Some((value, card, j));
            }
        }
        let (value, card, j) = best.expect("candidate set is never empty");
        counts[j] += 1;
        current = value;
        at_max = card;
        while first_zero < m && counts[first_zero] > 0 {
            first_zero += 1;
        }
    }

    let mut out = vec![0u32; n];
    for (k, &i) in order.iter().enumerate() {
        out[i] = counts[k];
    }
    AllocationVector::new(out)
}

/// Largest action set [`brute_force_opt`] will enumerate.
pub const BRUTE_FORCE_LIMIT: u128 = 10_000_000;

#[derive(Debug, Clone, PartialEq)]
pub struct BruteForceOptimum {
    /// First minimizer in lexicographic order with minimal cardinality.
    pub allocation: AllocationVector,
    pub loss: f64,
    /// Smallest `|argmaxᵢ aᵢsᵢ|` among all minimizers.
    pub cardinality: usize,
    /// Number of allocations attaining `loss`.
    pub minimizers: usize,
}

fn binomial(n: u128, k: u128) -> u128 {
    let k = k.min(n - k);
    let mut acc: u128 = 1;
    for i in 0..k {
        acc = acc.saturating_mul(n - i) / (i + 1);
    }
    acc
}

/// Exhaustive search over `{a ∈ ℕⁿ : Σaᵢ = budget}`. Test oracle for [`ras`].
///
/// Refuses when the action set has more than [`BRUTE_FORCE_LIMIT`] members.
pub fn brute_force_opt(scores: &[f64], budget: u32) -> Result<BruteForceOptimum> {
    let n = scores.len();
    assert!(n >= 1 && budget >= 1, "need n >= 1 and budget >= 1");
    let size = binomial((n as u128) + budget as u128 - 1, budget as u128);
    if size > BRUTE_FORCE_LIMIT {
        return Err(Error::SearchTooLarge {
            size,
            limit: BRUTE_FORCE_LIMIT,
        });
    }

    fn walk(
        scores: &[f64],
        pos: usize,
        left: u32,
        cur: &mut Vec<u32>,
        best: &mut Option<BruteForceOptimum>,
    ) {
        if pos + 1 == scores.len() {
            cur[pos] = left;
            let a = AllocationVector::new(cur.clone());
            let loss = proxy_loss(&a, scores);
            let card = argmax_cardinality(&a, scores);
            match best {
                None => {
                    *best = Some(BruteForceOptimum {
                        allocation: a,
                        loss,
                        cardinality: card,
                        minimizers: 1,
                    })
                }
                Some(b) if loss < b.loss => {
                    *b = BruteForceOptimum {
                        allocation: a,
                        loss,
                        cardinality: card,
                        minimizers: 1,
                    }
                }
                Some(b) if loss == b.loss => {
                    b.minimizers += 1;
                    if card < b.cardinality {
                        b.cardinality = card;
                        b.allocation = a;
                    }
                }
                Some(_) => {}
            }
            return;
        }
        for take in (0..=left).rev() {
            cur[pos] = take;
            walk(scores, pos + 1, left - take, cur, best);
        }
    }

    let mut cur = vec![0u32; n];
    let mut best = None;
    walk(scores, 0, budget, &mut cur, &mut best);
    Ok(best.expect("action set is non-empty"))
}
