//! Lower confidence bounds on worker means, with confidence level `1/k²`.

use super::AllocatorState;

/// `√(ln(2k²)/K) + ln(2k²)/K`; infinite when `K = 0`.
pub fn conf_width(round_k: u64, usage_count: u64) -> f64 {
    assert!(round_k >= 1, "rounds are numbered from 1");
    if usage_count == 0 {
        return f64::INFINITY;
    }
    let k = round_k as f64;
    let ratio = (2.0 * k * k).ln() / usage_count as f64;
    ratio.sqrt() + ratio
}

/// Additive confidence radius `2α · conf_width(k, K)`.
pub fn conf_ata(alpha: f64, round_k: u64, usage_count: u64) -> f64 {
    2.0 * alpha * conf_width(round_k, usage_count)
}

/// `(μ̂ᵢ − conf)₊` per worker. Unvisited workers score 0.
pub fn lcb_ata(state: &AllocatorState, alpha: f64) -> Vec<f64> {
    let k = state.round();
    state
        .usage_counts()
        .iter()
        .zip(state.empirical_means())
        .map(|(&count, &mean)| {
            if count == 0 {
                0.0
            } else {
                (mean - conf_ata(alpha, k, count)).max(0.0)
            }
        })
        .collect()
}

/// `μ̂ᵢ · (1 − 2η·conf_width)₊` per worker. Unvisited workers score 0.
pub fn lcb_empirical(state: &AllocatorState, eta: f64) -> Vec<f64> {
    let k = state.round();
    state
        .usage_counts()
        .iter()
        .zip(state.empirical_means())
        .map(|(&count, &mean)| {
            if count == 0 {
                0.0
            } else {
                mean * (1.0 - 2.0 * eta * conf_width(k, count)).max(0.0)
            }
        })
        .collect()
}
