use super::AllocationVector;

/// Per-worker statistics collected from semi-bandit feedback.
#[derive(Debug, Clone, PartialEq)]
pub struct AllocatorState {
    usage_counts: Vec<u64>,
    usage_times: Vec<f64>,
    empirical_means: Vec<f64>,
    round: u64,
}

impl AllocatorState {
    /// Fresh state for `n` workers at round 1.
    pub fn new(n: usize) -> Self {
        AllocatorState {
            usage_counts: vec![0; n],
            usage_times: vec![0.0; n],
            empirical_means: vec![0.0; n],
            round: 1,
        }
    }

    /// State rebuilt from accumulated counts and busy times, e.g. carried over
    /// from earlier runs on the same workers.
    pub fn from_history(usage_counts: Vec<u64>, usage_times: Vec<f64>, round: u64) -> Self {
        assert_eq!(
            usage_counts.len(),
            usage_times.len(),
            "history length mismatch"
        );
        assert!(round >= 1, "rounds are numbered from 1");
        let empirical_means = usage_counts
            .iter()
            .zip(&usage_times)
            .map(|(&c, &t)| if c == 0 { 0.0 } else { t / c as f64 })
            .collect();
        AllocatorState {
            usage_counts,
            usage_times,
            empirical_means,
            round,
        }
    }

    pub fn len(&self) -> usize {
        self.usage_counts.len()
    }

    pub fn is_empty(&self) -> bool {
        self.usage_counts.is_empty()
    }

    /// Index `k` of the round about to be played (starts at 1).
    pub fn round(&self) -> u64 {
        self.round
    }

    pub fn usage_counts(&self) -> &[u64] {
        &self.usage_counts
    }

    pub fn usage_times(&self) -> &[f64] {
        &self.usage_times
    }

    pub fn empirical_means(&self) -> &[f64] {
        &self.empirical_means
    }

    /// Folds in the observed task durations of one round and advances the
    /// round index. `observed[i]` must hold exactly `a[i]` durations.
    pub fn update(&mut self, a: &AllocationVector, observed: &[Vec<f64>]) {
        assert_eq!(a.len(), self.len(), "allocation length mismatch");
        assert_eq!(observed.len(), self.len(), "feedback length mismatch");
        for (i, times) in observed.iter().enumerate() {
            let count = a[i];
            assert_eq!(
                times.len(),
                count as usize,
                "worker {i}: allocated {count} tasks but observed {} durations",
                times.len()
            );
            if count == 0 {
                continue;
            }
            self.usage_counts[i] += count as u64;
            self.usage_times[i] += times.iter().sum::<f64>();
            self.empirical_means[i] = self.usage_times[i] / self.usage_counts[i] as f64;
        }
        self.round += 1;
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn update_arithmetic() {
        let mut st = AllocatorState::new(3);
        let a = AllocationVector::new(vec![2, 0, 1]);
        st.update(&a, &[vec![3.0, 5.0], vec![], vec![7.0]]);
        assert_eq!(st.usage_counts(), &[2, 0, 1]);
        assert_eq!(st.usage_times(), &[8.0, 0.0, 7.0]);
        assert_eq!(st.empirical_means(), &[4.0, 0.0, 7.0]);
        assert_eq!(st.round(), 2);
    }

    #[test]
    fn incremental_mean() {
        let mut st = AllocatorState::new(1);
        st.update(&AllocationVector::new(vec![3]), &[vec![10.0, 10.0, 10.0]]);
        assert_eq!(st.usage_times(), &[30.0]);
        st.update(&AllocationVector::new(vec![1]), &[vec![10.0]]);
        assert_eq!(st.empirical_means(), &[10.0]);
        assert_eq!(st.usage_counts(), &[4]);
    }

    #[test]
    #[should_panic(expected = "allocated 2 tasks but observed 1")]
    fn feedback_must_match_allocation() {
        let mut st = AllocatorState::new(1);
        st.update(&AllocationVector::new(vec![2]), &[vec![1.0]]);
    }
}
