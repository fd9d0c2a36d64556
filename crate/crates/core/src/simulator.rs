//! Virtual-time round engine.
//!
//! A static round hands `aᵢ` tasks to worker `i`; the worker runs them back to
//! back and the round lasts `C(a) = max_{i ∈ supp a} Σᵤ X⁽ᵘ⁾ᵢ`. A greedy round
//! keeps every worker busy and ends at the B-th completion anywhere in the
//! fleet. Worker `i`'s task durations in round `k` come from the stream
//! `(seed, i, k)` in both modes, so the two see the same realized times.

use std::cmp::{Ordering, Reverse};
use std::collections::BinaryHeap;

use crate::allocation::{AllocationVector, Allocator, AllocatorState, Policy, RegretTracker};
use crate::distributions::FleetSpec;
use crate::error::Result;
use crate::optimizer::RoundOptimizer;
use crate::rng::{stream, Domain, SimRng};

/// Source of the per-worker random streams of one round.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct RoundStreams {
    seed: u64,
    domain: Domain,
    round: u64,
}

impl RoundStreams {
    pub fn new(seed: u64, round: u64) -> Self {
        RoundStreams {
            seed,
            domain: Domain::WorkerTimes,
            round,
        }
    }

    /// Streams for bandit-only warm-start rounds; disjoint from [`Self::new`].
    pub fn warm_start(seed: u64, round: u64) -> Self {
        RoundStreams {
            seed,
            domain: Domain::WarmStart,
            round,
        }
    }

    pub fn worker(&self, i: usize) -> SimRng {
        stream(self.seed, self.domain, i as u64, self.round)
    }
}

/// Outcome of a round with a fixed allocation.
#[derive(Debug, Clone, PartialEq)]
pub struct StaticRound {
    /// `C(a)`.
    pub round_time: f64,
    /// Sum of all task durations; static rounds waste nothing.
    pub worker_time: f64,
    /// `observed[i]` holds the `aᵢ` durations of worker `i`.
    pub observed: Vec<Vec<f64>>,
}

pub fn run_static_round(
    a: &AllocationVector,
    fleet: &FleetSpec,
    streams: &RoundStreams,
) -> StaticRound {
    assert_eq!(a.len(), fleet.len(), "allocation and fleet sizes differ");
    let mut observed = vec![Vec::new(); fleet.len()];
    let mut round_time = 0.0f64;
    let mut worker_time = 0.0;
    for i in a.support() {
        let arm = fleet.arm(i);
        let mut rng = streams.worker(i);
        let times: Vec<f64> = (0..a[i]).map(|_| arm.sample(&mut rng)).collect();
        let busy: f64 = times.iter().sum();
        round_time = round_time.max(busy);
        worker_time += busy;
        observed[i] = times;
    }
    StaticRound {
        round_time,
        worker_time,
        observed,
    }
}

/// One task completion in a greedy round.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Completion {
    pub worker: usize,
    pub time: f64,
    pub duration: f64,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct GreedyTrace {
    /// The B used completions, in time order.
    pub completions: Vec<Completion>,
    /// Tasks started during the round, including the abandoned ones.
    pub tasks_started: u64,
}

impl GreedyTrace {
    pub fn tasks_completed(&self) -> usize {
        self.completions.len()
    }

    /// Started tasks whose result was never used.
    pub fn tasks_wasted(&self) -> u64 {
        self.tasks_started - self.completions.len() as u64
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct GreedyRound {
    /// Time of the B-th completion.
    pub round_time: f64,
    /// `n · round_time`: every worker is busy for the whole round and
    /// in-flight work at the end is charged too.
    pub worker_time: f64,
    /// Completed tasks per worker; sums to B.
    pub completed: AllocationVector,
    pub trace: GreedyTrace,
}

#[derive(Debug, Clone, Copy, PartialEq)]
struct Event {
    time: f64,
    worker: usize,
    duration: f64,
}

impl Eq for Event {}

impl Ord for Event {
    fn cmp(&self, other: &Self) -> Ordering {
        self.time
            .total_cmp(&other.time)
            .then(self.worker.cmp(&other.worker))
    }
}

impl PartialOrd for Event {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// Event simulation of a greedy round: all workers start at time 0 and pick
/// up a new task the moment they finish one, until `budget` tasks are done.
/// Simultaneous completions resolve by ascending worker index.
pub fn run_greedy_round(fleet: &FleetSpec, budget: u32, streams: &RoundStreams) -> GreedyRound {
    assert!(budget >= 1, "budget must be positive");
    let n = fleet.len();
    let mut rngs: Vec<SimRng> = (0..n).map(|i| streams.worker(i)).collect();
    let mut heap = BinaryHeap::with_capacity(n);
    for (i, rng) in rngs.iter_mut().enumerate() {
        let d = fleet.arm(i).sample(rng);
        heap.push(Reverse(Event {
            time: d,
            worker: i,
            duration: d,
        }));
    }
    let mut trace = GreedyTrace {
        completions: Vec::with_capacity(budget as usize),
        tasks_started: n as u64,
    };
    let mut completed = AllocationVector::zeros(n);
    let mut now = 0.0;
    while trace.completions.len() < budget as usize {
        let Reverse(ev) = heap
            .pop()
            .expect("every worker always has a task in flight");
        now = ev.time;
        trace.completions.push(Completion {
            worker: ev.worker,
            time: ev.time,
            duration: ev.duration,
        });
        completed.counts_mut()[ev.worker] += 1;
        if trace.completions.len() < budget as usize {
            let d = fleet.arm(ev.worker).sample(&mut rngs[ev.worker]);
            heap.push(Reverse(Event {
                time: now + d,
                worker: ev.worker,
                duration: d,
            }));
            trace.tasks_started += 1;
        }
    }
    GreedyRound {
        round_time: now,
        worker_time: n as f64 * now,
        completed,
        trace,
    }
}

/// Metrics of one round of an experiment.
#[derive(Debug, Clone, PartialEq)]
pub struct RoundRecord {
    pub round: u64,
    /// `C(aₖ)`, or the B-th completion time for greedy rounds.
    pub round_time: f64,
    pub cum_runtime: f64,
    pub worker_time_increment: f64,
    pub cum_worker_time: f64,
    /// `ℓ(aₖ, μ)` with the true means.
    pub proxy_loss: f64,
    pub cum_regret: f64,
    /// `f(xₖ) − f*` after this round's step, when an optimizer is attached.
    pub suboptimality: Option<f64>,
    /// The allocation played; for greedy rounds, completed tasks per worker.
    pub allocation: AllocationVector,
}

/// Runs `rounds` bandit-only rounds on top of `state`: allocate, observe,
/// update. Times come from the warm-start streams so they never coincide
/// with an experiment's own rounds.
pub fn warm_start(
    state: &AllocatorState,
    fleet: &FleetSpec,
    allocator: &Allocator,
    rounds: u64,
    seed: u64,
) -> AllocatorState {
    let mut state = state.clone();
    if allocator.policy().is_greedy() {
        return state;
    }
    for _ in 0..rounds {
        let k = state.round();
        let mut policy_rng = stream(seed, Domain::Policy, u64::MAX, k);
        let a = allocator.choose(&state, &mut policy_rng);
        let out = run_static_round(&a, fleet, &RoundStreams::warm_start(seed, k));
        state.update(&a, &out.observed);
    }
    state
}

/// When an experiment stops.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StopRule {
    pub max_rounds: u64,
    /// Stop after the first round whose suboptimality is below this.
    pub threshold: Option<f64>,
}

/// One seeded replication: a stream of [`RoundRecord`]s.
pub struct Experiment {
    fleet: FleetSpec,
    budget: u32,
    allocator: Allocator,
    state: AllocatorState,
    regret: RegretTracker,
    optimizer: Option<Box<dyn RoundOptimizer + Send>>,
    seed: u64,
    stop: StopRule,
    round: u64,
    cum_runtime: f64,
    cum_worker_time: f64,
    finished: bool,
}

impl Experiment {
    pub fn new(
        fleet: FleetSpec,
        policy: Policy,
        budget: u32,
        seed: u64,
        stop: StopRule,
    ) -> Result<Self> {
        let allocator = Allocator::new(policy, &fleet, budget)?;
        let regret = RegretTracker::new(&fleet, budget);
        let state = AllocatorState::new(fleet.len());
        Ok(Experiment {
            fleet,
            budget,
            allocator,
            state,
            regret,
            optimizer: None,
            seed,
            stop,
            round: 0,
            cum_runtime: 0.0,
            cum_worker_time: 0.0,
            finished: false,
        })
    }

    pub fn with_optimizer(mut self, optimizer: Box<dyn RoundOptimizer + Send>) -> Self {
        self.optimizer = Some(optimizer);
        self
    }

    /// Enriches the allocator state with `rounds` bandit-only rounds.
    pub fn with_warm_start(mut self, rounds: u64) -> Self {
        if rounds > 0 && self.allocator.policy().is_learning() {
            self.state = warm_start(&self.state, &self.fleet, &self.allocator, rounds, self.seed);
        }
        self
    }

    pub fn state(&self) -> &AllocatorState {
        &self.state
    }

    pub fn allocator(&self) -> &Allocator {
        &self.allocator
    }

    pub fn fleet(&self) -> &FleetSpec {
        &self.fleet
    }

    fn play_round(&mut self) -> RoundRecord {
        self.round += 1;
        let k = self.round;
        let streams = RoundStreams::new(self.seed, k);
        let (allocation, round_time, worker_time) = if self.allocator.policy().is_greedy() {
            let out = run_greedy_round(&self.fleet, self.budget, &streams);
            (out.completed, out.round_time, out.worker_time)
        } else {
            let mut policy_rng = stream(self.seed, Domain::Policy, 0, k);
            let a = self.allocator.choose(&self.state, &mut policy_rng);
            let out = run_static_round(&a, &self.fleet, &streams);
            if self.allocator.policy().is_learning() {
                self.state.update(&a, &out.observed);
            }
            (a, out.round_time, out.worker_time)
        };
        let proxy_loss = self.regret.record(&allocation);
        let suboptimality = self.optimizer.as_mut().map(|opt| opt.step(k, self.budget));
        self.cum_runtime += round_time;
        self.cum_worker_time += worker_time;
        RoundRecord {
            round: k,
            round_time,
            cum_runtime: self.cum_runtime,
            worker_time_increment: worker_time,
            cum_worker_time: self.cum_worker_time,
            proxy_loss,
            cum_regret: self.regret.cumulative(),
            suboptimality,
            allocation,
        }
    }
}

impl Iterator for Experiment {
    type Item = RoundRecord;

    fn next(&mut self) -> Option<RoundRecord> {
        if self.finished || self.round >= self.stop.max_rounds {
            return None;
        }
        let rec = self.play_round();
        if let (Some(t), Some(s)) = (self.stop.threshold, rec.suboptimality) {
            if s < t {
                self.finished = true;
            }
        }
        Some(rec)
    }
}
