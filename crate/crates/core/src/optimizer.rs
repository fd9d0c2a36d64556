//! Convex quadratic test problem and minibatch SGD.
//!
//! `f(x) = ½xᵀAx − bᵀx` with `A = ¼·tridiag(−1, 2, −1)` and `b = −¼e₁`.
//! `A` is never materialized; products and the solve for `x* = A⁻¹b` are
//! O(d).

use rand::Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::rng::{stream, Domain};

const DIAG: f64 = 0.5;
const OFF: f64 = -0.25;
const B_FIRST: f64 = -0.25;

#[derive(Debug, Clone)]
pub struct QuadraticProblem {
    d: usize,
    x_star: Vec<f64>,
    f_star: f64,
}

/// Thomas algorithm for a constant-coefficient tridiagonal system.
fn solve_tridiagonal(diag: f64, off: f64, rhs: &[f64]) -> Vec<f64> {
    let d = rhs.len();
    let mut c = vec![0.0; d];
    let mut y = vec![0.0; d];
    c[0] = off / diag;
    y[0] = rhs[0] / diag;
    for i in 1..d {
        let denom = diag - off * c[i - 1];
        c[i] = off / denom;
        y[i] = (rhs[i] - off * y[i - 1]) / denom;
    }
    let mut x = vec![0.0; d];
    x[d - 1] = y[d - 1];
    for i in (0..d - 1).rev() {
        x[i] = y[i] - c[i] * x[i + 1];
    }
    x
}

impl QuadraticProblem {
    pub fn new(d: usize) -> Self {
        assert!(d >= 1, "dimension must be positive");
        let mut b = vec![0.0; d];
        b[0] = B_FIRST;
        let x_star = solve_tridiagonal(DIAG, OFF, &b);
        let f_star = -0.5 * B_FIRST * x_star[0];
        QuadraticProblem { d, x_star, f_star }
    }

    pub fn dim(&self) -> usize {
        self.d
    }

    pub fn minimizer(&self) -> &[f64] {
        &self.x_star
    }

    pub fn f_star(&self) -> f64 {
        self.f_star
    }

    /// `λ_max(A) = ¼(2 − 2cos(dπ/(d+1)))`.
    pub fn lambda_max(&self) -> f64 {
        let d = self.d as f64;
        0.25 * (2.0 - 2.0 * (d * std::f64::consts::PI / (d + 1.0)).cos())
    }

    /// `λ_min(A) = ¼(2 − 2cos(π/(d+1)))`.
    pub fn lambda_min(&self) -> f64 {
        let d = self.d as f64;
        0.25 * (2.0 - 2.0 * (std::f64::consts::PI / (d + 1.0)).cos())
    }

    fn check_dim(&self, x: &[f64]) {
        assert_eq!(x.len(), self.d, "expected a vector of dimension {}", self.d);
    }

    pub fn apply_a(&self, x: &[f64]) -> Vec<f64> {
        self.check_dim(x);
        let d = self.d;
        (0..d)
            .map(|i| {
                let mut v = DIAG * x[i];
                if i > 0 {
                    v += OFF * x[i - 1];
                }
                if i + 1 < d {
                    v += OFF * x[i + 1];
                }
                v
            })
            .collect()
    }

    pub fn value(&self, x: &[f64]) -> f64 {
        let ax = self.apply_a(x);
        let quad: f64 = x.iter().zip(&ax).map(|(a, b)| a * b).sum();
        0.5 * quad - B_FIRST * x[0]
    }

    /// `∇f(x) = Ax − b`.
    pub fn grad(&self, x: &[f64]) -> Vec<f64> {
        let mut g = self.apply_a(x);
        g[0] -= B_FIRST;
        g
    }

    /// `f(x) − f*`, with round-off negatives clamped to zero.
    pub fn suboptimality(&self, x: &[f64]) -> f64 {
        (self.value(x) - self.f_star).max(0.0)
    }
}

/// Unbiased gradient oracle with isotropic Gaussian noise,
/// `E‖g(x) − ∇f(x)‖² = σ²`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GradientOracle {
    pub sigma: f64,
}

impl GradientOracle {
    pub fn noisy_grad<R: Rng + ?Sized>(
        &self,
        problem: &QuadraticProblem,
        x: &[f64],
        rng: &mut R,
    ) -> Vec<f64> {
        self.perturbed(
            problem.grad(x),
            self.sigma / (problem.dim() as f64).sqrt(),
            rng,
        )
    }

    /// Mean of `batch` independent noisy gradients at `x`, drawn in one pass:
    /// the averaged noise is `N(0, σ²/(d·batch))` per coordinate.
    pub fn minibatch_grad<R: Rng + ?Sized>(
        &self,
        problem: &QuadraticProblem,
        x: &[f64],
        batch: u32,
        rng: &mut R,
    ) -> Vec<f64> {
        assert!(batch >= 1);
        let sd = self.sigma / (problem.dim() as f64 * batch as f64).sqrt();
        self.perturbed(problem.grad(x), sd, rng)
    }

    fn perturbed<R: Rng + ?Sized>(&self, mut g: Vec<f64>, sd: f64, rng: &mut R) -> Vec<f64> {
        if sd > 0.0 {
            for v in &mut g {
                let z: f64 = StandardNormal.sample(rng);
                *v += sd * z;
            }
        }
        g
    }
}

/// `x − γ·mean(gradients)`. Panics unless exactly `budget` gradients are given.
pub fn sgd_step(x: &[f64], gradients: &[Vec<f64>], budget: u32, gamma: f64) -> Vec<f64> {
    assert_eq!(
        gradients.len(),
        budget as usize,
        "expected {budget} gradients, got {}",
        gradients.len()
    );
    let scale = gamma / gradients.len() as f64;
    let mut out = x.to_vec();
    for g in gradients {
        assert_eq!(g.len(), x.len(), "gradient dimension mismatch");
        for (o, gi) in out.iter_mut().zip(g) {
            *o -= scale * gi;
        }
    }
    out
}

/// Optimizer settings of an experiment.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OptimizerConfig {
    #[serde(default = "default_enabled")]
    pub enabled: bool,
    #[serde(default = "default_dim")]
    pub d: usize,
    /// Step size; `None` means `1/λ_max(A)`.
    #[serde(default)]
    pub gamma: Option<f64>,
    #[serde(default = "default_sigma")]
    pub sigma: f64,
    /// Draw each of the B gradients separately instead of sampling their
    /// average directly. Same distribution, B times the noise draws.
    #[serde(default)]
    pub per_gradient_noise: bool,
}

fn default_enabled() -> bool {
    true
}

fn default_dim() -> usize {
    100
}

fn default_sigma() -> f64 {
    0.01
}

impl Default for OptimizerConfig {
    fn default() -> Self {
        OptimizerConfig {
            enabled: true,
            d: default_dim(),
            gamma: None,
            sigma: default_sigma(),
            per_gradient_noise: false,
        }
    }
}

/// Something advanced once per round with the B collected gradients.
pub trait RoundOptimizer {
    /// Performs the update of round `round`; returns the new suboptimality.
    fn step(&mut self, round: u64, budget: u32) -> f64;

    fn suboptimality(&self) -> f64;
}

/// Minibatch SGD on [`QuadraticProblem`] from `x₀ = 0`. Gradient noise of
/// round `k` comes from its own stream, so it is shared by every policy run
/// with the same seed.
#[derive(Debug, Clone)]
pub struct QuadraticSgd {
    problem: QuadraticProblem,
    oracle: GradientOracle,
    gamma: f64,
    x: Vec<f64>,
    seed: u64,
    per_gradient_noise: bool,
}

impl QuadraticSgd {
    pub fn new(cfg: &OptimizerConfig, seed: u64) -> Self {
        let problem = QuadraticProblem::new(cfg.d);
        let gamma = cfg.gamma.unwrap_or_else(|| 1.0 / problem.lambda_max());
        QuadraticSgd {
            x: vec![0.0; cfg.d],
            problem,
            oracle: GradientOracle { sigma: cfg.sigma },
            gamma,
            seed,
            per_gradient_noise: cfg.per_gradient_noise,
        }
    }

    pub fn x(&self) -> &[f64] {
        &self.x
    }

    pub fn gamma(&self) -> f64 {
        self.gamma
    }

    pub fn problem(&self) -> &QuadraticProblem {
        &self.problem
    }
}

impl RoundOptimizer for QuadraticSgd {
    fn step(&mut self, round: u64, budget: u32) -> f64 {
        let mut rng = stream(self.seed, Domain::GradientNoise, 0, round);
        if self.per_gradient_noise {
            let grads: Vec<Vec<f64>> = (0..budget)
                .map(|_| self.oracle.noisy_grad(&self.problem, &self.x, &mut rng))
                .collect();
            self.x = sgd_step(&self.x, &grads, budget, self.gamma);
        } else {
            let g = self
                .oracle
                .minibatch_grad(&self.problem, &self.x, budget, &mut rng);
            for (xi, gi) in self.x.iter_mut().zip(&g) {
                *xi -= self.gamma * gi;
            }
        }
        self.problem.suboptimality(&self.x)
    }

    fn suboptimality(&self) -> f64 {
        self.problem.suboptimality(&self.x)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn gradient_vanishes_at_minimizer() {
        let p = QuadraticProblem::new(50);
        let g = p.grad(p.minimizer());
        assert!(g.iter().all(|v| v.abs() < 1e-12));
        assert_eq!(p.suboptimality(p.minimizer()), 0.0);
    }

    #[test]
    fn gradient_at_origin_is_minus_b() {
        let p = QuadraticProblem::new(5);
        assert_eq!(p.grad(&[0.0; 5]), vec![0.25, 0.0, 0.0, 0.0, 0.0]);
        assert_relative_eq!(p.suboptimality(&[0.0; 5]), -p.f_star());
        assert!(p.f_star() < 0.0);
    }

    #[test]
    fn closed_form_minimizer() {
        // T x = −e₁ for T = tridiag(−1,2,−1) has x_i = −(d+1−i)/(d+1)
        let d = 100;
        let p = QuadraticProblem::new(d);
        for (i, &x) in p.minimizer().iter().enumerate() {
            let expected = -((d - i) as f64) / (d + 1) as f64;
            assert_relative_eq!(x, expected, epsilon = 1e-12);
        }
        assert_relative_eq!(
            p.f_star(),
            -(d as f64) / (8.0 * (d + 1) as f64),
            max_relative = 1e-12
        );
        assert_relative_eq!(p.value(p.minimizer()), p.f_star(), max_relative = 1e-12);
    }

    #[test]
    fn extreme_eigenvalues_bracket_rayleigh_quotients() {
        let p = QuadraticProblem::new(20);
        let mut rng = stream(9, Domain::Auxiliary, 0, 0);
        for _ in 0..100 {
            let x: Vec<f64> = (0..20).map(|_| rng.random_range(-1.0..1.0)).collect();
            let ax = p.apply_a(&x);
            let q: f64 = x.iter().zip(&ax).map(|(a, b)| a * b).sum::<f64>()
                / x.iter().map(|v| v * v).sum::<f64>();
            assert!(q <= p.lambda_max() + 1e-12 && q >= p.lambda_min() - 1e-12);
        }
    }

    #[test]
    fn sgd_step_examples() {
        let x = vec![1.0, 2.0];
        assert_eq!(sgd_step(&x, &[vec![0.0, 0.0], vec![0.0, 0.0]], 2, 0.3), x);
        assert_eq!(sgd_step(&x, &[vec![0.5, -1.0]], 1, 1.0), vec![0.5, 3.0]);
    }

    #[test]
    #[should_panic(expected = "expected 3 gradients")]
    fn sgd_step_wrong_count() {
        sgd_step(&[0.0], &[vec![1.0]], 3, 1.0);
    }

    #[test]
    fn zero_noise_is_exact() {
        let p = QuadraticProblem::new(10);
        let o = GradientOracle { sigma: 0.0 };
        let x: Vec<f64> = (0..10).map(|i| i as f64 * 0.1).collect();
        let mut rng = stream(1, Domain::Auxiliary, 0, 0);
        assert_eq!(o.noisy_grad(&p, &x, &mut rng), p.grad(&x));
        assert_eq!(o.minibatch_grad(&p, &x, 7, &mut rng), p.grad(&x));
    }

    #[test]
    fn gradient_descent_is_monotone() {
        let cfg = OptimizerConfig {
            sigma: 0.0,
            d: 30,
            ..Default::default()
        };
        let mut sgd = QuadraticSgd::new(&cfg, 0);
        let mut prev = sgd.suboptimality();
        for k in 1..=2000 {
            let cur = sgd.step(k, 4);
            assert!(cur <= prev + 1e-15);
            prev = cur;
        }
        assert!(prev < 1e-5);
    }

    #[test]
    fn per_gradient_and_minibatch_noise_agree_in_scale() {
        // both modes with σ > 0 must still converge to the noise floor
        for per in [false, true] {
            let cfg = OptimizerConfig {
                d: 10,
                per_gradient_noise: per,
                ..Default::default()
            };
            let mut sgd = QuadraticSgd::new(&cfg, 4);
            let mut last = 1.0;
            for k in 1..=3000 {
                last = sgd.step(k, 23);
            }
            assert!(last < 1e-5, "per_gradient_noise={per}: {last}");
        }
    }
}
