use rand::Rng;
use taskalloc::optimizer::{
    GradientOracle, OptimizerConfig, QuadraticProblem, QuadraticSgd, RoundOptimizer,
};
use taskalloc::rng::{stream, Domain};

/// Dense reference: f(x) = ½xᵀAx − bᵀx with A = ¼·tridiag(−1, 2, −1), b = −¼e₁.
fn dense_value(x: &[f64]) -> f64 {
    let d = x.len();
    let mut quad = 0.0;
    for i in 0..d {
        let mut ax = 0.5 * x[i];
        if i > 0 {
            ax -= 0.25 * x[i - 1];
        }
        if i + 1 < d {
            ax -= 0.25 * x[i + 1];
        }
        quad += x[i] * ax;
    }
    0.5 * quad + 0.25 * x[0]
}

#[test]
fn gradient_matches_central_differences() {
    let p = QuadraticProblem::new(40);
    let mut rng = stream(1, Domain::Auxiliary, 0, 0);
    for _ in 0..100 {
        let x: Vec<f64> = (0..40).map(|_| rng.random_range(-2.0..2.0)).collect();
        let dir: Vec<f64> = (0..40).map(|_| rng.random_range(-1.0..1.0)).collect();
        let h = 1e-4;
        let plus: Vec<f64> = x.iter().zip(&dir).map(|(a, b)| a + h * b).collect();
        let minus: Vec<f64> = x.iter().zip(&dir).map(|(a, b)| a - h * b).collect();
        let fd = (dense_value(&plus) - dense_value(&minus)) / (2.0 * h);
        let g = p.grad(&x);
        let analytic: f64 = g.iter().zip(&dir).map(|(a, b)| a * b).sum();
        assert!(
            (fd - analytic).abs() <= 1e-6 * analytic.abs().max(1e-3),
            "{fd} vs {analytic}"
        );
        assert!((p.value(&x) - dense_value(&x)).abs() < 1e-12 * dense_value(&x).abs().max(1.0));
    }
}

#[test]
fn minimum_matches_closed_form() {
    for d in [1usize, 2, 7, 100, 330] {
        let p = QuadraticProblem::new(d);
        let expected = -(d as f64) / (8.0 * (d + 1) as f64);
        assert!((p.f_star() - expected).abs() <= 1e-12 * expected.abs());
        assert!((p.value(p.minimizer()) - p.f_star()).abs() <= 1e-12 * expected.abs());
        assert!(p.suboptimality(&vec![0.0; d]) > 0.0);
    }
}

#[test]
fn noise_variance_is_sigma_squared() {
    let p = QuadraticProblem::new(50);
    let oracle = GradientOracle { sigma: 0.01 };
    let x: Vec<f64> = (0..50).map(|i| (i as f64).sin()).collect();
    let exact = p.grad(&x);
    let mut rng = stream(2, Domain::GradientNoise, 0, 0);
    let n = 100_000;
    let (mut s, mut sq) = (0.0, 0.0);
    for _ in 0..n {
        let g = oracle.noisy_grad(&p, &x, &mut rng);
        let dev: f64 = g.iter().zip(&exact).map(|(a, b)| (a - b).powi(2)).sum();
        s += dev;
        sq += dev * dev;
    }
    let mean = s / n as f64;
    let se = ((sq / n as f64 - mean * mean) / n as f64).sqrt();
    assert!((mean - 1e-4).abs() <= 3.0 * se, "{mean} vs 1e-4 (se {se})");
}

#[test]
fn minibatch_noise_variance_scales_with_batch() {
    let p = QuadraticProblem::new(20);
    let oracle = GradientOracle { sigma: 0.1 };
    let x = vec![0.3; 20];
    let exact = p.grad(&x);
    let mut rng = stream(4, Domain::GradientNoise, 0, 0);
    let n = 50_000;
    let (mut s, mut sq) = (0.0, 0.0);
    for _ in 0..n {
        let g = oracle.minibatch_grad(&p, &x, 23, &mut rng);
        let dev: f64 = g.iter().zip(&exact).map(|(a, b)| (a - b).powi(2)).sum();
        s += dev;
        sq += dev * dev;
    }
    let mean = s / n as f64;
    let se = ((sq / n as f64 - mean * mean) / n as f64).sqrt();
    assert!((mean - 0.01 / 23.0).abs() <= 3.0 * se, "{mean}");
}

#[test]
fn sgd_reaches_threshold() {
    let cfg = OptimizerConfig {
        d: 30,
        ..OptimizerConfig::default()
    };
    let mut sgd = QuadraticSgd::new(&cfg, 1);
    let hit = (1..=20_000u64).find(|&k| sgd.step(k, 23) < 1e-5);
    assert!(hit.is_some(), "final suboptimality {}", sgd.suboptimality());
}
