mod common;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use splinefit::lbfgs::{two_loop_direction, LbfgsHistory};
use splinefit::{minimize, LbfgsConfig, LbfgsStatus};

use common::*;

#[test]
fn two_loop_matches_dense_product_form() {
    let mut rng = ChaCha8Rng::seed_from_u64(41);
    let dim = 12;
    let mut history = LbfgsHistory::new(5);
    let mut pairs = Vec::new();
    while pairs.len() < 5 {
        let s: Vec<f64> = (0..dim).map(|_| rng.gen_range(-1.0..1.0)).collect();
        let y: Vec<f64> = s.iter().map(|v| v * rng.gen_range(0.5..2.0)).collect();
        assert!(history.push(&s, &y));
        pairs.push((s, y));
    }
    let g: Vec<f64> = (0..dim).map(|_| rng.gen_range(-1.0..1.0)).collect();
    let want = dense_inverse_hessian(&pairs, dim) * nalgebra::DVector::from_column_slice(&g);
    let got = nalgebra::DVector::from_vec(two_loop_direction(&mut history, &g));
    assert!((&got - &want).norm() / want.norm() < 1e-10);
}

/// Iterations to minimize a random convex quadratic with history size `m`.
fn quadratic_iterations(seed: u64, m: usize) -> usize {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let dim = 50;
    let diag: Vec<f64> = (0..dim).map(|_| rng.gen_range(1.0..100.0)).collect();
    let x0: Vec<f64> = (0..dim).map(|_| rng.gen_range(-1.0..1.0)).collect();
    let mut f = |x: &[f64], g: &mut [f64]| {
        let mut v = 0.0;
        for i in 0..x.len() {
            g[i] = diag[i] * x[i];
            v += 0.5 * diag[i] * x[i] * x[i];
        }
        v
    };
    let config = LbfgsConfig {
        m,
        max_iterations: 10_000,
        ..LbfgsConfig::default()
    };
    let r = minimize(&mut f, &x0, &config).unwrap();
    assert_eq!(r.status, LbfgsStatus::Converged);
    assert!(r.grad_inf_norm() < 1e-8);
    r.iterations.len()
}

#[test]
fn longer_history_needs_no_more_iterations() {
    let mut short: Vec<usize> = (0..10).map(|s| quadratic_iterations(s, 1)).collect();
    let mut long: Vec<usize> = (0..10).map(|s| quadratic_iterations(s, 20)).collect();
    short.sort_unstable();
    long.sort_unstable();
    assert!(long[5] <= short[5], "m=20 median {} vs m=1 median {}", long[5], short[5]);
}

#[test]
fn rosenbrock_from_standard_start() {
    let mut f = |x: &[f64], g: &mut [f64]| {
        let a = x[1] - x[0] * x[0];
        let b = 1.0 - x[0];
        g[0] = -400.0 * a * x[0] - 2.0 * b;
        g[1] = 200.0 * a;
        100.0 * a * a + b * b
    };
    let r = minimize(&mut f, &[-1.2, 1.0], &LbfgsConfig::default()).unwrap();
    assert_eq!(r.status, LbfgsStatus::Converged);
    assert!((r.x[0] - 1.0).abs() < 1e-6 && (r.x[1] - 1.0).abs() < 1e-6);
}
