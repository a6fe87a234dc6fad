//! Independent oracles shared by the integration and acceptance tests.
#![allow(dead_code)]

use nalgebra::{DMatrix, DVector};
use rand::Rng;
use splinefit::{BSplineCurve, Point2};

/// Uniform knots built from their definition: clamped for open curves,
/// evenly extended past `[0,1]` for closed ones.
pub fn uniform_knots(n: usize, p: usize, closed: bool) -> Vec<f64> {
    if closed {
        (0..=n + 2 * p).map(|i| (i as f64 - p as f64) / n as f64).collect()
    } else {
        let inner = n - p;
        let mut k = vec![0.0; p + 1];
        k.extend((1..inner).map(|i| i as f64 / inner as f64));
        k.extend(vec![1.0; p + 1]);
        k
    }
}

/// Textbook recursive Cox–de Boor definition. The last nonempty interval
/// is treated as closed on the right so that `t = 1` is covered.
pub fn naive_basis(knots: &[f64], i: usize, p: usize, t: f64) -> f64 {
    if p == 0 {
        let (a, b) = (knots[i], knots[i + 1]);
        let last = knots.iter().rposition(|&k| k < knots[knots.len() - 1]).unwrap_or(0);
        if (a <= t && t < b) || (t == b && i == last && a < b) {
            return 1.0;
        }
        return 0.0;
    }
    let mut v = 0.0;
    let d1 = knots[i + p] - knots[i];
    if d1 > 0.0 {
        v += (t - knots[i]) / d1 * naive_basis(knots, i, p - 1, t);
    }
    let d2 = knots[i + p + 1] - knots[i + 1];
    if d2 > 0.0 {
        v += (knots[i + p + 1] - t) / d2 * naive_basis(knots, i + 1, p - 1, t);
    }
    v
}

/// `sum_i P_(i mod n) N_i(t)` over every basis function of the knot vector.
pub fn naive_eval(ctrl: &[Point2], p: usize, closed: bool, t: f64) -> Point2 {
    let n = ctrl.len();
    let knots = uniform_knots(n, p, closed);
    let t = if closed { t.rem_euclid(1.0) } else { t.clamp(0.0, 1.0) };
    // for closed curves evaluate on the extended knots, where the last
    // right-closed interval is never hit for t < 1
    let count = knots.len() - p - 1;
    let mut acc = Point2::ZERO;
    for i in 0..count {
        let b = naive_basis(&knots, i, p, t);
        if b != 0.0 {
            acc += ctrl[i % n] * b;
        }
    }
    acc
}

pub fn random_points<R: Rng>(rng: &mut R, count: usize) -> Vec<Point2> {
    (0..count).map(|_| Point2::new(rng.gen(), rng.gen())).collect()
}

pub fn random_curve<R: Rng>(rng: &mut R, n: usize, p: usize, closed: bool) -> BSplineCurve {
    BSplineCurve::uniform(p, closed, random_points(rng, n)).unwrap()
}

/// Inverse Hessian approximation from the explicit product form
///
/// `H = (V_{k-1}'..V_{k-m}') H0 (V_{k-m}..V_{k-1})
///    + sum_j rho_j (V_{k-1}'..V_{j+1}') s_j s_j' (V_{j+1}..V_{k-1})`
///
/// with `V_j = I - rho_j y_j s_j'` and `H0 = gamma I`, `gamma` taken from
/// the newest pair. Pairs are ordered oldest first.
pub fn dense_inverse_hessian(pairs: &[(Vec<f64>, Vec<f64>)], dim: usize) -> DMatrix<f64> {
    let id = DMatrix::<f64>::identity(dim, dim);
    if pairs.is_empty() {
        return id;
    }
    let vecs: Vec<(DVector<f64>, DVector<f64>, f64)> = pairs
        .iter()
        .map(|(s, y)| {
            let s = DVector::from_column_slice(s);
            let y = DVector::from_column_slice(y);
            let rho = 1.0 / y.dot(&s);
            (s, y, rho)
        })
        .collect();
    let (s_new, y_new, _) = vecs.last().unwrap();
    let gamma = s_new.dot(y_new) / y_new.dot(y_new);
    let mut w = id.clone();
    let mut h = DMatrix::<f64>::zeros(dim, dim);
    for (s, y, rho) in vecs.iter().rev() {
        let u = w.transpose() * s;
        h += (&u * u.transpose()) * *rho;
        let v = &id - (y * s.transpose()) * *rho;
        w = v * w;
    }
    h + (w.transpose() * w) * gamma
}

/// Closest of `count` uniformly spaced parameter samples.
pub fn brute_force_closest(samples: &[Point2], x: Point2) -> (usize, f64) {
    let mut best = (0, f64::INFINITY);
    for (i, s) in samples.iter().enumerate() {
        let d = (*s - x).norm_squared();
        if d < best.1 {
            best = (i, d);
        }
    }
    (best.0, best.1.sqrt())
}

pub fn sample_params(count: usize, closed: bool) -> Vec<f64> {
    let denom = if closed { count } else { count - 1 } as f64;
    (0..count).map(|i| i as f64 / denom).collect()
}

pub fn points_on_ellipse(count: usize, center: Point2, a: f64, b: f64) -> Vec<Point2> {
    (0..count)
        .map(|k| {
            let th = std::f64::consts::TAU * k as f64 / count as f64;
            center + Point2::new(a * th.cos(), b * th.sin())
        })
        .collect()
}
