//! The joint fitting objective over control points and location parameters.
//!
//! ```text
//! f(P, T) = 1/2 * sum_k |P(t_k) - X_k|^2
//!         + alpha * integral |P'(t)|^2 dt + beta * integral |P''(t)|^2 dt
//! ```
//!
//! The fairing integrals are quadratic forms in the control points and are
//! precomputed once as Gram matrices of basis-function derivatives.

use std::collections::BTreeMap;

use crate::error::{Error, Result};
use crate::geometry::{BSplineBasis, BSplineCurve};
use crate::point::Point2;

/// Uniform scale plus translation taking raw coordinates into the unit box.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct UnitBoxTransform {
    pub scale: f64,
    pub offset: Point2,
}

impl UnitBoxTransform {
    pub fn identity() -> Self {
        UnitBoxTransform {
            scale: 1.0,
            offset: Point2::ZERO,
        }
    }

    #[inline]
    pub fn apply(&self, p: Point2) -> Point2 {
        p * self.scale + self.offset
    }

    #[inline]
    pub fn invert(&self, q: Point2) -> Point2 {
        (q - self.offset) * (1.0 / self.scale)
    }

    /// Maps a unit-box curve back to raw coordinates. Exact, since B-splines
    /// are affine invariant.
    pub fn invert_curve(&self, curve: &BSplineCurve) -> Result<BSplineCurve> {
        let pts = curve.control_points().iter().map(|&p| self.invert(p)).collect();
        curve.with_control_points(pts)
    }
}

/// Scales points into `[0,1]^2` preserving aspect ratio: the longer side of
/// the bounding box maps onto `[0,1]` and the shorter one is centered.
pub fn normalize_points(raw: &[Point2]) -> Result<(Vec<Point2>, UnitBoxTransform)> {
    if raw.is_empty() {
        return Err(Error::DegenerateData("no points"));
    }
    if raw.iter().any(|p| !p.is_finite()) {
        return Err(Error::NonFinite("data points"));
    }
    let (mut lo, mut hi) = (raw[0], raw[0]);
    for p in raw {
        lo = Point2::new(lo.x.min(p.x), lo.y.min(p.y));
        hi = Point2::new(hi.x.max(p.x), hi.y.max(p.y));
    }
    let (w, h) = (hi.x - lo.x, hi.y - lo.y);
    let side = w.max(h);
    if side <= 0.0 {
        return Err(Error::DegenerateData("all points identical"));
    }
    let scale = 1.0 / side;
    let offset = Point2::new(
        0.5 * (1.0 - w * scale) - lo.x * scale,
        0.5 * (1.0 - h * scale) - lo.y * scale,
    );
    let tf = UnitBoxTransform { scale, offset };
    Ok((raw.iter().map(|&p| tf.apply(p)).collect(), tf))
}

/// Symmetric sparse `n x n` matrix stored by rows.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct SparseSymmetric {
    n: usize,
    rows: Vec<Vec<(usize, f64)>>,
}

impl SparseSymmetric {
    fn from_map(n: usize, map: BTreeMap<(usize, usize), f64>) -> Self {
        let mut rows = vec![Vec::new(); n];
        for ((i, j), v) in map {
            rows[i].push((j, v));
        }
        SparseSymmetric { n, rows }
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.rows[i]
            .iter()
            .find(|&&(c, _)| c == j)
            .map_or(0.0, |&(_, v)| v)
    }

    pub fn row(&self, i: usize) -> &[(usize, f64)] {
        &self.rows[i]
    }

    pub fn to_dense(&self) -> Vec<Vec<f64>> {
        let mut m = vec![vec![0.0; self.n]; self.n];
        for (i, row) in self.rows.iter().enumerate() {
            for &(j, v) in row {
                m[i][j] = v;
            }
        }
        m
    }

    /// `sum_ij G_ij P_i . P_j` over interleaved coordinates.
    pub fn quadratic_form(&self, coords: &[f64]) -> f64 {
        let mut acc = 0.0;
        for (i, row) in self.rows.iter().enumerate() {
            let (xi, yi) = (coords[2 * i], coords[2 * i + 1]);
            for &(j, v) in row {
                acc += v * (xi * coords[2 * j] + yi * coords[2 * j + 1]);
            }
        }
        acc
    }

    /// `out_i += scale * sum_j G_ij P_j` over interleaved coordinates.
    pub fn apply_add(&self, coords: &[f64], scale: f64, out: &mut [f64]) {
        for (i, row) in self.rows.iter().enumerate() {
            let (mut sx, mut sy) = (0.0, 0.0);
            for &(j, v) in row {
                sx += v * coords[2 * j];
                sy += v * coords[2 * j + 1];
            }
            out[2 * i] += scale * sx;
            out[2 * i + 1] += scale * sy;
        }
    }
}

/// Gram matrices of first and second basis derivatives over `[0, 1]`.
#[derive(Debug, Clone, PartialEq)]
pub struct FairingGrams {
    pub gram_d1: SparseSymmetric,
    pub gram_d2: SparseSymmetric,
}

/// Gauss–Legendre nodes and weights on `[-1, 1]`.
pub(crate) fn gauss_legendre(count: usize) -> Vec<(f64, f64)> {
    let n = count;
    let mut out = Vec::with_capacity(n);
    for i in 0..n {
        let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 1.0;
        for _ in 0..100 {
            let (mut p0, mut p1) = (1.0, x);
            for k in 2..=n {
                let pk = ((2 * k - 1) as f64 * x * p1 - (k - 1) as f64 * p0) / k as f64;
                p0 = p1;
                p1 = pk;
            }
            let pn = if n == 0 { 1.0 } else { p1 };
            let pn1 = if n == 1 { 1.0 } else { p0 };
            dp = n as f64 * (x * pn - pn1) / (x * x - 1.0);
            let dx = pn / dp;
            x -= dx;
            if dx.abs() < 1e-16 {
                break;
            }
        }
        out.push((x, 2.0 / ((1.0 - x * x) * dp * dp)));
    }
    out
}

/// Exact fairing Gram matrices by per-span Gauss–Legendre quadrature.
///
/// The second-derivative Gram is all zeros for degree-1 curves.
pub fn build_fairing_grams(basis: &BSplineBasis) -> FairingGrams {
    let p = basis.degree();
    let n = basis.len();
    let nodes = gauss_legendre((2 * p - 1).div_ceil(2) + 1);
    let knots = basis.knots();
    let (first, last) = basis.span_range();
    let mut g1: BTreeMap<(usize, usize), f64> = BTreeMap::new();
    let mut g2: BTreeMap<(usize, usize), f64> = BTreeMap::new();
    for span in first..=last {
        let (a, b) = (knots[span], knots[span + 1]);
        let half = 0.5 * (b - a);
        if half <= 0.0 {
            continue;
        }
        for &(xi, w) in &nodes {
            let t = a + half * (xi + 1.0);
            let se = basis.evaluate_span(t, 2);
            debug_assert_eq!(se.span, span);
            for r in 0..=p {
                let ci = basis.control_index(span, r);
                for c in 0..=p {
                    let cj = basis.control_index(span, c);
                    *g1.entry((ci, cj)).or_insert(0.0) += w * half * se.basis_d1[r] * se.basis_d1[c];
                    if p >= 2 {
                        *g2.entry((ci, cj)).or_insert(0.0) +=
                            w * half * se.basis_d2[r] * se.basis_d2[c];
                    }
                }
            }
        }
    }
    FairingGrams {
        gram_d1: SparseSymmetric::from_map(n, g1),
        gram_d2: SparseSymmetric::from_map(n, g2),
    }
}

/// Curve topology: control-point count, degree and closedness.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Topology {
    pub n_ctrl: usize,
    pub degree: usize,
    pub closed: bool,
}

impl Topology {
    pub fn basis(&self) -> Result<BSplineBasis> {
        BSplineBasis::uniform(self.n_ctrl, self.degree, self.closed)
    }
}

/// Data points plus fairing weights and the topology of the fitting curve.
///
/// Points are expected in unit-box coordinates (see [`normalize_points`]);
/// this is not enforced.
#[derive(Debug, Clone)]
pub struct FitProblem {
    points: Vec<Point2>,
    alpha: f64,
    beta: f64,
    basis: BSplineBasis,
    grams: FairingGrams,
}

impl FitProblem {
    pub fn new(points: Vec<Point2>, topology: Topology, alpha: f64, beta: f64) -> Result<Self> {
        if points.is_empty() {
            return Err(Error::DegenerateData("no data points"));
        }
        if points.iter().any(|p| !p.is_finite()) {
            return Err(Error::NonFinite("data points"));
        }
        if !(alpha >= 0.0 && alpha.is_finite() && beta >= 0.0 && beta.is_finite()) {
            return Err(Error::InvalidConfig(format!(
                "fairing weights must be finite and >= 0 (alpha={alpha}, beta={beta})"
            )));
        }
        let basis = topology.basis()?;
        if beta > 0.0 && basis.degree() < 2 {
            return Err(Error::DegreeTooLow {
                needed: 2,
                degree: basis.degree(),
            });
        }
        let grams = build_fairing_grams(&basis);
        Ok(FitProblem {
            points,
            alpha,
            beta,
            basis,
            grams,
        })
    }

    pub fn points(&self) -> &[Point2] {
        &self.points
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn beta(&self) -> f64 {
        self.beta
    }

    pub fn basis(&self) -> &BSplineBasis {
        &self.basis
    }

    pub fn grams(&self) -> &FairingGrams {
        &self.grams
    }

    pub fn n_ctrl(&self) -> usize {
        self.basis.len()
    }

    pub fn topology(&self) -> Topology {
        Topology {
            n_ctrl: self.basis.len(),
            degree: self.basis.degree(),
            closed: self.basis.is_closed(),
        }
    }

    /// Number of joint variables, `2n + N`.
    pub fn dim(&self) -> usize {
        2 * self.n_ctrl() + self.len()
    }

    /// Fairing energy of the given interleaved control coordinates.
    pub fn fairing_value(&self, coords: &[f64]) -> f64 {
        let mut v = 0.0;
        if self.alpha > 0.0 {
            v += self.alpha * self.grams.gram_d1.quadratic_form(coords);
        }
        if self.beta > 0.0 {
            v += self.beta * self.grams.gram_d2.quadratic_form(coords);
        }
        v
    }

    /// Adds the fairing gradient to `out` (interleaved coordinates).
    pub fn fairing_gradient_add(&self, coords: &[f64], out: &mut [f64]) {
        if self.alpha > 0.0 {
            self.grams.gram_d1.apply_add(coords, 2.0 * self.alpha, out);
        }
        if self.beta > 0.0 {
            self.grams.gram_d2.apply_add(coords, 2.0 * self.beta, out);
        }
    }

    fn check(&self, state: &JointState) -> Result<()> {
        if state.n_ctrl != self.n_ctrl() || state.values.len() != self.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                got: state.values.len(),
            });
        }
        Ok(())
    }
}

/// Flat variable vector `[P1.x, P1.y, ..., Pn.x, Pn.y, t1, ..., tN]`.
#[derive(Debug, Clone, PartialEq)]
pub struct JointState {
    n_ctrl: usize,
    values: Vec<f64>,
}

impl JointState {
    pub fn new(control_points: &[Point2], params: &[f64]) -> Self {
        let mut values = Vec::with_capacity(2 * control_points.len() + params.len());
        values.extend(control_points.iter().flat_map(|p| [p.x, p.y]));
        values.extend_from_slice(params);
        JointState {
            n_ctrl: control_points.len(),
            values,
        }
    }

    pub fn from_vec(n_ctrl: usize, values: Vec<f64>) -> Result<Self> {
        if values.len() < 2 * n_ctrl {
            return Err(Error::DimensionMismatch {
                expected: 2 * n_ctrl,
                got: values.len(),
            });
        }
        Ok(JointState { n_ctrl, values })
    }

    pub fn n_ctrl(&self) -> usize {
        self.n_ctrl
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.values
    }

    pub fn as_mut_slice(&mut self) -> &mut [f64] {
        &mut self.values
    }

    pub fn into_vec(self) -> Vec<f64> {
        self.values
    }

    pub fn control_coords(&self) -> &[f64] {
        &self.values[..2 * self.n_ctrl]
    }

    pub fn control_points(&self) -> Vec<Point2> {
        self.control_coords()
            .chunks_exact(2)
            .map(|c| Point2::new(c[0], c[1]))
            .collect()
    }

    pub fn params(&self) -> &[f64] {
        &self.values[2 * self.n_ctrl..]
    }

    pub fn params_mut(&mut self) -> &mut [f64] {
        let k = 2 * self.n_ctrl;
        &mut self.values[k..]
    }
}

/// Value and (optionally) gradient of the joint objective over a raw
/// variable slice. Returns `(f, sum_k |r_k|^2)`.
///
/// For open curves the curve is evaluated at the clamped parameter, so the
/// objective is flat outside `[0, 1]`. There the parameter gradient keeps
/// the one-sided derivative at the end when it points back inside, and is
/// zero otherwise, so a parameter cannot stall on the flat part.
pub(crate) fn evaluate_joint(
    problem: &FitProblem,
    vars: &[f64],
    mut grad: Option<&mut [f64]>,
) -> (f64, f64) {
    let basis = &problem.basis;
    let n = basis.len();
    let order = basis.degree() + 1;
    let closed = basis.is_closed();
    let (coords, params) = vars.split_at(2 * n);
    if let Some(g) = grad.as_deref_mut() {
        g.fill(0.0);
    }
    let want_grad = grad.is_some();
    let mut data_sum = 0.0;
    for (k, (&x, &t)) in problem.points.iter().zip(params).enumerate() {
        let se = basis.evaluate_span(t, usize::from(want_grad));
        let mut p = Point2::ZERO;
        let mut dp = Point2::ZERO;
        for j in 0..order {
            let c = basis.control_index(se.span, j);
            let cp = Point2::new(coords[2 * c], coords[2 * c + 1]);
            p += cp * se.basis[j];
            dp += cp * se.basis_d1[j];
        }
        let r = p - x;
        data_sum += r.norm_squared();
        if let Some(g) = grad.as_deref_mut() {
            for j in 0..order {
                let c = basis.control_index(se.span, j);
                g[2 * c] += se.basis[j] * r.x;
                g[2 * c + 1] += se.basis[j] * r.y;
            }
            let mut gt = r.dot(dp);
            if !closed && ((t <= 0.0 && gt > 0.0) || (t >= 1.0 && gt < 0.0)) {
                gt = 0.0;
            }
            g[2 * n + k] = gt;
        }
    }
    let fairing = problem.fairing_value(coords);
    if let Some(g) = grad {
        problem.fairing_gradient_add(coords, &mut g[..2 * n]);
    }
    (0.5 * data_sum + fairing, data_sum)
}

/// Joint objective value `f`.
pub fn objective_value(problem: &FitProblem, state: &JointState) -> Result<f64> {
    problem.check(state)?;
    let (f, _) = evaluate_joint(problem, state.as_slice(), None);
    if !f.is_finite() {
        return Err(Error::NonFinite("objective value"));
    }
    Ok(f)
}

/// Exact gradient of the joint objective, length `2n + N`.
pub fn objective_gradient(problem: &FitProblem, state: &JointState) -> Result<Vec<f64>> {
    problem.check(state)?;
    let mut g = vec![0.0; problem.dim()];
    let (f, _) = evaluate_joint(problem, state.as_slice(), Some(&mut g));
    if !f.is_finite() || g.iter().any(|v| !v.is_finite()) {
        return Err(Error::NonFinite("objective gradient"));
    }
    Ok(g)
}

/// Root-mean-square residual `sqrt(1/N * sum_k |P(t_k) - X_k|^2)`.
/// Excludes the fairing term.
pub fn fitting_error(problem: &FitProblem, state: &JointState) -> Result<f64> {
    problem.check(state)?;
    let (_, data_sum) = evaluate_joint(problem, state.as_slice(), None);
    Ok(rms(data_sum, problem.len()))
}

#[inline]
pub(crate) fn rms(sum_sq: f64, count: usize) -> f64 {
    (sum_sq / count as f64).sqrt()
}

/// RMS residual of `curve` against the data at the given parameters.
pub fn fitting_error_at(curve: &BSplineCurve, points: &[Point2], params: &[f64]) -> f64 {
    let s: f64 = points
        .iter()
        .zip(params)
        .map(|(&x, &t)| (curve.evaluate(t) - x).norm_squared())
        .sum();
    rms(s, points.len())
}
