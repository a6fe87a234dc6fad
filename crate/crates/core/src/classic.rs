//! Alternating fitting methods: PDM, TDM with Levenberg–Marquardt shift
//! (TDMLM) and SDM.
//!
//! Each iteration updates control points by minimizing a quadratic model
//! `Q(P) = 1/2 P'AP - b'P + c` built at fixed location parameters, then
//! re-projects the data onto the new curve. Every per-point error term has
//! the form `1/2 * w * ((P(t_k) - X_k) . u)^2` for unit directions `u`:
//!
//! * PDM: `u = x, y` with `w = 1` (the plain squared residual);
//! * TDM: `u = N_k`, `w = 1`;
//! * SDM: `u = N_k`, `w = 1`, plus `u = T_k` with `w = d / (d - rho)` when
//!   the point lies on the convex side (`d < 0`).
//!
//! Matrices are stored over interleaved coordinates `[x0, y0, x1, y1, ...]`
//! with a banded (open) or cyclic-banded (closed) envelope.

use std::time::Instant;

use crate::error::{Error, Result};
use crate::footpoint::{self, frame_at, project_all, refine_all, should_reinitialize};
use crate::geometry::{BSplineBasis, BSplineCurve, SpanEvaluation};
use crate::linalg::SkylineMatrix;
use crate::objective::{evaluate_joint, FitProblem, JointState};
use crate::point::Point2;
use crate::trace::{FitTrace, Method, PhaseTimings, TraceRecord};
use crate::lbfgs::inf_norm;

/// Relative ridge keeping PDM/SDM systems factorizable when some control
/// directions are unconstrained by the data.
const RIDGE: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct AssemblyStats {
    /// Points whose tangent vanished and fell back to the PDM term.
    pub pd_fallbacks: usize,
    /// SDM points beyond the curvature center whose tangential weight was
    /// clamped to 1.
    pub clamped_tangential: usize,
}

/// `Q(P) = 1/2 P'AP - b'P + c` over interleaved control coordinates.
#[derive(Debug, Clone)]
pub struct QuadraticModel {
    pub matrix: SkylineMatrix,
    pub rhs: Vec<f64>,
    pub constant: f64,
    pub stats: AssemblyStats,
}

impl QuadraticModel {
    fn empty(problem: &FitProblem) -> Self {
        let basis = problem.basis();
        let mut matrix = SkylineMatrix::zeros(envelope(basis));
        let (a2, b2) = (2.0 * problem.alpha(), 2.0 * problem.beta());
        let grams = problem.grams();
        for i in 0..basis.len() {
            for (gram, weight) in [(&grams.gram_d1, a2), (&grams.gram_d2, b2)] {
                if weight == 0.0 {
                    continue;
                }
                for &(j, v) in gram.row(i) {
                    if j <= i {
                        matrix.add(2 * i, 2 * j, weight * v);
                        matrix.add(2 * i + 1, 2 * j + 1, weight * v);
                    }
                }
            }
        }
        QuadraticModel {
            matrix,
            rhs: vec![0.0; 2 * basis.len()],
            constant: 0.0,
            stats: AssemblyStats::default(),
        }
    }

    /// Number of control points.
    pub fn n_ctrl(&self) -> usize {
        self.rhs.len() / 2
    }

    pub fn value(&self, coords: &[f64]) -> f64 {
        let ax = self.matrix.mul_vec(coords);
        0.5 * dot(coords, &ax) - dot(&self.rhs, coords) + self.constant
    }

    /// `A P - b`.
    pub fn gradient(&self, coords: &[f64]) -> Vec<f64> {
        let mut g = self.matrix.mul_vec(coords);
        g.iter_mut().zip(&self.rhs).for_each(|(gi, bi)| *gi -= bi);
        g
    }

    /// Adds `1/2 * w * (sum_j N_j (u . P_j) - target)^2`.
    fn add_term(&mut self, basis: &BSplineBasis, se: &SpanEvaluation, u: Point2, w: f64, target: f64) {
        let order = se.order();
        let mut idx = [0usize; 16];
        let mut coef = [0.0f64; 16];
        let mut len = 0;
        for j in 0..order {
            let c = basis.control_index(se.span, j);
            for (off, comp) in [(0, u.x), (1, u.y)] {
                let v = se.basis[j] * comp;
                if v != 0.0 {
                    idx[len] = 2 * c + off;
                    coef[len] = v;
                    len += 1;
                }
            }
        }
        for a in 0..len {
            for b in 0..=a {
                self.matrix.add(idx[a], idx[b], w * coef[a] * coef[b]);
            }
            self.rhs[idx[a]] += w * target * coef[a];
        }
        self.constant += 0.5 * w * target * target;
    }
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// First stored column of each interleaved row: control points interact
/// when their cyclic (closed) or plain (open) index distance is at most `p`.
fn envelope(basis: &BSplineBasis) -> Vec<usize> {
    let n = basis.len() as isize;
    let p = basis.degree() as isize;
    let mut first = Vec::with_capacity(2 * n as usize);
    for i in 0..n {
        let lowest = (-p..=p)
            .filter_map(|k| {
                let j = i + k;
                if basis.is_closed() {
                    Some(j.rem_euclid(n))
                } else if (0..n).contains(&j) {
                    Some(j)
                } else {
                    None
                }
            })
            .filter(|&j| j <= i)
            .min()
            .unwrap_or(i) as usize;
        first.push(2 * lowest);
        first.push(2 * lowest);
    }
    first
}

fn check_inputs(problem: &FitProblem, curve: &BSplineCurve, params: &[f64]) -> Result<()> {
    if curve.basis() != problem.basis() {
        return Err(Error::InvalidConfig("curve topology does not match the problem".into()));
    }
    if params.len() != problem.len() {
        return Err(Error::DimensionMismatch {
            expected: problem.len(),
            got: params.len(),
        });
    }
    Ok(())
}

const X_AXIS: Point2 = Point2::new(1.0, 0.0);
const Y_AXIS: Point2 = Point2::new(0.0, 1.0);

/// Point-distance model: `e_k = |P(t_k) - X_k|^2`.
pub fn assemble_pdm(problem: &FitProblem, curve: &BSplineCurve, params: &[f64]) -> Result<QuadraticModel> {
    check_inputs(problem, curve, params)?;
    let basis = problem.basis();
    let mut model = QuadraticModel::empty(problem);
    for (&x, &t) in problem.points().iter().zip(params) {
        let se = basis.evaluate_span(t, 0);
        model.add_term(basis, &se, X_AXIS, 1.0, x.x);
        model.add_term(basis, &se, Y_AXIS, 1.0, x.y);
    }
    Ok(model)
}

/// Tangent-distance model: `e_k = ((P(t_k) - X_k) . N_k)^2`.
pub fn assemble_tdm(problem: &FitProblem, curve: &BSplineCurve, params: &[f64]) -> Result<QuadraticModel> {
    check_inputs(problem, curve, params)?;
    let basis = problem.basis();
    let mut model = QuadraticModel::empty(problem);
    for (&x, &t) in problem.points().iter().zip(params) {
        let se = basis.evaluate_span(t, 1);
        let (_, d1) = curve.evaluate_d1(t);
        let speed = d1.norm();
        if speed < 1e-14 {
            model.stats.pd_fallbacks += 1;
            model.add_term(basis, &se, X_AXIS, 1.0, x.x);
            model.add_term(basis, &se, Y_AXIS, 1.0, x.y);
            continue;
        }
        let normal = (d1 * (1.0 / speed)).perp();
        model.add_term(basis, &se, normal, 1.0, x.dot(normal));
    }
    Ok(model)
}

/// Tangential weight of the squared-distance term for signed distance `d`
/// (positive toward the curvature center) and curvature radius `rho`.
pub fn sdm_tangential_weight(d: f64, rho: f64) -> (f64, bool) {
    if d < 0.0 {
        if rho.is_infinite() {
            (0.0, false)
        } else {
            (d / (d - rho), false)
        }
    } else if d < rho {
        (0.0, false)
    } else {
        (1.0, true)
    }
}

/// Curvature-based squared-distance model. Needs degree >= 2.
pub fn assemble_sdm(problem: &FitProblem, curve: &BSplineCurve, params: &[f64]) -> Result<QuadraticModel> {
    check_inputs(problem, curve, params)?;
    if curve.degree() < 2 {
        return Err(Error::DegreeTooLow {
            needed: 2,
            degree: curve.degree(),
        });
    }
    let basis = problem.basis();
    let mut model = QuadraticModel::empty(problem);
    for (&x, &t) in problem.points().iter().zip(params) {
        let se = basis.evaluate_span(t, 0);
        let frame = match frame_at(curve, t, x) {
            Ok(f) => f,
            Err(_) => {
                model.stats.pd_fallbacks += 1;
                model.add_term(basis, &se, X_AXIS, 1.0, x.x);
                model.add_term(basis, &se, Y_AXIS, 1.0, x.y);
                continue;
            }
        };
        model.add_term(basis, &se, frame.normal, 1.0, x.dot(frame.normal));
        let (w, clamped) = sdm_tangential_weight(frame.signed_distance, frame.curvature_radius);
        if clamped {
            model.stats.clamped_tangential += 1;
        }
        if w > 0.0 {
            model.add_term(basis, &se, frame.tangent, w, x.dot(frame.tangent));
        }
    }
    Ok(model)
}

/// Levenberg–Marquardt shift `mu = tr(A) / (80 n)`.
pub fn tdmlm_mu(model: &QuadraticModel) -> f64 {
    model.matrix.trace() / (80.0 * model.n_ctrl() as f64)
}

/// Solves `(A + shift I) P = b + shift * anchor`.
pub fn solve_shifted(model: &QuadraticModel, shift: f64, anchor: &[f64]) -> Result<Vec<f64>> {
    if anchor.len() != model.rhs.len() {
        return Err(Error::DimensionMismatch {
            expected: model.rhs.len(),
            got: anchor.len(),
        });
    }
    let mut a = model.matrix.clone();
    a.add_diagonal(shift);
    let rhs: Vec<f64> = model.rhs.iter().zip(anchor).map(|(b, p)| b + shift * p).collect();
    Ok(a.cholesky()?.solve(&rhs))
}

/// TDMLM control-point update `(A + mu I) P = b + mu * anchor` with
/// `mu = tr(A)/(80n)`. A zero anchor gives the plain shifted system; the
/// alternating driver anchors at the current control points so the shift
/// damps the step rather than pulling the curve toward the origin.
pub fn solve_tdmlm_step(model: &QuadraticModel, anchor: &[f64]) -> Result<Vec<Point2>> {
    let coords = solve_shifted(model, tdmlm_mu(model), anchor)?;
    Ok(to_points(&coords))
}

/// Full minimizer of the model, with a `1e-12 * tr(A)/(2n)` ridge anchored
/// at `current`.
pub fn solve_model(model: &QuadraticModel, current: &[f64]) -> Result<Vec<Point2>> {
    let ridge = RIDGE * model.matrix.trace() / model.rhs.len() as f64;
    let coords = solve_shifted(model, ridge, current)?;
    Ok(to_points(&coords))
}

fn to_points(coords: &[f64]) -> Vec<Point2> {
    coords.chunks_exact(2).map(|c| Point2::new(c[0], c[1])).collect()
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AlternatingConfig {
    pub max_iterations: usize,
    /// Stop once the joint-gradient infinity norm drops below this.
    pub grad_tol: f64,
    pub samples_per_span: usize,
    /// Abort when the error exceeds this multiple of the initial error.
    pub divergence_factor: f64,
}

impl Default for AlternatingConfig {
    fn default() -> Self {
        AlternatingConfig {
            max_iterations: 200,
            grad_tol: 1e-8,
            samples_per_span: 32,
            divergence_factor: 10.0,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum AlternatingStatus {
    Converged,
    MaxIterations,
    Diverged,
}

#[derive(Debug, Clone)]
pub struct AlternatingResult {
    pub curve: BSplineCurve,
    pub params: Vec<f64>,
    pub trace: FitTrace,
    pub status: AlternatingStatus,
    pub stats: AssemblyStats,
}

/// Runs PDM, TDMLM or SDM from `initial`.
///
/// Foot points are refined from the previous iteration's parameters; when
/// the resulting error differs from the previous one by more than 20% they
/// are re-seeded from dense samples, keeping the closer of the two per
/// point. Trace instrumentation (the joint gradient norm) is not timed.
pub fn run_alternating(
    method: Method,
    problem: &FitProblem,
    initial: &BSplineCurve,
    config: &AlternatingConfig,
) -> Result<AlternatingResult> {
    if method == Method::Lbfgs {
        return Err(Error::InvalidConfig("run_alternating handles pdm, tdmlm and sdm".into()));
    }
    if initial.basis() != problem.basis() {
        return Err(Error::InvalidConfig("curve topology does not match the problem".into()));
    }
    if method == Method::Sdm && initial.degree() < 2 {
        return Err(Error::DegreeTooLow {
            needed: 2,
            degree: initial.degree(),
        });
    }
    let points = problem.points();
    let mut trace = FitTrace::new(method);
    let mut stats = AssemblyStats::default();

    let setup = Instant::now();
    let proj = project_all(initial, points, config.samples_per_span)?;
    trace.footpoint_initializations = 1;
    trace.add_setup(setup.elapsed().as_secs_f64());
    let mut params = proj.params;
    let mut curve = initial.clone();
    let initial_error = proj_rms(&proj.distances);
    trace.initial_error = initial_error;
    let mut e_prev = initial_error;
    let mut status = AlternatingStatus::MaxIterations;
    let mut grad = vec![0.0; problem.dim()];

    for _ in 0..config.max_iterations {
        let iter_start = Instant::now();
        let mut phases = PhaseTimings::default();

        let t0 = Instant::now();
        let model = match method {
            Method::Pdm => assemble_pdm(problem, &curve, &params)?,
            Method::Tdmlm => assemble_tdm(problem, &curve, &params)?,
            Method::Sdm => assemble_sdm(problem, &curve, &params)?,
            Method::Lbfgs => unreachable!(),
        };
        phases.matrix_filling = t0.elapsed().as_secs_f64();
        stats.pd_fallbacks += model.stats.pd_fallbacks;
        stats.clamped_tangential += model.stats.clamped_tangential;

        let t1 = Instant::now();
        let current = curve.flat_coordinates();
        let new_points = match method {
            Method::Tdmlm => solve_tdmlm_step(&model, &current)?,
            _ => solve_model(&model, &current)?,
        };
        curve = curve.with_control_points(new_points)?;
        phases.matrix_solving = t1.elapsed().as_secs_f64();

        let t2 = Instant::now();
        let mut proj = refine_all(&curve, points, &params);
        let mut error = proj_rms(&proj.distances);
        if should_reinitialize(e_prev, error) {
            let fresh = project_all(&curve, points, config.samples_per_span)?;
            trace.footpoint_initializations += 1;
            merge_closer(&mut proj, &fresh);
            error = proj_rms(&proj.distances);
        }
        params = proj.params;
        phases.footpoint_projection = t2.elapsed().as_secs_f64();
        let duration = iter_start.elapsed().as_secs_f64();

        let state = JointState::new(curve.control_points(), &params);
        evaluate_joint(problem, state.as_slice(), Some(&mut grad));
        let grad_inf = inf_norm(&grad);
        trace.push(TraceRecord {
            iteration: 0,
            elapsed: 0.0,
            duration,
            error,
            grad_inf_norm: grad_inf,
            phases,
        });
        if !error.is_finite() || error > config.divergence_factor * initial_error.max(f64::MIN_POSITIVE) {
            status = AlternatingStatus::Diverged;
            break;
        }
        if grad_inf < config.grad_tol {
            status = AlternatingStatus::Converged;
            break;
        }
        e_prev = error;
    }
    Ok(AlternatingResult {
        curve,
        params,
        trace,
        status,
        stats,
    })
}

fn proj_rms(distances: &[f64]) -> f64 {
    (distances.iter().map(|d| d * d).sum::<f64>() / distances.len() as f64).sqrt()
}

/// Keeps, per point, whichever projection is closer.
pub(crate) fn merge_closer(into: &mut footpoint::ProjectionSet, other: &footpoint::ProjectionSet) {
    for k in 0..into.params.len() {
        if other.distances[k] < into.distances[k] {
            into.params[k] = other.params[k];
            into.distances[k] = other.distances[k];
            into.statuses[k] = other.statuses[k];
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::objective::Topology;

    #[test]
    fn envelope_shapes() {
        let open = BSplineBasis::uniform(6, 2, false).unwrap();
        assert_eq!(envelope(&open), vec![0, 0, 0, 0, 0, 0, 2, 2, 4, 4, 6, 6]);
        let closed = BSplineBasis::uniform(6, 2, true).unwrap();
        assert_eq!(envelope(&closed), vec![0, 0, 0, 0, 0, 0, 2, 2, 0, 0, 0, 0]);
    }

    #[test]
    fn tangential_weight_cases() {
        assert_eq!(sdm_tangential_weight(-1.0, 1.0), (0.5, false));
        assert_eq!(sdm_tangential_weight(0.3, 1.0), (0.0, false));
        assert_eq!(sdm_tangential_weight(-0.3, f64::INFINITY), (0.0, false));
        assert_eq!(sdm_tangential_weight(2.0, 1.0), (1.0, true));
    }

    #[test]
    fn tdmlm_mu_on_identity() {
        let problem = FitProblem::new(
            vec![Point2::ZERO],
            Topology { n_ctrl: 2, degree: 1, closed: false },
            0.0,
            0.0,
        )
        .unwrap();
        let mut model = QuadraticModel::empty(&problem);
        model.matrix.add_diagonal(1.0);
        // tr = 4 over n = 2 control points
        assert!((tdmlm_mu(&model) - 4.0 / 160.0).abs() < 1e-16);
        let sol = solve_tdmlm_step(&model, &[0.0; 4]).unwrap();
        assert_eq!(sol, vec![Point2::ZERO; 2]);
    }

    #[test]
    fn rejects_lbfgs_method() {
        let problem = FitProblem::new(
            vec![Point2::ZERO; 4],
            Topology { n_ctrl: 4, degree: 3, closed: true },
            0.0,
            0.0,
        )
        .unwrap();
        let curve = BSplineCurve::from_basis(problem.basis().clone(), vec![Point2::new(1.0, 0.0), Point2::new(0.0, 1.0), Point2::new(-1.0, 0.0), Point2::new(0.0, -1.0)]).unwrap();
        assert!(run_alternating(Method::Lbfgs, &problem, &curve, &AlternatingConfig::default()).is_err());
    }
}
