//! Joint L-BFGS fitting with foot-point correction and restart.
//!
//! Control points and location parameters are optimized together. After a
//! run converges, foot points are recomputed at the fixed control points; if
//! that changes the fitting error by more than the restart tolerance the
//! optimizer restarts from the corrected parameters with an empty history.

use std::cell::Cell;
use std::time::Instant;

use crate::classic::merge_closer;
use crate::error::{Error, Result};
use crate::footpoint::{project_all, refine_all};
use crate::geometry::BSplineCurve;
use crate::lbfgs::{inf_norm, minimize_with, LbfgsConfig, LbfgsStatus};
use crate::objective::{evaluate_joint, fitting_error_at, rms, FitProblem, JointState};
use crate::point::Point2;
use crate::trace::{FitTrace, Method, PhaseTimings, RunSummary, TraceRecord};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FitConfig {
    pub lbfgs: LbfgsConfig,
    /// Restart when foot-point correction changes the error by more than this.
    pub restart_tol: f64,
    pub max_restarts: usize,
    pub samples_per_span: usize,
}

impl Default for FitConfig {
    fn default() -> Self {
        FitConfig {
            lbfgs: LbfgsConfig::default(),
            restart_tol: 1e-6,
            max_restarts: 5,
            samples_per_span: 32,
        }
    }
}

impl FitConfig {
    pub fn validate(&self) -> Result<()> {
        self.lbfgs.validate()?;
        if !(self.restart_tol >= 0.0) {
            return Err(Error::InvalidConfig(format!(
                "restart_tol must be >= 0, got {}",
                self.restart_tol
            )));
        }
        if self.samples_per_span < 2 {
            return Err(Error::InvalidConfig(format!(
                "samples_per_span must be >= 2, got {}",
                self.samples_per_span
            )));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FitStatus {
    /// Gradient tolerance met and foot-point correction settled.
    Converged,
    /// Iteration budget exhausted before the gradient tolerance was met.
    IterationCapped,
    /// Foot-point correction still changed the error after the last allowed
    /// restart.
    StuckAtLocalMinimum,
    /// No Wolfe step could be found; the result is the last accepted iterate.
    LineSearchFailed,
    /// The objective became non-finite.
    InvalidState,
}

#[derive(Debug, Clone)]
pub struct FitOutcome {
    pub curve: BSplineCurve,
    /// Location parameters, wrapped (closed) or clamped (open) into `[0,1]`.
    pub params: Vec<f64>,
    pub trace: FitTrace,
    pub status: FitStatus,
    /// RMS fitting error at the returned state.
    pub error: f64,
    /// Joint gradient infinity norm at the returned state.
    pub grad_inf_norm: f64,
}

/// Fits `problem` from `initial`, seeding parameters by projection.
pub fn fit_lbfgs(problem: &FitProblem, initial: &BSplineCurve, config: &FitConfig) -> Result<FitOutcome> {
    config.validate()?;
    check_topology(problem, initial)?;
    let start = Instant::now();
    let proj = project_all(initial, problem.points(), config.samples_per_span)?;
    let mut trace = FitTrace::new(Method::Lbfgs);
    trace.footpoint_initializations = 1;
    trace.initial_error = proj.rms_error();
    trace.add_setup(start.elapsed().as_secs_f64());
    run(problem, initial, proj.params, config, trace)
}

/// Fits `problem` from `initial` with caller-supplied starting parameters.
pub fn fit_lbfgs_with_params(
    problem: &FitProblem,
    initial: &BSplineCurve,
    params: &[f64],
    config: &FitConfig,
) -> Result<FitOutcome> {
    config.validate()?;
    check_topology(problem, initial)?;
    if params.len() != problem.len() {
        return Err(Error::DimensionMismatch {
            expected: problem.len(),
            got: params.len(),
        });
    }
    if params.iter().any(|t| !t.is_finite()) {
        return Err(Error::NonFinite("location parameters"));
    }
    let mut trace = FitTrace::new(Method::Lbfgs);
    trace.initial_error = fitting_error_at(initial, problem.points(), params);
    run(problem, initial, params.to_vec(), config, trace)
}

fn check_topology(problem: &FitProblem, curve: &BSplineCurve) -> Result<()> {
    if curve.basis() != problem.basis() {
        return Err(Error::InvalidConfig("curve topology does not match the problem".into()));
    }
    Ok(())
}

fn run(
    problem: &FitProblem,
    initial: &BSplineCurve,
    mut params: Vec<f64>,
    config: &FitConfig,
    mut trace: FitTrace,
) -> Result<FitOutcome> {
    let points = problem.points();
    let basis = problem.basis();
    let mut curve = initial.clone();
    let mut used = 0;
    let status;

    loop {
        let budget = config.lbfgs.max_iterations.saturating_sub(used);
        if budget == 0 {
            status = FitStatus::IterationCapped;
            break;
        }
        let lbfgs = LbfgsConfig {
            max_iterations: budget,
            ..config.lbfgs
        };
        let x0 = JointState::new(curve.control_points(), &params);
        let last_data_sum = Cell::new(f64::NAN);
        let mut objective = |x: &[f64], g: &mut [f64]| {
            let (f, data_sum) = evaluate_joint(problem, x, Some(g));
            last_data_sum.set(data_sum);
            f
        };
        let result = minimize_with(&mut objective, x0.as_slice(), &lbfgs, |it, _| {
            trace.push(TraceRecord {
                iteration: 0,
                elapsed: 0.0,
                duration: it.direction_seconds + it.linesearch_seconds,
                error: rms(last_data_sum.get(), points.len()),
                grad_inf_norm: it.grad_inf_norm,
                phases: PhaseTimings {
                    direction: it.direction_seconds,
                    linesearch: it.linesearch_seconds,
                    ..PhaseTimings::default()
                },
            });
        })?;
        used += result.iterations.len();
        let state = JointState::from_vec(problem.n_ctrl(), result.x)?;
        curve = curve.with_control_points(state.control_points())?;
        params = state.params().iter().map(|&t| basis.normalize_param(t)).collect();

        let run_status = match result.status {
            LbfgsStatus::Converged => FitStatus::Converged,
            LbfgsStatus::MaxIterations => FitStatus::IterationCapped,
            LbfgsStatus::LineSearchFailed => FitStatus::LineSearchFailed,
            LbfgsStatus::InvalidState => FitStatus::InvalidState,
        };
        if matches!(run_status, FitStatus::IterationCapped | FitStatus::InvalidState) {
            status = run_status;
            break;
        }

        // Foot-point correction at fixed control points.
        let start = Instant::now();
        let error = fitting_error_at(&curve, points, &params);
        let mut corrected = refine_all(&curve, points, &params);
        let fresh = project_all(&curve, points, config.samples_per_span)?;
        merge_closer(&mut corrected, &fresh);
        trace.footpoint_initializations += 1;
        let corrected_error = corrected.rms_error();
        let restart = (error - corrected_error).abs() > config.restart_tol;
        if restart && corrected_error < error {
            params = corrected.params;
        }
        trace.add_setup(start.elapsed().as_secs_f64());
        trace.runs.push(RunSummary {
            iterations: result.iterations.len(),
            error,
            corrected_error,
            restarted: restart && trace.restarts < config.max_restarts,
        });
        if !restart {
            status = run_status;
            break;
        }
        if trace.restarts >= config.max_restarts {
            status = FitStatus::StuckAtLocalMinimum;
            break;
        }
        trace.restarts += 1;
    }

    // the returned parameters may be corrected ones, so measure there
    let state = JointState::new(curve.control_points(), &params);
    let mut g = vec![0.0; problem.dim()];
    let (_, data_sum) = evaluate_joint(problem, state.as_slice(), Some(&mut g));
    Ok(FitOutcome {
        curve,
        params,
        trace,
        status,
        error: rms(data_sum, points.len()),
        grad_inf_norm: inf_norm(&g),
    })
}

/// Initial curve with `n` control points for the topology of `problem`.
///
/// Closed: control points evenly spaced on a circle about the bounding-box
/// center with radius 0.6 times the bounding-box diagonal. Open: evenly
/// spaced along the principal axis, spanning the data's extent.
pub fn default_initial_curve(problem: &FitProblem, n: usize) -> Result<BSplineCurve> {
    let topo = problem.topology();
    let degree = topo.degree;
    if n < degree + 1 {
        return Err(Error::TooFewControlPoints { n, degree });
    }
    let points = problem.points();
    let (mut lo, mut hi) = (points[0], points[0]);
    for p in points {
        lo = Point2::new(lo.x.min(p.x), lo.y.min(p.y));
        hi = Point2::new(hi.x.max(p.x), hi.y.max(p.y));
    }
    let diag = (hi - lo).norm();
    if !(diag > 0.0) {
        return Err(Error::DegenerateData("all points coincide"));
    }
    let ctrl: Vec<Point2> = if topo.closed {
        let center = (lo + hi) * 0.5;
        let r = 0.6 * diag;
        (0..n)
            .map(|i| {
                let a = std::f64::consts::TAU * i as f64 / n as f64;
                center + Point2::new(a.cos(), a.sin()) * r
            })
            .collect()
    } else {
        let (centroid, axis) = principal_axis(points);
        let (mut smin, mut smax) = (f64::INFINITY, f64::NEG_INFINITY);
        for &p in points {
            let s = (p - centroid).dot(axis);
            smin = smin.min(s);
            smax = smax.max(s);
        }
        (0..n)
            .map(|i| {
                let s = smin + (smax - smin) * i as f64 / (n - 1) as f64;
                centroid + axis * s
            })
            .collect()
    };
    BSplineCurve::uniform(degree, topo.closed, ctrl)
}

/// Centroid and unit eigenvector of the largest covariance eigenvalue.
fn principal_axis(points: &[Point2]) -> (Point2, Point2) {
    let inv = 1.0 / points.len() as f64;
    let c = points.iter().fold(Point2::ZERO, |a, &p| a + p) * inv;
    let (mut sxx, mut sxy, mut syy) = (0.0, 0.0, 0.0);
    for &p in points {
        let d = p - c;
        sxx += d.x * d.x;
        sxy += d.x * d.y;
        syy += d.y * d.y;
    }
    let theta = 0.5 * (2.0 * sxy).atan2(sxx - syy);
    (c, Point2::new(theta.cos(), theta.sin()))
}
