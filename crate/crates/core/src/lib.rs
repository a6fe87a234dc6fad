//! Planar B-spline curve fitting.
//!
//! The main method optimizes control points and per-point location
//! parameters jointly with L-BFGS ([`fitter::fit_lbfgs`]). Three alternating
//! baselines (point, tangent and squared distance minimization) live in
//! [`classic`]. Data should be scaled into the unit box first
//! ([`objective::normalize_points`]).
//!
//! ```
//! use splinefit::{default_initial_curve, fit_lbfgs, FitConfig, FitProblem, Point2, Topology};
//!
//! let points: Vec<Point2> = (0..50)
//!     .map(|k| {
//!         let a = std::f64::consts::TAU * k as f64 / 50.0;
//!         Point2::new(0.5 + 0.5 * a.cos(), 0.5 + 0.5 * a.sin())
//!     })
//!     .collect();
//! let topology = Topology { n_ctrl: 8, degree: 3, closed: true };
//! let problem = FitProblem::new(points, topology, 0.0, 0.0).unwrap();
//! let initial = default_initial_curve(&problem, 8).unwrap();
//! let fit = fit_lbfgs(&problem, &initial, &FitConfig::default()).unwrap();
//! assert!(fit.error < 1e-3);
//! ```

// `!(x > 0.0)` style checks are deliberate: they also reject NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]
#![allow(clippy::needless_range_loop)]

pub mod classic;
pub mod cli;
pub mod error;
pub mod fitter;
pub mod footpoint;
pub mod geometry;
pub mod lbfgs;
pub mod linalg;
pub mod objective;
pub mod point;
pub mod trace;

pub use classic::{run_alternating, AlternatingConfig, AlternatingResult, AlternatingStatus};
pub use error::{Error, Result};
pub use fitter::{default_initial_curve, fit_lbfgs, fit_lbfgs_with_params, FitConfig, FitOutcome, FitStatus};
pub use footpoint::{project_all, refine_footpoint, Projection, ProjectionStatus};
pub use geometry::{BSplineBasis, BSplineCurve, Jet, SpanEvaluation, MAX_DEGREE};
pub use lbfgs::{minimize, LbfgsConfig, LbfgsHistory, LbfgsStatus};
pub use objective::{normalize_points, FitProblem, JointState, Topology, UnitBoxTransform};
pub use point::Point2;
pub use trace::{FitTrace, Method, PhaseTimings, TraceRecord};
