//! Fits a closed cubic B-spline to points on a circle with joint L-BFGS and
//! prints the trace.
//!
//! ```text
//! cargo run --release --example fit_circle -- [N] [n_ctrl]
//! ```

use splinefit::cli::{generate_shape, ShapeKind};
use splinefit::{default_initial_curve, fit_lbfgs, normalize_points, FitConfig, FitProblem, Topology};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let args: Vec<String> = std::env::args().skip(1).collect();
    let count: usize = args.first().map_or(Ok(100), |s| s.parse())?;
    let n_ctrl: usize = args.get(1).map_or(Ok(6), |s| s.parse())?;

    let raw = generate_shape(&ShapeKind::Circle, count, 0.0, 0)?;
    let (points, _) = normalize_points(&raw)?;
    let problem = FitProblem::new(points, Topology { n_ctrl, degree: 3, closed: true }, 0.0, 0.0)?;
    let initial = default_initial_curve(&problem, n_ctrl)?;
    let fit = fit_lbfgs(&problem, &initial, &FitConfig::default())?;

    println!("initial error {:.6e}", fit.trace.initial_error);
    for r in &fit.trace.records {
        println!(
            "iter {:3}  t={:.3e}s  error={:.6e}  |g|inf={:.3e}",
            r.iteration, r.elapsed, r.error, r.grad_inf_norm
        );
    }
    println!("status {:?}, restarts {}", fit.status, fit.trace.restarts);
    for p in fit.curve.control_points() {
        println!("ctrl {:.6} {:.6}", p.x, p.y);
    }
    Ok(())
}
