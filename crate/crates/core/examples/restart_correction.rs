//! Shows the foot-point restart. One point of a flat ellipse is given the
//! parameter of an orthogonal foot point on the opposite branch. L-BFGS
//! converges to a poor stationary point; recomputing foot points reveals a
//! lower error and triggers a restart.

use splinefit::{
    default_initial_curve, fit_lbfgs, fit_lbfgs_with_params, refine_footpoint, FitConfig, FitProblem, Point2,
    Topology,
};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let count = 100;
    let points: Vec<Point2> = (0..count)
        .map(|k| {
            let a = std::f64::consts::TAU * k as f64 / count as f64;
            Point2::new(0.5 + 0.45 * a.cos(), 0.5 + 0.15 * a.sin())
        })
        .collect();
    let n_ctrl = 6;
    let problem = FitProblem::new(points.clone(), Topology { n_ctrl, degree: 3, closed: true }, 0.0, 0.0)?;
    let config = FitConfig::default();

    let good = fit_lbfgs(&problem, &default_initial_curve(&problem, n_ctrl)?, &config)?;
    println!("default start: error {:.3e}, restarts {}", good.error, good.trace.restarts);

    let mut params = good.params.clone();
    let (top, bottom) = (count / 4, 3 * count / 4);
    let wrong = refine_footpoint(&good.curve, points[top], good.params[bottom]);
    println!(
        "point {top} moved to t={:.4} (distance {:.3}, residual {:.1e})",
        wrong.t, wrong.distance, wrong.residual
    );
    params[top] = wrong.t;

    let poor = fit_lbfgs_with_params(&problem, &good.curve, &params, &config)?;
    for (k, run) in poor.trace.runs.iter().enumerate() {
        println!(
            "run {k}: {} iterations, error {:.3e}, after foot-point correction {:.3e}{}",
            run.iterations,
            run.error,
            run.corrected_error,
            if run.restarted { ", restart" } else { "" }
        );
    }
    println!("final error {:.3e}, status {:?}", poor.error, poor.status);
    Ok(())
}
