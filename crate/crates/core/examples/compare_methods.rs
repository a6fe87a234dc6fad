//! Runs all four methods on one generated instance and prints a summary
//! line per method.
//!
//! ```text
//! cargo run --release --example compare_methods -- [circle|noisy_circle|star] [N] [n_ctrl] [sigma]
//! ```

use splinefit::cli::{fit_points, generate_shape, RunConfig, ShapeKind};
use splinefit::Method;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let args: Vec<String> = std::env::args().skip(1).collect();
    let shape: ShapeKind = args.first().map_or("circle", String::as_str).parse()?;
    let count: usize = args.get(1).map_or(Ok(100), |s| s.parse())?;
    let n_ctrl: usize = args.get(2).map_or(Ok(6), |s| s.parse())?;
    let sigma: f64 = args.get(3).map_or(Ok(0.0), |s| s.parse())?;

    let points = generate_shape(&shape, count, sigma, 7)?;
    for method in Method::ALL {
        let config = RunConfig {
            method,
            n_ctrl,
            max_iter: args.get(4).map_or(Ok(200), |s| s.parse())?,
            ..RunConfig::default()
        };
        let report = fit_points(&config, &points)?;
        println!("{}", report.summary());
    }
    Ok(())
}
