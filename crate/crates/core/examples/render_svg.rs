//! Fits the star shape with SDM and writes points plus curve as SVG.
//!
//! ```text
//! cargo run --release --example render_svg -- [out.svg]
//! ```

use splinefit::cli::{fit_points, generate_shape, render_svg, RunConfig, ShapeKind};
use splinefit::Method;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let out = std::env::args().nth(1).unwrap_or_else(|| "star.svg".into());
    let points = generate_shape(&ShapeKind::Star, 200, 0.0, 0)?;
    let config = RunConfig {
        method: Method::Sdm,
        n_ctrl: 20,
        ..RunConfig::default()
    };
    let report = fit_points(&config, &points)?;
    println!("{}", report.summary());
    std::fs::write(&out, render_svg(&points, Some(&report.curve), 800))?;
    println!("wrote {out}");
    Ok(())
}
