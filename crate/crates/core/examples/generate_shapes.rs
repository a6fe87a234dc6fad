//! Prints the built-in test shapes as point lists.

use splinefit::cli::{format_points, generate_shape, ShapeKind};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    for (kind, sigma) in [(ShapeKind::Circle, 0.0), (ShapeKind::NoisyCircle, 0.01), (ShapeKind::Star, 0.0)] {
        let pts = generate_shape(&kind, 12, sigma, 42)?;
        println!("# {kind:?} sigma={sigma}");
        print!("{}", format_points(&pts));
    }
    Ok(())
}
