//! Projects a few points onto a closed and an open curve: dense sampling
//! seeds each foot point, Newton-type refinement finishes it.

use splinefit::{project_all, BSplineCurve, Point2};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let hexagon: Vec<Point2> = (0..6)
        .map(|k| {
            let a = std::f64::consts::TAU * k as f64 / 6.0;
            Point2::new(0.5 + 0.4 * a.cos(), 0.5 + 0.4 * a.sin())
        })
        .collect();
    let queries = [
        Point2::new(0.5, 0.5),
        Point2::new(1.2, 0.5),
        Point2::new(0.5, -0.3),
        Point2::new(0.1, 0.9),
    ];
    for closed in [true, false] {
        let curve = BSplineCurve::uniform(3, closed, hexagon.clone())?;
        let set = project_all(&curve, &queries, 32)?;
        println!("{} curve", if closed { "closed" } else { "open" });
        for (k, x) in queries.iter().enumerate() {
            let foot = curve.evaluate(set.params[k]);
            println!(
                "  ({:.2}, {:.2}) -> t={:.6} at ({:.6}, {:.6}), distance {:.6}, {:?}",
                x.x, x.y, set.params[k], foot.x, foot.y, set.distances[k], set.statuses[k]
            );
        }
    }
    Ok(())
}
