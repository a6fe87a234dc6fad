//! Per-iteration time as the number of data points or control points grows.
//!
//! ```text
//! cargo run --release --example scaling_sweep -- data_points 100,200,500,1000,3000
//! cargo run --release --example scaling_sweep -- control_points 10,20,40,80
//! ```

use splinefit::cli::{benchmark_scaling, format_scaling_csv, linear_fit_r2, BenchConfig, ScalingAxis};
use splinefit::Method;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let args: Vec<String> = std::env::args().skip(1).collect();
    let axis: ScalingAxis = args.first().map_or("data_points", String::as_str).parse()?;
    let levels: Vec<usize> = match args.get(1) {
        Some(s) => s.split(',').map(str::parse).collect::<Result<_, _>>()?,
        None => match axis {
            ScalingAxis::DataPoints => vec![100, 200, 500, 1000, 3000],
            ScalingAxis::ControlPoints => vec![10, 20, 40, 80],
        },
    };
    let base = BenchConfig::default();
    let cells = benchmark_scaling(axis, &levels, &base)?;
    print!("{}", format_scaling_csv(axis, &cells));

    for method in Method::ALL {
        let row: Vec<_> = cells.iter().filter(|c| c.method == method).collect();
        let xs: Vec<f64> = row.iter().map(|c| c.level as f64).collect();
        let ys: Vec<f64> = row.iter().map(|c| c.mean_iter_seconds).collect();
        let (_, slope, r2) = linear_fit_r2(&xs, &ys);
        let growth = ys.last().unwrap_or(&f64::NAN) / ys.first().unwrap_or(&f64::NAN);
        println!("# {method}: slope={slope:.3e} s/level r2={r2:.4} growth={growth:.2}");
    }
    Ok(())
}
