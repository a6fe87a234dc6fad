//! The L-BFGS minimizer on its own, applied to the Rosenbrock function.

use splinefit::{minimize, LbfgsConfig};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let dim = 10;
    let mut rosenbrock = |x: &[f64], g: &mut [f64]| {
        g.iter_mut().for_each(|v| *v = 0.0);
        let mut f = 0.0;
        for i in 0..x.len() - 1 {
            let a = x[i + 1] - x[i] * x[i];
            let b = 1.0 - x[i];
            f += 100.0 * a * a + b * b;
            g[i] += -400.0 * a * x[i] - 2.0 * b;
            g[i + 1] += 200.0 * a;
        }
        f
    };
    let x0 = vec![-1.2; dim];
    let config = LbfgsConfig {
        m: 5,
        max_iterations: 1000,
        ..LbfgsConfig::default()
    };
    let result = minimize(&mut rosenbrock, &x0, &config)?;
    println!(
        "status {:?} after {} iterations, f = {:.3e}, |g|inf = {:.3e}",
        result.status,
        result.iterations.len(),
        result.value,
        result.grad_inf_norm()
    );
    println!("x = {:?}", result.x.iter().map(|v| format!("{v:.6}")).collect::<Vec<_>>());
    Ok(())
}
