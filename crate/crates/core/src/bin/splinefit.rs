use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use splinefit::cli::{
    benchmark_scaling, error_exit_code, format_scaling_csv, generate_shape, read_curve, read_points, render_svg,
    run_and_trace, write_points, BenchConfig, RunConfig, ScalingAxis, ShapeKind, EXIT_OK, EXIT_USAGE,
};
use splinefit::{Error, Method};

#[derive(Parser)]
#[command(name = "splinefit", version, about = "Fit planar B-spline curves to point sets")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Fit one method to a point file.
    Fit(FitArgs),
    /// Write a generated point set.
    Generate(GenerateArgs),
    /// Per-iteration time versus data or control point count.
    BenchScaling(BenchArgs),
    /// Render points and a saved curve to SVG.
    Render(RenderArgs),
}

#[derive(Args, Clone)]
struct SolverArgs {
    /// lbfgs, pdm, tdmlm or sdm
    #[arg(long, default_value = "lbfgs")]
    method: Method,
    #[arg(long = "n-ctrl", default_value_t = 8)]
    n_ctrl: usize,
    #[arg(long, default_value_t = 3)]
    degree: usize,
    /// Fit an open curve instead of a closed one.
    #[arg(long)]
    open: bool,
    #[arg(long, default_value_t = 0.0)]
    alpha: f64,
    #[arg(long, default_value_t = 0.0)]
    beta: f64,
    /// L-BFGS history size.
    #[arg(long, default_value_t = 20)]
    m: usize,
    #[arg(long, default_value_t = 1e-4)]
    c1: f64,
    #[arg(long, default_value_t = 0.9)]
    c2: f64,
    #[arg(long = "grad-tol", default_value_t = 1e-8)]
    grad_tol: f64,
    #[arg(long = "max-iter", default_value_t = 1000)]
    max_iter: usize,
    #[arg(long = "restart-tol", default_value_t = 1e-6)]
    restart_tol: f64,
    #[arg(long = "max-restarts", default_value_t = 5)]
    max_restarts: usize,
    /// Dense samples per knot span used to seed foot points.
    #[arg(long = "samples-per-span", default_value_t = 32)]
    samples_per_span: usize,
}

impl SolverArgs {
    fn to_config(&self) -> RunConfig {
        RunConfig {
            method: self.method,
            n_ctrl: self.n_ctrl,
            degree: self.degree,
            closed: !self.open,
            alpha: self.alpha,
            beta: self.beta,
            m: self.m,
            c1: self.c1,
            c2: self.c2,
            grad_tol: self.grad_tol,
            max_iter: self.max_iter,
            restart_tol: self.restart_tol,
            max_restarts: self.max_restarts,
            samples_per_span: self.samples_per_span,
            ..RunConfig::default()
        }
    }
}

#[derive(Args)]
struct FitArgs {
    /// Point file (`x y` per line).
    input: PathBuf,
    #[command(flatten)]
    solver: SolverArgs,
    /// Initial control points (`x y` per line, input coordinates).
    #[arg(long)]
    init: Option<PathBuf>,
    /// Trace CSV output.
    #[arg(long)]
    trace: Option<PathBuf>,
    /// Fitted curve output.
    #[arg(long)]
    curve: Option<PathBuf>,
    /// SVG output.
    #[arg(long)]
    svg: Option<PathBuf>,
}

#[derive(Args)]
struct GenerateArgs {
    /// circle, noisy_circle, star or file:<path>
    #[arg(long, default_value = "circle")]
    shape: ShapeKind,
    #[arg(long = "count", short = 'n', default_value_t = 100)]
    count: usize,
    #[arg(long, default_value_t = 0.0)]
    sigma: f64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Output file; stdout when omitted.
    #[arg(long, short)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct BenchArgs {
    /// data_points or control_points
    #[arg(long)]
    axis: ScalingAxis,
    /// Comma-separated levels, e.g. 100,200,500.
    #[arg(long, value_delimiter = ',', required = true)]
    levels: Vec<usize>,
    #[arg(long, default_value = "noisy_circle")]
    shape: ShapeKind,
    #[arg(long, default_value_t = 0.01)]
    sigma: f64,
    #[arg(long, default_value_t = 1)]
    seed: u64,
    /// Point count on the control-point axis.
    #[arg(long = "n-points", default_value_t = 200)]
    n_points: usize,
    /// Iterations averaged per cell.
    #[arg(long, default_value_t = 50)]
    iterations: usize,
    #[arg(long, default_value_t = 3)]
    repeats: usize,
    /// Comma-separated subset of methods.
    #[arg(long, value_delimiter = ',')]
    methods: Vec<Method>,
    #[command(flatten)]
    solver: SolverArgs,
    /// CSV output; stdout when omitted.
    #[arg(long, short)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct RenderArgs {
    /// Point file.
    points: PathBuf,
    /// Curve file written by `fit --curve`.
    #[arg(long)]
    curve: Option<PathBuf>,
    #[arg(long, short)]
    out: PathBuf,
    #[arg(long, default_value_t = 800)]
    width: u32,
}

fn run(cli: Cli) -> Result<i32, Error> {
    match cli.command {
        Command::Fit(args) => {
            let config = RunConfig {
                input: Some(args.input),
                initial_control_points: args.init,
                trace_out: args.trace,
                curve_out: args.curve,
                svg_out: args.svg,
                ..args.solver.to_config()
            };
            let report = run_and_trace(&config)?;
            println!("{}", report.summary());
            Ok(report.status.exit_code())
        }
        Command::Generate(args) => {
            let pts = generate_shape(&args.shape, args.count, args.sigma, args.seed)?;
            match args.out {
                Some(path) => write_points(&path, &pts)?,
                None => print!("{}", splinefit::cli::format_points(&pts)),
            }
            Ok(EXIT_OK)
        }
        Command::BenchScaling(args) => {
            let base = BenchConfig {
                run: args.solver.to_config(),
                shape: args.shape,
                noise_sigma: args.sigma,
                seed: args.seed,
                n_points: args.n_points,
                iterations: args.iterations,
                repeats: args.repeats,
                methods: if args.methods.is_empty() { Method::ALL.to_vec() } else { args.methods },
            };
            let cells = benchmark_scaling(args.axis, &args.levels, &base)?;
            let csv = format_scaling_csv(args.axis, &cells);
            match args.out {
                Some(path) => std::fs::write(path, csv)?,
                None => print!("{csv}"),
            }
            for c in cells.iter().filter(|c| c.failure.is_some()) {
                eprintln!("warning: level {} {} failed: {}", c.level, c.method, c.failure.as_deref().unwrap_or(""));
            }
            Ok(EXIT_OK)
        }
        Command::Render(args) => {
            let pts = read_points(&args.points)?;
            let curve = args.curve.as_deref().map(read_curve).transpose()?;
            std::fs::write(&args.out, render_svg(&pts, curve.as_ref(), args.width))?;
            Ok(EXIT_OK)
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            return ExitCode::from(code as u8);
        }
    };
    match run(cli) {
        Ok(code) => ExitCode::from(code as u8),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(error_exit_code(&e) as u8)
        }
    }
}
