//! Library side of the command-line tool: data generation, file formats,
//! single fits with traces, SVG rendering and scaling sweeps.
//!
//! File formats:
//!
//! * points: UTF-8 text, one `x y` pair per line, `#` starts a comment;
//! * curves: `degree`, `closed`, `knots` and `control_points` blocks (see
//!   [`write_curve`]);
//! * traces: a `# splinefit trace v1 method=<name>` comment followed by the
//!   CSV header `iter,elapsed_s,error,grad_inf_norm`.

use std::fmt::Write as _;
use std::fs;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};
use std::str::FromStr;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};

use crate::classic::{run_alternating, AlternatingConfig, AlternatingStatus};
use crate::error::{Error, Result};
use crate::fitter::{default_initial_curve, fit_lbfgs, FitConfig, FitStatus};
use crate::geometry::BSplineCurve;
use crate::lbfgs::LbfgsConfig;
use crate::objective::{normalize_points, FitProblem, Topology, UnitBoxTransform};
use crate::point::Point2;
use crate::trace::{FitTrace, Method};

pub const TRACE_HEADER: &str = "iter,elapsed_s,error,grad_inf_norm";
pub const TRACE_VERSION: &str = "v1";
/// Minimum number of curve samples in rendered polylines.
pub const SVG_CURVE_SAMPLES: usize = 512;

pub const EXIT_OK: i32 = 0;
pub const EXIT_USAGE: i32 = 1;
pub const EXIT_NUMERICAL: i32 = 2;
pub const EXIT_CAPPED: i32 = 3;

/// Exit code for a library error: configuration and input problems are
/// usage errors, everything else is numerical.
pub fn error_exit_code(err: &Error) -> i32 {
    match err {
        Error::InvalidConfig(_)
        | Error::Parse { .. }
        | Error::Io(_)
        | Error::TooFewControlPoints { .. }
        | Error::UnsupportedDegree { .. }
        | Error::DegreeTooLow { .. }
        | Error::DimensionMismatch { .. }
        | Error::DegenerateData(_) => EXIT_USAGE,
        Error::NonFinite(_) | Error::NotDescentDirection(_) | Error::Factorization { .. } => EXIT_NUMERICAL,
    }
}

// ---------------------------------------------------------------- shapes

#[derive(Debug, Clone, PartialEq)]
pub enum ShapeKind {
    /// Unit circle about the origin.
    Circle,
    /// Unit circle with isotropic Gaussian noise.
    NoisyCircle,
    /// Five-pointed star polygon, sampled uniformly by arc length.
    Star,
    /// Points read from a file; optional noise is added on top.
    FromFile(PathBuf),
}

impl FromStr for ShapeKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "circle" => Ok(ShapeKind::Circle),
            "noisy_circle" | "noisy-circle" => Ok(ShapeKind::NoisyCircle),
            "star" => Ok(ShapeKind::Star),
            other => match other.strip_prefix("file:") {
                Some(path) => Ok(ShapeKind::FromFile(PathBuf::from(path))),
                None => Err(Error::InvalidConfig(format!(
                    "unknown shape '{other}' (expected circle, noisy_circle, star or file:<path>)"
                ))),
            },
        }
    }
}

/// Star vertices: alternating outer radius 1 and inner radius 0.4.
pub fn star_vertices() -> Vec<Point2> {
    (0..10)
        .map(|i| {
            let r = if i % 2 == 0 { 1.0 } else { 0.4 };
            let a = std::f64::consts::FRAC_PI_2 + std::f64::consts::TAU * i as f64 / 10.0;
            Point2::new(r * a.cos(), r * a.sin())
        })
        .collect()
}

/// `count` points at equal arc-length spacing along a closed polygon,
/// starting at the first vertex.
pub fn sample_closed_polyline(vertices: &[Point2], count: usize) -> Vec<Point2> {
    let m = vertices.len();
    let mut cumulative = Vec::with_capacity(m + 1);
    cumulative.push(0.0);
    for i in 0..m {
        let len = vertices[i].distance(vertices[(i + 1) % m]);
        cumulative.push(cumulative[i] + len);
    }
    let total = cumulative[m];
    let mut out = Vec::with_capacity(count);
    let mut seg = 0;
    for k in 0..count {
        let s = total * k as f64 / count as f64;
        while seg + 1 < m && cumulative[seg + 1] <= s {
            seg += 1;
        }
        let len = cumulative[seg + 1] - cumulative[seg];
        let u = if len > 0.0 { (s - cumulative[seg]) / len } else { 0.0 };
        let a = vertices[seg];
        let b = vertices[(seg + 1) % m];
        out.push(a + (b - a) * u);
    }
    out
}

/// Deterministic point set: all randomness comes from `seed`.
pub fn generate_shape(kind: &ShapeKind, count: usize, noise_sigma: f64, seed: u64) -> Result<Vec<Point2>> {
    if !(noise_sigma >= 0.0 && noise_sigma.is_finite()) {
        return Err(Error::InvalidConfig(format!("noise sigma must be >= 0, got {noise_sigma}")));
    }
    let mut points = match kind {
        ShapeKind::Circle | ShapeKind::NoisyCircle => {
            if count == 0 {
                return Err(Error::InvalidConfig("point count must be >= 1".into()));
            }
            (0..count)
                .map(|k| {
                    let a = std::f64::consts::TAU * k as f64 / count as f64;
                    Point2::new(a.cos(), a.sin())
                })
                .collect()
        }
        ShapeKind::Star => {
            if count == 0 {
                return Err(Error::InvalidConfig("point count must be >= 1".into()));
            }
            sample_closed_polyline(&star_vertices(), count)
        }
        ShapeKind::FromFile(path) => read_points(path)?,
    };
    if noise_sigma > 0.0 {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let normal = Normal::new(0.0, noise_sigma).map_err(|e| Error::InvalidConfig(e.to_string()))?;
        for p in &mut points {
            p.x += normal.sample(&mut rng);
            p.y += normal.sample(&mut rng);
        }
    }
    Ok(points)
}

// ---------------------------------------------------------------- files

pub fn parse_points(text: &str) -> Result<Vec<Point2>> {
    let mut out = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let parse_err = |msg: String| Error::Parse { line: i + 1, msg };
        let mut fields = line.split_whitespace();
        let (Some(xs), Some(ys), None) = (fields.next(), fields.next(), fields.next()) else {
            return Err(parse_err(format!("expected 'x y', got '{line}'")));
        };
        let x: f64 = xs.parse().map_err(|_| parse_err(format!("bad number '{xs}'")))?;
        let y: f64 = ys.parse().map_err(|_| parse_err(format!("bad number '{ys}'")))?;
        if !x.is_finite() || !y.is_finite() {
            return Err(parse_err("non-finite coordinate".into()));
        }
        out.push(Point2::new(x, y));
    }
    Ok(out)
}

pub fn read_points(path: &Path) -> Result<Vec<Point2>> {
    let pts = parse_points(&fs::read_to_string(path)?)?;
    if pts.is_empty() {
        return Err(Error::DegenerateData("point file contains no points"));
    }
    Ok(pts)
}

/// 17 significant digits, so reading back reproduces every coordinate.
pub fn format_points(points: &[Point2]) -> String {
    let mut s = String::with_capacity(48 * points.len());
    for p in points {
        let _ = writeln!(s, "{:.16e} {:.16e}", p.x, p.y);
    }
    s
}

pub fn write_points(path: &Path, points: &[Point2]) -> Result<()> {
    fs::write(path, format_points(points))?;
    Ok(())
}

/// Text form of a curve:
///
/// ```text
/// # splinefit curve v1
/// degree 3
/// closed true
/// knots 13
/// <knot values, one per line>
/// control_points 6
/// <x y per line>
/// ```
pub fn format_curve(curve: &BSplineCurve) -> String {
    let mut s = String::new();
    let _ = writeln!(s, "# splinefit curve {TRACE_VERSION}");
    let _ = writeln!(s, "degree {}", curve.degree());
    let _ = writeln!(s, "closed {}", curve.is_closed());
    let _ = writeln!(s, "knots {}", curve.knots().len());
    for k in curve.knots() {
        let _ = writeln!(s, "{k:.16e}");
    }
    let _ = writeln!(s, "control_points {}", curve.len());
    s.push_str(&format_points(curve.control_points()));
    s
}

pub fn parse_curve(text: &str) -> Result<BSplineCurve> {
    let mut lines = text
        .lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.split('#').next().unwrap_or("").trim()))
        .filter(|(_, l)| !l.is_empty());
    let mut next = |what: &str| {
        lines.next().ok_or_else(|| Error::Parse {
            line: 0,
            msg: format!("unexpected end of curve file, expected {what}"),
        })
    };
    fn keyed<T: FromStr>(entry: (usize, &str), key: &str) -> Result<T> {
        let (line, text) = entry;
        let rest = text.strip_prefix(key).map(str::trim).ok_or_else(|| Error::Parse {
            line,
            msg: format!("expected '{key} <value>'"),
        })?;
        rest.parse().map_err(|_| Error::Parse {
            line,
            msg: format!("bad value for '{key}'"),
        })
    }
    let degree: usize = keyed(next("degree")?, "degree")?;
    let closed: bool = keyed(next("closed")?, "closed")?;
    let knot_count: usize = keyed(next("knots")?, "knots")?;
    let mut knots = Vec::with_capacity(knot_count);
    for _ in 0..knot_count {
        let (line, t) = next("knot value")?;
        knots.push(t.parse::<f64>().map_err(|_| Error::Parse {
            line,
            msg: format!("bad knot '{t}'"),
        })?);
    }
    let n: usize = keyed(next("control_points")?, "control_points")?;
    let mut pts = Vec::with_capacity(n);
    for _ in 0..n {
        let (line, l) = next("control point")?;
        let mut parsed = parse_points(l).map_err(|_| Error::Parse {
            line,
            msg: format!("bad control point '{l}'"),
        })?;
        pts.push(parsed.pop().ok_or(Error::Parse {
            line,
            msg: "empty control point".into(),
        })?);
    }
    let curve = BSplineCurve::uniform(degree, closed, pts)?;
    let matches = curve.knots().len() == knots.len()
        && curve.knots().iter().zip(&knots).all(|(a, b)| (a - b).abs() <= 1e-12);
    if !matches {
        return Err(Error::Parse {
            line: 0,
            msg: "knot vector is not the uniform knot vector for this degree and topology".into(),
        });
    }
    Ok(curve)
}

pub fn write_curve(path: &Path, curve: &BSplineCurve) -> Result<()> {
    fs::write(path, format_curve(curve))?;
    Ok(())
}

pub fn read_curve(path: &Path) -> Result<BSplineCurve> {
    parse_curve(&fs::read_to_string(path)?)
}

pub fn format_trace_csv(trace: &FitTrace) -> String {
    let mut s = String::with_capacity(64 * (trace.records.len() + 2));
    let _ = writeln!(s, "# splinefit trace {TRACE_VERSION} method={}", trace.method);
    s.push_str(TRACE_HEADER);
    s.push('\n');
    for r in &trace.records {
        let _ = writeln!(s, "{},{:.9e},{:.16e},{:.16e}", r.iteration, r.elapsed, r.error, r.grad_inf_norm);
    }
    s
}

pub fn write_trace_csv(path: &Path, trace: &FitTrace) -> Result<()> {
    let mut w = BufWriter::new(fs::File::create(path)?);
    w.write_all(format_trace_csv(trace).as_bytes())?;
    w.flush()?;
    Ok(())
}

// ---------------------------------------------------------------- svg

/// SVG with one circle marker per data point and the curve as a single
/// polyline of at least [`SVG_CURVE_SAMPLES`] samples.
pub fn render_svg(points: &[Point2], curve: Option<&BSplineCurve>, width: u32) -> String {
    let samples = curve.map(|c| c.sample(SVG_CURVE_SAMPLES)).unwrap_or_default();
    let all = points.iter().chain(&samples);
    let (mut lo, mut hi) = (Point2::new(f64::INFINITY, f64::INFINITY), Point2::new(f64::NEG_INFINITY, f64::NEG_INFINITY));
    for p in all {
        lo = Point2::new(lo.x.min(p.x), lo.y.min(p.y));
        hi = Point2::new(hi.x.max(p.x), hi.y.max(p.y));
    }
    if !lo.is_finite() {
        lo = Point2::ZERO;
        hi = Point2::new(1.0, 1.0);
    }
    let side = (hi.x - lo.x).max(hi.y - lo.y).max(1e-12);
    let w = width.max(16) as f64;
    let margin = 0.05 * w;
    let scale = (w - 2.0 * margin) / side;
    // flip y so the image matches the usual math orientation
    let map = |p: Point2| (margin + (p.x - lo.x) * scale, w - margin - (p.y - lo.y) * scale);
    let radius = (w / 250.0).max(1.5);

    let mut s = String::new();
    let _ = writeln!(
        s,
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{w}\" height=\"{w}\" viewBox=\"0 0 {w} {w}\">"
    );
    let _ = writeln!(s, "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>");
    let _ = writeln!(s, "<g fill=\"#1f77b4\">");
    for &p in points {
        let (x, y) = map(p);
        let _ = writeln!(s, "<circle cx=\"{x:.3}\" cy=\"{y:.3}\" r=\"{radius:.2}\"/>");
    }
    s.push_str("</g>\n");
    if !samples.is_empty() {
        s.push_str("<polyline fill=\"none\" stroke=\"#d62728\" stroke-width=\"2\" points=\"");
        for (i, &p) in samples.iter().enumerate() {
            let (x, y) = map(p);
            if i > 0 {
                s.push(' ');
            }
            let _ = write!(s, "{x:.3},{y:.3}");
        }
        s.push_str("\"/>\n");
    }
    s.push_str("</svg>\n");
    s
}

// ---------------------------------------------------------------- runs

/// Everything needed for one fit.
#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub method: Method,
    pub n_ctrl: usize,
    pub degree: usize,
    pub closed: bool,
    pub alpha: f64,
    pub beta: f64,
    pub m: usize,
    pub c1: f64,
    pub c2: f64,
    pub grad_tol: f64,
    pub max_iter: usize,
    pub restart_tol: f64,
    pub max_restarts: usize,
    pub samples_per_span: usize,
    /// Data points; read from `input` when set.
    pub input: Option<PathBuf>,
    /// Explicit initial control points (raw coordinates).
    pub initial_control_points: Option<PathBuf>,
    pub trace_out: Option<PathBuf>,
    pub curve_out: Option<PathBuf>,
    pub svg_out: Option<PathBuf>,
}

impl Default for RunConfig {
    fn default() -> Self {
        let lbfgs = LbfgsConfig::default();
        let fit = FitConfig::default();
        RunConfig {
            method: Method::Lbfgs,
            n_ctrl: 8,
            degree: 3,
            closed: true,
            alpha: 0.0,
            beta: 0.0,
            m: lbfgs.m,
            c1: lbfgs.c1,
            c2: lbfgs.c2,
            grad_tol: lbfgs.grad_tol,
            max_iter: 1000,
            restart_tol: fit.restart_tol,
            max_restarts: fit.max_restarts,
            samples_per_span: fit.samples_per_span,
            input: None,
            initial_control_points: None,
            trace_out: None,
            curve_out: None,
            svg_out: None,
        }
    }
}

impl RunConfig {
    pub fn fit_config(&self) -> FitConfig {
        FitConfig {
            lbfgs: LbfgsConfig {
                m: self.m,
                c1: self.c1,
                c2: self.c2,
                grad_tol: self.grad_tol,
                max_iterations: self.max_iter,
                ..LbfgsConfig::default()
            },
            restart_tol: self.restart_tol,
            max_restarts: self.max_restarts,
            samples_per_span: self.samples_per_span,
        }
    }

    pub fn alternating_config(&self) -> AlternatingConfig {
        AlternatingConfig {
            max_iterations: self.max_iter,
            grad_tol: self.grad_tol,
            samples_per_span: self.samples_per_span,
            ..AlternatingConfig::default()
        }
    }

    pub fn topology(&self) -> Topology {
        Topology {
            n_ctrl: self.n_ctrl,
            degree: self.degree,
            closed: self.closed,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RunStatus {
    Converged,
    /// Iteration cap reached without meeting the gradient tolerance.
    IterationCapped,
    /// Restart cap reached while foot-point correction still changed the error.
    StuckAtLocalMinimum,
    /// Divergence, line-search failure or non-finite values.
    NumericalFailure,
}

impl RunStatus {
    pub fn name(self) -> &'static str {
        match self {
            RunStatus::Converged => "converged",
            RunStatus::IterationCapped => "iteration_capped",
            RunStatus::StuckAtLocalMinimum => "stuck_at_local_minimum",
            RunStatus::NumericalFailure => "numerical_failure",
        }
    }

    pub fn exit_code(self) -> i32 {
        match self {
            RunStatus::Converged | RunStatus::StuckAtLocalMinimum => EXIT_OK,
            RunStatus::IterationCapped => EXIT_CAPPED,
            RunStatus::NumericalFailure => EXIT_NUMERICAL,
        }
    }
}

impl From<FitStatus> for RunStatus {
    fn from(s: FitStatus) -> Self {
        match s {
            FitStatus::Converged => RunStatus::Converged,
            FitStatus::IterationCapped => RunStatus::IterationCapped,
            FitStatus::StuckAtLocalMinimum => RunStatus::StuckAtLocalMinimum,
            FitStatus::LineSearchFailed | FitStatus::InvalidState => RunStatus::NumericalFailure,
        }
    }
}

impl From<AlternatingStatus> for RunStatus {
    fn from(s: AlternatingStatus) -> Self {
        match s {
            AlternatingStatus::Converged => RunStatus::Converged,
            AlternatingStatus::MaxIterations => RunStatus::IterationCapped,
            AlternatingStatus::Diverged => RunStatus::NumericalFailure,
        }
    }
}

#[derive(Debug, Clone)]
pub struct RunReport {
    pub method: Method,
    pub status: RunStatus,
    /// Fitted curve in unit-box coordinates.
    pub unit_curve: BSplineCurve,
    /// Fitted curve in the input coordinates.
    pub curve: BSplineCurve,
    pub transform: UnitBoxTransform,
    pub trace: FitTrace,
    /// Final RMS error in unit-box coordinates.
    pub error: f64,
    pub grad_inf_norm: f64,
}

impl RunReport {
    /// One-line summary: error, timing, restarts and phase shares.
    pub fn summary(&self) -> String {
        let t = &self.trace;
        let mut s = format!(
            "method={} status={} iterations={} final_error={:.6e} grad_inf_norm={:.3e} total_s={:.6} mean_iter_s={:.3e} restarts={}",
            self.method,
            self.status.name(),
            t.iterations(),
            self.error,
            self.grad_inf_norm,
            t.total_seconds(),
            t.mean_iteration_seconds(usize::MAX),
            t.restarts,
        );
        for (label, pct) in t.phase_totals().percentages(self.method) {
            let _ = write!(s, " {label}={pct:.1}%");
        }
        s
    }
}

/// Fits `raw_points` (input coordinates) per `config`. Points are scaled
/// into the unit box first; errors are reported in unit-box units.
pub fn fit_points(config: &RunConfig, raw_points: &[Point2]) -> Result<RunReport> {
    let (points, transform) = normalize_points(raw_points)?;
    let problem = FitProblem::new(points, config.topology(), config.alpha, config.beta)?;
    let initial = match &config.initial_control_points {
        Some(path) => {
            let raw = read_points(path)?;
            let pts: Vec<Point2> = raw.iter().map(|&p| transform.apply(p)).collect();
            if pts.len() != config.n_ctrl {
                return Err(Error::InvalidConfig(format!(
                    "initial control point file has {} points, expected {}",
                    pts.len(),
                    config.n_ctrl
                )));
            }
            BSplineCurve::uniform(config.degree, config.closed, pts)?
        }
        None => default_initial_curve(&problem, config.n_ctrl)?,
    };
    let (unit_curve, trace, status, error, grad) = match config.method {
        Method::Lbfgs => {
            let out = fit_lbfgs(&problem, &initial, &config.fit_config())?;
            (out.curve, out.trace, RunStatus::from(out.status), out.error, out.grad_inf_norm)
        }
        m => {
            let out = run_alternating(m, &problem, &initial, &config.alternating_config())?;
            let error = out.trace.final_error();
            let grad = out.trace.final_grad_inf_norm().unwrap_or(f64::NAN);
            (out.curve, out.trace, RunStatus::from(out.status), error, grad)
        }
    };
    Ok(RunReport {
        method: config.method,
        status,
        curve: transform.invert_curve(&unit_curve)?,
        unit_curve,
        transform,
        trace,
        error,
        grad_inf_norm: grad,
    })
}

/// Reads inputs, fits, and writes every requested output.
pub fn run_and_trace(config: &RunConfig) -> Result<RunReport> {
    let input = config
        .input
        .as_ref()
        .ok_or_else(|| Error::InvalidConfig("no input point file given".into()))?;
    let raw = read_points(input)?;
    let report = fit_points(config, &raw)?;
    if let Some(path) = &config.trace_out {
        write_trace_csv(path, &report.trace)?;
    }
    if let Some(path) = &config.curve_out {
        write_curve(path, &report.curve)?;
    }
    if let Some(path) = &config.svg_out {
        fs::write(path, render_svg(&raw, Some(&report.curve), 800))?;
    }
    Ok(report)
}

// ---------------------------------------------------------------- sweeps

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ScalingAxis {
    DataPoints,
    ControlPoints,
}

impl ScalingAxis {
    pub fn name(self) -> &'static str {
        match self {
            ScalingAxis::DataPoints => "data_points",
            ScalingAxis::ControlPoints => "control_points",
        }
    }
}

impl FromStr for ScalingAxis {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "data_points" | "data-points" | "points" => Ok(ScalingAxis::DataPoints),
            "control_points" | "control-points" | "ctrl" => Ok(ScalingAxis::ControlPoints),
            other => Err(Error::InvalidConfig(format!("unknown scaling axis '{other}'"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct BenchConfig {
    /// Fit settings; `n_ctrl` is overridden on the control-point axis.
    pub run: RunConfig,
    pub shape: ShapeKind,
    pub noise_sigma: f64,
    pub seed: u64,
    /// Point count used on the control-point axis.
    pub n_points: usize,
    /// Iterations averaged per cell.
    pub iterations: usize,
    /// Each cell is timed this many times; the fastest run is kept.
    pub repeats: usize,
    pub methods: Vec<Method>,
}

impl Default for BenchConfig {
    fn default() -> Self {
        BenchConfig {
            run: RunConfig {
                max_iter: 50,
                ..RunConfig::default()
            },
            shape: ShapeKind::NoisyCircle,
            noise_sigma: 0.01,
            seed: 1,
            n_points: 200,
            iterations: 50,
            repeats: 3,
            methods: Method::ALL.to_vec(),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ScalingCell {
    pub level: usize,
    pub method: Method,
    /// Mean wall time per iteration over the first `iterations` iterations.
    pub mean_iter_seconds: f64,
    pub iterations: usize,
    pub final_error: f64,
    /// Set when the cell failed; the sweep continues.
    pub failure: Option<String>,
}

/// Runs every method at every level on data generated from one seed.
/// Cells run one after another so timings do not contend.
pub fn benchmark_scaling(axis: ScalingAxis, levels: &[usize], base: &BenchConfig) -> Result<Vec<ScalingCell>> {
    if levels.is_empty() {
        return Err(Error::InvalidConfig("at least one level is required".into()));
    }
    let mut cells = Vec::new();
    let fixed = match axis {
        ScalingAxis::ControlPoints => Some(generate_shape(&base.shape, base.n_points, base.noise_sigma, base.seed)?),
        ScalingAxis::DataPoints => None,
    };
    for &level in levels {
        let (points, n_ctrl) = match axis {
            ScalingAxis::DataPoints => (generate_shape(&base.shape, level, base.noise_sigma, base.seed)?, base.run.n_ctrl),
            ScalingAxis::ControlPoints => (fixed.clone().unwrap_or_default(), level),
        };
        for &method in &base.methods {
            let config = RunConfig {
                method,
                n_ctrl,
                max_iter: base.iterations,
                ..base.run.clone()
            };
            cells.push(time_cell(&config, &points, level, base));
        }
    }
    Ok(cells)
}

fn time_cell(config: &RunConfig, points: &[Point2], level: usize, base: &BenchConfig) -> ScalingCell {
    let mut best: Option<ScalingCell> = None;
    for _ in 0..base.repeats.max(1) {
        match fit_points(config, points) {
            Ok(report) => {
                let cell = ScalingCell {
                    level,
                    method: config.method,
                    mean_iter_seconds: report.trace.mean_iteration_seconds(base.iterations),
                    iterations: report.trace.iterations().min(base.iterations),
                    final_error: report.error,
                    failure: None,
                };
                if best.as_ref().is_none_or(|b| cell.mean_iter_seconds < b.mean_iter_seconds) {
                    best = Some(cell);
                }
            }
            Err(e) => {
                return ScalingCell {
                    level,
                    method: config.method,
                    mean_iter_seconds: f64::NAN,
                    iterations: 0,
                    final_error: f64::NAN,
                    failure: Some(e.to_string()),
                }
            }
        }
    }
    best.expect("at least one repeat")
}

pub fn format_scaling_csv(axis: ScalingAxis, cells: &[ScalingCell]) -> String {
    let mut s = format!("# splinefit scaling {TRACE_VERSION} axis={}\n", axis.name());
    s.push_str("level,method,mean_iter_s,iterations,final_error,failure\n");
    for c in cells {
        let _ = writeln!(
            s,
            "{},{},{:.9e},{},{:.16e},{}",
            c.level,
            c.method,
            c.mean_iter_seconds,
            c.iterations,
            c.final_error,
            c.failure.as_deref().unwrap_or("").replace(',', ";")
        );
    }
    s
}

/// Least-squares line `y = a + b x` and its coefficient of determination.
pub fn linear_fit_r2(xs: &[f64], ys: &[f64]) -> (f64, f64, f64) {
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxx: f64 = xs.iter().map(|x| (x - mx) * (x - mx)).sum();
    let sxy: f64 = xs.iter().zip(ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let syy: f64 = ys.iter().map(|y| (y - my) * (y - my)).sum();
    let b = if sxx > 0.0 { sxy / sxx } else { 0.0 };
    let a = my - b * mx;
    let r2 = if syy > 0.0 { (sxy * sxy) / (sxx * syy) } else { 1.0 };
    (a, b, r2)
}
