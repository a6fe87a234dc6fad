//! Per-iteration records shared by every fitting method.

use std::fmt;
use std::str::FromStr;

use crate::error::Error;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Method {
    Lbfgs,
    Pdm,
    Tdmlm,
    Sdm,
}

impl Method {
    pub const ALL: [Method; 4] = [Method::Lbfgs, Method::Pdm, Method::Tdmlm, Method::Sdm];

    pub fn name(self) -> &'static str {
        match self {
            Method::Lbfgs => "lbfgs",
            Method::Pdm => "pdm",
            Method::Tdmlm => "tdmlm",
            Method::Sdm => "sdm",
        }
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Method {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "lbfgs" | "l-bfgs" => Ok(Method::Lbfgs),
            "pdm" => Ok(Method::Pdm),
            "tdmlm" => Ok(Method::Tdmlm),
            "sdm" => Ok(Method::Sdm),
            other => Err(Error::InvalidConfig(format!("unknown method '{other}'"))),
        }
    }
}

/// Seconds spent in each phase of one iteration. Alternating methods use
/// the first three, L-BFGS the last two.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct PhaseTimings {
    pub matrix_filling: f64,
    pub matrix_solving: f64,
    pub footpoint_projection: f64,
    pub direction: f64,
    pub linesearch: f64,
}

impl PhaseTimings {
    pub fn total(&self) -> f64 {
        self.matrix_filling + self.matrix_solving + self.footpoint_projection + self.direction + self.linesearch
    }

    pub fn accumulate(&mut self, other: &PhaseTimings) {
        self.matrix_filling += other.matrix_filling;
        self.matrix_solving += other.matrix_solving;
        self.footpoint_projection += other.footpoint_projection;
        self.direction += other.direction;
        self.linesearch += other.linesearch;
    }

    /// `(label, share in percent)` for the phases relevant to `method`.
    pub fn percentages(&self, method: Method) -> Vec<(&'static str, f64)> {
        let parts: Vec<(&'static str, f64)> = match method {
            Method::Lbfgs => vec![("direction", self.direction), ("linesearch", self.linesearch)],
            _ => vec![
                ("matrix_filling", self.matrix_filling),
                ("matrix_solving", self.matrix_solving),
                ("footpoint_projection", self.footpoint_projection),
            ],
        };
        let total: f64 = parts.iter().map(|p| p.1).sum();
        parts
            .into_iter()
            .map(|(k, v)| (k, if total > 0.0 { 100.0 * v / total } else { 0.0 }))
            .collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TraceRecord {
    pub iteration: usize,
    /// Cumulative solver time since the start of the fit, including setup.
    pub elapsed: f64,
    /// Wall time of this iteration alone.
    pub duration: f64,
    /// RMS fitting error after this iteration.
    pub error: f64,
    /// Infinity norm of the joint objective gradient after this iteration.
    pub grad_inf_norm: f64,
    pub phases: PhaseTimings,
}

/// Boundary of one L-BFGS run inside a fit with foot-point correction.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RunSummary {
    pub iterations: usize,
    /// Error at convergence, with the optimized parameters.
    pub error: f64,
    /// Error at the same control points after recomputing foot points.
    pub corrected_error: f64,
    pub restarted: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct FitTrace {
    pub method: Method,
    pub records: Vec<TraceRecord>,
    /// Error of the initial curve at its projected foot points.
    pub initial_error: f64,
    /// Time outside iterations: initial projection and foot-point correction.
    pub setup_seconds: f64,
    pub restarts: usize,
    pub footpoint_initializations: usize,
    pub runs: Vec<RunSummary>,
    clock: f64,
}

impl FitTrace {
    pub fn new(method: Method) -> Self {
        FitTrace {
            method,
            records: Vec::new(),
            initial_error: f64::NAN,
            setup_seconds: 0.0,
            restarts: 0,
            footpoint_initializations: 0,
            runs: Vec::new(),
            clock: 0.0,
        }
    }

    pub fn iterations(&self) -> usize {
        self.records.len()
    }

    pub fn final_error(&self) -> f64 {
        self.records.last().map_or(self.initial_error, |r| r.error)
    }

    pub fn best_error(&self) -> f64 {
        self.records.iter().map(|r| r.error).fold(self.initial_error, f64::min)
    }

    pub fn final_grad_inf_norm(&self) -> Option<f64> {
        self.records.last().map(|r| r.grad_inf_norm)
    }

    /// Total solver time: setup, corrections and all iterations.
    pub fn total_seconds(&self) -> f64 {
        self.clock
    }

    /// Mean iteration time over the first `limit` iterations.
    pub fn mean_iteration_seconds(&self, limit: usize) -> f64 {
        let n = self.records.len().min(limit);
        if n == 0 {
            return 0.0;
        }
        self.records[..n].iter().map(|r| r.duration).sum::<f64>() / n as f64
    }

    pub fn phase_totals(&self) -> PhaseTimings {
        let mut acc = PhaseTimings::default();
        for r in &self.records {
            acc.accumulate(&r.phases);
        }
        acc
    }

    /// Time spent outside iterations (initial projection, foot-point
    /// correction).
    pub(crate) fn add_setup(&mut self, seconds: f64) {
        self.setup_seconds += seconds;
        self.clock += seconds;
    }

    pub(crate) fn push(&mut self, mut record: TraceRecord) {
        let prev = self.records.last().map_or(0.0, |r| r.elapsed);
        record.iteration = self.records.len() + 1;
        // keep elapsed strictly increasing even when the clock does not tick
        self.clock = (self.clock + record.duration).max(next_after(prev));
        record.elapsed = self.clock;
        self.records.push(record);
    }
}

fn next_after(x: f64) -> f64 {
    if x == 0.0 {
        f64::MIN_POSITIVE
    } else {
        f64::from_bits(x.to_bits() + 1)
    }
}
