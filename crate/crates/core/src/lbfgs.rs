//! Limited-memory BFGS with a weak-Wolfe line search.
//!
//! The minimizer works on any callable that fills a gradient buffer and
//! returns the objective value. The inverse-Hessian approximation is never
//! formed; [`LbfgsHistory::apply`] evaluates its action with the two-loop
//! recursion, using `H0 = gamma * I` with `gamma = s'y / y'y` of the newest
//! pair (and `H0 = I` while the history is empty).

use std::collections::VecDeque;
use std::time::Instant;

use crate::error::{Error, Result};

/// Something that can be minimized: writes the gradient at `x` into `grad`
/// and returns the value.
pub trait Objective {
    fn evaluate(&mut self, x: &[f64], grad: &mut [f64]) -> f64;
}

impl<F> Objective for F
where
    F: FnMut(&[f64], &mut [f64]) -> f64,
{
    fn evaluate(&mut self, x: &[f64], grad: &mut [f64]) -> f64 {
        self(x, grad)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LbfgsConfig {
    /// History size.
    pub m: usize,
    /// Sufficient-decrease constant.
    pub c1: f64,
    /// Curvature constant.
    pub c2: f64,
    /// Stop once `max |g_i| < grad_tol`.
    pub grad_tol: f64,
    pub max_iterations: usize,
    pub max_linesearch_steps: usize,
}

impl Default for LbfgsConfig {
    fn default() -> Self {
        LbfgsConfig {
            m: 20,
            c1: 1e-4,
            c2: 0.9,
            grad_tol: 1e-8,
            max_iterations: 100_000,
            max_linesearch_steps: 40,
        }
    }
}

impl LbfgsConfig {
    pub fn validate(&self) -> Result<()> {
        if !(0.0 < self.c1 && self.c1 < self.c2 && self.c2 < 1.0) {
            return Err(Error::InvalidConfig(format!(
                "need 0 < c1 < c2 < 1, got c1={} c2={}",
                self.c1, self.c2
            )));
        }
        if self.m == 0 {
            return Err(Error::InvalidConfig("history size m must be >= 1".into()));
        }
        if !(self.grad_tol > 0.0) {
            return Err(Error::InvalidConfig("grad_tol must be > 0".into()));
        }
        if self.max_linesearch_steps == 0 {
            return Err(Error::InvalidConfig("max_linesearch_steps must be >= 1".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone)]
struct CurvaturePair {
    s: Vec<f64>,
    y: Vec<f64>,
    rho: f64,
}

/// Ring buffer of the most recent `(s, y, rho)` pairs.
#[derive(Debug, Clone)]
pub struct LbfgsHistory {
    capacity: usize,
    pairs: VecDeque<CurvaturePair>,
    gamma: f64,
    alphas: Vec<f64>,
}

impl LbfgsHistory {
    pub fn new(capacity: usize) -> Self {
        assert!(capacity >= 1, "history capacity must be >= 1");
        LbfgsHistory {
            capacity,
            pairs: VecDeque::with_capacity(capacity),
            gamma: 1.0,
            alphas: vec![0.0; capacity],
        }
    }

    pub fn capacity(&self) -> usize {
        self.capacity
    }

    pub fn len(&self) -> usize {
        self.pairs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pairs.is_empty()
    }

    /// Initial-matrix scale; 1 while empty.
    pub fn gamma(&self) -> f64 {
        self.gamma
    }

    pub fn clear(&mut self) {
        self.pairs.clear();
        self.gamma = 1.0;
    }

    /// Stored pairs, oldest first.
    pub fn pairs(&self) -> impl Iterator<Item = (&[f64], &[f64], f64)> {
        self.pairs.iter().map(|p| (p.s.as_slice(), p.y.as_slice(), p.rho))
    }

    /// Stores a pair unless it violates the curvature condition
    /// `y's > 1e-14 |y| |s|`. Returns whether it was stored.
    pub fn push(&mut self, s: &[f64], y: &[f64]) -> bool {
        debug_assert_eq!(s.len(), y.len());
        let sy = dot(s, y);
        let yy = dot(y, y);
        let ss = dot(s, s);
        if !(sy > 1e-14 * (yy * ss).sqrt()) || !sy.is_finite() {
            return false;
        }
        let mut pair = if self.pairs.len() == self.capacity {
            self.pairs.pop_front().expect("full history")
        } else {
            CurvaturePair {
                s: Vec::with_capacity(s.len()),
                y: Vec::with_capacity(y.len()),
                rho: 0.0,
            }
        };
        pair.s.clear();
        pair.s.extend_from_slice(s);
        pair.y.clear();
        pair.y.extend_from_slice(y);
        pair.rho = 1.0 / sy;
        self.pairs.push_back(pair);
        self.gamma = sy / yy;
        true
    }

    /// Overwrites `q` with `H q` by the two-loop recursion.
    pub fn apply(&mut self, q: &mut [f64]) {
        let k = self.pairs.len();
        for (i, pair) in self.pairs.iter().enumerate().rev() {
            let a = pair.rho * dot(&pair.s, q);
            self.alphas[i] = a;
            axpy(-a, &pair.y, q);
        }
        if k > 0 {
            let g = self.gamma;
            q.iter_mut().for_each(|v| *v *= g);
        }
        for (i, pair) in self.pairs.iter().enumerate() {
            let b = pair.rho * dot(&pair.y, q);
            axpy(self.alphas[i] - b, &pair.s, q);
        }
    }
}

/// `z = H grad` for the given history. The search direction is `-z`.
pub fn two_loop_direction(history: &mut LbfgsHistory, grad: &[f64]) -> Vec<f64> {
    let mut z = grad.to_vec();
    history.apply(&mut z);
    z
}

#[inline]
pub(crate) fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

#[inline]
fn axpy(a: f64, x: &[f64], y: &mut [f64]) {
    for (yi, xi) in y.iter_mut().zip(x) {
        *yi += a * xi;
    }
}

#[inline]
pub(crate) fn inf_norm(v: &[f64]) -> f64 {
    v.iter().fold(0.0f64, |m, x| m.max(x.abs()))
}

/// Accepted line-search step.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LineSearchStep {
    pub step: f64,
    pub value: f64,
    pub evaluations: usize,
    /// Wall time of the first trial evaluation (`step = 1`).
    pub first_eval_seconds: f64,
}

/// Line-search outcome when no Wolfe step was found within the budget.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LineSearchFailure {
    /// Best sufficient-decrease step seen, if any.
    pub best_step: Option<f64>,
    pub best_value: f64,
    pub evaluations: usize,
}

/// Finds a step satisfying the weak Wolfe conditions along `dir`, starting
/// from `step = 1`: backtracking (safeguarded quadratic interpolation) until
/// sufficient decrease holds, then bisection on a bracket until the
/// curvature condition holds.
///
/// On success `x_new`/`g_new` hold the accepted point and its gradient.
#[allow(clippy::too_many_arguments)]
pub fn wolfe_line_search<O: Objective + ?Sized>(
    f: &mut O,
    x: &[f64],
    dir: &[f64],
    f0: f64,
    g0: &[f64],
    config: &LbfgsConfig,
    x_new: &mut [f64],
    g_new: &mut [f64],
) -> Result<std::result::Result<LineSearchStep, LineSearchFailure>> {
    let d0 = dot(g0, dir);
    if !(d0 < 0.0) {
        return Err(Error::NotDescentDirection(d0));
    }
    let mut lo = 0.0f64;
    let mut hi = f64::INFINITY;
    let mut step = 1.0f64;
    let mut best: Option<(f64, f64)> = None;
    let mut first_eval_seconds = 0.0;
    for evals in 1..=config.max_linesearch_steps {
        for ((xn, xi), di) in x_new.iter_mut().zip(x).zip(dir) {
            *xn = xi + step * di;
        }
        let start = Instant::now();
        let value = f.evaluate(x_new, g_new);
        if evals == 1 {
            first_eval_seconds = start.elapsed().as_secs_f64();
        }
        if !value.is_finite() || value > f0 + config.c1 * step * d0 {
            hi = step;
            step = if lo == 0.0 && value.is_finite() {
                // minimizer of the quadratic through f0, d0 and f(step)
                let q = -d0 * step * step / (2.0 * (value - f0 - d0 * step));
                q.clamp(0.1 * step, 0.5 * step)
            } else {
                0.5 * (lo + hi)
            };
            continue;
        }
        if best.is_none_or(|(_, v)| value < v) {
            best = Some((step, value));
        }
        if dot(g_new, dir) < config.c2 * d0 {
            lo = step;
            step = if hi.is_finite() { 0.5 * (lo + hi) } else { 2.0 * step };
            continue;
        }
        return Ok(Ok(LineSearchStep {
            step,
            value,
            evaluations: evals,
            first_eval_seconds,
        }));
    }
    Ok(Err(LineSearchFailure {
        best_step: best.map(|b| b.0),
        best_value: best.map_or(f0, |b| b.1),
        evaluations: config.max_linesearch_steps,
    }))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LbfgsStatus {
    Converged,
    MaxIterations,
    LineSearchFailed,
    /// Non-finite value or gradient.
    InvalidState,
}

/// One accepted iteration.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LbfgsIteration {
    pub iteration: usize,
    pub value: f64,
    pub grad_inf_norm: f64,
    pub step: f64,
    pub evaluations: usize,
    /// Two-loop recursion, history update and the gradient evaluation at the
    /// accepted point that feeds the next direction.
    pub direction_seconds: f64,
    /// Remaining line-search work: extra trial evaluations and Wolfe tests.
    pub linesearch_seconds: f64,
}

#[derive(Debug, Clone)]
pub struct LbfgsResult {
    pub x: Vec<f64>,
    pub value: f64,
    pub grad: Vec<f64>,
    pub status: LbfgsStatus,
    pub iterations: Vec<LbfgsIteration>,
    pub history_resets: usize,
}

impl LbfgsResult {
    pub fn grad_inf_norm(&self) -> f64 {
        inf_norm(&self.grad)
    }
}

/// Minimizes `f` from `x0`.
pub fn minimize<O: Objective + ?Sized>(f: &mut O, x0: &[f64], config: &LbfgsConfig) -> Result<LbfgsResult> {
    minimize_with(f, x0, config, |_, _| {})
}

/// Like [`minimize`], calling `observe(record, x)` after every accepted step.
pub fn minimize_with<O, C>(f: &mut O, x0: &[f64], config: &LbfgsConfig, mut observe: C) -> Result<LbfgsResult>
where
    O: Objective + ?Sized,
    C: FnMut(&LbfgsIteration, &[f64]),
{
    config.validate()?;
    let dim = x0.len();
    let mut x = x0.to_vec();
    let mut g = vec![0.0; dim];
    let mut value = f.evaluate(&x, &mut g);
    if !value.is_finite() || g.iter().any(|v| !v.is_finite()) {
        return Err(Error::NonFinite("objective at starting point"));
    }
    let mut history = LbfgsHistory::new(config.m);
    let mut dir = vec![0.0; dim];
    let mut x_new = vec![0.0; dim];
    let mut g_new = vec![0.0; dim];
    let mut s = vec![0.0; dim];
    let mut y = vec![0.0; dim];
    let mut iterations = Vec::new();
    let mut resets = 0;
    let mut status = LbfgsStatus::MaxIterations;
    let mut pending_direction = 0.0;

    if inf_norm(&g) < config.grad_tol {
        status = LbfgsStatus::Converged;
    } else {
        let mut k = 0;
        while k < config.max_iterations {
            let t_dir = Instant::now();
            dir.copy_from_slice(&g);
            history.apply(&mut dir);
            dir.iter_mut().for_each(|d| *d = -*d);
            if !(dot(&dir, &g) < 0.0) {
                // lost positive definiteness numerically
                history.clear();
                dir.iter_mut().zip(&g).for_each(|(d, gi)| *d = -gi);
            }
            let dir_secs = t_dir.elapsed().as_secs_f64() + pending_direction;

            let t_ls = Instant::now();
            let outcome = wolfe_line_search(f, &x, &dir, value, &g, config, &mut x_new, &mut g_new)?;
            let ls_total = t_ls.elapsed().as_secs_f64();
            let accepted = match outcome {
                Ok(step) => step,
                Err(failure) => {
                    if !history.is_empty() {
                        history.clear();
                        resets += 1;
                        pending_direction = 0.0;
                        continue;
                    }
                    if let Some(best) = failure.best_step {
                        if failure.best_value < value {
                            for ((xi, di), xn) in x.iter_mut().zip(&dir).zip(x_new.iter_mut()) {
                                *xi += best * di;
                                *xn = *xi;
                            }
                            value = f.evaluate(&x_new, &mut g);
                        }
                    }
                    status = LbfgsStatus::LineSearchFailed;
                    break;
                }
            };
            if g_new.iter().any(|v| !v.is_finite()) {
                status = LbfgsStatus::InvalidState;
                break;
            }

            let t_upd = Instant::now();
            for i in 0..dim {
                s[i] = x_new[i] - x[i];
                y[i] = g_new[i] - g[i];
            }
            history.push(&s, &y);
            std::mem::swap(&mut x, &mut x_new);
            std::mem::swap(&mut g, &mut g_new);
            value = accepted.value;
            let grad_inf = inf_norm(&g);
            let upd_secs = t_upd.elapsed().as_secs_f64();
            k += 1;

            let record = LbfgsIteration {
                iteration: k,
                value,
                grad_inf_norm: grad_inf,
                step: accepted.step,
                evaluations: accepted.evaluations,
                direction_seconds: dir_secs + upd_secs + accepted.first_eval_seconds,
                linesearch_seconds: (ls_total - accepted.first_eval_seconds).max(0.0),
            };
            pending_direction = 0.0;
            iterations.push(record);
            observe(&record, &x);
            if grad_inf < config.grad_tol {
                status = LbfgsStatus::Converged;
                break;
            }
        }
    }
    Ok(LbfgsResult {
        x,
        value,
        grad: g,
        status,
        iterations,
        history_resets: resets,
    })
}
