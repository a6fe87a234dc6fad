//! Point-to-curve projection: dense sampling for seeds, then the
//! Gauss–Newton parameter update `dt = (X - P(t)) . P'(t) / |P'(t)|^2`
//! under step halving that never increases the distance.

use crate::error::{Error, Result};
use crate::geometry::BSplineCurve;
use crate::point::Point2;

/// Orthogonality tolerance `|(X - P(t)) . P'(t)|`.
pub const ORTHOGONALITY_TOL: f64 = 1e-10;
pub const MAX_REFINE_ITERATIONS: usize = 100;
const MAX_HALVINGS: usize = 30;
const DEGENERATE_TANGENT: f64 = 1e-14;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ProjectionStatus {
    /// Orthogonality residual below tolerance.
    Converged,
    /// Open curve: the closest point is an endpoint.
    Boundary,
    /// No step along the update direction reduced the distance.
    Stalled,
    MaxIterations,
    /// Tangent vanished; golden-section search was used instead.
    DegenerateTangent,
}

impl ProjectionStatus {
    /// Statuses that do not certify a local foot point.
    pub fn is_warning(self) -> bool {
        matches!(
            self,
            ProjectionStatus::Stalled | ProjectionStatus::MaxIterations | ProjectionStatus::DegenerateTangent
        )
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Projection {
    pub t: f64,
    pub point: Point2,
    pub distance: f64,
    /// `(X - P(t)) . P'(t)` at the returned parameter.
    pub residual: f64,
    pub status: ProjectionStatus,
    pub iterations: usize,
}

/// Result of projecting a whole point set.
#[derive(Debug, Clone, PartialEq)]
pub struct ProjectionSet {
    pub params: Vec<f64>,
    pub distances: Vec<f64>,
    pub statuses: Vec<ProjectionStatus>,
}

impl ProjectionSet {
    fn with_capacity(n: usize) -> Self {
        ProjectionSet {
            params: Vec::with_capacity(n),
            distances: Vec::with_capacity(n),
            statuses: Vec::with_capacity(n),
        }
    }

    fn push(&mut self, p: Projection) {
        self.params.push(p.t);
        self.distances.push(p.distance);
        self.statuses.push(p.status);
    }

    /// Number of projections that carry a warning.
    pub fn warnings(&self) -> usize {
        self.statuses.iter().filter(|s| s.is_warning()).count()
    }

    /// RMS of the point-to-foot-point distances.
    pub fn rms_error(&self) -> f64 {
        let s: f64 = self.distances.iter().map(|d| d * d).sum();
        (s / self.distances.len() as f64).sqrt()
    }
}

/// Dense parameter samples of a curve, used to seed refinement.
#[derive(Debug, Clone)]
pub struct DenseSamples {
    params: Vec<f64>,
    points: Vec<Point2>,
}

impl DenseSamples {
    pub fn new(curve: &BSplineCurve, samples_per_span: usize) -> Self {
        let basis = curve.basis();
        let knots = basis.knots();
        let (first, last) = basis.span_range();
        let mut params = Vec::with_capacity(basis.num_spans() * samples_per_span + 1);
        for span in first..=last {
            let (a, b) = (knots[span], knots[span + 1]);
            for j in 0..samples_per_span {
                params.push(a + (b - a) * j as f64 / samples_per_span as f64);
            }
        }
        if !curve.is_closed() {
            params.push(1.0);
        }
        let points = params.iter().map(|&t| curve.evaluate(t)).collect();
        DenseSamples { params, points }
    }

    pub fn len(&self) -> usize {
        self.params.len()
    }

    pub fn is_empty(&self) -> bool {
        self.params.is_empty()
    }

    /// Parameter of the closest sample; ties go to the lowest index.
    pub fn closest(&self, x: Point2) -> f64 {
        let mut best = f64::INFINITY;
        let mut best_i = 0;
        for (i, p) in self.points.iter().enumerate() {
            let d = (*p - x).norm_squared();
            if d < best {
                best = d;
                best_i = i;
            }
        }
        self.params[best_i]
    }
}

/// Projects every point: closest dense sample, then [`refine_footpoint`].
pub fn project_all(curve: &BSplineCurve, points: &[Point2], samples_per_span: usize) -> Result<ProjectionSet> {
    if samples_per_span < 2 {
        return Err(Error::InvalidConfig(format!(
            "samples_per_span must be >= 2, got {samples_per_span}"
        )));
    }
    let samples = DenseSamples::new(curve, samples_per_span);
    let mut out = ProjectionSet::with_capacity(points.len());
    for &x in points {
        out.push(refine_footpoint(curve, x, samples.closest(x)));
    }
    Ok(out)
}

/// Refines every point from its own seed parameter.
pub fn refine_all(curve: &BSplineCurve, points: &[Point2], seeds: &[f64]) -> ProjectionSet {
    let mut out = ProjectionSet::with_capacity(points.len());
    for (&x, &t0) in points.iter().zip(seeds) {
        out.push(refine_footpoint(curve, x, t0));
    }
    out
}

/// Gauss–Newton refinement of a single foot point from seed `t0`.
///
/// The update direction is `dt = (X - P) . P' / |P'|^2`. The step along it
/// first tries the Newton length `|P'|^2 / (|P'|^2 - (X - P) . P'')` when
/// that is positive, then `1, 1/2, 1/4, ...`. A trial is accepted when it
/// reduces the distance, or when the distance is unchanged to rounding and
/// the orthogonality residual improves (near a foot point the squared
/// distance is flat to working precision before the residual reaches
/// tolerance).
pub fn refine_footpoint(curve: &BSplineCurve, x: Point2, t0: f64) -> Projection {
    let basis = curve.basis();
    let mut t = basis.normalize_param(t0);
    let mut cur = Sample::at(curve, x, t);
    let finish = |t: f64, s: &Sample, status, iterations| Projection {
        t,
        point: s.p,
        distance: s.d2.sqrt(),
        residual: s.residual,
        status,
        iterations,
    };
    for it in 0..MAX_REFINE_ITERATIONS {
        if cur.residual.abs() < ORTHOGONALITY_TOL {
            return finish(t, &cur, ProjectionStatus::Converged, it);
        }
        let speed2 = cur.dp.norm_squared();
        if speed2.sqrt() < DEGENERATE_TANGENT {
            let (tg, _) = golden_section(curve, x, t);
            let s = Sample::at(curve, x, tg);
            return finish(tg, &s, ProjectionStatus::DegenerateTangent, it);
        }
        let dt = cur.residual / speed2;
        let curvature_term = speed2 - (x - cur.p).dot(cur.ddp);
        let newton = if curvature_term > 0.0 { speed2 / curvature_term } else { 1.0 };
        let lengths = std::iter::once(newton).chain((0..=MAX_HALVINGS).map(|h| 0.5f64.powi(h as i32)));
        let mut moved = false;
        let mut last_tried = f64::NAN;
        for a in lengths {
            let tn = basis.normalize_param(t + a * dt);
            if tn == t {
                break;
            }
            if tn == last_tried {
                continue;
            }
            last_tried = tn;
            let next = Sample::at(curve, x, tn);
            let flat = next.d2 <= cur.d2 + cur.noise;
            if next.d2 < cur.d2 || (flat && next.residual.abs() < cur.residual.abs()) {
                t = tn;
                cur = next;
                moved = true;
                break;
            }
        }
        if !moved {
            let outward = !curve.is_closed() && ((t <= 0.0 && dt < 0.0) || (t >= 1.0 && dt > 0.0));
            let status = if outward {
                ProjectionStatus::Boundary
            } else {
                ProjectionStatus::Stalled
            };
            return finish(t, &cur, status, it);
        }
    }
    let status = if cur.residual.abs() < ORTHOGONALITY_TOL {
        ProjectionStatus::Converged
    } else {
        ProjectionStatus::MaxIterations
    };
    finish(t, &cur, status, MAX_REFINE_ITERATIONS)
}

/// Curve data at one trial parameter.
struct Sample {
    p: Point2,
    dp: Point2,
    ddp: Point2,
    d2: f64,
    residual: f64,
    /// Rounding level of `d2`.
    noise: f64,
}

impl Sample {
    fn at(curve: &BSplineCurve, x: Point2, t: f64) -> Self {
        let (p, dp, ddp) = match curve.evaluate_jet(t) {
            Ok(j) => (j.point, j.d1, j.d2),
            Err(_) => {
                let (p, dp) = curve.evaluate_d1(t);
                (p, dp, Point2::ZERO)
            }
        };
        let r = x - p;
        let d2 = r.norm_squared();
        let scale = x.norm() + p.norm();
        Sample {
            p,
            dp,
            ddp,
            d2,
            residual: r.dot(dp),
            noise: 8.0 * f64::EPSILON * (d2 + d2.sqrt() * scale),
        }
    }
}

/// Distance minimization over the knot span containing `t`.
fn golden_section(curve: &BSplineCurve, x: Point2, t: f64) -> (f64, Point2) {
    let basis = curve.basis();
    let span = basis.find_span(basis.normalize_param(t));
    let knots = basis.knots();
    let (mut a, mut b) = (knots[span], knots[span + 1]);
    let ratio = 0.5 * (5f64.sqrt() - 1.0);
    let dist = |u: f64| (curve.evaluate(u) - x).norm_squared();
    let mut c = b - ratio * (b - a);
    let mut d = a + ratio * (b - a);
    let (mut fc, mut fd) = (dist(c), dist(d));
    for _ in 0..80 {
        if fc <= fd {
            b = d;
            d = c;
            fd = fc;
            c = b - ratio * (b - a);
            fc = dist(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + ratio * (b - a);
            fd = dist(d);
        }
    }
    let tm = basis.normalize_param(0.5 * (a + b));
    (tm, curve.evaluate(tm))
}

/// Local frame at a foot point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FootpointFrame {
    pub t: f64,
    pub point: Point2,
    /// Unit tangent.
    pub tangent: Point2,
    /// Unit normal pointing toward the center of curvature (left normal
    /// when the curvature vanishes).
    pub normal: Point2,
    /// Radius of curvature; `f64::INFINITY` on straight pieces.
    pub curvature_radius: f64,
    /// `|X - P(t)|`, positive when `X` lies on the same side as the center
    /// of curvature and negative on the convex side.
    pub signed_distance: f64,
}

/// Tangent, normal, curvature radius and signed distance at `t`.
pub fn frame_at(curve: &BSplineCurve, t: f64, x: Point2) -> Result<FootpointFrame> {
    let jet = curve.evaluate_jet(t)?;
    let speed = jet.d1.norm();
    if speed < DEGENERATE_TANGENT {
        return Err(Error::DegenerateData("vanishing tangent"));
    }
    let tangent = jet.d1 * (1.0 / speed);
    let cross = jet.d1.cross(jet.d2);
    let left = tangent.perp();
    let (normal, curvature_radius) = if cross.abs() < DEGENERATE_TANGENT {
        (left, f64::INFINITY)
    } else {
        let n = if cross > 0.0 { left } else { -left };
        (n, speed.powi(3) / cross.abs())
    };
    let offset = x - jet.point;
    let dist = offset.norm();
    let signed_distance = if offset.dot(normal) < 0.0 { -dist } else { dist };
    Ok(FootpointFrame {
        t: curve.basis().normalize_param(t),
        point: jet.point,
        tangent,
        normal,
        curvature_radius,
        signed_distance,
    })
}

/// Whether foot points should be re-seeded from dense samples, given the
/// fitting errors of consecutive iterations.
pub fn should_reinitialize(e_prev: f64, e_curr: f64) -> bool {
    if e_curr <= 0.0 {
        return false;
    }
    (e_curr - e_prev).abs() / e_curr > 0.2
}
