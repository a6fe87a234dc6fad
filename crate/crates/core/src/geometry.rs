//! Uniform B-spline curves in the plane.
//!
//! Knots are fixed and uniformly spaced over the parameter domain `[0, 1]`.
//! Open curves use a clamped knot vector; closed curves use an extended
//! uniform knot vector with control-point indices taken modulo `n`, so the
//! number of free control points equals `n` and `P(0) == P(1)` holds by
//! construction.

use crate::error::{Error, Result};
use crate::point::Point2;

/// Highest supported degree. Basis values live in fixed-size arrays.
pub const MAX_DEGREE: usize = 7;
const MAX_ORDER: usize = MAX_DEGREE + 1;

/// Knot structure of a uniform B-spline: everything except the control points.
#[derive(Debug, Clone, PartialEq)]
pub struct BSplineBasis {
    degree: usize,
    n: usize,
    closed: bool,
    knots: Vec<f64>,
}

/// Cox–de Boor output for one parameter: the `p + 1` active basis functions
/// and their first two derivatives.
#[derive(Debug, Clone, Copy)]
pub struct SpanEvaluation {
    pub span: usize,
    order: usize,
    pub basis: [f64; MAX_ORDER],
    pub basis_d1: [f64; MAX_ORDER],
    pub basis_d2: [f64; MAX_ORDER],
}

impl SpanEvaluation {
    /// Number of active basis functions (`degree + 1`).
    #[inline]
    pub fn order(&self) -> usize {
        self.order
    }

    #[inline]
    pub fn basis(&self) -> &[f64] {
        &self.basis[..self.order]
    }

    #[inline]
    pub fn basis_d1(&self) -> &[f64] {
        &self.basis_d1[..self.order]
    }

    #[inline]
    pub fn basis_d2(&self) -> &[f64] {
        &self.basis_d2[..self.order]
    }
}

impl BSplineBasis {
    /// Builds the uniform knot vector for `n` control points of degree `degree`.
    pub fn uniform(n: usize, degree: usize, closed: bool) -> Result<Self> {
        if degree == 0 || degree > MAX_DEGREE {
            return Err(Error::UnsupportedDegree {
                degree,
                max: MAX_DEGREE,
            });
        }
        if n < degree + 1 {
            return Err(Error::TooFewControlPoints { n, degree });
        }
        let knots = if closed {
            // u_i = (i - p) / n, so knots[p] = 0 and knots[p + n] = 1.
            (0..=n + 2 * degree)
                .map(|i| (i as f64 - degree as f64) / n as f64)
                .collect()
        } else {
            let interior = n - degree;
            let mut knots = Vec::with_capacity(n + degree + 1);
            knots.extend(std::iter::repeat_n(0.0, degree + 1));
            knots.extend((1..interior).map(|i| i as f64 / interior as f64));
            knots.extend(std::iter::repeat_n(1.0, degree + 1));
            knots
        };
        Ok(BSplineBasis {
            degree,
            n,
            closed,
            knots,
        })
    }

    #[inline]
    pub fn degree(&self) -> usize {
        self.degree
    }

    /// Number of control points.
    #[inline]
    pub fn len(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    #[inline]
    pub fn is_closed(&self) -> bool {
        self.closed
    }

    /// Full knot vector. For closed curves this is the extended periodic
    /// vector; the parameter domain is `knots[p]..=knots[p + n]`.
    pub fn knots(&self) -> &[f64] {
        &self.knots
    }

    /// Indices of the first and last non-degenerate knot spans.
    #[inline]
    pub fn span_range(&self) -> (usize, usize) {
        if self.closed {
            (self.degree, self.degree + self.n - 1)
        } else {
            (self.degree, self.n - 1)
        }
    }

    /// Number of non-degenerate spans in `[0, 1]`.
    #[inline]
    pub fn num_spans(&self) -> usize {
        let (a, b) = self.span_range();
        b - a + 1
    }

    /// Maps an arbitrary finite parameter into the domain: wrapped into
    /// `[0, 1)` for closed curves, clamped to `[0, 1]` for open ones.
    #[inline]
    pub fn normalize_param(&self, t: f64) -> f64 {
        if self.closed {
            let u = t - t.floor();
            if u >= 1.0 {
                0.0
            } else {
                u
            }
        } else {
            t.clamp(0.0, 1.0)
        }
    }

    /// Knot span containing `t` (already normalized), by binary search.
    #[inline]
    pub fn find_span(&self, t: f64) -> usize {
        let (first, last) = self.span_range();
        // largest s in [first, last] with knots[s] <= t
        let count = self.knots[first + 1..=last].partition_point(|&k| k <= t);
        first + count
    }

    /// Control-point index of the `j`-th active basis function on `span`.
    #[inline]
    pub fn control_index(&self, span: usize, j: usize) -> usize {
        let i = span - self.degree + j;
        if self.closed {
            i % self.n
        } else {
            i
        }
    }

    /// Evaluates the active basis functions at `t` with derivatives up to
    /// `derivs` (0, 1 or 2). Derivatives above the degree are zero; entries
    /// beyond the requested order are left at zero.
    pub fn evaluate_span(&self, t: f64, derivs: usize) -> SpanEvaluation {
        let t = self.normalize_param(t);
        let span = self.find_span(t);
        let mut out = SpanEvaluation {
            span,
            order: self.degree + 1,
            basis: [0.0; MAX_ORDER],
            basis_d1: [0.0; MAX_ORDER],
            basis_d2: [0.0; MAX_ORDER],
        };
        ders_basis_funs(&self.knots, span, t, self.degree, derivs.min(2), &mut out);
        out
    }
}

/// Triangular Cox–de Boor recursion with derivatives (Piegl & Tiller A2.3).
fn ders_basis_funs(
    knots: &[f64],
    span: usize,
    t: f64,
    p: usize,
    nders: usize,
    out: &mut SpanEvaluation,
) {
    let mut ndu = [[0.0f64; MAX_ORDER]; MAX_ORDER];
    let mut left = [0.0f64; MAX_ORDER];
    let mut right = [0.0f64; MAX_ORDER];
    ndu[0][0] = 1.0;
    for j in 1..=p {
        left[j] = t - knots[span + 1 - j];
        right[j] = knots[span + j] - t;
        let mut saved = 0.0;
        for r in 0..j {
            ndu[j][r] = right[r + 1] + left[j - r];
            let temp = ndu[r][j - 1] / ndu[j][r];
            ndu[r][j] = saved + right[r + 1] * temp;
            saved = left[j - r] * temp;
        }
        ndu[j][j] = saved;
    }
    for j in 0..=p {
        out.basis[j] = ndu[j][p];
    }
    let nders = nders.min(p);
    if nders == 0 {
        return;
    }

    let mut ders = [[0.0f64; MAX_ORDER]; 3];
    let mut a = [[0.0f64; MAX_ORDER]; 2];
    let p_i = p as isize;
    for r in 0..=p {
        let r_i = r as isize;
        let (mut s1, mut s2) = (0usize, 1usize);
        a[0][0] = 1.0;
        for k in 1..=nders {
            let k_i = k as isize;
            let mut d = 0.0;
            let rk = r_i - k_i;
            let pk = p_i - k_i;
            if r_i >= k_i {
                a[s2][0] = a[s1][0] / ndu[(pk + 1) as usize][rk as usize];
                d = a[s2][0] * ndu[rk as usize][pk as usize];
            }
            let j1 = if rk >= -1 { 1 } else { -rk };
            let j2 = if r_i - 1 <= pk { k_i - 1 } else { p_i - r_i };
            let mut j = j1;
            while j <= j2 {
                let ju = j as usize;
                a[s2][ju] = (a[s1][ju] - a[s1][ju - 1]) / ndu[(pk + 1) as usize][(rk + j) as usize];
                d += a[s2][ju] * ndu[(rk + j) as usize][pk as usize];
                j += 1;
            }
            if r_i <= pk {
                a[s2][k] = -a[s1][k - 1] / ndu[(pk + 1) as usize][r];
                d += a[s2][k] * ndu[r][pk as usize];
            }
            ders[k][r] = d;
            std::mem::swap(&mut s1, &mut s2);
        }
    }
    let mut factor = p as f64;
    for k in 1..=nders {
        for j in 0..=p {
            ders[k][j] *= factor;
        }
        factor *= (p - k) as f64;
    }
    out.basis_d1[..=p].copy_from_slice(&ders[1][..=p]);
    if nders >= 2 {
        out.basis_d2[..=p].copy_from_slice(&ders[2][..=p]);
    }
}

/// Position with first and second derivatives at one parameter.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Jet {
    pub point: Point2,
    pub d1: Point2,
    pub d2: Point2,
}

/// A planar B-spline curve on fixed uniform knots.
#[derive(Debug, Clone, PartialEq)]
pub struct BSplineCurve {
    basis: BSplineBasis,
    control_points: Vec<Point2>,
}

impl BSplineCurve {
    /// Builds a uniform curve of the given degree through the supplied
    /// control polygon.
    pub fn uniform(degree: usize, closed: bool, control_points: Vec<Point2>) -> Result<Self> {
        let basis = BSplineBasis::uniform(control_points.len(), degree, closed)?;
        Self::from_basis(basis, control_points)
    }

    pub fn from_basis(basis: BSplineBasis, control_points: Vec<Point2>) -> Result<Self> {
        if control_points.len() != basis.len() {
            return Err(Error::DimensionMismatch {
                expected: basis.len(),
                got: control_points.len(),
            });
        }
        if control_points.iter().any(|p| !p.is_finite()) {
            return Err(Error::NonFinite("control points"));
        }
        Ok(BSplineCurve {
            basis,
            control_points,
        })
    }

    /// Same knots, new control points.
    pub fn with_control_points(&self, control_points: Vec<Point2>) -> Result<Self> {
        Self::from_basis(self.basis.clone(), control_points)
    }

    #[inline]
    pub fn basis(&self) -> &BSplineBasis {
        &self.basis
    }

    #[inline]
    pub fn degree(&self) -> usize {
        self.basis.degree
    }

    #[inline]
    pub fn is_closed(&self) -> bool {
        self.basis.closed
    }

    pub fn knots(&self) -> &[f64] {
        &self.basis.knots
    }

    pub fn control_points(&self) -> &[Point2] {
        &self.control_points
    }

    pub fn len(&self) -> usize {
        self.control_points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.control_points.is_empty()
    }

    /// Interleaved coordinates `[x0, y0, x1, y1, ...]`.
    pub fn flat_coordinates(&self) -> Vec<f64> {
        self.control_points.iter().flat_map(|p| [p.x, p.y]).collect()
    }

    pub fn evaluate(&self, t: f64) -> Point2 {
        let se = self.basis.evaluate_span(t, 0);
        self.combine(&se, &se.basis)
    }

    /// Position and tangent; valid for any degree.
    pub fn evaluate_d1(&self, t: f64) -> (Point2, Point2) {
        let se = self.basis.evaluate_span(t, 1);
        (self.combine(&se, &se.basis), self.combine(&se, &se.basis_d1))
    }

    /// Position with first and second derivatives. Requires degree >= 2.
    pub fn evaluate_jet(&self, t: f64) -> Result<Jet> {
        if self.degree() < 2 {
            return Err(Error::DegreeTooLow {
                needed: 2,
                degree: self.degree(),
            });
        }
        let se = self.basis.evaluate_span(t, 2);
        Ok(Jet {
            point: self.combine(&se, &se.basis),
            d1: self.combine(&se, &se.basis_d1),
            d2: self.combine(&se, &se.basis_d2),
        })
    }

    #[inline]
    fn combine(&self, se: &SpanEvaluation, weights: &[f64; MAX_ORDER]) -> Point2 {
        let mut acc = Point2::ZERO;
        for (j, &w) in weights[..se.order].iter().enumerate() {
            acc += self.control_points[self.basis.control_index(se.span, j)] * w;
        }
        acc
    }

    /// Uniformly spaced samples over the parameter domain (endpoints included).
    pub fn sample(&self, count: usize) -> Vec<Point2> {
        let count = count.max(2);
        (0..count)
            .map(|i| self.evaluate(i as f64 / (count - 1) as f64))
            .collect()
    }
}
