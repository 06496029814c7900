//! Rotated ellipses and the elliptic-cylinder obstacle built on them.

use super::{GeometryError, Point2};
use crate::Scalar;

/// Rotated ellipse. `a` is the semi-major axis, `b` the semi-minor axis and `theta` the
/// counterclockwise angle of the major axis from east, kept in `[0, π)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Ellipse<F> {
    pub center: Point2<F>,
    pub a: F,
    pub b: F,
    pub theta: F,
}

impl<F: Scalar> Ellipse<F> {
    pub fn new(center: Point2<F>, a: F, b: F, theta: F) -> Result<Self, GeometryError> {
        if !center.is_finite() || !a.is_finite() || !b.is_finite() || !theta.is_finite() {
            return Err(GeometryError::InvalidEllipse("non-finite parameter"));
        }
        if b <= F::zero() {
            return Err(GeometryError::InvalidEllipse("semi-minor axis must be positive"));
        }
        if a < b {
            return Err(GeometryError::InvalidEllipse("semi-major axis must not be smaller than the semi-minor axis"));
        }
        let mut theta = theta % F::PI();
        if theta < F::zero() {
            theta = theta + F::PI();
        }
        if theta >= F::PI() {
            theta = F::zero();
        }
        Ok(Self { center, a, b, theta })
    }

    pub fn circle(center: Point2<F>, radius: F) -> Result<Self, GeometryError> {
        Self::new(center, radius, radius, F::zero())
    }

    /// Maps a world point into the frame centered on the ellipse with the major axis on +x.
    #[inline]
    pub fn to_local(&self, p: Point2<F>) -> Point2<F> {
        let d = p - self.center;
        let (s, c) = self.theta.sin_cos();
        Point2::new(c * d.x + s * d.y, -s * d.x + c * d.y)
    }

    #[inline]
    pub fn from_local(&self, q: Point2<F>) -> Point2<F> {
        let (s, c) = self.theta.sin_cos();
        Point2::new(c * q.x - s * q.y, s * q.x + c * q.y) + self.center
    }

    /// Rotates a local-frame vector into the world frame (no translation).
    #[inline]
    pub fn dir_from_local(&self, v: Point2<F>) -> Point2<F> {
        v.rotated(self.theta)
    }

    /// Local coordinates scaled so the ellipse becomes the unit circle.
    #[inline]
    fn to_unit(self, p: Point2<F>) -> Point2<F> {
        let q = self.to_local(p);
        Point2::new(q.x / self.a, q.y / self.b)
    }

    /// Value of the implicit form `(x/a)² + (y/b)²`; ≤ 1 on the closed disk.
    #[inline]
    pub fn implicit(&self, p: Point2<F>) -> F {
        self.to_unit(p).norm_squared()
    }

    #[inline]
    pub fn contains(&self, p: Point2<F>) -> bool {
        self.implicit(p) <= F::one()
    }

    /// Point on the boundary at parameter `t`: `(a cos t, b sin t)` in the local frame.
    #[inline]
    pub fn boundary_point(&self, t: F) -> Point2<F> {
        let (s, c) = t.sin_cos();
        self.from_local(Point2::new(self.a * c, self.b * s))
    }

    /// Perimeter via Ramanujan's second approximation.
    pub fn perimeter(&self) -> F {
        let (a, b) = (self.a, self.b);
        let h = (a - b) * (a - b) / ((a + b) * (a + b));
        let three = F::lit(3.0);
        F::PI() * (a + b) * (F::one() + three * h / (F::lit(10.0) + (F::lit(4.0) - three * h).sqrt()))
    }

    /// Sub-interval `[t_in, t_out]` of the segment parameter in `[0, 1]` lying in the closed disk.
    pub fn segment_overlap(&self, p1: Point2<F>, p2: Point2<F>) -> Option<(F, F)> {
        let q1 = self.to_unit(p1);
        let dq = self.to_unit(p2) - q1;
        let a = dq.norm_squared();
        let c = q1.norm_squared() - F::one();
        if a <= F::zero() {
            return (c <= F::zero()).then(|| (F::zero(), F::one()));
        }
        let half_b = q1.dot(dq);
        let disc = half_b * half_b - a * c;
        if disc < F::zero() {
            return None;
        }
        let sq = disc.sqrt();
        let t_in = (-half_b - sq) / a;
        let t_out = (-half_b + sq) / a;
        if t_in > F::one() || t_out < F::zero() {
            return None;
        }
        Some((t_in.max(F::zero()), t_out.min(F::one())))
    }
}

/// Elliptic cylinder obstacle as reported by object detection.
///
/// Only the horizontal cross-section takes part in guidance; `z_base` and `height` are carried
/// through for reporting.
#[derive(Debug, Clone, PartialEq)]
pub struct Obstacle<F> {
    pub id: String,
    pub ellipse: Ellipse<F>,
    pub z_base: F,
    pub height: F,
}

impl<F: Scalar> Obstacle<F> {
    pub fn new(id: impl Into<String>, ellipse: Ellipse<F>) -> Self {
        Self { id: id.into(), ellipse, z_base: F::zero(), height: F::zero() }
    }

    pub fn with_height(mut self, z_base: F, height: F) -> Result<Self, GeometryError> {
        if !(height >= F::zero()) {
            return Err(GeometryError::NegativeHeight);
        }
        self.z_base = z_base;
        self.height = height;
        Ok(self)
    }

    /// Copy with the cross-section grown by `margin`.
    pub fn inflated(&self, margin: F) -> Result<Self, GeometryError> {
        Ok(Self { ellipse: inflate(&self.ellipse, margin)?, ..self.clone() })
    }
}

/// Boundary-inclusive containment test.
pub fn point_in_ellipse<F: Scalar>(p: Point2<F>, e: &Ellipse<F>) -> bool {
    e.contains(p)
}

/// True iff the closed segment meets the closed elliptical disk.
pub fn segment_intersects_ellipse<F: Scalar>(
    p1: Point2<F>,
    p2: Point2<F>,
    e: &Ellipse<F>,
) -> Result<bool, GeometryError> {
    if p1 == p2 {
        return Err(GeometryError::DegenerateSegment);
    }
    Ok(segment_hits_ellipse(p1, p2, e))
}

/// [`segment_intersects_ellipse`] without the degenerate-segment check; a zero-length
/// segment is treated as a point.
pub(crate) fn segment_hits_ellipse<F: Scalar>(p1: Point2<F>, p2: Point2<F>, e: &Ellipse<F>) -> bool {
    let q1 = e.to_unit(p1);
    let dq = e.to_unit(p2) - q1;
    let len2 = dq.norm_squared();
    let t = if len2 > F::zero() { (-q1.dot(dq) / len2).max(F::zero()).min(F::one()) } else { F::zero() };
    (q1 + dq * t).norm_squared() <= F::one()
}

/// Grows both semi-axes by `margin`, keeping center and orientation.
///
/// This is not the exact offset curve (which is not an ellipse) but it contains it.
pub fn inflate<F: Scalar>(e: &Ellipse<F>, margin: F) -> Result<Ellipse<F>, GeometryError> {
    if !(margin >= F::zero()) {
        return Err(GeometryError::NegativeMargin);
    }
    Ok(Ellipse { a: e.a + margin, b: e.b + margin, ..*e })
}

/// Vertices of an `n`-gon circumscribing `e`, counterclockwise.
///
/// In the frame where `e` is the unit circle the polygon is the regular circumscribed
/// `n`-gon with vertices at angles `2πk/n + π/n`; mapping back is affine, so containment
/// carries over.
pub fn circumscribed_polygon<F: Scalar>(e: &Ellipse<F>, n: usize) -> Result<Vec<Point2<F>>, GeometryError> {
    if n < 3 {
        return Err(GeometryError::TooFewSides(n));
    }
    let nf = F::from_usize(n).unwrap();
    let half_step = F::PI() / nf;
    let scale = F::one() / half_step.cos();
    Ok((0..n)
        .map(|k| {
            let phi = F::TAU() * F::from_usize(k).unwrap() / nf + half_step;
            let (s, c) = phi.sin_cos();
            e.from_local(Point2::new(e.a * c * scale, e.b * s * scale))
        })
        .collect())
}

/// Nearest hit of the ray `origin + t·dir`, `t ≥ 0`, with the ellipse boundary.
pub fn ray_ellipse_intersection<F: Scalar>(
    origin: Point2<F>,
    dir: Point2<F>,
    e: &Ellipse<F>,
) -> Result<Option<Point2<F>>, GeometryError> {
    let dir = dir.normalized().ok_or(GeometryError::ZeroDirection)?;
    let q0 = e.to_unit(origin);
    let dl = e.to_local(origin + dir) - e.to_local(origin);
    let dq = Point2::new(dl.x / e.a, dl.y / e.b);
    let a = dq.norm_squared();
    let half_b = q0.dot(dq);
    let c = q0.norm_squared() - F::one();
    let disc = half_b * half_b - a * c;
    if disc < F::zero() {
        return Ok(None);
    }
    let sq = disc.sqrt();
    let t1 = (-half_b - sq) / a;
    let t2 = (-half_b + sq) / a;
    let t = if t1 >= F::zero() {
        t1
    } else if t2 >= F::zero() {
        t2
    } else {
        return Ok(None);
    };
    Ok(Some(origin + dir * t))
}

/// Nearest boundary point of `e` to `p` together with the signed distance (negative inside).
///
/// Bisection on the Lagrange-multiplier root after reflecting into the first quadrant; the
/// root is bracketed so there is no need for a sampling fallback near the evolute.
pub fn nearest_boundary_point<F: Scalar>(p: Point2<F>, e: &Ellipse<F>) -> (Point2<F>, F) {
    let q = e.to_local(p);
    let (e0, e1) = (e.a, e.b);
    let (y0, y1) = (q.x.abs(), q.y.abs());
    let zero = F::zero();
    let one = F::one();

    let (x0, x1) = if y1 > zero {
        if y0 > zero {
            let z0 = y0 / e0;
            let z1 = y1 / e1;
            let g = z0 * z0 + z1 * z1 - one;
            if g != zero {
                let r0 = (e0 / e1) * (e0 / e1);
                let sbar = ellipse_root(r0, z0, z1, g);
                (r0 * y0 / (sbar + r0), y1 / (sbar + one))
            } else {
                (y0, y1)
            }
        } else {
            (zero, e1)
        }
    } else {
        let numer0 = e0 * y0;
        let denom0 = e0 * e0 - e1 * e1;
        if numer0 < denom0 {
            let xde0 = numer0 / denom0;
            (e0 * xde0, e1 * (one - xde0 * xde0).max(zero).sqrt())
        } else {
            (e0, zero)
        }
    };
    let local = Point2::new(x0.copysign(q.x), x1.copysign(q.y));
    let dist = local.distance(q);
    let signed = if e.contains(p) { -dist } else { dist };
    (e.from_local(local), signed)
}

fn ellipse_root<F: Scalar>(r0: F, z0: F, z1: F, g: F) -> F {
    let n0 = r0 * z0;
    let mut s0 = z1 - F::one();
    let mut s1 = if g < F::zero() { F::zero() } else { n0.hypot(z1) - F::one() };
    let mut s = F::zero();
    for _ in 0..2200 {
        s = (s0 + s1) / F::two();
        if s == s0 || s == s1 {
            break;
        }
        let ratio0 = n0 / (s + r0);
        let ratio1 = z1 / (s + F::one());
        let gs = ratio0 * ratio0 + ratio1 * ratio1 - F::one();
        if gs > F::zero() {
            s0 = s;
        } else if gs < F::zero() {
            s1 = s;
        } else {
            break;
        }
    }
    s
}

/// Signed Euclidean distance from `p` to the boundary of `e`; negative inside.
pub fn distance_to_ellipse<F: Scalar>(p: Point2<F>, e: &Ellipse<F>) -> F {
    nearest_boundary_point(p, e).1
}

/// Outward unit normal of `e` at a boundary point.
pub fn outward_normal<F: Scalar>(boundary: Point2<F>, e: &Ellipse<F>) -> Option<Point2<F>> {
    let q = e.to_local(boundary);
    let n = Point2::new(q.x / (e.a * e.a), q.y / (e.b * e.b));
    n.normalized().map(|n| e.dir_from_local(n))
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::{FRAC_PI_2, PI};

    fn el(cx: f64, cy: f64, a: f64, b: f64, th: f64) -> Ellipse<f64> {
        Ellipse::new(Point2::new(cx, cy), a, b, th).unwrap()
    }

    fn p(x: f64, y: f64) -> Point2<f64> {
        Point2::new(x, y)
    }

    #[test]
    fn constructor_validates() {
        assert!(Ellipse::new(p(0.0, 0.0), 1.0, 2.0, 0.0).is_err());
        assert!(Ellipse::new(p(0.0, 0.0), 1.0, 0.0, 0.0).is_err());
        assert!(Ellipse::new(p(f64::NAN, 0.0), 1.0, 1.0, 0.0).is_err());
        let e = el(0.0, 0.0, 2.0, 1.0, -FRAC_PI_2);
        assert!((e.theta - FRAC_PI_2).abs() < 1e-15);
        assert_eq!(el(0.0, 0.0, 2.0, 1.0, PI).theta, 0.0);
    }

    #[test]
    fn point_in_ellipse_examples() {
        let e = el(0.0, 0.0, 2.0, 1.0, 0.0);
        assert!(point_in_ellipse(p(0.0, 0.0), &e));
        assert!(!point_in_ellipse(p(3.0, 0.0), &e));
        let r = el(0.0, 0.0, 2.0, 1.0, FRAC_PI_2);
        assert!(point_in_ellipse(p(0.0, 1.5), &r));
        assert!(point_in_ellipse(p(2.0, 0.0), &e));
    }

    #[test]
    fn segment_examples() {
        let c = el(0.0, 0.0, 1.0, 1.0, 0.0);
        assert!(segment_intersects_ellipse(p(-3.0, 0.0), p(3.0, 0.0), &c).unwrap());
        assert!(!segment_intersects_ellipse(p(-3.0, 2.0), p(3.0, 2.0), &c).unwrap());
        assert!(segment_intersects_ellipse(p(-3.0, 1.0), p(3.0, 1.0), &c).unwrap());
        assert_eq!(segment_intersects_ellipse(p(1.0, 1.0), p(1.0, 1.0), &c), Err(GeometryError::DegenerateSegment));
    }

    #[test]
    fn segment_overlap_interval() {
        let c = el(50.0, 0.0, 5.0, 5.0, 0.0);
        let (t0, t1) = c.segment_overlap(p(0.0, 0.0), p(100.0, 0.0)).unwrap();
        assert!((t0 - 0.45).abs() < 1e-12 && (t1 - 0.55).abs() < 1e-12);
        assert!(c.segment_overlap(p(0.0, 6.0), p(100.0, 6.0)).is_none());
        assert!(c.segment_overlap(p(0.0, 0.0), p(40.0, 0.0)).is_none());
    }

    #[test]
    fn inflate_examples() {
        let e = el(0.0, 0.0, 2.0, 1.0, 0.0);
        assert_eq!(inflate(&e, 0.0).unwrap(), e);
        assert_eq!(inflate(&e, 1.0).unwrap(), el(0.0, 0.0, 3.0, 2.0, 0.0));
        assert_eq!(inflate(&el(5.0, 5.0, 4.0, 2.0, 1.0), 0.5).unwrap(), el(5.0, 5.0, 4.5, 2.5, 1.0));
        assert_eq!(inflate(&e, -0.1), Err(GeometryError::NegativeMargin));
    }

    #[test]
    fn polygon_examples() {
        let c = el(0.0, 0.0, 1.0, 1.0, 0.0);
        let sq = circumscribed_polygon(&c, 4).unwrap();
        assert_eq!(sq.len(), 4);
        for v in &sq {
            assert!((v.norm() - 2f64.sqrt()).abs() < 1e-12);
        }
        let e = el(0.0, 0.0, 2.0, 1.0, 0.0);
        for v in circumscribed_polygon(&e, 8).unwrap() {
            assert!(e.implicit(v) >= 1.0 - 1e-12);
        }
        assert_eq!(circumscribed_polygon(&e, 2), Err(GeometryError::TooFewSides(2)));
    }

    #[test]
    fn ray_examples() {
        let e = el(0.0, 0.0, 2.0, 1.0, 0.0);
        let hit = ray_ellipse_intersection(p(0.0, 0.0), p(1.0, 0.0), &e).unwrap().unwrap();
        assert!((hit - p(2.0, 0.0)).norm() < 1e-12);
        let hit = ray_ellipse_intersection(p(0.0, 0.0), p(0.0, 1.0), &e).unwrap().unwrap();
        assert!((hit - p(0.0, 1.0)).norm() < 1e-12);
        assert_eq!(ray_ellipse_intersection(p(5.0, 0.0), p(1.0, 0.0), &e).unwrap(), None);
        let hit = ray_ellipse_intersection(p(-5.0, 0.0), p(1.0, 0.0), &e).unwrap().unwrap();
        assert!((hit - p(-2.0, 0.0)).norm() < 1e-12);
        assert_eq!(ray_ellipse_intersection(p(0.0, 0.0), p(0.0, 0.0), &e), Err(GeometryError::ZeroDirection));
    }

    #[test]
    fn distance_examples() {
        let c = el(0.0, 0.0, 1.0, 1.0, 0.0);
        assert!((distance_to_ellipse(p(3.0, 0.0), &c) - 2.0).abs() < 1e-12);
        assert!((distance_to_ellipse(p(0.0, 0.0), &c) + 1.0).abs() < 1e-12);
        let e = el(0.0, 0.0, 2.0, 1.0, 0.0);
        // dense parametric sampling oracle, frozen from 10^6 samples of t
        let d = distance_to_ellipse(p(3.0, 4.0), &e);
        let oracle = (0..1_000_000)
            .map(|k| {
                let t = 2.0 * PI * k as f64 / 1e6;
                ((3.0 - 2.0 * t.cos()).powi(2) + (4.0 - t.sin()).powi(2)).sqrt()
            })
            .fold(f64::INFINITY, f64::min);
        assert!((d - oracle).abs() < 1e-6, "{d} vs {oracle}");
    }

    #[test]
    fn distance_inside_elongated() {
        // inside, close to the center of a long ellipse: nearest point is off-axis
        let e = el(0.0, 0.0, 10.0, 1.0, 0.3);
        let q = e.from_local(p(0.5, 0.2));
        let d = distance_to_ellipse(q, &e);
        let oracle =
            (0..200_000).map(|k| e.boundary_point(2.0 * PI * k as f64 / 2e5).distance(q)).fold(f64::INFINITY, f64::min);
        assert!((d + oracle).abs() < 1e-6);
    }

    #[test]
    fn normal_of_circle_is_radial() {
        let c = el(1.0, 1.0, 2.0, 2.0, 0.0);
        let n = outward_normal(p(3.0, 1.0), &c).unwrap();
        assert!((n - p(1.0, 0.0)).norm() < 1e-12);
    }

    #[test]
    fn perimeter_of_circle() {
        let c = el(0.0, 0.0, 3.0, 3.0, 0.0);
        assert!((c.perimeter() - 6.0 * PI).abs() < 1e-12);
    }

    #[test]
    fn works_in_f32() {
        let e = Ellipse::new(Point2::new(0.0f32, 0.0), 2.0, 1.0, 0.0).unwrap();
        assert!((distance_to_ellipse(Point2::new(3.0f32, 0.0), &e) - 1.0).abs() < 1e-5);
    }
}
