use super::{GeometryError, Obstacle, Point2};
use crate::Scalar;

/// Circle abstraction of an obstacle used by the reactive sector logic.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SecurityCircle<F> {
    pub center: Point2<F>,
    pub radius: F,
}

impl<F: Scalar> SecurityCircle<F> {
    pub fn new(center: Point2<F>, radius: F) -> Result<Self, GeometryError> {
        if !(radius > F::zero()) || !radius.is_finite() {
            return Err(GeometryError::InvalidRadius);
        }
        Ok(Self { center, radius })
    }

    /// Strict interior test.
    #[inline]
    pub fn strictly_contains(&self, p: Point2<F>) -> bool {
        p.distance(self.center) < self.radius
    }

    /// Copy with both center and radius scaled about the origin.
    pub fn scaled(&self, k: F) -> Self {
        Self { center: self.center * k, radius: self.radius * k }
    }
}

/// Circumscribed circle of the obstacle grown by `margin`: radius `a + margin`.
pub fn security_circle<F: Scalar>(o: &Obstacle<F>, margin: F) -> Result<SecurityCircle<F>, GeometryError> {
    if !(margin >= F::zero()) {
        return Err(GeometryError::NegativeMargin);
    }
    SecurityCircle::new(o.ellipse.center, o.ellipse.a + margin)
}

/// The two points where lines through `p` touch the circle, as `(left, right)`.
///
/// "Left" is the tangent point `t` with `cross(t − center, p − center) > 0`, i.e. the one on the
/// left hand of an observer at `p` facing the center.
pub fn tangent_points<F: Scalar>(p: Point2<F>, c: &SecurityCircle<F>) -> Result<(Point2<F>, Point2<F>), GeometryError> {
    let d = p.distance(c.center);
    if !(d > c.radius) {
        return Err(GeometryError::PointNotOutside);
    }
    let u = (p - c.center) * (F::one() / d);
    let beta = (c.radius / d).min(F::one()).acos();
    let left = c.center + u.rotated(-beta) * c.radius;
    let right = c.center + u.rotated(beta) * c.radius;
    Ok((left, right))
}
