use std::ops::{Add, AddAssign, Mul, Neg, Sub, SubAssign};

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::Scalar;

/// A point (or free vector) in the horizontal plane: `x` east, `y` north, meters.
///
/// Serialized as a two-element array `[x, y]`.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Point2<F> {
    pub x: F,
    pub y: F,
}

impl<F: Scalar> Point2<F> {
    #[inline]
    pub fn new(x: F, y: F) -> Self {
        Self { x, y }
    }

    #[inline]
    pub fn origin() -> Self {
        Self::new(F::zero(), F::zero())
    }

    /// Unit vector pointing along `angle` (radians, counterclockwise from east).
    #[inline]
    pub fn from_angle(angle: F) -> Self {
        let (s, c) = angle.sin_cos();
        Self::new(c, s)
    }

    #[inline]
    pub fn dot(self, o: Self) -> F {
        self.x * o.x + self.y * o.y
    }

    /// z-component of the 3-D cross product.
    #[inline]
    pub fn cross(self, o: Self) -> F {
        self.x * o.y - self.y * o.x
    }

    #[inline]
    pub fn norm_squared(self) -> F {
        self.dot(self)
    }

    #[inline]
    pub fn norm(self) -> F {
        self.x.hypot(self.y)
    }

    #[inline]
    pub fn distance(self, o: Self) -> F {
        (self - o).norm()
    }

    /// Unit vector in the same direction, or `None` for the zero vector.
    #[inline]
    pub fn normalized(self) -> Option<Self> {
        let n = self.norm();
        if n > F::zero() && n.is_finite() {
            Some(self * (F::one() / n))
        } else {
            None
        }
    }

    /// Polar angle, `atan2(y, x)`.
    #[inline]
    pub fn angle(self) -> F {
        self.y.atan2(self.x)
    }

    /// Rotates counterclockwise by `angle`.
    #[inline]
    pub fn rotated(self, angle: F) -> Self {
        let (s, c) = angle.sin_cos();
        Self::new(c * self.x - s * self.y, s * self.x + c * self.y)
    }

    /// Rotates counterclockwise by 90°.
    #[inline]
    pub fn perp(self) -> Self {
        Self::new(-self.y, self.x)
    }

    #[inline]
    pub fn is_finite(self) -> bool {
        self.x.is_finite() && self.y.is_finite()
    }

    #[inline]
    pub fn lerp(self, o: Self, t: F) -> Self {
        self + (o - self) * t
    }

    /// Converts to another scalar type.
    pub fn cast<G: Scalar>(self) -> Point2<G> {
        Point2::new(G::from(self.x).unwrap(), G::from(self.y).unwrap())
    }
}

impl<F: Scalar> Add for Point2<F> {
    type Output = Self;
    #[inline]
    fn add(self, o: Self) -> Self {
        Self::new(self.x + o.x, self.y + o.y)
    }
}

impl<F: Scalar> AddAssign for Point2<F> {
    #[inline]
    fn add_assign(&mut self, o: Self) {
        *self = *self + o;
    }
}

impl<F: Scalar> Sub for Point2<F> {
    type Output = Self;
    #[inline]
    fn sub(self, o: Self) -> Self {
        Self::new(self.x - o.x, self.y - o.y)
    }
}

impl<F: Scalar> SubAssign for Point2<F> {
    #[inline]
    fn sub_assign(&mut self, o: Self) {
        *self = *self - o;
    }
}

impl<F: Scalar> Mul<F> for Point2<F> {
    type Output = Self;
    #[inline]
    fn mul(self, s: F) -> Self {
        Self::new(self.x * s, self.y * s)
    }
}

impl<F: Scalar> Neg for Point2<F> {
    type Output = Self;
    #[inline]
    fn neg(self) -> Self {
        Self::new(-self.x, -self.y)
    }
}

impl<F: Serialize> Serialize for Point2<F> {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        (&self.x, &self.y).serialize(serializer)
    }
}

impl<'de, F: Deserialize<'de>> Deserialize<'de> for Point2<F> {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let (x, y) = <(F, F)>::deserialize(deserializer)?;
        Ok(Point2 { x, y })
    }
}

/// Shortest distance from `p` to the closed segment `a`–`b`.
pub fn point_segment_distance<F: Scalar>(p: Point2<F>, a: Point2<F>, b: Point2<F>) -> F {
    let ab = b - a;
    let len2 = ab.norm_squared();
    if len2 <= F::zero() {
        return p.distance(a);
    }
    let t = ((p - a).dot(ab) / len2).max(F::zero()).min(F::one());
    p.distance(a + ab * t)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn vector_ops() {
        let a = Point2::new(1.0, 2.0);
        let b = Point2::new(3.0, -1.0);
        assert_eq!(a + b, Point2::new(4.0, 1.0));
        assert_eq!(a - b, Point2::new(-2.0, 3.0));
        assert_eq!(a.dot(b), 1.0);
        assert_eq!(a.cross(b), -7.0);
        assert_eq!(Point2::new(1.0, 0.0).perp(), Point2::new(0.0, 1.0));
        assert!(Point2::<f64>::origin().normalized().is_none());
    }

    #[test]
    fn serde_as_array() {
        let p = Point2::new(1.5, -2.0);
        let s = serde_json::to_string(&p).unwrap();
        assert_eq!(s, "[1.5,-2.0]");
        let q: Point2<f64> = serde_json::from_str(&s).unwrap();
        assert_eq!(p, q);
    }

    #[test]
    fn segment_distance() {
        let d = point_segment_distance(Point2::new(0.0, 0.0), Point2::new(0.0, 3.0), Point2::new(3.0, 0.0));
        assert!((d - 3.0 / 2f64.sqrt()).abs() < 1e-12);
    }
}
