//! Scalar abstraction shared by the geometric and guidance code.

use std::fmt::{Debug, Display};

use num_traits::{Float, FloatConst, FromPrimitive};

/// Floating point type the geometry, planners and guidance laws are written against.
///
/// Implemented for `f32` and `f64`. The simulator and scenario I/O are fixed to `f64`.
pub trait Scalar: Float + FloatConst + FromPrimitive + Debug + Display + Default + Send + Sync + 'static {
    /// Converts an `f64` literal into `Self`.
    #[inline]
    fn lit(v: f64) -> Self {
        // `FromPrimitive::from_f64` never fails for f32/f64 (it rounds or saturates).
        Self::from_f64(v).unwrap()
    }

    #[inline]
    fn two() -> Self {
        Self::one() + Self::one()
    }

    /// Tolerance used for "on the boundary" decisions, scaled to the precision of `Self`.
    #[inline]
    fn tolerance() -> Self {
        Self::epsilon().sqrt()
    }
}

impl Scalar for f32 {}
impl Scalar for f64 {}

/// Wraps an angle to (-π, π].
pub fn wrap_angle<F: Scalar>(angle: F) -> F {
    let two_pi = F::TAU();
    let mut a = angle % two_pi;
    if a <= -F::PI() {
        a = a + two_pi;
    } else if a > F::PI() {
        a = a - two_pi;
    }
    a
}
