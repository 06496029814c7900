use crate::Scalar;

/// Course and speed setpoints handed to the autopilot.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GuidanceCommand<F> {
    /// Radians, counterclockwise from east, in (-π, π].
    pub desired_course: F,
    /// Through-water speed, m/s.
    pub desired_speed: F,
}

impl<F: Scalar> GuidanceCommand<F> {
    pub fn new(desired_course: F, desired_speed: F) -> Self {
        Self { desired_course: crate::wrap_angle(desired_course), desired_speed }
    }
}

/// Cruise and maximum through-water speed of the vehicle.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpeedLimits<F> {
    pub cruise: F,
    pub max: F,
}

impl<F: Scalar> SpeedLimits<F> {
    pub fn clamp(&self, u: F) -> F {
        u.max(F::zero()).min(self.max)
    }
}
