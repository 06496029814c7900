//! Guidance laws for identifying an object: holding position in its flow shade, or circling
//! it at a fixed distance.

use crate::geometry::{inflate, GeometryError, Obstacle, Point2};
use crate::reactive::ReactiveError;
use crate::Scalar;

mod align;
mod orbit;

pub use align::{align_command, alignment_mode, flow_shade_goal, AlignConfig, AlignState};
pub use orbit::{orbit_command, orbit_distance_error, OrbitConfig, OrbitDirection, OrbitState, ALIGN_CUTOFF};

/// Uniform sea current, m/s.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct SeaCurrent<F> {
    pub vx: F,
    pub vy: F,
}

impl<F: Scalar> SeaCurrent<F> {
    pub fn new(vx: F, vy: F) -> Self {
        Self { vx, vy }
    }

    pub fn velocity(&self) -> Point2<F> {
        Point2::new(self.vx, self.vy)
    }

    pub fn magnitude(&self) -> F {
        self.vx.hypot(self.vy)
    }

    /// Unit vector along the current, `None` when there is no current.
    pub fn direction(&self) -> Option<Point2<F>> {
        self.velocity().normalized()
    }
}

/// Phase of an identification maneuver. Aligning runs Evasive → Positioning → Done,
/// orbiting runs Steering ⇄ Tracking → Done.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum IdentPhase {
    Evasive,
    Positioning,
    Steering,
    Tracking,
    Done,
}

impl IdentPhase {
    pub fn is_legal_transition(self, to: IdentPhase) -> bool {
        use IdentPhase::*;
        self == to
            || matches!(
                (self, to),
                (Evasive, Positioning)
                    | (Positioning, Done)
                    | (Steering, Tracking)
                    | (Tracking, Steering)
                    | (Tracking, Done)
            )
    }
}

/// Which identification maneuver an object calls for.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum IdentTask {
    Align,
    Orbit,
}

/// Small objects are aligned to, large ones are circled: align when the perimeter of the
/// object grown by `safety_margin` is at most `size_factor · standoff`.
pub fn identification_task<F: Scalar>(
    o: &Obstacle<F>,
    standoff: F,
    safety_margin: F,
    size_factor: F,
) -> Result<IdentTask, GeometryError> {
    let perimeter = inflate(&o.ellipse, safety_margin)?.perimeter();
    Ok(if perimeter <= size_factor * standoff { IdentTask::Align } else { IdentTask::Orbit })
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum IdentError {
    #[error("sea current is zero; there is no flow shade")]
    ZeroCurrent,
    #[error("vehicle at the object center; the surface normal is undefined")]
    AtCenter,
    #[error("phase {0:?} is not valid for this maneuver")]
    WrongPhase(IdentPhase),
    #[error("invalid identification configuration: {0}")]
    InvalidConfig(&'static str),
    #[error(transparent)]
    Reactive(#[from] ReactiveError),
    #[error(transparent)]
    Geometry(#[from] GeometryError),
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::Ellipse;

    #[test]
    fn size_rule() {
        let small = Obstacle::new("s", Ellipse::circle(Point2::new(0.0, 0.0), 3.0).unwrap());
        let large = Obstacle::new("l", Ellipse::new(Point2::new(0.0, 0.0), 25.0, 15.0, 0.0).unwrap());
        assert_eq!(identification_task(&small, 10.0, 3.0, 8.0).unwrap(), IdentTask::Align);
        assert_eq!(identification_task(&large, 10.0, 3.0, 8.0).unwrap(), IdentTask::Orbit);
    }

    #[test]
    fn transitions() {
        use IdentPhase::*;
        assert!(Evasive.is_legal_transition(Positioning));
        assert!(!Positioning.is_legal_transition(Evasive));
        assert!(Tracking.is_legal_transition(Steering));
        assert!(!Steering.is_legal_transition(Done));
        assert!(!Evasive.is_legal_transition(Tracking));
    }
}
