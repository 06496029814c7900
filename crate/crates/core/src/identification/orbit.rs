use super::{IdentError, IdentPhase};
use crate::command::{GuidanceCommand, SpeedLimits};
use crate::geometry::{nearest_boundary_point, outward_normal, Obstacle, Point2};
use crate::{wrap_angle, Scalar};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum OrbitDirection {
    Clockwise,
    Counterclockwise,
}

#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize, serde::Deserialize)]
#[serde(default, deny_unknown_fields, bound(deserialize = "F: Scalar + serde::Deserialize<'de>"))]
pub struct OrbitConfig<F> {
    /// Distance to hold from the object boundary.
    pub target_distance: F,
    pub direction: OrbitDirection,
    /// |distance error| at or below which Steering hands over to Tracking.
    pub mode_switch_threshold: F,
    /// Scales the distance error into an inward/outward course component, 1/m.
    pub cross_track_gain: F,
    /// Speed while tracking the orbit.
    pub orbit_speed: F,
    /// Steering speed is `approach_gain · |error|`, capped at cruise, 1/s. Keep it below
    /// a quarter of the autopilot speed gain and below `a_max / u_cruise` so the vehicle
    /// arrives at the orbit slowly instead of coasting through it.
    pub approach_gain: F,
}

impl<F: Scalar> Default for OrbitConfig<F> {
    fn default() -> Self {
        Self {
            target_distance: F::lit(15.0),
            direction: OrbitDirection::Counterclockwise,
            mode_switch_threshold: F::lit(0.5),
            cross_track_gain: F::lit(0.3),
            orbit_speed: F::lit(1.5),
            approach_gain: F::lit(0.08),
        }
    }
}

impl<F: Scalar> OrbitConfig<F> {
    pub fn validate(&self) -> Result<(), IdentError> {
        if !(self.target_distance > F::zero()) {
            return Err(IdentError::InvalidConfig("target_distance must be positive"));
        }
        if !(self.mode_switch_threshold > F::zero()) {
            return Err(IdentError::InvalidConfig("mode_switch_threshold must be positive"));
        }
        if !(self.cross_track_gain >= F::zero()) || !(self.orbit_speed > F::zero()) || !(self.approach_gain > F::zero())
        {
            return Err(IdentError::InvalidConfig("gains and orbit speed must be positive"));
        }
        Ok(())
    }
}

/// Maneuver state threaded through successive [`orbit_command`] calls.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OrbitState<F> {
    pub phase: IdentPhase,
    /// Polar angle swept about the object center while tracking, in the orbit direction.
    pub swept: F,
    last_angle: Option<F>,
}

impl<F: Scalar> Default for OrbitState<F> {
    fn default() -> Self {
        Self { phase: IdentPhase::Steering, swept: F::zero(), last_angle: None }
    }
}

/// Distance from the object boundary minus the target distance; positive when too far out.
pub fn orbit_distance_error<F: Scalar>(p: Point2<F>, o: &Obstacle<F>, cfg: &OrbitConfig<F>) -> F {
    nearest_boundary_point(p, &o.ellipse).1 - cfg.target_distance
}

/// Course error (rad) at and beyond which the tracking speed command is zero.
pub const ALIGN_CUTOFF: f64 = 0.3;

/// One step of the going-around maneuver.
///
/// Steering heads straight for the target orbit along the surface normal, slowing as it
/// closes in. Tracking follows the orbit tangent with a proportional cross-track term and
/// accumulates the swept angle; a full turn completes the maneuver. While tracking, speed
/// falls from `orbit_speed` to zero as the course error grows to [`ALIGN_CUTOFF`], so the
/// vehicle turns onto the orbit almost in place instead of overshooting it.
pub fn orbit_command<F: Scalar>(
    p: Point2<F>,
    course: F,
    o: &Obstacle<F>,
    cfg: &OrbitConfig<F>,
    speeds: &SpeedLimits<F>,
    state: &OrbitState<F>,
) -> Result<(GuidanceCommand<F>, OrbitState<F>), IdentError> {
    let center = o.ellipse.center;
    if p == center {
        return Err(IdentError::AtCenter);
    }
    let (boundary, dist) = nearest_boundary_point(p, &o.ellipse);
    let normal = outward_normal(boundary, &o.ellipse).ok_or(IdentError::AtCenter)?;
    let error = dist - cfg.target_distance;
    let mut next = *state;

    match next.phase {
        IdentPhase::Steering if error.abs() > cfg.mode_switch_threshold => {
            let dir = if error > F::zero() { -normal } else { normal };
            let speed = (cfg.approach_gain * error.abs()).min(speeds.cruise);
            return Ok((GuidanceCommand::new(dir.angle(), speeds.clamp(speed)), next));
        }
        IdentPhase::Steering => next.phase = IdentPhase::Tracking,
        IdentPhase::Tracking
            if error.abs() > F::lit(3.0) * cfg.mode_switch_threshold.max(cfg.target_distance * F::lit(0.1)) =>
        {
            next.phase = IdentPhase::Steering;
            next.last_angle = None;
            return orbit_command(p, course, o, cfg, speeds, &next);
        }
        IdentPhase::Tracking | IdentPhase::Done => {}
        other => return Err(IdentError::WrongPhase(other)),
    }

    let sign = match cfg.direction {
        OrbitDirection::Counterclockwise => F::one(),
        OrbitDirection::Clockwise => -F::one(),
    };
    let tangent = normal.perp() * sign;
    let dir = tangent - normal * (cfg.cross_track_gain * error);
    let desired_course = dir.angle();

    if next.phase == IdentPhase::Tracking {
        let polar = (p - center).angle();
        if let Some(last) = next.last_angle {
            next.swept = next.swept + sign * wrap_angle(polar - last);
        }
        next.last_angle = Some(polar);
        if next.swept >= F::TAU() {
            next.phase = IdentPhase::Done;
        }
    }
    // full speed when aligned, none beyond ALIGN_CUTOFF
    let cutoff = F::lit(ALIGN_CUTOFF).cos();
    let alignment = ((wrap_angle(desired_course - course).cos() - cutoff) / (F::one() - cutoff)).max(F::zero());
    let speed = speeds.clamp(cfg.orbit_speed.min(speeds.cruise) * alignment);
    Ok((GuidanceCommand::new(desired_course, speed), next))
}
