use super::{IdentError, IdentPhase, SeaCurrent};
use crate::command::{GuidanceCommand, SpeedLimits};
use crate::geometry::{inflate, ray_ellipse_intersection, Obstacle, Point2};
use crate::reactive::{nominal_speed, reactive_gradient, EscapeLatch, ReactiveConfig, ReactiveMethod};
use crate::{wrap_angle, Scalar};

#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize, serde::Deserialize)]
#[serde(default, deny_unknown_fields, bound(deserialize = "F: Scalar + serde::Deserialize<'de>"))]
pub struct AlignConfig<F> {
    /// Distance kept between the object boundary and the hold point.
    pub standoff: F,
    /// Growth of the object used while evading it.
    pub safety_margin: F,
    pub position_tolerance: F,
    pub course_tolerance: F,
    /// Gain from along-current range error to extra speed, 1/s.
    pub speed_gain: F,
    /// Lateral error is corrected with course offset `atan(error / lookahead)`.
    pub lateral_lookahead: F,
    /// Time both tolerances must hold before the maneuver is done, s.
    pub dwell_time: F,
}

impl<F: Scalar> Default for AlignConfig<F> {
    fn default() -> Self {
        Self {
            standoff: F::lit(10.0),
            safety_margin: F::lit(3.0),
            position_tolerance: F::lit(1.0),
            course_tolerance: F::lit(0.1),
            speed_gain: F::lit(0.1),
            lateral_lookahead: F::lit(10.0),
            dwell_time: F::lit(10.0),
        }
    }
}

impl<F: Scalar> AlignConfig<F> {
    pub fn validate(&self) -> Result<(), IdentError> {
        if !(self.standoff > F::zero()) {
            return Err(IdentError::InvalidConfig("standoff must be positive"));
        }
        if !(self.safety_margin >= F::zero()) {
            return Err(IdentError::InvalidConfig("safety_margin must be non-negative"));
        }
        if !(self.position_tolerance > F::zero()) || !(self.course_tolerance > F::zero()) {
            return Err(IdentError::InvalidConfig("tolerances must be positive"));
        }
        if !(self.lateral_lookahead > F::zero()) || !(self.dwell_time >= F::zero()) {
            return Err(IdentError::InvalidConfig("lookahead must be positive and dwell non-negative"));
        }
        Ok(())
    }
}

/// Hold point: where the ray from the object center along the current leaves the object
/// grown by `standoff + safety_margin`.
pub fn flow_shade_goal<F: Scalar>(
    o: &Obstacle<F>,
    current: SeaCurrent<F>,
    cfg: &AlignConfig<F>,
) -> Result<Point2<F>, IdentError> {
    let dir = current.direction().ok_or(IdentError::ZeroCurrent)?;
    let area = inflate(&o.ellipse, cfg.standoff + cfg.safety_margin)?;
    // the ray starts at the center, which is inside, so it always exits
    Ok(ray_ellipse_intersection(o.ellipse.center, dir, &area)?.expect("ray from center must exit"))
}

/// Positioning downstream of the line through the object center across the current,
/// Evasive on or upstream of it. Without current every point is Positioning.
pub fn alignment_mode<F: Scalar>(p: Point2<F>, o: &Obstacle<F>, current: SeaCurrent<F>) -> IdentPhase {
    match current.direction() {
        Some(dir) if (p - o.ellipse.center).dot(dir) <= F::zero() => IdentPhase::Evasive,
        _ => IdentPhase::Positioning,
    }
}

/// Maneuver state threaded through successive [`align_command`] calls.
#[derive(Debug, Clone, PartialEq)]
pub struct AlignState<F> {
    pub phase: IdentPhase,
    /// Time the hold tolerances have been met without interruption, s.
    pub dwell: F,
    pub latch: EscapeLatch,
}

impl<F: Scalar> AlignState<F> {
    pub fn start(p: Point2<F>, o: &Obstacle<F>, current: SeaCurrent<F>) -> Self {
        Self { phase: alignment_mode(p, o, current), dwell: F::zero(), latch: EscapeLatch::default() }
    }
}

/// Hold point and the heading to hold there. Without current the vehicle faces the object
/// from the side it is on.
fn hold_target<F: Scalar>(
    p: Point2<F>,
    o: &Obstacle<F>,
    current: SeaCurrent<F>,
    cfg: &AlignConfig<F>,
) -> Result<(Point2<F>, Point2<F>), IdentError> {
    match current.direction() {
        Some(dir) => Ok((flow_shade_goal(o, current, cfg)?, -dir)),
        None => {
            let out = (p - o.ellipse.center).normalized().ok_or(IdentError::AtCenter)?;
            let area = inflate(&o.ellipse, cfg.standoff + cfg.safety_margin)?;
            let goal = ray_ellipse_intersection(o.ellipse.center, out, &area)?.expect("ray from center must exit");
            Ok((goal, -out))
        }
    }
}

/// One step of the aligning maneuver.
///
/// * Evasive: geometric reactive guidance around the object grown by the safety margin,
///   toward the flow-shade goal, until the vehicle crosses into the downstream half-plane.
/// * Positioning: nose into the current with a lateral course correction; speed is the
///   current magnitude plus `speed_gain` times the along-current range error, so the vehicle
///   drifts onto the goal and holds there.
/// * Done once position and course tolerances held for `dwell_time`.
#[allow(clippy::too_many_arguments)]
pub fn align_command<F: Scalar>(
    p: Point2<F>,
    course: F,
    o: &Obstacle<F>,
    current: SeaCurrent<F>,
    cfg: &AlignConfig<F>,
    speeds: &SpeedLimits<F>,
    state: &AlignState<F>,
    dt: F,
) -> Result<(GuidanceCommand<F>, AlignState<F>), IdentError> {
    let mut next = state.clone();
    let (goal, face) = hold_target(p, o, current, cfg)?;
    let hold_course = face.angle();

    if next.phase == IdentPhase::Evasive {
        if alignment_mode(p, o, current) == IdentPhase::Positioning {
            next.phase = IdentPhase::Positioning;
        } else {
            let grown = o.inflated(cfg.safety_margin)?;
            let rcfg = ReactiveConfig {
                method: ReactiveMethod::Geometric,
                margin: F::zero(),
                capture_radius: cfg.position_tolerance,
                ..ReactiveConfig::default()
            };
            let g = reactive_gradient(p, std::slice::from_ref(&grown), goal, &rcfg, &mut next.latch)?;
            let speed = nominal_speed(p.distance(goal), speeds.cruise, cfg.position_tolerance);
            return Ok((GuidanceCommand::new(g.direction.angle(), speeds.clamp(speed)), next));
        }
    }

    match next.phase {
        IdentPhase::Positioning | IdentPhase::Done => {
            let offset = p - goal;
            // positive when the vehicle sits downstream of the goal and has to advance
            let along = -offset.dot(face);
            let lateral = offset.dot(face.perp());
            let desired_course = hold_course - (lateral / cfg.lateral_lookahead).atan();
            let speed = speeds.clamp(current.magnitude() + cfg.speed_gain * along);

            if next.phase == IdentPhase::Positioning {
                let holding = offset.norm() < cfg.position_tolerance
                    && wrap_angle(course - hold_course).abs() < cfg.course_tolerance;
                next.dwell = if holding { next.dwell + dt } else { F::zero() };
                if next.dwell >= cfg.dwell_time {
                    next.phase = IdentPhase::Done;
                }
            }
            Ok((GuidanceCommand::new(desired_course, speed), next))
        }
        other => Err(IdentError::WrongPhase(other)),
    }
}
