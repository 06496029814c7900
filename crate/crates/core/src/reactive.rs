//! Reactive gradient-line guidance.
//!
//! Both methods turn the current vehicle position, the goal and the nearby obstacles (as
//! security circles) into a unit direction, the gradient `G`, whose angle is the nominal
//! course handed to the autopilot.
//!
//! * [`ReactiveMethod::Dipole`]: potential flow made of a unit sink at the goal plus one
//!   doublet per obstacle, sized with the circle theorem so each security circle is close to a
//!   streamline. A vehicle inside a circle where the flow points inward escapes radially.
//! * [`ReactiveMethod::Geometric`]: the plane is split into sectors per obstacle. With a clear
//!   line to the goal (sector 2) the vehicle heads straight for it; when the line is blocked
//!   (sector 1) it steers for the tangent point on the side of the symmetry axis it is on;
//!   inside the circle (sector 3) it escapes radially.

use serde::{Deserialize, Serialize};

use crate::geometry::{
    point_segment_distance, security_circle, tangent_points, GeometryError, Obstacle, Point2, SecurityCircle,
};
use crate::Scalar;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ReactiveMethod {
    Dipole,
    Geometric,
}

impl std::fmt::Display for ReactiveMethod {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Self::Dipole => "dipole",
            Self::Geometric => "geometric",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum SectorClass {
    /// View to the goal blocked by the circle: tangent steering.
    Sector1,
    /// Direct line to the goal.
    Sector2,
    /// Inside the security circle.
    Sector3,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ReactiveConfig<F> {
    pub method: ReactiveMethod,
    /// Added to the semi-major axis to form the security circle.
    pub margin: F,
    pub capture_radius: F,
    /// Sector-3 exit radius as a multiple of the circle radius.
    pub hysteresis: F,
    /// Distance below which the doublet field is evaluated as if at this distance.
    pub epsilon_singularity: F,
    /// Depth inside the security circle that still counts as being on it: the geometric
    /// method steers along the local tangent there instead of escaping radially.
    pub graze_tolerance: F,
}

impl<F: Scalar> Default for ReactiveConfig<F> {
    fn default() -> Self {
        Self {
            method: ReactiveMethod::Geometric,
            margin: F::lit(3.0),
            capture_radius: F::lit(2.0),
            hysteresis: F::lit(1.05),
            epsilon_singularity: F::lit(0.1),
            graze_tolerance: F::zero(),
        }
    }
}

impl<F: Scalar> ReactiveConfig<F> {
    pub fn validate(&self) -> Result<(), ReactiveError> {
        if !(self.margin >= F::zero()) {
            return Err(ReactiveError::InvalidConfig("margin must be non-negative"));
        }
        if !(self.capture_radius > F::zero()) {
            return Err(ReactiveError::InvalidConfig("capture_radius must be positive"));
        }
        if !(self.hysteresis >= F::one()) {
            return Err(ReactiveError::InvalidConfig("hysteresis must be at least 1"));
        }
        if !(self.epsilon_singularity > F::zero()) {
            return Err(ReactiveError::InvalidConfig("epsilon_singularity must be positive"));
        }
        if !(self.graze_tolerance >= F::zero()) {
            return Err(ReactiveError::InvalidConfig("graze_tolerance must be non-negative"));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GradientSample<F> {
    pub direction: Point2<F>,
    /// Sector of the active obstacle (geometric method only).
    pub active_sector: Option<SectorClass>,
    /// Index of the active circle in the input slice (geometric method only).
    pub active: Option<usize>,
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum ReactiveError {
    #[error("vehicle position coincides with the goal")]
    GoalReached,
    #[error("invalid reactive configuration: {0}")]
    InvalidConfig(&'static str),
    #[error(transparent)]
    Geometry(#[from] GeometryError),
}

fn goal_direction<F: Scalar>(p: Point2<F>, g: Point2<F>) -> Result<Point2<F>, ReactiveError> {
    (g - p).normalized().ok_or(ReactiveError::GoalReached)
}

fn blocks<F: Scalar>(p: Point2<F>, c: &SecurityCircle<F>, g: Point2<F>) -> bool {
    point_segment_distance(c.center, p, g) < c.radius
}

/// Sector of `p` with respect to one circle and the goal `g`.
///
/// Sector 3 is strict (`|p − center| < R`); hysteresis is the caller's business.
pub fn classify_sector<F: Scalar>(p: Point2<F>, circle: &SecurityCircle<F>, g: Point2<F>) -> SectorClass {
    if circle.strictly_contains(p) {
        SectorClass::Sector3
    } else if blocks(p, circle, g) {
        SectorClass::Sector1
    } else {
        SectorClass::Sector2
    }
}

/// Geometric construction without escape memory. See [`geometric_gradient_latched`].
pub fn geometric_gradient<F: Scalar>(
    p: Point2<F>,
    circles: &[SecurityCircle<F>],
    g: Point2<F>,
    cfg: &ReactiveConfig<F>,
) -> Result<GradientSample<F>, ReactiveError> {
    geometric_gradient_latched(p, circles, g, cfg, None)
}

/// Geometric construction.
///
/// The active circle is the one with the center nearest to `p` among those that contain `p`
/// or block the segment to the goal. `latched` names a circle whose sector-3 escape is still
/// in progress: it stays in sector 3 until `p` leaves `hysteresis · R`. Points less than
/// `graze_tolerance` inside a circle are steered as if on it and reported as sector 1.
pub fn geometric_gradient_latched<F: Scalar>(
    p: Point2<F>,
    circles: &[SecurityCircle<F>],
    g: Point2<F>,
    cfg: &ReactiveConfig<F>,
    latched: Option<usize>,
) -> Result<GradientSample<F>, ReactiveError> {
    let to_goal = goal_direction(p, g)?;
    let mut best: Option<(usize, SectorClass, F)> = None;
    for (k, c) in circles.iter().enumerate() {
        let d = p.distance(c.center);
        let sector = if d < c.radius - cfg.graze_tolerance || (latched == Some(k) && d < c.radius * cfg.hysteresis) {
            SectorClass::Sector3
        } else if d < c.radius || blocks(p, c, g) {
            SectorClass::Sector1
        } else {
            continue;
        };
        if best.is_none_or(|(_, _, bd)| d < bd) {
            best = Some((k, sector, d));
        }
    }
    let Some((k, sector, d)) = best else {
        return Ok(GradientSample { direction: to_goal, active_sector: Some(SectorClass::Sector2), active: None });
    };
    let c = &circles[k];
    let direction = match sector {
        SectorClass::Sector3 => (p - c.center).normalized().unwrap_or_else(|| to_goal.perp()),
        _ => {
            let side = (g - c.center).cross(p - c.center);
            let left = side >= F::zero();
            if d > c.radius * (F::one() + F::tolerance()) {
                let (l, r) = tangent_points(p, c)?;
                let t = if left { l } else { r };
                (t - p).normalized().unwrap_or(to_goal)
            } else {
                // on the circle: the tangent line degenerates to the local tangent direction
                let u = (p - c.center) * (F::one() / d);
                if left {
                    -u.perp()
                } else {
                    u.perp()
                }
            }
        }
    };
    Ok(GradientSample { direction, active_sector: Some(sector), active: Some(k) })
}

/// Unnormalized dipole-method velocity field at `p`.
pub fn dipole_velocity<F: Scalar>(
    p: Point2<F>,
    circles: &[SecurityCircle<F>],
    g: Point2<F>,
    cfg: &ReactiveConfig<F>,
) -> Result<Point2<F>, ReactiveError> {
    let sink = |q: Point2<F>| -> Point2<F> {
        let r = q - g;
        r * (-F::one() / r.norm_squared())
    };
    if p == g {
        return Err(ReactiveError::GoalReached);
    }
    let mut v = sink(p);
    for c in circles {
        let ambient = if c.center == g { Point2::origin() } else { sink(c.center) };
        let r = p - c.center;
        let dist = r.norm();
        let r_hat = if dist > F::zero() { r * (F::one() / dist) } else { Point2::new(F::one(), F::zero()) };
        let rho = dist.max(cfg.epsilon_singularity);
        let k = c.radius * c.radius / (rho * rho);
        v += (ambient - r_hat * (F::two() * ambient.dot(r_hat))) * k;
    }
    Ok(v)
}

/// Dipole method: direction of a unit sink at the goal plus one circle-theorem doublet per
/// obstacle, each doublet sized against the sink flow at its center. Interactions between
/// obstacles are not imaged, so several close circles are only approximately streamlines.
pub fn dipole_field<F: Scalar>(
    p: Point2<F>,
    circles: &[SecurityCircle<F>],
    g: Point2<F>,
    cfg: &ReactiveConfig<F>,
) -> Result<GradientSample<F>, ReactiveError> {
    let to_goal = goal_direction(p, g)?;
    if circles.is_empty() {
        return Ok(GradientSample { direction: to_goal, active_sector: None, active: None });
    }
    let v = dipole_velocity(p, circles, g, cfg)?;
    Ok(GradientSample { direction: v.normalized().unwrap_or(to_goal), active_sector: None, active: None })
}

/// Sector-3 escape memory for the geometric method, owned by the caller.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct EscapeLatch {
    pub obstacle_id: Option<String>,
}

/// Gradient for the configured method with obstacles converted to security circles.
/// Updates the escape latch.
pub fn reactive_gradient<F: Scalar>(
    p: Point2<F>,
    obstacles: &[Obstacle<F>],
    g: Point2<F>,
    cfg: &ReactiveConfig<F>,
    latch: &mut EscapeLatch,
) -> Result<GradientSample<F>, ReactiveError> {
    let circles = obstacles.iter().map(|o| security_circle(o, cfg.margin)).collect::<Result<Vec<_>, _>>()?;
    let latched = latch.obstacle_id.as_ref().and_then(|id| obstacles.iter().position(|o| &o.id == id));
    match cfg.method {
        ReactiveMethod::Dipole => {
            // Inside a circle the doublet reverses the normal flow, which pulls inward on the
            // downstream half. Where it does, the vehicle escapes radially as in sector 3.
            let field = dipole_velocity(p, &circles, g, cfg)?;
            let inside = circles
                .iter()
                .enumerate()
                .map(|(k, c)| (k, p.distance(c.center), c))
                .filter(|&(k, d, c)| {
                    let inward = field.dot(p - c.center) < F::zero();
                    (inward && d < c.radius - cfg.graze_tolerance)
                        || (Some(k) == latched && d < c.radius * cfg.hysteresis)
                })
                .min_by(|a, b| {
                    (a.1 / a.2.radius).partial_cmp(&(b.1 / b.2.radius)).unwrap_or(std::cmp::Ordering::Equal)
                });
            match inside {
                Some((k, _, c)) => {
                    latch.obstacle_id = Some(obstacles[k].id.clone());
                    let direction = match (p - c.center).normalized() {
                        Some(out) => out,
                        None => goal_direction(p, g)?,
                    };
                    Ok(GradientSample { direction, active_sector: Some(SectorClass::Sector3), active: Some(k) })
                }
                None => {
                    latch.obstacle_id = None;
                    dipole_field(p, &circles, g, cfg)
                }
            }
        }
        ReactiveMethod::Geometric => {
            let sample = geometric_gradient_latched(p, &circles, g, cfg, latched)?;
            latch.obstacle_id = match (sample.active_sector, sample.active) {
                (Some(SectorClass::Sector3), Some(k)) => Some(obstacles[k].id.clone()),
                _ => None,
            };
            Ok(sample)
        }
    }
}

/// Desired course (radians) from the reactive gradient.
pub fn reactive_course<F: Scalar>(
    p: Point2<F>,
    obstacles: &[Obstacle<F>],
    g: Point2<F>,
    cfg: &ReactiveConfig<F>,
    latch: &mut EscapeLatch,
) -> Result<F, ReactiveError> {
    Ok(reactive_gradient(p, obstacles, g, cfg, latch)?.direction.angle())
}

/// Cruise speed, ramped linearly down to 0.5 m/s between three capture radii and one
/// capture radius from the goal.
pub fn nominal_speed<F: Scalar>(distance_to_goal: F, cruise: F, capture_radius: F) -> F {
    let floor = F::lit(0.5).min(cruise);
    let outer = capture_radius * F::lit(3.0);
    if distance_to_goal >= outer {
        return cruise;
    }
    let frac = ((distance_to_goal - capture_radius) / (outer - capture_radius)).max(F::zero());
    floor + (cruise - floor) * frac
}

/// One glyph of a sampled direction field.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FieldSample<F> {
    pub position: Point2<F>,
    pub direction: Point2<F>,
    pub sector: Option<SectorClass>,
}

/// Samples the direction field on an `nx × ny` grid spanning `min`–`max` (inclusive).
/// Grid points coinciding with the goal are skipped.
pub fn sample_direction_field<F: Scalar>(
    circles: &[SecurityCircle<F>],
    g: Point2<F>,
    cfg: &ReactiveConfig<F>,
    min: Point2<F>,
    max: Point2<F>,
    nx: usize,
    ny: usize,
) -> Vec<FieldSample<F>> {
    let step = |lo: F, hi: F, n: usize, i: usize| {
        if n <= 1 {
            (lo + hi) / F::two()
        } else {
            lo + (hi - lo) * F::from_usize(i).unwrap() / F::from_usize(n - 1).unwrap()
        }
    };
    let mut out = Vec::with_capacity(nx * ny);
    for j in 0..ny {
        for i in 0..nx {
            let position = Point2::new(step(min.x, max.x, nx, i), step(min.y, max.y, ny, j));
            let sample = match cfg.method {
                ReactiveMethod::Dipole => dipole_field(position, circles, g, cfg),
                ReactiveMethod::Geometric => geometric_gradient(position, circles, g, cfg),
            };
            if let Ok(s) = sample {
                out.push(FieldSample { position, direction: s.direction, sector: s.active_sector });
            }
        }
    }
    out
}
