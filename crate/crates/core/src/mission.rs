//! Mission plans: expansion of complex maneuvers into straight legs, progress along the
//! route, collision observation against the legs ahead and rendezvous point generation.

use std::collections::BTreeSet;

use crate::geometry::{inflate, Ellipse, GeometryError, Obstacle, Point2};
use crate::Scalar;

#[derive(Debug, Clone, PartialEq)]
pub enum ComplexManeuver<F> {
    Track {
        from: Point2<F>,
        to: Point2<F>,
        speed: F,
    },
    /// Lawnmower survey: lanes of `length` along `heading`, stacked to the left of the
    /// heading every `lane_spacing` across `width`, traversed in alternating directions.
    Meander {
        origin: Point2<F>,
        heading: F,
        length: F,
        width: F,
        lane_spacing: F,
        speed: F,
    },
    /// Recognized so it can be rejected explicitly; not supported.
    GpsUpdate,
}

/// Straight leg of the expanded plan.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BasisManeuver<F> {
    pub from: Point2<F>,
    pub to: Point2<F>,
    pub speed: F,
}

impl<F: Scalar> BasisManeuver<F> {
    pub fn length(&self) -> F {
        self.from.distance(self.to)
    }

    pub fn direction(&self) -> Point2<F> {
        (self.to - self.from).normalized().unwrap_or_default()
    }
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum MissionError {
    #[error("mission has no maneuvers")]
    Empty,
    #[error("{field}: {reason}")]
    InvalidField { field: String, reason: String },
    #[error("unsupported maneuver `{0}`")]
    Unsupported(String),
    #[error("leg {0} does not end where the next leg starts")]
    Unchained(usize),
    #[error("route is blocked up to its end")]
    RouteBlocked,
    #[error(transparent)]
    Geometry(#[from] GeometryError),
}

fn invalid(field: String, reason: &str) -> MissionError {
    MissionError::InvalidField { field, reason: reason.to_string() }
}

/// Ordered legs plus the ids of objects that should be identified when met.
#[derive(Debug, Clone, PartialEq)]
pub struct MissionPlan<F> {
    legs: Vec<BasisManeuver<F>>,
    pub identify_targets: BTreeSet<String>,
    // arc length at the start of each leg, plus the total at the end
    arc: Vec<F>,
}

impl<F: Scalar> MissionPlan<F> {
    pub fn new(legs: Vec<BasisManeuver<F>>, identify_targets: BTreeSet<String>) -> Result<Self, MissionError> {
        if legs.is_empty() {
            return Err(MissionError::Empty);
        }
        for (k, leg) in legs.iter().enumerate() {
            if leg.from == leg.to {
                return Err(invalid(format!("legs[{k}]"), "zero-length leg"));
            }
            if !(leg.speed > F::zero()) {
                return Err(invalid(format!("legs[{k}].speed"), "must be positive"));
            }
        }
        if let Some(k) = legs.windows(2).position(|w| w[0].to != w[1].from) {
            return Err(MissionError::Unchained(k));
        }
        let mut arc = Vec::with_capacity(legs.len() + 1);
        let mut s = F::zero();
        arc.push(s);
        for leg in &legs {
            s = s + leg.length();
            arc.push(s);
        }
        Ok(Self { legs, identify_targets, arc })
    }

    pub fn legs(&self) -> &[BasisManeuver<F>] {
        &self.legs
    }

    pub fn total_length(&self) -> F {
        self.arc[self.legs.len()]
    }

    pub fn leg_start_arc(&self, k: usize) -> F {
        self.arc[k]
    }

    pub fn start(&self) -> Point2<F> {
        self.legs[0].from
    }

    pub fn end(&self) -> Point2<F> {
        self.legs[self.legs.len() - 1].to
    }

    /// Leg index and route point at arc length `s` (clamped to the route).
    pub fn point_at(&self, s: F) -> (usize, Point2<F>) {
        let s = s.max(F::zero()).min(self.total_length());
        let k = (self.arc.partition_point(|&a| a <= s).max(1) - 1).min(self.legs.len() - 1);
        let leg = &self.legs[k];
        let d = (s - self.arc[k]).min(leg.length());
        (k, leg.from + leg.direction() * d)
    }

    /// Route polyline: every leg start plus the final end point.
    pub fn waypoints(&self) -> Vec<Point2<F>> {
        let mut pts: Vec<_> = self.legs.iter().map(|l| l.from).collect();
        pts.push(self.end());
        pts
    }
}

fn meander_legs<F: Scalar>(
    k: usize,
    origin: Point2<F>,
    heading: F,
    length: F,
    width: F,
    lane_spacing: F,
    speed: F,
) -> Result<Vec<BasisManeuver<F>>, MissionError> {
    let field = |name: &str| format!("maneuvers[{k}].{name}");
    for (name, v) in [("length", length), ("width", width), ("lane_spacing", lane_spacing), ("speed", speed)] {
        if !(v > F::zero()) || !v.is_finite() {
            return Err(invalid(field(name), "must be positive"));
        }
    }
    if !heading.is_finite() || !origin.is_finite() {
        return Err(invalid(field("heading"), "must be finite"));
    }
    let lanes = (width / lane_spacing * (F::one() + F::tolerance())).floor().to_usize().unwrap() + 1;
    let along = Point2::from_angle(heading) * length;
    let across = Point2::from_angle(heading).perp() * lane_spacing;
    let mut legs = Vec::with_capacity(2 * lanes - 1);
    for i in 0..lanes {
        let base = origin + across * F::from_usize(i).unwrap();
        let (a, b) = if i % 2 == 0 { (base, base + along) } else { (base + along, base) };
        if let Some(prev) = legs.last().map(|l: &BasisManeuver<F>| l.to) {
            legs.push(BasisManeuver { from: prev, to: a, speed });
        }
        legs.push(BasisManeuver { from: a, to: b, speed });
    }
    Ok(legs)
}

/// Converts complex maneuvers into chained straight legs. Consecutive maneuvers that do not
/// share an endpoint are joined by a connector leg flown at the next maneuver's speed.
pub fn expand_mission<F: Scalar>(
    maneuvers: &[ComplexManeuver<F>],
    identify_targets: BTreeSet<String>,
) -> Result<MissionPlan<F>, MissionError> {
    if maneuvers.is_empty() {
        return Err(MissionError::Empty);
    }
    let mut legs: Vec<BasisManeuver<F>> = Vec::new();
    for (k, m) in maneuvers.iter().enumerate() {
        let new_legs = match *m {
            ComplexManeuver::Track { from, to, speed } => {
                if !(speed > F::zero()) || !speed.is_finite() {
                    return Err(invalid(format!("maneuvers[{k}].speed"), "must be positive"));
                }
                if !from.is_finite() || !to.is_finite() {
                    return Err(invalid(format!("maneuvers[{k}].to"), "must be finite"));
                }
                if from == to {
                    return Err(invalid(format!("maneuvers[{k}].to"), "must differ from `from`"));
                }
                vec![BasisManeuver { from, to, speed }]
            }
            ComplexManeuver::Meander { origin, heading, length, width, lane_spacing, speed } => {
                meander_legs(k, origin, heading, length, width, lane_spacing, speed)?
            }
            ComplexManeuver::GpsUpdate => return Err(MissionError::Unsupported("gps_update".into())),
        };
        if let (Some(prev), Some(first)) = (legs.last(), new_legs.first()) {
            if prev.to != first.from {
                legs.push(BasisManeuver { from: prev.to, to: first.from, speed: first.speed });
            }
        }
        legs.extend(new_legs);
    }
    MissionPlan::new(legs, identify_targets)
}

/// Position along the route. `arc_length` never decreases.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct RouteProgress<F> {
    pub leg_index: usize,
    pub arc_length: F,
}

/// Nearest route point at or ahead of `prev`, searching the current and later legs.
/// Ties go to the earlier leg.
pub fn project_onto_route<F: Scalar>(p: Point2<F>, plan: &MissionPlan<F>, prev: RouteProgress<F>) -> RouteProgress<F> {
    let mut best = prev;
    let mut best_d = F::infinity();
    for k in prev.leg_index..plan.legs.len() {
        let leg = &plan.legs[k];
        let len = leg.length();
        let t_min = if k == prev.leg_index {
            ((prev.arc_length - plan.arc[k]) / len).max(F::zero()).min(F::one())
        } else {
            F::zero()
        };
        let t = ((p - leg.from).dot(leg.to - leg.from) / (len * len)).max(t_min).min(F::one());
        let d = p.distance(leg.from.lerp(leg.to, t));
        if d < best_d {
            best_d = d;
            best = RouteProgress { leg_index: k, arc_length: (plan.arc[k] + t * len).max(prev.arc_length) };
        }
    }
    best
}

/// Portion of one leg that runs through an inflated object.
#[derive(Debug, Clone, PartialEq)]
pub struct Conflict<F> {
    pub leg_index: usize,
    pub obstacle_id: String,
    pub entry_arc_length: F,
    pub exit_arc_length: F,
}

fn inflated<F: Scalar>(objects: &[Obstacle<F>], margin: F) -> Result<Vec<Ellipse<F>>, MissionError> {
    Ok(objects.iter().map(|o| inflate(&o.ellipse, margin)).collect::<Result<Vec<_>, GeometryError>>()?)
}

fn conflicts_in_window<F: Scalar>(
    plan: &MissionPlan<F>,
    objects: &[Obstacle<F>],
    grown: &[Ellipse<F>],
    from: F,
    to: F,
) -> Vec<Conflict<F>> {
    let mut out = Vec::new();
    for (k, leg) in plan.legs.iter().enumerate() {
        let (a, b) = (plan.arc[k], plan.arc[k + 1]);
        let lo = a.max(from);
        let hi = b.min(to);
        if lo > hi || (lo == hi && hi < to) {
            continue;
        }
        let len = leg.length();
        let p_lo = leg.from.lerp(leg.to, (lo - a) / len);
        let p_hi = leg.from.lerp(leg.to, (hi - a) / len);
        for (o, e) in objects.iter().zip(grown) {
            if let Some((t0, t1)) = e.segment_overlap(p_lo, p_hi) {
                out.push(Conflict {
                    leg_index: k,
                    obstacle_id: o.id.clone(),
                    entry_arc_length: lo + t0 * (hi - lo),
                    exit_arc_length: lo + t1 * (hi - lo),
                });
            }
        }
    }
    out.sort_by(|x, y| {
        x.entry_arc_length
            .partial_cmp(&y.entry_arc_length)
            .unwrap_or(std::cmp::Ordering::Equal)
            .then(x.leg_index.cmp(&y.leg_index))
            .then_with(|| x.obstacle_id.cmp(&y.obstacle_id))
    });
    out
}

/// Conflicts between the route ahead (`progress` to `progress + lookahead`) and the objects
/// grown by `margin`, sorted by entry arc length.
pub fn collision_observation<F: Scalar>(
    plan: &MissionPlan<F>,
    progress: RouteProgress<F>,
    objects: &[Obstacle<F>],
    margin: F,
    lookahead: F,
) -> Result<Vec<Conflict<F>>, MissionError> {
    let grown = inflated(objects, margin)?;
    let from = progress.arc_length;
    Ok(conflicts_in_window(plan, objects, &grown, from, (from + lookahead).min(plan.total_length())))
}

/// Rendezvous with the route after avoidance or identification.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Rendezvous<F> {
    pub arc_length: F,
    pub leg_index: usize,
    pub point: Point2<F>,
}

/// First route sample past the nearest conflict that lies outside every grown object and is
/// followed by `clear_run` meters (or the rest of the route) free of conflicts.
///
/// Samples are taken every `step` meters from `progress`. With no conflict ahead the current
/// route point is returned.
pub fn goal_point_generation<F: Scalar>(
    plan: &MissionPlan<F>,
    progress: RouteProgress<F>,
    objects: &[Obstacle<F>],
    margin: F,
    clear_run: F,
    step: F,
) -> Result<Rendezvous<F>, MissionError> {
    if !(step > F::zero()) {
        return Err(invalid("step".into(), "must be positive"));
    }
    if !(clear_run >= F::zero()) {
        return Err(invalid("clear_run".into(), "must be non-negative"));
    }
    let grown = inflated(objects, margin)?;
    let total = plan.total_length();
    let s0 = progress.arc_length.min(total);
    let ahead = conflicts_in_window(plan, objects, &grown, s0, total);
    let first_k = match ahead.first() {
        None => {
            let (leg_index, point) = plan.point_at(s0);
            return Ok(Rendezvous { arc_length: s0, leg_index, point });
        }
        Some(c) => ((c.entry_arc_length - s0) / step).ceil().max(F::zero()).to_usize().unwrap(),
    };
    let mut k = first_k;
    loop {
        let lambda = s0 + step * F::from_usize(k).unwrap();
        if lambda > total {
            return Err(MissionError::RouteBlocked);
        }
        let (leg_index, point) = plan.point_at(lambda);
        if grown.iter().all(|e| e.implicit(point) > F::one() + F::tolerance())
            && conflicts_in_window(plan, objects, &grown, lambda, (lambda + clear_run).min(total)).is_empty()
        {
            return Ok(Rendezvous { arc_length: lambda, leg_index, point });
        }
        k += 1;
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(x: f64, y: f64) -> Point2<f64> {
        Point2::new(x, y)
    }

    fn track(a: Point2<f64>, b: Point2<f64>) -> ComplexManeuver<f64> {
        ComplexManeuver::Track { from: a, to: b, speed: 2.06 }
    }

    fn straight() -> MissionPlan<f64> {
        expand_mission(&[track(p(0.0, 0.0), p(100.0, 0.0))], BTreeSet::new()).unwrap()
    }

    fn circle(id: &str, x: f64, y: f64, r: f64) -> Obstacle<f64> {
        Obstacle::new(id, Ellipse::circle(p(x, y), r).unwrap())
    }

    #[test]
    fn expand_examples() {
        assert_eq!(straight().legs().len(), 1);

        let m = ComplexManeuver::Meander {
            origin: p(0.0, 0.0),
            heading: 0.0,
            length: 100.0,
            width: 20.0,
            lane_spacing: 10.0,
            speed: 2.06,
        };
        let plan = expand_mission(&[m], BTreeSet::new()).unwrap();
        let legs = plan.legs();
        assert_eq!(legs.len(), 5);
        assert_eq!((legs[0].from, legs[0].to), (p(0.0, 0.0), p(100.0, 0.0)));
        assert_eq!((legs[1].from, legs[1].to), (p(100.0, 0.0), p(100.0, 10.0)));
        assert_eq!((legs[2].from, legs[2].to), (p(100.0, 10.0), p(0.0, 10.0)));
        assert_eq!((legs[4].from, legs[4].to), (p(0.0, 20.0), p(100.0, 20.0)));
        assert_eq!(plan.total_length(), 320.0);

        let two =
            expand_mission(&[track(p(0.0, 0.0), p(10.0, 0.0)), track(p(10.0, 0.0), p(10.0, 10.0))], BTreeSet::new())
                .unwrap();
        assert_eq!(two.legs().len(), 2);
        let gap =
            expand_mission(&[track(p(0.0, 0.0), p(10.0, 0.0)), track(p(20.0, 0.0), p(20.0, 10.0))], BTreeSet::new())
                .unwrap();
        assert_eq!(gap.legs().len(), 3);
        assert_eq!(gap.legs()[1].from, p(10.0, 0.0));
    }

    #[test]
    fn expand_errors() {
        assert_eq!(expand_mission::<f64>(&[], BTreeSet::new()), Err(MissionError::Empty));
        let bad = ComplexManeuver::Track { from: p(0.0, 0.0), to: p(1.0, 0.0), speed: -1.0 };
        match expand_mission(&[bad], BTreeSet::new()) {
            Err(MissionError::InvalidField { field, .. }) => assert_eq!(field, "maneuvers[0].speed"),
            other => panic!("{other:?}"),
        }
        let m = ComplexManeuver::Meander {
            origin: p(0.0, 0.0),
            heading: 0.0,
            length: 10.0,
            width: 5.0,
            lane_spacing: 0.0,
            speed: 1.0,
        };
        match expand_mission(&[track(p(0.0, 0.0), p(1.0, 0.0)), m], BTreeSet::new()) {
            Err(MissionError::InvalidField { field, .. }) => assert_eq!(field, "maneuvers[1].lane_spacing"),
            other => panic!("{other:?}"),
        }
        assert_eq!(
            expand_mission::<f64>(&[ComplexManeuver::GpsUpdate], BTreeSet::new()),
            Err(MissionError::Unsupported("gps_update".into()))
        );
    }

    #[test]
    fn projection_examples() {
        let plan = straight();
        let r = project_onto_route(p(50.0, 3.0), &plan, RouteProgress::default());
        assert_eq!((r.leg_index, r.arc_length), (0, 50.0));

        // legs 0 and 2 of a meander are 20 m apart; a point midway projects to leg 2
        let m = ComplexManeuver::Meander {
            origin: p(0.0, 0.0),
            heading: 0.0,
            length: 100.0,
            width: 20.0,
            lane_spacing: 20.0,
            speed: 2.0,
        };
        let plan = expand_mission(&[m], BTreeSet::new()).unwrap();
        let prev = RouteProgress { leg_index: 2, arc_length: 130.0 };
        let r = project_onto_route(p(50.0, 10.0), &plan, prev);
        assert_eq!(r.leg_index, 2);
        assert_eq!(r.arc_length, 170.0);
        // from the start the same point ties between legs 0 and 2 and goes to leg 0
        let r = project_onto_route(p(50.0, 10.0), &plan, RouteProgress::default());
        assert_eq!(r.leg_index, 0);
        // never backwards
        let r = project_onto_route(p(0.0, 0.0), &straight(), RouteProgress { leg_index: 0, arc_length: 30.0 });
        assert_eq!(r.arc_length, 30.0);
    }

    #[test]
    fn observation_examples() {
        let plan = straight();
        assert!(collision_observation(&plan, RouteProgress::default(), &[], 0.0, 200.0).unwrap().is_empty());
        let c =
            collision_observation(&plan, RouteProgress::default(), &[circle("o", 50.0, 0.0, 5.0)], 0.0, 200.0).unwrap();
        assert_eq!(c.len(), 1);
        assert!((c[0].entry_arc_length - 45.0).abs() < 1e-6);
        assert!((c[0].exit_arc_length - 55.0).abs() < 1e-6);
        assert_eq!(c[0].obstacle_id, "o");
        let far =
            collision_observation(&plan, RouteProgress::default(), &[circle("o", 50.0, 0.0, 5.0)], 0.0, 30.0).unwrap();
        assert!(far.is_empty());
        // the window starts inside the object
        let inside = collision_observation(
            &plan,
            RouteProgress { leg_index: 0, arc_length: 50.0 },
            &[circle("o", 50.0, 0.0, 5.0)],
            0.0,
            200.0,
        )
        .unwrap();
        assert_eq!((inside[0].entry_arc_length, inside[0].exit_arc_length), (50.0, 55.0));
    }

    #[test]
    fn rendezvous_examples() {
        let plan = straight();
        let r = goal_point_generation(&plan, RouteProgress { leg_index: 0, arc_length: 12.0 }, &[], 0.0, 20.0, 1.0)
            .unwrap();
        assert_eq!((r.arc_length, r.point), (12.0, p(12.0, 0.0)));

        let obs = [circle("o", 50.0, 0.0, 5.0)];
        let r = goal_point_generation(&plan, RouteProgress::default(), &obs, 0.0, 20.0, 1.0).unwrap();
        assert_eq!(r.arc_length, 56.0);
        assert_eq!(r.point, p(56.0, 0.0));

        let end = [circle("e", 100.0, 0.0, 5.0)];
        assert_eq!(
            goal_point_generation(&plan, RouteProgress::default(), &end, 0.0, 20.0, 1.0),
            Err(MissionError::RouteBlocked)
        );
    }

    #[test]
    fn point_at_clamps() {
        let plan =
            expand_mission(&[track(p(0.0, 0.0), p(10.0, 0.0)), track(p(10.0, 0.0), p(10.0, 10.0))], BTreeSet::new())
                .unwrap();
        assert_eq!(plan.point_at(-1.0), (0, p(0.0, 0.0)));
        assert_eq!(plan.point_at(10.0), (1, p(10.0, 0.0)));
        assert_eq!(plan.point_at(15.0), (1, p(10.0, 5.0)));
        assert_eq!(plan.point_at(99.0), (1, p(10.0, 10.0)));
    }
}
