use approx::assert_abs_diff_eq;
use deepc_guidance::command::SpeedLimits;
use deepc_guidance::geometry::{inflate, nearest_boundary_point, outward_normal, Ellipse, Obstacle, Point2};
use deepc_guidance::identification::{
    alignment_mode, flow_shade_goal, orbit_command, orbit_distance_error, AlignConfig, IdentPhase, OrbitConfig,
    OrbitDirection, OrbitState, SeaCurrent,
};
use deepc_guidance::sim::{autopilot_step, vehicle_step, VehicleParams, VehicleState};
use deepc_guidance::wrap_angle;
use proptest::prelude::*;

const SPEEDS: SpeedLimits<f64> = SpeedLimits { cruise: 2.06, max: 3.09 };

fn obstacle() -> impl Strategy<Value = Obstacle<f64>> {
    (-20.0..20.0, -20.0..20.0, 1.0..10.0, 0.0..10.0, -4.0..4.0)
        .prop_map(|(x, y, b, extra, th)| Obstacle::new("o", Ellipse::new(Point2::new(x, y), b + extra, b, th).unwrap()))
}

fn current() -> impl Strategy<Value = SeaCurrent<f64>> {
    (-4.0..4.0, 0.05..1.5).prop_map(|(angle, speed)| {
        let v = Point2::from_angle(angle) * speed;
        SeaCurrent::new(v.x, v.y)
    })
}

fn direction() -> impl Strategy<Value = OrbitDirection> {
    prop_oneof![Just(OrbitDirection::Clockwise), Just(OrbitDirection::Counterclockwise)]
}

fn implicit(p: Point2<f64>, e: &Ellipse<f64>) -> f64 {
    let q = e.to_local(p);
    (q.x / e.a).powi(2) + (q.y / e.b).powi(2)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn flow_shade_goal_is_downstream_on_safety_boundary(o in obstacle(), c in current()) {
        let cfg = AlignConfig::default();
        let goal = flow_shade_goal(&o, c, &cfg).unwrap();
        let area = inflate(&o.ellipse, cfg.standoff + cfg.safety_margin).unwrap();
        assert_abs_diff_eq!(implicit(goal, &area), 1.0, epsilon = 1e-9);
        prop_assert!((goal - o.ellipse.center).dot(c.velocity()) > 0.0);
    }

    #[test]
    fn alignment_mode_flips_with_current(o in obstacle(), c in current(), x in -60.0..60.0, y in -60.0..60.0) {
        let p = Point2::new(x, y);
        let mode = alignment_mode(p, &o, c);
        prop_assert!(matches!(mode, IdentPhase::Evasive | IdentPhase::Positioning));
        let v = c.velocity();
        if ((p - o.ellipse.center).dot(v) / v.norm()).abs() > 1e-9 {
            prop_assert_ne!(mode, alignment_mode(p, &o, SeaCurrent::new(-v.x, -v.y)));
        }
    }

    #[test]
    fn holding_into_the_current_is_a_fixed_point(c in current(), x in -60.0..60.0, y in -60.0..60.0) {
        let params = VehicleParams::default();
        let v = c.velocity();
        let state = VehicleState { position: Point2::new(x, y), course: (-v).angle(), speed: v.norm(), time: 0.0 };
        let next = vehicle_step(&state, 0.0, 0.0, c, &params);
        assert_abs_diff_eq!(next.position.x, x, epsilon = 1e-12);
        assert_abs_diff_eq!(next.position.y, y, epsilon = 1e-12);
    }

    #[test]
    fn on_orbit_tracking_follows_tangent(o in obstacle(), t in -4.0..4.0f64, dir in direction(), course in -4.0..4.0) {
        let cfg = OrbitConfig { direction: dir, ..Default::default() };
        let e = &o.ellipse;
        let b = e.from_local(Point2::new(e.a * t.cos(), e.b * t.sin()));
        let n = outward_normal(b, e).unwrap();
        let p = b + n * cfg.target_distance;
        prop_assume!(orbit_distance_error(p, &o, &cfg).abs() < 1e-9);
        let mut state = OrbitState::<f64>::default();
        state.phase = IdentPhase::Tracking;
        let (cmd, _) = orbit_command(p, course, &o, &cfg, &SPEEDS, &state).unwrap();
        let sign = if dir == OrbitDirection::Counterclockwise { 1.0 } else { -1.0 };
        let (nb, _) = nearest_boundary_point(p, e);
        let tangent = outward_normal(nb, e).unwrap().perp() * sign;
        assert_abs_diff_eq!(wrap_angle(cmd.desired_course - tangent.angle()), 0.0, epsilon = 1e-6);
    }

    #[test]
    fn swept_angle_never_decreases_while_tracking(o in obstacle(), dir in direction(), t in -4.0..4.0f64) {
        let cfg = OrbitConfig { direction: dir, ..Default::default() };
        let params = VehicleParams::default();
        let e = &o.ellipse;
        let b = e.from_local(Point2::new(e.a * t.cos(), e.b * t.sin()));
        let start = b + outward_normal(b, e).unwrap() * cfg.target_distance;
        let mut state = VehicleState { position: start, course: 0.0, speed: 0.0, time: 0.0 };
        let mut orbit = OrbitState::<f64>::default();
        orbit.phase = IdentPhase::Tracking;
        let still = SeaCurrent::new(0.0, 0.0);
        for _ in 0..2000 {
            let (cmd, next) = orbit_command(state.position, state.course, &o, &cfg, &SPEEDS, &orbit).unwrap();
            if orbit.phase == IdentPhase::Tracking && next.phase != IdentPhase::Steering {
                prop_assert!(next.swept >= orbit.swept, "swept {} after {}", next.swept, orbit.swept);
            }
            orbit = next;
            if orbit.phase == IdentPhase::Done {
                break;
            }
            let (r, a) = autopilot_step(&state, &cmd, &params);
            state = vehicle_step(&state, r, a, still, &params);
        }
    }
}
