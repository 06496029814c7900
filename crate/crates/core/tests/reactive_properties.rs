use approx::assert_abs_diff_eq;
use deepc_guidance::geometry::{point_segment_distance, Point2, SecurityCircle};
use deepc_guidance::reactive::{
    classify_sector, dipole_field, geometric_gradient, ReactiveConfig, ReactiveMethod, SectorClass,
};
use proptest::prelude::*;

fn point() -> impl Strategy<Value = Point2<f64>> {
    (-60.0..60.0, -60.0..60.0).prop_map(|(x, y)| Point2::new(x, y))
}

fn circle() -> impl Strategy<Value = SecurityCircle<f64>> {
    (-30.0..30.0, -30.0..30.0, 1.0..12.0).prop_map(|(x, y, r)| SecurityCircle::new(Point2::new(x, y), r).unwrap())
}

fn cfg(method: ReactiveMethod) -> ReactiveConfig<f64> {
    ReactiveConfig { method, ..Default::default() }
}

// closest distance from the center to the ray p + s·dir, s ≥ 0
fn ray_distance(p: Point2<f64>, dir: Point2<f64>, c: Point2<f64>) -> f64 {
    let s = (c - p).dot(dir).max(0.0);
    c.distance(p + dir * s)
}

fn field(method: ReactiveMethod, p: Point2<f64>, circles: &[SecurityCircle<f64>], g: Point2<f64>) -> Point2<f64> {
    let c = cfg(method);
    match method {
        ReactiveMethod::Geometric => geometric_gradient(p, circles, g, &c).unwrap().direction,
        ReactiveMethod::Dipole => dipole_field(p, circles, g, &c).unwrap().direction,
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(512))]

    #[test]
    fn free_space_heads_for_goal(p in point(), g in point()) {
        prop_assume!(p != g);
        let want = (g - p).normalized().unwrap();
        for m in [ReactiveMethod::Geometric, ReactiveMethod::Dipole] {
            prop_assert_eq!(field(m, p, &[], g), want);
        }
    }

    #[test]
    fn sector_one_is_tangent(c in circle(), bearing in -4.0..4.0, near in 1.01..6.0, far in 1.01..6.0, skew in -0.3..0.3) {
        // vehicle and goal on opposite sides with the disk between them
        let p = c.center + Point2::from_angle(bearing) * (c.radius * near);
        let g = c.center - Point2::from_angle(bearing + skew) * (c.radius * far);
        prop_assume!(classify_sector(p, &c, g) == SectorClass::Sector1);
        let s = geometric_gradient(p, &[c], g, &cfg(ReactiveMethod::Geometric)).unwrap();
        prop_assert_eq!(s.active_sector, Some(SectorClass::Sector1));
        assert_abs_diff_eq!(ray_distance(p, s.direction, c.center), c.radius, epsilon = 1e-6);
    }

    #[test]
    fn never_points_into_the_circle(c in circle(), p in point(), g in point()) {
        prop_assume!(p != g && p != c.center);
        let s = geometric_gradient(p, &[c], g, &cfg(ReactiveMethod::Geometric)).unwrap();
        match classify_sector(p, &c, g) {
            SectorClass::Sector3 => prop_assert!(s.direction.dot(p - c.center) > 0.0),
            SectorClass::Sector1 => prop_assert!(ray_distance(p, s.direction, c.center) >= c.radius - 1e-6),
            // the straight run ends at the goal
            SectorClass::Sector2 => {
                prop_assert!(point_segment_distance(c.center, p, g) >= c.radius);
                prop_assert_eq!(s.direction, (g - p).normalized().unwrap());
            }
        }
    }

    #[test]
    fn fields_are_scale_covariant(
        circles in prop::collection::vec(circle(), 1..4),
        p in point(),
        g in point(),
        lambda in 0.1..10.0,
    ) {
        prop_assume!(p != g);
        // away from the doublet regularization, which has an absolute length
        prop_assume!(circles.iter().all(|c| p.distance(c.center) > c.radius * 1.01 && g.distance(c.center) > c.radius * 1.01));
        let scaled: Vec<_> = circles.iter().map(|c| c.scaled(lambda)).collect();
        for m in [ReactiveMethod::Geometric, ReactiveMethod::Dipole] {
            let a = field(m, p, &circles, g);
            let b = field(m, p * lambda, &scaled, g * lambda);
            assert_abs_diff_eq!(a.x, b.x, epsilon = 1e-9);
            assert_abs_diff_eq!(a.y, b.y, epsilon = 1e-9);
        }
    }
}
