use approx::assert_abs_diff_eq;
use deepc_guidance::geometry::{
    circumscribed_polygon, distance_to_ellipse, inflate, point_in_ellipse, point_segment_distance,
    ray_ellipse_intersection, tangent_points, Ellipse, Point2, SecurityCircle,
};
use proptest::prelude::*;

fn ellipse() -> impl Strategy<Value = Ellipse<f64>> {
    (-50.0..50.0, -50.0..50.0, 0.5..20.0, 0.0..20.0, -4.0..4.0)
        .prop_map(|(x, y, b, extra, theta)| Ellipse::new(Point2::new(x, y), b + extra, b, theta).unwrap())
}

fn point() -> impl Strategy<Value = Point2<f64>> {
    (-80.0..80.0, -80.0..80.0).prop_map(|(x, y)| Point2::new(x, y))
}

// (x/a)² + (y/b)² in the ellipse frame
fn implicit(p: Point2<f64>, e: &Ellipse<f64>) -> f64 {
    let q = e.to_local(p);
    (q.x / e.a).powi(2) + (q.y / e.b).powi(2)
}

fn boundary(e: &Ellipse<f64>, t: f64) -> Point2<f64> {
    e.from_local(Point2::new(e.a * t.cos(), e.b * t.sin()))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(512))]

    #[test]
    fn inside_iff_distance_not_positive(e in ellipse(), p in point()) {
        let d = distance_to_ellipse(p, &e);
        if d.abs() > 1e-6 {
            prop_assert_eq!(point_in_ellipse(p, &e), d <= 0.0);
        }
    }

    #[test]
    fn polygon_contains_boundary(e in ellipse(), n in 3usize..=64) {
        let poly = circumscribed_polygon(&e, n).unwrap();
        prop_assert_eq!(poly.len(), n);
        let area: f64 = (0..n).map(|i| poly[i].cross(poly[(i + 1) % n])).sum();
        let orient = area.signum();
        for k in 0..720 {
            let b = boundary(&e, k as f64 * std::f64::consts::TAU / 720.0);
            for i in 0..n {
                let (u, v) = (poly[i], poly[(i + 1) % n]);
                let side = orient * (v - u).cross(b - u) / u.distance(v);
                prop_assert!(side >= -1e-9, "sample {k} outside edge {i} by {side}");
            }
        }
    }

    #[test]
    fn tangent_points_touch(cx in -20.0..20.0, cy in -20.0..20.0, r in 0.5..15.0, p in point()) {
        let c = SecurityCircle::new(Point2::new(cx, cy), r).unwrap();
        prop_assume!(p.distance(c.center) > r * (1.0 + 1e-6));
        let (left, right) = tangent_points(p, &c).unwrap();
        for t in [left, right] {
            assert_abs_diff_eq!(t.distance(c.center), r, epsilon = 1e-9);
            // the segment only reaches the circle at t
            assert_abs_diff_eq!(point_segment_distance(c.center, p, t), r, epsilon = 1e-9);
            assert_abs_diff_eq!((t - c.center).dot(p - t) / p.distance(t), 0.0, epsilon = 1e-9);
        }
        prop_assert!((left - c.center).cross(p - c.center) > 0.0);
    }

    #[test]
    fn inflate_is_monotone(e in ellipse(), p in point(), m in 0.0..10.0) {
        if point_in_ellipse(p, &e) {
            prop_assert!(point_in_ellipse(p, &inflate(&e, m).unwrap()));
        }
    }

    #[test]
    fn ray_from_center_hits_boundary(e in ellipse(), angle in -4.0..4.0) {
        let hit = ray_ellipse_intersection(e.center, Point2::from_angle(angle), &e).unwrap();
        let q = hit.expect("ray from the center leaves the ellipse");
        assert_abs_diff_eq!(implicit(q, &e), 1.0, epsilon = 1e-9);
        assert_abs_diff_eq!((q - e.center).normalized().unwrap().dot(Point2::from_angle(angle)), 1.0, epsilon = 1e-9);
    }
}
