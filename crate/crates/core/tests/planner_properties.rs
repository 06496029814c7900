use approx::assert_relative_eq;
use deepc_guidance::geometry::{inflate, point_in_ellipse, Ellipse, Obstacle, Point2};
use deepc_guidance::planner::{
    build_quadtree, build_visibility_graph, plan_visibility_path, static_plan, PlannerKind, SquareRegion,
    StaticPlanConfig,
};
use deepc_guidance::scenario::load_scenario;
use proptest::prelude::*;

const MARGIN: f64 = 2.5;

fn obstacles() -> impl Strategy<Value = Vec<Obstacle<f64>>> {
    prop::collection::vec((20.0..180.0, -40.0..40.0, 2.0..8.0, 0.0..8.0, -2.0..2.0), 1..5).prop_map(|v| {
        v.into_iter()
            .enumerate()
            .map(|(i, (x, y, b, extra, th))| {
                Obstacle::new(format!("o{i}"), Ellipse::new(Point2::new(x, y), b + extra, b, th).unwrap())
            })
            .collect()
    })
}

fn grown(obs: &[Obstacle<f64>]) -> Vec<Ellipse<f64>> {
    obs.iter().map(|o| inflate(&o.ellipse, MARGIN).unwrap()).collect()
}

fn segment_is_free(a: Point2<f64>, b: Point2<f64>, grown: &[Ellipse<f64>]) -> bool {
    let n = (a.distance(b) / 0.1).ceil().max(1.0) as usize;
    (0..=n).all(|k| {
        let p = a.lerp(b, k as f64 / n as f64);
        grown.iter().all(|e| !point_in_ellipse(p, e))
    })
}

type Case = (String, Vec<Obstacle<f64>>, Point2<f64>, Point2<f64>, SquareRegion<f64>);

fn corpus_obstacles() -> Vec<Case> {
    let dir = concat!(env!("CARGO_MANIFEST_DIR"), "/../../scenarios");
    let mut out = Vec::new();
    let mut paths: Vec<_> = std::fs::read_dir(dir).unwrap().map(|e| e.unwrap().path()).collect();
    paths.sort();
    for path in paths {
        let name = path.file_name().unwrap().to_string_lossy().into_owned();
        if !name.ends_with(".json") || name.ends_with(".schema.json") {
            continue;
        }
        let s = load_scenario(&path).unwrap();
        let plan = s.mission_plan().unwrap();
        out.push((name, s.obstacles().unwrap(), plan.start(), plan.end(), s.region()));
    }
    out
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn visibility_edges_are_free(obs in obstacles(), n_poly in 6usize..24) {
        let (start, goal) = (Point2::new(0.0, 0.0), Point2::new(200.0, 0.0));
        let g = grown(&obs);
        prop_assume!(g.iter().all(|e| !point_in_ellipse(start, e) && !point_in_ellipse(goal, e)));
        let graph = build_visibility_graph(start, goal, &obs, n_poly, MARGIN).unwrap();
        for e in graph.edges() {
            let (a, b) = (graph.vertices()[e.i], graph.vertices()[e.j]);
            prop_assert!(segment_is_free(a, b, &g), "edge {}-{} crosses an obstacle", e.i, e.j);
        }
        if let Ok((graph, path)) = plan_visibility_path(start, goal, &obs, n_poly, MARGIN) {
            let line = path.polyline(&graph);
            prop_assert!(line.windows(2).all(|w| segment_is_free(w[0], w[1], &g)));
        }
    }

    #[test]
    fn quadtree_leaves_partition_root(obs in obstacles(), depth in 1usize..7, probes in prop::collection::vec((0.0..1.0f64, 0.0..1.0f64), 32)) {
        let root = SquareRegion::new(Point2::new(-20.0, -110.0), 220.0);
        let tree = build_quadtree(root, &obs, depth, MARGIN).unwrap();
        let area: f64 = tree.leaves.iter().map(|l| l.bounds.area()).sum();
        assert_relative_eq!(area, root.area(), max_relative = 1e-6);
        for (u, v) in probes {
            let p = Point2::new(root.min.x + u * root.side, root.min.y + v * root.side);
            let owners = tree.leaves.iter().filter(|l| {
                let b = &l.bounds;
                p.x > b.min.x && p.x < b.min.x + b.side && p.y > b.min.y && p.y < b.min.y + b.side
            });
            prop_assert!(owners.count() <= 1);
            prop_assert!(tree.leaf_at(p).is_some());
        }
    }
}

#[test]
fn corpus_paths_are_free_for_both_planners() {
    let mut checked = 0;
    for (name, obs, start, goal, region) in corpus_obstacles() {
        if obs.is_empty() {
            continue;
        }
        let g = grown(&obs);
        for kind in [PlannerKind::Visibility, PlannerKind::Quadtree] {
            let cfg = StaticPlanConfig { kind, margin: MARGIN, polygon_corners: 16, region, max_depth: 7 };
            let Ok(sp) = static_plan(start, goal, &obs, &cfg) else {
                // start or goal may sit in an obstacle on purpose (identification scenarios)
                continue;
            };
            let line = sp.path.polyline(&sp.graph);
            assert!(line.windows(2).all(|w| segment_is_free(w[0], w[1], &g)), "{name} {kind}");
            checked += 1;
        }
    }
    assert!(checked >= 6, "only {checked} corpus plans checked");
}

#[test]
fn visibility_cost_shrinks_with_more_corners() {
    for (name, obs, start, goal, _) in corpus_obstacles() {
        if obs.is_empty() {
            continue;
        }
        let mut last = f64::INFINITY;
        for n in [8, 16, 32, 64] {
            let Ok((_, path)) = plan_visibility_path(start, goal, &obs, n, MARGIN) else { break };
            assert!(path.total_cost <= last + 1e-3, "{name}: n_poly {n} cost {} after {last}", path.total_cost);
            last = path.total_cost;
        }
    }
}
