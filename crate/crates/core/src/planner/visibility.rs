use super::{a_star, euclidean_heuristic, GeoGraph, PathResult, PlanError};
use crate::geometry::{
    circumscribed_polygon, inflate, point_segment_distance, segment_hits_ellipse, Ellipse, Obstacle, Point2,
};
use crate::Scalar;

/// Extra growth applied before polygonizing so polygon sides clear the inflated ellipse
/// instead of touching it (touching counts as a collision).
pub fn corner_slack<F: Scalar>(e: &Ellipse<F>) -> F {
    F::tolerance() * e.a.max(F::one())
}

fn segment_is_free<F: Scalar>(p: Point2<F>, q: Point2<F>, inflated: &[Ellipse<F>]) -> bool {
    inflated.iter().all(|e| {
        // the circumscribed circle of radius `a` rejects most pairs cheaply
        point_segment_distance(e.center, p, q) > e.a || !segment_hits_ellipse(p, q, e)
    })
}

/// Visibility graph: start (vertex 0), goal (vertex 1) and the corners of an `n_poly`-gon
/// around every obstacle inflated by `margin`. Corners inside another inflated obstacle are
/// dropped; every pair whose straight segment misses all inflated obstacles becomes an edge
/// weighted by its length.
pub fn build_visibility_graph<F: Scalar>(
    start: Point2<F>,
    goal: Point2<F>,
    obstacles: &[Obstacle<F>],
    n_poly: usize,
    margin: F,
) -> Result<GeoGraph<F>, PlanError> {
    if n_poly < 3 {
        return Err(PlanError::InvalidConfig(format!("n_poly must be at least 3, got {n_poly}")));
    }
    let inflated = obstacles.iter().map(|o| inflate(&o.ellipse, margin)).collect::<Result<Vec<_>, _>>()?;
    for (which, p) in [("start", start), ("goal", goal)] {
        if let Some(k) = inflated.iter().position(|e| e.contains(p)) {
            return Err(PlanError::InvalidEndpoint { which, obstacle_id: obstacles[k].id.clone() });
        }
    }

    let mut vertices = vec![start, goal];
    for (k, e) in inflated.iter().enumerate() {
        let grown = inflate(e, corner_slack(e))?;
        for corner in circumscribed_polygon(&grown, n_poly)? {
            let blocked = inflated.iter().enumerate().any(|(m, other)| m != k && other.contains(corner));
            if !blocked {
                vertices.push(corner);
            }
        }
    }

    let mut g = GeoGraph::new(vertices);
    let n = g.vertex_count();
    for i in 0..n {
        for j in (i + 1)..n {
            let (p, q) = (g.vertices()[i], g.vertices()[j]);
            if segment_is_free(p, q, &inflated) {
                g.add_edge(i, j, p.distance(q))?;
            }
        }
    }
    Ok(g)
}

/// Builds the visibility graph and searches it with A* (Euclidean heuristic).
pub fn plan_visibility_path<F: Scalar>(
    start: Point2<F>,
    goal: Point2<F>,
    obstacles: &[Obstacle<F>],
    n_poly: usize,
    margin: F,
) -> Result<(GeoGraph<F>, PathResult<F>), PlanError> {
    let g = build_visibility_graph(start, goal, obstacles, n_poly, margin)?;
    let path = a_star(&g, 0, 1, euclidean_heuristic(&g, 1))?;
    Ok((g, path))
}
