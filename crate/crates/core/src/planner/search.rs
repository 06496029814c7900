use std::cmp::Ordering;
use std::collections::{BTreeSet, BinaryHeap};

use super::{GeoGraph, PathResult, PlanError};
use crate::Scalar;

/// Min-heap entry ordered by key, then by vertex index.
struct Open<F> {
    key: F,
    vertex: usize,
}

impl<F: Scalar> PartialEq for Open<F> {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}

impl<F: Scalar> Eq for Open<F> {}

impl<F: Scalar> PartialOrd for Open<F> {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl<F: Scalar> Ord for Open<F> {
    fn cmp(&self, other: &Self) -> Ordering {
        other.key.partial_cmp(&self.key).unwrap_or(Ordering::Equal).then_with(|| other.vertex.cmp(&self.vertex))
    }
}

fn check_vertices<F: Scalar>(g: &GeoGraph<F>, s: usize, t: usize) -> Result<(), PlanError> {
    let n = g.vertex_count();
    if s >= n {
        return Err(PlanError::InvalidVertex(s));
    }
    if t >= n {
        return Err(PlanError::InvalidVertex(t));
    }
    Ok(())
}

fn trace(pred: &[Option<usize>], mut v: usize) -> Vec<usize> {
    let mut seq = vec![v];
    while let Some(p) = pred[v] {
        seq.push(p);
        v = p;
    }
    seq.reverse();
    seq
}

/// Minimum-cost path from `s` to `t`.
///
/// Among equal-cost shortest paths the lexicographically smallest vertex sequence is returned.
pub fn dijkstra<F: Scalar>(g: &GeoGraph<F>, s: usize, t: usize) -> Result<PathResult<F>, PlanError> {
    check_vertices(g, s, t)?;
    let n = g.vertex_count();
    let mut dist = vec![F::infinity(); n];
    let mut pred: Vec<Option<usize>> = vec![None; n];
    let mut done = vec![false; n];
    let mut heap = BinaryHeap::new();
    let mut expanded = 0;
    dist[s] = F::zero();
    heap.push(Open { key: F::zero(), vertex: s });

    while let Some(Open { key, vertex: u }) = heap.pop() {
        if done[u] || key > dist[u] {
            continue;
        }
        done[u] = true;
        expanded += 1;
        if u == t {
            return Ok(PathResult { vertex_seq: trace(&pred, t), total_cost: dist[t], expanded });
        }
        for &(v, cost) in g.neighbors(u) {
            if done[v] {
                continue;
            }
            let nd = dist[u] + cost;
            if nd < dist[v] {
                dist[v] = nd;
                pred[v] = Some(u);
                heap.push(Open { key: nd, vertex: v });
            } else if nd == dist[v] {
                // equal cost: keep the lexicographically smaller prefix; both prefixes end at
                // settled vertices so they no longer change
                if let Some(old) = pred[v] {
                    if old != u && trace(&pred, u) < trace(&pred, old) {
                        pred[v] = Some(u);
                    }
                }
            }
        }
    }
    Err(PlanError::NoPath { reached: (0..n).filter(|&v| done[v]).collect::<BTreeSet<_>>() })
}

/// A* search with a caller-supplied non-negative heuristic.
///
/// With an admissible heuristic the returned cost equals [`dijkstra`]'s. Vertices are
/// re-opened when a cheaper route is found, so admissible but inconsistent heuristics are
/// handled correctly.
pub fn a_star<F, H>(g: &GeoGraph<F>, s: usize, t: usize, heuristic: H) -> Result<PathResult<F>, PlanError>
where
    F: Scalar,
    H: Fn(usize) -> F,
{
    check_vertices(g, s, t)?;
    let n = g.vertex_count();
    let mut best = vec![F::infinity(); n];
    let mut pred: Vec<Option<usize>> = vec![None; n];
    let mut closed = vec![false; n];
    let mut heap = BinaryHeap::new();
    let mut expanded = 0;
    best[s] = F::zero();
    heap.push(Open { key: heuristic(s), vertex: s });

    while let Some(Open { key, vertex: u }) = heap.pop() {
        if closed[u] || key > best[u] + heuristic(u) {
            continue;
        }
        closed[u] = true;
        expanded += 1;
        if u == t {
            return Ok(PathResult { vertex_seq: trace(&pred, t), total_cost: best[t], expanded });
        }
        for &(v, cost) in g.neighbors(u) {
            let ng = best[u] + cost;
            if ng < best[v] {
                best[v] = ng;
                pred[v] = Some(u);
                closed[v] = false;
                heap.push(Open { key: ng + heuristic(v), vertex: v });
            }
        }
    }
    Err(PlanError::NoPath { reached: (0..n).filter(|&v| best[v].is_finite()).collect::<BTreeSet<_>>() })
}

/// Straight-line distance from each vertex to `t`; admissible when edge costs are lengths.
pub fn euclidean_heuristic<F: Scalar>(g: &GeoGraph<F>, t: usize) -> impl Fn(usize) -> F + '_ {
    let goal = g.vertices()[t];
    move |v| g.vertices()[v].distance(goal)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::Point2;

    fn triangle() -> GeoGraph<f64> {
        // s=0 at origin, a=1, t=2
        let mut g = GeoGraph::new(vec![Point2::new(0.0, 0.0), Point2::new(1.0, 0.0), Point2::new(2.0, 0.0)]);
        g.add_edge(0, 1, 1.0).unwrap();
        g.add_edge(1, 2, 1.0).unwrap();
        g.add_edge(0, 2, 3.0).unwrap();
        g
    }

    #[test]
    fn dijkstra_triangle() {
        let r = dijkstra(&triangle(), 0, 2).unwrap();
        assert_eq!(r.vertex_seq, vec![0, 1, 2]);
        assert_eq!(r.total_cost, 2.0);
    }

    #[test]
    fn a_star_triangle() {
        let g = triangle();
        let r = a_star(&g, 0, 2, euclidean_heuristic(&g, 2)).unwrap();
        assert_eq!(r.vertex_seq, vec![0, 1, 2]);
        assert_eq!(r.total_cost, 2.0);
        let z = a_star(&g, 0, 2, |_| 0.0).unwrap();
        assert_eq!(z, dijkstra(&g, 0, 2).unwrap());
    }

    #[test]
    fn isolated_target() {
        let mut g = triangle();
        let iso = g.add_vertex(Point2::new(9.0, 9.0));
        match dijkstra(&g, 0, iso) {
            Err(PlanError::NoPath { reached }) => assert_eq!(reached, BTreeSet::from([0, 1, 2])),
            other => panic!("unexpected {other:?}"),
        }
        assert!(matches!(a_star(&g, 0, iso, |_| 0.0), Err(PlanError::NoPath { .. })));
        assert_eq!(dijkstra(&g, 0, 17), Err(PlanError::InvalidVertex(17)));
    }

    #[test]
    fn lexicographic_tie_break() {
        // two equal-cost routes 0-2-3 and 0-1-3: prefer the one through 1
        let mut g = GeoGraph::new(vec![Point2::<f64>::origin(); 4]);
        g.add_edge(0, 2, 1.0).unwrap();
        g.add_edge(2, 3, 1.0).unwrap();
        g.add_edge(0, 1, 1.0).unwrap();
        g.add_edge(1, 3, 1.0).unwrap();
        assert_eq!(dijkstra(&g, 0, 3).unwrap().vertex_seq, vec![0, 1, 3]);
        // equal costs reached in different pop orders
        let mut h = GeoGraph::new(vec![Point2::<f64>::origin(); 5]);
        h.add_edge(0, 4, 0.5).unwrap();
        h.add_edge(4, 3, 1.5).unwrap();
        h.add_edge(0, 1, 1.0).unwrap();
        h.add_edge(1, 3, 1.0).unwrap();
        assert_eq!(dijkstra(&h, 0, 3).unwrap().vertex_seq, vec![0, 1, 3]);
    }

    #[test]
    fn unit_grid_corner_to_corner() {
        // 3x3 4-connected grid; exhaustive enumeration of simple paths gives 4
        let mut g = GeoGraph::new((0..9).map(|k| Point2::new((k % 3) as f64, (k / 3) as f64)).collect());
        for k in 0..9 {
            if k % 3 < 2 {
                g.add_edge(k, k + 1, 1.0).unwrap();
            }
            if k < 6 {
                g.add_edge(k, k + 3, 1.0).unwrap();
            }
        }
        let r = dijkstra(&g, 0, 8).unwrap();
        assert_eq!(r.total_cost, 4.0);
        assert_eq!(r.vertex_seq, vec![0, 1, 2, 5, 8]);
        let a = a_star(&g, 0, 8, euclidean_heuristic(&g, 8)).unwrap();
        assert_eq!(a.total_cost, 4.0);
        assert!(a.expanded <= r.expanded);
    }
}
