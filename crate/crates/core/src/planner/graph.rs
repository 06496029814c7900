use super::PlanError;
use crate::geometry::Point2;
use crate::Scalar;

/// Undirected edge, stored once and traversable both ways.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Edge<F> {
    pub i: usize,
    pub j: usize,
    pub cost: F,
}

/// Vertices in the plane joined by weighted undirected edges.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct GeoGraph<F> {
    vertices: Vec<Point2<F>>,
    edges: Vec<Edge<F>>,
    // neighbour lists kept sorted by vertex index so expansion order is fixed
    adjacency: Vec<Vec<(usize, F)>>,
}

impl<F: Scalar> GeoGraph<F> {
    pub fn new(vertices: Vec<Point2<F>>) -> Self {
        let adjacency = vec![Vec::new(); vertices.len()];
        Self { vertices, edges: Vec::new(), adjacency }
    }

    pub fn add_vertex(&mut self, p: Point2<F>) -> usize {
        self.vertices.push(p);
        self.adjacency.push(Vec::new());
        self.vertices.len() - 1
    }

    pub fn add_edge(&mut self, i: usize, j: usize, cost: F) -> Result<(), PlanError> {
        let n = self.vertices.len();
        if i >= n {
            return Err(PlanError::InvalidVertex(i));
        }
        if j >= n {
            return Err(PlanError::InvalidVertex(j));
        }
        if i == j {
            return Err(PlanError::SelfLoop(i));
        }
        if !(cost >= F::zero()) || !cost.is_finite() {
            return Err(PlanError::InvalidCost);
        }
        self.edges.push(Edge { i, j, cost });
        for (from, to) in [(i, j), (j, i)] {
            let list = &mut self.adjacency[from];
            let pos = list.partition_point(|&(v, _)| v <= to);
            list.insert(pos, (to, cost));
        }
        Ok(())
    }

    /// Adds an edge weighted by the Euclidean length between the two vertices.
    pub fn add_euclidean_edge(&mut self, i: usize, j: usize) -> Result<(), PlanError> {
        let cost = self.vertex(i)?.distance(self.vertex(j)?);
        self.add_edge(i, j, cost)
    }

    pub fn vertex(&self, i: usize) -> Result<Point2<F>, PlanError> {
        self.vertices.get(i).copied().ok_or(PlanError::InvalidVertex(i))
    }

    pub fn vertices(&self) -> &[Point2<F>] {
        &self.vertices
    }

    pub fn edges(&self) -> &[Edge<F>] {
        &self.edges
    }

    pub fn vertex_count(&self) -> usize {
        self.vertices.len()
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    /// Neighbours of `v` with the connecting edge cost, ascending by index.
    pub fn neighbors(&self, v: usize) -> &[(usize, F)] {
        &self.adjacency[v]
    }

    /// Cheapest edge between `i` and `j`, if any.
    pub fn edge_cost(&self, i: usize, j: usize) -> Option<F> {
        self.adjacency.get(i)?.iter().filter(|&&(v, _)| v == j).map(|&(_, c)| c).reduce(F::min)
    }
}

/// Outcome of a successful search.
#[derive(Debug, Clone, PartialEq)]
pub struct PathResult<F> {
    pub vertex_seq: Vec<usize>,
    pub total_cost: F,
    /// Number of vertices taken off the open list and expanded.
    pub expanded: usize,
}

impl<F: Scalar> PathResult<F> {
    pub fn polyline(&self, g: &GeoGraph<F>) -> Vec<Point2<F>> {
        self.vertex_seq.iter().map(|&v| g.vertices()[v]).collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn edge_validation() {
        let mut g = GeoGraph::new(vec![Point2::new(0.0, 0.0), Point2::new(1.0, 0.0)]);
        assert_eq!(g.add_edge(0, 0, 1.0), Err(PlanError::SelfLoop(0)));
        assert_eq!(g.add_edge(0, 2, 1.0), Err(PlanError::InvalidVertex(2)));
        assert_eq!(g.add_edge(0, 1, -1.0), Err(PlanError::InvalidCost));
        g.add_euclidean_edge(1, 0).unwrap();
        assert_eq!(g.edge_cost(0, 1), Some(1.0));
        assert_eq!(g.neighbors(0), &[(1, 1.0)]);
    }

    #[test]
    fn adjacency_sorted() {
        let mut g = GeoGraph::new(vec![Point2::<f64>::origin(); 4]);
        g.add_edge(0, 3, 1.0).unwrap();
        g.add_edge(0, 1, 1.0).unwrap();
        g.add_edge(2, 0, 1.0).unwrap();
        let order: Vec<_> = g.neighbors(0).iter().map(|&(v, _)| v).collect();
        assert_eq!(order, vec![1, 2, 3]);
    }
}
