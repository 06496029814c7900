use std::collections::BTreeSet;

use super::{a_star, euclidean_heuristic, GeoGraph, PathResult, PlanError};
use crate::geometry::{inflate, segment_hits_ellipse, Ellipse, Obstacle, Point2};
use crate::Scalar;

/// Deepest subdivision accepted; the adjacency pass indexes a `2^d × 2^d` grid.
pub const MAX_QUADTREE_DEPTH: usize = 11;

/// Axis-aligned square given by its lower-left corner and side length.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SquareRegion<F> {
    pub min: Point2<F>,
    pub side: F,
}

impl<F: Scalar> SquareRegion<F> {
    pub fn new(min: Point2<F>, side: F) -> Self {
        Self { min, side }
    }

    pub fn center(&self) -> Point2<F> {
        let h = self.side / F::two();
        Point2::new(self.min.x + h, self.min.y + h)
    }

    /// Counterclockwise from the lower-left corner.
    pub fn corners(&self) -> [Point2<F>; 4] {
        let (x0, y0, s) = (self.min.x, self.min.y, self.side);
        [Point2::new(x0, y0), Point2::new(x0 + s, y0), Point2::new(x0 + s, y0 + s), Point2::new(x0, y0 + s)]
    }

    pub fn contains(&self, p: Point2<F>) -> bool {
        p.x >= self.min.x && p.y >= self.min.y && p.x <= self.min.x + self.side && p.y <= self.min.y + self.side
    }

    pub fn area(&self) -> F {
        self.side * self.side
    }

    /// Children in the order south-west, south-east, north-west, north-east.
    pub fn quadrants(&self) -> [Self; 4] {
        let h = self.side / F::two();
        let (x0, y0) = (self.min.x, self.min.y);
        [
            Self::new(Point2::new(x0, y0), h),
            Self::new(Point2::new(x0 + h, y0), h),
            Self::new(Point2::new(x0, y0 + h), h),
            Self::new(Point2::new(x0 + h, y0 + h), h),
        ]
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum CellState {
    Free,
    Occupied,
    Mixed,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadCell<F> {
    pub bounds: SquareRegion<F>,
    pub state: CellState,
    pub depth: usize,
}

fn cell_overlaps<F: Scalar>(cell: &SquareRegion<F>, e: &Ellipse<F>) -> bool {
    // bounding box of the rotated ellipse
    let (s, c) = e.theta.sin_cos();
    let hx = (e.a * e.a * c * c + e.b * e.b * s * s).sqrt();
    let hy = (e.a * e.a * s * s + e.b * e.b * c * c).sqrt();
    let max = cell.min + Point2::new(cell.side, cell.side);
    if e.center.x + hx < cell.min.x
        || e.center.x - hx > max.x
        || e.center.y + hy < cell.min.y
        || e.center.y - hy > max.y
    {
        return false;
    }
    if cell.contains(e.center) {
        return true;
    }
    // the implicit form is convex, so its minimum over the square lies on the border
    let k = cell.corners();
    (0..4).any(|i| segment_hits_ellipse(k[i], k[(i + 1) % 4], e))
}

fn classify_inflated<F: Scalar>(cell: &SquareRegion<F>, inflated: &[Ellipse<F>]) -> CellState {
    let mut touched = false;
    for e in inflated {
        if cell.corners().iter().all(|&k| e.contains(k)) {
            return CellState::Occupied;
        }
        touched = touched || cell_overlaps(cell, e);
    }
    if touched {
        CellState::Mixed
    } else {
        CellState::Free
    }
}

/// Free if no inflated obstacle meets the closed cell, occupied if the cell lies inside one
/// inflated obstacle, mixed otherwise.
pub fn cell_classification<F: Scalar>(
    cell: &SquareRegion<F>,
    obstacles: &[Obstacle<F>],
    margin: F,
) -> Result<CellState, PlanError> {
    let inflated = inflate_all(obstacles, margin)?;
    Ok(classify_inflated(cell, &inflated))
}

fn inflate_all<F: Scalar>(obstacles: &[Obstacle<F>], margin: F) -> Result<Vec<Ellipse<F>>, PlanError> {
    Ok(obstacles.iter().map(|o| inflate(&o.ellipse, margin)).collect::<Result<_, _>>()?)
}

/// Leaves of a recursive decomposition, in depth-first SW/SE/NW/NE order.
#[derive(Debug, Clone, PartialEq)]
pub struct Quadtree<F> {
    pub root: SquareRegion<F>,
    pub max_depth: usize,
    pub leaves: Vec<QuadCell<F>>,
}

impl<F: Scalar> Quadtree<F> {
    /// Index of the leaf containing `p` (first in leaf order on shared borders).
    pub fn leaf_at(&self, p: Point2<F>) -> Option<usize> {
        self.leaves.iter().position(|c| c.bounds.contains(p))
    }
}

/// Splits mixed cells until `max_depth`, where remaining mixed cells count as occupied.
pub fn build_quadtree<F: Scalar>(
    bounds: SquareRegion<F>,
    obstacles: &[Obstacle<F>],
    max_depth: usize,
    margin: F,
) -> Result<Quadtree<F>, PlanError> {
    if max_depth == 0 || max_depth > MAX_QUADTREE_DEPTH {
        return Err(PlanError::InvalidConfig(format!(
            "max_depth must be in 1..={MAX_QUADTREE_DEPTH}, got {max_depth}"
        )));
    }
    if !(bounds.side > F::zero()) || !bounds.min.is_finite() || !bounds.side.is_finite() {
        return Err(PlanError::InvalidConfig("bounds side must be positive".into()));
    }
    let inflated = inflate_all(obstacles, margin)?;
    let mut leaves = Vec::new();
    let mut stack = vec![(bounds, 0usize)];
    while let Some((cell, depth)) = stack.pop() {
        match classify_inflated(&cell, &inflated) {
            CellState::Mixed if depth < max_depth => {
                // reversed so the SW child is processed first
                for q in cell.quadrants().into_iter().rev() {
                    stack.push((q, depth + 1));
                }
            }
            CellState::Mixed => leaves.push(QuadCell { bounds: cell, state: CellState::Occupied, depth }),
            state => leaves.push(QuadCell { bounds: cell, state, depth }),
        }
    }
    Ok(Quadtree { root: bounds, max_depth, leaves })
}

/// Graph over the free leaves of a quadtree.
#[derive(Debug, Clone)]
pub struct QuadtreeGraph<F> {
    pub tree: Quadtree<F>,
    pub graph: GeoGraph<F>,
    /// Leaf index for every graph vertex created from a leaf.
    pub vertex_leaf: Vec<usize>,
}

/// Vertices at the centers of free leaves; edges between free leaves whose borders share a
/// segment of positive length, weighted by center distance.
pub fn build_quadtree_graph<F: Scalar>(
    bounds: SquareRegion<F>,
    obstacles: &[Obstacle<F>],
    max_depth: usize,
    margin: F,
) -> Result<QuadtreeGraph<F>, PlanError> {
    let tree = build_quadtree(bounds, obstacles, max_depth, margin)?;
    let vertex_leaf: Vec<usize> = (0..tree.leaves.len()).filter(|&k| tree.leaves[k].state == CellState::Free).collect();
    let mut graph = GeoGraph::new(vertex_leaf.iter().map(|&k| tree.leaves[k].bounds.center()).collect());

    // rasterize leaves onto the finest grid, then look across right and top borders
    let n = 1usize << max_depth;
    const NONE: u32 = u32::MAX;
    let mut grid = vec![NONE; n * n];
    let mut extent = Vec::with_capacity(vertex_leaf.len());
    for (v, &k) in vertex_leaf.iter().enumerate() {
        let cell = &tree.leaves[k];
        let size = 1usize << (max_depth - cell.depth);
        let unit = bounds.side / F::from_usize(n).unwrap();
        let ix = ((cell.bounds.min.x - bounds.min.x) / unit).round().to_usize().unwrap();
        let iy = ((cell.bounds.min.y - bounds.min.y) / unit).round().to_usize().unwrap();
        for y in iy..iy + size {
            grid[y * n + ix..y * n + ix + size].fill(v as u32);
        }
        extent.push((ix, iy, size));
    }
    let mut pairs = BTreeSet::new();
    for (v, &(ix, iy, size)) in extent.iter().enumerate() {
        if ix + size < n {
            for y in iy..iy + size {
                let w = grid[y * n + ix + size];
                if w != NONE {
                    pairs.insert((v.min(w as usize), v.max(w as usize)));
                }
            }
        }
        if iy + size < n {
            for x in ix..ix + size {
                let w = grid[(iy + size) * n + x];
                if w != NONE {
                    pairs.insert((v.min(w as usize), v.max(w as usize)));
                }
            }
        }
    }
    for (i, j) in pairs {
        graph.add_euclidean_edge(i, j)?;
    }
    Ok(QuadtreeGraph { tree, graph, vertex_leaf })
}

/// Adds `start` and `goal` as vertices joined to the centers of their free leaves. An
/// endpoint in a mixed leaf but outside every inflated obstacle is joined instead to each
/// free-leaf center it sees along a clear segment. Start and goal are joined directly when
/// the segment between them is clear.
pub fn attach_endpoints<F: Scalar>(
    qg: &mut QuadtreeGraph<F>,
    start: Point2<F>,
    goal: Point2<F>,
    obstacles: &[Obstacle<F>],
    margin: F,
) -> Result<(usize, usize), PlanError> {
    let inflated = inflate_all(obstacles, margin)?;
    let clear = |a: Point2<F>, b: Point2<F>| inflated.iter().all(|e| !segment_hits_ellipse(a, b, e));
    let leaf_vertices = qg.vertex_leaf.len();
    let mut attach = |p: Point2<F>, which| -> Result<usize, PlanError> {
        let own = qg.vertex_leaf.iter().position(|&k| qg.tree.leaves[k].bounds.contains(p));
        let targets: Vec<usize> = match own {
            Some(v) => vec![v],
            None if inflated.iter().any(|e| e.contains(p)) => Vec::new(),
            None => (0..leaf_vertices).filter(|&v| clear(p, qg.graph.vertices()[v])).collect(),
        };
        if targets.is_empty() {
            return Err(PlanError::EndpointNotFree { which });
        }
        let v = qg.graph.add_vertex(p);
        for u in targets {
            qg.graph.add_euclidean_edge(v, u)?;
        }
        Ok(v)
    };
    let s = attach(start, "start")?;
    let t = attach(goal, "goal")?;
    if start != goal && clear(start, goal) {
        qg.graph.add_euclidean_edge(s, t)?;
    }
    Ok((s, t))
}

/// Quadtree graph plus start and goal vertices joined to the centers of their free leaves,
/// searched with A*. Returns the graph, the path, and the start/goal vertex indices.
pub fn plan_quadtree_path<F: Scalar>(
    start: Point2<F>,
    goal: Point2<F>,
    bounds: SquareRegion<F>,
    obstacles: &[Obstacle<F>],
    max_depth: usize,
    margin: F,
) -> Result<(QuadtreeGraph<F>, PathResult<F>, usize, usize), PlanError> {
    let mut qg = build_quadtree_graph(bounds, obstacles, max_depth, margin)?;
    let (s, t) = attach_endpoints(&mut qg, start, goal, obstacles, margin)?;
    let path = a_star(&qg.graph, s, t, euclidean_heuristic(&qg.graph, t))?;
    Ok((qg, path, s, t))
}
