//! Geometric graphs over the obstacle world and minimum-cost search on them.
//!
//! Two graph builders are provided: a visibility graph over the corners of polygons that
//! circumscribe the inflated obstacles, and a quadtree decomposition whose free leaves become
//! vertices. Both produce a [`GeoGraph`] that [`dijkstra`] and [`a_star`] search.

use std::collections::BTreeSet;

use std::time::{Duration, Instant};

use crate::geometry::{GeometryError, Obstacle, Point2};
use crate::Scalar;

mod graph;
mod quadtree;
mod search;
mod visibility;

pub use graph::{Edge, GeoGraph, PathResult};
pub use quadtree::{
    attach_endpoints, build_quadtree, build_quadtree_graph, cell_classification, plan_quadtree_path, CellState,
    QuadCell, Quadtree, QuadtreeGraph, SquareRegion, MAX_QUADTREE_DEPTH,
};
pub use search::{a_star, dijkstra, euclidean_heuristic};
pub use visibility::{build_visibility_graph, corner_slack, plan_visibility_path};

/// Default number of polygon corners per obstacle in the visibility graph.
pub const DEFAULT_POLYGON_CORNERS: usize = 16;
/// Default inflation: vehicle half-width (1.5 m, rounded up) plus 1.0 m navigation buffer.
pub const DEFAULT_PLANNING_MARGIN: f64 = 2.5;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum PlanError {
    #[error("vertex index {0} out of range")]
    InvalidVertex(usize),
    #[error("self-loop at vertex {0}")]
    SelfLoop(usize),
    #[error("edge cost must be finite and non-negative")]
    InvalidCost,
    #[error("goal unreachable ({} vertices reached)", reached.len())]
    NoPath { reached: BTreeSet<usize> },
    #[error("{which} point lies inside inflated obstacle `{obstacle_id}`")]
    InvalidEndpoint { which: &'static str, obstacle_id: String },
    #[error("{which} point is not inside a free quadtree cell")]
    EndpointNotFree { which: &'static str },
    #[error("invalid planner configuration: {0}")]
    InvalidConfig(String),
    #[error(transparent)]
    Geometry(#[from] GeometryError),
}

/// Graph construction used when a path has to be planned.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum PlannerKind {
    #[default]
    Visibility,
    Quadtree,
}

impl std::fmt::Display for PlannerKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            PlannerKind::Visibility => "visibility",
            PlannerKind::Quadtree => "quadtree",
        })
    }
}

/// A planned path with the graph it was found on and separate build and search times.
#[derive(Debug, Clone)]
pub struct StaticPlan<F> {
    pub graph: GeoGraph<F>,
    pub path: PathResult<F>,
    /// Quadtree leaves, for the quadtree planner only.
    pub leaves: Vec<QuadCell<F>>,
    pub build_time: Duration,
    pub search_time: Duration,
}

/// Settings of [`static_plan`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StaticPlanConfig<F> {
    pub kind: PlannerKind,
    pub margin: F,
    pub polygon_corners: usize,
    pub region: SquareRegion<F>,
    pub max_depth: usize,
}

/// Builds the selected graph between `start` and `goal` and runs A* on it.
pub fn static_plan<F: Scalar>(
    start: Point2<F>,
    goal: Point2<F>,
    obstacles: &[Obstacle<F>],
    cfg: &StaticPlanConfig<F>,
) -> Result<StaticPlan<F>, PlanError> {
    let t0 = Instant::now();
    let (graph, leaves, s, t) = match cfg.kind {
        PlannerKind::Visibility => {
            (build_visibility_graph(start, goal, obstacles, cfg.polygon_corners, cfg.margin)?, Vec::new(), 0, 1)
        }
        PlannerKind::Quadtree => {
            let mut qg = build_quadtree_graph(cfg.region, obstacles, cfg.max_depth, cfg.margin)?;
            let (s, t) = attach_endpoints(&mut qg, start, goal, obstacles, cfg.margin)?;
            (qg.graph, qg.tree.leaves, s, t)
        }
    };
    let build_time = t0.elapsed();
    let t1 = Instant::now();
    let path = a_star(&graph, s, t, euclidean_heuristic(&graph, t))?;
    let search_time = t1.elapsed();
    Ok(StaticPlan { graph, path, leaves, build_time, search_time })
}
