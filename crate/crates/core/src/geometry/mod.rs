//! Planar primitives: points, rotated ellipses, security circles.
//!
//! Angles are radians counterclockwise from east. Boundary contact always counts as
//! intersection or containment.

mod circle;
mod ellipse;
mod point;

pub use circle::{security_circle, tangent_points, SecurityCircle};
pub(crate) use ellipse::segment_hits_ellipse;
pub use ellipse::{
    circumscribed_polygon, distance_to_ellipse, inflate, nearest_boundary_point, outward_normal, point_in_ellipse,
    ray_ellipse_intersection, segment_intersects_ellipse, Ellipse, Obstacle,
};
pub use point::{point_segment_distance, Point2};

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum GeometryError {
    #[error("invalid ellipse: {0}")]
    InvalidEllipse(&'static str),
    #[error("circle radius must be positive and finite")]
    InvalidRadius,
    #[error("obstacle height must be non-negative")]
    NegativeHeight,
    #[error("segment endpoints coincide")]
    DegenerateSegment,
    #[error("margin must be non-negative")]
    NegativeMargin,
    #[error("polygon needs at least 3 vertices, got {0}")]
    TooFewSides(usize),
    #[error("point is not outside the circle")]
    PointNotOutside,
    #[error("direction vector is zero")]
    ZeroDirection,
}
