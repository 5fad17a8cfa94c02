//! Convex 2D geometry: polygons, Minkowski differences, hulls, velocity
//! obstacles and the pairwise collision-avoidance half-planes derived from
//! them.

mod half_plane;
mod polygon;
mod vec2;
mod velocity_obstacle;

pub use half_plane::HalfPlane;
pub use polygon::{convex_hull, minkowski_difference, minkowski_sum, ConvexPolygon};
pub use vec2::Vec2;
pub use velocity_obstacle::{
    build_velocity_obstacle, closest_boundary_point, overlap_half_plane, pairwise_correction,
    pairwise_half_plane, responsibility_half_plane, BoundaryFeature, BoundaryPoint,
    VelocityObstacle,
};
