//! Numeric tolerances shared by every module.
//!
//! Geometric predicates (duplicate vertices, collinearity, parallel lines)
//! use [`GEOMETRY_EPS`]. Set-membership tests that compare against sampled
//! or simulated ground truth use [`MEMBERSHIP_EPS`].

/// Vertex coincidence, collinearity and orientation tolerance (meters, or m/s
/// in velocity space).
pub const GEOMETRY_EPS: f64 = 1e-9;

/// Slack allowed when testing whether a point belongs to a derived region.
pub const MEMBERSHIP_EPS: f64 = 1e-6;

/// A half-plane counts as violated by the solver only beyond this slack.
pub const LP_EPS: f64 = 1e-10;

/// Length tolerance for unit normals.
pub const UNIT_EPS: f64 = 1e-9;

/// Below this speed a holonomic agent keeps its previous heading (m/s).
pub const HEADING_SPEED_THRESHOLD: f64 = 0.05;
