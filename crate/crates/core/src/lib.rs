//! Velocity-space motion prediction for heterogeneous traffic agents.
//!
//! Each agent picks the velocity closest to its preferred one inside the
//! intersection of its kinematically trackable set and the collision-avoidance
//! half-planes induced by the agents it attends to. Hidden behavior
//! parameters (intention, attention radii, responsibility) are inferred per
//! agent by Bayesian filtering over a discrete candidate grid.

pub mod behavior;
pub mod config;
pub mod dataset;
pub mod engine;
pub mod error;
pub mod eval;
pub mod geometry;
pub mod kinematics;
pub mod lp;
pub mod tolerance;

pub use error::{GammaError, Result};
pub use geometry::{ConvexPolygon, HalfPlane, Vec2};
