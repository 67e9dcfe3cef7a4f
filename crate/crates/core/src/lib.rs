//! Planar three-body problem in size, rotation and shape coordinates.
//!
//! The shape variable `zeta = (3/2) q3 / (q2 - q1)` parametrises triangles up
//! to similarity, `I` measures size and `theta` orientation. On top of the
//! coordinate maps sit the configurational measure `mu` and its geometry,
//! integrators for the reduced and Cartesian equations of motion, and the
//! normalized body positions `Q_k` built from a reduced trajectory.

pub mod contour;
pub mod dynamics;
pub mod error;
pub mod export;
pub mod fixtures;
pub mod geometry;
pub mod ode;
pub mod qk;
pub mod reduction;

pub use error::CoreError;
pub use reduction::{Alpha, CartesianState, ReducedState};
