//! Exact arbitrary-precision re-execution of the elimination argument ruling
//! out non-homographic constant-measure arcs for the inverse-square
//! three-body problem with equal masses.
//!
//! The pipeline builds the level-set polynomial `Q` and the curvature-matching
//! polynomial `P`, eliminates `Y = y^2` by a resultant, strips the predicted
//! factors, and eliminates `k^2` between the top coefficients.

pub mod condition;
pub mod domain;
pub mod elimination;
pub mod error;
pub mod gcd;
pub mod interp;
pub mod measure;
pub mod pipeline;
pub mod poly;
pub mod rational;
pub mod resultant;
pub mod shape_q;

pub use error::ProofError;
pub use poly::{MultiPoly, VarSet};
pub use rational::RationalFn;
