//! Lattice-point semigroups of weighted trivalent graphs.
//!
//! A weighting of a marked trivalent graph at level `L` assigns nonnegative
//! integers to edges so that at each internal vertex the three incident
//! weights sum to an even number at most `2L` and satisfy the triangle
//! inequalities. Under edge-wise addition these form a graded semigroup.
//! The crate enumerates the semigroup, factors its elements into level-1
//! and level-2 pieces with explicit combinatorial procedures, and checks by
//! exhaustive search that those pieces generate and that their relations
//! are generated in levels up to four.

pub mod cli;
pub mod enumerate;
pub mod error;
pub mod factorize;
pub mod graph;
pub mod relations;
pub mod repro;
pub mod subdivision;
pub mod weighting;

pub use error::{Error, Result};
pub use graph::{build_b1, build_b2, build_gamma, MarkedGraph};
pub use weighting::Weighting;
