//! 2D solvers: the circulation-of-A moving-conductor problem and the
//! axisymmetric TEAM-9a bore benchmark, each with Galerkin, weighted-residual
//! and SU/PG variants.

pub mod circ_a;
pub mod loopfield;
pub mod team9a;

pub use circ_a::{solve_circ_a, CircAConfig, CircASolution};
pub use loopfield::{ellipe, ellipk, loop_field};
pub use team9a::{solve_team9a_axi, Team9aConfig, Team9aSolution};
