//! Finite-element solvers for linear moving-conductor problems.
//!
//! The library implements a parameter-free weighted-residual formulation that
//! removes the oscillation-driving first-derivative term from the governing
//! equations by carrying the reaction field as an auxiliary nodal unknown,
//! alongside classical Galerkin and SU/PG baselines:
//!
//! - [`problems1d`]: 1D moving conductor and transport equations with
//!   closed-form oracles;
//! - [`problems2d`]: the 2D circulation-of-A problem and the axisymmetric
//!   TEAM-9a bore benchmark;
//! - [`problems3d`]: the cartesian 3D TEAM-9a benchmark;
//! - [`stability`]: difference-equation stencil extraction and Z-transform
//!   pole/zero classification of the discrete schemes;
//! - [`report`]: error norms, experimental orders of convergence and table
//!   generation.
//!
//! Supporting layers: structured [`mesh`] generation, element [`weakforms`]
//! kernels, sparse assembly and direct solution in [`linalg`], field
//! [`recovery`] from `curl A`, and CSV/VTK/config [`io`].

pub mod error;
pub mod io;
pub mod linalg;
pub mod mesh;
pub mod problems1d;
pub mod problems2d;
pub mod problems3d;
pub mod recovery;
pub mod report;
pub mod solution;
pub mod stability;
pub mod weakforms;

pub use error::{Error, Result};

/// Discretisation scheme selector shared by all problem families.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Formulation {
    /// Central Galerkin weighting (baseline; oscillatory at high Peclet).
    Galerkin,
    /// Auxiliary-field weighted-residual scheme (parameter-free).
    WeightedResidual,
    /// Streamline Upwind / Petrov-Galerkin baseline.
    Supg,
}

impl Formulation {
    pub fn name(self) -> &'static str {
        match self {
            Formulation::Galerkin => "galerkin",
            Formulation::WeightedResidual => "wr",
            Formulation::Supg => "supg",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        match s.to_ascii_lowercase().as_str() {
            "galerkin" | "gfe" => Some(Formulation::Galerkin),
            "wr" | "weighted_residual" | "weighted-residual" => Some(Formulation::WeightedResidual),
            "supg" | "su/pg" => Some(Formulation::Supg),
            _ => None,
        }
    }
}
