//! Error type shared across the crate.

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid mesh spec: {0}")]
    MeshSpec(String),

    #[error("element {elem}: nonpositive Jacobian determinant {det:.3e}")]
    InvertedElement { elem: usize, det: f64 },

    #[error("unsupported quadrature order {0} (supported: 1, 2, 3 per direction)")]
    QuadratureOrder(usize),

    #[error("dof index {dof} out of range (system has {n} dofs)")]
    DofOutOfRange { dof: usize, n: usize },

    #[error("dof {dof} constrained twice with conflicting values ({first} vs {second})")]
    ConflictingConstraint { dof: usize, first: f64, second: f64 },

    #[error("matrix is structurally singular at column {col}")]
    StructuralSingular { col: usize },

    #[error("matrix is numerically singular (zero pivot during factorization)")]
    NumericalSingular,

    #[error("solve residual {residual:.3e} exceeds tolerance {tol:.3e}")]
    ResidualTooLarge { residual: f64, tol: f64 },

    #[error("invalid problem config: {0}")]
    Config(String),

    #[error("point {point:?} lies outside the mesh")]
    PointOutsideMesh { point: [f64; 3] },

    #[error("estimated factorization memory {estimate_gb:.1} GiB exceeds cap {cap_gb:.1} GiB")]
    MemoryCap { estimate_gb: f64, cap_gb: f64 },

    #[error("stencil rows are not translation invariant: {0}")]
    StencilNotUniform(String),

    #[error("transfer function has an identically zero denominator")]
    ZeroDenominator,

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
