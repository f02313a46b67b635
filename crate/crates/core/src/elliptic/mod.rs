//! Divergence-form elliptic equations on weighted graphs and the constants
//! that control their Harnack inequality and oscillation decay.

mod field;
mod functional;
mod graph;
mod harnack;
mod shrink;
mod solver;

pub use field::{coefficient_bounds, CoefficientBounds, CoefficientField, ScalarField};
pub use functional::{
    doubling_constant, neumann_on, neumann_poincare_constant, poincare_quotient,
    sobolev_constant_probe, sobolev_ratio, NeumannEigen, SobolevProbe,
};
pub use graph::{Edge, EdgeSpec, Grid2d, WeightedGraph};
pub use harnack::{
    harnack_ratio, harnack_sweep, oscillation_decay, HarnackSweep, OscillationDecay,
    SharpnessSetup,
};
pub use shrink::{
    dsvp_constants, shrink_chain, shrink_constant, unit_ball_volume, DyadicStep,
    GeometryConstants, ShrinkChain, MAX_LEDGER_DEPTH, PLACEHOLDER_SOBOLEV_CONSTANT,
};
pub use solver::{
    interior_residual, solve_divergence, solve_divergence_detailed, weak_form,
    DivergenceSolution, SOLVE_MAX_ITER, SOLVE_TOL,
};

use crate::linalg::LinalgError;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum EllipticError {
    #[error("invalid graph: {0}")]
    InvalidGraph(String),
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error("coefficient {0} is not positive")]
    NonPositiveCoefficient(f64),
    #[error("interior is not connected to the boundary")]
    SingularSystem,
    #[error("ball contains no vertices")]
    EmptyBall,
    #[error("ball has {0} vertices, need at least 2")]
    BallTooSmall(usize),
    #[error("ball is not connected")]
    DisconnectedBall,
    #[error("field value {value} at vertex {vertex} is not positive")]
    NonPositiveField { vertex: usize, value: f64 },
    #[error("invalid range: {0}")]
    InvalidRange(String),
    #[error("dimension {0} is below 2")]
    InvalidDimension(usize),
    #[error(transparent)]
    Linalg(#[from] LinalgError),
}
