//! Discrete harmonic maps from weighted graphs into spheres, the equation
//! satisfied by their longitude, and the image-shrinking check.

mod field;
mod flow;
mod longitude;

pub use field::SphereField;
pub use flow::{dirichlet_energy, harmonic_flow, harmonic_flow_with, tension, FlowOptions, FlowOutcome};
pub use longitude::{
    compose_fields, image_shrink_check, is_weakly_harmonic, random_test_function, weak_longitude_residual,
    weak_residual_probe, Composition, EdgeForm, MTable, ShrinkReport, WeakResidualProbe,
};

use crate::elliptic::EllipticError;
use crate::sphere::GeometryError;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum HarmonicError {
    #[error("no boundary values given")]
    EmptyBoundary,
    #[error("vertex {0} is out of range")]
    VertexOutOfRange(usize),
    #[error("vertex {vertex}: expected {expected} coordinates, found {found}")]
    DimensionMismatch { vertex: usize, expected: usize, found: usize },
    #[error("weighted neighbor average vanishes (vertex {vertex:?})")]
    ZeroAverage { vertex: Option<usize> },
    #[error("no convergence after {iterations} sweeps (displacement {displacement:e})")]
    NonConvergence { iterations: usize, displacement: f64 },
    #[error("vertex {vertex}: {source}")]
    Chart { vertex: usize, source: GeometryError },
    #[error("test function is nonzero on boundary vertex {vertex}")]
    NotCompactlySupported { vertex: usize },
    #[error("image shrinking violated at vertex {vertex:?}: {detail}")]
    ShrinkViolated { vertex: Option<usize>, detail: String },
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error(transparent)]
    Elliptic(#[from] EllipticError),
}
