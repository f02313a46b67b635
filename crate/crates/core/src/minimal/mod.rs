//! Minimal graphs over planar lattices, finite-difference geometry of sampled
//! surfaces, and the curvature-estimate audit built from the Gauss map.

mod audit;
mod graph;
mod identities;
mod patch;
mod solve;
mod volume;

pub use audit::{
    bernstein_growth_audit, curvature_estimate_audit, gauss_chart, growth_integral, AuditOptions, AuditReport,
    GrowthAudit, GrowthVerdict, PowerChain,
};
pub use graph::{MinimalGraph, NodeKind};
pub use identities::{
    curvature_norm, energy_density_gap, gauss_harmonicity_residual, gauss_longitude_ratio, gauss_map,
    gauss_map_from_slope, jacobi_identity_residual, longitude_ratio_from_slope, second_fundamental_form,
    simons_kato_check, JacobiResiduals, SecondFundamentalForm, SimonsKato,
};
pub use patch::{ImmersedPatch, PatchGeometry, SampleGeometry};
pub use solve::{discrete_area, mse_residual, solve_mse, solve_mse_with, MseOptions, MseSolution};
pub use volume::{
    ball_volume, dyadic_radii, induced_metric_graph, lambda_estimate, triangle_ball_area, triangulate,
    volume_density_and_lambda, volume_density_table, DensityTable, LambdaEstimate,
};

use crate::elliptic::EllipticError;
use crate::linalg::LinalgError;
use crate::sphere::GeometryError;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum MinimalError {
    #[error("Newton iteration diverged after {iterations} steps (residual {residual:e})")]
    NewtonDiverged { iterations: usize, residual: f64 },
    #[error("boundary slope {0:e} is too steep")]
    SteepBoundary(f64),
    #[error("node {0} is not an interior node")]
    BoundaryNode(usize),
    #[error("sample {0} lacks a full difference stencil")]
    InsufficientStencil(usize),
    #[error("sample {sample}: (gamma, x0) = {value:e} is not positive")]
    NonTransverse { sample: usize, value: f64 },
    #[error("mean curvature {0:e} exceeds the minimality tolerance")]
    NotMinimal(f64),
    #[error("no surface inside the ball of radius {0}")]
    EmptyBall(f64),
    #[error("sample {sample}: Gauss image leaves the chart: {source}")]
    GaussImageOutOfChart { sample: usize, source: GeometryError },
    #[error("growth table has {0} usable scales, need at least 4 spanning a factor 8")]
    InsufficientScales(usize),
    #[error("invalid grid: {0}")]
    InvalidGrid(String),
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error(transparent)]
    Elliptic(#[from] EllipticError),
    #[error(transparent)]
    Linalg(#[from] LinalgError),
}
