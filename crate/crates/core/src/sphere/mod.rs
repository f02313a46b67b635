//! Geometry of the round sphere: the polar lift of the projection onto a
//! coordinate plane, its Hessians, and the convex functions built from it.

mod appendix;
mod chart;
mod convex;
mod hessian;
mod point;

pub use appendix::{
    great_circle_hits_arcs, rotate_about_axis, symmetrized_gradient_at_poles, three_arc_set, Arc,
    CircleHit,
};
pub use chart::{Branch, Longitude, LongitudeChart, DEFAULT_CUT_MARGIN};
pub use convex::{
    bracket_min_eigenvalue, build_convex_function, convex_function, convex_min_eigenvalue,
    hess_f_min_eigenvalue, phi, ConvexBuilderResult, MAX_LAMBDA, MIN_RADIUS,
};
pub use hessian::{
    fd_hessian, first_derivative_along, hess_linear, hess_r, hess_r_pair, hess_theta,
    hess_theta_pair, second_derivative_along, BilinearForm,
};
pub use point::{geodesic, project, tangent_basis, SpherePoint, TangentVector};

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum GeometryError {
    #[error("sphere dimension {0} is below 2")]
    DimensionTooSmall(usize),
    #[error("expected {expected} coordinates, found {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("coordinates have norm {0}, not 1")]
    NotUnit(f64),
    #[error("vector is not a unit tangent vector (defect {0:e})")]
    NotTangent(f64),
    #[error("point lies within {0:e} rad of the branch cut")]
    OnBranchCut(f64),
    #[error("point lies on the axis sphere (r = {0:e})")]
    OnAxis(f64),
    #[error("angle continuation jumped by {jump} at step {step}")]
    JumpTooLarge { step: usize, jump: f64 },
    #[error("minimum radius {0:e} leaves no room for the convex construction")]
    NoMargin(f64),
    #[error("no admissible lambda up to {0}")]
    SearchExhausted(f64),
    #[error("point and tangent do not span a plane")]
    DegenerateCircle,
}
