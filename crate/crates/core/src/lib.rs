//! Numerical laboratory for harmonic maps into spheres and minimal graphs,
//! built around the longitude function of a coordinate plane.

pub mod linalg;
pub mod sphere;
pub mod elliptic;
pub mod harmonic;
pub mod minimal;
pub mod experiment;
