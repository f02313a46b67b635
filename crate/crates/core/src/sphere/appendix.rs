use std::f64::consts::{PI, TAU};

use super::hessian::first_derivative_along;
use super::{GeometryError, SpherePoint};

const DEGENERATE_TOL: f64 = 1e-12;
const MEMBERSHIP_SLACK: f64 = 1e-12;

/// A closed interval of longitudes `[start, end]` within `[0, 2π]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Arc {
    pub start: f64,
    pub end: f64,
}

impl Arc {
    pub fn new(start: f64, end: f64) -> Self {
        Self { start, end }
    }

    pub fn contains(&self, theta: f64) -> bool {
        let t = theta.rem_euclid(TAU);
        let inside = |t: f64| t >= self.start - MEMBERSHIP_SLACK && t <= self.end + MEMBERSHIP_SLACK;
        inside(t) || inside(t + TAU) || inside(t - TAU)
    }
}

/// Three closed arcs of length `π/3` spaced so that every pair of antipodal
/// equator points meets at least one of them.
pub fn three_arc_set() -> Vec<Arc> {
    vec![
        Arc::new(0.0, PI / 3.0),
        Arc::new(2.0 * PI / 3.0, PI),
        Arc::new(4.0 * PI / 3.0, 5.0 * PI / 3.0),
    ]
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CircleHit {
    pub hit: bool,
    /// Equator longitude in `[0, 2π)` lying in one of the arcs.
    pub witness: Option<f64>,
}

fn cross(a: &[f64], b: &[f64]) -> [f64; 3] {
    [
        a[1] * b[2] - a[2] * b[1],
        a[2] * b[0] - a[0] * b[2],
        a[0] * b[1] - a[1] * b[0],
    ]
}

/// Does the great circle through `p` spanned with `t` meet the equator
/// `{x_3 = 0}` of `S^2` inside one of `arcs`?
pub fn great_circle_hits_arcs(
    p: &SpherePoint,
    t: &[f64],
    arcs: &[Arc],
) -> Result<CircleHit, GeometryError> {
    if p.coords().len() != 3 || t.len() != 3 {
        return Err(GeometryError::DimensionMismatch {
            expected: 3,
            found: p.coords().len().max(t.len()),
        });
    }
    let normal = cross(p.coords(), t);
    let nn = crate::linalg::norm(&normal);
    if nn < DEGENERATE_TOL * crate::linalg::norm(t).max(1.0) {
        return Err(GeometryError::DegenerateCircle);
    }
    if arcs.is_empty() {
        return Ok(CircleHit { hit: false, witness: None });
    }
    let unit: Vec<f64> = normal.iter().map(|c| c / nn).collect();
    // The plane normal is ±e3: the circle is the equator itself.
    if unit[0].hypot(unit[1]) < DEGENERATE_TOL {
        return Ok(CircleHit {
            hit: true,
            witness: Some(arcs[0].start.rem_euclid(TAU)),
        });
    }
    // Direction of the intersection line of the two planes: n × e3.
    let d = [unit[1], -unit[0]];
    let theta = d[1].atan2(d[0]).rem_euclid(TAU);
    for candidate in [theta, (theta + PI).rem_euclid(TAU)] {
        if arcs.iter().any(|a| a.contains(candidate)) {
            return Ok(CircleHit {
                hit: true,
                witness: Some(candidate),
            });
        }
    }
    Ok(CircleHit { hit: false, witness: None })
}

/// Rotation of `S^2` about the `x_3` axis.
pub fn rotate_about_axis(x: &[f64], angle: f64) -> [f64; 3] {
    let (s, c) = angle.sin_cos();
    [c * x[0] - s * x[1], s * x[0] + c * x[1], x[2]]
}

/// Gradient norms at the north and south poles of the rotation average
/// `h = (1/k) Σ_j f ∘ R_{2πj/k}`, by Richardson central differences.
pub fn symmetrized_gradient_at_poles<F: Fn(&[f64]) -> f64>(f: F, k: usize) -> (f64, f64) {
    let k = k.max(1);
    let h = |x: &[f64]| {
        (0..k)
            .map(|j| f(&rotate_about_axis(x, TAU * j as f64 / k as f64)))
            .sum::<f64>()
            / k as f64
    };
    let step = 1e-3;
    let grad = |pole: [f64; 3]| {
        let a = first_derivative_along(&h, &pole, &[1.0, 0.0, 0.0], step);
        let b = first_derivative_along(&h, &pole, &[0.0, 1.0, 0.0], step);
        a.hypot(b)
    };
    (grad([0.0, 0.0, 1.0]), grad([0.0, 0.0, -1.0]))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn meridian_hits_at_antipode() {
        let p = SpherePoint::basis(2, 2).unwrap();
        let hit = great_circle_hits_arcs(&p, &[0.0, 1.0, 0.0], &three_arc_set()).unwrap();
        assert!(hit.hit);
        assert!((hit.witness.unwrap() - 1.5 * PI).abs() < 1e-12);
    }

    #[test]
    fn equator_and_empty_arcs() {
        let p = SpherePoint::basis(0, 2).unwrap();
        let eq = great_circle_hits_arcs(&p, &[0.0, 1.0, 0.0], &three_arc_set()).unwrap();
        assert!(eq.hit);
        let none = great_circle_hits_arcs(&p, &[0.0, 0.0, 1.0], &[]).unwrap();
        assert!(!none.hit);
    }

    #[test]
    fn degenerate_pair() {
        let p = SpherePoint::basis(0, 2).unwrap();
        assert!(matches!(
            great_circle_hits_arcs(&p, &[2.0, 0.0, 0.0], &three_arc_set()),
            Err(GeometryError::DegenerateCircle)
        ));
    }

    #[test]
    fn symmetrized_gradients_vanish() {
        let (n, s) = symmetrized_gradient_at_poles(|x: &[f64]| x[2], 3);
        assert!(n < 1e-8 && s < 1e-8);
        let (n, s) = symmetrized_gradient_at_poles(|x: &[f64]| x[0], 3);
        assert!(n < 1e-8 && s < 1e-8);
        let (n, s) = symmetrized_gradient_at_poles(|x: &[f64]| x[0] * x[0] + x[0] * x[1] + x[2].powi(3), 3);
        assert!(n < 1e-8 && s < 1e-8);
        // Without averaging the height-free linear function has unit gradient.
        let (n, _) = symmetrized_gradient_at_poles(|x: &[f64]| x[0], 1);
        assert!((n - 1.0).abs() < 1e-8);
    }
}
