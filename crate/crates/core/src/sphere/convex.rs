use nalgebra::{DMatrix, SymmetricEigen};

use super::{tangent_basis, GeometryError, LongitudeChart, SpherePoint};
use crate::linalg::dot;

/// Smallest radius accepted by [`build_convex_function`].
pub const MIN_RADIUS: f64 = 1e-6;

/// Largest `λ` tried by the doubling search.
pub const MAX_LAMBDA: f64 = (1u64 << 20) as f64;

#[derive(Debug, Clone, PartialEq)]
pub struct ConvexBuilderResult {
    pub c: f64,
    pub lambda: f64,
    pub min_hessian_eigenvalue: f64,
    pub sample_count: usize,
}

/// `φ = θ + arcsin(c / r)`.
pub fn phi(x: &SpherePoint, chart: &LongitudeChart, c: f64) -> Result<f64, GeometryError> {
    let l = chart.lift(x)?;
    Ok(l.theta + (c / l.r).asin())
}

/// `F = λ⁻¹ exp(λ φ)`.
pub fn convex_function(
    x: &SpherePoint,
    chart: &LongitudeChart,
    c: f64,
    lambda: f64,
) -> Result<f64, GeometryError> {
    Ok((lambda * phi(x, chart, c)?).exp() / lambda)
}

/// `dφ` on the basis and `Hess φ` in the same basis.
fn phi_jet(
    x: &SpherePoint,
    chart: &LongitudeChart,
    c: f64,
    basis: &[Vec<f64>],
) -> Result<(Vec<f64>, DMatrix<f64>), GeometryError> {
    let l = chart.lift(x)?;
    let r = l.r;
    let s = r * r - c * c;
    let g1 = -c / (r * s.sqrt());
    let g2 = c * (2.0 * r * r - c * c) / (r * r * s.powf(1.5));
    let d: Vec<(f64, f64)> = basis
        .iter()
        .map(|b| chart.differentials(x.coords(), b))
        .collect();
    let n = basis.len();
    let dphi: Vec<f64> = d.iter().map(|(dr, dt)| dt + g1 * dr).collect();
    let hess = DMatrix::from_fn(n, n, |i, j| {
        let (ri, ti) = d[i];
        let (rj, tj) = d[j];
        let metric = dot(&basis[i], &basis[j]);
        let h_theta = -(ri * tj + ti * rj) / r;
        let h_r = -r * metric + r * ti * tj;
        h_theta + g2 * ri * rj + g1 * h_r
    });
    Ok((dphi, hess))
}

/// Smallest eigenvalue of `Hess φ + λ dφ ⊗ dφ`, i.e. of `Hess F` up to the
/// positive factor `exp(λφ)`.
pub fn bracket_min_eigenvalue(
    x: &SpherePoint,
    chart: &LongitudeChart,
    c: f64,
    lambda: f64,
) -> Result<f64, GeometryError> {
    let basis = tangent_basis(x);
    let (dphi, mut h) = phi_jet(x, chart, c, &basis)?;
    let n = basis.len();
    for i in 0..n {
        for j in 0..n {
            h[(i, j)] += lambda * dphi[i] * dphi[j];
        }
    }
    Ok(min_eig(h))
}

/// Smallest eigenvalue of the closed-form `Hess F` at `x`.
pub fn hess_f_min_eigenvalue(
    x: &SpherePoint,
    chart: &LongitudeChart,
    c: f64,
    lambda: f64,
) -> Result<f64, GeometryError> {
    let bracket = bracket_min_eigenvalue(x, chart, c, lambda)?;
    Ok((lambda * phi(x, chart, c)?).exp() * bracket)
}

/// Minimum of the smallest `Hess F` eigenvalue over `samples` for fixed
/// `c` and `λ`.
pub fn convex_min_eigenvalue(
    samples: &[SpherePoint],
    chart: &LongitudeChart,
    c: f64,
    lambda: f64,
) -> Result<f64, GeometryError> {
    let mut lowest = f64::INFINITY;
    for x in samples {
        lowest = lowest.min(hess_f_min_eigenvalue(x, chart, c, lambda)?);
    }
    Ok(lowest)
}

fn min_eig(m: DMatrix<f64>) -> f64 {
    SymmetricEigen::new(m)
        .eigenvalues
        .iter()
        .copied()
        .fold(f64::INFINITY, f64::min)
}

/// Picks `c = ½ min r` over the samples and doubles `λ` from 1 until `Hess F`
/// is positive definite at every sample.
pub fn build_convex_function(
    samples: &[SpherePoint],
    chart: &LongitudeChart,
) -> Result<ConvexBuilderResult, GeometryError> {
    if samples.is_empty() {
        return Err(GeometryError::NoMargin(0.0));
    }
    let min_r = samples
        .iter()
        .map(|x| chart.radius(x.coords()))
        .fold(f64::INFINITY, f64::min);
    if min_r <= MIN_RADIUS {
        return Err(GeometryError::NoMargin(min_r));
    }
    let c = 0.5 * min_r;
    let jets = samples
        .iter()
        .map(|x| {
            let basis = tangent_basis(x);
            let (dphi, h) = phi_jet(x, chart, c, &basis)?;
            Ok((x, dphi, h))
        })
        .collect::<Result<Vec<_>, GeometryError>>()?;

    let mut lambda = 1.0;
    while lambda <= MAX_LAMBDA {
        let mut lowest_bracket = f64::INFINITY;
        let mut lowest = f64::INFINITY;
        for (x, dphi, h) in &jets {
            let n = dphi.len();
            let m = DMatrix::from_fn(n, n, |i, j| h[(i, j)] + lambda * dphi[i] * dphi[j]);
            let e = min_eig(m);
            lowest_bracket = lowest_bracket.min(e);
            lowest = lowest.min((lambda * phi(x, chart, c)?).exp() * e);
        }
        if lowest_bracket > 0.0 {
            log::debug!("convex builder: c = {c}, lambda = {lambda}, min eigenvalue = {lowest}");
            return Ok(ConvexBuilderResult {
                c,
                lambda,
                min_hessian_eigenvalue: lowest,
                sample_count: samples.len(),
            });
        }
        lambda *= 2.0;
    }
    Err(GeometryError::SearchExhausted(lambda))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sphere::fd_hessian;
    use std::f64::consts::FRAC_PI_6;

    fn cap_samples(count: usize) -> Vec<SpherePoint> {
        // Deterministic spiral over the cap of radius π/6 around (0,1,0).
        let golden = std::f64::consts::PI * (3.0 - 5f64.sqrt());
        (0..count)
            .map(|k| {
                let s = (k as f64 + 0.5) / count as f64;
                let rho = FRAC_PI_6 * s.sqrt();
                let a = k as f64 * golden;
                let (ct, st) = (rho.cos(), rho.sin());
                SpherePoint::from_vector(vec![st * a.cos(), ct, st * a.sin()]).unwrap()
            })
            .collect()
    }

    #[test]
    fn single_sample_succeeds() {
        let x = SpherePoint::from_vector(vec![0.2, 0.9, 0.3]).unwrap();
        let chart = LongitudeChart::standard();
        let res = build_convex_function(std::slice::from_ref(&x), &chart).unwrap();
        assert!(res.min_hessian_eigenvalue > 0.0);
        assert_eq!(res.sample_count, 1);
        assert!(res.lambda >= 1.0);
    }

    #[test]
    fn cap_of_two_hundred_points() {
        let samples = cap_samples(200);
        let chart = LongitudeChart::standard();
        let res = build_convex_function(&samples, &chart).unwrap();
        assert!(res.min_hessian_eigenvalue > 0.0);
        assert!(res.c > 0.0 && res.c < 1.0);
        let again = convex_min_eigenvalue(&samples, &chart, res.c, res.lambda).unwrap();
        assert_eq!(again, res.min_hessian_eigenvalue);
    }

    #[test]
    fn axis_sample_has_no_margin() {
        let samples = vec![SpherePoint::basis(2, 2).unwrap()];
        assert!(matches!(
            build_convex_function(&samples, &LongitudeChart::standard()),
            Err(GeometryError::NoMargin(_))
        ));
    }

    #[test]
    fn closed_form_hessian_matches_finite_differences() {
        let x = SpherePoint::from_vector(vec![-0.4, 0.7, 0.3, 0.2]).unwrap();
        let chart = LongitudeChart::standard();
        let (c, lambda) = (0.3, 2.0);
        let basis = tangent_basis(&x);
        let fd = fd_hessian(
            |p: &[f64]| {
                SpherePoint::new(p.to_vec())
                    .ok()
                    .and_then(|q| convex_function(&q, &chart, c, lambda).ok())
                    .unwrap_or(f64::NAN)
            },
            &x,
            &basis,
            1e-3,
        );
        let (dphi, h) = phi_jet(&x, &chart, c, &basis).unwrap();
        let scale = (lambda * phi(&x, &chart, c).unwrap()).exp();
        let n = basis.len();
        let closed = DMatrix::from_fn(n, n, |i, j| scale * (h[(i, j)] + lambda * dphi[i] * dphi[j]));
        assert!((fd.entries() - closed).amax() < 1e-5 * scale);
    }
}
