//! Gauss map and the pointwise identities of minimal surfaces, evaluated by
//! finite differences.

use nalgebra::{Matrix2, Vector3};

use super::{MinimalError, MinimalGraph, PatchGeometry};
use crate::sphere::SpherePoint;

/// `(1 + |Df|²)^{-1/2} (-Df, 1)`.
pub fn gauss_map_from_slope(df: &[f64]) -> SpherePoint {
    let w = (1.0 + df.iter().map(|d| d * d).sum::<f64>()).sqrt();
    let mut v: Vec<f64> = df.iter().map(|d| -d / w).collect();
    v.push(1.0 / w);
    SpherePoint::from_vector(v).expect("last component is positive")
}

pub fn gauss_map(mg: &MinimalGraph, node: usize) -> Result<SpherePoint, MinimalError> {
    Ok(gauss_map_from_slope(&mg.slope(node)?))
}

/// `r⁻²∘γ = (1 + |Df|²) / (1 + (D^m f)²)` for the projection onto the last
/// two coordinates.
pub fn longitude_ratio_from_slope(df: &[f64]) -> f64 {
    let last = df.last().copied().unwrap_or(0.0);
    1.0 + df[..df.len().saturating_sub(1)].iter().map(|d| d * d).sum::<f64>() / (1.0 + last * last)
}

pub fn gauss_longitude_ratio(mg: &MinimalGraph, node: usize) -> Result<f64, MinimalError> {
    Ok(longitude_ratio_from_slope(&mg.slope(node)?))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SecondFundamentalForm {
    /// `B` in an orthonormal tangent frame.
    pub b: Matrix2<f64>,
    pub norm_sq: f64,
    /// `½|B|²`.
    pub energy_from_b: f64,
    /// `½ g^{ij} ⟨∂_i γ, ∂_j γ⟩` from differences of the normal.
    pub energy_from_dgamma: f64,
}

pub fn second_fundamental_form(geo: &PatchGeometry, s: usize) -> Result<SecondFundamentalForm, MinimalError> {
    if !geo.is_level2(s) {
        return Err(MinimalError::InsufficientStencil(s));
    }
    let g = geo.sample(s).expect("level-2 sample");
    Ok(SecondFundamentalForm {
        b: g.b_onb,
        norm_sq: g.norm_b_sq,
        energy_from_b: 0.5 * g.norm_b_sq,
        energy_from_dgamma: 0.5 * gauss_energy_density(geo, &geo.normals(), s),
    })
}

fn gauss_energy_density(geo: &PatchGeometry, normals: &[Vector3<f64>], s: usize) -> f64 {
    let g = geo.sample(s).expect("level-2 sample");
    let (du, dv) = (geo.patch.du, geo.patch.dv);
    let nb = |di, dj| geo.patch.neighbor(s, di, dj).expect("ring");
    let nu = (normals[nb(1, 0)] - normals[nb(-1, 0)]) / (2.0 * du);
    let nv = (normals[nb(0, 1)] - normals[nb(0, -1)]) / (2.0 * dv);
    let gram = Matrix2::new(nu.dot(&nu), nu.dot(&nv), nv.dot(&nu), nv.dot(&nv));
    (g.inverse_metric * gram).trace()
}

/// Largest `|½|dγ|² - ½|B|²|` over level-2 samples.
pub fn energy_density_gap(geo: &PatchGeometry) -> f64 {
    let normals = geo.normals();
    geo.level2_samples()
        .into_iter()
        .map(|s| (0.5 * gauss_energy_density(geo, &normals, s) - 0.5 * geo.sample(s).unwrap().norm_b_sq).abs())
        .fold(0.0, f64::max)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct JacobiResiduals {
    /// `max |Δf + |B|² f|` for `f = (γ, x₀)`.
    pub res_f: f64,
    /// `max |Δh - |B|² h - 2 h⁻¹ |∇h|²|` for `h = 1/f`, differenced directly.
    pub res_h: f64,
    /// `max |h² (Δf + |B|² f)|`, the value the `h` identity inherits from
    /// the `f` identity.
    pub res_h_from_f: f64,
}

pub fn jacobi_identity_residual(geo: &PatchGeometry, x0: &SpherePoint) -> Result<JacobiResiduals, MinimalError> {
    if x0.coords().len() != 3 {
        return Err(MinimalError::InvalidGrid(format!(
            "direction has {} coordinates, expected 3",
            x0.coords().len()
        )));
    }
    let x0 = Vector3::from_column_slice(x0.coords());
    let f = geo.field(|g| g.normal.dot(&x0));
    if let Some(s) = geo.level1_samples().into_iter().find(|&s| !(f[s] > 0.0)) {
        return Err(MinimalError::NonTransverse { sample: s, value: f[s] });
    }
    let h: Vec<f64> = f.iter().map(|v| 1.0 / v).collect();
    let mut out = JacobiResiduals {
        res_f: 0.0,
        res_h: 0.0,
        res_h_from_f: 0.0,
    };
    for s in geo.level2_samples() {
        let b2 = geo.sample(s).unwrap().norm_b_sq;
        let rf = geo.laplacian(&f, s) + b2 * f[s];
        let rh = geo.laplacian(&h, s) - b2 * h[s] - 2.0 * geo.gradient_sq(&h, s) / h[s];
        out.res_f = out.res_f.max(rf.abs());
        out.res_h = out.res_h.max(rh.abs());
        out.res_h_from_f = out.res_h_from_f.max((h[s] * h[s] * rf).abs());
    }
    Ok(out)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SimonsKato {
    /// `max |Δ|B|² + 2|B|⁴ - 2|∇B|²|`.
    pub simons_residual: f64,
    /// `min (|∇B|² - (1 + 2/m)|∇|B||²)`.
    pub kato_slack: f64,
    pub samples: usize,
}

/// Requires `|tr S| ≤ minimality_tol` at every level-1 sample.
pub fn simons_kato_check(geo: &PatchGeometry, minimality_tol: f64) -> Result<SimonsKato, MinimalError> {
    let worst = geo
        .level1_samples()
        .into_iter()
        .map(|s| geo.sample(s).unwrap().mean_curvature.abs())
        .fold(0.0, f64::max);
    if worst > minimality_tol {
        return Err(MinimalError::NotMinimal(worst));
    }
    let b2 = geo.field(|g| g.norm_b_sq);
    let b1: Vec<f64> = b2.iter().map(|v| v.sqrt()).collect();
    let m = 2.0;
    let mut out = SimonsKato {
        simons_residual: 0.0,
        kato_slack: f64::INFINITY,
        samples: 0,
    };
    for s in geo.level2_samples() {
        let nabla_b = geo.covariant_b_sq(s);
        let simons = geo.laplacian(&b2, s) + 2.0 * b2[s] * b2[s] - 2.0 * nabla_b;
        let kato = nabla_b - (1.0 + 2.0 / m) * geo.gradient_sq(&b1, s);
        out.simons_residual = out.simons_residual.max(simons.abs());
        out.kato_slack = out.kato_slack.min(kato);
        out.samples += 1;
    }
    if out.samples == 0 {
        out.kato_slack = 0.0;
    }
    Ok(out)
}

/// Largest norm of the tangential part of `Δγ` over level-2 samples.
pub fn gauss_harmonicity_residual(geo: &PatchGeometry) -> f64 {
    let normals = geo.normals();
    geo.level2_samples()
        .into_iter()
        .map(|s| {
            let lap = geo.laplacian_vec(&normals, s);
            let n = normals[s];
            (lap - n * n.dot(&lap)).norm()
        })
        .fold(0.0, f64::max)
}

/// `|B|` at a level-1 sample.
pub fn curvature_norm(geo: &PatchGeometry, s: usize) -> Result<f64, MinimalError> {
    geo.sample(s)
        .map(|g| g.norm_b_sq.sqrt())
        .ok_or(MinimalError::InsufficientStencil(s))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::minimal::ImmersedPatch;

    #[test]
    fn gauss_map_examples() {
        let g = gauss_map_from_slope(&[0.0, 0.0]);
        assert_eq!(g.coords(), &[0.0, 0.0, 1.0]);
        let g = gauss_map_from_slope(&[1.0, 2.0]);
        let s6 = 6f64.sqrt();
        for (a, b) in g.coords().iter().zip([-1.0 / s6, -2.0 / s6, 1.0 / s6]) {
            assert!((a - b).abs() < 1e-15);
        }
    }

    #[test]
    fn longitude_ratio_examples() {
        assert!((longitude_ratio_from_slope(&[1.0, 0.0, 2.0]) - 1.2).abs() < 1e-15);
        assert_eq!(longitude_ratio_from_slope(&[0.0, 0.0]), 1.0);
        assert_eq!(longitude_ratio_from_slope(&[0.0, 0.0, 7.5]), 1.0);
    }

    #[test]
    fn affine_graph_identities_vanish() {
        let mg = MinimalGraph::square(-1.0, 1.0, 16, |x, y| 0.4 * x + 0.3 * y - 0.1).unwrap();
        let patch = ImmersedPatch::from_graph(&mg);
        let geo = patch.geometry();
        let up = SpherePoint::basis(2, 2).unwrap();
        let j = jacobi_identity_residual(&geo, &up).unwrap();
        assert!(j.res_f < 1e-10 && j.res_h < 1e-10 && j.res_h_from_f < 1e-10);
        let sk = simons_kato_check(&geo, 1e-8).unwrap();
        assert!(sk.simons_residual < 1e-10 && sk.kato_slack.abs() < 1e-10);
        assert!(gauss_harmonicity_residual(&geo) < 1e-10);
        let sff = second_fundamental_form(&geo, mg.index(8, 8)).unwrap();
        assert!(sff.norm_sq < 1e-20 && sff.energy_from_dgamma < 1e-20);
        assert!(matches!(
            second_fundamental_form(&geo, mg.index(1, 1)),
            Err(MinimalError::InsufficientStencil(_))
        ));
    }

    #[test]
    fn tilted_direction_is_non_transverse_somewhere() {
        let mg = MinimalGraph::square(-1.0, 1.0, 8, |x, _| 3.0 * x * x).unwrap();
        let patch = ImmersedPatch::from_graph(&mg);
        let x0 = SpherePoint::basis(0, 2).unwrap();
        assert!(matches!(
            jacobi_identity_residual(&patch.geometry(), &x0),
            Err(MinimalError::NonTransverse { .. })
        ));
    }

    #[test]
    fn sphere_is_not_minimal() {
        let patch = ImmersedPatch::unit_sphere(0.05).unwrap();
        assert!(matches!(
            simons_kato_check(&patch.geometry(), 1e-3),
            Err(MinimalError::NotMinimal(_))
        ));
    }
}
