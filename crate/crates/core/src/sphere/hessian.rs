use nalgebra::{DMatrix, SymmetricEigen};

use super::point::geodesic_coords;
use super::{GeometryError, LongitudeChart, SpherePoint};
use crate::linalg::dot;

/// A symmetric bilinear form on `T_x S^n`, stored in an orthonormal basis.
#[derive(Debug, Clone, PartialEq)]
pub struct BilinearForm {
    entries: DMatrix<f64>,
}

impl BilinearForm {
    /// Symmetrizes `m` so that `entries == entries^T` holds exactly.
    pub fn new(m: DMatrix<f64>) -> Self {
        assert!(m.is_square(), "bilinear form needs a square matrix");
        let n = m.nrows();
        let mut entries = m;
        for i in 0..n {
            for j in (i + 1)..n {
                let s = 0.5 * (entries[(i, j)] + entries[(j, i)]);
                entries[(i, j)] = s;
                entries[(j, i)] = s;
            }
        }
        Self { entries }
    }

    pub fn from_fn(n: usize, f: impl FnMut(usize, usize) -> f64) -> Self {
        Self::new(DMatrix::from_fn(n, n, f))
    }

    pub fn entries(&self) -> &DMatrix<f64> {
        &self.entries
    }

    pub fn dim(&self) -> usize {
        self.entries.nrows()
    }

    pub fn max_abs_diff(&self, other: &BilinearForm) -> f64 {
        (&self.entries - &other.entries).amax()
    }

    pub fn min_eigenvalue(&self) -> f64 {
        SymmetricEigen::new(self.entries.clone())
            .eigenvalues
            .iter()
            .copied()
            .fold(f64::INFINITY, f64::min)
    }

    /// Evaluates on vectors given by their coefficients in the basis.
    pub fn eval(&self, v: &[f64], w: &[f64]) -> f64 {
        let n = self.dim();
        let mut s = 0.0;
        for i in 0..n {
            for j in 0..n {
                s += v[i] * self.entries[(i, j)] * w[j];
            }
        }
        s
    }
}

fn form_on_basis(basis: &[Vec<f64>], pair: impl Fn(&[f64], &[f64]) -> f64) -> BilinearForm {
    BilinearForm::from_fn(basis.len(), |i, j| pair(&basis[i], &basis[j]))
}

/// Hessian of the linear function `(·, a)`: `-(x, a)` times the metric.
pub fn hess_linear(x: &SpherePoint, a: &[f64], basis: &[Vec<f64>]) -> BilinearForm {
    let c = -x.dot(a);
    form_on_basis(basis, |v, w| c * dot(v, w))
}

/// `Hess r(v, w) = -r <v, w> + r dθ(v) dθ(w)` for ambient tangent vectors.
pub fn hess_r_pair(
    x: &SpherePoint,
    chart: &LongitudeChart,
    v: &[f64],
    w: &[f64],
) -> Result<f64, GeometryError> {
    let l = chart.lift(x)?;
    let (_, tv) = chart.differentials(x.coords(), v);
    let (_, tw) = chart.differentials(x.coords(), w);
    Ok(-l.r * dot(v, w) + l.r * tv * tw)
}

/// `Hess θ(v, w) = -(dr(v) dθ(w) + dθ(v) dr(w)) / r`.
pub fn hess_theta_pair(
    x: &SpherePoint,
    chart: &LongitudeChart,
    v: &[f64],
    w: &[f64],
) -> Result<f64, GeometryError> {
    let l = chart.lift(x)?;
    let (rv, tv) = chart.differentials(x.coords(), v);
    let (rw, tw) = chart.differentials(x.coords(), w);
    Ok(-(rv * tw + tv * rw) / l.r)
}

pub fn hess_r(
    x: &SpherePoint,
    chart: &LongitudeChart,
    basis: &[Vec<f64>],
) -> Result<BilinearForm, GeometryError> {
    let l = chart.lift(x)?;
    let d: Vec<f64> = basis
        .iter()
        .map(|b| chart.differentials(x.coords(), b).1)
        .collect();
    Ok(BilinearForm::from_fn(basis.len(), |i, j| {
        -l.r * dot(&basis[i], &basis[j]) + l.r * d[i] * d[j]
    }))
}

pub fn hess_theta(
    x: &SpherePoint,
    chart: &LongitudeChart,
    basis: &[Vec<f64>],
) -> Result<BilinearForm, GeometryError> {
    let l = chart.lift(x)?;
    let d: Vec<(f64, f64)> = basis
        .iter()
        .map(|b| chart.differentials(x.coords(), b))
        .collect();
    Ok(BilinearForm::from_fn(basis.len(), |i, j| {
        -(d[i].0 * d[j].1 + d[i].1 * d[j].0) / l.r
    }))
}

/// `d²/dt² f(γ(t))` at `t = 0` along the unit-speed geodesic in direction `v`,
/// central differences with one Richardson step.
pub fn second_derivative_along<F: Fn(&[f64]) -> f64>(f: &F, x: &[f64], v: &[f64], h: f64) -> f64 {
    let f0 = f(x);
    let d = |s: f64| (f(&geodesic_coords(x, v, s)) - 2.0 * f0 + f(&geodesic_coords(x, v, -s))) / (s * s);
    (4.0 * d(0.5 * h) - d(h)) / 3.0
}

/// First derivative along the geodesic, central differences with Richardson.
pub fn first_derivative_along<F: Fn(&[f64]) -> f64>(f: &F, x: &[f64], v: &[f64], h: f64) -> f64 {
    let d = |s: f64| (f(&geodesic_coords(x, v, s)) - f(&geodesic_coords(x, v, -s))) / (2.0 * s);
    (4.0 * d(0.5 * h) - d(h)) / 3.0
}

/// Finite-difference Hessian: diagonal entries from second derivatives along
/// basis geodesics, off-diagonal entries by polarization along `(b_i + b_j)/√2`.
pub fn fd_hessian<F: Fn(&[f64]) -> f64>(f: F, x: &SpherePoint, basis: &[Vec<f64>], h: f64) -> BilinearForm {
    let xs = x.coords();
    let n = basis.len();
    let diag: Vec<f64> = basis
        .iter()
        .map(|b| second_derivative_along(&f, xs, b, h))
        .collect();
    let mut m = DMatrix::from_diagonal(&nalgebra::DVector::from_vec(diag.clone()));
    for i in 0..n {
        for j in (i + 1)..n {
            let v: Vec<f64> = basis[i]
                .iter()
                .zip(&basis[j])
                .map(|(a, b)| (a + b) * std::f64::consts::FRAC_1_SQRT_2)
                .collect();
            let hv = second_derivative_along(&f, xs, &v, h);
            let off = hv - 0.5 * (diag[i] + diag[j]);
            m[(i, j)] = off;
            m[(j, i)] = off;
        }
    }
    BilinearForm::new(m)
}
