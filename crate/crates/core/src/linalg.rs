//! Sparse symmetric kernels shared by the solvers: a compressed-row matrix,
//! Jacobi-preconditioned conjugate gradients and a deflated block inverse
//! iteration for the bottom of a positive semidefinite spectrum.

use nalgebra::{DMatrix, SymmetricEigen};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum LinalgError {
    #[error("conjugate gradients stalled after {iterations} iterations (relative residual {residual:e})")]
    NoConvergence { iterations: usize, residual: f64 },
    #[error("operator is not positive definite along the search direction")]
    Indefinite,
    #[error("eigen iteration did not converge after {0} sweeps")]
    EigenNoConvergence(usize),
    #[error("requested {requested} eigenpairs from a problem of dimension {dim}")]
    TooSmall { requested: usize, dim: usize },
}

pub fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

pub fn norm(a: &[f64]) -> f64 {
    dot(a, a).sqrt()
}

/// Symmetric linear map applied matrix-free.
pub trait LinearOperator {
    fn dim(&self) -> usize;
    fn apply(&self, x: &[f64], y: &mut [f64]);
    fn diagonal(&self) -> Vec<f64>;
}

/// Compressed sparse row matrix.
#[derive(Debug, Clone)]
pub struct CsrMatrix {
    n: usize,
    row_ptr: Vec<usize>,
    cols: Vec<usize>,
    vals: Vec<f64>,
}

impl CsrMatrix {
    /// Assembles from (row, col, value) triplets; duplicates are summed.
    pub fn from_triplets(n: usize, mut triplets: Vec<(usize, usize, f64)>) -> Self {
        triplets.sort_by(|a, b| (a.0, a.1).cmp(&(b.0, b.1)));
        let mut row_ptr = vec![0usize; n + 1];
        let mut cols = Vec::with_capacity(triplets.len());
        let mut vals: Vec<f64> = Vec::with_capacity(triplets.len());
        let mut last: Option<(usize, usize)> = None;
        for (r, c, v) in triplets {
            if last == Some((r, c)) {
                *vals.last_mut().expect("duplicate follows an entry") += v;
            } else {
                cols.push(c);
                vals.push(v);
                row_ptr[r + 1] += 1;
                last = Some((r, c));
            }
        }
        for i in 0..n {
            row_ptr[i + 1] += row_ptr[i];
        }
        Self {
            n,
            row_ptr,
            cols,
            vals,
        }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn row(&self, i: usize) -> impl Iterator<Item = (usize, f64)> + '_ {
        let span = self.row_ptr[i]..self.row_ptr[i + 1];
        self.cols[span.clone()]
            .iter()
            .copied()
            .zip(self.vals[span].iter().copied())
    }

    pub fn to_dense(&self) -> DMatrix<f64> {
        let mut m = DMatrix::zeros(self.n, self.n);
        for i in 0..self.n {
            for (j, v) in self.row(i) {
                m[(i, j)] += v;
            }
        }
        m
    }
}

impl LinearOperator for CsrMatrix {
    fn dim(&self) -> usize {
        self.n
    }

    fn apply(&self, x: &[f64], y: &mut [f64]) {
        for (i, yi) in y.iter_mut().enumerate() {
            *yi = self.row(i).map(|(j, v)| v * x[j]).sum();
        }
    }

    fn diagonal(&self) -> Vec<f64> {
        (0..self.n)
            .map(|i| self.row(i).filter(|&(j, _)| j == i).map(|(_, v)| v).sum())
            .collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CgOutcome {
    pub iterations: usize,
    pub relative_residual: f64,
}

/// Jacobi-preconditioned conjugate gradients for `A x = b`, starting from the
/// contents of `x`. Stops when `|b - A x| <= rel_tol |b|`.
pub fn pcg<A: LinearOperator + ?Sized>(
    a: &A,
    b: &[f64],
    x: &mut [f64],
    rel_tol: f64,
    max_iter: usize,
) -> Result<CgOutcome, LinalgError> {
    let n = a.dim();
    let bnorm = norm(b);
    if bnorm == 0.0 {
        x.iter_mut().for_each(|v| *v = 0.0);
        return Ok(CgOutcome {
            iterations: 0,
            relative_residual: 0.0,
        });
    }
    let inv_diag: Vec<f64> = a
        .diagonal()
        .into_iter()
        .map(|d| if d > 0.0 { 1.0 / d } else { 1.0 })
        .collect();
    let mut r = vec![0.0; n];
    a.apply(x, &mut r);
    for i in 0..n {
        r[i] = b[i] - r[i];
    }
    let mut z: Vec<f64> = r.iter().zip(&inv_diag).map(|(r, d)| r * d).collect();
    let mut p = z.clone();
    let mut ap = vec![0.0; n];
    let mut rz = dot(&r, &z);
    let mut res = norm(&r) / bnorm;
    let mut it = 0;
    while res > rel_tol {
        if it >= max_iter {
            return Err(LinalgError::NoConvergence {
                iterations: it,
                residual: res,
            });
        }
        a.apply(&p, &mut ap);
        let pap = dot(&p, &ap);
        if pap <= 0.0 {
            return Err(LinalgError::Indefinite);
        }
        let alpha = rz / pap;
        for i in 0..n {
            x[i] += alpha * p[i];
            r[i] -= alpha * ap[i];
        }
        // Recompute the true residual now and then to stop drift.
        if it % 200 == 199 {
            a.apply(x, &mut r);
            for i in 0..n {
                r[i] = b[i] - r[i];
            }
        }
        for i in 0..n {
            z[i] = r[i] * inv_diag[i];
        }
        let rz_new = dot(&r, &z);
        let beta = rz_new / rz;
        rz = rz_new;
        for i in 0..n {
            p[i] = z[i] + beta * p[i];
        }
        res = norm(&r) / bnorm;
        it += 1;
    }
    Ok(CgOutcome {
        iterations: it,
        relative_residual: res,
    })
}

/// Orthonormalizes `vectors` in place (modified Gram-Schmidt) against `fixed`
/// and each other; vectors that collapse are dropped.
pub fn orthonormalize(vectors: &mut Vec<Vec<f64>>, fixed: &[&[f64]]) {
    let mut out: Vec<Vec<f64>> = Vec::with_capacity(vectors.len());
    for mut v in vectors.drain(..) {
        let scale = norm(&v);
        for _ in 0..2 {
            for f in fixed.iter().copied().chain(out.iter().map(|q| q.as_slice())) {
                let c = dot(&v, f);
                v.iter_mut().zip(f).for_each(|(a, b)| *a -= c * b);
            }
        }
        let nv = norm(&v);
        if nv > 1e-10 * scale.max(f64::MIN_POSITIVE) {
            v.iter_mut().for_each(|a| *a /= nv);
            out.push(v);
        }
    }
    *vectors = out;
}

/// `S + shift * z z^T` for a unit vector `z`; positive definite when `z`
/// spans the kernel of a positive semidefinite `S`.
struct Deflated<'a, A: ?Sized> {
    op: &'a A,
    z: &'a [f64],
    shift: f64,
}

impl<A: LinearOperator + ?Sized> LinearOperator for Deflated<'_, A> {
    fn dim(&self) -> usize {
        self.op.dim()
    }
    fn apply(&self, x: &[f64], y: &mut [f64]) {
        self.op.apply(x, y);
        let c = self.shift * dot(self.z, x);
        y.iter_mut().zip(self.z).for_each(|(a, b)| *a += c * b);
    }
    fn diagonal(&self) -> Vec<f64> {
        self.op
            .diagonal()
            .into_iter()
            .zip(self.z)
            .map(|(d, z)| d + self.shift * z * z)
            .collect()
    }
}

#[derive(Debug, Clone)]
pub struct Eigenpair {
    pub value: f64,
    pub vector: Vec<f64>,
}

/// Smallest eigenpair of a symmetric positive semidefinite operator restricted
/// to the orthogonal complement of the unit kernel vector `kernel`.
///
/// Block inverse iteration with Rayleigh-Ritz; the block absorbs clustered
/// eigenvalues so convergence is governed by the gap to the `block + 1`-th.
pub fn lowest_nonzero_eigenpair<A: LinearOperator + ?Sized>(
    op: &A,
    kernel: &[f64],
    block: usize,
    tol: f64,
) -> Result<Eigenpair, LinalgError> {
    let n = op.dim();
    if n < 2 {
        return Err(LinalgError::TooSmall { requested: 1, dim: n });
    }
    if n <= 400 {
        return dense_lowest_nonzero(op, kernel);
    }
    let block = block.clamp(1, n - 1);
    let diag = op.diagonal();
    let shift = diag.iter().sum::<f64>() / n as f64;
    let deflated = Deflated { op, z: kernel, shift };

    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed_1a9c);
    let mut basis: Vec<Vec<f64>> = (0..block)
        .map(|_| (0..n).map(|_| rng.random::<f64>() - 0.5).collect())
        .collect();
    orthonormalize(&mut basis, &[kernel]);

    let norm_bound = 2.0 * diag.iter().fold(0.0f64, |m, d| m.max(d.abs()));
    let roundoff_floor = 64.0 * f64::EPSILON * norm_bound * (n as f64).sqrt();
    let mut sx = vec![0.0; n];
    let max_sweeps = 2000;
    for _ in 0..max_sweeps {
        let mut next = Vec::with_capacity(basis.len());
        for x in &basis {
            let mut y = x.clone();
            // Inexact inner solves are fine: the Rayleigh-Ritz step below
            // judges convergence on the true eigen-residual.
            match pcg(&deflated, x, &mut y, 1e-12, 20_000) {
                Ok(_) | Err(LinalgError::NoConvergence { .. }) => {}
                Err(e) => return Err(e),
            }
            next.push(y);
        }
        orthonormalize(&mut next, &[kernel]);
        let k = next.len();
        let images: Vec<Vec<f64>> = next
            .iter()
            .map(|q| {
                let mut s = vec![0.0; n];
                op.apply(q, &mut s);
                s
            })
            .collect();
        let t = DMatrix::from_fn(k, k, |i, j| 0.5 * (dot(&next[i], &images[j]) + dot(&next[j], &images[i])));
        let eig = SymmetricEigen::new(t);
        let mut order: Vec<usize> = (0..k).collect();
        order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
        basis = order
            .iter()
            .map(|&c| {
                let mut v = vec![0.0; n];
                for (i, q) in next.iter().enumerate() {
                    let w = eig.eigenvectors[(i, c)];
                    v.iter_mut().zip(q).for_each(|(a, b)| *a += w * b);
                }
                v
            })
            .collect();
        let lead = &basis[0];
        op.apply(lead, &mut sx);
        let value = dot(lead, &sx);
        let resid: f64 = sx
            .iter()
            .zip(lead)
            .map(|(s, x)| (s - value * x).powi(2))
            .sum::<f64>()
            .sqrt();
        if resid <= tol * value.abs() || resid <= roundoff_floor {
            return Ok(Eigenpair {
                value,
                vector: lead.clone(),
            });
        }
    }
    Err(LinalgError::EigenNoConvergence(max_sweeps))
}

/// Dense route for small problems; also serves as the oracle for the
/// iterative solver in tests.
pub fn dense_lowest_nonzero<A: LinearOperator + ?Sized>(
    op: &A,
    kernel: &[f64],
) -> Result<Eigenpair, LinalgError> {
    let n = op.dim();
    if n < 2 {
        return Err(LinalgError::TooSmall { requested: 1, dim: n });
    }
    let mut dense = DMatrix::zeros(n, n);
    let mut e = vec![0.0; n];
    let mut col = vec![0.0; n];
    for j in 0..n {
        e[j] = 1.0;
        op.apply(&e, &mut col);
        e[j] = 0.0;
        for i in 0..n {
            dense[(i, j)] = col[i];
        }
    }
    let sym = (&dense + dense.transpose()) * 0.5;
    // Lift the kernel out of the way so the first eigenvalue is the one we want.
    let lift = sym.diagonal().iter().map(|d| d.abs()).fold(1.0, f64::max) * 4.0;
    let z = nalgebra::DVector::from_column_slice(kernel);
    let lifted = &sym + (&z * z.transpose()) * lift;
    let eig = SymmetricEigen::new(lifted);
    let (idx, _) = eig
        .eigenvalues
        .iter()
        .enumerate()
        .min_by(|a, b| a.1.total_cmp(b.1))
        .expect("nonempty spectrum");
    let mut vector: Vec<f64> = eig.eigenvectors.column(idx).iter().copied().collect();
    let mut vs = vec![vector];
    orthonormalize(&mut vs, &[kernel]);
    vector = vs.pop().expect("eigenvector orthogonal to the kernel");
    op.apply(&vector, &mut col);
    Ok(Eigenpair {
        value: dot(&vector, &col),
        vector,
    })
}

/// Least-squares slope and intercept of `y` against `x`.
pub fn linear_fit(x: &[f64], y: &[f64]) -> (f64, f64) {
    let n = x.len() as f64;
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let sxy: f64 = x.iter().zip(y).map(|(a, b)| (a - mx) * (b - my)).sum();
    let sxx: f64 = x.iter().map(|a| (a - mx).powi(2)).sum();
    let slope = sxy / sxx;
    (slope, my - slope * mx)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn path_laplacian(n: usize) -> CsrMatrix {
        let mut t = Vec::new();
        for i in 0..n - 1 {
            t.push((i, i, 1.0));
            t.push((i + 1, i + 1, 1.0));
            t.push((i, i + 1, -1.0));
            t.push((i + 1, i, -1.0));
        }
        CsrMatrix::from_triplets(n, t)
    }

    #[test]
    fn triplets_sum_duplicates() {
        let m = CsrMatrix::from_triplets(2, vec![(0, 0, 1.0), (0, 0, 2.0), (1, 0, 4.0)]);
        assert_eq!(m.to_dense()[(0, 0)], 3.0);
        assert_eq!(m.to_dense()[(1, 0)], 4.0);
        assert_eq!(m.diagonal(), vec![3.0, 0.0]);
    }

    #[test]
    fn pcg_solves_spd_tridiagonal() {
        let n = 50;
        let mut t = Vec::new();
        for i in 0..n {
            t.push((i, i, 2.5));
            if i + 1 < n {
                t.push((i, i + 1, -1.0));
                t.push((i + 1, i, -1.0));
            }
        }
        let a = CsrMatrix::from_triplets(n, t);
        let truth: Vec<f64> = (0..n).map(|i| (i as f64 * 0.3).sin()).collect();
        let mut b = vec![0.0; n];
        a.apply(&truth, &mut b);
        let mut x = vec![0.0; n];
        let out = pcg(&a, &b, &mut x, 1e-12, 1000).unwrap();
        assert!(out.relative_residual <= 1e-12);
        for (u, v) in x.iter().zip(&truth) {
            assert!((u - v).abs() < 1e-9);
        }
    }

    #[test]
    fn iterative_and_dense_eigen_agree_on_path() {
        let n = 600;
        let a = path_laplacian(n);
        let z = vec![1.0 / (n as f64).sqrt(); n];
        let dense = dense_lowest_nonzero(&a, &z).unwrap();
        let iter = lowest_nonzero_eigenpair(&a, &z, 4, 1e-9).unwrap();
        let exact = 2.0 * (1.0 - (std::f64::consts::PI / n as f64).cos());
        assert!((dense.value - exact).abs() < 1e-12);
        assert!((iter.value - exact).abs() < 1e-12 * exact.max(1.0) + 1e-14);
    }

    #[test]
    fn linear_fit_recovers_line() {
        let x = [0.0, 1.0, 2.0, 3.0];
        let y: Vec<f64> = x.iter().map(|v| 2.0 * v - 1.0).collect();
        let (s, c) = linear_fit(&x, &y);
        assert!((s - 2.0).abs() < 1e-14 && (c + 1.0).abs() < 1e-14);
    }
}
