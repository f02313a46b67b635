use super::GeometryError;

const UNIT_TOL: f64 = 1e-12;
const GEODESIC_TOL: f64 = 1e-10;

/// A point of the unit sphere `S^n` in `R^{n+1}`, `n >= 2`.
#[derive(Debug, Clone, PartialEq)]
pub struct SpherePoint {
    coords: Vec<f64>,
}

impl SpherePoint {
    /// Wraps coordinates that are already unit length (to `1e-12`).
    pub fn new(coords: Vec<f64>) -> Result<Self, GeometryError> {
        check_dim(coords.len())?;
        let norm = crate::linalg::norm(&coords);
        if (norm - 1.0).abs() > UNIT_TOL {
            return Err(GeometryError::NotUnit(norm));
        }
        Ok(Self { coords })
    }

    /// Normalizes an arbitrary nonzero vector onto the sphere.
    pub fn from_vector(mut v: Vec<f64>) -> Result<Self, GeometryError> {
        check_dim(v.len())?;
        let norm = crate::linalg::norm(&v);
        if !(norm > 1e-300) || !norm.is_finite() {
            return Err(GeometryError::NotUnit(norm));
        }
        v.iter_mut().for_each(|c| *c /= norm);
        Ok(Self { coords: v })
    }

    /// The coordinate vector `ε_i` (zero-based index) of `S^n`.
    pub fn basis(i: usize, n: usize) -> Result<Self, GeometryError> {
        let mut v = vec![0.0; n + 1];
        if i > n {
            return Err(GeometryError::DimensionMismatch {
                expected: n + 1,
                found: i + 1,
            });
        }
        v[i] = 1.0;
        Self::new(v)
    }

    pub(crate) fn from_unit_unchecked(coords: Vec<f64>) -> Self {
        Self { coords }
    }

    pub fn coords(&self) -> &[f64] {
        &self.coords
    }

    pub fn into_coords(self) -> Vec<f64> {
        self.coords
    }

    /// Intrinsic dimension `n` of the ambient sphere.
    pub fn dim(&self) -> usize {
        self.coords.len() - 1
    }

    pub fn dot(&self, a: &[f64]) -> f64 {
        crate::linalg::dot(&self.coords, a)
    }

    pub fn antipode(&self) -> Self {
        Self {
            coords: self.coords.iter().map(|c| -c).collect(),
        }
    }

    /// Great-circle distance.
    pub fn distance(&self, other: &SpherePoint) -> f64 {
        self.dot(&other.coords).clamp(-1.0, 1.0).acos()
    }
}

fn check_dim(len: usize) -> Result<(), GeometryError> {
    if len < 3 {
        Err(GeometryError::DimensionTooSmall(len.saturating_sub(1)))
    } else {
        Ok(())
    }
}

/// A tangent vector `dir` at `base`.
#[derive(Debug, Clone, PartialEq)]
pub struct TangentVector {
    base: SpherePoint,
    dir: Vec<f64>,
}

impl TangentVector {
    pub fn new(base: SpherePoint, dir: Vec<f64>) -> Result<Self, GeometryError> {
        if dir.len() != base.coords.len() {
            return Err(GeometryError::DimensionMismatch {
                expected: base.coords.len(),
                found: dir.len(),
            });
        }
        let scale = crate::linalg::norm(&dir).max(1.0);
        let normal = base.dot(&dir);
        if normal.abs() > UNIT_TOL * scale {
            return Err(GeometryError::NotTangent(normal));
        }
        Ok(Self { base, dir })
    }

    /// Orthogonal projection of an ambient vector onto `T_base S^n`.
    pub fn project(base: SpherePoint, v: &[f64]) -> Result<Self, GeometryError> {
        if v.len() != base.coords.len() {
            return Err(GeometryError::DimensionMismatch {
                expected: base.coords.len(),
                found: v.len(),
            });
        }
        let c = base.dot(v);
        let dir = v.iter().zip(&base.coords).map(|(a, x)| a - c * x).collect();
        Ok(Self { base, dir })
    }

    pub fn base(&self) -> &SpherePoint {
        &self.base
    }

    pub fn dir(&self) -> &[f64] {
        &self.dir
    }

    pub fn norm(&self) -> f64 {
        crate::linalg::norm(&self.dir)
    }

    pub fn normalized(&self) -> Result<Self, GeometryError> {
        let n = self.norm();
        if n < 1e-300 {
            return Err(GeometryError::NotTangent(0.0));
        }
        Ok(Self {
            base: self.base.clone(),
            dir: self.dir.iter().map(|d| d / n).collect(),
        })
    }
}

/// Projection `R^{n+1} -> R^2` onto the first two coordinates.
pub fn project(x: &SpherePoint) -> (f64, f64) {
    (x.coords[0], x.coords[1])
}

/// Unit-speed geodesic `cos t x + sin t v` through `v.base()`.
pub fn geodesic(v: &TangentVector, t: f64) -> Result<SpherePoint, GeometryError> {
    let speed = v.norm();
    if (speed - 1.0).abs() > GEODESIC_TOL {
        return Err(GeometryError::NotTangent(speed - 1.0));
    }
    let normal = v.base.dot(&v.dir);
    if normal.abs() > GEODESIC_TOL {
        return Err(GeometryError::NotTangent(normal));
    }
    Ok(SpherePoint::from_unit_unchecked(geodesic_coords(
        v.base.coords(),
        &v.dir,
        t,
    )))
}

/// Unchecked geodesic evaluation on raw coordinates.
pub(crate) fn geodesic_coords(x: &[f64], v: &[f64], t: f64) -> Vec<f64> {
    let (s, c) = t.sin_cos();
    x.iter().zip(v).map(|(a, b)| c * a + s * b).collect()
}

/// Orthonormal basis of `T_x S^n`: Gram-Schmidt on the coordinate vectors
/// `e_1, ..., e_{n+1}` after removing the normal direction, in index order.
pub fn tangent_basis(x: &SpherePoint) -> Vec<Vec<f64>> {
    let dim = x.coords.len();
    let n = dim - 1;
    let mut out: Vec<Vec<f64>> = Vec::with_capacity(n);
    for i in 0..dim {
        if out.len() == n {
            break;
        }
        let mut v = vec![0.0; dim];
        v[i] = 1.0;
        for _ in 0..2 {
            for q in std::iter::once(x.coords.as_slice()).chain(out.iter().map(|q| q.as_slice())) {
                let c = crate::linalg::dot(&v, q);
                v.iter_mut().zip(q).for_each(|(a, b)| *a -= c * b);
            }
        }
        let nv = crate::linalg::norm(&v);
        if nv > 1e-3 {
            v.iter_mut().for_each(|a| *a /= nv);
            out.push(v);
        }
    }
    debug_assert_eq!(out.len(), n);
    out
}
