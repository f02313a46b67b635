//! Sampled surfaces in ℝ³ and their finite-difference geometry.

use nalgebra::{Matrix2, Vector2, Vector3};

use super::{MinimalError, MinimalGraph, NodeKind};

/// Samples `X(u0 + i du, v0 + j dv)` on an `nu × nv` parameter lattice; `None`
/// marks samples outside the parameter domain. With `periodic_v` the lattice
/// wraps in `v`.
#[derive(Debug, Clone, PartialEq)]
pub struct ImmersedPatch {
    pub nu: usize,
    pub nv: usize,
    pub du: f64,
    pub dv: f64,
    pub origin: (f64, f64),
    pub periodic_v: bool,
    points: Vec<Option<Vector3<f64>>>,
}

impl ImmersedPatch {
    #[allow(clippy::too_many_arguments)]
    pub fn from_fn(
        nu: usize,
        nv: usize,
        origin: (f64, f64),
        du: f64,
        dv: f64,
        periodic_v: bool,
        x: impl Fn(f64, f64) -> Option<[f64; 3]>,
    ) -> Result<Self, MinimalError> {
        if nu < 5 || nv < 5 || !(du > 0.0) || !(dv > 0.0) {
            return Err(MinimalError::InvalidGrid(format!(
                "parameter lattice {nu}x{nv} with steps {du}, {dv}"
            )));
        }
        let mut points = Vec::with_capacity(nu * nv);
        for j in 0..nv {
            for i in 0..nu {
                let p = x(origin.0 + i as f64 * du, origin.1 + j as f64 * dv);
                points.push(p.map(Vector3::from));
            }
        }
        Ok(Self {
            nu,
            nv,
            du,
            dv,
            origin,
            periodic_v,
            points,
        })
    }

    /// `(x, y, f(x, y))` over the domain nodes of the graph; sample indices
    /// coincide with node indices.
    pub fn from_graph(mg: &MinimalGraph) -> Self {
        let points = (0..mg.heights().len())
            .map(|v| {
                (mg.kind(v) != NodeKind::Outside).then(|| {
                    let (x, y) = mg.position(v);
                    Vector3::new(x, y, mg.height(v))
                })
            })
            .collect();
        Self {
            nu: mg.nx(),
            nv: mg.ny(),
            du: mg.spacing(),
            dv: mg.spacing(),
            origin: mg.origin(),
            periodic_v: false,
            points,
        }
    }

    /// `(cosh t cos θ, cosh t sin θ, t)` for `t ∈ [-1.5, 1.5]`, `θ` periodic,
    /// with steps as close to `h` as the ranges allow.
    pub fn catenoid(h: f64) -> Result<Self, MinimalError> {
        let nu = (3.0 / h).round() as usize + 1;
        let du = 3.0 / (nu - 1) as f64;
        let nv = (2.0 * std::f64::consts::PI / h).round() as usize;
        let dv = 2.0 * std::f64::consts::PI / nv as f64;
        Self::from_fn(nu, nv, (-1.5, 0.0), du, dv, true, |t, th| {
            Some([t.cosh() * th.cos(), t.cosh() * th.sin(), t])
        })
    }

    /// Latitude-longitude patch `|φ|, |λ| ≤ 0.6` of the unit sphere.
    pub fn unit_sphere(h: f64) -> Result<Self, MinimalError> {
        let n = (1.2 / h).round() as usize + 1;
        let d = 1.2 / (n - 1) as f64;
        Self::from_fn(n, n, (-0.6, -0.6), d, d, false, |lon, lat| {
            Some([lat.cos() * lon.cos(), lat.cos() * lon.sin(), lat.sin()])
        })
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn index(&self, i: usize, j: usize) -> usize {
        j * self.nu + i
    }

    pub fn coords(&self, s: usize) -> (usize, usize) {
        (s % self.nu, s / self.nu)
    }

    pub fn point(&self, s: usize) -> Option<Vector3<f64>> {
        self.points[s]
    }

    /// Sample offset by `(di, dj)` lattice steps, if it exists and is valid.
    pub fn neighbor(&self, s: usize, di: isize, dj: isize) -> Option<usize> {
        let (i, j) = self.coords(s);
        let i = i as isize + di;
        let mut j = j as isize + dj;
        if i < 0 || i >= self.nu as isize {
            return None;
        }
        if self.periodic_v {
            j = j.rem_euclid(self.nv as isize);
        } else if j < 0 || j >= self.nv as isize {
            return None;
        }
        let t = self.index(i as usize, j as usize);
        self.points[t].map(|_| t)
    }

    /// The patch with every position multiplied by `s` and the parameter
    /// steps kept; geometric quantities scale as for the dilated surface.
    pub fn scaled(&self, s: f64) -> Self {
        Self {
            points: self.points.iter().map(|p| p.map(|x| s * x)).collect(),
            ..self.clone()
        }
    }

    pub fn geometry(&self) -> PatchGeometry<'_> {
        PatchGeometry::new(self)
    }
}

/// First- and second-order data at one sample.
#[derive(Debug, Clone, PartialEq)]
pub struct SampleGeometry {
    pub position: Vector3<f64>,
    pub xu: Vector3<f64>,
    pub xv: Vector3<f64>,
    /// `X_u × X_v`, normalized.
    pub normal: Vector3<f64>,
    pub metric: Matrix2<f64>,
    pub inverse_metric: Matrix2<f64>,
    /// `b_ij = X_ij · N` in parameter coordinates.
    pub second: Matrix2<f64>,
    /// Orthonormal tangent frame `e₁ ∥ X_u`.
    pub frame: [Vector3<f64>; 2],
    /// Second fundamental form in `frame`.
    pub b_onb: Matrix2<f64>,
    pub norm_b_sq: f64,
    /// Trace of the shape operator.
    pub mean_curvature: f64,
    pub area_element: f64,
}

impl SampleGeometry {
    /// Parameter-coordinate components of a tangent vector.
    pub fn components(&self, x: &Vector3<f64>) -> Vector2<f64> {
        self.inverse_metric * Vector2::new(self.xu.dot(x), self.xv.dot(x))
    }

    /// `B(x, y)` for tangent vectors given in ambient coordinates.
    pub fn b(&self, x: &Vector3<f64>, y: &Vector3<f64>) -> f64 {
        self.components(x).dot(&(self.second * self.components(y)))
    }
}

/// Finite-difference geometry. Level-1 samples have a valid 3×3
/// neighborhood and carry [`SampleGeometry`]; level-2 samples have a level-1
/// 3×3 neighborhood, so second-order operators on geometric fields apply.
pub struct PatchGeometry<'a> {
    pub patch: &'a ImmersedPatch,
    samples: Vec<Option<SampleGeometry>>,
    level2: Vec<bool>,
}

const RING: [(isize, isize); 8] = [(-1, -1), (0, -1), (1, -1), (-1, 0), (1, 0), (-1, 1), (0, 1), (1, 1)];

impl<'a> PatchGeometry<'a> {
    fn new(patch: &'a ImmersedPatch) -> Self {
        let n = patch.len();
        let samples: Vec<Option<SampleGeometry>> = (0..n).map(|s| sample_geometry(patch, s)).collect();
        let level2 = (0..n)
            .map(|s| {
                samples[s].is_some()
                    && RING
                        .iter()
                        .all(|&(di, dj)| patch.neighbor(s, di, dj).is_some_and(|t| samples[t].is_some()))
            })
            .collect();
        Self {
            patch,
            samples,
            level2,
        }
    }

    pub fn sample(&self, s: usize) -> Option<&SampleGeometry> {
        self.samples[s].as_ref()
    }

    pub fn is_level2(&self, s: usize) -> bool {
        self.level2[s]
    }

    pub fn level1_samples(&self) -> Vec<usize> {
        (0..self.samples.len()).filter(|&s| self.samples[s].is_some()).collect()
    }

    pub fn level2_samples(&self) -> Vec<usize> {
        (0..self.level2.len()).filter(|&s| self.level2[s]).collect()
    }

    /// Evaluates `f` at every level-1 sample; NaN elsewhere.
    pub fn field(&self, f: impl Fn(&SampleGeometry) -> f64) -> Vec<f64> {
        self.samples.iter().map(|g| g.as_ref().map_or(f64::NAN, &f)).collect()
    }

    fn nb(&self, s: usize, di: isize, dj: isize) -> usize {
        self.patch.neighbor(s, di, dj).expect("level-2 sample has a full ring")
    }

    /// Central-difference parameter derivatives `(φ_u, φ_v)` at `s`.
    pub fn partials(&self, phi: &[f64], s: usize) -> Vector2<f64> {
        let (du, dv) = (self.patch.du, self.patch.dv);
        Vector2::new(
            (phi[self.nb(s, 1, 0)] - phi[self.nb(s, -1, 0)]) / (2.0 * du),
            (phi[self.nb(s, 0, 1)] - phi[self.nb(s, 0, -1)]) / (2.0 * dv),
        )
    }

    /// `|∇φ|² = g^{ij} φ_i φ_j` at a level-2 sample.
    pub fn gradient_sq(&self, phi: &[f64], s: usize) -> f64 {
        let d = self.partials(phi, s);
        let g = self.samples[s].as_ref().expect("level-2 sample");
        d.dot(&(g.inverse_metric * d))
    }

    /// Divergence-form Laplace-Beltrami `(√g)⁻¹ ∂_i(√g g^{ij} ∂_j φ)` at a
    /// level-2 sample, with the coefficients averaged to edge midpoints.
    pub fn laplacian(&self, phi: &[f64], s: usize) -> f64 {
        self.laplacian_by(|t| phi[t], s)
    }

    pub fn laplacian_by(&self, phi: impl Fn(usize) -> f64, s: usize) -> f64 {
        let (du, dv) = (self.patch.du, self.patch.dv);
        let geo = |t: usize| self.samples[t].as_ref().expect("level-1 neighbor");
        let coef = |t: usize| {
            let g = geo(t);
            g.area_element * g.inverse_metric
        };
        let (e, w, n, so) = (self.nb(s, 1, 0), self.nb(s, -1, 0), self.nb(s, 0, 1), self.nb(s, 0, -1));
        let cp = coef(s);
        let (ce, cw, cn, cs) = (coef(e), coef(w), coef(n), coef(so));
        let a_e = 0.5 * (cp[(0, 0)] + ce[(0, 0)]);
        let a_w = 0.5 * (cp[(0, 0)] + cw[(0, 0)]);
        let c_n = 0.5 * (cp[(1, 1)] + cn[(1, 1)]);
        let c_s = 0.5 * (cp[(1, 1)] + cs[(1, 1)]);
        let p = phi(s);
        let mut out = (a_e * (phi(e) - p) - a_w * (p - phi(w))) / (du * du)
            + (c_n * (phi(n) - p) - c_s * (p - phi(so))) / (dv * dv);
        if [cp, ce, cw, cn, cs].iter().any(|c| c[(0, 1)] != 0.0) {
            let phi_v = |t: usize| (phi(self.nb(t, 0, 1)) - phi(self.nb(t, 0, -1))) / (2.0 * dv);
            let phi_u = |t: usize| (phi(self.nb(t, 1, 0)) - phi(self.nb(t, -1, 0))) / (2.0 * du);
            out += (ce[(0, 1)] * phi_v(e) - cw[(0, 1)] * phi_v(w)) / (2.0 * du)
                + (cn[(0, 1)] * phi_u(n) - cs[(0, 1)] * phi_u(so)) / (2.0 * dv);
        }
        out / geo(s).area_element
    }

    /// Laplacian of each component of a vector field.
    pub fn laplacian_vec(&self, field: &[Vector3<f64>], s: usize) -> Vector3<f64> {
        Vector3::from_fn(|k, _| self.laplacian_by(|t| field[t][k], s))
    }

    /// Unit normals at level-1 samples, zero elsewhere.
    pub fn normals(&self) -> Vec<Vector3<f64>> {
        self.samples
            .iter()
            .map(|g| g.as_ref().map_or(Vector3::zeros(), |g| g.normal))
            .collect()
    }

    /// `|∇B|²` from central differences of `B` in frames carried between
    /// neighbors by orthogonal projection onto the neighbor's tangent plane.
    pub fn covariant_b_sq(&self, s: usize) -> f64 {
        let g = self.samples[s].as_ref().expect("level-2 sample");
        let steps = [(self.patch.du, (1, 0)), (self.patch.dv, (0, 1))];
        let mut d = [Matrix2::zeros(); 2];
        for (k, &(step, (di, dj))) in steps.iter().enumerate() {
            let plus = self.transported_b(g, self.nb(s, di, dj));
            let minus = self.transported_b(g, self.nb(s, -di, -dj));
            d[k] = (plus - minus) / (2.0 * step);
        }
        // ∂_k = Σ_c (X_k · e_c) e_c
        let j = Matrix2::new(
            g.xu.dot(&g.frame[0]),
            g.xu.dot(&g.frame[1]),
            g.xv.dot(&g.frame[0]),
            g.xv.dot(&g.frame[1]),
        );
        let jinv = j.try_inverse().expect("nondegenerate metric");
        (0..2)
            .map(|c| {
                let nab = d[0] * jinv[(c, 0)] + d[1] * jinv[(c, 1)];
                nab.norm_squared()
            })
            .sum()
    }

    fn transported_b(&self, at: &SampleGeometry, t: usize) -> Matrix2<f64> {
        let q = self.samples[t].as_ref().expect("level-1 neighbor");
        let proj = |e: &Vector3<f64>| e - q.normal * q.normal.dot(e);
        let f0 = proj(&at.frame[0]).normalize();
        let f1 = {
            let v = proj(&at.frame[1]);
            (v - f0 * f0.dot(&v)).normalize()
        };
        Matrix2::new(q.b(&f0, &f0), q.b(&f0, &f1), q.b(&f1, &f0), q.b(&f1, &f1))
    }
}

fn sample_geometry(patch: &ImmersedPatch, s: usize) -> Option<SampleGeometry> {
    let x = |di: isize, dj: isize| patch.neighbor(s, di, dj).and_then(|t| patch.points[t]);
    let p = patch.points[s]?;
    let (e, w, n, so) = (x(1, 0)?, x(-1, 0)?, x(0, 1)?, x(0, -1)?);
    let (ne, nw, se, sw) = (x(1, 1)?, x(-1, 1)?, x(1, -1)?, x(-1, -1)?);
    let (du, dv) = (patch.du, patch.dv);
    let xu = (e - w) / (2.0 * du);
    let xv = (n - so) / (2.0 * dv);
    let xuu = (e - 2.0 * p + w) / (du * du);
    let xvv = (n - 2.0 * p + so) / (dv * dv);
    let xuv = (ne - nw - se + sw) / (4.0 * du * dv);
    let cross = xu.cross(&xv);
    let area_element = cross.norm();
    if !(area_element > 0.0) {
        return None;
    }
    let normal = cross / area_element;
    let metric = Matrix2::new(xu.dot(&xu), xu.dot(&xv), xv.dot(&xu), xv.dot(&xv));
    let inverse_metric = metric.try_inverse()?;
    let b12 = xuv.dot(&normal);
    let second = Matrix2::new(xuu.dot(&normal), b12, b12, xvv.dot(&normal));
    let e0 = xu.normalize();
    let e1 = (xv - e0 * e0.dot(&xv)).normalize();
    let mut geo = SampleGeometry {
        position: p,
        xu,
        xv,
        normal,
        metric,
        inverse_metric,
        second,
        frame: [e0, e1],
        b_onb: Matrix2::zeros(),
        norm_b_sq: 0.0,
        mean_curvature: (inverse_metric * second).trace(),
        area_element,
    };
    let b01 = geo.b(&e0, &e1);
    geo.b_onb = Matrix2::new(geo.b(&e0, &e0), b01, b01, geo.b(&e1, &e1));
    geo.norm_b_sq = geo.b_onb.norm_squared();
    Some(geo)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn plane_has_no_curvature() {
        let mg = MinimalGraph::square(-1.0, 1.0, 10, |x, y| 0.3 * x - 0.2 * y + 1.0).unwrap();
        let patch = ImmersedPatch::from_graph(&mg);
        let geo = patch.geometry();
        for s in geo.level1_samples() {
            let g = geo.sample(s).unwrap();
            assert!(g.norm_b_sq < 1e-20);
            assert!(g.normal[2] > 0.0);
            assert!((g.area_element - (1.0f64 + 0.09 + 0.04).sqrt()).abs() < 1e-12);
        }
        assert_eq!(geo.level2_samples().len(), 7 * 7);
    }

    #[test]
    fn sphere_is_umbilic() {
        let patch = ImmersedPatch::unit_sphere(0.02).unwrap();
        let geo = patch.geometry();
        for s in geo.level1_samples() {
            let g = geo.sample(s).unwrap();
            assert!((g.norm_b_sq - 2.0).abs() < 1e-3, "{}", g.norm_b_sq);
            assert!((g.b_onb[(0, 1)]).abs() < 1e-3);
        }
    }

    #[test]
    fn catenoid_curvature_profile() {
        let patch = ImmersedPatch::catenoid(0.01).unwrap();
        let geo = patch.geometry();
        for s in geo.level1_samples().into_iter().step_by(97) {
            let g = geo.sample(s).unwrap();
            let t = g.position[2];
            assert!((g.norm_b_sq - 2.0 / t.cosh().powi(4)).abs() < 1e-3);
            assert!(g.mean_curvature.abs() < 1e-3);
        }
    }

    #[test]
    fn laplacian_of_coordinates_on_plane() {
        let mg = MinimalGraph::square(-1.0, 1.0, 12, |x, y| 0.5 * x + 0.25 * y).unwrap();
        let patch = ImmersedPatch::from_graph(&mg);
        let geo = patch.geometry();
        let phi: Vec<f64> = (0..patch.len())
            .map(|s| {
                let p = patch.point(s).unwrap();
                p[0] * p[0] + p[1] * p[1] + p[2] * p[2]
            })
            .collect();
        // |X|² has Laplacian 2m = 4 on any plane.
        for s in geo.level2_samples() {
            assert!((geo.laplacian(&phi, s) - 4.0).abs() < 1e-9);
        }
    }
}
