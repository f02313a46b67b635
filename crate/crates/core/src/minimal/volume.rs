//! Extrinsic-ball volumes of the piecewise-linear surface through the
//! samples, the volume density, and the Neumann constant `Λ(R₀)` on the
//! induced-metric graph.

use std::collections::BTreeMap;
use std::f64::consts::PI;

use nalgebra::{Matrix2, Vector2, Vector3};

use super::{ImmersedPatch, MinimalError};
use crate::elliptic::{neumann_poincare_constant, EdgeSpec, EllipticError, WeightedGraph};

/// Lattice cells with four valid corners, split along the SW-NE diagonal.
pub fn triangulate(patch: &ImmersedPatch) -> Vec<[usize; 3]> {
    let mut out = Vec::new();
    let jmax = if patch.periodic_v { patch.nv } else { patch.nv - 1 };
    for j in 0..jmax {
        for i in 0..patch.nu - 1 {
            let sw = patch.index(i, j);
            if patch.point(sw).is_none() {
                continue;
            }
            let (Some(se), Some(nw), Some(ne)) = (
                patch.neighbor(sw, 1, 0),
                patch.neighbor(sw, 0, 1),
                patch.neighbor(sw, 1, 1),
            ) else {
                continue;
            };
            out.push([sw, se, ne]);
            out.push([sw, ne, nw]);
        }
    }
    out
}

fn cross2(a: Vector2<f64>, b: Vector2<f64>) -> f64 {
    a.x * b.y - a.y * b.x
}

/// Signed area of the disk `|p| < r` intersected with the triangle `(0, a, b)`.
fn origin_wedge_area(a: Vector2<f64>, b: Vector2<f64>, r: f64) -> f64 {
    let sector = |u: Vector2<f64>, v: Vector2<f64>| 0.5 * r * r * cross2(u, v).atan2(u.dot(&v));
    let (ra, rb) = (a.norm(), b.norm());
    if ra <= r && rb <= r {
        return 0.5 * cross2(a, b);
    }
    let d = b - a;
    let dd = d.norm_squared();
    if dd == 0.0 {
        return 0.0;
    }
    let ad = a.dot(&d);
    let disc = ad * ad - dd * (a.norm_squared() - r * r);
    if disc <= 0.0 {
        return sector(a, b);
    }
    let s = disc.sqrt();
    let (t1, t2) = ((-ad - s) / dd, (-ad + s) / dd);
    if t2 <= 0.0 || t1 >= 1.0 {
        return sector(a, b);
    }
    let p1 = a + d * t1.max(0.0);
    let p2 = a + d * t2.min(1.0);
    let mut area = 0.5 * cross2(p1, p2);
    if t1 > 0.0 {
        area += sector(a, p1);
    }
    if t2 < 1.0 {
        area += sector(p2, b);
    }
    area
}

/// Area of a triangle in ℝ³ inside the open ball `B(c, R)`.
pub fn triangle_ball_area(p: [Vector3<f64>; 3], c: &Vector3<f64>, r: f64) -> f64 {
    let dist = p.map(|q| (q - c).norm());
    let e1 = p[1] - p[0];
    let e2 = p[2] - p[0];
    let cross = e1.cross(&e2);
    let full = 0.5 * cross.norm();
    if full == 0.0 {
        return 0.0;
    }
    if dist.iter().all(|&d| d <= r) {
        return full;
    }
    let longest = e1.norm().max(e2.norm()).max((p[2] - p[1]).norm());
    if dist.iter().all(|&d| d >= r + longest) {
        return 0.0;
    }
    let n = cross / (2.0 * full);
    let offset = (c - p[0]).dot(&n);
    if offset.abs() >= r {
        return 0.0;
    }
    let rho = (r * r - offset * offset).sqrt();
    let centre = c - n * offset;
    let u = e1.normalize();
    let w = n.cross(&u);
    let q = p.map(|x| Vector2::new((x - centre).dot(&u), (x - centre).dot(&w)));
    (origin_wedge_area(q[0], q[1], rho) + origin_wedge_area(q[1], q[2], rho) + origin_wedge_area(q[2], q[0], rho))
        .abs()
}

/// `V(y₀, R)`: area of the piecewise-linear surface inside the extrinsic ball.
pub fn ball_volume(patch: &ImmersedPatch, triangles: &[[usize; 3]], centre: &Vector3<f64>, r: f64) -> f64 {
    triangles
        .iter()
        .map(|t| triangle_ball_area(t.map(|s| patch.point(s).unwrap()), centre, r))
        .sum()
}

#[derive(Debug, Clone, PartialEq)]
pub struct DensityTable {
    /// Increasing radii `R₀ 2^{-k}`.
    pub radii: Vec<f64>,
    pub volumes: Vec<f64>,
    /// `V(R) / (π R²)`.
    pub densities: Vec<f64>,
    /// `V(R/2)` for each radius.
    pub half_volumes: Vec<f64>,
}

impl DensityTable {
    pub fn density_at_r0(&self) -> f64 {
        *self.densities.last().expect("nonempty table")
    }

    /// `𝒟` is nondecreasing in `R` up to `slack`.
    pub fn nondecreasing(&self, slack: f64) -> bool {
        self.densities.windows(2).all(|w| w[1] >= w[0] - slack)
    }

    /// `V(R) ≤ 2^m 𝒟(R₀) V(R/2)` at every radius, `m = 2`.
    pub fn doubling_holds(&self) -> bool {
        let d0 = self.density_at_r0();
        self.volumes
            .iter()
            .zip(&self.half_volumes)
            .all(|(v, half)| *v <= 4.0 * d0 * half * (1.0 + 1e-12))
    }
}

pub fn dyadic_radii(r0: f64, levels: usize) -> Vec<f64> {
    (0..levels).rev().map(|k| r0 * 0.5f64.powi(k as i32)).collect()
}

pub fn volume_density_table(
    patch: &ImmersedPatch,
    y0: usize,
    r0: f64,
    levels: usize,
) -> Result<DensityTable, MinimalError> {
    let centre = patch.point(y0).ok_or(MinimalError::InsufficientStencil(y0))?;
    let triangles = triangulate(patch);
    let radii = dyadic_radii(r0, levels);
    let mut volumes = Vec::with_capacity(levels);
    let mut half_volumes = Vec::with_capacity(levels);
    let mut below = ball_volume(patch, &triangles, &centre, 0.5 * radii[0]);
    for &r in &radii {
        let v = ball_volume(patch, &triangles, &centre, r);
        if !(below > 0.0) {
            return Err(MinimalError::EmptyBall(0.5 * r));
        }
        half_volumes.push(below);
        volumes.push(v);
        below = v;
    }
    let densities = radii.iter().zip(&volumes).map(|(r, v)| v / (PI * r * r)).collect();
    Ok(DensityTable {
        radii,
        volumes,
        densities,
        half_volumes,
    })
}

/// Weighted graph on the samples: positions in ℝ³, measures one third of the
/// incident triangle areas, and conductances from the metric of each cell,
/// split into nonnegative weights along the cell's edges and one diagonal.
/// Returns the graph and the sample index of each vertex.
pub fn induced_metric_graph(patch: &ImmersedPatch, base: usize) -> Result<(WeightedGraph, Vec<usize>), MinimalError> {
    let triangles = triangulate(patch);
    let mut vertex = vec![usize::MAX; patch.len()];
    let mut samples = Vec::new();
    for t in &triangles {
        for &s in t {
            if vertex[s] == usize::MAX {
                vertex[s] = samples.len();
                samples.push(s);
            }
        }
    }
    if vertex[base] == usize::MAX {
        return Err(MinimalError::InsufficientStencil(base));
    }
    let mut measures = vec![0.0; samples.len()];
    for t in &triangles {
        let p = t.map(|s| patch.point(s).unwrap());
        let area = 0.5 * (p[1] - p[0]).cross(&(p[2] - p[0])).norm();
        t.iter().for_each(|&s| measures[vertex[s]] += area / 3.0);
    }
    let (du, dv) = (patch.du, patch.dv);
    let mut weights: BTreeMap<(usize, usize), f64> = BTreeMap::new();
    let mut add = |a: usize, b: usize, w: f64| {
        let key = (vertex[a].min(vertex[b]), vertex[a].max(vertex[b]));
        *weights.entry(key).or_insert(0.0) += w;
    };
    // Each cell appears as the triangle pair (sw, se, ne), (sw, ne, nw).
    for pair in triangles.chunks(2) {
        let [sw, se, ne] = pair[0];
        let nw = pair[1][2];
        let x = |s: usize| patch.point(s).unwrap();
        let xu = 0.5 * ((x(se) - x(sw)) + (x(ne) - x(nw))) / du;
        let xv = 0.5 * ((x(nw) - x(sw)) + (x(ne) - x(se))) / dv;
        let g = Matrix2::new(xu.dot(&xu), xu.dot(&xv), xv.dot(&xu), xv.dot(&xv));
        let root = g.determinant().sqrt();
        let inv = g.try_inverse().ok_or(MinimalError::InvalidGrid("degenerate cell".into()))?;
        // Q = a p² + 2b pq + c q² with p, q the edge differences along u, v.
        let a = root * inv[(0, 0)] * dv / du;
        let b = root * inv[(0, 1)];
        let c = root * inv[(1, 1)] * du / dv;
        if a < b.abs() || c < b.abs() {
            return Err(EllipticError::NonPositiveCoefficient((a - b.abs()).min(c - b.abs())).into());
        }
        let ua = 0.5 * (a - b.abs());
        let vc = 0.5 * (c - b.abs());
        add(sw, se, ua);
        add(nw, ne, ua);
        add(sw, nw, vc);
        add(se, ne, vc);
        if b > 0.0 {
            add(sw, ne, b);
        } else if b < 0.0 {
            add(se, nw, -b);
        }
    }
    let scale = weights.values().fold(0.0f64, |m, w| m.max(*w));
    let edges = weights
        .into_iter()
        .filter(|&(_, w)| w > 1e-14 * scale)
        .map(|((a, b), w)| EdgeSpec::new(a, b, w))
        .collect();
    let positions = samples
        .iter()
        .map(|&s| patch.point(s).unwrap().iter().copied().collect())
        .collect();
    let g = WeightedGraph::new(positions, measures, edges, vertex[base])?;
    Ok((g, samples))
}

#[derive(Debug, Clone, PartialEq)]
pub struct LambdaEstimate {
    /// `sup_R (R² μ₂(R))⁻¹` over the sampled radii.
    pub lambda: f64,
    /// `(R, (R² μ₂(R))⁻¹)`.
    pub samples: Vec<(f64, f64)>,
}

pub fn lambda_estimate(g: &WeightedGraph, radii: &[f64]) -> Result<LambdaEstimate, MinimalError> {
    let mut samples = Vec::with_capacity(radii.len());
    // Radii below the lattice resolution are skipped.
    for &r in radii {
        match neumann_poincare_constant(g, r) {
            Ok(c) => samples.push((r, c.k3)),
            Err(EllipticError::BallTooSmall(_)) => {}
            Err(e) => return Err(e.into()),
        }
    }
    if samples.is_empty() {
        return Err(MinimalError::EmptyBall(radii.iter().copied().fold(0.0, f64::max)));
    }
    let lambda = samples.iter().map(|s| s.1).fold(0.0, f64::max);
    Ok(LambdaEstimate { lambda, samples })
}

pub fn volume_density_and_lambda(
    patch: &ImmersedPatch,
    y0: usize,
    r0: f64,
    levels: usize,
) -> Result<(DensityTable, LambdaEstimate), MinimalError> {
    let table = volume_density_table(patch, y0, r0, levels)?;
    let (g, _) = induced_metric_graph(patch, y0)?;
    let lambda = lambda_estimate(&g, &table.radii)?;
    Ok((table, lambda))
}
