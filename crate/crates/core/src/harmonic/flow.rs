//! Discrete harmonic maps into spheres by synchronous neighbor averaging.

use std::collections::BTreeMap;

use super::{HarmonicError, SphereField};
use crate::elliptic::WeightedGraph;
use crate::sphere::SpherePoint;

#[derive(Debug, Clone, PartialEq)]
pub struct FlowOptions {
    /// Stop once no vertex moves by more than this.
    pub tol: f64,
    pub max_iter: usize,
    /// Record the Dirichlet energy after every sweep.
    pub record_energy: bool,
}

impl Default for FlowOptions {
    fn default() -> Self {
        Self {
            tol: 1e-10,
            max_iter: 1_000_000,
            record_energy: false,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct FlowOutcome {
    pub field: SphereField,
    pub iterations: usize,
    pub final_displacement: f64,
    /// Energy of the initial state followed by one entry per sweep, when
    /// requested.
    pub energy_history: Vec<f64>,
}

/// `u_v ← normalize(Σ_w c_vw u_w)` at every free vertex, all vertices at once,
/// starting from the normalized mean of the boundary values.
pub fn harmonic_flow(
    g: &WeightedGraph,
    boundary: &BTreeMap<usize, SpherePoint>,
    tol: f64,
) -> Result<SphereField, HarmonicError> {
    let opts = FlowOptions {
        tol,
        ..FlowOptions::default()
    };
    harmonic_flow_with(g, boundary, &opts).map(|o| o.field)
}

pub fn harmonic_flow_with(
    g: &WeightedGraph,
    boundary: &BTreeMap<usize, SpherePoint>,
    opts: &FlowOptions,
) -> Result<FlowOutcome, HarmonicError> {
    let n = g.vertex_count();
    let first = boundary.values().next().ok_or(HarmonicError::EmptyBoundary)?;
    let d = first.coords().len();
    for (&v, p) in boundary {
        if v >= n {
            return Err(HarmonicError::VertexOutOfRange(v));
        }
        if p.coords().len() != d {
            return Err(HarmonicError::DimensionMismatch {
                vertex: v,
                expected: d,
                found: p.coords().len(),
            });
        }
    }
    let mut mean = vec![0.0; d];
    for p in boundary.values() {
        mean.iter_mut().zip(p.coords()).for_each(|(m, c)| *m += c);
    }
    let start = SpherePoint::from_vector(mean).map_err(|_| HarmonicError::ZeroAverage { vertex: None })?;

    let mut u = vec![0.0; n * d];
    let mut fixed = vec![false; n];
    for v in 0..n {
        let p = boundary.get(&v).unwrap_or(&start);
        u[v * d..(v + 1) * d].copy_from_slice(p.coords());
        fixed[v] = boundary.contains_key(&v);
    }
    let free: Vec<usize> = (0..n).filter(|&v| !fixed[v]).collect();
    let stencil: Vec<Vec<(usize, f64)>> = free
        .iter()
        .map(|&v| {
            g.neighbors(v)
                .iter()
                .map(|&(w, k)| (w, g.edges()[k].conductance))
                .collect()
        })
        .collect();

    let mut energy_history = Vec::new();
    if opts.record_energy {
        energy_history.push(energy_flat(g, &u, d));
    }
    let mut next = u.clone();
    let mut avg = vec![0.0; d];
    let mut iterations = 0;
    let mut displacement = f64::INFINITY;
    while iterations < opts.max_iter {
        displacement = 0.0;
        for (slot, &v) in free.iter().enumerate() {
            avg.iter_mut().for_each(|a| *a = 0.0);
            for &(w, c) in &stencil[slot] {
                let uw = &u[w * d..(w + 1) * d];
                avg.iter_mut().zip(uw).for_each(|(a, x)| *a += c * x);
            }
            let norm = crate::linalg::norm(&avg);
            let scale: f64 = stencil[slot].iter().map(|s| s.1).sum();
            if !(norm > 1e-14 * scale) {
                return Err(HarmonicError::ZeroAverage { vertex: Some(v) });
            }
            let mut moved = 0.0;
            for i in 0..d {
                let x = avg[i] / norm;
                moved += (x - u[v * d + i]).powi(2);
                next[v * d + i] = x;
            }
            displacement = f64::max(displacement, moved.sqrt());
        }
        std::mem::swap(&mut u, &mut next);
        iterations += 1;
        if opts.record_energy {
            energy_history.push(energy_flat(g, &u, d));
        }
        if displacement <= opts.tol {
            break;
        }
    }
    if displacement > opts.tol {
        return Err(HarmonicError::NonConvergence {
            iterations,
            displacement,
        });
    }
    log::debug!("harmonic flow: {iterations} sweeps, final displacement {displacement:e}");
    let points = (0..n)
        .map(|v| SpherePoint::from_vector(u[v * d..(v + 1) * d].to_vec()).expect("normalized iterate"))
        .collect();
    Ok(FlowOutcome {
        field: SphereField::new(points)?,
        iterations,
        final_displacement: displacement,
        energy_history,
    })
}

fn energy_flat(g: &WeightedGraph, u: &[f64], d: usize) -> f64 {
    g.edges()
        .iter()
        .map(|e| {
            let a = &u[e.a * d..(e.a + 1) * d];
            let b = &u[e.b * d..(e.b + 1) * d];
            e.conductance * a.iter().zip(b).map(|(x, y)| (x - y).powi(2)).sum::<f64>()
        })
        .sum()
}

/// `Σ_e c_e |u_a - u_b|²`.
pub fn dirichlet_energy(g: &WeightedGraph, u: &SphereField) -> f64 {
    g.edges()
        .iter()
        .map(|e| {
            e.conductance
                * u.get(e.a)
                    .coords()
                    .iter()
                    .zip(u.get(e.b).coords())
                    .map(|(x, y)| (x - y).powi(2))
                    .sum::<f64>()
        })
        .sum()
}

/// Norm of the tangential part of `(Σ_w c_vw u_w)/(Σ_w c_vw) - u_v` at every
/// vertex not listed in `boundary`; zero on the boundary.
pub fn tension(g: &WeightedGraph, u: &SphereField, boundary: &[usize]) -> Vec<f64> {
    let n = g.vertex_count();
    let d = u.ambient_dim();
    let mut out = vec![0.0; n];
    let mut skip = vec![false; n];
    boundary.iter().for_each(|&v| skip[v] = true);
    for v in (0..n).filter(|&v| !skip[v]) {
        let mut avg = vec![0.0; d];
        let mut total = 0.0;
        for &(w, k) in g.neighbors(v) {
            let c = g.edges()[k].conductance;
            total += c;
            avg.iter_mut().zip(u.get(w).coords()).for_each(|(a, x)| *a += c * x);
        }
        let uv = u.get(v).coords();
        avg.iter_mut().zip(uv).for_each(|(a, x)| *a = *a / total - x);
        let normal = crate::linalg::dot(&avg, uv);
        out[v] = avg
            .iter()
            .zip(uv)
            .map(|(a, x)| (a - normal * x).powi(2))
            .sum::<f64>()
            .sqrt();
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::elliptic::Grid2d;

    fn equator(t: f64) -> SpherePoint {
        SpherePoint::new(vec![t.cos(), t.sin(), 0.0]).unwrap()
    }

    #[test]
    fn constant_boundary_is_fixed() {
        let grid = Grid2d::new(6, 6, (0.0, 1.0), (0.0, 1.0)).unwrap();
        let x0 = SpherePoint::from_vector(vec![0.2, 0.5, 0.3, -0.4]).unwrap();
        let bc: BTreeMap<usize, SpherePoint> =
            grid.boundary_vertices().into_iter().map(|v| (v, x0.clone())).collect();
        let u = harmonic_flow(&grid.graph, &bc, 1e-12).unwrap();
        for p in u.points() {
            for (a, b) in p.coords().iter().zip(x0.coords()) {
                assert!((a - b).abs() < 1e-14);
            }
        }
    }

    #[test]
    fn path_gives_geodesic_interpolation() {
        let n = 21;
        let g = WeightedGraph::path(n, 0.0, 1.0).unwrap();
        let (a, b) = (0.3, 2.5);
        let bc = BTreeMap::from([(0, equator(a)), (n - 1, equator(b))]);
        let u = harmonic_flow(&g, &bc, 1e-13).unwrap();
        for (i, p) in u.points().iter().enumerate() {
            let want = a + (b - a) * i as f64 / (n - 1) as f64;
            let got = p.coords()[1].atan2(p.coords()[0]);
            assert!((got - want).abs() < 1e-9, "vertex {i}: {got} vs {want}");
        }
    }

    #[test]
    fn hemisphere_is_preserved_and_energy_decreases() {
        let grid = Grid2d::new(10, 10, (0.0, 1.0), (0.0, 1.0)).unwrap();
        let bc: BTreeMap<usize, SpherePoint> = grid
            .boundary_vertices()
            .into_iter()
            .map(|v| {
                let p = grid.graph.position(v);
                let q = SpherePoint::from_vector(vec![3.0 * p[0] - 1.5, 2.0 * p[1] - 1.0, 0.4]).unwrap();
                (v, q)
            })
            .collect();
        let opts = FlowOptions {
            tol: 1e-11,
            record_energy: true,
            ..FlowOptions::default()
        };
        let out = harmonic_flow_with(&grid.graph, &bc, &opts).unwrap();
        assert!(out.field.points().iter().all(|p| p.coords()[2] >= 0.0));
        assert!(out
            .energy_history
            .windows(2)
            .all(|w| w[1] <= w[0] * (1.0 + 1e-14)));
        let t = tension(&grid.graph, &out.field, &grid.boundary_vertices());
        assert!(t.iter().all(|&x| x <= 10.0 * opts.tol));
    }

    #[test]
    fn antipodal_neighbors_have_no_average() {
        let g = WeightedGraph::path(3, 0.0, 1.0).unwrap();
        let bc = BTreeMap::from([(0, equator(0.0)), (2, equator(std::f64::consts::PI))]);
        assert!(matches!(
            harmonic_flow(&g, &bc, 1e-10),
            Err(HarmonicError::ZeroAverage { .. })
        ));
    }
}
