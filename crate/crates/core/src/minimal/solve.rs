//! Damped Newton for the minimal surface equation, discretized as the
//! gradient of the area of the piecewise-linear graph over both diagonal
//! splittings of every lattice cell.

use super::{MinimalError, MinimalGraph, NodeKind};
use crate::linalg::{norm, pcg, CsrMatrix, LinalgError};

/// Slopes beyond this are treated as a vertical graph.
pub const MAX_SLOPE: f64 = 1e6;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MseOptions {
    /// Stop once every interior residual is at most this.
    pub tol: f64,
    pub max_newton: usize,
}

impl Default for MseOptions {
    fn default() -> Self {
        Self {
            tol: 1e-10,
            max_newton: 100,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct MseSolution {
    pub graph: MinimalGraph,
    pub newton_iterations: usize,
    /// Maximum interior residual at exit.
    pub residual: f64,
    /// Steps that needed damping or the regularized fallback.
    pub damped_steps: usize,
}

struct Triangle {
    nodes: [usize; 3],
    grads: [[f64; 2]; 3],
    /// Splitting weight times area.
    weight: f64,
}

struct AreaFunctional {
    triangles: Vec<Triangle>,
    slot: Vec<Option<usize>>,
    nodes: Vec<usize>,
    cell_area: f64,
}

impl AreaFunctional {
    fn new(mg: &MinimalGraph) -> Self {
        let (nx, ny, h) = (mg.nx(), mg.ny(), mg.spacing());
        let inside = |i: usize, j: usize| mg.kind(mg.index(i, j)) != NodeKind::Outside;
        let mut triangles = Vec::new();
        for j in 0..ny - 1 {
            for i in 0..nx - 1 {
                if !(inside(i, j) && inside(i + 1, j) && inside(i, j + 1) && inside(i + 1, j + 1)) {
                    continue;
                }
                let sw = (mg.index(i, j), [0.0, 0.0]);
                let se = (mg.index(i + 1, j), [h, 0.0]);
                let nw = (mg.index(i, j + 1), [0.0, h]);
                let ne = (mg.index(i + 1, j + 1), [h, h]);
                for tri in [[sw, se, ne], [sw, ne, nw], [sw, se, nw], [se, ne, nw]] {
                    triangles.push(p1_triangle(tri, 0.5));
                }
            }
        }
        let mut slot = vec![None; mg.heights().len()];
        let nodes = mg.interior_nodes();
        for (k, &v) in nodes.iter().enumerate() {
            slot[v] = Some(k);
        }
        Self {
            triangles,
            slot,
            nodes,
            cell_area: h * h,
        }
    }

    fn slope(t: &Triangle, z: &[f64]) -> [f64; 2] {
        let mut g = [0.0; 2];
        for k in 0..3 {
            g[0] += z[t.nodes[k]] * t.grads[k][0];
            g[1] += z[t.nodes[k]] * t.grads[k][1];
        }
        g
    }

    fn max_slope(&self, z: &[f64]) -> f64 {
        self.triangles
            .iter()
            .map(|t| {
                let g = Self::slope(t, z);
                g[0].hypot(g[1])
            })
            .fold(0.0, f64::max)
    }

    fn energy(&self, z: &[f64]) -> f64 {
        self.triangles
            .iter()
            .map(|t| {
                let g = Self::slope(t, z);
                t.weight * (1.0 + g[0] * g[0] + g[1] * g[1]).sqrt()
            })
            .sum()
    }

    /// Gradient with respect to the interior heights; `flat` uses the
    /// Dirichlet energy `½|∇z|²` instead of the area.
    fn gradient(&self, z: &[f64], flat: bool) -> Vec<f64> {
        let mut out = vec![0.0; self.nodes.len()];
        for t in &self.triangles {
            let g = Self::slope(t, z);
            let w = if flat { 1.0 } else { (1.0 + g[0] * g[0] + g[1] * g[1]).sqrt() };
            for k in 0..3 {
                if let Some(s) = self.slot[t.nodes[k]] {
                    out[s] += t.weight * (g[0] * t.grads[k][0] + g[1] * t.grads[k][1]) / w;
                }
            }
        }
        out
    }

    fn hessian(&self, z: &[f64], flat: bool) -> CsrMatrix {
        let mut triplets = Vec::with_capacity(self.triangles.len() * 9);
        for t in &self.triangles {
            let g = Self::slope(t, z);
            // I/W - g gᵀ/W³
            let m = if flat {
                [[1.0, 0.0], [0.0, 1.0]]
            } else {
                let w = (1.0 + g[0] * g[0] + g[1] * g[1]).sqrt();
                let w3 = w * w * w;
                [
                    [1.0 / w - g[0] * g[0] / w3, -g[0] * g[1] / w3],
                    [-g[0] * g[1] / w3, 1.0 / w - g[1] * g[1] / w3],
                ]
            };
            for a in 0..3 {
                let Some(sa) = self.slot[t.nodes[a]] else { continue };
                let ga = t.grads[a];
                let mga = [m[0][0] * ga[0] + m[0][1] * ga[1], m[1][0] * ga[0] + m[1][1] * ga[1]];
                for b in 0..3 {
                    if let Some(sb) = self.slot[t.nodes[b]] {
                        let gb = t.grads[b];
                        triplets.push((sa, sb, t.weight * (mga[0] * gb[0] + mga[1] * gb[1])));
                    }
                }
            }
        }
        CsrMatrix::from_triplets(self.nodes.len(), triplets)
    }

    fn max_residual(&self, grad: &[f64]) -> f64 {
        grad.iter().fold(0.0f64, |m, g| m.max(g.abs())) / self.cell_area
    }

    fn step(&self, z: &[f64], delta: &[f64], t: f64) -> Vec<f64> {
        let mut out = z.to_vec();
        for (s, &v) in self.nodes.iter().enumerate() {
            out[v] += t * delta[s];
        }
        out
    }
}

fn p1_triangle(corners: [(usize, [f64; 2]); 3], split_weight: f64) -> Triangle {
    let p = corners.map(|c| c.1);
    let twice_area = (p[1][0] - p[0][0]) * (p[2][1] - p[0][1]) - (p[2][0] - p[0][0]) * (p[1][1] - p[0][1]);
    let mut grads = [[0.0; 2]; 3];
    for (k, grad) in grads.iter_mut().enumerate() {
        let (a, b) = (p[(k + 1) % 3], p[(k + 2) % 3]);
        *grad = [-(b[1] - a[1]) / twice_area, (b[0] - a[0]) / twice_area];
    }
    Triangle {
        nodes: corners.map(|c| c.0),
        grads,
        weight: split_weight * 0.5 * twice_area.abs(),
    }
}

/// Largest interior residual `|∂A_h/∂z_v| / h²` of the discrete area.
pub fn mse_residual(mg: &MinimalGraph) -> f64 {
    let a = AreaFunctional::new(mg);
    a.max_residual(&a.gradient(mg.heights(), false))
}

/// Area of the piecewise-linear graph, averaged over both splittings.
pub fn discrete_area(mg: &MinimalGraph) -> f64 {
    AreaFunctional::new(mg).energy(mg.heights())
}

pub fn solve_mse(mg: &MinimalGraph) -> Result<MseSolution, MinimalError> {
    solve_mse_with(mg, &MseOptions::default())
}

/// Keeps the boundary heights of `mg` and solves for the interior, starting
/// from the discrete harmonic extension.
pub fn solve_mse_with(mg: &MinimalGraph, opts: &MseOptions) -> Result<MseSolution, MinimalError> {
    let a = AreaFunctional::new(mg);
    let boundary = mg.boundary_nodes();
    let mean = boundary.iter().map(|&v| mg.height(v)).sum::<f64>() / boundary.len() as f64;
    let mut z = mg.with_interior(|_| mean).heights().to_vec();
    let steep = a.max_slope(&z);
    if steep > MAX_SLOPE {
        return Err(MinimalError::SteepBoundary(steep));
    }
    let lap = a.hessian(&z, true);
    let mut delta = vec![0.0; a.nodes.len()];
    let rhs: Vec<f64> = a.gradient(&z, true).iter().map(|g| -g).collect();
    linear_solve(&lap, &rhs, &mut delta)?;
    z = a.step(&z, &delta, 1.0);

    let mut damped_steps = 0;
    let mut iterations = 0;
    loop {
        let grad = a.gradient(&z, false);
        let residual = a.max_residual(&grad);
        log::debug!("mse newton {iterations}: residual {residual:e}");
        if residual <= opts.tol {
            let mut graph = mg.clone();
            for &v in &a.nodes {
                graph.set_height(v, z[v]);
            }
            return Ok(MseSolution {
                graph,
                newton_iterations: iterations,
                residual,
                damped_steps,
            });
        }
        if iterations >= opts.max_newton {
            return Err(MinimalError::NewtonDiverged { iterations, residual });
        }
        iterations += 1;
        let hess = a.hessian(&z, false);
        let rhs: Vec<f64> = grad.iter().map(|g| -g).collect();
        delta.iter_mut().for_each(|d| *d = 0.0);
        linear_solve(&hess, &rhs, &mut delta)?;
        match line_search(&a, &z, &grad, &delta, residual)? {
            Some((next, full)) => {
                damped_steps += usize::from(!full);
                z = next;
            }
            None => {
                damped_steps += 1;
                z = regularized_step(&a, &hess, &z, &rhs, residual)
                    .ok_or(MinimalError::NewtonDiverged { iterations, residual })??;
            }
        }
    }
}

fn linear_solve(m: &CsrMatrix, rhs: &[f64], x: &mut [f64]) -> Result<(), MinimalError> {
    match pcg(m, rhs, x, 1e-12, 50_000) {
        Ok(_) => Ok(()),
        // An inexact Newton direction is still a descent direction.
        Err(LinalgError::NoConvergence { residual, .. }) if residual < 1e-6 => Ok(()),
        Err(e) => Err(e.into()),
    }
}

/// Backtracking on the area; a step is also accepted when it lowers the
/// residual, since near the solution area differences drown in rounding.
fn line_search(
    a: &AreaFunctional,
    z: &[f64],
    grad: &[f64],
    delta: &[f64],
    residual: f64,
) -> Result<Option<(Vec<f64>, bool)>, MinimalError> {
    let e0 = a.energy(z);
    let slope: f64 = grad.iter().zip(delta).map(|(g, d)| g * d).sum();
    let mut t = 1.0;
    for k in 0..30 {
        let next = a.step(z, delta, t);
        let steep = a.max_slope(&next);
        if steep <= MAX_SLOPE {
            let decreased = a.energy(&next) <= e0 + 1e-4 * t * slope;
            if decreased || a.max_residual(&a.gradient(&next, false)) < residual {
                return Ok(Some((next, k == 0)));
            }
        } else if k == 29 {
            return Err(MinimalError::SteepBoundary(steep));
        }
        t *= 0.5;
    }
    Ok(None)
}

/// Levenberg-style steps `(H + μ diag H) δ = -g` with growing `μ`.
fn regularized_step(
    a: &AreaFunctional,
    hess: &CsrMatrix,
    z: &[f64],
    rhs: &[f64],
    residual: f64,
) -> Option<Result<Vec<f64>, MinimalError>> {
    let e0 = a.energy(z);
    let diag = crate::linalg::LinearOperator::diagonal(hess);
    let mut mu = 1e-3;
    for _ in 0..12 {
        let mut t: Vec<(usize, usize, f64)> = Vec::new();
        for i in 0..hess.n() {
            for (j, v) in hess.row(i) {
                t.push((i, j, v));
            }
            t.push((i, i, mu * diag[i]));
        }
        let shifted = CsrMatrix::from_triplets(hess.n(), t);
        let mut delta = vec![0.0; rhs.len()];
        if let Err(e) = linear_solve(&shifted, rhs, &mut delta) {
            return Some(Err(e));
        }
        let next = a.step(z, &delta, 1.0);
        if a.max_slope(&next) <= MAX_SLOPE
            && (a.energy(&next) < e0 || a.max_residual(&a.gradient(&next, false)) < residual)
        {
            return Some(Ok(next));
        }
        mu *= 10.0;
        if norm(&delta) == 0.0 {
            break;
        }
    }
    None
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn affine_data_is_reproduced() {
        let f = |x: f64, y: f64| 0.7 * x - 1.3 * y + 0.25;
        let mg = MinimalGraph::square(-1.0, 1.0, 16, |x, y| if x.abs() == 1.0 || y.abs() == 1.0 { f(x, y) } else { 0.0 })
            .unwrap();
        let sol = solve_mse(&mg).unwrap();
        assert!(sol.residual <= 1e-10);
        for v in sol.graph.interior_nodes() {
            let (x, y) = sol.graph.position(v);
            assert!((sol.graph.height(v) - f(x, y)).abs() < 1e-10);
        }
    }

    #[test]
    fn zero_data_gives_zero() {
        let mg = MinimalGraph::square(0.0, 1.0, 8, |_, _| 0.0).unwrap();
        let sol = solve_mse(&mg).unwrap();
        assert!(sol.graph.heights().iter().all(|&z| z == 0.0));
    }

    #[test]
    fn saddle_data_obeys_maximum_principle() {
        let mg = MinimalGraph::square(-1.0, 1.0, 20, |x, y| x * x - y * y).unwrap();
        let sol = solve_mse(&mg).unwrap();
        assert!(sol.residual <= 1e-10);
        assert!(sol.graph.maximum_principle_holds(1e-12));
        assert!(mse_residual(&sol.graph) <= 1e-10);
        assert!(discrete_area(&sol.graph) <= discrete_area(&mg));
    }

    #[test]
    fn vertical_boundary_is_rejected() {
        let mg = MinimalGraph::square(0.0, 1.0, 4, |x, _| if x > 0.9 { 1e9 } else { 0.0 }).unwrap();
        assert!(matches!(solve_mse(&mg), Err(MinimalError::SteepBoundary(_))));
    }

    #[test]
    fn p1_gradients_reproduce_linear_functions() {
        let t = p1_triangle([(0, [0.0, 0.0]), (1, [2.0, 0.0]), (2, [0.0, 2.0])], 1.0);
        let z = [1.0, 1.0 + 2.0 * 3.0, 1.0 - 2.0 * 0.5];
        assert_eq!(AreaFunctional::slope(&t, &z), [3.0, -0.5]);
        assert_eq!(t.weight, 2.0);
    }
}
