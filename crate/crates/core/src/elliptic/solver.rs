use std::collections::{BTreeMap, VecDeque};

use super::{CoefficientField, EllipticError, ScalarField, WeightedGraph};
use crate::linalg::{pcg, CsrMatrix};

/// Relative residual target of the interior solve.
pub const SOLVE_TOL: f64 = 1e-10;
/// Iteration cap of the interior solve.
pub const SOLVE_MAX_ITER: usize = 100_000;

/// Result of a Dirichlet solve together with the solver's own residual.
#[derive(Debug, Clone, PartialEq)]
pub struct DivergenceSolution {
    pub field: ScalarField,
    pub iterations: usize,
    pub relative_residual: f64,
}

/// Solves `Σ_j w_ij (f_i - f_j) = 0` at every vertex not in `boundary`,
/// with `f = boundary` on the boundary.
pub fn solve_divergence(
    g: &WeightedGraph,
    a: &CoefficientField,
    boundary: &BTreeMap<usize, f64>,
) -> Result<ScalarField, EllipticError> {
    solve_divergence_detailed(g, a, boundary).map(|s| s.field)
}

pub fn solve_divergence_detailed(
    g: &WeightedGraph,
    a: &CoefficientField,
    boundary: &BTreeMap<usize, f64>,
) -> Result<DivergenceSolution, EllipticError> {
    let n = g.vertex_count();
    if boundary.is_empty() {
        return Err(EllipticError::SingularSystem);
    }
    if let Some((&v, _)) = boundary.iter().find(|(&v, _)| v >= n) {
        return Err(EllipticError::InvalidGraph(format!("boundary vertex {v} out of range")));
    }
    let weights = a.edge_weights(g)?;
    let mut slot = vec![usize::MAX; n];
    let mut interior = Vec::new();
    for v in 0..n {
        if !boundary.contains_key(&v) {
            slot[v] = interior.len();
            interior.push(v);
        }
    }
    check_reachable(g, boundary)?;

    let mut values = vec![0.0; n];
    for (&v, &x) in boundary {
        values[v] = x;
    }
    if interior.is_empty() {
        return Ok(DivergenceSolution {
            field: ScalarField::new(values),
            iterations: 0,
            relative_residual: 0.0,
        });
    }
    let m = interior.len();
    let mut triplets = Vec::with_capacity(5 * m);
    let mut rhs = vec![0.0; m];
    for (k, e) in g.edges().iter().enumerate() {
        let w = weights[k];
        match (slot[e.a], slot[e.b]) {
            (usize::MAX, usize::MAX) => {}
            (i, usize::MAX) => {
                triplets.push((i, i, w));
                rhs[i] += w * values[e.b];
            }
            (usize::MAX, j) => {
                triplets.push((j, j, w));
                rhs[j] += w * values[e.a];
            }
            (i, j) => {
                triplets.push((i, i, w));
                triplets.push((j, j, w));
                triplets.push((i, j, -w));
                triplets.push((j, i, -w));
            }
        }
    }
    let matrix = CsrMatrix::from_triplets(m, triplets);
    let start = boundary.values().sum::<f64>() / boundary.len() as f64;
    let mut x = vec![start; m];
    let outcome = pcg(&matrix, &rhs, &mut x, SOLVE_TOL, SOLVE_MAX_ITER)?;
    for (i, &v) in interior.iter().enumerate() {
        values[v] = x[i];
    }
    log::debug!(
        "divergence solve: {} unknowns, {} iterations, residual {:e}",
        m,
        outcome.iterations,
        outcome.relative_residual
    );
    Ok(DivergenceSolution {
        field: ScalarField::new(values),
        iterations: outcome.iterations,
        relative_residual: outcome.relative_residual,
    })
}

fn check_reachable(g: &WeightedGraph, boundary: &BTreeMap<usize, f64>) -> Result<(), EllipticError> {
    let n = g.vertex_count();
    let mut seen = vec![false; n];
    let mut queue: VecDeque<usize> = boundary.keys().copied().collect();
    queue.iter().for_each(|&v| seen[v] = true);
    while let Some(v) = queue.pop_front() {
        for &(w, _) in g.neighbors(v) {
            if !seen[w] {
                seen[w] = true;
                queue.push_back(w);
            }
        }
    }
    if seen.iter().all(|&s| s) {
        Ok(())
    } else {
        Err(EllipticError::SingularSystem)
    }
}

/// `Σ_e w_e (f_a - f_b)(φ_a - φ_b)`, the weak form of the equation tested
/// against `φ`.
pub fn weak_form(g: &WeightedGraph, a: &CoefficientField, f: &ScalarField, phi: &[f64]) -> Result<f64, EllipticError> {
    let w = a.edge_weights(g)?;
    Ok(g.edges()
        .iter()
        .zip(&w)
        .map(|(e, w)| w * (f.values[e.a] - f.values[e.b]) * (phi[e.a] - phi[e.b]))
        .sum())
}

/// Largest interior residual `|Σ_j w_ij (f_i - f_j)|` relative to the
/// largest boundary flux `Σ_j w_ij |f_j|` over the same vertices.
pub fn interior_residual(
    g: &WeightedGraph,
    a: &CoefficientField,
    f: &ScalarField,
    boundary: &BTreeMap<usize, f64>,
) -> Result<f64, EllipticError> {
    let w = a.edge_weights(g)?;
    let n = g.vertex_count();
    let mut res = vec![0.0; n];
    let mut scale = vec![0.0; n];
    for (e, w) in g.edges().iter().zip(&w) {
        let d = w * (f.values[e.a] - f.values[e.b]);
        res[e.a] += d;
        res[e.b] -= d;
        scale[e.a] += w * f.values[e.b].abs();
        scale[e.b] += w * f.values[e.a].abs();
    }
    let (mut worst, mut norm) = (0.0f64, 0.0f64);
    for v in (0..n).filter(|v| !boundary.contains_key(v)) {
        worst = worst.max(res[v].abs());
        norm = norm.max(scale[v]);
    }
    Ok(if norm > 0.0 { worst / norm } else { worst })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::elliptic::Grid2d;

    #[test]
    fn path_is_linear_interpolation() {
        let g = WeightedGraph::path(11, 0.0, 1.0).unwrap();
        let bc = BTreeMap::from([(0, 0.0), (10, 1.0)]);
        let f = solve_divergence(&g, &CoefficientField::Uniform(1.0), &bc).unwrap();
        for (i, v) in f.values.iter().enumerate() {
            assert!((v - i as f64 / 10.0).abs() < 1e-12);
        }
    }

    #[test]
    fn constant_boundary_gives_constant_field() {
        let grid = Grid2d::new(6, 5, (0.0, 1.0), (0.0, 1.0)).unwrap();
        let bc = grid.boundary_from(|_, _| 2.5);
        let f = solve_divergence(&grid.graph, &CoefficientField::anisotropic(&grid.graph, 3.0), &bc).unwrap();
        assert!(f.values.iter().all(|v| (v - 2.5).abs() < 1e-14));
    }

    #[test]
    fn anisotropic_exponential_is_second_order() {
        let l: f64 = 4.0;
        let exact = |x: f64, y: f64| (l.sqrt() * x).exp() * y.cos();
        let err = |cells: usize| {
            let grid = Grid2d::new(cells, cells, (-1.0, 1.0), (-1.2, 1.2)).unwrap();
            let bc = grid.boundary_from(exact);
            let f = solve_divergence(&grid.graph, &CoefficientField::anisotropic(&grid.graph, l), &bc).unwrap();
            grid.graph
                .positions()
                .iter()
                .zip(&f.values)
                .map(|(p, v)| (v - exact(p[0], p[1])).abs())
                .fold(0.0, f64::max)
        };
        let (coarse, fine) = (err(16), err(32));
        let order = (coarse / fine).log2();
        assert!(order > 1.8, "order {order}");
    }

    #[test]
    fn isolated_interior_is_singular() {
        let grid = Grid2d::new(2, 2, (0.0, 1.0), (0.0, 1.0)).unwrap();
        assert!(matches!(
            solve_divergence(&grid.graph, &CoefficientField::Uniform(1.0), &BTreeMap::new()),
            Err(EllipticError::SingularSystem)
        ));
    }
}
