use nalgebra::{DMatrix, SymmetricEigen};

use super::{EllipticError, WeightedGraph};

/// One real value per vertex.
#[derive(Debug, Clone, PartialEq)]
pub struct ScalarField {
    pub values: Vec<f64>,
}

impl ScalarField {
    pub fn new(values: Vec<f64>) -> Self {
        Self { values }
    }

    pub fn from_fn(g: &WeightedGraph, f: impl Fn(&[f64]) -> f64) -> Self {
        Self::new(g.positions().iter().map(|p| f(p)).collect())
    }

    pub fn sup_on(&self, vertices: &[usize]) -> f64 {
        vertices.iter().map(|&v| self.values[v]).fold(f64::NEG_INFINITY, f64::max)
    }

    pub fn inf_on(&self, vertices: &[usize]) -> f64 {
        vertices.iter().map(|&v| self.values[v]).fold(f64::INFINITY, f64::min)
    }

    pub fn oscillation_on(&self, vertices: &[usize]) -> f64 {
        if vertices.is_empty() {
            0.0
        } else {
            self.sup_on(vertices) - self.inf_on(vertices)
        }
    }
}

/// The coefficient `A` of `div(A ∇f) = 0`, reduced to a multiplier per edge.
#[derive(Debug, Clone, PartialEq)]
pub enum CoefficientField {
    Uniform(f64),
    PerEdge(Vec<f64>),
    /// Scalar per vertex; an edge uses the mean of its endpoints.
    VertexScalar(Vec<f64>),
    /// Symmetric positive definite matrix per vertex in the coordinates of
    /// the vertex positions; an edge `e` with unit direction `ê` uses the
    /// endpoint mean of `êᵀ A ê`.
    Tensor(Vec<DMatrix<f64>>),
}

impl CoefficientField {
    /// The same matrix at every vertex.
    pub fn constant_tensor(g: &WeightedGraph, a: DMatrix<f64>) -> Self {
        Self::Tensor(vec![a; g.vertex_count()])
    }

    /// `diag(1, l)` everywhere on a planar graph.
    pub fn anisotropic(g: &WeightedGraph, l: f64) -> Self {
        Self::constant_tensor(g, DMatrix::from_diagonal(&nalgebra::DVector::from_vec(vec![1.0, l])))
    }

    /// Multiplier applied to edge `k` on top of its conductance.
    pub fn edge_multiplier(&self, g: &WeightedGraph, k: usize) -> f64 {
        let e = &g.edges()[k];
        match self {
            Self::Uniform(c) => *c,
            Self::PerEdge(w) => w[k],
            Self::VertexScalar(s) => 0.5 * (s[e.a] + s[e.b]),
            Self::Tensor(m) => {
                let pa = g.position(e.a);
                let pb = g.position(e.b);
                let d: Vec<f64> = pb.iter().zip(pa).map(|(b, a)| b - a).collect();
                let len = crate::linalg::norm(&d);
                let u = nalgebra::DVector::from_iterator(d.len(), d.iter().map(|c| c / len));
                let qa = (u.transpose() * &m[e.a] * &u)[(0, 0)];
                let qb = (u.transpose() * &m[e.b] * &u)[(0, 0)];
                0.5 * (qa + qb)
            }
        }
    }

    /// Full edge weight: conductance times multiplier.
    pub fn edge_weights(&self, g: &WeightedGraph) -> Result<Vec<f64>, EllipticError> {
        self.check_shape(g)?;
        (0..g.edges().len())
            .map(|k| {
                let w = g.edges()[k].conductance * self.edge_multiplier(g, k);
                if w > 0.0 && w.is_finite() {
                    Ok(w)
                } else {
                    Err(EllipticError::NonPositiveCoefficient(w))
                }
            })
            .collect()
    }

    fn check_shape(&self, g: &WeightedGraph) -> Result<(), EllipticError> {
        let (have, want) = match self {
            Self::Uniform(_) => return Ok(()),
            Self::PerEdge(w) => (w.len(), g.edges().len()),
            Self::VertexScalar(s) => (s.len(), g.vertex_count()),
            Self::Tensor(m) => {
                if let Some(bad) = m.iter().find(|a| a.nrows() != g.dim() || a.ncols() != g.dim()) {
                    return Err(EllipticError::InvalidGraph(format!(
                        "coefficient matrix is {}x{}, graph dimension is {}",
                        bad.nrows(),
                        bad.ncols(),
                        g.dim()
                    )));
                }
                (m.len(), g.vertex_count())
            }
        };
        if have != want {
            return Err(EllipticError::InvalidGraph(format!(
                "coefficient field has {have} entries, expected {want}"
            )));
        }
        Ok(())
    }
}

/// Extremal multipliers `(λ₁, λ₂)` over a ball and their ratio `L = λ₂/λ₁`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CoefficientBounds {
    pub lambda1: f64,
    pub lambda2: f64,
    pub ratio: f64,
}

pub fn coefficient_bounds(
    a: &CoefficientField,
    g: &WeightedGraph,
    ball: &[usize],
) -> Result<CoefficientBounds, EllipticError> {
    if ball.is_empty() {
        return Err(EllipticError::EmptyBall);
    }
    let (lo, hi) = match a {
        CoefficientField::Uniform(c) => (*c, *c),
        CoefficientField::PerEdge(w) => {
            let mut inside = vec![false; g.vertex_count()];
            ball.iter().for_each(|&v| inside[v] = true);
            let touched: Vec<f64> = g
                .edges()
                .iter()
                .enumerate()
                .filter(|(_, e)| inside[e.a] || inside[e.b])
                .map(|(k, _)| w[k])
                .collect();
            if touched.is_empty() {
                return Err(EllipticError::EmptyBall);
            }
            extremes(touched.into_iter())
        }
        CoefficientField::VertexScalar(s) => extremes(ball.iter().map(|&v| s[v])),
        CoefficientField::Tensor(m) => {
            let mut lo = f64::INFINITY;
            let mut hi = f64::NEG_INFINITY;
            for &v in ball {
                let eig = SymmetricEigen::new(m[v].clone()).eigenvalues;
                lo = lo.min(eig.min());
                hi = hi.max(eig.max());
            }
            (lo, hi)
        }
    };
    if !(lo > 0.0) {
        return Err(EllipticError::NonPositiveCoefficient(lo));
    }
    Ok(CoefficientBounds {
        lambda1: lo,
        lambda2: hi,
        ratio: hi / lo,
    })
}

fn extremes(values: impl Iterator<Item = f64>) -> (f64, f64) {
    values.fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), v| (lo.min(v), hi.max(v)))
}
