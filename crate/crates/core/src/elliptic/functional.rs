//! Volume doubling, Neumann-Poincaré and Sobolev-type constants of balls.

use rand::Rng;

use super::{EllipticError, WeightedGraph};
use crate::linalg::{lowest_nonzero_eigenpair, CsrMatrix, LinearOperator};

/// `Vol(B_R) / Vol(B_{R/2})` around the base vertex.
pub fn doubling_constant(g: &WeightedGraph, radius: f64) -> Result<f64, EllipticError> {
    let half = g.ball(0.5 * radius);
    if half.is_empty() {
        return Err(EllipticError::EmptyBall);
    }
    Ok(g.volume(&g.ball(radius)) / g.volume(&half))
}

/// Second Neumann eigenpair of a ball.
#[derive(Debug, Clone, PartialEq)]
pub struct NeumannEigen {
    /// Vertices of `B_{3R/4}`, in increasing order.
    pub ball: Vec<usize>,
    pub mu2: f64,
    /// `(R² μ₂)⁻¹`.
    pub k3: f64,
    /// Eigenvector on `ball`, normalized to `Σ m_i v_i² = 1`, mean zero.
    pub eigenvector: Vec<f64>,
}

/// Graph Laplacian of the ball with only the edges inside it, i.e. the
/// quadratic form `Σ c_e (v_a - v_b)²` restricted to functions on the ball.
fn ball_laplacian(g: &WeightedGraph, ball: &[usize]) -> (CsrMatrix, Vec<Option<usize>>) {
    let mut slot = vec![None; g.vertex_count()];
    for (i, &v) in ball.iter().enumerate() {
        slot[v] = Some(i);
    }
    let mut t = Vec::new();
    for e in g.edges() {
        if let (Some(i), Some(j)) = (slot[e.a], slot[e.b]) {
            let w = e.conductance;
            t.extend([(i, i, w), (j, j, w), (i, j, -w), (j, i, -w)]);
        }
    }
    (CsrMatrix::from_triplets(ball.len(), t), slot)
}

/// `M^{-1/2} L M^{-1/2}`.
struct MassScaled<'a> {
    l: &'a CsrMatrix,
    inv_sqrt_m: Vec<f64>,
}

impl LinearOperator for MassScaled<'_> {
    fn dim(&self) -> usize {
        self.l.n()
    }

    fn apply(&self, x: &[f64], y: &mut [f64]) {
        let scaled: Vec<f64> = x.iter().zip(&self.inv_sqrt_m).map(|(a, s)| a * s).collect();
        self.l.apply(&scaled, y);
        y.iter_mut().zip(&self.inv_sqrt_m).for_each(|(a, s)| *a *= s);
    }

    fn diagonal(&self) -> Vec<f64> {
        self.l
            .diagonal()
            .iter()
            .zip(&self.inv_sqrt_m)
            .map(|(d, s)| d * s * s)
            .collect()
    }
}

/// Second-smallest eigenvalue of `L v = μ M v` on `B_{3R/4}` with natural
/// boundary conditions, and `K₃ = (R² μ₂)⁻¹`.
pub fn neumann_poincare_constant(g: &WeightedGraph, radius: f64) -> Result<NeumannEigen, EllipticError> {
    let ball = g.ball(0.75 * radius);
    neumann_on(g, ball, radius)
}

/// As [`neumann_poincare_constant`] on an explicit vertex set.
pub fn neumann_on(g: &WeightedGraph, ball: Vec<usize>, radius: f64) -> Result<NeumannEigen, EllipticError> {
    if ball.len() < 2 {
        return Err(EllipticError::BallTooSmall(ball.len()));
    }
    let mut mask = vec![false; g.vertex_count()];
    ball.iter().for_each(|&v| mask[v] = true);
    if g.component_count(&mask) != 1 {
        return Err(EllipticError::DisconnectedBall);
    }
    let (l, _) = ball_laplacian(g, &ball);
    let m: Vec<f64> = ball.iter().map(|&v| g.measures()[v]).collect();
    let total: f64 = m.iter().sum();
    let kernel: Vec<f64> = m.iter().map(|x| (x / total).sqrt()).collect();
    let op = MassScaled {
        l: &l,
        inv_sqrt_m: m.iter().map(|x| 1.0 / x.sqrt()).collect(),
    };
    let pair = lowest_nonzero_eigenpair(&op, &kernel, 4, 1e-10)?;
    let mut v: Vec<f64> = pair.vector.iter().zip(&op.inv_sqrt_m).map(|(y, s)| y * s).collect();
    let mass: f64 = v.iter().zip(&m).map(|(a, w)| w * a * a).sum();
    v.iter_mut().for_each(|a| *a /= mass.sqrt());
    Ok(NeumannEigen {
        k3: 1.0 / (radius * radius * pair.value),
        mu2: pair.value,
        eigenvector: v,
        ball,
    })
}

/// `∫_B |v - v̄|² / ∫_B |∇v|²` for `v` given on the ball's vertices.
pub fn poincare_quotient(g: &WeightedGraph, ball: &[usize], v: &[f64]) -> f64 {
    let (l, _) = ball_laplacian(g, ball);
    let m: Vec<f64> = ball.iter().map(|&u| g.measures()[u]).collect();
    let total: f64 = m.iter().sum();
    let mean = v.iter().zip(&m).map(|(a, w)| a * w).sum::<f64>() / total;
    let num: f64 = v.iter().zip(&m).map(|(a, w)| w * (a - mean).powi(2)).sum();
    let mut lv = vec![0.0; v.len()];
    l.apply(v, &mut lv);
    num / crate::linalg::dot(v, &lv)
}

/// `(⨍_{B_r} |v|^{2ν})^{1/2ν} / (r (⨍_{B_r} |∇v|²)^{1/2})` for `v` supported
/// on `B_r` (values outside the ball are ignored and treated as 0).
pub fn sobolev_ratio(g: &WeightedGraph, r: f64, nu: f64, v: &[f64]) -> Option<f64> {
    let ball = g.ball(r);
    let mut inside = vec![false; g.vertex_count()];
    ball.iter().for_each(|&u| inside[u] = true);
    let val = |u: usize| if inside[u] { v[u] } else { 0.0 };
    let vol = g.volume(&ball);
    if vol == 0.0 {
        return None;
    }
    let lp = ball
        .iter()
        .map(|&u| g.measures()[u] * val(u).abs().powf(2.0 * nu))
        .sum::<f64>()
        / vol;
    let energy = g
        .edges()
        .iter()
        .filter(|e| inside[e.a] || inside[e.b])
        .map(|e| e.conductance * (val(e.a) - val(e.b)).powi(2))
        .sum::<f64>()
        / vol;
    if energy == 0.0 {
        return None;
    }
    Some(lp.powf(0.5 / nu) / (r * energy.sqrt()))
}

/// Running maximum of the Sobolev ratio over random test fields.
#[derive(Debug, Clone, PartialEq)]
pub struct SobolevProbe {
    pub best: f64,
    /// Running maximum after each trial.
    pub history: Vec<f64>,
}

/// Random test fields on `B_r`: tents of random center and width, vertex
/// noise, and single-vertex spikes, in rotation.
pub fn sobolev_constant_probe<R: Rng + ?Sized>(
    g: &WeightedGraph,
    r: f64,
    nu: f64,
    trials: usize,
    rng: &mut R,
) -> SobolevProbe {
    let ball = g.ball(r);
    let mut best: f64 = 0.0;
    let mut history = Vec::with_capacity(trials);
    let n = g.vertex_count();
    for t in 0..trials.max(1) {
        let mut v = vec![0.0; n];
        if !ball.is_empty() {
            match t % 3 {
                0 => {
                    let c = ball[rng.random_range(0..ball.len())];
                    let width = r * rng.random_range(0.05..1.0);
                    for &u in &ball {
                        v[u] = (1.0 - g.distance(c, u) / width).max(0.0);
                    }
                }
                1 => {
                    for &u in &ball {
                        v[u] = rng.random_range(-1.0..1.0);
                    }
                }
                _ => {
                    v[ball[rng.random_range(0..ball.len())]] = 1.0;
                }
            }
        }
        if let Some(q) = sobolev_ratio(g, r, nu, &v) {
            best = best.max(q);
        }
        history.push(best);
    }
    SobolevProbe { best, history }
}
