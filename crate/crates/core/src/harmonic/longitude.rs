//! The longitude of a sphere-valued field: its divergence-form equation and
//! the resulting confinement of the image to a geodesic ball.

use std::f64::consts::PI;

use rand::Rng;

use super::{HarmonicError, SphereField};
use crate::elliptic::{shrink_chain, ScalarField, ShrinkChain, WeightedGraph};
use crate::sphere::{LongitudeChart, SpherePoint};

/// `R ↦ sup_{B_R} r⁻¹∘u` as a step function of the radius.
#[derive(Debug, Clone, PartialEq)]
pub struct MTable {
    /// `(d_k, M_k)`: distances from the base vertex in increasing order and
    /// the running maximum of `r⁻¹` over vertices up to that distance.
    pub steps: Vec<(f64, f64)>,
}

impl MTable {
    /// `sup_{B_R} r⁻¹∘u` with `B_R = {d < R}`; `None` when the ball is empty.
    pub fn eval(&self, radius: f64) -> Option<f64> {
        let count = self.steps.partition_point(|&(d, _)| d < radius);
        count.checked_sub(1).map(|i| self.steps[i].1)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Composition {
    pub theta: ScalarField,
    pub r: ScalarField,
    pub m_table: MTable,
}

/// Pointwise `Θ = θ∘u`, `r∘u` and the table of `M(R)`.
pub fn compose_fields(
    u: &SphereField,
    g: &WeightedGraph,
    chart: &LongitudeChart,
) -> Result<Composition, HarmonicError> {
    let mut theta = Vec::with_capacity(u.len());
    let mut r = Vec::with_capacity(u.len());
    for (v, p) in u.points().iter().enumerate() {
        let l = chart
            .lift(p)
            .map_err(|source| HarmonicError::Chart { vertex: v, source })?;
        theta.push(l.theta);
        r.push(l.r);
    }
    let mut order: Vec<(f64, usize)> = (0..u.len()).map(|v| (g.distance(g.base(), v), v)).collect();
    order.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));
    let mut running: f64 = 0.0;
    let steps = order
        .into_iter()
        .map(|(d, v)| {
            running = running.max(1.0 / r[v]);
            (d, running)
        })
        .collect();
    Ok(Composition {
        theta: ScalarField::new(theta),
        r: ScalarField::new(r),
        m_table: MTable { steps },
    })
}

/// Edge discretization of `(r²∘u) ⟨∇φ, ∇Θ⟩`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum EdgeForm {
    /// `½(r_a² + r_b²)(Θ_a - Θ_b)`.
    #[default]
    ArithmeticMean,
    /// `r_a r_b (Θ_a - Θ_b)`.
    GeometricMean,
    /// `r_a r_b sin(Θ_a - Θ_b)`: the planar cross product of the projected
    /// endpoint values. For a fixed point of neighbor averaging the vertex sums
    /// of this form vanish identically, so it isolates solver error from
    /// discretization error.
    Chordal,
}

/// `Σ_e c_e w_e (φ_a - φ_b)` with `w_e` the chosen edge form.
pub fn weak_longitude_residual(
    u: &SphereField,
    g: &WeightedGraph,
    phi: &[f64],
    boundary: &[usize],
    chart: &LongitudeChart,
    form: EdgeForm,
) -> Result<f64, HarmonicError> {
    if let Some(&v) = boundary.iter().find(|&&v| phi[v] != 0.0) {
        return Err(HarmonicError::NotCompactlySupported { vertex: v });
    }
    let comp = compose_fields(u, g, chart)?;
    let (t, r) = (&comp.theta.values, &comp.r.values);
    Ok(g.edges()
        .iter()
        .map(|e| {
            let dphi = phi[e.a] - phi[e.b];
            if dphi == 0.0 {
                return 0.0;
            }
            let dt = t[e.a] - t[e.b];
            let w = match form {
                EdgeForm::ArithmeticMean => 0.5 * (r[e.a].powi(2) + r[e.b].powi(2)) * dt,
                EdgeForm::GeometricMean => r[e.a] * r[e.b] * dt,
                EdgeForm::Chordal => {
                    let (pa, pb) = (u.get(e.a).coords(), u.get(e.b).coords());
                    let (a0, a1) = chart.plane(pa);
                    let (b0, b1) = chart.plane(pb);
                    a1 * b0 - a0 * b1
                }
            };
            e.conductance * w * dphi
        })
        .sum())
}

/// Random test function: a sum of `modes` random plane waves on interior
/// vertices, zero on `boundary`, scaled to `Σ_e c_e (φ_a - φ_b)² = 1`.
pub fn random_test_function<R: Rng + ?Sized>(
    g: &WeightedGraph,
    boundary: &[usize],
    modes: usize,
    rng: &mut R,
) -> Vec<f64> {
    let n = g.vertex_count();
    let mut on_boundary = vec![false; n];
    boundary.iter().for_each(|&v| on_boundary[v] = true);
    let waves: Vec<(Vec<f64>, f64, f64)> = (0..modes)
        .map(|_| {
            let k = (0..g.dim()).map(|_| rng.random_range(-3.0 * PI..3.0 * PI)).collect();
            (k, rng.random_range(0.0..2.0 * PI), rng.random_range(-1.0..1.0))
        })
        .collect();
    let mut phi: Vec<f64> = (0..n)
        .map(|v| {
            if on_boundary[v] {
                return 0.0;
            }
            let x = g.position(v);
            waves
                .iter()
                .map(|(k, b, a)| a * (crate::linalg::dot(k, x) + b).cos())
                .sum()
        })
        .collect();
    let energy: f64 = g
        .edges()
        .iter()
        .map(|e| e.conductance * (phi[e.a] - phi[e.b]).powi(2))
        .sum();
    if energy > 0.0 {
        phi.iter_mut().for_each(|x| *x /= energy.sqrt());
    }
    phi
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WeakResidualProbe {
    pub trials: usize,
    pub max_residual: f64,
    /// Largest discrete tension over interior vertices, for comparison.
    pub max_tension: f64,
}

/// Largest `|weak_longitude_residual|` over random unit test functions.
pub fn weak_residual_probe<R: Rng + ?Sized>(
    u: &SphereField,
    g: &WeightedGraph,
    boundary: &[usize],
    chart: &LongitudeChart,
    form: EdgeForm,
    trials: usize,
    rng: &mut R,
) -> Result<WeakResidualProbe, HarmonicError> {
    let mut max_residual: f64 = 0.0;
    for _ in 0..trials {
        let phi = random_test_function(g, boundary, 4, rng);
        let r = weak_longitude_residual(u, g, &phi, boundary, chart, form)?;
        max_residual = max_residual.max(r.abs());
    }
    let max_tension = super::tension(g, u, boundary).into_iter().fold(0.0, f64::max);
    Ok(WeakResidualProbe {
        trials,
        max_residual,
        max_tension,
    })
}

/// Advisory check for externally supplied fields: every interior tension is at
/// most `tol`. Small discrete tension is only a heuristic stand-in for weak
/// harmonicity in the Sobolev sense.
pub fn is_weakly_harmonic(g: &WeightedGraph, u: &SphereField, boundary: &[usize], tol: f64) -> bool {
    super::tension(g, u, boundary).iter().all(|&t| t <= tol)
}

/// Geodesic ball containing `u(B_{R₁})`.
#[derive(Debug, Clone, PartialEq)]
pub struct ShrinkReport {
    pub r1: f64,
    pub theta0: f64,
    pub center: SpherePoint,
    /// `arccos(½ M(R₁)⁻¹)`.
    pub radius: f64,
    pub m_r1: f64,
    /// `osc_{B_{R₀}} Θ`.
    pub c2: f64,
    pub osc_r1: f64,
    /// `min_{y ∈ B_{R₁}} (u(y), x₀)`.
    pub min_inner_product: f64,
    /// `None` when `osc_{B_{R₀}} Θ = 0` and `R₁ = R₀/2` is used directly.
    pub chain: Option<ShrinkChain>,
}

/// Computes `R₁` from `c₂ = osc_{B_{R₀}} Θ`, then checks that `Θ` varies by at
/// most `2π/3` on `B_{R₁}` and that `(u(y), x₀) ≥ ½ M(R₁)⁻¹` there.
pub fn image_shrink_check(
    u: &SphereField,
    g: &WeightedGraph,
    r0: f64,
    c0: f64,
    chart: &LongitudeChart,
) -> Result<ShrinkReport, HarmonicError> {
    let comp = compose_fields(u, g, chart)?;
    let outer = g.ball(r0);
    let c2 = comp.theta.oscillation_on(&outer);
    let m_at = |radius: f64| {
        comp.m_table
            .eval(radius.min(r0))
            .expect("balls around the base vertex contain it")
    };
    let (r1, chain) = if c2 > 0.0 {
        let chain = shrink_chain(&m_at, r0, c0, c2)?;
        (chain.r1, Some(chain))
    } else {
        (0.5 * r0, None)
    };
    let inner = g.ball(r1);
    let osc_r1 = comp.theta.oscillation_on(&inner);
    if osc_r1 > 2.0 * PI / 3.0 {
        return Err(HarmonicError::ShrinkViolated {
            vertex: None,
            detail: format!("Θ oscillates by {osc_r1} > 2π/3 on the ball of radius {r1}"),
        });
    }
    let theta0 = 0.5 * (comp.theta.sup_on(&inner) + comp.theta.inf_on(&inner));
    let mut center = vec![0.0; u.ambient_dim()];
    center[chart.axes.0] = theta0.cos();
    center[chart.axes.1] = theta0.sin();
    let center = SpherePoint::from_vector(center).expect("unit planar vector");
    let m_r1 = m_at(r1);
    let bound = 0.5 / m_r1;
    let mut min_inner_product = f64::INFINITY;
    for &y in &inner {
        let ip = u.get(y).dot(center.coords());
        if ip < bound {
            return Err(HarmonicError::ShrinkViolated {
                vertex: Some(y),
                detail: format!("(u(y), x0) = {ip} < {bound}"),
            });
        }
        min_inner_product = min_inner_product.min(ip);
    }
    Ok(ShrinkReport {
        r1,
        theta0,
        center,
        radius: bound.acos(),
        m_r1,
        c2,
        osc_r1,
        min_inner_product,
        chain,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::harmonic::harmonic_flow;
    use std::collections::BTreeMap;

    fn equator(t: f64) -> SpherePoint {
        SpherePoint::new(vec![t.cos(), t.sin(), 0.0]).unwrap()
    }

    #[test]
    fn constant_anchor_composition() {
        let g = WeightedGraph::path(5, 0.0, 1.0).unwrap();
        let u = SphereField::constant(5, &SpherePoint::basis(1, 3).unwrap());
        let c = compose_fields(&u, &g, &LongitudeChart::standard()).unwrap();
        assert!(c.theta.values.iter().all(|&t| t == PI / 2.0));
        assert!(c.r.values.iter().all(|&r| r == 1.0));
        assert_eq!(c.m_table.eval(10.0), Some(1.0));
    }

    #[test]
    fn m_table_reports_smallest_radius() {
        let g = WeightedGraph::path(3, 0.0, 1.0).unwrap();
        let half = SpherePoint::from_vector(vec![0.0, 0.5, 0.75f64.sqrt()]).unwrap();
        let u = SphereField::new(vec![half, equator(1.0), equator(2.0)]).unwrap();
        let c = compose_fields(&u, &g, &LongitudeChart::standard()).unwrap();
        assert_eq!(c.m_table.eval(0.1), Some(1.0));
        assert!((c.m_table.eval(0.6).unwrap() - 2.0).abs() < 1e-12);
        let err = compose_fields(
            &SphereField::constant(3, &SpherePoint::basis(2, 2).unwrap()),
            &g,
            &LongitudeChart::standard(),
        );
        assert!(matches!(err, Err(HarmonicError::Chart { vertex: 0, .. })));
    }

    #[test]
    fn weak_residual_examples() {
        let n = 41;
        let g = WeightedGraph::path(n, 0.0, 1.0).unwrap();
        let bc = BTreeMap::from([(0, equator(0.5)), (n - 1, equator(2.5))]);
        let u = harmonic_flow(&g, &bc, 1e-14).unwrap();
        let chart = LongitudeChart::standard();
        let phi: Vec<f64> = (0..n).map(|i| (PI * i as f64 / (n - 1) as f64).sin()).collect();
        let mut phi = phi;
        phi[n - 1] = 0.0;
        let boundary = [0, n - 1];
        for form in [EdgeForm::ArithmeticMean, EdgeForm::GeometricMean, EdgeForm::Chordal] {
            let r = weak_longitude_residual(&u, &g, &phi, &boundary, &chart, form).unwrap();
            assert!(r.abs() < 1e-10, "{form:?}: {r}");
            let zero = weak_longitude_residual(&u, &g, &vec![0.0; n], &boundary, &chart, form).unwrap();
            assert_eq!(zero, 0.0);
        }
        let mut bad = phi.clone();
        bad[0] = 1.0;
        assert!(matches!(
            weak_longitude_residual(&u, &g, &bad, &boundary, &chart, EdgeForm::Chordal),
            Err(HarmonicError::NotCompactlySupported { vertex: 0 })
        ));
    }

    #[test]
    fn meridian_map_has_constant_longitude() {
        let g = WeightedGraph::path(9, 0.0, 1.0).unwrap();
        let pts = (0..9)
            .map(|i| {
                let z = -0.8 + 0.2 * i as f64;
                SpherePoint::from_vector(vec![-(1.0 - z * z).sqrt(), 0.0, z]).unwrap()
            })
            .collect();
        let u = SphereField::new(pts).unwrap();
        let chart = LongitudeChart::standard();
        let phi: Vec<f64> = (0..9).map(|i| if i == 0 || i == 8 { 0.0 } else { i as f64 }).collect();
        let r = weak_longitude_residual(&u, &g, &phi, &[0, 8], &chart, EdgeForm::ArithmeticMean).unwrap();
        assert_eq!(r, 0.0);
        let report = image_shrink_check(&u, &g, 1.0, 1.0, &chart).unwrap();
        assert_eq!(report.osc_r1, 0.0);
        assert!(report.radius < PI / 2.0);
    }

    #[test]
    fn equator_arc_of_two_thirds_pi() {
        let n = 61;
        let g = WeightedGraph::path(n, 0.0, 1.0).unwrap();
        let (a, b) = (PI / 2.0 - PI / 3.0, PI / 2.0 + PI / 3.0);
        let bc = BTreeMap::from([(0, equator(a)), (n - 1, equator(b))]);
        let u = harmonic_flow(&g, &bc, 1e-13).unwrap();
        let chart = LongitudeChart::standard();
        let report = image_shrink_check(&u, &g, 1.0, 1.0, &chart).unwrap();
        assert_eq!(report.m_r1, 1.0);
        assert!(report.min_inner_product >= 0.5 - 1e-12);
        assert!((report.radius - PI / 3.0).abs() < 1e-12);
        assert!(report.r1 <= 0.5);
    }

    #[test]
    fn probe_on_converged_grid_map() {
        use crate::elliptic::Grid2d;
        use rand::SeedableRng;
        let grid = Grid2d::new(12, 12, (0.0, 1.0), (0.0, 1.0)).unwrap();
        let boundary = grid.boundary_vertices();
        let bc = boundary
            .iter()
            .map(|&v| {
                let p = grid.graph.position(v);
                (v, SpherePoint::from_vector(vec![-1.0, p[0] - 0.5, p[1] - 0.5, 0.2]).unwrap())
            })
            .collect();
        let tol = 1e-12;
        let u = harmonic_flow(&grid.graph, &bc, tol).unwrap();
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(3);
        let phi = random_test_function(&grid.graph, &boundary, 4, &mut rng);
        assert!(boundary.iter().all(|&v| phi[v] == 0.0));
        let chart = LongitudeChart::standard();
        let p = weak_residual_probe(&u, &grid.graph, &boundary, &chart, EdgeForm::Chordal, 20, &mut rng).unwrap();
        assert!(p.max_residual <= 100.0 * tol, "{p:?}");
        assert!(is_weakly_harmonic(&grid.graph, &u, &boundary, 10.0 * tol));
        let mut pts = u.points().to_vec();
        pts[grid.index(6, 6)] = SpherePoint::basis(3, 3).unwrap();
        let bumped = SphereField::new(pts).unwrap();
        assert!(!is_weakly_harmonic(&grid.graph, &bumped, &boundary, 1e-3));
    }

    #[test]
    fn constant_map_uses_half_radius() {
        let g = WeightedGraph::path(11, 0.0, 1.0).unwrap();
        let x = SpherePoint::from_vector(vec![-0.3, 0.4, 0.5]).unwrap();
        let u = SphereField::constant(11, &x);
        let report = image_shrink_check(&u, &g, 1.0, 1.0, &LongitudeChart::standard()).unwrap();
        assert_eq!(report.r1, 0.5);
        assert!(report.chain.is_none());
        let r = 0.5f64.sqrt();
        assert!((report.m_r1 - 1.0 / r).abs() < 1e-12);
        assert!((report.radius - (0.5 * r).acos()).abs() < 1e-12);
    }
}
