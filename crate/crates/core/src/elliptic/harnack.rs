//! Harnack ratios and oscillation decay of solved fields.

use super::{solve_divergence, CoefficientField, EllipticError, Grid2d, ScalarField, WeightedGraph};
use crate::linalg::linear_fit;

/// `log sup_{B_{R/2}} f - log inf_{B_{R/2}} f` for `f > 0` on `B_R`.
pub fn harnack_ratio(f: &ScalarField, g: &WeightedGraph, radius: f64) -> Result<f64, EllipticError> {
    let outer = g.ball(radius);
    if let Some(&v) = outer.iter().find(|&&v| !(f.values[v] > 0.0)) {
        return Err(EllipticError::NonPositiveField {
            vertex: v,
            value: f.values[v],
        });
    }
    let inner = g.ball(0.5 * radius);
    if inner.is_empty() {
        return Err(EllipticError::EmptyBall);
    }
    Ok(f.sup_on(&inner).ln() - f.inf_on(&inner).ln())
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OscillationDecay {
    pub osc_half: f64,
    pub osc_full: f64,
    /// `osc_half / osc_full`, or 0 when `osc_full = 0`.
    pub factor: f64,
}

pub fn oscillation_decay(f: &ScalarField, g: &WeightedGraph, radius: f64) -> OscillationDecay {
    let osc_full = f.oscillation_on(&g.ball(radius));
    let osc_half = f.oscillation_on(&g.ball(0.5 * radius));
    let factor = if osc_full > 0.0 { osc_half / osc_full } else { 0.0 };
    OscillationDecay {
        osc_half,
        osc_full,
        factor,
    }
}

/// The rectangle on which `exp(√L x) cos y` solves `f_xx + L f_yy = 0`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SharpnessSetup {
    pub cells: usize,
    pub x_range: (f64, f64),
    pub y_range: (f64, f64),
    pub radius: f64,
}

impl Default for SharpnessSetup {
    fn default() -> Self {
        Self {
            cells: 128,
            x_range: (-1.0, 1.0),
            y_range: (-1.2, 1.2),
            radius: 1.0,
        }
    }
}

impl SharpnessSetup {
    pub fn grid(&self) -> Result<Grid2d, EllipticError> {
        Grid2d::new(self.cells, self.cells, self.x_range, self.y_range)
    }

    /// Solves with `A = diag(1, L)` and boundary data `exp(√L x) cos y`.
    pub fn solve(&self, grid: &Grid2d, l: f64) -> Result<ScalarField, EllipticError> {
        let bc = grid.boundary_from(|x, y| (l.sqrt() * x).exp() * y.cos());
        solve_divergence(&grid.graph, &CoefficientField::anisotropic(&grid.graph, l), &bc)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct HarnackSweep {
    /// `(L, harnack ratio)` pairs.
    pub points: Vec<(f64, f64)>,
    /// Least-squares slope of `log ratio` against `log L`.
    pub exponent: f64,
    /// `max ratio / √L`, an empirical stand-in for the Harnack constant.
    pub c0_estimate: f64,
}

pub fn harnack_sweep(setup: &SharpnessSetup, ls: &[f64]) -> Result<HarnackSweep, EllipticError> {
    let grid = setup.grid()?;
    let mut points = Vec::with_capacity(ls.len());
    for &l in ls {
        let f = setup.solve(&grid, l)?;
        points.push((l, harnack_ratio(&f, &grid.graph, setup.radius)?));
    }
    Ok(summarize(points))
}

fn summarize(points: Vec<(f64, f64)>) -> HarnackSweep {
    let x: Vec<f64> = points.iter().map(|p| p.0.ln()).collect();
    let y: Vec<f64> = points.iter().map(|p| p.1.ln()).collect();
    let exponent = if points.len() >= 2 { linear_fit(&x, &y).0 } else { f64::NAN };
    let c0_estimate = points
        .iter()
        .map(|(l, r)| r / l.sqrt())
        .fold(0.0, f64::max);
    HarnackSweep {
        points,
        exponent,
        c0_estimate,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn constant_field_ratio_is_zero() {
        let grid = Grid2d::new(8, 8, (-1.0, 1.0), (-1.0, 1.0)).unwrap();
        let f = ScalarField::new(vec![3.0; grid.graph.vertex_count()]);
        assert_eq!(harnack_ratio(&f, &grid.graph, 1.0).unwrap(), 0.0);
        let d = oscillation_decay(&f, &grid.graph, 1.0);
        assert_eq!(d.factor, 0.0);
    }

    #[test]
    fn non_positive_fields_are_rejected() {
        let grid = Grid2d::new(8, 8, (-1.0, 1.0), (-1.0, 1.0)).unwrap();
        let f = ScalarField::from_fn(&grid.graph, |p| p[0]);
        assert!(matches!(
            harnack_ratio(&f, &grid.graph, 1.0),
            Err(EllipticError::NonPositiveField { .. })
        ));
    }

    #[test]
    fn linear_data_halves_the_oscillation() {
        let cells = 64;
        let grid = Grid2d::new(cells, cells, (-1.0, 1.0), (-1.0, 1.0)).unwrap();
        let bc = grid.boundary_from(|x, y| x + 0.5 * y);
        let f = solve_divergence(&grid.graph, &CoefficientField::Uniform(1.0), &bc).unwrap();
        let d = oscillation_decay(&f, &grid.graph, 1.0);
        assert!((d.factor - 0.5).abs() <= 2.0 / cells as f64, "{}", d.factor);
    }

    #[test]
    fn coarse_sweep_scales_like_root_l() {
        let setup = SharpnessSetup {
            cells: 32,
            ..SharpnessSetup::default()
        };
        let sweep = harnack_sweep(&setup, &[1.0, 4.0, 16.0, 64.0]).unwrap();
        assert!((0.4..=0.6).contains(&sweep.exponent), "{}", sweep.exponent);
        assert!(sweep.points.windows(2).all(|w| w[0].1 <= w[1].1));
    }
}
