//! Curvature-estimate inputs at one point of a sampled minimal surface, and
//! the growth audit of `sup_{B_R} r⁻¹∘γ` against `log log R`.

use serde::{Deserialize, Serialize};

use super::volume::{induced_metric_graph, lambda_estimate, volume_density_table};
use super::{ImmersedPatch, MinimalError};
use crate::linalg::linear_fit;
use crate::sphere::LongitudeChart;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AuditOptions {
    /// Dyadic radii `R₀ 2^{-k}`, `k < levels`.
    pub levels: usize,
    /// `R₁ = shrink_ratio · R₀` for the power chain.
    pub shrink_ratio: f64,
    /// Skip the Neumann eigenvalue computations.
    pub skip_lambda: bool,
}

impl Default for AuditOptions {
    fn default() -> Self {
        Self {
            levels: 4,
            shrink_ratio: 0.5,
            skip_lambda: false,
        }
    }
}

/// Empirical check of `∫_{B_{R₁/2}} |B|^{2p} h^{2p} ≤ C R₁^{-2p} V(R₁/2) sup h^{2p}`
/// with `h = (γ, x₀)⁻¹`; `fitted_constant` is the smallest `C` that works.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PowerChain {
    pub p: u32,
    pub r1: f64,
    pub theta0: f64,
    pub mean_bh: f64,
    pub sup_h: f64,
    pub fitted_constant: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AuditReport {
    pub m: usize,
    pub y0: usize,
    pub r0: f64,
    /// `(R, 𝒟(y₀, R))`.
    pub d_table: Vec<(f64, f64)>,
    pub d_nondecreasing: bool,
    pub doubling_holds: bool,
    /// `None` when skipped.
    pub lambda_r0: Option<f64>,
    /// `(R, sup_{B_R} r⁻¹∘γ)`.
    pub m_table: Vec<(f64, f64)>,
    pub b_at_origin: f64,
    /// `|B|(y₀) · R₀`.
    pub scale_invariant_product: f64,
    /// `(R, M(R) / log log R)` for the radii above `e`.
    pub growth_curve: Vec<(f64, f64)>,
    /// `None` when `γ` leaves the open hemisphere around `x₀` on `B_{R₁}`.
    pub power_chain: Option<PowerChain>,
}

impl AuditReport {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("plain data")
    }

    pub fn from_json(text: &str) -> Result<Self, MinimalError> {
        serde_json::from_str(text).map_err(|e| MinimalError::Parse {
            line: e.line(),
            message: e.to_string(),
        })
    }
}

/// The Gauss image is read through the longitude of the last two
/// coordinates, `π(x) = (x₂, x₃)`.
pub fn gauss_chart() -> LongitudeChart {
    LongitudeChart::standard().with_axes(1, 2)
}

pub fn curvature_estimate_audit(
    patch: &ImmersedPatch,
    y0: usize,
    r0: f64,
    opts: &AuditOptions,
) -> Result<AuditReport, MinimalError> {
    let geo = patch.geometry();
    let origin = geo.sample(y0).ok_or(MinimalError::InsufficientStencil(y0))?;
    let centre = origin.position;
    let b_at_origin = origin.norm_b_sq.sqrt();
    let chart = gauss_chart();
    let dist = |s: usize| (patch.point(s).unwrap() - centre).norm();
    let level1 = geo.level1_samples();

    // Longitude and r of the Gauss map on B_{R₀}.
    let mut lifted = Vec::new();
    for &s in &level1 {
        let d = dist(s);
        if d < r0 {
            let n = geo.sample(s).unwrap().normal;
            let l = chart
                .lift_coords(n.as_slice())
                .map_err(|source| MinimalError::GaussImageOutOfChart { sample: s, source })?;
            lifted.push((d, s, l.theta, l.r));
        }
    }
    lifted.sort_by(|a, b| a.0.total_cmp(&b.0));

    let table = volume_density_table(patch, y0, r0, opts.levels)?;
    let m_table: Vec<(f64, f64)> = table
        .radii
        .iter()
        .map(|&r| {
            let sup = lifted.iter().take_while(|l| l.0 < r).map(|l| 1.0 / l.3).fold(0.0, f64::max);
            (r, sup)
        })
        .collect();
    let growth_curve = m_table
        .iter()
        .filter(|(r, _)| *r > std::f64::consts::E)
        .map(|&(r, m)| (r, m / r.ln().ln()))
        .collect();
    let lambda_r0 = if opts.skip_lambda {
        None
    } else {
        let (g, _) = induced_metric_graph(patch, y0)?;
        Some(lambda_estimate(&g, &table.radii)?.lambda)
    };

    let r1 = opts.shrink_ratio * r0;
    let power_chain = power_chain(&geo, &lifted, r1);
    Ok(AuditReport {
        m: 2,
        y0,
        r0,
        d_table: table.radii.iter().copied().zip(table.densities.iter().copied()).collect(),
        d_nondecreasing: table.nondecreasing(1e-10),
        doubling_holds: table.doubling_holds(),
        lambda_r0,
        m_table,
        b_at_origin,
        scale_invariant_product: b_at_origin * r0,
        growth_curve,
        power_chain,
    })
}

fn power_chain(geo: &super::PatchGeometry, lifted: &[(f64, usize, f64, f64)], r1: f64) -> Option<PowerChain> {
    let inner: Vec<_> = lifted.iter().filter(|l| l.0 < r1).collect();
    if inner.is_empty() {
        return None;
    }
    let lo = inner.iter().map(|l| l.2).fold(f64::INFINITY, f64::min);
    let hi = inner.iter().map(|l| l.2).fold(f64::NEG_INFINITY, f64::max);
    let theta0 = 0.5 * (lo + hi);
    let x0 = nalgebra::Vector3::new(0.0, theta0.cos(), theta0.sin());
    let p = 3u32;
    let mut sup_h: f64 = 0.0;
    let (mut num, mut den) = (0.0, 0.0);
    for l in &inner {
        let g = geo.sample(l.1).unwrap();
        let f = g.normal.dot(&x0);
        if !(f > 0.0) {
            return None;
        }
        let h2p = f.powi(-2 * p as i32);
        sup_h = sup_h.max(h2p);
        if l.0 < 0.5 * r1 {
            num += g.area_element * g.norm_b_sq.powi(p as i32) * h2p;
            den += g.area_element;
        }
    }
    if den == 0.0 {
        return None;
    }
    let mean_bh = num / den;
    Some(PowerChain {
        p,
        r1,
        theta0,
        mean_bh,
        sup_h,
        fitted_constant: mean_bh * r1.powi(2 * p as i32) / sup_h,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum GrowthVerdict {
    Satisfied,
    Violated,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GrowthAudit {
    /// `(R, M(R) / log log R)`.
    pub ratios: Vec<(f64, f64)>,
    /// Intercept of the ratio fitted against `1 / log log R`.
    pub limit: f64,
    /// Slope of the ratio against `log log R` over the larger half of the
    /// radii.
    pub tail_slope: f64,
    pub epsilon: f64,
    pub verdict: GrowthVerdict,
    /// `(R, ∫_{R₋}^{R} t⁻¹ exp(-C₀ M(t)) dt)` with `M` interpolated linearly
    /// in `log t`.
    pub partial_integrals: Vec<(f64, f64)>,
    /// Every partial integral is at least `log log R - log log R₋`.
    pub divergence_bound_holds: bool,
}

/// `table` holds `(R, M(R))` with `R > e`, increasing in `R`, spanning at
/// least four dyadic scales; `R₋` is the first radius.
pub fn bernstein_growth_audit(table: &[(f64, f64)], epsilon: f64, c0: f64) -> Result<GrowthAudit, MinimalError> {
    let valid = table.len() >= 4
        && table.windows(2).all(|w| w[1].0 > w[0].0)
        && table[0].0 > std::f64::consts::E
        && table[table.len() - 1].0 >= 8.0 * table[0].0;
    if !valid {
        return Err(MinimalError::InsufficientScales(table.len()));
    }
    let ll: Vec<f64> = table.iter().map(|(r, _)| r.ln().ln()).collect();
    let ratios: Vec<(f64, f64)> = table.iter().zip(&ll).map(|(&(r, m), l)| (r, m / l)).collect();
    let inv: Vec<f64> = ll.iter().map(|l| 1.0 / l).collect();
    let q: Vec<f64> = ratios.iter().map(|r| r.1).collect();
    let (_, limit) = linear_fit(&inv, &q);
    let half = table.len() / 2;
    let (tail_slope, _) = linear_fit(&ll[half..], &q[half..]);
    let scale = q.iter().fold(1.0f64, |m, v| m.max(v.abs()));
    let satisfied = limit <= epsilon * (1.0 + 1e-9) + 1e-12 && tail_slope <= 1e-9 * scale;

    let r_minus = table[0].0;
    let mut partial_integrals = vec![(r_minus, 0.0)];
    let mut acc = 0.0;
    for w in table.windows(2) {
        let (s0, s1) = (w[0].0.ln(), w[1].0.ln());
        let (m0, m1) = (w[0].1, w[1].1);
        let integrand = |s: f64| (-c0 * (m0 + (m1 - m0) * (s - s0) / (s1 - s0))).exp();
        acc += simpson(integrand, s0, s1, 64);
        partial_integrals.push((w[1].0, acc));
    }
    let base = r_minus.ln().ln();
    let divergence_bound_holds = partial_integrals
        .iter()
        .all(|&(r, i)| i >= r.ln().ln() - base - 1e-9);
    Ok(GrowthAudit {
        ratios,
        limit,
        tail_slope,
        epsilon,
        verdict: if satisfied { GrowthVerdict::Satisfied } else { GrowthVerdict::Violated },
        partial_integrals,
        divergence_bound_holds,
    })
}

/// `∫_{R₋}^{R} t⁻¹ exp(-C₀ M(t)) dt` by composite Simpson in `s = log t`.
pub fn growth_integral(m: &dyn Fn(f64) -> f64, c0: f64, r_minus: f64, r: f64, panels: usize) -> f64 {
    simpson(|s| (-c0 * m(s.exp())).exp(), r_minus.ln(), r.ln(), panels)
}

fn simpson(f: impl Fn(f64) -> f64, a: f64, b: f64, panels: usize) -> f64 {
    let n = 2 * panels.max(1);
    let h = (b - a) / n as f64;
    let mut sum = f(a) + f(b);
    for k in 1..n {
        sum += f(a + k as f64 * h) * if k % 2 == 1 { 4.0 } else { 2.0 };
    }
    sum * h / 3.0
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::minimal::MinimalGraph;
    use std::f64::consts::E;

    #[test]
    fn loglog_integral_oracle() {
        let c0 = 1.7;
        let m = move |t: f64| t.ln().ln() / c0;
        let r = E.powf(E * E);
        let i = growth_integral(&m, c0, E, r, 2000);
        assert!((i - 2.0).abs() < 1e-10, "{i}");
    }

    fn dyadic(mut f: impl FnMut(f64) -> f64) -> Vec<(f64, f64)> {
        (2..=60).map(|k| 2f64.powi(k)).map(|r| (r, f(r))).collect()
    }

    #[test]
    fn growth_verdicts() {
        let c0 = 1.0;
        let constant = bernstein_growth_audit(&dyadic(|_| 1.0), 1.0, c0).unwrap();
        assert_eq!(constant.verdict, GrowthVerdict::Satisfied);
        assert!(constant.limit.abs() < 1e-9);
        let critical = bernstein_growth_audit(&dyadic(|r| r.ln().ln()), 1.0, c0).unwrap();
        assert_eq!(critical.verdict, GrowthVerdict::Satisfied);
        assert!(critical.divergence_bound_holds);
        let fast = bernstein_growth_audit(&dyadic(|r| r.ln().sqrt()), 1.0, c0).unwrap();
        assert_eq!(fast.verdict, GrowthVerdict::Violated);
        let fast = bernstein_growth_audit(&dyadic(|r| r.ln().sqrt()), 5.0, c0).unwrap();
        assert_eq!(fast.verdict, GrowthVerdict::Violated);
        assert!(matches!(
            bernstein_growth_audit(&dyadic(|_| 1.0)[..3], 1.0, c0),
            Err(MinimalError::InsufficientScales(3))
        ));
    }

    #[test]
    fn affine_audit() {
        let mg = MinimalGraph::square(-1.0, 1.0, 32, |x, y| 0.3 * x + 0.1 * y).unwrap();
        let patch = ImmersedPatch::from_graph(&mg);
        let report = curvature_estimate_audit(&patch, mg.index(16, 16), 0.5, &AuditOptions::default()).unwrap();
        assert!(report.scale_invariant_product < 1e-12);
        assert!(report.d_nondecreasing && report.doubling_holds);
        let back = AuditReport::from_json(&report.to_json()).unwrap();
        assert_eq!(back, report);
    }
}
