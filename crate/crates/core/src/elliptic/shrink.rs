//! Radius arithmetic for image shrinking and the constants of the local
//! Sobolev / doubling / Poincaré condition.

use std::f64::consts::{LN_2, PI};

use super::EllipticError;

/// Depth beyond which the dyadic ledger is not materialized.
pub const MAX_LEDGER_DEPTH: usize = 1 << 20;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DyadicStep {
    pub j: usize,
    pub radius: f64,
    pub m_value: f64,
    /// `log(1 - exp(-C₀ M(2^{-j} R₀)))`.
    pub log_factor: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ShrinkChain {
    pub c1: f64,
    pub big_c1: f64,
    pub r0: f64,
    pub r1: f64,
    /// `k` with `2^{-k-1} R₀ < R₁ ≤ 2^{-k} R₀`.
    pub depth: usize,
    pub ledger: Vec<DyadicStep>,
    pub ledger_sum: f64,
    /// `-log(3 c₂ / 2π)`; the ledger sum never exceeds it.
    pub target: f64,
}

impl ShrinkChain {
    pub fn ratio(&self) -> f64 {
        self.r1 / self.r0
    }

    pub fn guarantee_holds(&self) -> bool {
        self.ledger_sum <= self.target + 1e-12 * self.target.abs().max(1.0)
    }
}

/// `C₁ = log 2 · log(3c₂/2π) / c₁`, clamped at 0 so that `R₁ ≤ R₀/2`.
pub fn shrink_constant(c1: f64, c2: f64) -> f64 {
    (LN_2 * (3.0 * c2 / (2.0 * PI)).ln() / c1).max(0.0)
}

/// `R₁ = ½ exp(-C₁ exp(C₀ M(R₀))) R₀` with `c₁ = 1`, plus the dyadic ledger
/// `Σ_{j<k} log(1 - exp(-C₀ M(2^{-j} R₀)))`.
pub fn shrink_chain(
    m_func: &dyn Fn(f64) -> f64,
    r0: f64,
    c0: f64,
    c2: f64,
) -> Result<ShrinkChain, EllipticError> {
    if !(c2 > 0.0) || !(c0 > 0.0) || !(r0 > 0.0) {
        return Err(EllipticError::InvalidRange(format!(
            "need R0 > 0, C0 > 0, c2 > 0 (got {r0}, {c0}, {c2})"
        )));
    }
    if c2 > 2.0 * PI {
        return Err(EllipticError::InvalidRange(format!("c2 = {c2} exceeds 2π")));
    }
    // -log(1 - t) >= t on (0, 1), so c₁ = 1 is admissible for every C₀.
    let c1 = 1.0;
    let big_c1 = shrink_constant(c1, c2);
    let m0 = m_func(r0);
    let growth = big_c1 * (c0 * m0).exp();
    let r1 = 0.5 * (-growth).exp() * r0;
    // log2(R₀/R₁) = 1 + growth / ln 2, computed without underflow.
    let log2_ratio = 1.0 + growth / LN_2;
    if !log2_ratio.is_finite() || log2_ratio >= MAX_LEDGER_DEPTH as f64 {
        return Err(EllipticError::InvalidRange(format!(
            "shrinking depth {log2_ratio:e} is beyond {MAX_LEDGER_DEPTH} dyadic steps"
        )));
    }
    let depth = log2_ratio.floor() as usize;
    let ledger: Vec<DyadicStep> = (0..depth)
        .map(|j| {
            let radius = r0 * 0.5f64.powi(j as i32);
            let m_value = m_func(radius);
            DyadicStep {
                j,
                radius,
                m_value,
                log_factor: (-(-c0 * m_value).exp()).ln_1p(),
            }
        })
        .collect();
    let ledger_sum = ledger.iter().map(|s| s.log_factor).sum();
    Ok(ShrinkChain {
        c1,
        big_c1,
        r0,
        r1,
        depth,
        ledger,
        ledger_sum,
        target: -(3.0 * c2 / (2.0 * PI)).ln(),
    })
}

/// Volume of the unit ball in `R^m`.
pub fn unit_ball_volume(m: usize) -> f64 {
    match m {
        0 => 1.0,
        1 => 2.0,
        _ => 2.0 * PI / m as f64 * unit_ball_volume(m - 2),
    }
}

/// Constants of the local Sobolev / doubling / Poincaré condition, plus the
/// image-shrinking constants once known.
#[derive(Debug, Clone, PartialEq)]
pub struct GeometryConstants {
    pub m: usize,
    pub nu: f64,
    pub k1: f64,
    pub k2: f64,
    pub k3: f64,
    pub omega_m: f64,
    pub sobolev_constant: f64,
    /// True when the Sobolev constant is the placeholder 1.
    pub sobolev_constant_is_placeholder: bool,
    pub c0: Option<f64>,
    pub c1: Option<f64>,
    pub c2: Option<f64>,
    pub big_c1: Option<f64>,
    /// `(R, M(R))` samples, increasing in `R`.
    pub m_table: Vec<(f64, f64)>,
}

/// Sobolev constant used when none is supplied.
pub const PLACEHOLDER_SOBOLEV_CONSTANT: f64 = 1.0;

/// `ν = 4` for `m = 2` and `m/(m-2)` otherwise;
/// `K₁ = 2ν(m-1)/m · 𝒟^{1/m} ω_m^{1/m} C(m)`, `K₂ = 2^m 𝒟`, `K₃ = 9Λ/16`.
pub fn dsvp_constants(
    m: usize,
    volume_density: f64,
    lambda: f64,
    sobolev: Option<f64>,
) -> Result<GeometryConstants, EllipticError> {
    if m < 2 {
        return Err(EllipticError::InvalidDimension(m));
    }
    if !(volume_density >= 1.0) || !(lambda > 0.0) {
        return Err(EllipticError::InvalidRange(format!(
            "need volume density >= 1 and Λ > 0 (got {volume_density}, {lambda})"
        )));
    }
    let c_m = sobolev.unwrap_or(PLACEHOLDER_SOBOLEV_CONSTANT);
    if !(c_m > 0.0) {
        return Err(EllipticError::InvalidRange(format!("Sobolev constant {c_m} must be positive")));
    }
    let mf = m as f64;
    let nu = if m == 2 { 4.0 } else { mf / (mf - 2.0) };
    let omega_m = unit_ball_volume(m);
    Ok(GeometryConstants {
        m,
        nu,
        k1: 2.0 * nu * (mf - 1.0) / mf * volume_density.powf(1.0 / mf) * omega_m.powf(1.0 / mf) * c_m,
        k2: 2f64.powi(m as i32) * volume_density,
        k3: 9.0 / 16.0 * lambda,
        omega_m,
        sobolev_constant: c_m,
        sobolev_constant_is_placeholder: sobolev.is_none(),
        c0: None,
        c1: None,
        c2: None,
        big_c1: None,
        m_table: Vec::new(),
    })
}

impl GeometryConstants {
    pub fn with_shrink(mut self, c0: f64, c2: f64, chain: &ShrinkChain) -> Self {
        self.c0 = Some(c0);
        self.c1 = Some(chain.c1);
        self.c2 = Some(c2);
        self.big_c1 = Some(chain.big_c1);
        self
    }

    pub fn with_m_table(mut self, table: Vec<(f64, f64)>) -> Self {
        self.m_table = table;
        self
    }
}
