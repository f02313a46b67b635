//! Flat `key = value` experiment configuration.
//!
//! ```text
//! # comment
//! kind = hessians, shrink-chain
//! seed = 7
//! hessians.samples = 1000
//! shrink.c2 = 2pi
//! ```
//!
//! Keys are namespaced by experiment; unknown keys and repeated keys are
//! errors. Reals accept `pi` multiples (`2pi`, `pi/6`).

use std::fmt::{self, Write as _};
use std::path::PathBuf;
use std::str::FromStr;

use sha2::{Digest, Sha256};

use crate::harmonic::EdgeForm;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum ConfigError {
    #[error("line {line}: expected `key = value`")]
    Syntax { line: usize },
    #[error("line {line}: unknown key `{key}`")]
    UnknownKey { line: usize, key: String },
    #[error("line {line}: key `{key}` given twice")]
    DuplicateKey { line: usize, key: String },
    #[error("{key}: invalid value `{value}`: {reason}")]
    InvalidValue { key: String, value: String, reason: String },
    #[error("missing key `{0}`")]
    MissingKey(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum ExperimentKind {
    Hessians,
    HarnackSweep,
    ShrinkChain,
    HarmonicMap,
    MinimalGraph,
    BernsteinAudit,
    AppendixGeodesics,
}

impl ExperimentKind {
    pub const ALL: [ExperimentKind; 7] = [
        ExperimentKind::Hessians,
        ExperimentKind::HarnackSweep,
        ExperimentKind::ShrinkChain,
        ExperimentKind::HarmonicMap,
        ExperimentKind::MinimalGraph,
        ExperimentKind::BernsteinAudit,
        ExperimentKind::AppendixGeodesics,
    ];

    pub fn name(self) -> &'static str {
        match self {
            ExperimentKind::Hessians => "hessians",
            ExperimentKind::HarnackSweep => "harnack-sweep",
            ExperimentKind::ShrinkChain => "shrink-chain",
            ExperimentKind::HarmonicMap => "harmonic-map",
            ExperimentKind::MinimalGraph => "minimal-graph",
            ExperimentKind::BernsteinAudit => "bernstein-audit",
            ExperimentKind::AppendixGeodesics => "appendix-geodesics",
        }
    }
}

impl fmt::Display for ExperimentKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for ExperimentKind {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        Self::ALL
            .into_iter()
            .find(|k| k.name() == s)
            .ok_or_else(|| format!("expected one of {}", Self::ALL.map(|k| k.name()).join(", ")))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct HessianParams {
    /// Sphere dimensions `n` of `S^n`.
    pub dims: Vec<usize>,
    pub samples: usize,
    pub fd_step: f64,
    pub tol: f64,
    /// Samples with `r` or `sqrt(1 - r²)` below this are redrawn.
    pub min_radius: f64,
    pub cap_samples: usize,
    pub cap_radius: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct HarnackParams {
    pub cells: usize,
    pub l_values: Vec<f64>,
    pub path_vertices: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ShrinkParams {
    pub c0: f64,
    pub c2: f64,
    pub m: f64,
    pub r0: f64,
    pub expected_ratio: f64,
    pub ratio_tol: f64,
    /// Side of the `(C₀, M)` monotonicity grid.
    pub grid: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct HarmonicParams {
    pub cells: usize,
    /// Dimension `n` of the target `S^n`.
    pub sphere_dim: usize,
    pub flow_tol: f64,
    pub trials: usize,
    pub edge_forms: Vec<EdgeForm>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct MinimalParams {
    /// Finest spacing; the solver also runs at `2h`.
    pub h: f64,
    pub audit_r0: f64,
    /// `C` in the `C h` bounds of the identity suite.
    pub identity_constant: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct BernsteinParams {
    pub c0: f64,
    pub epsilon: f64,
    pub panels: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct AppendixParams {
    pub samples: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentConfig {
    pub kinds: Vec<ExperimentKind>,
    pub seed: u64,
    pub tolerance_scale: f64,
    /// Not part of the canonical text or its hash.
    pub out: Option<PathBuf>,
    pub hessians: HessianParams,
    pub harnack: HarnackParams,
    pub shrink: ShrinkParams,
    pub harmonic: HarmonicParams,
    pub minimal: MinimalParams,
    pub bernstein: BernsteinParams,
    pub appendix: AppendixParams,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        Self {
            kinds: ExperimentKind::ALL.to_vec(),
            seed: 0,
            tolerance_scale: 1.0,
            out: None,
            hessians: HessianParams {
                dims: vec![2, 4],
                samples: 1000,
                fd_step: 1e-3,
                tol: 1e-6,
                min_radius: 0.2,
                cap_samples: 200,
                cap_radius: std::f64::consts::PI / 6.0,
            },
            harnack: HarnackParams {
                cells: 128,
                l_values: vec![1.0, 4.0, 16.0, 64.0],
                path_vertices: 400,
            },
            shrink: ShrinkParams {
                c0: 1.0,
                c2: 2.0 * std::f64::consts::PI,
                m: 1.0,
                r0: 1.0,
                expected_ratio: 0.0631,
                ratio_tol: 1e-4,
                grid: 10,
            },
            harmonic: HarmonicParams {
                cells: 64,
                sphere_dim: 3,
                flow_tol: 1e-10,
                trials: 100,
                edge_forms: vec![EdgeForm::ArithmeticMean, EdgeForm::Chordal],
            },
            minimal: MinimalParams {
                h: 0.01,
                audit_r0: 0.3,
                identity_constant: 20.0,
            },
            bernstein: BernsteinParams {
                c0: 1.0,
                epsilon: 1.0,
                panels: 2000,
            },
            appendix: AppendixParams { samples: 100_000 },
        }
    }
}

fn edge_form_name(f: EdgeForm) -> &'static str {
    match f {
        EdgeForm::ArithmeticMean => "arithmetic",
        EdgeForm::GeometricMean => "geometric",
        EdgeForm::Chordal => "chordal",
    }
}

fn parse_edge_form(s: &str) -> Result<EdgeForm, String> {
    match s {
        "arithmetic" => Ok(EdgeForm::ArithmeticMean),
        "geometric" => Ok(EdgeForm::GeometricMean),
        "chordal" => Ok(EdgeForm::Chordal),
        _ => Err("expected arithmetic, geometric or chordal".into()),
    }
}

/// `1.5`, `2pi`, `pi`, `pi/6`, `0.5pi/3`.
pub fn parse_real(s: &str) -> Result<f64, String> {
    let s = s.trim();
    let num = |t: &str| t.trim().parse::<f64>().map_err(|e| e.to_string());
    let value = if let Some(pos) = s.find("pi") {
        let coef = match s[..pos].trim() {
            "" => 1.0,
            c => num(c.trim_end_matches('*'))?,
        };
        let rest = s[pos + 2..].trim();
        let denom = match rest.strip_prefix('/') {
            Some(d) => num(d)?,
            None if rest.is_empty() => 1.0,
            None => return Err(format!("unexpected `{rest}`")),
        };
        coef * std::f64::consts::PI / denom
    } else {
        num(s)?
    };
    if value.is_finite() {
        Ok(value)
    } else {
        Err("not finite".into())
    }
}

fn list<T>(s: &str, item: impl Fn(&str) -> Result<T, String>) -> Result<Vec<T>, String> {
    let items: Vec<T> = s.split(',').map(|t| item(t.trim())).collect::<Result<_, _>>()?;
    if items.is_empty() {
        return Err("empty list".into());
    }
    Ok(items)
}

fn int<T: FromStr>(s: &str) -> Result<T, String>
where
    T::Err: fmt::Display,
{
    s.trim().parse::<T>().map_err(|e| e.to_string())
}

fn join<T>(items: &[T], f: impl Fn(&T) -> String) -> String {
    items.iter().map(f).collect::<Vec<_>>().join(", ")
}

/// Shortest text that parses back to the same `f64`.
fn real(v: f64) -> String {
    format!("{v:?}")
}

const KEYS: &[&str] = &[
    "kind",
    "seed",
    "tolerance_scale",
    "out",
    "hessians.dims",
    "hessians.samples",
    "hessians.fd_step",
    "hessians.tol",
    "hessians.min_radius",
    "hessians.cap_samples",
    "hessians.cap_radius",
    "harnack.cells",
    "harnack.l_values",
    "harnack.path_vertices",
    "shrink.c0",
    "shrink.c2",
    "shrink.m",
    "shrink.r0",
    "shrink.expected_ratio",
    "shrink.ratio_tol",
    "shrink.grid",
    "harmonic.cells",
    "harmonic.sphere_dim",
    "harmonic.flow_tol",
    "harmonic.trials",
    "harmonic.edge_forms",
    "minimal.h",
    "minimal.audit_r0",
    "minimal.identity_constant",
    "bernstein.c0",
    "bernstein.epsilon",
    "bernstein.panels",
    "appendix.samples",
];

impl ExperimentConfig {
    pub fn parse(text: &str) -> Result<Self, ConfigError> {
        let mut cfg = Self::default();
        let mut seen = std::collections::BTreeSet::new();
        for (i, raw) in text.lines().enumerate() {
            let line = i + 1;
            let body = raw.split('#').next().unwrap_or("").trim();
            if body.is_empty() {
                continue;
            }
            let (key, value) = body.split_once('=').ok_or(ConfigError::Syntax { line })?;
            let (key, value) = (key.trim(), value.trim());
            if !KEYS.contains(&key) {
                return Err(ConfigError::UnknownKey {
                    line,
                    key: key.to_string(),
                });
            }
            if !seen.insert(key.to_string()) {
                return Err(ConfigError::DuplicateKey {
                    line,
                    key: key.to_string(),
                });
            }
            cfg.set(key, value).map_err(|reason| ConfigError::InvalidValue {
                key: key.to_string(),
                value: value.to_string(),
                reason,
            })?;
        }
        if !seen.contains("kind") {
            return Err(ConfigError::MissingKey("kind".into()));
        }
        cfg.validate()?;
        Ok(cfg)
    }

    fn set(&mut self, key: &str, v: &str) -> Result<(), String> {
        match key {
            "kind" => {
                let mut kinds = list(v, |t| t.parse::<ExperimentKind>())?;
                kinds.sort();
                kinds.dedup();
                self.kinds = kinds;
            }
            "seed" => self.seed = int(v)?,
            "tolerance_scale" => self.tolerance_scale = parse_real(v)?,
            "out" => self.out = Some(PathBuf::from(v)),
            "hessians.dims" => self.hessians.dims = list(v, int)?,
            "hessians.samples" => self.hessians.samples = int(v)?,
            "hessians.fd_step" => self.hessians.fd_step = parse_real(v)?,
            "hessians.tol" => self.hessians.tol = parse_real(v)?,
            "hessians.min_radius" => self.hessians.min_radius = parse_real(v)?,
            "hessians.cap_samples" => self.hessians.cap_samples = int(v)?,
            "hessians.cap_radius" => self.hessians.cap_radius = parse_real(v)?,
            "harnack.cells" => self.harnack.cells = int(v)?,
            "harnack.l_values" => self.harnack.l_values = list(v, parse_real)?,
            "harnack.path_vertices" => self.harnack.path_vertices = int(v)?,
            "shrink.c0" => self.shrink.c0 = parse_real(v)?,
            "shrink.c2" => self.shrink.c2 = parse_real(v)?,
            "shrink.m" => self.shrink.m = parse_real(v)?,
            "shrink.r0" => self.shrink.r0 = parse_real(v)?,
            "shrink.expected_ratio" => self.shrink.expected_ratio = parse_real(v)?,
            "shrink.ratio_tol" => self.shrink.ratio_tol = parse_real(v)?,
            "shrink.grid" => self.shrink.grid = int(v)?,
            "harmonic.cells" => self.harmonic.cells = int(v)?,
            "harmonic.sphere_dim" => self.harmonic.sphere_dim = int(v)?,
            "harmonic.flow_tol" => self.harmonic.flow_tol = parse_real(v)?,
            "harmonic.trials" => self.harmonic.trials = int(v)?,
            "harmonic.edge_forms" => self.harmonic.edge_forms = list(v, parse_edge_form)?,
            "minimal.h" => self.minimal.h = parse_real(v)?,
            "minimal.audit_r0" => self.minimal.audit_r0 = parse_real(v)?,
            "minimal.identity_constant" => self.minimal.identity_constant = parse_real(v)?,
            "bernstein.c0" => self.bernstein.c0 = parse_real(v)?,
            "bernstein.epsilon" => self.bernstein.epsilon = parse_real(v)?,
            "bernstein.panels" => self.bernstein.panels = int(v)?,
            "appendix.samples" => self.appendix.samples = int(v)?,
            _ => unreachable!("key list and setter agree"),
        }
        Ok(())
    }

    fn validate(&self) -> Result<(), ConfigError> {
        let bad = |key: &str, value: String, reason: &str| {
            Err(ConfigError::InvalidValue {
                key: key.into(),
                value,
                reason: reason.into(),
            })
        };
        if !(self.tolerance_scale > 0.0) {
            return bad("tolerance_scale", real(self.tolerance_scale), "must be positive");
        }
        if let Some(&n) = self.hessians.dims.iter().find(|&&n| n < 2) {
            return bad("hessians.dims", n.to_string(), "sphere dimension must be at least 2");
        }
        if !(self.hessians.min_radius > 0.0 && self.hessians.min_radius < 1.0) {
            return bad("hessians.min_radius", real(self.hessians.min_radius), "must lie in (0, 1)");
        }
        if !(self.hessians.cap_radius > 0.0 && self.hessians.cap_radius < std::f64::consts::FRAC_PI_2) {
            return bad("hessians.cap_radius", real(self.hessians.cap_radius), "must lie in (0, π/2)");
        }
        if self.harnack.cells < 4 {
            return bad("harnack.cells", self.harnack.cells.to_string(), "need at least 4 cells");
        }
        if self.harnack.l_values.iter().any(|&l| !(l > 0.0)) {
            return bad("harnack.l_values", join(&self.harnack.l_values, |l| real(*l)), "must be positive");
        }
        if self.harnack.path_vertices < 3 {
            return bad("harnack.path_vertices", self.harnack.path_vertices.to_string(), "need at least 3");
        }
        if self.shrink.grid < 2 {
            return bad("shrink.grid", self.shrink.grid.to_string(), "need at least 2");
        }
        if self.harmonic.cells < 4 {
            return bad("harmonic.cells", self.harmonic.cells.to_string(), "need at least 4 cells");
        }
        if self.harmonic.sphere_dim < 2 {
            return bad("harmonic.sphere_dim", self.harmonic.sphere_dim.to_string(), "must be at least 2");
        }
        if !(self.minimal.h > 0.0 && self.minimal.h <= 0.05) {
            return bad("minimal.h", real(self.minimal.h), "must lie in (0, 0.05]");
        }
        if self.bernstein.panels == 0 {
            return bad("bernstein.panels", "0".into(), "must be positive");
        }
        Ok(())
    }

    /// Every setting except `out`, one per line, in a fixed order.
    pub fn canonical_text(&self) -> String {
        let mut s = String::new();
        let mut put = |k: &str, v: String| writeln!(s, "{k} = {v}").unwrap();
        put("kind", join(&self.kinds, |k| k.name().to_string()));
        put("seed", self.seed.to_string());
        put("tolerance_scale", real(self.tolerance_scale));
        let h = &self.hessians;
        put("hessians.dims", join(&h.dims, |d| d.to_string()));
        put("hessians.samples", h.samples.to_string());
        put("hessians.fd_step", real(h.fd_step));
        put("hessians.tol", real(h.tol));
        put("hessians.min_radius", real(h.min_radius));
        put("hessians.cap_samples", h.cap_samples.to_string());
        put("hessians.cap_radius", real(h.cap_radius));
        let h = &self.harnack;
        put("harnack.cells", h.cells.to_string());
        put("harnack.l_values", join(&h.l_values, |l| real(*l)));
        put("harnack.path_vertices", h.path_vertices.to_string());
        let s2 = &self.shrink;
        put("shrink.c0", real(s2.c0));
        put("shrink.c2", real(s2.c2));
        put("shrink.m", real(s2.m));
        put("shrink.r0", real(s2.r0));
        put("shrink.expected_ratio", real(s2.expected_ratio));
        put("shrink.ratio_tol", real(s2.ratio_tol));
        put("shrink.grid", s2.grid.to_string());
        let h = &self.harmonic;
        put("harmonic.cells", h.cells.to_string());
        put("harmonic.sphere_dim", h.sphere_dim.to_string());
        put("harmonic.flow_tol", real(h.flow_tol));
        put("harmonic.trials", h.trials.to_string());
        put("harmonic.edge_forms", join(&h.edge_forms, |f| edge_form_name(*f).to_string()));
        let m = &self.minimal;
        put("minimal.h", real(m.h));
        put("minimal.audit_r0", real(m.audit_r0));
        put("minimal.identity_constant", real(m.identity_constant));
        let b = &self.bernstein;
        put("bernstein.c0", real(b.c0));
        put("bernstein.epsilon", real(b.epsilon));
        put("bernstein.panels", b.panels.to_string());
        put("appendix.samples", self.appendix.samples.to_string());
        s
    }

    /// SHA-256 of [`Self::canonical_text`], hex encoded.
    pub fn hash(&self) -> String {
        Sha256::digest(self.canonical_text().as_bytes())
            .iter()
            .map(|b| format!("{b:02x}"))
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn reals_with_pi() {
        assert_eq!(parse_real("2pi").unwrap(), 2.0 * std::f64::consts::PI);
        assert_eq!(parse_real("pi/6").unwrap(), std::f64::consts::PI / 6.0);
        assert_eq!(parse_real(" 1e-3 ").unwrap(), 1e-3);
        assert!(parse_real("pix").is_err());
        assert!(parse_real("inf").is_err());
    }

    #[test]
    fn minimal_file() {
        let cfg = ExperimentConfig::parse("# demo\nkind = shrink-chain\nseed = 7\nshrink.c2 = 2pi  # full circle\n").unwrap();
        assert_eq!(cfg.kinds, vec![ExperimentKind::ShrinkChain]);
        assert_eq!(cfg.seed, 7);
        assert_eq!(cfg.shrink.c2, 2.0 * std::f64::consts::PI);
    }

    #[test]
    fn errors_carry_the_field() {
        let e = ExperimentConfig::parse("kind = hessians\nhessians.sample = 3\n").unwrap_err();
        assert_eq!(
            e,
            ConfigError::UnknownKey {
                line: 2,
                key: "hessians.sample".into()
            }
        );
        let e = ExperimentConfig::parse("kind = hessians\nhessians.dims = 2, x\n").unwrap_err();
        assert!(matches!(e, ConfigError::InvalidValue { ref key, .. } if key == "hessians.dims"));
        let e = ExperimentConfig::parse("kind = hessians\nhessians.dims = 1\n").unwrap_err();
        assert!(matches!(e, ConfigError::InvalidValue { ref key, .. } if key == "hessians.dims"));
        assert_eq!(ExperimentConfig::parse("seed = 1\n").unwrap_err(), ConfigError::MissingKey("kind".into()));
        assert!(matches!(
            ExperimentConfig::parse("kind = hessians\nkind = hessians\n"),
            Err(ConfigError::DuplicateKey { line: 2, .. })
        ));
        assert!(matches!(ExperimentConfig::parse("kind hessians\n"), Err(ConfigError::Syntax { line: 1 })));
        assert!(matches!(
            ExperimentConfig::parse("kind = everything\n"),
            Err(ConfigError::InvalidValue { .. })
        ));
    }

    #[test]
    fn canonical_text_round_trips() {
        let mut cfg = ExperimentConfig::default();
        cfg.seed = 99;
        cfg.harnack.l_values = vec![0.1, 2.5];
        cfg.harmonic.edge_forms = vec![EdgeForm::GeometricMean];
        let back = ExperimentConfig::parse(&cfg.canonical_text()).unwrap();
        assert_eq!(back, cfg);
        assert_eq!(back.hash(), cfg.hash());
        cfg.seed = 100;
        assert_ne!(back.hash(), cfg.hash());
    }
}
