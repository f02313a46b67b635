//! Height functions on a square lattice.
//!
//! Text format:
//!
//! ```text
//! minimal-graph
//! m 2
//! extent <x0> <y0> <nx> <ny>
//! h <spacing>
//! <ny rows of nx heights, row j = y0 + j h, `nan` outside the domain>
//! ```

use std::fmt::Write as _;

use super::MinimalError;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum NodeKind {
    Outside,
    Boundary,
    Interior,
}

/// Heights over the lattice `(x0 + i h, y0 + j h)`. The domain is the set of
/// nodes with a finite height; a domain node is interior when the four
/// lattice cells around it have all their corners in the domain.
#[derive(Debug, Clone, PartialEq)]
pub struct MinimalGraph {
    nx: usize,
    ny: usize,
    origin: (f64, f64),
    h: f64,
    heights: Vec<f64>,
    kinds: Vec<NodeKind>,
}

impl MinimalGraph {
    pub fn new(
        nx: usize,
        ny: usize,
        origin: (f64, f64),
        h: f64,
        heights: Vec<f64>,
    ) -> Result<Self, MinimalError> {
        if nx < 3 || ny < 3 {
            return Err(MinimalError::InvalidGrid(format!("{nx}x{ny} lattice is too small")));
        }
        if !(h > 0.0) || !h.is_finite() {
            return Err(MinimalError::InvalidGrid(format!("spacing {h} must be positive")));
        }
        if heights.len() != nx * ny {
            return Err(MinimalError::InvalidGrid(format!(
                "{} heights for a {nx}x{ny} lattice",
                heights.len()
            )));
        }
        if heights.iter().any(|z| z.is_infinite()) {
            return Err(MinimalError::InvalidGrid("infinite height".into()));
        }
        let kinds = classify(nx, ny, &heights);
        if !kinds.contains(&NodeKind::Interior) {
            return Err(MinimalError::InvalidGrid("domain has no interior node".into()));
        }
        Ok(Self {
            nx,
            ny,
            origin,
            h,
            heights,
            kinds,
        })
    }

    /// Samples `f` on the nodes where `domain` holds.
    pub fn from_fn(
        nx: usize,
        ny: usize,
        origin: (f64, f64),
        h: f64,
        domain: impl Fn(f64, f64) -> bool,
        f: impl Fn(f64, f64) -> f64,
    ) -> Result<Self, MinimalError> {
        let mut heights = Vec::with_capacity(nx * ny);
        for j in 0..ny {
            for i in 0..nx {
                let (x, y) = (origin.0 + i as f64 * h, origin.1 + j as f64 * h);
                heights.push(if domain(x, y) { f(x, y) } else { f64::NAN });
            }
        }
        Self::new(nx, ny, origin, h, heights)
    }

    /// Square `[a, b]²` with `cells` cells per side.
    pub fn square(a: f64, b: f64, cells: usize, f: impl Fn(f64, f64) -> f64) -> Result<Self, MinimalError> {
        let h = (b - a) / cells as f64;
        Self::from_fn(cells + 1, cells + 1, (a, a), h, |_, _| true, f)
    }

    /// The upper catenoid `arccosh ρ` on the nodes of `[-2, 2]²` with
    /// `1.2 ≤ ρ ≤ 2`; `h` should divide 2.
    pub fn catenoid_annulus(h: f64) -> Result<Self, MinimalError> {
        let cells = (4.0 / h).round() as usize;
        let h = 4.0 / cells as f64;
        let slack = 1e-12;
        Self::from_fn(
            cells + 1,
            cells + 1,
            (-2.0, -2.0),
            h,
            |x, y| {
                let rho = x.hypot(y);
                (1.2 - slack..=2.0 + slack).contains(&rho)
            },
            |x, y| x.hypot(y).max(1.0).acosh(),
        )
    }

    pub fn nx(&self) -> usize {
        self.nx
    }

    pub fn ny(&self) -> usize {
        self.ny
    }

    pub fn origin(&self) -> (f64, f64) {
        self.origin
    }

    pub fn spacing(&self) -> f64 {
        self.h
    }

    pub fn index(&self, i: usize, j: usize) -> usize {
        j * self.nx + i
    }

    pub fn coords(&self, node: usize) -> (usize, usize) {
        (node % self.nx, node / self.nx)
    }

    pub fn position(&self, node: usize) -> (f64, f64) {
        let (i, j) = self.coords(node);
        (self.origin.0 + i as f64 * self.h, self.origin.1 + j as f64 * self.h)
    }

    /// Nearest lattice node to `(x, y)`.
    pub fn nearest_node(&self, x: f64, y: f64) -> usize {
        let clamp = |t: f64, n: usize| (t.round().max(0.0) as usize).min(n - 1);
        let i = clamp((x - self.origin.0) / self.h, self.nx);
        let j = clamp((y - self.origin.1) / self.h, self.ny);
        self.index(i, j)
    }

    pub fn heights(&self) -> &[f64] {
        &self.heights
    }

    pub fn height(&self, node: usize) -> f64 {
        self.heights[node]
    }

    pub fn kind(&self, node: usize) -> NodeKind {
        self.kinds[node]
    }

    pub fn kinds(&self) -> &[NodeKind] {
        &self.kinds
    }

    pub fn interior_nodes(&self) -> Vec<usize> {
        self.nodes_of(NodeKind::Interior)
    }

    pub fn boundary_nodes(&self) -> Vec<usize> {
        self.nodes_of(NodeKind::Boundary)
    }

    fn nodes_of(&self, kind: NodeKind) -> Vec<usize> {
        (0..self.heights.len()).filter(|&v| self.kinds[v] == kind).collect()
    }

    /// Replaces the interior heights, keeping boundary values.
    pub fn with_interior(&self, values: impl Fn(usize) -> f64) -> Self {
        let mut out = self.clone();
        for v in 0..out.heights.len() {
            if out.kinds[v] == NodeKind::Interior {
                out.heights[v] = values(v);
            }
        }
        out
    }

    pub(crate) fn set_height(&mut self, node: usize, z: f64) {
        self.heights[node] = z;
    }

    /// The graph of `s f(x / s)`: lattice, spacing and heights scaled by `s`.
    pub fn scaled(&self, s: f64) -> Self {
        Self {
            origin: (s * self.origin.0, s * self.origin.1),
            h: s * self.h,
            heights: self.heights.iter().map(|z| s * z).collect(),
            ..self.clone()
        }
    }

    /// Central-difference gradient at an interior node.
    pub fn slope(&self, node: usize) -> Result<[f64; 2], MinimalError> {
        if self.kinds[node] != NodeKind::Interior {
            return Err(MinimalError::BoundaryNode(node));
        }
        let z = &self.heights;
        let nx = self.nx;
        Ok([
            (z[node + 1] - z[node - 1]) / (2.0 * self.h),
            (z[node + nx] - z[node - nx]) / (2.0 * self.h),
        ])
    }

    /// Interior values lie between the boundary minimum and maximum.
    pub fn maximum_principle_holds(&self, slack: f64) -> bool {
        let boundary = self.boundary_nodes();
        let lo = boundary.iter().map(|&v| self.heights[v]).fold(f64::INFINITY, f64::min);
        let hi = boundary.iter().map(|&v| self.heights[v]).fold(f64::NEG_INFINITY, f64::max);
        self.interior_nodes()
            .iter()
            .all(|&v| self.heights[v] >= lo - slack && self.heights[v] <= hi + slack)
    }

    pub fn to_text(&self) -> String {
        let mut s = String::from("minimal-graph\nm 2\n");
        writeln!(s, "extent {:e} {:e} {} {}", self.origin.0, self.origin.1, self.nx, self.ny).unwrap();
        writeln!(s, "h {:e}", self.h).unwrap();
        for row in self.heights.chunks(self.nx) {
            let line: Vec<String> = row
                .iter()
                .map(|z| if z.is_nan() { "nan".to_string() } else { format!("{z:e}") })
                .collect();
            s.push_str(&line.join(" "));
            s.push('\n');
        }
        s
    }

    pub fn from_text(text: &str) -> Result<Self, MinimalError> {
        let mut lines = text
            .lines()
            .enumerate()
            .map(|(k, l)| (k + 1, l.split('#').next().unwrap_or("").trim()))
            .filter(|(_, l)| !l.is_empty());
        let mut next = |what: &str| {
            lines.next().ok_or_else(|| MinimalError::Parse {
                line: 0,
                message: format!("missing {what}"),
            })
        };
        let perr = |line: usize, message: String| MinimalError::Parse { line, message };
        let (ln, magic) = next("header")?;
        if magic != "minimal-graph" {
            return Err(perr(ln, format!("expected `minimal-graph`, found `{magic}`")));
        }
        let (ln, m) = next("dimension")?;
        if m.split_whitespace().collect::<Vec<_>>() != ["m", "2"] {
            return Err(perr(ln, format!("only `m 2` is supported, found `{m}`")));
        }
        let (ln, ext) = next("extent")?;
        let t: Vec<&str> = ext.split_whitespace().collect();
        if t.len() != 5 || t[0] != "extent" {
            return Err(perr(ln, "expected `extent x0 y0 nx ny`".into()));
        }
        let num = |s: &str| s.parse::<f64>().map_err(|_| perr(ln, format!("bad number `{s}`")));
        let int = |s: &str| s.parse::<usize>().map_err(|_| perr(ln, format!("bad count `{s}`")));
        let (x0, y0, nx, ny) = (num(t[1])?, num(t[2])?, int(t[3])?, int(t[4])?);
        let (ln, hl) = next("spacing")?;
        let h = match hl.split_whitespace().collect::<Vec<_>>()[..] {
            ["h", v] => v.parse::<f64>().map_err(|_| perr(ln, format!("bad spacing `{v}`")))?,
            _ => return Err(perr(ln, "expected `h <spacing>`".into())),
        };
        let mut heights = Vec::with_capacity(nx * ny);
        for _ in 0..ny {
            let (ln, row) = next("height row")?;
            let vals = row
                .split_whitespace()
                .map(|tok| {
                    if tok.eq_ignore_ascii_case("nan") {
                        Ok(f64::NAN)
                    } else {
                        tok.parse::<f64>().map_err(|_| perr(ln, format!("bad height `{tok}`")))
                    }
                })
                .collect::<Result<Vec<_>, _>>()?;
            if vals.len() != nx {
                return Err(perr(ln, format!("row has {} heights, expected {nx}", vals.len())));
            }
            heights.extend(vals);
        }
        if let Ok((ln, _)) = next("") {
            return Err(perr(ln, "trailing data after the last row".into()));
        }
        Self::new(nx, ny, (x0, y0), h, heights)
    }
}

fn classify(nx: usize, ny: usize, heights: &[f64]) -> Vec<NodeKind> {
    let inside = |i: usize, j: usize| !heights[j * nx + i].is_nan();
    let cell = |i: usize, j: usize| inside(i, j) && inside(i + 1, j) && inside(i, j + 1) && inside(i + 1, j + 1);
    let mut kinds = vec![NodeKind::Outside; nx * ny];
    for j in 0..ny {
        for i in 0..nx {
            if !inside(i, j) {
                continue;
            }
            let interior = i > 0
                && j > 0
                && i + 1 < nx
                && j + 1 < ny
                && cell(i - 1, j - 1)
                && cell(i, j - 1)
                && cell(i - 1, j)
                && cell(i, j);
            kinds[j * nx + i] = if interior { NodeKind::Interior } else { NodeKind::Boundary };
        }
    }
    kinds
}
