//! Weighted graphs with vertex positions, measures and edge conductances.
//!
//! Text format, one record per line, `#` starts a comment:
//!
//! ```text
//! dim 2
//! base 4
//! v <id> <x_1> ... <x_dim> <measure>
//! e <id_a> <id_b> <conductance> [<length>]
//! ```
//!
//! Vertex ids must be `0..n` in any order. The edge length defaults to the
//! Euclidean distance of the endpoints. Floats are written in shortest
//! round-trip form, so writing and reading back is lossless.

use std::collections::VecDeque;
use std::fmt::Write as _;

use super::EllipticError;

#[derive(Debug, Clone, PartialEq)]
pub struct Edge {
    pub a: usize,
    pub b: usize,
    pub conductance: f64,
    /// Intrinsic length; never shorter than the extrinsic distance.
    pub length: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct WeightedGraph {
    dim: usize,
    positions: Vec<Vec<f64>>,
    measures: Vec<f64>,
    edges: Vec<Edge>,
    base: usize,
    adjacency: Vec<Vec<(usize, usize)>>,
}

/// An edge before validation; `length: None` means Euclidean length.
#[derive(Debug, Clone, PartialEq)]
pub struct EdgeSpec {
    pub a: usize,
    pub b: usize,
    pub conductance: f64,
    pub length: Option<f64>,
}

impl EdgeSpec {
    pub fn new(a: usize, b: usize, conductance: f64) -> Self {
        Self {
            a,
            b,
            conductance,
            length: None,
        }
    }
}

fn euclid(p: &[f64], q: &[f64]) -> f64 {
    p.iter().zip(q).map(|(a, b)| (a - b).powi(2)).sum::<f64>().sqrt()
}

impl WeightedGraph {
    pub fn new(
        positions: Vec<Vec<f64>>,
        measures: Vec<f64>,
        edges: Vec<EdgeSpec>,
        base: usize,
    ) -> Result<Self, EllipticError> {
        let n = positions.len();
        if n == 0 {
            return Err(EllipticError::InvalidGraph("graph has no vertices".into()));
        }
        if measures.len() != n {
            return Err(EllipticError::InvalidGraph(format!(
                "{} measures for {} vertices",
                measures.len(),
                n
            )));
        }
        let dim = positions[0].len();
        if let Some(bad) = positions.iter().position(|p| p.len() != dim) {
            return Err(EllipticError::InvalidGraph(format!(
                "vertex {bad} has {} coordinates, expected {dim}",
                positions[bad].len()
            )));
        }
        if base >= n {
            return Err(EllipticError::InvalidGraph(format!("base vertex {base} out of range")));
        }
        if let Some(i) = measures.iter().position(|m| !(*m > 0.0) || !m.is_finite()) {
            return Err(EllipticError::InvalidGraph(format!(
                "vertex {i} has non-positive measure {}",
                measures[i]
            )));
        }
        let mut adjacency = vec![Vec::new(); n];
        let mut out = Vec::with_capacity(edges.len());
        for (k, e) in edges.into_iter().enumerate() {
            if e.a >= n || e.b >= n || e.a == e.b {
                return Err(EllipticError::InvalidGraph(format!(
                    "edge {k} joins {} and {}",
                    e.a, e.b
                )));
            }
            if !(e.conductance > 0.0) || !e.conductance.is_finite() {
                return Err(EllipticError::NonPositiveCoefficient(e.conductance));
            }
            let d = euclid(&positions[e.a], &positions[e.b]);
            let length = e.length.unwrap_or(d);
            if length < d * (1.0 - 1e-12) {
                return Err(EllipticError::InvalidGraph(format!(
                    "edge {k} has length {length} shorter than the distance {d} of its endpoints"
                )));
            }
            adjacency[e.a].push((e.b, k));
            adjacency[e.b].push((e.a, k));
            out.push(Edge {
                a: e.a,
                b: e.b,
                conductance: e.conductance,
                length,
            });
        }
        let g = Self {
            dim,
            positions,
            measures,
            edges: out,
            base,
            adjacency,
        };
        if g.component_count(&vec![true; n]) != 1 {
            return Err(EllipticError::InvalidGraph("graph is not connected".into()));
        }
        Ok(g)
    }

    /// Path discretizing `[a, b]` with `n` vertices: conductance `1/h`,
    /// trapezoid measures, base vertex at the middle.
    pub fn path(n: usize, a: f64, b: f64) -> Result<Self, EllipticError> {
        if n < 2 {
            return Err(EllipticError::InvalidGraph("a path needs two vertices".into()));
        }
        let h = (b - a) / (n - 1) as f64;
        let positions = (0..n).map(|i| vec![a + h * i as f64]).collect();
        let measures = (0..n)
            .map(|i| if i == 0 || i == n - 1 { 0.5 * h } else { h })
            .collect();
        let edges = (0..n - 1).map(|i| EdgeSpec::new(i, i + 1, 1.0 / h)).collect();
        Self::new(positions, measures, edges, (n - 1) / 2)
    }

    /// Complete graph on `k` vertices with unit weights and measures, placed
    /// at pairwise distance 1.
    pub fn complete(k: usize) -> Result<Self, EllipticError> {
        let s = std::f64::consts::FRAC_1_SQRT_2;
        let positions = (0..k)
            .map(|i| (0..k).map(|j| if i == j { s } else { 0.0 }).collect())
            .collect();
        let mut edges = Vec::new();
        for i in 0..k {
            for j in (i + 1)..k {
                edges.push(EdgeSpec::new(i, j, 1.0));
            }
        }
        Self::new(positions, vec![1.0; k], edges, 0)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn vertex_count(&self) -> usize {
        self.positions.len()
    }

    pub fn positions(&self) -> &[Vec<f64>] {
        &self.positions
    }

    pub fn position(&self, i: usize) -> &[f64] {
        &self.positions[i]
    }

    pub fn measures(&self) -> &[f64] {
        &self.measures
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn base(&self) -> usize {
        self.base
    }

    pub fn with_base(mut self, base: usize) -> Result<Self, EllipticError> {
        if base >= self.vertex_count() {
            return Err(EllipticError::InvalidGraph(format!("base vertex {base} out of range")));
        }
        self.base = base;
        Ok(self)
    }

    /// `(neighbor, edge index)` pairs.
    pub fn neighbors(&self, i: usize) -> &[(usize, usize)] {
        &self.adjacency[i]
    }

    pub fn distance(&self, i: usize, j: usize) -> f64 {
        euclid(&self.positions[i], &self.positions[j])
    }

    /// Vertices at extrinsic distance `< radius` from the base vertex.
    pub fn ball(&self, radius: f64) -> Vec<usize> {
        self.ball_at(self.base, radius)
    }

    pub fn ball_at(&self, center: usize, radius: f64) -> Vec<usize> {
        (0..self.vertex_count())
            .filter(|&v| self.distance(center, v) < radius)
            .collect()
    }

    pub fn volume(&self, vertices: &[usize]) -> f64 {
        vertices.iter().map(|&v| self.measures[v]).sum()
    }

    /// Number of connected components of the subgraph induced by `mask`.
    pub fn component_count(&self, mask: &[bool]) -> usize {
        let n = self.vertex_count();
        let mut seen = vec![false; n];
        let mut count = 0;
        let mut queue = VecDeque::new();
        for s in 0..n {
            if !mask[s] || seen[s] {
                continue;
            }
            count += 1;
            seen[s] = true;
            queue.push_back(s);
            while let Some(v) = queue.pop_front() {
                for &(w, _) in &self.adjacency[v] {
                    if mask[w] && !seen[w] {
                        seen[w] = true;
                        queue.push_back(w);
                    }
                }
            }
        }
        count
    }

    /// Shortest-path distances from `source` using edge lengths.
    pub fn path_distances(&self, source: usize) -> Vec<f64> {
        let n = self.vertex_count();
        let mut dist = vec![f64::INFINITY; n];
        let mut done = vec![false; n];
        dist[source] = 0.0;
        // Dense Dijkstra; graphs here are small enough.
        let mut heap = std::collections::BinaryHeap::new();
        heap.push(std::cmp::Reverse((OrdF64(0.0), source)));
        while let Some(std::cmp::Reverse((OrdF64(d), v))) = heap.pop() {
            if done[v] {
                continue;
            }
            done[v] = true;
            for &(w, k) in &self.adjacency[v] {
                let nd = d + self.edges[k].length;
                if nd < dist[w] {
                    dist[w] = nd;
                    heap.push(std::cmp::Reverse((OrdF64(nd), w)));
                }
            }
        }
        dist
    }

    pub fn to_text(&self) -> String {
        let mut s = String::new();
        writeln!(s, "dim {}", self.dim).unwrap();
        writeln!(s, "base {}", self.base).unwrap();
        for (i, (p, m)) in self.positions.iter().zip(&self.measures).enumerate() {
            write!(s, "v {i}").unwrap();
            for c in p {
                write!(s, " {c:e}").unwrap();
            }
            writeln!(s, " {m:e}").unwrap();
        }
        for e in &self.edges {
            writeln!(s, "e {} {} {:e} {:e}", e.a, e.b, e.conductance, e.length).unwrap();
        }
        s
    }

    pub fn from_text(text: &str) -> Result<Self, EllipticError> {
        let mut dim: Option<usize> = None;
        let mut base: Option<usize> = None;
        let mut vertices: Vec<(usize, Vec<f64>, f64)> = Vec::new();
        let mut edges = Vec::new();
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let err = |msg: &str| EllipticError::Parse {
                line: lineno + 1,
                message: msg.to_string(),
            };
            let mut toks = line.split_whitespace();
            let tag = toks.next().unwrap_or("");
            let rest: Vec<&str> = toks.collect();
            let num = |t: &str| t.parse::<f64>().map_err(|_| err(&format!("bad number `{t}`")));
            let idx = |t: &str| t.parse::<usize>().map_err(|_| err(&format!("bad index `{t}`")));
            match tag {
                "dim" => {
                    if rest.len() != 1 {
                        return Err(err("expected `dim <d>`"));
                    }
                    dim = Some(idx(rest[0])?);
                }
                "base" => {
                    if rest.len() != 1 {
                        return Err(err("expected `base <id>`"));
                    }
                    base = Some(idx(rest[0])?);
                }
                "v" => {
                    let d = dim.ok_or_else(|| err("`dim` must precede vertices"))?;
                    if rest.len() != d + 2 {
                        return Err(err(&format!("vertex line needs {} fields", d + 2)));
                    }
                    let id = idx(rest[0])?;
                    let coords = rest[1..=d].iter().map(|t| num(t)).collect::<Result<Vec<_>, _>>()?;
                    vertices.push((id, coords, num(rest[d + 1])?));
                }
                "e" => {
                    if rest.len() != 3 && rest.len() != 4 {
                        return Err(err("edge line needs 3 or 4 fields"));
                    }
                    edges.push(EdgeSpec {
                        a: idx(rest[0])?,
                        b: idx(rest[1])?,
                        conductance: num(rest[2])?,
                        length: rest.get(3).map(|t| num(t)).transpose()?,
                    });
                }
                other => return Err(err(&format!("unknown record `{other}`"))),
            }
        }
        let n = vertices.len();
        let mut positions = vec![Vec::new(); n];
        let mut measures = vec![0.0; n];
        let mut filled = vec![false; n];
        for (id, p, m) in vertices {
            if id >= n || filled[id] {
                return Err(EllipticError::InvalidGraph(format!(
                    "vertex ids must be 0..{n} without repeats (saw {id})"
                )));
            }
            filled[id] = true;
            positions[id] = p;
            measures[id] = m;
        }
        Self::new(positions, measures, edges, base.unwrap_or(0))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, PartialOrd)]
struct OrdF64(f64);

impl Eq for OrdF64 {}

impl Ord for OrdF64 {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        self.0.total_cmp(&other.0)
    }
}

/// A rectangular grid of `nx × ny` cells with its vertex indexing.
///
/// Conductances are `h_y/h_x` on horizontal and `h_x/h_y` on vertical edges,
/// measures are the dual-cell areas, so the graph Laplacian is the 5-point
/// discretization of `-Δ` scaled by the cell area.
#[derive(Debug, Clone)]
pub struct Grid2d {
    pub graph: WeightedGraph,
    pub nx: usize,
    pub ny: usize,
    pub x_range: (f64, f64),
    pub y_range: (f64, f64),
}

impl Grid2d {
    pub fn new(nx: usize, ny: usize, x_range: (f64, f64), y_range: (f64, f64)) -> Result<Self, EllipticError> {
        if nx < 1 || ny < 1 {
            return Err(EllipticError::InvalidGraph("grid needs at least one cell".into()));
        }
        let hx = (x_range.1 - x_range.0) / nx as f64;
        let hy = (y_range.1 - y_range.0) / ny as f64;
        let index = |i: usize, j: usize| j * (nx + 1) + i;
        let mut positions = Vec::with_capacity((nx + 1) * (ny + 1));
        let mut measures = Vec::with_capacity(positions.capacity());
        for j in 0..=ny {
            for i in 0..=nx {
                positions.push(vec![x_range.0 + hx * i as f64, y_range.0 + hy * j as f64]);
                let wx = if i == 0 || i == nx { 0.5 } else { 1.0 };
                let wy = if j == 0 || j == ny { 0.5 } else { 1.0 };
                measures.push(wx * wy * hx * hy);
            }
        }
        let mut edges = Vec::new();
        for j in 0..=ny {
            for i in 0..=nx {
                if i < nx {
                    edges.push(EdgeSpec::new(index(i, j), index(i + 1, j), hy / hx));
                }
                if j < ny {
                    edges.push(EdgeSpec::new(index(i, j), index(i, j + 1), hx / hy));
                }
            }
        }
        let base = index(nx / 2, ny / 2);
        Ok(Self {
            graph: WeightedGraph::new(positions, measures, edges, base)?,
            nx,
            ny,
            x_range,
            y_range,
        })
    }

    pub fn index(&self, i: usize, j: usize) -> usize {
        j * (self.nx + 1) + i
    }

    pub fn is_boundary(&self, v: usize) -> bool {
        let i = v % (self.nx + 1);
        let j = v / (self.nx + 1);
        i == 0 || j == 0 || i == self.nx || j == self.ny
    }

    pub fn boundary_vertices(&self) -> Vec<usize> {
        (0..self.graph.vertex_count()).filter(|&v| self.is_boundary(v)).collect()
    }

    /// Dirichlet data sampled from `f` on the outer boundary.
    pub fn boundary_from(&self, f: impl Fn(f64, f64) -> f64) -> std::collections::BTreeMap<usize, f64> {
        self.boundary_vertices()
            .into_iter()
            .map(|v| {
                let p = self.graph.position(v);
                (v, f(p[0], p[1]))
            })
            .collect()
    }

    pub fn spacing(&self) -> (f64, f64) {
        (
            (self.x_range.1 - self.x_range.0) / self.nx as f64,
            (self.y_range.1 - self.y_range.0) / self.ny as f64,
        )
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn text_round_trip_is_lossless() {
        let g = Grid2d::new(3, 2, (-1.0, 1.0), (0.0, 0.7)).unwrap().graph;
        let back = WeightedGraph::from_text(&g.to_text()).unwrap();
        assert_eq!(g, back);
    }

    #[test]
    fn parses_comments_and_default_lengths() {
        let text = "# two vertices\ndim 1\nbase 1\nv 1 0.5 2\nv 0 0 1 # origin\ne 0 1 3.0\n";
        let g = WeightedGraph::from_text(text).unwrap();
        assert_eq!(g.base(), 1);
        assert_eq!(g.edges()[0].length, 0.5);
        assert_eq!(g.measures(), &[1.0, 2.0]);
    }

    #[test]
    fn rejects_bad_graphs() {
        let disconnected = "dim 1\nv 0 0 1\nv 1 1 1\n";
        assert!(WeightedGraph::from_text(disconnected).is_err());
        let short = "dim 1\nv 0 0 1\nv 1 1 1\ne 0 1 1 0.5\n";
        assert!(WeightedGraph::from_text(short).is_err());
        let negative = "dim 1\nv 0 0 1\nv 1 1 1\ne 0 1 -1\n";
        assert!(matches!(
            WeightedGraph::from_text(negative),
            Err(EllipticError::NonPositiveCoefficient(_))
        ));
        assert!(matches!(
            WeightedGraph::from_text("dim 1\nv 0 zero 1\n"),
            Err(EllipticError::Parse { line: 2, .. })
        ));
    }

    #[test]
    fn extrinsic_distance_never_exceeds_path_distance() {
        let g = Grid2d::new(4, 4, (0.0, 1.0), (0.0, 1.0)).unwrap().graph;
        let rho = g.path_distances(g.base());
        for v in 0..g.vertex_count() {
            assert!(g.distance(g.base(), v) <= rho[v] + 1e-15);
        }
    }
}
