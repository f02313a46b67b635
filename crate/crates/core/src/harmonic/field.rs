//! Sphere-valued fields on graph vertices.
//!
//! Text format: one line per vertex, `<id> <c_0> ... <c_n>`, coordinates with
//! 17 significant digits; `#` starts a comment. Ids must be `0..count`.

use std::fmt::Write as _;

use super::HarmonicError;
use crate::sphere::SpherePoint;

#[derive(Debug, Clone, PartialEq)]
pub struct SphereField {
    points: Vec<SpherePoint>,
}

impl SphereField {
    pub fn new(points: Vec<SpherePoint>) -> Result<Self, HarmonicError> {
        if let Some(first) = points.first() {
            let d = first.coords().len();
            if let Some(bad) = points.iter().position(|p| p.coords().len() != d) {
                return Err(HarmonicError::DimensionMismatch {
                    vertex: bad,
                    expected: d,
                    found: points[bad].coords().len(),
                });
            }
        }
        Ok(Self { points })
    }

    pub fn constant(count: usize, value: &SpherePoint) -> Self {
        Self {
            points: vec![value.clone(); count],
        }
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn points(&self) -> &[SpherePoint] {
        &self.points
    }

    pub fn get(&self, v: usize) -> &SpherePoint {
        &self.points[v]
    }

    /// Ambient dimension `n + 1` of the target sphere.
    pub fn ambient_dim(&self) -> usize {
        self.points.first().map_or(0, |p| p.coords().len())
    }

    pub fn to_text(&self) -> String {
        let mut s = String::new();
        for (i, p) in self.points.iter().enumerate() {
            write!(s, "{i}").unwrap();
            for c in p.coords() {
                write!(s, " {c:.16e}").unwrap();
            }
            s.push('\n');
        }
        s
    }

    pub fn from_text(text: &str) -> Result<Self, HarmonicError> {
        let mut rows: Vec<(usize, Vec<f64>)> = Vec::new();
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let err = |message: String| HarmonicError::Parse {
                line: lineno + 1,
                message,
            };
            let mut toks = line.split_whitespace();
            let id_tok = toks.next().unwrap_or("");
            let id = id_tok
                .parse::<usize>()
                .map_err(|_| err(format!("bad vertex id `{id_tok}`")))?;
            let coords = toks
                .map(|t| t.parse::<f64>().map_err(|_| err(format!("bad number `{t}`"))))
                .collect::<Result<Vec<_>, _>>()?;
            rows.push((id, coords));
        }
        let n = rows.len();
        let mut slots: Vec<Option<SpherePoint>> = vec![None; n];
        for (id, coords) in rows {
            if id >= n || slots[id].is_some() {
                return Err(HarmonicError::Parse {
                    line: 0,
                    message: format!("vertex ids must be 0..{n} without repeats (saw {id})"),
                });
            }
            let p = SpherePoint::new(coords).map_err(|source| HarmonicError::Chart { vertex: id, source })?;
            slots[id] = Some(p);
        }
        Self::new(slots.into_iter().map(|p| p.expect("every slot filled")).collect())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn text_round_trip_is_exact() {
        let pts = (0..5)
            .map(|k| {
                let t = 0.37 * k as f64;
                SpherePoint::from_vector(vec![t.cos(), t.sin(), 0.1 * k as f64, 1.0 / 3.0]).unwrap()
            })
            .collect();
        let f = SphereField::new(pts).unwrap();
        assert_eq!(SphereField::from_text(&f.to_text()).unwrap(), f);
    }

    #[test]
    fn rejects_non_unit_rows() {
        assert!(SphereField::from_text("0 1 0 0\n1 0.5 0 0\n").is_err());
        assert!(SphereField::from_text("0 1 0 0\n0 0 1 0\n").is_err());
    }
}
