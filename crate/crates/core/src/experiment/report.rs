//! Check records, plot series and their JSON / CSV encodings.

use serde::{Deserialize, Serialize};

use super::ExperimentError;

/// How `measured` is compared with `reference`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Relation {
    /// `|measured - reference| ≤ tolerance`.
    Within,
    /// `measured ≤ reference`.
    AtMost,
    /// `measured ≥ reference`.
    AtLeast,
    /// `measured > reference`.
    Above,
    /// `measured < reference`.
    Below,
}

impl Relation {
    pub fn holds(self, measured: f64, reference: f64, tolerance: f64) -> bool {
        match self {
            Relation::Within => (measured - reference).abs() <= tolerance,
            Relation::AtMost => measured <= reference,
            Relation::AtLeast => measured >= reference,
            Relation::Above => measured > reference,
            Relation::Below => measured < reference,
        }
    }
}

/// Non-finite values are written as the strings `"NaN"`, `"inf"`, `"-inf"`.
mod real {
    use serde::{Deserialize, Deserializer, Serialize, Serializer};

    #[derive(Serialize, Deserialize)]
    #[serde(untagged)]
    enum Repr {
        Num(f64),
        Text(String),
    }

    pub fn serialize<S: Serializer>(v: &f64, s: S) -> Result<S::Ok, S::Error> {
        if v.is_finite() {
            s.serialize_f64(*v)
        } else if v.is_nan() {
            s.serialize_str("NaN")
        } else if *v > 0.0 {
            s.serialize_str("inf")
        } else {
            s.serialize_str("-inf")
        }
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<f64, D::Error> {
        match Repr::deserialize(d)? {
            Repr::Num(v) => Ok(v),
            Repr::Text(t) => t.parse::<f64>().map_err(serde::de::Error::custom),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CheckRecord {
    pub experiment: String,
    pub name: String,
    #[serde(with = "real")]
    pub measured: f64,
    #[serde(with = "real")]
    pub reference: f64,
    #[serde(with = "real")]
    pub tolerance: f64,
    pub relation: Relation,
    pub pass: bool,
}

impl CheckRecord {
    pub fn new(experiment: &str, name: impl Into<String>, measured: f64, relation: Relation, reference: f64, tolerance: f64) -> Self {
        Self {
            experiment: experiment.to_string(),
            name: name.into(),
            measured,
            reference,
            tolerance,
            relation,
            pass: relation.holds(measured, reference, tolerance),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Series {
    pub experiment: String,
    pub name: String,
    pub x_label: String,
    pub y_label: String,
    pub log_log: bool,
    pub points: Vec<(f64, f64)>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunReport {
    pub seed: u64,
    pub tolerance_scale: f64,
    /// SHA-256 of the canonical configuration text.
    pub config_hash: String,
    pub config: String,
    pub records: Vec<CheckRecord>,
    pub series: Vec<Series>,
}

impl RunReport {
    pub fn all_pass(&self) -> bool {
        self.records.iter().all(|r| r.pass)
    }

    pub fn failures(&self) -> impl Iterator<Item = &CheckRecord> {
        self.records.iter().filter(|r| !r.pass)
    }

    pub fn record(&self, experiment: &str, name: &str) -> Option<&CheckRecord> {
        self.records.iter().find(|r| r.experiment == experiment && r.name == name)
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("report serializes");
        s.push('\n');
        s
    }

    pub fn from_json(text: &str) -> Result<Self, ExperimentError> {
        serde_json::from_str(text).map_err(|e| ExperimentError::Report(e.to_string()))
    }

    /// One row per record: `experiment,name,measured,reference,tolerance,relation,pass`.
    pub fn to_csv(&self) -> String {
        let mut w = csv::Writer::from_writer(Vec::new());
        for r in &self.records {
            w.serialize(r).expect("record serializes");
        }
        String::from_utf8(w.into_inner().expect("in-memory writer")).expect("csv is utf-8")
    }

    pub fn records_from_csv(text: &str) -> Result<Vec<CheckRecord>, ExperimentError> {
        csv::Reader::from_reader(text.as_bytes())
            .deserialize()
            .collect::<Result<_, _>>()
            .map_err(|e| ExperimentError::Report(e.to_string()))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample() -> RunReport {
        RunReport {
            seed: 3,
            tolerance_scale: 1.0,
            config_hash: "ab".into(),
            config: "kind = hessians\n".into(),
            records: vec![
                CheckRecord::new("a", "x", 0.1 + 0.2, Relation::Within, 0.3, 1e-12),
                CheckRecord::new("a", "y", f64::NAN, Relation::AtMost, 1.0, 0.0),
                CheckRecord::new("b", "z", f64::INFINITY, Relation::Above, 0.0, 0.0),
            ],
            series: vec![Series {
                experiment: "a".into(),
                name: "s".into(),
                x_label: "x".into(),
                y_label: "y".into(),
                log_log: true,
                points: vec![(1.0, 2.0), (2.0, 1.0 / 3.0)],
            }],
        }
    }

    #[test]
    fn relations() {
        assert!(Relation::Within.holds(1.0, 1.5, 0.5));
        assert!(!Relation::Within.holds(f64::NAN, 1.0, 1.0));
        assert!(!Relation::AtMost.holds(f64::NAN, 1.0, 0.0));
        assert!(Relation::Above.holds(1e-300, 0.0, 0.0));
        assert!(!Relation::Below.holds(1.0, 1.0, 0.0));
    }

    #[test]
    fn json_round_trip_keeps_non_finite_values() {
        let r = sample();
        let back = RunReport::from_json(&r.to_json()).unwrap();
        assert_eq!(back.to_json(), r.to_json());
        assert!(back.records[1].measured.is_nan());
        assert_eq!(back.records[2].measured, f64::INFINITY);
        assert_eq!(back.records[0], r.records[0]);
        assert!(!back.all_pass());
        assert_eq!(back.failures().count(), 1);
    }

    #[test]
    fn csv_round_trip() {
        let r = sample();
        let text = r.to_csv();
        assert!(text.starts_with("experiment,name,measured,reference,tolerance,relation,pass\n"));
        let back = RunReport::records_from_csv(&text).unwrap();
        assert_eq!(back.len(), 3);
        assert_eq!(back[0], r.records[0]);
        assert!(back[1].measured.is_nan());
        assert!(RunReport::records_from_csv("experiment,name\na\n").is_err());
    }
}
