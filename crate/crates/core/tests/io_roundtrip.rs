use longitude_lab::elliptic::{EdgeSpec, Grid2d, WeightedGraph};
use longitude_lab::experiment::{CheckRecord, ExperimentConfig, Relation, RunReport, Series};
use longitude_lab::harmonic::SphereField;
use longitude_lab::minimal::{
    curvature_estimate_audit, AuditOptions, AuditReport, ImmersedPatch, MinimalError, MinimalGraph,
};
use longitude_lab::sphere::SpherePoint;
use proptest::prelude::*;

fn finite() -> impl Strategy<Value = f64> {
    prop_oneof![-1e6..1e6f64, -1.0..1.0f64, Just(0.0), Just(1e-300)]
}

proptest! {
    #[test]
    fn weighted_graph_text(n in 2usize..12, seed in any::<u64>(), xs in prop::collection::vec(finite(), 24)) {
        let positions: Vec<Vec<f64>> = (0..n).map(|i| vec![xs[i % xs.len()], xs[(i + 7) % xs.len()]]).collect();
        let measures: Vec<f64> = (0..n).map(|i| 0.5 + (seed.rotate_left(i as u32) % 97) as f64 / 13.0).collect();
        let edges: Vec<EdgeSpec> = (0..n - 1).map(|i| EdgeSpec::new(i, i + 1, 0.25 + i as f64 / 3.0)).collect();
        let g = WeightedGraph::new(positions, measures, edges, (seed as usize) % n).unwrap();
        let back = WeightedGraph::from_text(&g.to_text()).unwrap();
        prop_assert_eq!(back, g);
    }

    #[test]
    fn sphere_field_text(raw in prop::collection::vec(prop::collection::vec(-1.0..1.0f64, 4), 1..20)) {
        let points: Vec<SpherePoint> = raw
            .into_iter()
            .filter_map(|v| SpherePoint::from_vector(v).ok())
            .collect();
        prop_assume!(!points.is_empty());
        let field = SphereField::new(points).unwrap();
        let back = SphereField::from_text(&field.to_text()).unwrap();
        prop_assert_eq!(back, field);
    }

    #[test]
    fn minimal_graph_text(a in -2.0..2.0f64, b in -2.0..2.0f64, c in -1.0..1.0f64, cells in 8usize..24, hole in 0.0..0.3f64) {
        let n = cells + 1;
        let h = 2.0 / cells as f64;
        let mg = MinimalGraph::from_fn(n, n, (-1.0, -1.0), h, |x, y| x.hypot(y) >= hole, |x, y| a * x + b * y * y + c).unwrap();
        let text = mg.to_text();
        let back = MinimalGraph::from_text(&text).unwrap();
        prop_assert_eq!(back.to_text(), text);
        prop_assert_eq!(back.kinds(), mg.kinds());
        for (p, q) in back.heights().iter().zip(mg.heights()) {
            prop_assert!(p.to_bits() == q.to_bits() || (p.is_nan() && q.is_nan()));
        }
    }

    #[test]
    fn report_json_and_csv(values in prop::collection::vec(prop_oneof![finite(), Just(f64::NAN), Just(f64::INFINITY)], 1..10), seed in any::<u64>()) {
        let records: Vec<CheckRecord> = values
            .iter()
            .enumerate()
            .map(|(i, &v)| CheckRecord::new("exp", format!("check,{i}"), v, Relation::AtMost, 1.0, 0.0))
            .collect();
        let report = RunReport {
            seed,
            tolerance_scale: 1.0,
            config_hash: "00".into(),
            config: "kind = hessians\n".into(),
            records,
            series: vec![Series {
                experiment: "exp".into(),
                name: "s".into(),
                x_label: "x".into(),
                y_label: "y".into(),
                log_log: false,
                points: values.iter().map(|&v| (1.0, if v.is_finite() { v } else { 0.0 })).collect(),
            }],
        };
        let json = report.to_json();
        prop_assert_eq!(RunReport::from_json(&json).unwrap().to_json(), json);
        let back = RunReport::records_from_csv(&report.to_csv()).unwrap();
        prop_assert_eq!(back.len(), report.records.len());
        for (p, q) in back.iter().zip(&report.records) {
            prop_assert_eq!(&p.name, &q.name);
            prop_assert!(p.measured.to_bits() == q.measured.to_bits() || (p.measured.is_nan() && q.measured.is_nan()));
            prop_assert_eq!(p.pass, q.pass);
        }
    }
}

#[test]
fn grid_graph_text_round_trip() {
    let grid = Grid2d::new(5, 3, (0.0, 1.0), (-0.3, 0.7)).unwrap();
    let text = grid.graph.to_text();
    assert_eq!(WeightedGraph::from_text(&text).unwrap(), grid.graph);
}

#[test]
fn malformed_inputs_report_a_line() {
    assert!(WeightedGraph::from_text("dim 1\nbase 0\nv 0 0.0\n").is_err());
    assert!(SphereField::from_text("0 1.0 0.0\n1 0.5 0.5\n").is_err());
    assert!(matches!(
        MinimalGraph::from_text("minimal-graph\nm 3\n"),
        Err(MinimalError::Parse { .. })
    ));
    assert!(AuditReport::from_json("{\"m\": 2}").is_err());
    assert!(RunReport::from_json("[]").is_err());
}

#[test]
fn audit_report_json_round_trip() {
    let mg = MinimalGraph::catenoid_annulus(0.05).unwrap();
    let patch = ImmersedPatch::from_graph(&mg);
    let report = curvature_estimate_audit(&patch, mg.nearest_node(1.6, 0.0), 0.3, &AuditOptions::default()).unwrap();
    let json = report.to_json();
    let back = AuditReport::from_json(&json).unwrap();
    assert_eq!(back, report);
    assert_eq!(back.to_json(), json);
}

#[test]
fn config_canonical_text_round_trip() {
    let cfg = ExperimentConfig::parse("kind = minimal-graph, hessians\nseed = 3\nminimal.h = 0.02\nout = /tmp/x\n").unwrap();
    assert_eq!(cfg.out.as_deref(), Some(std::path::Path::new("/tmp/x")));
    let again = ExperimentConfig::parse(&cfg.canonical_text()).unwrap();
    assert_eq!(again.canonical_text(), cfg.canonical_text());
    assert_eq!(again.hash(), cfg.hash());
}
