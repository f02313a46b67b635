//! End-to-end acceptance run. Prints one PASS/FAIL line per criterion.
//!
//! Criterion 4 is expected to fail with the default arithmetic-mean edge
//! coefficient: its residual is O(h²) discretization error (about 3e-6 on a
//! 64² grid), far above 100 × the 1e-10 flow tolerance. The test asserts
//! that this is the only failure and that the chordal form, which sums to the
//! discrete tension exactly, meets the bound on the same map.

use std::time::{Duration, Instant};

use longitude_lab::experiment::{run, CheckRecord, ExperimentConfig, ExperimentKind, RunReport};
use longitude_lab::sphere::{
    build_convex_function, geodesic, hess_f_min_eigenvalue, LongitudeChart, SpherePoint, TangentVector,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const SEED: u64 = 20240917;

/// Criteria that are known to be unattainable as stated.
const EXPECTED_FAILURES: &[u32] = &[4];

fn timed(kind: &str) -> (RunReport, Duration) {
    let cfg = ExperimentConfig::parse(&format!("kind = {kind}\nseed = {SEED}\n")).unwrap();
    let start = Instant::now();
    let report = run(&cfg).unwrap();
    (report, start.elapsed())
}

fn find<'a>(report: &'a RunReport, name: &str) -> &'a CheckRecord {
    report
        .records
        .iter()
        .find(|r| r.name == name)
        .unwrap_or_else(|| panic!("missing record {name}"))
}

fn matching<'a>(report: &'a RunReport, pred: impl Fn(&str) -> bool) -> Vec<&'a CheckRecord> {
    let out: Vec<_> = report.records.iter().filter(|r| pred(&r.name)).collect();
    assert!(!out.is_empty());
    out
}

fn describe(records: &[&CheckRecord]) -> String {
    records
        .iter()
        .map(|r| format!("{}={:.4e}", r.name, r.measured))
        .collect::<Vec<_>>()
        .join(", ")
}

struct Ledger {
    failed: Vec<u32>,
}

impl Ledger {
    fn line(&mut self, id: u32, title: &str, pass: bool, detail: String) {
        println!("{} criterion {id:>2} {title}: {detail}", if pass { "PASS" } else { "FAIL" });
        if !pass {
            self.failed.push(id);
        }
    }

    fn records(&mut self, id: u32, title: &str, records: &[&CheckRecord], budget: Option<(Duration, Duration)>) {
        let mut pass = records.iter().all(|r| r.pass);
        let mut detail = describe(records);
        if let Some((took, limit)) = budget {
            pass &= took < limit;
            detail.push_str(&format!(", runtime {:.2}s (limit {}s)", took.as_secs_f64(), limit.as_secs()));
        }
        self.line(id, title, pass, detail);
    }
}

fn cap_samples(count: usize, radius: f64, rng: &mut ChaCha8Rng) -> Vec<SpherePoint> {
    let centre = SpherePoint::from_vector(vec![-1.0, 0.0, 0.0]).unwrap();
    (0..count)
        .map(|_| {
            let dir: Vec<f64> = (0..3).map(|_| rng.random_range(-1.0..1.0)).collect();
            let t = TangentVector::project(centre.clone(), &dir).unwrap().normalized().unwrap();
            let dist = rng.random_range(radius.cos()..=1.0f64).acos();
            geodesic(&t, dist).unwrap()
        })
        .collect()
}

fn main() {
    let mut ledger = Ledger { failed: Vec::new() };

    let (hess, took) = timed("hessians");
    let oracle = matching(&hess, |n| n.contains(".hess_"));
    assert_eq!(oracle.len(), 6);
    ledger.records(1, "Hessian oracle on S2 and S4", &oracle, Some((took, Duration::from_secs(10))));
    let levels = matching(&hess, |n| n.contains(".level_tangent."));
    ledger.records(2, "Hess theta(v,v) on level tangents", &levels, None);

    let mut rng = ChaCha8Rng::seed_from_u64(SEED);
    let start = Instant::now();
    let samples = cap_samples(200, std::f64::consts::FRAC_PI_6, &mut rng);
    let chart = LongitudeChart::standard();
    let built = build_convex_function(&samples, &chart).unwrap();
    let took = start.elapsed();
    let lowest = samples
        .iter()
        .map(|x| hess_f_min_eigenvalue(x, &chart, built.c, built.lambda).unwrap())
        .fold(f64::INFINITY, f64::min);
    ledger.line(
        3,
        "convex function on a pi/6 cap",
        lowest > 0.0 && find(&hess, "convex_cap.min_eigenvalue").pass && took < Duration::from_secs(5),
        format!(
            "lambda={}, min eigenvalue over 200 samples {lowest:.4e}, runtime {:.3}s",
            built.lambda,
            took.as_secs_f64()
        ),
    );

    let (harmonic, _) = timed("harmonic-map");
    let arithmetic = find(&harmonic, "weak_residual.arithmetic");
    let chordal = find(&harmonic, "weak_residual.chordal");
    ledger.line(
        4,
        "weak divergence identity on 64x64 into S3",
        arithmetic.pass,
        format!(
            "arithmetic-mean residual {:.3e} vs bound {:.1e}; chordal diagnostic {:.3e}; tension {:.3e}",
            arithmetic.measured,
            arithmetic.reference,
            chordal.measured,
            find(&harmonic, "tension.max").measured
        ),
    );
    assert!(chordal.pass, "chordal residual should meet the bound");
    assert!(find(&harmonic, "tension.max").pass);
    assert!(find(&harmonic, "image_shrink.radius").pass);

    let (harnack, took) = timed("harnack-sweep");
    ledger.records(
        5,
        "Harnack sqrt(L) scaling at 128x128",
        &[find(&harnack, "harnack.exponent")],
        Some((took, Duration::from_secs(60))),
    );
    ledger.records(6, "oscillation decay", &matching(&harnack, |n| n.starts_with("oscillation.")), None);

    let (shrink, _) = timed("shrink-chain");
    ledger.records(
        7,
        "shrink chain ratio and monotonicity",
        &[
            find(&shrink, "ratio"),
            find(&shrink, "monotone_in_c0.violations"),
            find(&shrink, "monotone_in_m.violations"),
        ],
        None,
    );
    ledger.records(8, "Neumann eigenvalue on a 400-vertex path", &[find(&harnack, "neumann.path.mu2")], None);

    let (minimal, took) = timed("minimal-graph");
    ledger.records(
        9,
        "minimal-graph solver",
        &matching(&minimal, |n| n.starts_with("affine.") || n.starts_with("catenoid.")),
        None,
    );
    let identities = matching(&minimal, |n| n.starts_with("identity."));
    assert_eq!(identities.len(), 10);
    ledger.records(10, "catenoid identity suite at h=0.01", &identities, Some((took, Duration::from_secs(120))));
    ledger.records(
        11,
        "curvature audit scale invariance and density",
        &matching(&minimal, |n| {
            n.starts_with("audit.scale_invariance") || n == "audit.density_nondecreasing" || n == "audit.doubling"
        }),
        None,
    );

    let (bernstein, _) = timed("bernstein-audit");
    ledger.records(12, "Bernstein growth integral", &[find(&bernstein, "integral.loglog")], None);

    let (appendix, took) = timed("appendix-geodesics");
    assert_eq!(
        ExperimentConfig::parse("kind = appendix-geodesics\n").unwrap().appendix.samples,
        100_000
    );
    ledger.records(13, "great circles meet the arc set", &[find(&appendix, "hit_rate")], Some((took, Duration::from_secs(5))));

    let kinds = ExperimentKind::ALL.map(|k| k.name()).join(", ");
    let all = ExperimentConfig::parse(&format!("kind = {kinds}\nseed = {SEED}\n")).unwrap();
    let first = run(&all).unwrap().to_json();
    let second = run(&all).unwrap().to_json();
    ledger.line(
        14,
        "determinism of the full suite",
        first == second,
        format!("{} bytes, identical: {}", first.len(), first == second),
    );

    if ledger.failed != EXPECTED_FAILURES {
        eprintln!("unexpected acceptance outcome: failed {:?}, expected {:?}", ledger.failed, EXPECTED_FAILURES);
        std::process::exit(1);
    }
    println!("acceptance: {} of 14 criteria pass; expected failures {:?}", 14 - ledger.failed.len(), EXPECTED_FAILURES);
}
