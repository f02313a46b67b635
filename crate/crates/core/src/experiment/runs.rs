//! The individual experiments. Each one turns its parameter block into check
//! records and plot series.

use std::collections::BTreeMap;
use std::f64::consts::{E, FRAC_PI_2, PI};

use rand::Rng;
use rand_distr::StandardNormal;

use super::config::ExperimentConfig;
use super::report::{CheckRecord, Relation, Series};
use crate::elliptic::{
    harnack_ratio, neumann_poincare_constant, oscillation_decay, shrink_chain, solve_divergence, CoefficientField,
    Grid2d, SharpnessSetup, WeightedGraph,
};
use crate::harmonic::{harmonic_flow_with, image_shrink_check, tension, weak_residual_probe, EdgeForm, FlowOptions};
use crate::linalg::{dot, linear_fit, orthonormalize};
use crate::minimal::{
    bernstein_growth_audit, curvature_estimate_audit, gauss_harmonicity_residual, growth_integral,
    jacobi_identity_residual, longitude_ratio_from_slope, simons_kato_check, solve_mse, AuditOptions, GrowthVerdict,
    ImmersedPatch, MinimalGraph,
};
use crate::sphere::{
    build_convex_function, fd_hessian, geodesic, great_circle_hits_arcs, hess_linear, hess_r, hess_theta,
    hess_theta_pair, second_derivative_along, three_arc_set, LongitudeChart, SpherePoint, TangentVector,
};

pub(crate) type Outcome = Result<(Vec<CheckRecord>, Vec<Series>), String>;

struct Sink {
    experiment: &'static str,
    records: Vec<CheckRecord>,
    series: Vec<Series>,
}

impl Sink {
    fn new(experiment: &'static str) -> Self {
        Self {
            experiment,
            records: Vec::new(),
            series: Vec::new(),
        }
    }

    fn check(&mut self, name: impl Into<String>, measured: f64, relation: Relation, reference: f64, tolerance: f64) {
        self.records
            .push(CheckRecord::new(self.experiment, name, measured, relation, reference, tolerance));
    }

    fn flag(&mut self, name: impl Into<String>, ok: bool) {
        self.check(name, if ok { 1.0 } else { 0.0 }, Relation::Within, 1.0, 0.0);
    }

    fn series(&mut self, name: &str, x_label: &str, y_label: &str, log_log: bool, points: Vec<(f64, f64)>) {
        self.series.push(Series {
            experiment: self.experiment.to_string(),
            name: name.to_string(),
            x_label: x_label.to_string(),
            y_label: y_label.to_string(),
            log_log,
            points,
        });
    }

    fn done(self) -> Outcome {
        Ok((self.records, self.series))
    }
}

fn gaussian<R: Rng + ?Sized>(dim: usize, rng: &mut R) -> Vec<f64> {
    (0..dim).map(|_| rng.sample(StandardNormal)).collect()
}

/// Uniform point of `S^n`.
pub fn random_point<R: Rng + ?Sized>(n: usize, rng: &mut R) -> SpherePoint {
    loop {
        if let Ok(p) = SpherePoint::from_vector(gaussian(n + 1, rng)) {
            return p;
        }
    }
}

/// Uniformly rotated orthonormal frame of `T_x S^n`.
fn random_frame<R: Rng + ?Sized>(x: &SpherePoint, rng: &mut R) -> Vec<Vec<f64>> {
    let dim = x.coords().len();
    loop {
        let mut vs: Vec<Vec<f64>> = (0..dim - 1).map(|_| gaussian(dim, rng)).collect();
        orthonormalize(&mut vs, &[x.coords()]);
        if vs.len() == dim - 1 {
            return vs;
        }
    }
}

/// A tangent vector at `x` along the level set of `θ` (axes 0, 1). Its
/// plane part is `t (x_0, x_1)` with `t` a power of two, so `dθ(v)` vanishes
/// in floating point and not just up to rounding. Requires `x` off the
/// plane circle.
fn level_tangent<R: Rng + ?Sized>(x: &SpherePoint, rng: &mut R) -> Vec<f64> {
    let c = x.coords();
    let r2 = c[0] * c[0] + c[1] * c[1];
    let t = 2f64.powi(rng.random_range(-2..=1)) * if rng.random_bool(0.5) { 1.0 } else { -1.0 };
    let off = &c[2..];
    let mut w = gaussian(off.len(), rng);
    let k = (dot(off, &w) + t * r2) / dot(off, off);
    w.iter_mut().zip(off).for_each(|(wi, oi)| *wi -= k * oi);
    let mut v = vec![t * c[0], t * c[1]];
    v.extend(w);
    v
}

fn ratio_order(coarse: f64, fine: f64) -> f64 {
    (coarse.abs() / fine.abs()).log2()
}

pub(crate) fn hessians<R: Rng + ?Sized>(cfg: &ExperimentConfig, rng: &mut R) -> Outcome {
    let p = &cfg.hessians;
    let tol = p.tol * cfg.tolerance_scale;
    let mut sink = Sink::new("hessians");
    for &n in &p.dims {
        let (mut lin, mut hr, mut ht, mut level_closed, mut level_fd) = (0.0f64, 0.0f64, 0.0f64, 0.0f64, 0.0f64);
        for _ in 0..p.samples {
            let x = loop {
                let x = random_point(n, rng);
                let r = x.coords()[0].hypot(x.coords()[1]);
                if r >= p.min_radius && r <= (1.0 - p.min_radius * p.min_radius).sqrt() {
                    break x;
                }
            };
            let chart = LongitudeChart::continued_at(&x);
            let frame = random_frame(&x, rng);
            let a = gaussian(n + 1, rng);
            let fd_lin = fd_hessian(|y: &[f64]| dot(y, &a), &x, &frame, p.fd_step);
            lin = lin.max(hess_linear(&x, &a, &frame).max_abs_diff(&fd_lin));
            let closed_r = hess_r(&x, &chart, &frame).map_err(|e| e.to_string())?;
            hr = hr.max(closed_r.max_abs_diff(&fd_hessian(chart.r_fn(), &x, &frame, p.fd_step)));
            let closed_t = hess_theta(&x, &chart, &frame).map_err(|e| e.to_string())?;
            ht = ht.max(closed_t.max_abs_diff(&fd_hessian(chart.theta_fn(), &x, &frame, p.fd_step)));

            let v = level_tangent(&x, rng);
            let closed = hess_theta_pair(&x, &chart, &v, &v).map_err(|e| e.to_string())?;
            level_closed = level_closed.max(closed.abs());
            let theta = chart.theta_fn();
            let nv = dot(&v, &v).sqrt();
            let unit: Vec<f64> = v.iter().map(|c| c / nv).collect();
            level_fd = level_fd.max(second_derivative_along(&theta, x.coords(), &unit, p.fd_step).abs());
        }
        sink.check(format!("S{n}.hess_linear.max_error"), lin, Relation::AtMost, tol, 0.0);
        sink.check(format!("S{n}.hess_r.max_error"), hr, Relation::AtMost, tol, 0.0);
        sink.check(format!("S{n}.hess_theta.max_error"), ht, Relation::AtMost, tol, 0.0);
        sink.check(format!("S{n}.level_tangent.closed_form"), level_closed, Relation::AtMost, 0.0, 0.0);
        sink.check(format!("S{n}.level_tangent.oracle"), level_fd, Relation::AtMost, tol, 0.0);
    }

    // Spherical cap around (-1, 0, 0), well inside the standard chart.
    let centre = SpherePoint::from_vector(vec![-1.0, 0.0, 0.0]).expect("unit vector");
    let cos_max = p.cap_radius.cos();
    let samples: Vec<SpherePoint> = (0..p.cap_samples)
        .map(|_| {
            let dir = gaussian(3, rng);
            let t = TangentVector::project(centre.clone(), &dir).and_then(|t| t.normalized());
            let dist = rng.random_range(cos_max..=1.0f64).acos();
            t.and_then(|t| geodesic(&t, dist)).map_err(|e| e.to_string())
        })
        .collect::<Result<_, _>>()?;
    let built = build_convex_function(&samples, &LongitudeChart::standard()).map_err(|e| e.to_string())?;
    sink.check("convex_cap.min_eigenvalue", built.min_hessian_eigenvalue, Relation::Above, 0.0, 0.0);
    sink.done()
}

pub(crate) fn harnack(cfg: &ExperimentConfig) -> Outcome {
    let p = &cfg.harnack;
    let mut sink = Sink::new("harnack-sweep");
    let setup = SharpnessSetup {
        cells: p.cells,
        ..SharpnessSetup::default()
    };
    let grid = setup.grid().map_err(|e| e.to_string())?;
    let mut points = Vec::new();
    for &l in &p.l_values {
        let f = setup.solve(&grid, l).map_err(|e| e.to_string())?;
        let ratio = harnack_ratio(&f, &grid.graph, setup.radius).map_err(|e| e.to_string())?;
        let decay = oscillation_decay(&f, &grid.graph, setup.radius);
        sink.check(format!("oscillation.factor.L={l}"), decay.factor, Relation::Below, 1.0, 0.0);
        points.push((l.sqrt(), ratio));
    }
    if points.len() >= 2 {
        let (x, y): (Vec<f64>, Vec<f64>) = points.iter().map(|&(s, r)| ((s * s).ln(), r.ln())).unzip();
        let exponent = linear_fit(&x, &y).0;
        sink.check("harnack.exponent", exponent, Relation::Within, 0.5, 0.1 * cfg.tolerance_scale);
    }
    sink.series("harnack ratio vs sqrt L", "sqrt L", "log sup - log inf on B_{R/2}", true, points);

    let square = Grid2d::new(p.cells, p.cells, (-1.0, 1.0), (-1.0, 1.0)).map_err(|e| e.to_string())?;
    let bc = square.boundary_from(|x, y| x + 0.5 * y);
    let f = solve_divergence(&square.graph, &CoefficientField::Uniform(1.0), &bc).map_err(|e| e.to_string())?;
    let decay = oscillation_decay(&f, &square.graph, 1.0);
    sink.check(
        "oscillation.linear.factor",
        decay.factor,
        Relation::Within,
        0.5,
        2.0 / p.cells as f64 * cfg.tolerance_scale,
    );
    let curve = (0..5)
        .map(|k| {
            let r = 0.5f64.powi(k);
            (r, f.oscillation_on(&square.graph.ball(r)))
        })
        .collect();
    sink.series("oscillation decay", "R", "osc on B_R", true, curve);

    let path = WeightedGraph::path(p.path_vertices, 0.0, 1.0).map_err(|e| e.to_string())?;
    let eig = neumann_poincare_constant(&path, 1.0).map_err(|e| e.to_string())?;
    sink.check(
        "neumann.path.mu2",
        eig.mu2,
        Relation::Within,
        PI * PI,
        0.01 * PI * PI * cfg.tolerance_scale,
    );
    sink.done()
}

pub(crate) fn shrink(cfg: &ExperimentConfig) -> Outcome {
    let p = &cfg.shrink;
    let mut sink = Sink::new("shrink-chain");
    let m = p.m;
    let chain = shrink_chain(&|_| m, p.r0, p.c0, p.c2).map_err(|e| e.to_string())?;
    sink.check(
        "ratio",
        chain.ratio(),
        Relation::Within,
        p.expected_ratio,
        p.ratio_tol * cfg.tolerance_scale,
    );
    sink.check("ledger_sum", chain.ledger_sum, Relation::AtMost, chain.target, 0.0);

    let values: Vec<f64> = (0..p.grid)
        .map(|i| 0.2 + 1.8 * i as f64 / (p.grid - 1) as f64)
        .collect();
    let mut ratios = vec![vec![0.0; p.grid]; p.grid];
    let mut ledger_failures = 0;
    for (i, &c0) in values.iter().enumerate() {
        for (j, &mv) in values.iter().enumerate() {
            let c = shrink_chain(&|_| mv, p.r0, c0, p.c2).map_err(|e| e.to_string())?;
            ratios[i][j] = c.ratio();
            if !c.guarantee_holds() {
                ledger_failures += 1;
            }
        }
    }
    let mut in_c0 = 0;
    let mut in_m = 0;
    for i in 0..p.grid {
        for j in 0..p.grid {
            if i + 1 < p.grid && !(ratios[i + 1][j] < ratios[i][j]) {
                in_c0 += 1;
            }
            if j + 1 < p.grid && !(ratios[i][j + 1] < ratios[i][j]) {
                in_m += 1;
            }
        }
    }
    sink.check("monotone_in_c0.violations", in_c0 as f64, Relation::AtMost, 0.0, 0.0);
    sink.check("monotone_in_m.violations", in_m as f64, Relation::AtMost, 0.0, 0.0);
    sink.check("ledger_guarantee.violations", ledger_failures as f64, Relation::AtMost, 0.0, 0.0);
    let curve = values
        .iter()
        .enumerate()
        .map(|(j, &mv)| (mv, ratios[0][j]))
        .collect();
    sink.series(&format!("R1 over R0 vs M at C0={}", values[0]), "M", "R1/R0", false, curve);
    sink.done()
}

fn harmonic_boundary(x: f64, y: f64, n: usize) -> Vec<f64> {
    let mut v = vec![-1.0 + 0.3 * (3.0 * x).sin(), 0.9 * (x - 0.5) + 0.4 * y * y, 0.7 * (y - 0.5)];
    for k in 3..=n {
        v.push(0.3 * (2.0 * x * y + (k - 3) as f64).cos() / (k - 2) as f64);
    }
    v.truncate(n + 1);
    v
}

pub(crate) fn harmonic<R: Rng + ?Sized>(cfg: &ExperimentConfig, rng: &mut R) -> Outcome {
    let p = &cfg.harmonic;
    let mut sink = Sink::new("harmonic-map");
    let grid = Grid2d::new(p.cells, p.cells, (0.0, 1.0), (0.0, 1.0)).map_err(|e| e.to_string())?;
    let boundary = grid.boundary_vertices();
    let bc: BTreeMap<usize, SpherePoint> = boundary
        .iter()
        .map(|&v| {
            let q = grid.graph.position(v);
            SpherePoint::from_vector(harmonic_boundary(q[0], q[1], p.sphere_dim)).map(|s| (v, s))
        })
        .collect::<Result<_, _>>()
        .map_err(|e| e.to_string())?;
    let opts = FlowOptions {
        tol: p.flow_tol,
        ..FlowOptions::default()
    };
    let flow = harmonic_flow_with(&grid.graph, &bc, &opts).map_err(|e| e.to_string())?;
    let u = flow.field;
    let bound = 100.0 * p.flow_tol * cfg.tolerance_scale;
    let max_tension = tension(&grid.graph, &u, &boundary).into_iter().fold(0.0, f64::max);
    sink.check("tension.max", max_tension, Relation::AtMost, bound, 0.0);
    let chart = LongitudeChart::standard();
    for &form in &p.edge_forms {
        let probe = weak_residual_probe(&u, &grid.graph, &boundary, &chart, form, p.trials, rng)
            .map_err(|e| e.to_string())?;
        let name = match form {
            EdgeForm::ArithmeticMean => "arithmetic",
            EdgeForm::GeometricMean => "geometric",
            EdgeForm::Chordal => "chordal",
        };
        sink.check(format!("weak_residual.{name}"), probe.max_residual, Relation::AtMost, bound, 0.0);
    }
    let shrink = image_shrink_check(&u, &grid.graph, 0.5, 1.0, &chart).map_err(|e| e.to_string())?;
    sink.check("image_shrink.radius", shrink.radius, Relation::Below, FRAC_PI_2, 0.0);
    sink.done()
}

fn max_height_error(a: &MinimalGraph, b: &MinimalGraph) -> f64 {
    a.interior_nodes()
        .into_iter()
        .map(|n| (a.height(n) - b.height(n)).abs())
        .fold(0.0, f64::max)
}

struct IdentityRow {
    h: f64,
    jacobi_f: f64,
    jacobi_h: f64,
    simons: f64,
    kato: f64,
    gauss: f64,
}

fn identity_row(h: f64) -> Result<IdentityRow, String> {
    let mg = MinimalGraph::catenoid_annulus(h).map_err(|e| e.to_string())?;
    let patch = ImmersedPatch::from_graph(&mg);
    let geo = patch.geometry();
    let up = SpherePoint::basis(2, 2).expect("basis vector");
    let j = jacobi_identity_residual(&geo, &up).map_err(|e| e.to_string())?;
    let sk = simons_kato_check(&geo, 1.0).map_err(|e| e.to_string())?;
    Ok(IdentityRow {
        h: mg.spacing(),
        jacobi_f: j.res_f,
        jacobi_h: j.res_h,
        simons: sk.simons_residual,
        kato: sk.kato_slack,
        gauss: gauss_harmonicity_residual(&geo),
    })
}

pub(crate) fn minimal(cfg: &ExperimentConfig) -> Outcome {
    let p = &cfg.minimal;
    let scale = cfg.tolerance_scale;
    let mut sink = Sink::new("minimal-graph");

    let affine = MinimalGraph::square(-1.0, 1.0, 32, |x, y| 0.3 * x - 0.2 * y + 0.1).map_err(|e| e.to_string())?;
    let solved = solve_mse(&affine.with_interior(|_| 0.0)).map_err(|e| e.to_string())?;
    sink.check("affine.height_error", max_height_error(&solved.graph, &affine), Relation::AtMost, 1e-8 * scale, 0.0);
    let patch = ImmersedPatch::from_graph(&solved.graph);
    let geo = patch.geometry();
    let max_b = geo
        .level1_samples()
        .into_iter()
        .map(|s| geo.sample(s).expect("level-1 sample").norm_b_sq.sqrt())
        .fold(0.0, f64::max);
    sink.check("affine.max_b", max_b, Relation::AtMost, 1e-8 * scale, 0.0);

    let mut errors = Vec::new();
    let mut fine = None;
    for h in [2.0 * p.h, p.h] {
        let exact = MinimalGraph::catenoid_annulus(h).map_err(|e| e.to_string())?;
        let sol = solve_mse(&exact.with_interior(|_| 0.0)).map_err(|e| e.to_string())?;
        errors.push((exact.spacing(), max_height_error(&sol.graph, &exact)));
        fine = Some(sol.graph);
    }
    let fine = fine.expect("two resolutions");
    sink.check("catenoid.solve_order", ratio_order(errors[0].1, errors[1].1), Relation::AtLeast, 1.8, 0.0);
    let node = fine.nearest_node(1.0, 1.0);
    let fine_patch = ImmersedPatch::from_graph(&fine);
    let b2 = fine_patch
        .geometry()
        .sample(node)
        .map(|g| g.norm_b_sq)
        .ok_or("no stencil at rho = sqrt 2")?;
    sink.check("catenoid.b2_at_sqrt2", b2, Relation::Within, 0.5, 5.0 * fine.spacing() * scale);
    sink.series("catenoid solve error vs h", "h", "max height error", true, errors);

    let rows: Vec<IdentityRow> = [4.0 * p.h, 2.0 * p.h, p.h]
        .iter()
        .map(|&h| identity_row(h))
        .collect::<Result<_, _>>()?;
    let (coarse, finest) = (&rows[1], &rows[2]);
    let c = p.identity_constant * scale * finest.h;
    sink.check("identity.jacobi_f", finest.jacobi_f, Relation::AtMost, c, 0.0);
    sink.check("identity.jacobi_h", finest.jacobi_h, Relation::AtMost, c, 0.0);
    sink.check("identity.simons", finest.simons, Relation::AtMost, c, 0.0);
    sink.check("identity.kato_slack", finest.kato, Relation::AtLeast, -c, 0.0);
    sink.check("identity.gauss_tension", finest.gauss, Relation::AtMost, c, 0.0);
    for (name, a, b) in [
        ("jacobi_f", coarse.jacobi_f, finest.jacobi_f),
        ("jacobi_h", coarse.jacobi_h, finest.jacobi_h),
        ("simons", coarse.simons, finest.simons),
        ("kato_slack", coarse.kato.min(0.0), finest.kato.min(0.0)),
        ("gauss_tension", coarse.gauss, finest.gauss),
    ] {
        let order = if b == 0.0 && a == 0.0 { f64::INFINITY } else { ratio_order(a, b) };
        sink.check(format!("identity.{name}.order"), order, Relation::AtLeast, 1.0, 0.0);
    }
    sink.series(
        "simons residual vs h",
        "h",
        "max simons residual",
        true,
        rows.iter().map(|r| (r.h, r.simons)).collect(),
    );

    let exact = MinimalGraph::catenoid_annulus(p.h).map_err(|e| e.to_string())?;
    let y0 = exact.nearest_node(1.6, 0.0);
    let base = ImmersedPatch::from_graph(&exact);
    let audit = curvature_estimate_audit(&base, y0, p.audit_r0, &AuditOptions::default()).map_err(|e| e.to_string())?;
    sink.flag("audit.density_nondecreasing", audit.d_nondecreasing);
    sink.flag("audit.doubling", audit.doubling_holds);
    if let Some(lambda) = audit.lambda_r0 {
        sink.check("audit.lambda", lambda, Relation::Above, 0.0, 0.0);
    }
    let quick = AuditOptions {
        skip_lambda: true,
        ..AuditOptions::default()
    };
    for s in [3.0, 0.125] {
        let scaled = curvature_estimate_audit(&base.scaled(s), y0, p.audit_r0 * s, &quick).map_err(|e| e.to_string())?;
        sink.check(
            format!("audit.scale_invariance.s={s}"),
            scaled.scale_invariant_product,
            Relation::Within,
            audit.scale_invariant_product,
            1e-8 * scale,
        );
    }
    sink.series("volume density", "R", "D(y0, R)", false, audit.d_table.clone());
    sink.done()
}

pub(crate) fn bernstein(cfg: &ExperimentConfig) -> Outcome {
    let p = &cfg.bernstein;
    let mut sink = Sink::new("bernstein-audit");
    let c0 = p.c0;
    let m = move |t: f64| t.ln().ln() / c0;
    let integral = growth_integral(&m, c0, E, E.powf(E * E), p.panels);
    sink.check("integral.loglog", integral, Relation::Within, 2.0, 1e-3 * cfg.tolerance_scale);

    let radii: Vec<f64> = (2..=60).map(|k| 2f64.powi(k)).collect();
    // An entire affine graph has a constant Gauss map.
    let affine_m = longitude_ratio_from_slope(&[0.3, -0.2]).sqrt();
    let eps = p.epsilon;
    let tables: [(&str, Box<dyn Fn(f64) -> f64>, GrowthVerdict); 3] = [
        ("affine", Box::new(move |_| affine_m), GrowthVerdict::Satisfied),
        ("critical", Box::new(move |r: f64| eps * r.ln().ln()), GrowthVerdict::Satisfied),
        ("supercritical", Box::new(|r: f64| r.ln().sqrt()), GrowthVerdict::Violated),
    ];
    for (name, f, expected) in tables {
        let table: Vec<(f64, f64)> = radii.iter().map(|&r| (r, f(r))).collect();
        let audit = bernstein_growth_audit(&table, eps, c0).map_err(|e| e.to_string())?;
        sink.flag(format!("verdict.{name}"), audit.verdict == expected);
        if expected == GrowthVerdict::Satisfied {
            sink.check(format!("limit.{name}"), audit.limit, Relation::AtMost, eps * (1.0 + 1e-9) + 1e-12, 0.0);
        }
        if name == "critical" && c0 * eps <= 1.0 {
            sink.flag("divergence_bound.critical", audit.divergence_bound_holds);
        }
        let curve = audit.ratios.iter().map(|&(r, q)| (r.ln().ln(), q)).collect();
        sink.series(&format!("growth {name}"), "log log R", "M(R) / log log R", false, curve);
    }
    sink.done()
}

pub(crate) fn appendix<R: Rng + ?Sized>(cfg: &ExperimentConfig, rng: &mut R) -> Outcome {
    let mut sink = Sink::new("appendix-geodesics");
    let arcs = three_arc_set();
    let mut hits = 0usize;
    let mut drawn = 0usize;
    while drawn < cfg.appendix.samples {
        let x = random_point(2, rng);
        let t = gaussian(3, rng);
        match great_circle_hits_arcs(&x, &t, &arcs) {
            Ok(h) => {
                drawn += 1;
                hits += h.hit as usize;
            }
            Err(crate::sphere::GeometryError::DegenerateCircle) => continue,
            Err(e) => return Err(e.to_string()),
        }
    }
    let rate = if drawn == 0 { 1.0 } else { hits as f64 / drawn as f64 };
    sink.check("hit_rate", rate, Relation::Within, 1.0, 0.0);
    sink.done()
}
