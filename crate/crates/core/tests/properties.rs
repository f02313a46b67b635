use longitude_lab::elliptic::shrink_chain;
use longitude_lab::experiment::ExperimentConfig;
use longitude_lab::minimal::{discrete_area, solve_mse, triangle_ball_area, MinimalGraph};
use longitude_lab::sphere::{geodesic, hess_theta_pair, rotate_about_axis, LongitudeChart, SpherePoint, TangentVector};
use nalgebra::Vector3;
use proptest::prelude::*;

fn sphere_point(n: usize) -> impl Strategy<Value = SpherePoint> {
    prop::collection::vec(-1.0..1.0f64, n + 1)
        .prop_filter_map("near zero", |v| SpherePoint::from_vector(v).ok())
}

fn vec3() -> impl Strategy<Value = Vector3<f64>> {
    (-2.0..2.0f64, -2.0..2.0f64, -2.0..2.0f64).prop_map(|(a, b, c)| Vector3::new(a, b, c))
}

proptest! {
    #[test]
    fn geodesics_stay_on_sphere_at_unit_speed(x in sphere_point(3), raw in prop::collection::vec(-1.0..1.0f64, 4), t in -3.0..3.0f64) {
        let v = TangentVector::project(x.clone(), &raw);
        prop_assume!(v.is_ok());
        let v = v.unwrap().normalized();
        prop_assume!(v.is_ok());
        let y = geodesic(&v.unwrap(), t).unwrap();
        let norm: f64 = y.coords().iter().map(|c| c * c).sum::<f64>().sqrt();
        prop_assert!((norm - 1.0).abs() < 1e-12);
        prop_assert!((x.distance(&y) - t.abs()).abs() < 1e-9);
    }

    #[test]
    fn hess_theta_vanishes_on_level_tangents(x in sphere_point(4), raw in prop::collection::vec(-1.0..1.0f64, 5)) {
        let chart = LongitudeChart::standard();
        prop_assume!(chart.lift(&x).is_ok());
        let c = x.coords();
        // Gradient of θ in the ambient space is (-x₁, x₀, 0, ...)/r², already tangent.
        let g: Vec<f64> = (0..c.len()).map(|i| match i { 0 => -c[1], 1 => c[0], _ => 0.0 }).collect();
        let v = TangentVector::project(x.clone(), &raw).unwrap();
        let gg: f64 = g.iter().map(|a| a * a).sum();
        let k = v.dir().iter().zip(&g).map(|(a, b)| a * b).sum::<f64>() / gg;
        let w: Vec<f64> = v.dir().iter().zip(&g).map(|(a, b)| a - k * b).collect();
        let (_, dtheta) = chart.differentials(c, &w);
        prop_assert!(dtheta.abs() < 1e-12);
        let scale = 1.0 + w.iter().map(|a| a * a).sum::<f64>();
        prop_assert!(hess_theta_pair(&x, &chart, &w, &w).unwrap().abs() < 1e-10 * scale / chart.radius(c));
    }

    #[test]
    fn rotations_about_the_axis_preserve_norm(raw in prop::collection::vec(-1.0..1.0f64, 3), angle in -7.0..7.0f64) {
        let y = rotate_about_axis(&raw, angle);
        let before: f64 = raw.iter().map(|a| a * a).sum();
        let after: f64 = y.iter().map(|a| a * a).sum();
        prop_assert!((before - after).abs() < 1e-12);
    }

    #[test]
    fn shrink_ratio_decreases_in_c0_and_m(c0 in 0.1..3.0f64, dc in 0.0..1.0f64, m in 0.0..1.5f64, dm in 0.0..0.5f64) {
        let c2 = 2.0 * std::f64::consts::PI;
        let base = shrink_chain(&|_| m, 1.0, c0, c2).unwrap().ratio();
        let more_c0 = shrink_chain(&|_| m, 1.0, c0 + dc, c2).unwrap().ratio();
        let more_m = shrink_chain(&|_| m + dm, 1.0, c0, c2).unwrap().ratio();
        prop_assert!(base > 0.0 && base <= 0.5);
        prop_assert!(more_c0 <= base);
        prop_assert!(more_m <= base);
    }

    #[test]
    fn ball_area_is_monotone_and_bounded(a in vec3(), b in vec3(), c in vec3(), centre in vec3(), r in 0.0..4.0f64, dr in 0.0..2.0f64) {
        let full = 0.5 * (b - a).cross(&(c - a)).norm();
        let small = triangle_ball_area([a, b, c], &centre, r);
        let large = triangle_ball_area([a, b, c], &centre, r + dr);
        prop_assert!(small >= -1e-12);
        prop_assert!(small <= large + 1e-10 * (1.0 + full));
        prop_assert!(large <= full + 1e-10 * (1.0 + full));
    }

    #[test]
    fn affine_boundary_data_is_a_fixed_point(a in -1.5..1.5f64, b in -1.5..1.5f64, c in -1.0..1.0f64) {
        let exact = MinimalGraph::square(-1.0, 1.0, 10, |x, y| a * x + b * y + c).unwrap();
        let start = exact.with_interior(|_| 0.0);
        let sol = solve_mse(&start).unwrap();
        for (p, q) in sol.graph.heights().iter().zip(exact.heights()) {
            prop_assert!((p - q).abs() < 1e-8);
        }
        let area = 4.0 * (1.0 + a * a + b * b).sqrt();
        prop_assert!((discrete_area(&sol.graph) - area).abs() < 1e-8 * area);
    }

    #[test]
    fn config_seed_and_scale_survive_canonical_text(seed in any::<u64>(), scale in 0.01..100.0f64) {
        let cfg = ExperimentConfig::parse(&format!("kind = shrink-chain\nseed = {seed}\ntolerance_scale = {scale:e}\n")).unwrap();
        prop_assert_eq!(cfg.seed, seed);
        prop_assert_eq!(cfg.tolerance_scale, scale);
        let back = ExperimentConfig::parse(&cfg.canonical_text()).unwrap();
        prop_assert_eq!(back.seed, seed);
        prop_assert_eq!(back.tolerance_scale, scale);
        prop_assert_eq!(back.hash(), cfg.hash());
    }
}

#[test]
fn scaled_graph_area_scales_quadratically() {
    let mg = MinimalGraph::square(-1.0, 1.0, 12, |x, y| 0.3 * x * y).unwrap();
    let scaled = mg.scaled(3.0);
    assert!((discrete_area(&scaled) - 9.0 * discrete_area(&mg)).abs() < 1e-10);
}
