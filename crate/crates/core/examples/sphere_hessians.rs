//! Closed-form Hessians of the longitude function and of `r` against a
//! geodesic finite-difference oracle, then a strictly convex function on a cap.

use longitude_lab::sphere::{
    build_convex_function, fd_hessian, geodesic, hess_r, hess_theta, tangent_basis, LongitudeChart, SpherePoint,
    TangentVector,
};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let x = SpherePoint::from_vector(vec![0.3, -0.5, 0.6, 0.2])?;
    let chart = LongitudeChart::continued_at(&x);
    let basis = tangent_basis(&x);
    let closed_theta = hess_theta(&x, &chart, &basis)?;
    let closed_r = hess_r(&x, &chart, &basis)?;
    let fd_theta = fd_hessian(chart.theta_fn(), &x, &basis, 1e-3);
    let fd_r = fd_hessian(chart.r_fn(), &x, &basis, 1e-3);
    println!("Hess θ at {:?}:", x.coords());
    for row in closed_theta.entries().row_iter() {
        println!("  {}", row.iter().map(|v| format!("{v:>9.5}")).collect::<Vec<_>>().join(" "));
    }
    println!("max |closed - oracle|: θ {:.2e}, r {:.2e}", closed_theta.max_abs_diff(&fd_theta), closed_r.max_abs_diff(&fd_r));

    // Points within π/6 of (-1, 0, 0) on S².
    let centre = SpherePoint::from_vector(vec![-1.0, 0.0, 0.0])?;
    let mut cap = Vec::new();
    for i in 0..12 {
        let a = i as f64 * std::f64::consts::TAU / 12.0;
        let dir = TangentVector::new(centre.clone(), vec![0.0, a.cos(), a.sin()])?;
        for k in 0..=4 {
            cap.push(geodesic(&dir, k as f64 * std::f64::consts::PI / 24.0)?);
        }
    }
    let built = build_convex_function(&cap, &LongitudeChart::standard())?;
    println!(
        "convex F on {} cap points: c = {:.4}, λ = {}, min Hess F eigenvalue = {:.4}",
        built.sample_count, built.c, built.lambda, built.min_hessian_eigenvalue
    );
    Ok(())
}
