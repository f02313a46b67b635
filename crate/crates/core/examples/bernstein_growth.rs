//! Growth audit of `M(R)` against `log log R` and the divergent integral that
//! drives the Bernstein argument.

use std::f64::consts::E;

use longitude_lab::minimal::{bernstein_growth_audit, growth_integral};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let c0 = 1.0;
    let m = |t: f64| t.ln().ln() / c0;
    let integral = growth_integral(&m, c0, E, E.powf(E * E), 2000);
    println!("∫ t⁻¹ exp(-C₀ M) dt from e to e^(e²) = {integral:.10} (exact 2)");

    let radii: Vec<f64> = (2..=40).map(|k| 2f64.powi(k)).collect();
    for (name, f) in [
        ("log log R", Box::new(|r: f64| r.ln().ln()) as Box<dyn Fn(f64) -> f64>),
        ("sqrt log R", Box::new(|r: f64| r.ln().sqrt())),
    ] {
        let table: Vec<(f64, f64)> = radii.iter().map(|&r| (r, f(r))).collect();
        let audit = bernstein_growth_audit(&table, 1.0, c0)?;
        println!(
            "M = {name}: limit {:.4}, tail slope {:.2e}, verdict {:?}, divergence bound {}",
            audit.limit, audit.tail_slope, audit.verdict, audit.divergence_bound_holds
        );
    }
    Ok(())
}
