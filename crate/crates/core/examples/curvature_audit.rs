//! Inputs of the curvature estimate at one point of the catenoid: volume
//! density, Neumann constant, Gauss-map longitude bound and the power chain.

use longitude_lab::minimal::{curvature_estimate_audit, AuditOptions, AuditReport, ImmersedPatch, MinimalGraph};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let mg = MinimalGraph::catenoid_annulus(0.02)?;
    let y0 = mg.nearest_node(1.6, 0.0);
    let patch = ImmersedPatch::from_graph(&mg);
    let report = curvature_estimate_audit(&patch, y0, 0.3, &AuditOptions::default())?;
    for (r, d) in &report.d_table {
        println!("R = {r:.4}: density {d:.6}");
    }
    println!("nondecreasing {}, doubling {}", report.d_nondecreasing, report.doubling_holds);
    println!("Λ = {:?}", report.lambda_r0);
    println!("|B|(y0) R0 = {:.6}", report.scale_invariant_product);

    let scaled = curvature_estimate_audit(&patch.scaled(5.0), y0, 1.5, &AuditOptions { skip_lambda: true, ..AuditOptions::default() })?;
    println!("after scaling by 5: {:.6}", scaled.scale_invariant_product);

    let json = report.to_json();
    assert_eq!(AuditReport::from_json(&json)?, report);
    println!("{json}");
    Ok(())
}
