//! A discrete harmonic map from the unit square into S³, the weak equation of
//! its longitude, and the image-shrinking check.

use std::collections::BTreeMap;

use longitude_lab::elliptic::Grid2d;
use longitude_lab::harmonic::{
    harmonic_flow_with, image_shrink_check, weak_residual_probe, EdgeForm, FlowOptions, SphereField,
};
use longitude_lab::sphere::{LongitudeChart, SpherePoint};
use rand::SeedableRng;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let grid = Grid2d::new(24, 24, (0.0, 1.0), (0.0, 1.0))?;
    let boundary = grid.boundary_vertices();
    let mut data = BTreeMap::new();
    for &v in &boundary {
        let p = grid.graph.position(v);
        let (x, y) = (p[0], p[1]);
        data.insert(v, SpherePoint::from_vector(vec![-1.0, x - 0.5, 0.6 * (y - 0.5), 0.2 * (x * y).cos()])?);
    }
    let opts = FlowOptions {
        tol: 1e-11,
        ..FlowOptions::default()
    };
    let flow = harmonic_flow_with(&grid.graph, &data, &opts)?;
    println!("converged after {} sweeps", flow.iterations);

    let chart = LongitudeChart::standard();
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(1);
    for form in [EdgeForm::ArithmeticMean, EdgeForm::Chordal] {
        let probe = weak_residual_probe(&flow.field, &grid.graph, &boundary, &chart, form, 20, &mut rng)?;
        println!("{form:?}: max weak residual {:.3e}", probe.max_residual);
    }

    let shrink = image_shrink_check(&flow.field, &grid.graph, 0.5, 1.0, &chart)?;
    println!(
        "image of B_{:.3} lies in the geodesic ball of radius {:.4} about {:?}",
        shrink.r1,
        shrink.radius,
        shrink.center.coords()
    );

    let text = flow.field.to_text();
    let back = SphereField::from_text(&text)?;
    println!("SphereField text: {} bytes, {} points read back", text.len(), back.len());
    Ok(())
}
