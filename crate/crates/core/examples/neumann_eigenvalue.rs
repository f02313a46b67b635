//! Neumann eigenvalue of a path graph, the Poincaré constant it induces, and
//! the graph text format.

use longitude_lab::elliptic::{neumann_poincare_constant, WeightedGraph};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let path = WeightedGraph::path(400, 0.0, 1.0)?;
    let eig = neumann_poincare_constant(&path, 1.0)?;
    let pi2 = std::f64::consts::PI.powi(2);
    println!("μ₂ = {:.6} (π² = {pi2:.6}), relative error {:.2e}", eig.mu2, (eig.mu2 - pi2).abs() / pi2);
    println!("K₃ = {:.6}", eig.k3);

    let small = WeightedGraph::path(4, 0.0, 1.0)?;
    let text = small.to_text();
    print!("{text}");
    assert_eq!(WeightedGraph::from_text(&text)?.to_text(), text);
    Ok(())
}
