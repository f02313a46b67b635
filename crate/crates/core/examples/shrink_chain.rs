//! Image-shrinking radius `R₁` from the oscillation-decay constants.

use longitude_lab::elliptic::shrink_chain;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let chain = shrink_chain(&|_| 1.0, 1.0, 1.0, std::f64::consts::TAU)?;
    println!("C1 = {:.6}, R1/R0 = {:.6}", chain.big_c1, chain.ratio());
    println!(
        "{} dyadic steps, ledger sum {:.4} <= {:.4}: {}",
        chain.depth,
        chain.ledger_sum,
        chain.target,
        chain.guarantee_holds()
    );
    for m in [0.5, 1.0, 2.0] {
        let c = shrink_chain(&|_| m, 1.0, 1.0, std::f64::consts::TAU)?;
        println!("M = {m}: R1/R0 = {:.3e}", c.ratio());
    }
    Ok(())
}
