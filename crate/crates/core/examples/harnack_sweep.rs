//! Harnack ratio of `exp(√L x) cos y` for `A = diag(1, L)`: it grows like
//! `√L`, so the Harnack constant cannot be uniform in the ellipticity ratio.

use longitude_lab::elliptic::{harnack_sweep, SharpnessSetup};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let setup = SharpnessSetup {
        cells: 64,
        ..SharpnessSetup::default()
    };
    let sweep = harnack_sweep(&setup, &[1.0, 4.0, 16.0, 64.0])?;
    for (l, ratio) in &sweep.points {
        println!("L = {l:>4}: log sup - log inf = {ratio:.4}  (ratio / √L = {:.4})", ratio / l.sqrt());
    }
    println!("fitted exponent {:.4}", sweep.exponent);
    Ok(())
}
