//! Every great circle of S² meets the three-arc set on the equator.

use longitude_lab::experiment::random_point;
use longitude_lab::sphere::{great_circle_hits_arcs, three_arc_set};
use rand::{Rng, SeedableRng};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let arcs = three_arc_set();
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(11);
    let trials = 20_000;
    let mut hits = 0;
    for _ in 0..trials {
        let p = random_point(2, &mut rng);
        let t: Vec<f64> = (0..3).map(|_| rng.random_range(-1.0..1.0)).collect();
        if great_circle_hits_arcs(&p, &t, &arcs)?.hit {
            hits += 1;
        }
    }
    println!("{hits} of {trials} random great circles hit the arc set");
    Ok(())
}
