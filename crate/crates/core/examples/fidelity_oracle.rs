//! The Procrustes overlap against the matrix square-root fidelity on random states.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use qubit_align::procrustes::optimal_overlap;
use qubit_align::qstate::{density_from_bloch, uhlmann_fidelity};
use qubit_align::sampling;

fn main() {
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    let mut worst = 0.0f64;
    for _ in 0..5000 {
        let r = sampling::ball_state(&mut rng);
        let s = sampling::ball_state(&mut rng);
        let g = optimal_overlap(&r, &s).unwrap().g_star;
        let f = uhlmann_fidelity(&density_from_bloch(&r), &density_from_bloch(&s));
        worst = worst.max((g - f.sqrt()).abs());
    }
    println!("5000 random pairs, max |g* - sqrt F| = {worst:.3e}");
}
