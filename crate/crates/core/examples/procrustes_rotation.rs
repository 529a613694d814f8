//! The optimal SO(3) alignment of two canonical purifications, checked against random rotations.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use qubit_align::procrustes::{optimal_overlap, procrustes_matrix, procrustes_solve};
use qubit_align::qstate::BlochVector;
use qubit_align::sampling;

fn main() {
    let r = BlochVector::new(0.7, 0.0, 0.0).unwrap();
    let s = BlochVector::new(0.0, 0.2, 0.2).unwrap();
    let k = procrustes_matrix(&r, &s).unwrap();
    let sol = procrustes_solve(&k).unwrap();
    let res = optimal_overlap(&r, &s).unwrap();

    println!("singular values of K: {:?}", sol.singular_values);
    println!("max Tr(K S) = {:.15} (closed form {:.15})", sol.max_trace, sol.closed_form);
    println!("S* = {:?}", res.s_star.matrix());
    println!("theta = {:.12} rad about {:?}", res.theta, res.axis);

    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let best_random = (0..200_000)
        .map(|_| (k * *sampling::rotation(&mut rng).matrix()).trace())
        .fold(f64::NEG_INFINITY, f64::max);
    println!("best of 2e5 random rotations: {best_random:.15}");
}
