//! Lift the optimal rotation to SU(2) and check that conjugation reproduces it.

use qubit_align::linalg3::Vec3;
use qubit_align::procrustes::optimal_overlap;
use qubit_align::qstate::BlochVector;

fn main() {
    let pairs = [
        ((0.3, -0.4, 0.2), (0.1, 0.5, 0.6)),
        ((0.0, 0.0, 0.8), (0.0, 0.0, 0.4)),
        ((0.0, 0.0, 0.6), (1e-7, 0.0, -0.5)),
    ];
    for ((a, b, c), (x, y, z)) in pairs {
        let r = BlochVector::new(a, b, c).unwrap();
        let s = BlochVector::new(x, y, z).unwrap();
        let res = optimal_overlap(&r, &s).unwrap();
        let worst = [Vec3::X, Vec3::Y, Vec3::Z]
            .iter()
            .map(|&v| (res.u_star.adjoint_action(v) - res.s_star.apply(v)).norm())
            .fold(0.0, f64::max);
        println!(
            "theta = {:.9}  unitarity error {:.1e}  conjugation error {:.1e}",
            res.theta,
            res.u_star.unitarity_error(),
            worst
        );
    }
}
