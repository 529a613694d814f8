//! Build channels from Kraus operators and compare with their affine Bloch forms.

use qubit_align::channels::{
    affine_from_kraus, amplitude_damping, imperfect_not, kraus_amplitude_damping, kraus_imperfect_not,
};
use qubit_align::qstate::BlochVector;

fn main() {
    let r = BlochVector::new(0.2, -0.5, 0.3).unwrap();

    let ks = kraus_amplitude_damping(0.4).unwrap();
    let from_kraus = affine_from_kraus(&ks);
    println!("amplitude damping, completeness error {:.1e}", ks.completeness_error());
    println!("{from_kraus}");
    println!("kraus  {}", from_kraus.apply(&r).unwrap());
    println!("affine {}", amplitude_damping(0.4).unwrap().apply(&r).unwrap());

    let ks = kraus_imperfect_not(0.3, 0.1).unwrap();
    let from_kraus = affine_from_kraus(&ks);
    println!("\nimperfect NOT, completeness error {:.1e}", ks.completeness_error());
    println!("{from_kraus}");
    println!("kraus  {}", from_kraus.apply(&r).unwrap());
    println!("affine {}", imperfect_not(0.3, 0.1).unwrap().apply(&r).unwrap());
}
