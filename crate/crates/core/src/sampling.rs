//! Seeded random states, rotations and unitaries for the verification suites.

use std::f64::consts::PI;

use rand::Rng;

use crate::linalg3::{Mat3, Rotation3, Vec3};
use crate::qstate::{BlochVector, CMat2, C64};

/// Uniform point on the unit sphere.
pub fn unit_vector<R: Rng + ?Sized>(rng: &mut R) -> Vec3 {
    let z: f64 = rng.gen_range(-1.0..=1.0);
    let phi: f64 = rng.gen_range(0.0..2.0 * PI);
    let t = (1.0 - z * z).max(0.0).sqrt();
    Vec3::new(t * phi.cos(), t * phi.sin(), z)
}

/// Uniform point in the Bloch ball.
pub fn ball_state<R: Rng + ?Sized>(rng: &mut R) -> BlochVector {
    let radius = rng.gen_range(0.0f64..=1.0).cbrt();
    BlochVector::from_vec(unit_vector(rng) * radius).expect("inside the ball")
}

/// Uniform pure state.
pub fn pure_state<R: Rng + ?Sized>(rng: &mut R) -> BlochVector {
    BlochVector::from_vec(unit_vector(rng)).expect("on the sphere")
}

/// Haar-uniform proper rotation (Shoemake's unit-quaternion construction).
pub fn rotation<R: Rng + ?Sized>(rng: &mut R) -> Rotation3 {
    let q = quaternion(rng);
    let [w, x, y, z] = q;
    let m = Mat3::from_rows([
        [1.0 - 2.0 * (y * y + z * z), 2.0 * (x * y - w * z), 2.0 * (x * z + w * y)],
        [2.0 * (x * y + w * z), 1.0 - 2.0 * (x * x + z * z), 2.0 * (y * z - w * x)],
        [2.0 * (x * z - w * y), 2.0 * (y * z + w * x), 1.0 - 2.0 * (x * x + y * y)],
    ]);
    Rotation3::from_matrix_unchecked(m)
}

/// Haar-uniform element of SU(2).
pub fn su2<R: Rng + ?Sized>(rng: &mut R) -> CMat2 {
    let [w, x, y, z] = quaternion(rng);
    let a = C64::new(w, z);
    let b = C64::new(y, x);
    [[a, b], [-b.conj(), a.conj()]]
}

fn quaternion<R: Rng + ?Sized>(rng: &mut R) -> [f64; 4] {
    let u1: f64 = rng.gen();
    let u2: f64 = rng.gen_range(0.0..2.0 * PI);
    let u3: f64 = rng.gen_range(0.0..2.0 * PI);
    let a = (1.0 - u1).sqrt();
    let b = u1.sqrt();
    [b * u3.cos(), a * u2.sin(), a * u2.cos(), b * u3.sin()]
}
