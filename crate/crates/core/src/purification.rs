//! Fano-form purifications of qubit states.
//!
//! A purification of `ρ(r)` on a qubit ancilla is described by `(r, γ, A)`: the system
//! Bloch vector, the ancilla Bloch vector and the 3×3 correlation matrix
//! `Aᵢⱼ = ⟨σᵢ ⊗ σⱼ⟩`. Purity of the two-qubit state forces
//!
//! ```text
//! A Aᵀ = (1 − ‖r‖²) I + r rᵀ,   Aᵀ A = (1 − ‖γ‖²) I + γ γᵀ,   det A = ‖r‖² − 1,   γ = Aᵀ r.
//! ```
//!
//! Every other purification of the same state is `(r, Sᵀγ, A S)` for some `S ∈ SO(3)`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg3::{minimal_rotation_to, Mat3, Rotation3, Vec3};
use crate::qstate::BlochVector;

/// Tolerance on the purity constraints.
pub const PURITY_TOL: f64 = 1e-10;

/// Fano data `(r, γ, A)` of a two-qubit pure state.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FanoPurification {
    r: BlochVector,
    gamma: Vec3,
    a: Mat3,
}

impl FanoPurification {
    /// Checks all purity constraints to [`PURITY_TOL`].
    pub fn new(r: BlochVector, gamma: Vec3, a: Mat3) -> Result<Self> {
        if !gamma.is_finite() || !a.is_finite() {
            return Err(Error::InvalidPurification("non-finite Fano data".into()));
        }
        let p = FanoPurification { r, gamma, a };
        let v = p.constraint_violation();
        if v > PURITY_TOL {
            return Err(Error::InvalidPurification(format!(
                "purity constraints violated by {v:e}"
            )));
        }
        Ok(p)
    }

    pub(crate) fn new_unchecked(r: BlochVector, gamma: Vec3, a: Mat3) -> Self {
        FanoPurification { r, gamma, a }
    }

    pub fn r(&self) -> BlochVector {
        self.r
    }

    pub fn gamma(&self) -> Vec3 {
        self.gamma
    }

    pub fn a(&self) -> &Mat3 {
        &self.a
    }

    /// Largest violation among the five purity constraints.
    pub fn constraint_violation(&self) -> f64 {
        let r = self.r.vec();
        let g = self.gamma;
        let a = self.a;
        let aat = (a * a.transpose()).max_abs_diff(&(Mat3::identity() * (1.0 - r.norm_squared()) + r.outer(r)));
        let ata = (a.transpose() * a).max_abs_diff(&(Mat3::identity() * (1.0 - g.norm_squared()) + g.outer(g)));
        let det = (a.det() - (r.norm_squared() - 1.0)).abs();
        let link = (a.transpose() * r - g).max_abs();
        let norms = (g.norm() - r.norm()).abs();
        aat.max(ata).max(det).max(link).max(norms)
    }
}

/// Frame data of the canonical gauge `A_r = O(n_r) · diag(α, α, −1)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CanonicalGaugeData {
    /// `O(n_r)`, the minimal rotation taking ẑ to `r/‖r‖` (identity for `r = 0`).
    pub o: Rotation3,
    /// `diag(α, α, −1)`.
    pub d: Mat3,
    /// `α = √(1 − ‖r‖²)`.
    pub alpha: f64,
}

impl CanonicalGaugeData {
    pub fn a(&self) -> Mat3 {
        *self.o.matrix() * self.d
    }
}

pub fn canonical_gauge(r: &BlochVector) -> CanonicalGaugeData {
    let o = match r.vec().normalized() {
        Some(n) => minimal_rotation_to(n).expect("normalized vector is a unit vector"),
        None => Rotation3::identity(),
    };
    gauge_with_frame(r, o)
}

pub(crate) fn gauge_with_frame(r: &BlochVector, o: Rotation3) -> CanonicalGaugeData {
    let alpha = r.mixedness().sqrt();
    CanonicalGaugeData {
        o,
        d: Mat3::diag(alpha, alpha, -1.0),
        alpha,
    }
}

/// The reference purification of the canonical gauge: `A = O(n_r) diag(α, α, −1)`,
/// `γ = Aᵀ r = −‖r‖ ẑ`.
pub fn canonical_purification(r: &BlochVector) -> FanoPurification {
    let gauge = canonical_gauge(r);
    FanoPurification::new_unchecked(*r, Vec3::Z * -r.norm(), gauge.a())
}

/// `(r, Sᵀγ, A S)`: the purification obtained by rotating the ancilla frame.
pub fn rotate_purification(p: &FanoPurification, s: &Rotation3) -> FanoPurification {
    FanoPurification::new_unchecked(p.r, s.transpose().apply(p.gamma), p.a * *s.matrix())
}

/// Squared overlap `|⟨Ψ_ρ|Ψ_σ⟩|² = ¼[1 + r·s + γ·δ + Tr(AᵀB)]`, clamped to `[0, 1]`.
pub fn fano_overlap_squared(p: &FanoPurification, q: &FanoPurification) -> f64 {
    let v = 0.25 * (1.0 + p.r.vec().dot(q.r.vec()) + p.gamma.dot(q.gamma) + p.a.frobenius_dot(&q.a));
    v.clamp(0.0, 1.0)
}
