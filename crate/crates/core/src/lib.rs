//! # qubit-align
//!
//! Distinguishability of single-qubit mixed states through their purifications.
//!
//! Every purification of a qubit state `ρ(r) = ½(I + r·σ)` on a qubit ancilla is
//! described by Fano data `(r, γ, A)`, and all purifications of the same state are
//! related by right multiplication `A ↦ A S` with `S ∈ SO(3)`. Maximizing the overlap
//! between purifications of two states is then an orthogonal Procrustes problem
//! `max Tr(K S)` over proper rotations, solved in closed form by the SVD of `K`.
//!
//! The crate returns both the scalar result of that optimization (the maximal
//! overlap `g⋆ = √F`, the entropic distance `D_N`, Bures quantities) and its
//! geometric content: the optimal rotation `S⋆`, its angle `Θ` (the purification
//! misalignment angle), its axis, and the ancilla unitary `U⋆ ∈ SU(2)` realizing it.
//!
//! ## Modules
//!
//! - [`linalg3`]: fixed-size real 3-vectors and 3×3 matrices, a deterministic Jacobi SVD,
//!   Rodrigues rotations.
//! - [`qstate`]: Bloch vectors, density matrices, the spectral Uhlmann fidelity, entropies.
//! - [`purification`]: Fano-form purifications in the canonical gauge and their SO(3) orbit.
//! - [`procrustes`]: the Procrustes matrix, its solution, `Θ`, and the SU(2) lift.
//! - [`channels`]: affine Bloch-form qubit channels, Kraus conversion, closed-form overlaps.
//! - [`metrics`]: fidelity-based distances and the aggregated [`metrics::MetricReport`].
//! - [`sampling`]: seeded random states, rotations and SU(2) elements.
//! - [`sweep`]: channel spec strings, parameter sweeps, CSV output and the verification suites
//!   behind the `qubit-align` binary.
//!
//! ```
//! use qubit_align::{metrics::metric_report, qstate::BlochVector};
//!
//! let r = BlochVector::new(0.0, 0.0, 0.8).unwrap();
//! let s = BlochVector::new(0.0, 0.0, 0.4).unwrap();
//! let report = metric_report(&r, &s).unwrap();
//! assert!((report.g_star - 0.966_930_7).abs() < 1e-6);
//! assert!(report.theta.abs() < 1e-12);
//! ```

#![forbid(unsafe_code)]

pub mod channels;
pub mod error;
pub mod linalg3;
pub mod metrics;
pub mod procrustes;
pub mod purification;
pub mod qstate;
pub mod sampling;
pub mod sweep;

pub use error::{Error, Result};
