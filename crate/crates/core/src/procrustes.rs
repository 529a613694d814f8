//! The Procrustes alignment of two canonical purifications.
//!
//! With `B = B̃ S` and `δ = Sᵀ δ̃`, the overlap of the purifications of `ρ(r)` and `ρ(s)`
//! is `¼[1 + r·s + Tr(K S)]` where `K = Aᵀ B̃ + γ δ̃ᵀ`. In the canonical gauge this is
//! `K = D_r R_rs D_s + ‖r‖‖s‖ ẑẑᵀ`. Maximizing over `S ∈ SO(3)` gives
//! `S⋆ = V Λ Uᵀ` from the SVD `K = U Σ Vᵀ`, with `Λ = diag(1, 1, det(V Uᵀ))`.

use crate::error::{Error, Result};
use crate::linalg3::{
    axis_angle_from_rotation, minimal_rotation_to, svd3, AxisAngle, Mat3, Rotation3, Vec3,
};
use crate::purification::{
    fano_overlap_squared, gauge_with_frame, rotate_purification, CanonicalGaugeData,
    FanoPurification,
};
use crate::qstate::{adjoint2, mul2, pauli, pauli_dot, trace2, BlochVector, CMat2, C64};

/// Singular-value gap below which the optimal rotation is flagged as possibly non-unique.
pub const DEGENERACY_TOL: f64 = 1e-9;

/// A solved Procrustes problem `max Tr(K S)` over proper rotations.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ProcrustesSolve {
    pub rotation: Rotation3,
    /// `Tr(K S⋆)` evaluated directly.
    pub max_trace: f64,
    /// `σ₁ + σ₂ + sgn(det(V Uᵀ)) σ₃`.
    pub closed_form: f64,
    pub singular_values: [f64; 3],
    /// `sgn(det(V Uᵀ))`.
    pub det_sign: f64,
}

/// Everything the alignment of two states produces.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ProcrustesResult {
    pub s_star: Rotation3,
    pub k: Mat3,
    pub singular_values: [f64; 3],
    pub max_trace: f64,
    pub g_star: f64,
    /// Rotation angle of `S⋆`, in `[0, π]`.
    pub theta: f64,
    /// Rotation axis of `S⋆` (ẑ when `theta` vanishes).
    pub axis: Vec3,
    pub u_star: SU2Lift,
    pub degenerate: bool,
}

/// A 2×2 special unitary `U` acting on the ancilla, with `U†(v·σ)U = (S v)·σ`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SU2Lift(CMat2);

impl SU2Lift {
    pub fn matrix(&self) -> &CMat2 {
        &self.0
    }

    /// `U†(v·σ)U`, read back as a Bloch vector.
    pub fn adjoint_action(&self, v: Vec3) -> Vec3 {
        let m = mul2(&mul2(&adjoint2(&self.0), &pauli_dot(v)), &self.0);
        let comp = |i: usize| 0.5 * trace2(&mul2(&pauli(i), &m)).re;
        Vec3::new(comp(1), comp(2), comp(3))
    }

    /// The rotation induced by the adjoint action.
    pub fn rotation_matrix(&self) -> Mat3 {
        Mat3::from_cols(
            self.adjoint_action(Vec3::X),
            self.adjoint_action(Vec3::Y),
            self.adjoint_action(Vec3::Z),
        )
    }

    /// Largest entry of `|U†U − I|`.
    pub fn unitarity_error(&self) -> f64 {
        let p = mul2(&adjoint2(&self.0), &self.0);
        let mut e = 0.0f64;
        for i in 0..2 {
            for j in 0..2 {
                let target = if i == j { 1.0 } else { 0.0 };
                e = e.max((p[i][j] - C64::new(target, 0.0)).norm());
            }
        }
        e
    }
}

/// `U = cos(θ/2) I + i sin(θ/2) û·σ`, so that `U†(v·σ)U = (S v)·σ`; `−i û·σ` at `θ = π`.
pub fn lift_su2(a: &AxisAngle) -> Result<SU2Lift> {
    let a = AxisAngle::new(a.axis, a.angle)?;
    let one = C64::new(1.0, 0.0);
    let zero = C64::new(0.0, 0.0);
    if a.angle == 0.0 {
        return Ok(SU2Lift([[one, zero], [zero, one]]));
    }
    let us = pauli_dot(a.axis);
    if a.angle == std::f64::consts::PI {
        let mi = C64::new(0.0, -1.0);
        return Ok(SU2Lift([[us[0][0] * mi, us[0][1] * mi], [us[1][0] * mi, us[1][1] * mi]]));
    }
    let (s, c) = (0.5 * a.angle).sin_cos();
    let is = C64::new(0.0, s);
    Ok(SU2Lift([
        [one * c + us[0][0] * is, us[0][1] * is],
        [us[1][0] * is, one * c + us[1][1] * is],
    ]))
}

fn frame(v: &BlochVector) -> Option<Rotation3> {
    v.vec()
        .normalized()
        .map(|n| minimal_rotation_to(n).expect("unit vector"))
}

/// Canonical gauges for a pair; a zero vector borrows its partner's frame.
fn pair_gauges(r: &BlochVector, s: &BlochVector) -> (CanonicalGaugeData, CanonicalGaugeData) {
    let (fr, fs) = (frame(r), frame(s));
    let or = fr.or(fs).unwrap_or_else(Rotation3::identity);
    let os = fs.or(fr).unwrap_or_else(Rotation3::identity);
    (gauge_with_frame(r, or), gauge_with_frame(s, os))
}

fn gauge_purification(v: &BlochVector, g: &CanonicalGaugeData) -> FanoPurification {
    FanoPurification::new_unchecked(*v, Vec3::Z * -v.norm(), g.a())
}

/// `K = D_r R_rs D_s + ‖r‖‖s‖ ẑẑᵀ` with `R_rs = O(n_r)ᵀ O(n_s)`.
pub fn procrustes_matrix(r: &BlochVector, s: &BlochVector) -> Result<Mat3> {
    let (gr, gs) = pair_gauges(r, s);
    Ok(gauge_k(r, s, &gr, &gs))
}

fn gauge_k(r: &BlochVector, s: &BlochVector, gr: &CanonicalGaugeData, gs: &CanonicalGaugeData) -> Mat3 {
    let rrs = gr.o.transpose().compose(&gs.o);
    let mut k = gr.d * *rrs.matrix() * gs.d;
    k[(2, 2)] += r.norm() * s.norm();
    k
}

/// `K = Aᵀ B + γ δᵀ` straight from two purifications.
pub fn fano_procrustes_matrix(p: &FanoPurification, q: &FanoPurification) -> Mat3 {
    p.a().transpose() * *q.a() + p.gamma().outer(q.gamma())
}

/// `S⋆ = V Λ Uᵀ` maximizing `Tr(K S)` over `SO(3)`.
pub fn procrustes_solve(k: &Mat3) -> Result<ProcrustesSolve> {
    let svd = svd3(k)?;
    let vut = svd.v * svd.u.transpose();
    let det_sign = if vut.det() < 0.0 { -1.0 } else { 1.0 };
    let rot = svd.v * Mat3::diag(1.0, 1.0, det_sign) * svd.u.transpose();
    let [s1, s2, s3] = svd.sigma;
    Ok(ProcrustesSolve {
        rotation: Rotation3::from_matrix_unchecked(rot),
        max_trace: (*k * rot).trace(),
        closed_form: s1 + s2 + det_sign * s3,
        singular_values: svd.sigma,
        det_sign,
    })
}

/// Maximal purification overlap `g⋆ = √F` and the rotation realizing it.
///
/// Follows the canonical-gauge pipeline: gauges, `K`, SVD, `S⋆`, aligned data
/// `B⋆ = B̃ S⋆`, `δ⋆ = S⋆ᵀ δ̃`, then `g⋆² = ¼[1 + r·s + γ·δ⋆ + Tr(Aᵀ B⋆)]`.
pub fn optimal_overlap(r: &BlochVector, s: &BlochVector) -> Result<ProcrustesResult> {
    let (gr, gs) = pair_gauges(r, s);
    let k = gauge_k(r, s, &gr, &gs);
    let sol = procrustes_solve(&k)?;

    if r.vec() == s.vec() {
        // Same state: S⋆ = I and g⋆ = 1 exactly, without roundoff from the pipeline.
        return Ok(ProcrustesResult {
            s_star: Rotation3::identity(),
            k,
            singular_values: sol.singular_values,
            max_trace: k.trace(),
            g_star: 1.0,
            theta: 0.0,
            axis: Vec3::Z,
            u_star: lift_su2(&AxisAngle { axis: Vec3::Z, angle: 0.0 })?,
            degenerate: sol.singular_values[1] - sol.singular_values[2] < DEGENERACY_TOL,
        });
    }

    let p = gauge_purification(r, &gr);
    let q = rotate_purification(&gauge_purification(s, &gs), &sol.rotation);
    let g_star = fano_overlap_squared(&p, &q).sqrt();
    let aa = axis_angle_from_rotation(&sol.rotation);
    Ok(ProcrustesResult {
        s_star: sol.rotation,
        k,
        singular_values: sol.singular_values,
        max_trace: sol.max_trace,
        g_star,
        theta: aa.angle,
        axis: aa.axis,
        u_star: lift_su2(&aa)?,
        degenerate: sol.singular_values[1] - sol.singular_values[2] < DEGENERACY_TOL,
    })
}

/// The purification misalignment angle `Θ(ρ, σ)`: the rotation angle of `S⋆`.
pub fn misalignment_angle(r: &BlochVector, s: &BlochVector) -> Result<f64> {
    optimal_overlap(r, s).map(|res| res.theta)
}

/// Checks a rotation against its SU(2) lift; returns the largest conjugation mismatch.
pub fn lift_mismatch(s: &Rotation3, u: &SU2Lift) -> f64 {
    u.rotation_matrix().max_abs_diff(s.matrix())
}

impl ProcrustesResult {
    /// `U⋆` as an error-checked value, for callers that rebuilt the axis-angle pair.
    pub fn check_lift(&self) -> Result<()> {
        let e = lift_mismatch(&self.s_star, &self.u_star);
        if e > 1e-10 {
            return Err(Error::InvalidInput(format!("SU(2) lift mismatch {e:e}")));
        }
        Ok(())
    }
}
