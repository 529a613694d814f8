//! Qubit states: Bloch vectors, density matrices, and spectral quantities.
//!
//! The Uhlmann fidelity here is computed directly from 2×2 matrices and never touches
//! the purification machinery, so it serves as an independent check of
//! [`crate::procrustes::optimal_overlap`].

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg3::{Mat3, Vec3};
use crate::purification::FanoPurification;

/// Validity tolerance for states supplied by callers.
pub const STATE_TOL: f64 = 1e-9;

/// Eigenvalues below this are treated as exactly zero (the state is rank deficient).
pub(crate) const EIGEN_SNAP: f64 = 2.5e-15;

pub type C64 = Complex64;
pub type CMat2 = [[C64; 2]; 2];
pub type CMat4 = [[C64; 4]; 4];

const ZERO: C64 = C64::new(0.0, 0.0);
const ONE: C64 = C64::new(1.0, 0.0);
const I: C64 = C64::new(0.0, 1.0);

/// The identity followed by σx, σy, σz.
pub fn pauli(i: usize) -> CMat2 {
    match i {
        0 => [[ONE, ZERO], [ZERO, ONE]],
        1 => [[ZERO, ONE], [ONE, ZERO]],
        2 => [[ZERO, -I], [I, ZERO]],
        3 => [[ONE, ZERO], [ZERO, -ONE]],
        _ => panic!("pauli index {i} out of range"),
    }
}

/// `v · σ` for a real vector.
pub fn pauli_dot(v: Vec3) -> CMat2 {
    let mut m = [[ZERO; 2]; 2];
    for k in 0..3 {
        m = add2(&m, &scale2(&pauli(k + 1), C64::from(v[k])));
    }
    m
}

pub fn mul2(a: &CMat2, b: &CMat2) -> CMat2 {
    let mut m = [[ZERO; 2]; 2];
    for i in 0..2 {
        for j in 0..2 {
            m[i][j] = a[i][0] * b[0][j] + a[i][1] * b[1][j];
        }
    }
    m
}

pub fn add2(a: &CMat2, b: &CMat2) -> CMat2 {
    [[a[0][0] + b[0][0], a[0][1] + b[0][1]], [a[1][0] + b[1][0], a[1][1] + b[1][1]]]
}

pub fn scale2(a: &CMat2, s: C64) -> CMat2 {
    [[a[0][0] * s, a[0][1] * s], [a[1][0] * s, a[1][1] * s]]
}

pub fn adjoint2(a: &CMat2) -> CMat2 {
    [[a[0][0].conj(), a[1][0].conj()], [a[0][1].conj(), a[1][1].conj()]]
}

pub fn trace2(a: &CMat2) -> C64 {
    a[0][0] + a[1][1]
}

pub fn det2(a: &CMat2) -> C64 {
    a[0][0] * a[1][1] - a[0][1] * a[1][0]
}

pub fn max_abs_diff2(a: &CMat2, b: &CMat2) -> f64 {
    let mut d: f64 = 0.0;
    for i in 0..2 {
        for j in 0..2 {
            d = d.max((a[i][j] - b[i][j]).norm());
        }
    }
    d
}

pub fn kron(a: &CMat2, b: &CMat2) -> CMat4 {
    let mut m = [[ZERO; 4]; 4];
    for i in 0..2 {
        for j in 0..2 {
            for k in 0..2 {
                for l in 0..2 {
                    m[2 * i + k][2 * j + l] = a[i][j] * b[k][l];
                }
            }
        }
    }
    m
}

pub fn mul4(a: &CMat4, b: &CMat4) -> CMat4 {
    let mut m = [[ZERO; 4]; 4];
    for i in 0..4 {
        for j in 0..4 {
            m[i][j] = (0..4).map(|k| a[i][k] * b[k][j]).sum();
        }
    }
    m
}

pub fn trace4(a: &CMat4) -> C64 {
    (0..4).map(|i| a[i][i]).sum()
}

pub fn max_abs_diff4(a: &CMat4, b: &CMat4) -> f64 {
    let mut d: f64 = 0.0;
    for i in 0..4 {
        for j in 0..4 {
            d = d.max((a[i][j] - b[i][j]).norm());
        }
    }
    d
}

/// Trace over the second (ancilla) factor.
pub fn partial_trace_ancilla(p: &CMat4) -> CMat2 {
    let mut m = [[ZERO; 2]; 2];
    for i in 0..2 {
        for j in 0..2 {
            m[i][j] = p[2 * i][2 * j] + p[2 * i + 1][2 * j + 1];
        }
    }
    m
}

/// Trace over the first (system) factor.
pub fn partial_trace_system(p: &CMat4) -> CMat2 {
    let mut m = [[ZERO; 2]; 2];
    for k in 0..2 {
        for l in 0..2 {
            m[k][l] = p[k][l] + p[2 + k][2 + l];
        }
    }
    m
}

/// Spectral decomposition of a 2×2 Hermitian matrix.
///
/// Returns eigenvalues in descending order and the matching orthonormal eigenvectors.
pub fn hermitian_eigen2(h: &CMat2) -> ([f64; 2], [[C64; 2]; 2]) {
    let a = h[0][0].re;
    let d = h[1][1].re;
    let b = 0.5 * (h[0][1] + h[1][0].conj());
    let mean = 0.5 * (a + d);
    let half = 0.5 * (a - d);
    let rad = half.hypot(b.norm());
    if rad == 0.0 {
        return ([mean, mean], [[ONE, ZERO], [ZERO, ONE]]);
    }
    let v = if half >= 0.0 {
        [C64::from(rad + half), b.conj()]
    } else {
        [b, C64::from(rad - half)]
    };
    let n = (v[0].norm_sqr() + v[1].norm_sqr()).sqrt();
    let v_hi = [v[0] / n, v[1] / n];
    let v_lo = [-v_hi[1].conj(), v_hi[0].conj()];
    ([mean + rad, mean - rad], [v_hi, v_lo])
}

fn from_spectrum(vals: [f64; 2], vecs: &[[C64; 2]; 2]) -> CMat2 {
    let mut m = [[ZERO; 2]; 2];
    for k in 0..2 {
        for i in 0..2 {
            for j in 0..2 {
                m[i][j] += vecs[k][i] * vecs[k][j].conj() * vals[k];
            }
        }
    }
    m
}

/// A Bloch vector `r` with `‖r‖ ≤ 1`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BlochVector(Vec3);

impl std::fmt::Display for BlochVector {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        self.0.fmt(f)
    }
}

impl BlochVector {
    pub fn new(x: f64, y: f64, z: f64) -> Result<Self> {
        Self::from_vec(Vec3::new(x, y, z))
    }

    /// Accepts vectors up to `1 + 1e-9` in length; slightly long vectors are scaled back
    /// onto the unit sphere.
    pub fn from_vec(v: Vec3) -> Result<Self> {
        if !v.is_finite() {
            return Err(Error::InvalidState(format!("non-finite Bloch vector {v}")));
        }
        let n = v.norm();
        if n > 1.0 + STATE_TOL {
            return Err(Error::InvalidState(format!(
                "Bloch vector {v} has norm {n} > 1"
            )));
        }
        if n > 1.0 {
            return Ok(BlochVector(v * (1.0 / n)));
        }
        Ok(BlochVector(v))
    }

    /// `r (sinθ cosφ, sinθ sinφ, cosθ)` with polar angle `theta` and azimuth `phi` in radians.
    pub fn from_spherical(radius: f64, theta: f64, phi: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&radius) {
            return Err(Error::InvalidState(format!("radius {radius} outside [0, 1]")));
        }
        Self::from_vec(Vec3::new(
            radius * theta.sin() * phi.cos(),
            radius * theta.sin() * phi.sin(),
            radius * theta.cos(),
        ))
    }

    pub fn zero() -> Self {
        BlochVector(Vec3::ZERO)
    }

    pub fn vec(&self) -> Vec3 {
        self.0
    }

    pub fn norm(&self) -> f64 {
        self.0.norm()
    }

    /// `1 − ‖r‖²`, clamped at zero and snapped to zero for numerically pure states.
    pub fn mixedness(&self) -> f64 {
        let g = 1.0 - self.0.norm_squared();
        if g < 4.0 * EIGEN_SNAP {
            0.0
        } else {
            g
        }
    }
}

impl From<BlochVector> for Vec3 {
    fn from(b: BlochVector) -> Vec3 {
        b.0
    }
}

/// A 2×2 density matrix.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DensityMatrix(CMat2);

impl DensityMatrix {
    /// Validates Hermiticity, unit trace and positivity to [`STATE_TOL`].
    pub fn new(m: CMat2) -> Result<Self> {
        if m.iter().flatten().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(Error::InvalidState("non-finite density matrix entry".into()));
        }
        let herm = max_abs_diff2(&m, &adjoint2(&m));
        if herm > STATE_TOL {
            return Err(Error::InvalidState(format!("matrix is not Hermitian (off by {herm:e})")));
        }
        let tr = trace2(&m);
        if (tr - ONE).norm() > STATE_TOL {
            return Err(Error::InvalidState(format!("trace {tr} is not 1")));
        }
        let (vals, _) = hermitian_eigen2(&m);
        if vals[1] < -STATE_TOL {
            return Err(Error::InvalidState(format!(
                "matrix has negative eigenvalue {}",
                vals[1]
            )));
        }
        Ok(DensityMatrix(m))
    }

    pub fn matrix(&self) -> &CMat2 {
        &self.0
    }

    /// Eigenvalues in descending order, clamped to `[0, 1]` and with roundoff-level values
    /// set to zero.
    pub fn eigenvalues(&self) -> [f64; 2] {
        let (vals, _) = hermitian_eigen2(&self.0);
        vals.map(snap)
    }

    pub fn sqrt(&self) -> CMat2 {
        let (vals, vecs) = hermitian_eigen2(&self.0);
        from_spectrum(vals.map(|v| snap(v).sqrt()), &vecs)
    }

    /// `U ρ U†`.
    pub fn conjugate(&self, u: &CMat2) -> DensityMatrix {
        DensityMatrix(mul2(&mul2(u, &self.0), &adjoint2(u)))
    }

    /// Equal-weight mixture `(ρ + σ)/2`.
    pub fn midpoint(&self, o: &DensityMatrix) -> DensityMatrix {
        DensityMatrix(scale2(&add2(&self.0, &o.0), C64::from(0.5)))
    }
}

fn snap(v: f64) -> f64 {
    if v < EIGEN_SNAP {
        0.0
    } else {
        v.min(1.0)
    }
}

/// `ρ(r) = ½(I + r·σ)`.
pub fn density_from_bloch(r: &BlochVector) -> DensityMatrix {
    let v = r.vec();
    DensityMatrix([
        [C64::from(0.5 * (1.0 + v.z)), C64::new(0.5 * v.x, -0.5 * v.y)],
        [C64::new(0.5 * v.x, 0.5 * v.y), C64::from(0.5 * (1.0 - v.z))],
    ])
}

/// `rᵢ = Tr(ρ σᵢ)`.
pub fn bloch_from_density(rho: &DensityMatrix) -> Result<BlochVector> {
    let m = rho.matrix();
    BlochVector::from_vec(Vec3::new(
        (m[0][1] + m[1][0]).re,
        (m[1][0] - m[0][1]).im,
        (m[0][0] - m[1][1]).re,
    ))
}

/// Uhlmann fidelity `F(ρ, σ) = [Tr √(√ρ σ √ρ)]²` by spectral decomposition.
///
/// `√ρ` comes from the eigendecomposition of `ρ`; the eigenvalues of `M = √ρ σ √ρ`
/// come from its trace and its determinant `det ρ · det σ` (evaluated from the
/// eigenvalues of both states, so that rank deficiency is exact).
pub fn uhlmann_fidelity(rho: &DensityMatrix, sigma: &DensityMatrix) -> f64 {
    let sqrt_rho = rho.sqrt();
    let m = mul2(&mul2(&sqrt_rho, sigma.matrix()), &sqrt_rho);
    let tr = trace2(&m).re.max(0.0);
    let [a0, a1] = rho.eigenvalues();
    let [b0, b1] = sigma.eigenvalues();
    let det = (a0 * a1) * (b0 * b1);
    let disc = (tr * tr - 4.0 * det).max(0.0).sqrt();
    let hi = 0.5 * (tr + disc);
    let lo = if hi > 0.0 { det / hi } else { 0.0 };
    let amp = hi.sqrt() + lo.max(0.0).sqrt();
    (amp * amp).clamp(0.0, 1.0)
}

/// Von Neumann entropy `−Tr(ρ log₂ ρ)` in bits, with `0 log 0 = 0`.
pub fn von_neumann_entropy(rho: &DensityMatrix) -> f64 {
    rho.eigenvalues()
        .iter()
        .filter(|&&l| l > 0.0)
        .map(|&l| -l * l.log2())
        .sum::<f64>()
        .clamp(0.0, 1.0)
}

/// Equal-weight quantum Jensen–Shannon divergence (Holevo quantity of `{½ρ, ½σ}`), in bits.
pub fn qjsd(rho: &DensityMatrix, sigma: &DensityMatrix) -> f64 {
    let mid = rho.midpoint(sigma);
    (von_neumann_entropy(&mid) - 0.5 * von_neumann_entropy(rho) - 0.5 * von_neumann_entropy(sigma))
        .clamp(0.0, 1.0)
}

/// The two-qubit projector `¼(I⊗I + r·σ⊗I + I⊗γ·σ + Σ Aᵢⱼ σᵢ⊗σⱼ)`.
pub fn projector_from_fano(p: &FanoPurification) -> CMat4 {
    let r = p.r().vec();
    let g = p.gamma();
    let a = p.a();
    let mut coeff = [[0.0; 4]; 4];
    coeff[0][0] = 1.0;
    for i in 0..3 {
        coeff[i + 1][0] = r[i];
        coeff[0][i + 1] = g[i];
        for j in 0..3 {
            coeff[i + 1][j + 1] = a[(i, j)];
        }
    }
    let mut m = [[ZERO; 4]; 4];
    for (i, row) in coeff.iter().enumerate() {
        for (j, &c) in row.iter().enumerate() {
            if c == 0.0 {
                continue;
            }
            let t = kron(&pauli(i), &pauli(j));
            for k in 0..4 {
                for l in 0..4 {
                    m[k][l] += t[k][l] * (0.25 * c);
                }
            }
        }
    }
    m
}

/// A normalized pure state on system ⊗ ancilla, amplitudes indexed `2·s + a`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PureBipartiteState([C64; 4]);

impl PureBipartiteState {
    pub fn new(amps: [C64; 4]) -> Result<Self> {
        let n: f64 = amps.iter().map(|z| z.norm_sqr()).sum();
        if !n.is_finite() || (n - 1.0).abs() > STATE_TOL {
            return Err(Error::InvalidState(format!("bipartite state has norm² {n}")));
        }
        Ok(PureBipartiteState(amps))
    }

    pub fn amplitudes(&self) -> &[C64; 4] {
        &self.0
    }

    pub fn projector(&self) -> CMat4 {
        let mut m = [[ZERO; 4]; 4];
        for i in 0..4 {
            for j in 0..4 {
                m[i][j] = self.0[i] * self.0[j].conj();
            }
        }
        m
    }

    /// `(I ⊗ U)|ψ⟩`.
    pub fn apply_ancilla(&self, u: &CMat2) -> PureBipartiteState {
        let mut out = [ZERO; 4];
        for s in 0..2 {
            for a in 0..2 {
                out[2 * s + a] = u[a][0] * self.0[2 * s] + u[a][1] * self.0[2 * s + 1];
            }
        }
        PureBipartiteState(out)
    }

    pub fn inner(&self, o: &PureBipartiteState) -> C64 {
        self.0.iter().zip(o.0.iter()).map(|(a, b)| a.conj() * b).sum()
    }

    /// Pauli expectation values `(⟨σᵢ⊗I⟩, ⟨I⊗σⱼ⟩, ⟨σᵢ⊗σⱼ⟩)`.
    pub fn pauli_expectations(&self) -> (Vec3, Vec3, Mat3) {
        let p = self.projector();
        let expect = |i: usize, j: usize| -> f64 { trace4(&mul4(&p, &kron(&pauli(i), &pauli(j)))).re };
        let r = Vec3::new(expect(1, 0), expect(2, 0), expect(3, 0));
        let g = Vec3::new(expect(0, 1), expect(0, 2), expect(0, 3));
        let mut a = Mat3::zeros();
        for i in 0..3 {
            for j in 0..3 {
                a[(i, j)] = expect(i + 1, j + 1);
            }
        }
        (r, g, a)
    }
}
