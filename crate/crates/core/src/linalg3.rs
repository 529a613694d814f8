//! Fixed-size real linear algebra in three dimensions.
//!
//! Everything here is a plain value type with deterministic arithmetic: the SVD uses a
//! fixed cyclic Jacobi sweep order and a fixed sign convention, so identical inputs give
//! bit-identical outputs on every run.

use std::fmt;
use std::ops::{Add, AddAssign, Index, IndexMut, Mul, Neg, Sub};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Tolerance used when validating rotations and axes supplied from outside the library.
pub const INPUT_TOL: f64 = 1e-9;

/// Above this angle the axis is taken from the symmetric part of the rotation, whose
/// `+1` eigenvector stays well conditioned up to and including the half-turn.
pub const EIGEN_AXIS_ANGLE: f64 = std::f64::consts::FRAC_PI_2;

/// Below this angle the rotation axis is undefined and reported as ẑ.
pub const SMALL_ANGLE_TOL: f64 = 1e-12;

const MAX_SWEEPS: usize = 30;
const JACOBI_OFF_TOL: f64 = 1e-15;

/// A real 3-vector.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct Vec3 {
    pub x: f64,
    pub y: f64,
    pub z: f64,
}

impl Vec3 {
    pub const ZERO: Vec3 = Vec3 { x: 0.0, y: 0.0, z: 0.0 };
    pub const X: Vec3 = Vec3 { x: 1.0, y: 0.0, z: 0.0 };
    pub const Y: Vec3 = Vec3 { x: 0.0, y: 1.0, z: 0.0 };
    pub const Z: Vec3 = Vec3 { x: 0.0, y: 0.0, z: 1.0 };

    pub const fn new(x: f64, y: f64, z: f64) -> Self {
        Vec3 { x, y, z }
    }

    pub fn from_array(a: [f64; 3]) -> Self {
        Vec3::new(a[0], a[1], a[2])
    }

    pub fn to_array(self) -> [f64; 3] {
        [self.x, self.y, self.z]
    }

    pub fn dot(self, o: Vec3) -> f64 {
        self.x * o.x + self.y * o.y + self.z * o.z
    }

    pub fn cross(self, o: Vec3) -> Vec3 {
        Vec3::new(
            self.y * o.z - self.z * o.y,
            self.z * o.x - self.x * o.z,
            self.x * o.y - self.y * o.x,
        )
    }

    pub fn norm_squared(self) -> f64 {
        self.dot(self)
    }

    pub fn norm(self) -> f64 {
        self.x.hypot(self.y).hypot(self.z)
    }

    /// Unit vector in the same direction, or `None` for the zero vector.
    pub fn normalized(self) -> Option<Vec3> {
        let n = self.norm();
        if n > 0.0 && n.is_finite() {
            Some(self * (1.0 / n))
        } else {
            None
        }
    }

    pub fn is_finite(self) -> bool {
        self.x.is_finite() && self.y.is_finite() && self.z.is_finite()
    }

    pub fn max_abs(self) -> f64 {
        self.x.abs().max(self.y.abs()).max(self.z.abs())
    }

    /// Index of the component with the largest magnitude (first one on ties).
    pub fn argmax_abs(self) -> usize {
        let a = self.to_array();
        let mut best = 0;
        for i in 1..3 {
            if a[i].abs() > a[best].abs() {
                best = i;
            }
        }
        best
    }

    /// Cross-product matrix `[v]ₓ`, so that `[v]ₓ w = v × w`.
    pub fn skew(self) -> Mat3 {
        Mat3::from_rows([
            [0.0, -self.z, self.y],
            [self.z, 0.0, -self.x],
            [-self.y, self.x, 0.0],
        ])
    }

    /// Outer product `self · otherᵀ`.
    pub fn outer(self, o: Vec3) -> Mat3 {
        let a = self.to_array();
        let b = o.to_array();
        let mut m = Mat3::zeros();
        for i in 0..3 {
            for j in 0..3 {
                m.0[i][j] = a[i] * b[j];
            }
        }
        m
    }
}

impl Index<usize> for Vec3 {
    type Output = f64;
    fn index(&self, i: usize) -> &f64 {
        match i {
            0 => &self.x,
            1 => &self.y,
            2 => &self.z,
            _ => panic!("Vec3 index {i} out of range"),
        }
    }
}

impl IndexMut<usize> for Vec3 {
    fn index_mut(&mut self, i: usize) -> &mut f64 {
        match i {
            0 => &mut self.x,
            1 => &mut self.y,
            2 => &mut self.z,
            _ => panic!("Vec3 index {i} out of range"),
        }
    }
}

impl Add for Vec3 {
    type Output = Vec3;
    fn add(self, o: Vec3) -> Vec3 {
        Vec3::new(self.x + o.x, self.y + o.y, self.z + o.z)
    }
}

impl Sub for Vec3 {
    type Output = Vec3;
    fn sub(self, o: Vec3) -> Vec3 {
        Vec3::new(self.x - o.x, self.y - o.y, self.z - o.z)
    }
}

impl Neg for Vec3 {
    type Output = Vec3;
    fn neg(self) -> Vec3 {
        Vec3::new(-self.x, -self.y, -self.z)
    }
}

impl Mul<f64> for Vec3 {
    type Output = Vec3;
    fn mul(self, s: f64) -> Vec3 {
        Vec3::new(self.x * s, self.y * s, self.z * s)
    }
}

impl Mul<Vec3> for f64 {
    type Output = Vec3;
    fn mul(self, v: Vec3) -> Vec3 {
        v * self
    }
}

impl fmt::Display for Vec3 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {}, {})", self.x, self.y, self.z)
    }
}

/// A real 3×3 matrix stored row-major: `m.0[i][j]` is row `i`, column `j`.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct Mat3(pub [[f64; 3]; 3]);

impl Mat3 {
    pub const fn zeros() -> Self {
        Mat3([[0.0; 3]; 3])
    }

    pub const fn identity() -> Self {
        Mat3([[1.0, 0.0, 0.0], [0.0, 1.0, 0.0], [0.0, 0.0, 1.0]])
    }

    pub const fn from_rows(rows: [[f64; 3]; 3]) -> Self {
        Mat3(rows)
    }

    pub fn from_cols(c0: Vec3, c1: Vec3, c2: Vec3) -> Self {
        Mat3([[c0.x, c1.x, c2.x], [c0.y, c1.y, c2.y], [c0.z, c1.z, c2.z]])
    }

    /// Row-major slice of nine entries.
    pub fn from_row_slice(v: &[f64]) -> Result<Self> {
        if v.len() != 9 {
            return Err(Error::InvalidInput(format!(
                "a 3x3 matrix needs 9 entries, got {}",
                v.len()
            )));
        }
        let mut m = Mat3::zeros();
        for (k, x) in v.iter().enumerate() {
            m.0[k / 3][k % 3] = *x;
        }
        Ok(m)
    }

    pub fn diag(a: f64, b: f64, c: f64) -> Self {
        Mat3([[a, 0.0, 0.0], [0.0, b, 0.0], [0.0, 0.0, c]])
    }

    pub fn row(&self, i: usize) -> Vec3 {
        Vec3::from_array(self.0[i])
    }

    pub fn col(&self, j: usize) -> Vec3 {
        Vec3::new(self.0[0][j], self.0[1][j], self.0[2][j])
    }

    pub fn set_col(&mut self, j: usize, v: Vec3) {
        self.0[0][j] = v.x;
        self.0[1][j] = v.y;
        self.0[2][j] = v.z;
    }

    pub fn transpose(&self) -> Mat3 {
        let a = &self.0;
        Mat3([
            [a[0][0], a[1][0], a[2][0]],
            [a[0][1], a[1][1], a[2][1]],
            [a[0][2], a[1][2], a[2][2]],
        ])
    }

    pub fn trace(&self) -> f64 {
        self.0[0][0] + self.0[1][1] + self.0[2][2]
    }

    pub fn det(&self) -> f64 {
        let a = &self.0;
        a[0][0] * (a[1][1] * a[2][2] - a[1][2] * a[2][1])
            - a[0][1] * (a[1][0] * a[2][2] - a[1][2] * a[2][0])
            + a[0][2] * (a[1][0] * a[2][1] - a[1][1] * a[2][0])
    }

    /// Inverse via the adjugate, or `None` when the determinant vanishes.
    pub fn inverse(&self) -> Option<Mat3> {
        let d = self.det();
        if d == 0.0 || !d.is_finite() {
            return None;
        }
        let a = &self.0;
        let mut inv = Mat3::zeros();
        for i in 0..3 {
            for j in 0..3 {
                let (r0, r1) = ((j + 1) % 3, (j + 2) % 3);
                let (c0, c1) = ((i + 1) % 3, (i + 2) % 3);
                inv.0[i][j] = (a[r0][c0] * a[r1][c1] - a[r0][c1] * a[r1][c0]) / d;
            }
        }
        Some(inv)
    }

    pub fn is_finite(&self) -> bool {
        self.0.iter().flatten().all(|x| x.is_finite())
    }

    pub fn max_abs(&self) -> f64 {
        self.0.iter().flatten().fold(0.0, |acc, x| acc.max(x.abs()))
    }

    pub fn max_abs_diff(&self, o: &Mat3) -> f64 {
        (*self - *o).max_abs()
    }

    /// Frobenius inner product `Tr(selfᵀ o)`.
    pub fn frobenius_dot(&self, o: &Mat3) -> f64 {
        let mut s = 0.0;
        for i in 0..3 {
            for j in 0..3 {
                s += self.0[i][j] * o.0[i][j];
            }
        }
        s
    }

    pub fn to_row_vec(&self) -> Vec<f64> {
        self.0.iter().flatten().copied().collect()
    }
}

impl Index<(usize, usize)> for Mat3 {
    type Output = f64;
    fn index(&self, (i, j): (usize, usize)) -> &f64 {
        &self.0[i][j]
    }
}

impl IndexMut<(usize, usize)> for Mat3 {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut f64 {
        &mut self.0[i][j]
    }
}

impl Add for Mat3 {
    type Output = Mat3;
    fn add(self, o: Mat3) -> Mat3 {
        let mut m = self;
        m += o;
        m
    }
}

impl AddAssign for Mat3 {
    fn add_assign(&mut self, o: Mat3) {
        for i in 0..3 {
            for j in 0..3 {
                self.0[i][j] += o.0[i][j];
            }
        }
    }
}

impl Sub for Mat3 {
    type Output = Mat3;
    fn sub(self, o: Mat3) -> Mat3 {
        let mut m = self;
        for i in 0..3 {
            for j in 0..3 {
                m.0[i][j] -= o.0[i][j];
            }
        }
        m
    }
}

impl Mul<f64> for Mat3 {
    type Output = Mat3;
    fn mul(self, s: f64) -> Mat3 {
        let mut m = self;
        m.0.iter_mut().flatten().for_each(|x| *x *= s);
        m
    }
}

impl Mul for Mat3 {
    type Output = Mat3;
    fn mul(self, o: Mat3) -> Mat3 {
        let mut m = Mat3::zeros();
        for i in 0..3 {
            for j in 0..3 {
                m.0[i][j] = self.0[i][0] * o.0[0][j] + self.0[i][1] * o.0[1][j] + self.0[i][2] * o.0[2][j];
            }
        }
        m
    }
}

impl Mul<Vec3> for Mat3 {
    type Output = Vec3;
    fn mul(self, v: Vec3) -> Vec3 {
        Vec3::new(self.row(0).dot(v), self.row(1).dot(v), self.row(2).dot(v))
    }
}

impl fmt::Display for Mat3 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, r) in self.0.iter().enumerate() {
            if i > 0 {
                writeln!(f)?;
            }
            write!(f, "[{:>22.15e} {:>22.15e} {:>22.15e}]", r[0], r[1], r[2])?;
        }
        Ok(())
    }
}

/// Singular value decomposition `m = u · diag(sigma) · vᵀ`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Svd3 {
    pub u: Mat3,
    /// Nonincreasing, nonnegative.
    pub sigma: [f64; 3],
    pub v: Mat3,
}

impl Svd3 {
    pub fn reconstruct(&self) -> Mat3 {
        self.u * Mat3::diag(self.sigma[0], self.sigma[1], self.sigma[2]) * self.v.transpose()
    }
}

/// Deterministic 3×3 SVD by cyclic one-sided Jacobi.
///
/// Columns of a working copy of `m` are orthogonalized by plane rotations in the fixed
/// order (0,1), (0,2), (1,2), accumulating the rotations into `v`. The singular values
/// are the final column norms; `u` holds the normalized columns, completed to an
/// orthonormal basis when `m` is rank deficient. Each left singular vector is signed so
/// that its largest-magnitude component is nonnegative (the matching right vector flips
/// with it).
pub fn svd3(m: &Mat3) -> Result<Svd3> {
    if !m.is_finite() {
        return Err(Error::InvalidInput("svd3: non-finite matrix entry".into()));
    }
    let mut w = *m;
    let mut v = Mat3::identity();
    const PAIRS: [(usize, usize); 3] = [(0, 1), (0, 2), (1, 2)];

    for _ in 0..MAX_SWEEPS {
        let mut off = 0.0;
        for &(p, q) in &PAIRS {
            let (a, b) = (w.col(p).norm_squared(), w.col(q).norm_squared());
            if a > 0.0 && b > 0.0 {
                let g = w.col(p).dot(w.col(q));
                off += g * g / (a * b);
            }
        }
        if off.sqrt() < JACOBI_OFF_TOL {
            break;
        }
        for &(p, q) in &PAIRS {
            let wp = w.col(p);
            let wq = w.col(q);
            let alpha = wp.norm_squared();
            let beta = wq.norm_squared();
            let gamma = wp.dot(wq);
            if gamma == 0.0 || alpha == 0.0 || beta == 0.0 {
                continue;
            }
            let zeta = (beta - alpha) / (2.0 * gamma);
            let t = zeta.signum() / (zeta.abs() + 1.0_f64.hypot(zeta));
            let c = 1.0 / 1.0_f64.hypot(t);
            let s = c * t;
            rotate_cols(&mut w, p, q, c, s);
            rotate_cols(&mut v, p, q, c, s);
        }
    }

    let norms = [w.col(0).norm(), w.col(1).norm(), w.col(2).norm()];
    let mut order = [0usize, 1, 2];
    // stable: equal singular values keep their Jacobi column order
    order.sort_by(|&i, &j| norms[j].partial_cmp(&norms[i]).unwrap_or(std::cmp::Ordering::Equal));

    let sigma = [norms[order[0]], norms[order[1]], norms[order[2]]];
    let mut vs = Mat3::zeros();
    for (k, &i) in order.iter().enumerate() {
        vs.set_col(k, v.col(i));
    }

    // Columns whose norm is negligible carry no direction; they are rebuilt from the others.
    let tiny = f64::MIN_POSITIVE.sqrt();
    let mut cols: [Option<Vec3>; 3] = [None; 3];
    for (k, &i) in order.iter().enumerate() {
        if sigma[k] > tiny {
            cols[k] = Some(w.col(i) * (1.0 / sigma[k]));
        }
    }
    let u0 = cols[0].unwrap_or(Vec3::X);
    let u1 = match cols[1] {
        Some(c) => (c - u0 * u0.dot(c)).normalized().unwrap_or_else(|| any_orthogonal(u0)),
        None => any_orthogonal(u0),
    };
    let u2 = match cols[2] {
        Some(c) => {
            let c = c - u0 * u0.dot(c) - u1 * u1.dot(c);
            c.normalized().unwrap_or_else(|| u0.cross(u1))
        }
        None => u0.cross(u1),
    };
    let mut us = Mat3::from_cols(u0, u1, u2);

    for k in 0..3 {
        let uk = us.col(k);
        if uk[uk.argmax_abs()] < 0.0 {
            us.set_col(k, -uk);
            vs.set_col(k, -vs.col(k));
        }
    }

    Ok(Svd3 { u: us, sigma, v: vs })
}

fn rotate_cols(m: &mut Mat3, p: usize, q: usize, c: f64, s: f64) {
    for i in 0..3 {
        let a = m.0[i][p];
        let b = m.0[i][q];
        m.0[i][p] = c * a - s * b;
        m.0[i][q] = s * a + c * b;
    }
}

/// A unit vector orthogonal to the unit vector `u`, built from the coordinate axis least
/// aligned with it.
fn any_orthogonal(u: Vec3) -> Vec3 {
    let a = u.to_array();
    let mut k = 0;
    for i in 1..3 {
        if a[i].abs() < a[k].abs() {
            k = i;
        }
    }
    let mut e = Vec3::ZERO;
    e[k] = 1.0;
    (e - u * u.dot(e)).normalized().unwrap_or(Vec3::Y)
}

/// A proper rotation matrix.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Rotation3 {
    m: Mat3,
}

impl Rotation3 {
    /// Validates `mᵀm = I` and `det m = +1` to [`INPUT_TOL`].
    pub fn new(m: Mat3) -> Result<Self> {
        if !m.is_finite() {
            return Err(Error::InvalidInput("rotation has non-finite entries".into()));
        }
        let ortho = (m.transpose() * m).max_abs_diff(&Mat3::identity());
        let det = m.det();
        if ortho > INPUT_TOL || (det - 1.0).abs() > INPUT_TOL {
            return Err(Error::InvalidInput(format!(
                "not a proper rotation (|mᵀm - I| = {ortho:e}, det = {det})"
            )));
        }
        Ok(Rotation3 { m })
    }

    pub(crate) fn from_matrix_unchecked(m: Mat3) -> Self {
        Rotation3 { m }
    }

    pub fn identity() -> Self {
        Rotation3 { m: Mat3::identity() }
    }

    pub fn matrix(&self) -> &Mat3 {
        &self.m
    }

    pub fn transpose(&self) -> Rotation3 {
        Rotation3 { m: self.m.transpose() }
    }

    pub fn apply(&self, v: Vec3) -> Vec3 {
        self.m * v
    }

    pub fn compose(&self, o: &Rotation3) -> Rotation3 {
        Rotation3 { m: self.m * o.m }
    }

    pub fn trace(&self) -> f64 {
        self.m.trace()
    }

    /// Largest deviation from `SᵀS = I` and `det S = 1`.
    pub fn orthogonality_error(&self) -> f64 {
        let o = (self.m.transpose() * self.m).max_abs_diff(&Mat3::identity());
        o.max((self.m.det() - 1.0).abs())
    }
}

/// Rotation by `angle` radians about the unit `axis`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AxisAngle {
    pub axis: Vec3,
    pub angle: f64,
}

impl AxisAngle {
    /// Accepts `angle ∈ [0, π]` and a unit axis (any axis when `angle == 0`).
    pub fn new(axis: Vec3, angle: f64) -> Result<Self> {
        if !axis.is_finite() || !angle.is_finite() {
            return Err(Error::InvalidInput("axis-angle has non-finite components".into()));
        }
        if !(-SMALL_ANGLE_TOL..=std::f64::consts::PI + SMALL_ANGLE_TOL).contains(&angle) {
            return Err(Error::InvalidInput(format!("angle {angle} outside [0, π]")));
        }
        let angle = angle.clamp(0.0, std::f64::consts::PI);
        if angle > 0.0 && (axis.norm() - 1.0).abs() > INPUT_TOL {
            return Err(Error::InvalidInput(format!(
                "rotation axis must be a unit vector, got norm {}",
                axis.norm()
            )));
        }
        Ok(AxisAngle { axis, angle })
    }
}

fn rodrigues(u: Vec3, angle: f64) -> Mat3 {
    let k = u.skew();
    let half = (0.5 * angle).sin();
    Mat3::identity() + k * angle.sin() + (k * k) * (2.0 * half * half)
}

/// `I + sinθ [û]ₓ + (1 − cosθ) [û]ₓ²`.
pub fn rotation_from_axis_angle(a: &AxisAngle) -> Rotation3 {
    if a.angle == 0.0 {
        return Rotation3::identity();
    }
    Rotation3::from_matrix_unchecked(rodrigues(a.axis, a.angle))
}

/// Axis and angle of a proper rotation.
///
/// The angle is `atan2(sinθ, cosθ)` with `cosθ = (Tr S − 1)/2` and `sinθ` the norm of the
/// axial vector of the antisymmetric part. Conventions: for `θ < 1e-12` the axis is ẑ.
/// For `θ` above π/2 the axis is the `+1` eigenvector, signed to agree with the
/// antisymmetric part, or with its largest component positive when that part vanishes
/// (the exact half-turn).
pub fn axis_angle_from_rotation(s: &Rotation3) -> AxisAngle {
    let m = s.matrix();
    let cos_t = ((m.trace() - 1.0) * 0.5).clamp(-1.0, 1.0);
    let w = Vec3::new(
        m[(2, 1)] - m[(1, 2)],
        m[(0, 2)] - m[(2, 0)],
        m[(1, 0)] - m[(0, 1)],
    ) * 0.5;
    let sin_t = w.norm();
    let angle = sin_t.atan2(cos_t).clamp(0.0, std::f64::consts::PI);

    if angle < SMALL_ANGLE_TOL {
        return AxisAngle { axis: Vec3::Z, angle };
    }
    if angle > EIGEN_AXIS_ANGLE {
        // (S + Sᵀ)/2 − cosθ I = (1 − cosθ) û ûᵀ
        let b = (*m + m.transpose()) * 0.5 - Mat3::identity() * cos_t;
        let d = [b[(0, 0)], b[(1, 1)], b[(2, 2)]];
        let mut j = 0;
        for i in 1..3 {
            if d[i] > d[j] {
                j = i;
            }
        }
        let mut axis = b.col(j).normalized().unwrap_or(Vec3::X);
        let align = axis.dot(w);
        if align.abs() > 1e-15 {
            if align < 0.0 {
                axis = -axis;
            }
        } else if axis[axis.argmax_abs()] < 0.0 {
            axis = -axis;
        }
        return AxisAngle { axis, angle };
    }
    AxisAngle {
        axis: w.normalized().unwrap_or(Vec3::Z),
        angle,
    }
}

/// The rotation angle in the textbook form `arccos((Tr S − 1)/2)`, argument clamped.
pub fn rotation_angle_from_trace(s: &Rotation3) -> f64 {
    ((s.trace() - 1.0) * 0.5).clamp(-1.0, 1.0).acos()
}

/// The minimal rotation taking ẑ to the unit vector `n`.
///
/// Returns the identity for `n = ẑ` and the half-turn about x̂ for `n = −ẑ`; otherwise the
/// Rodrigues rotation about `ẑ × n` by the angle between ẑ and `n`.
pub fn minimal_rotation_to(n: Vec3) -> Result<Rotation3> {
    if !n.is_finite() || (n.norm() - 1.0).abs() > INPUT_TOL {
        return Err(Error::InvalidInput(format!(
            "minimal_rotation_to needs a unit vector, got {n}"
        )));
    }
    let transverse = n.x.hypot(n.y);
    if transverse == 0.0 {
        return Ok(if n.z > 0.0 {
            Rotation3::identity()
        } else {
            Rotation3::from_matrix_unchecked(Mat3::diag(1.0, -1.0, -1.0))
        });
    }
    let axis = Vec3::new(-n.y / transverse, n.x / transverse, 0.0);
    let angle = transverse.atan2(n.z);
    Ok(Rotation3::from_matrix_unchecked(rodrigues(axis, angle)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;
    use std::f64::consts::{FRAC_PI_2, PI};

    fn random_mat(rng: &mut ChaCha8Rng, scale: f64) -> Mat3 {
        let mut m = Mat3::zeros();
        for x in m.0.iter_mut().flatten() {
            *x = rng.gen_range(-scale..=scale);
        }
        m
    }

    fn random_unit(rng: &mut ChaCha8Rng) -> Vec3 {
        loop {
            let v = Vec3::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0));
            let n = v.norm();
            if n > 1e-3 && n <= 1.0 {
                return v * (1.0 / n);
            }
        }
    }

    fn check_svd(m: &Mat3, s: &Svd3) {
        assert!(s.reconstruct().max_abs_diff(m) <= 1e-12, "reconstruction of {m:?}");
        assert!((s.u.transpose() * s.u).max_abs_diff(&Mat3::identity()) <= 1e-12);
        assert!((s.v.transpose() * s.v).max_abs_diff(&Mat3::identity()) <= 1e-12);
        assert!(s.sigma[0] >= s.sigma[1] && s.sigma[1] >= s.sigma[2] && s.sigma[2] >= 0.0);
        for k in 0..3 {
            let uk = s.u.col(k);
            assert!(uk[uk.argmax_abs()] >= 0.0);
        }
    }

    /// Eigenvalues of the symmetric matrix `mᵀm` as roots of its characteristic cubic,
    /// found by bisection on disjoint brackets.
    fn singular_values_by_char_poly(m: &Mat3) -> [f64; 3] {
        let g = m.transpose() * *m;
        let c2 = g.trace();
        let c1 = g[(0, 0)] * g[(1, 1)] - g[(0, 1)] * g[(1, 0)] + g[(0, 0)] * g[(2, 2)]
            - g[(0, 2)] * g[(2, 0)]
            + g[(1, 1)] * g[(2, 2)]
            - g[(1, 2)] * g[(2, 1)];
        let c0 = g.det();
        let p = |x: f64| ((x - c2) * x + c1) * x - c0;
        // derivative roots split the cubic into monotone pieces
        let disc = (c2 * c2 - 3.0 * c1).max(0.0).sqrt();
        let (d0, d1) = ((c2 - disc) / 3.0, (c2 + disc) / 3.0);
        let hi = c2.max(1.0) * 2.0;
        let bisect = |mut a: f64, mut b: f64| {
            let rising = p(b) > p(a);
            for _ in 0..200 {
                let mid = 0.5 * (a + b);
                if (p(mid) > 0.0) == rising {
                    b = mid;
                } else {
                    a = mid;
                }
            }
            0.5 * (a + b)
        };
        let mut ev = [bisect(-1e-12, d0), bisect(d0, d1), bisect(d1, hi)];
        ev.sort_by(|a, b| b.partial_cmp(a).unwrap());
        ev.map(|x| x.max(0.0).sqrt())
    }

    #[test]
    fn svd_of_ordered_diagonal_is_trivial() {
        let m = Mat3::diag(3.0, 2.0, 1.0);
        let s = svd3(&m).unwrap();
        assert_eq!(s.sigma, [3.0, 2.0, 1.0]);
        assert_eq!(s.u, Mat3::identity());
        assert_eq!(s.v, Mat3::identity());
    }

    #[test]
    fn svd_reorders_diagonal_with_permutations() {
        let m = Mat3::diag(1.0, 2.0, 3.0);
        let s = svd3(&m).unwrap();
        assert_eq!(s.sigma, [3.0, 2.0, 1.0]);
        for mat in [s.u, s.v] {
            for row in mat.0 {
                let ones = row.iter().filter(|x| x.abs() == 1.0).count();
                let zeros = row.iter().filter(|x| **x == 0.0).count();
                assert_eq!((ones, zeros), (1, 2));
            }
        }
        check_svd(&m, &s);
    }

    #[test]
    fn svd_matches_characteristic_polynomial_oracle() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..2000 {
            let m = random_mat(&mut rng, 1.0);
            let s = svd3(&m).unwrap();
            check_svd(&m, &s);
            let oracle = singular_values_by_char_poly(&m);
            for k in 0..3 {
                assert!((s.sigma[k] - oracle[k]).abs() < 1e-7, "{:?} vs {:?}", s.sigma, oracle);
            }
        }
    }

    #[test]
    fn svd_reconstructs_random_matrices() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..100_000 {
            let m = random_mat(&mut rng, 2.0);
            check_svd(&m, &svd3(&m).unwrap());
        }
    }

    #[test]
    fn svd_handles_rank_deficiency() {
        let zero = Mat3::zeros();
        let s = svd3(&zero).unwrap();
        assert_eq!(s.sigma, [0.0; 3]);
        check_svd(&zero, &s);

        let a = Vec3::new(0.3, -0.4, 0.5);
        let b = Vec3::new(-1.0, 0.2, 0.7);
        let rank1 = a.outer(b);
        check_svd(&rank1, &svd3(&rank1).unwrap());
        let rank2 = rank1 + Vec3::new(0.1, 0.9, 0.0).outer(Vec3::new(0.5, 0.5, -0.2));
        let s = svd3(&rank2).unwrap();
        check_svd(&rank2, &s);
        assert!(s.sigma[2] < 1e-14);
        let pure = Mat3::diag(0.0, 0.0, 2.0);
        check_svd(&pure, &svd3(&pure).unwrap());
    }

    #[test]
    fn svd_is_deterministic_and_rejects_nan() {
        let m = Mat3::from_rows([[0.1, 0.7, -0.3], [0.2, -0.5, 0.9], [1.0, 0.0, 0.4]]);
        assert_eq!(svd3(&m).unwrap(), svd3(&m).unwrap());
        let mut bad = m;
        bad[(1, 1)] = f64::NAN;
        assert!(matches!(svd3(&bad), Err(Error::InvalidInput(_))));
    }

    #[test]
    fn rodrigues_examples() {
        let id = rotation_from_axis_angle(&AxisAngle::new(Vec3::new(0.6, 0.0, 0.8), 0.0).unwrap());
        assert_eq!(*id.matrix(), Mat3::identity());

        let half = rotation_from_axis_angle(&AxisAngle::new(Vec3::Z, PI).unwrap());
        assert!(half.matrix().max_abs_diff(&Mat3::diag(-1.0, -1.0, 1.0)) < 1e-15);

        let quarter = rotation_from_axis_angle(&AxisAngle::new(Vec3::X, FRAC_PI_2).unwrap());
        assert!((quarter.apply(Vec3::Y) - Vec3::Z).max_abs() < 1e-15);
        assert!(quarter.orthogonality_error() < 1e-15);
    }

    #[test]
    fn axis_angle_rejects_bad_axes() {
        assert!(AxisAngle::new(Vec3::ZERO, 0.5).is_err());
        assert!(AxisAngle::new(Vec3::new(1.0, 1.0, 0.0), 0.5).is_err());
        assert!(AxisAngle::new(Vec3::X, 4.0).is_err());
        assert!(AxisAngle::new(Vec3::ZERO, 0.0).is_ok());
    }

    #[test]
    fn axis_angle_conventions() {
        let id = axis_angle_from_rotation(&Rotation3::identity());
        assert_eq!((id.axis, id.angle), (Vec3::Z, 0.0));

        let flip = Rotation3::new(Mat3::diag(1.0, -1.0, -1.0)).unwrap();
        let aa = axis_angle_from_rotation(&flip);
        assert_eq!(aa.axis, Vec3::X);
        assert_eq!(aa.angle, PI);

        let flip = Rotation3::new(Mat3::diag(-1.0, -1.0, 1.0)).unwrap();
        assert_eq!(axis_angle_from_rotation(&flip).axis, Vec3::Z);
    }

    #[test]
    fn rotation_constructor_validates() {
        assert!(Rotation3::new(Mat3::diag(1.0, 1.0, -1.0)).is_err());
        assert!(Rotation3::new(Mat3::diag(1.0, 2.0, 0.5)).is_err());
    }

    #[test]
    fn axis_angle_round_trip() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..20_000 {
            let u = random_unit(&mut rng);
            let t = rng.gen_range(0.01..PI - 0.01);
            let s = rotation_from_axis_angle(&AxisAngle::new(u, t).unwrap());
            assert!(s.orthogonality_error() <= 1e-12);
            let back = axis_angle_from_rotation(&s);
            assert!((back.angle - t).abs() < 1e-9);
            assert!((back.axis - u).max_abs() < 1e-9);
        }
    }

    #[test]
    fn axis_angle_round_trip_near_half_turn() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        for _ in 0..5_000 {
            let u = random_unit(&mut rng);
            let t = PI - 10f64.powf(rng.gen_range(-12.0..-3.0));
            let s = rotation_from_axis_angle(&AxisAngle::new(u, t).unwrap());
            let back = axis_angle_from_rotation(&s);
            let rebuilt = rotation_from_axis_angle(&back);
            let e = rebuilt.matrix().max_abs_diff(s.matrix());
            assert!(e < 1e-12, "t = pi - {:e}: {e:e}", PI - t);
            // exactly at π the sign of the axis is conventional
            let exact = rotation_from_axis_angle(&AxisAngle::new(u, PI).unwrap());
            let back = axis_angle_from_rotation(&exact);
            assert!((back.axis - u).max_abs() < 1e-9 || (back.axis + u).max_abs() < 1e-9);
        }
    }

    #[test]
    fn trace_angle_agrees_where_well_conditioned() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for _ in 0..10_000 {
            let u = random_unit(&mut rng);
            let t = rng.gen_range(1e-3..PI - 1e-3);
            let s = rotation_from_axis_angle(&AxisAngle::new(u, t).unwrap());
            let a = axis_angle_from_rotation(&s).angle;
            assert!((a - rotation_angle_from_trace(&s)).abs() < 1e-12);
        }
    }

    #[test]
    fn minimal_rotation_examples() {
        assert_eq!(*minimal_rotation_to(Vec3::Z).unwrap().matrix(), Mat3::identity());
        assert_eq!(
            *minimal_rotation_to(-Vec3::Z).unwrap().matrix(),
            Mat3::diag(1.0, -1.0, -1.0)
        );
        let o = minimal_rotation_to(Vec3::X).unwrap();
        assert!((o.apply(Vec3::Z) - Vec3::X).max_abs() < 1e-12);
        assert!(minimal_rotation_to(Vec3::new(0.0, 0.0, 0.5)).is_err());
    }

    #[test]
    fn minimal_rotation_maps_z_to_target() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let mut targets: Vec<Vec3> = (0..10_000).map(|_| random_unit(&mut rng)).collect();
        targets.extend([Vec3::Z, -Vec3::Z, Vec3::new(1e-9, 0.0, -1.0).normalized().unwrap()]);
        for n in targets {
            let o = minimal_rotation_to(n).unwrap();
            assert!((o.apply(Vec3::Z) - n).max_abs() <= 1e-12, "{n}");
            assert!(o.orthogonality_error() <= 1e-12);
        }
    }
}
