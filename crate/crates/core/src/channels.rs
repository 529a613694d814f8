//! Qubit channels in affine Bloch form `r ↦ M r + c`.
//!
//! Built-in channels are constructed from their textbook Kraus sets, so they are CPTP by
//! construction. User-supplied affine maps are only spot-checked for ball preservation.

use std::collections::BTreeMap;
use std::fmt;

use crate::error::{Error, Result};
use crate::linalg3::{Mat3, Vec3};
use crate::qstate::{
    add2, adjoint2, bloch_from_density, mul2, pauli, scale2, trace2, BlochVector, CMat2,
    DensityMatrix, C64, STATE_TOL,
};

/// Completeness violations beyond this are rejected.
pub const KRAUS_TOL: f64 = 1e-8;

/// Number of sphere points used by [`AffineChannel::ball_check`].
pub const BALL_SAMPLES: usize = 1000;

/// Grammar accepted by [`ChannelTemplate::parse`].
pub const CHANNEL_GRAMMAR: &str = "\
dep:p=<p>                    depolarizing, 0 <= p <= 1
bf:p=<p>                     bit flip, 0 <= p <= 1
pf:p=<p>                     phase flip, 0 <= p <= 1
pauli:lx=<l>,ly=<l>,lz=<l>   diagonal Pauli, |l| <= 1
ad:g=<g>                     amplitude damping, 0 <= g <= 1
not:p=<p>,da=<radians>       imperfect NOT, 0 <= p <= 1
affine:m=<9 reals>,c=<3 reals>  generic affine map, M row-major";

/// `r ↦ M r + c`.
#[derive(Debug, Clone, PartialEq)]
pub struct AffineChannel {
    pub m: Mat3,
    pub c: Vec3,
    pub label: String,
}

/// Outcome of the ball-preservation spot check.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BallCheck {
    pub samples: usize,
    pub max_output_norm: f64,
    pub passed: bool,
}

/// Fixed points of a channel on the z axis of the Bloch ball.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum AxisFixedPoints {
    None,
    Single(Vec3),
    /// Every point `(0, 0, z)` with `|z| ≤ 1` is fixed.
    WholeAxis,
}

impl AffineChannel {
    pub fn new(m: Mat3, c: Vec3, label: impl Into<String>) -> Result<Self> {
        if !m.is_finite() || !c.is_finite() {
            return Err(Error::InvalidParameter("non-finite affine channel".into()));
        }
        Ok(AffineChannel { m, c, label: label.into() })
    }

    pub fn identity() -> Self {
        AffineChannel { m: Mat3::identity(), c: Vec3::ZERO, label: "identity".into() }
    }

    /// `M r + c`; fails if the image leaves the ball by more than the state tolerance.
    pub fn apply(&self, r: &BlochVector) -> Result<BlochVector> {
        let out = self.m * r.vec() + self.c;
        if !(out.norm() <= 1.0 + STATE_TOL) {
            return Err(Error::ChannelValidity(format!(
                "{} maps {} outside the Bloch ball (norm {})",
                self.label,
                r.vec(),
                out.norm()
            )));
        }
        BlochVector::from_vec(out)
    }

    pub fn is_unital(&self) -> bool {
        self.c.norm() < 1e-12
    }

    /// Images of [`BALL_SAMPLES`] points of a Fibonacci lattice on the unit sphere.
    ///
    /// The image of the ball is an ellipsoid, so its largest norm is attained on the sphere.
    pub fn ball_check(&self) -> BallCheck {
        let golden = std::f64::consts::PI * (3.0 - 5f64.sqrt());
        let mut max_norm = 0.0f64;
        for i in 0..BALL_SAMPLES {
            let z = 1.0 - (2.0 * i as f64 + 1.0) / BALL_SAMPLES as f64;
            let t = (1.0 - z * z).sqrt();
            let phi = golden * i as f64;
            let v = Vec3::new(t * phi.cos(), t * phi.sin(), z);
            max_norm = max_norm.max((self.m * v + self.c).norm());
        }
        BallCheck { samples: BALL_SAMPLES, max_output_norm: max_norm, passed: max_norm <= 1.0 + STATE_TOL }
    }

    pub fn z_axis_fixed_points(&self) -> AxisFixedPoints {
        const TOL: f64 = 1e-12;
        let col = self.m.col(2);
        let a = col.z - 1.0;
        if a.abs() < TOL {
            let all = col.x.abs() < TOL && col.y.abs() < TOL && self.c.max_abs() < TOL;
            return if all { AxisFixedPoints::WholeAxis } else { AxisFixedPoints::None };
        }
        let z = -self.c.z / a;
        let resid = (col.x * z + self.c.x).abs().max((col.y * z + self.c.y).abs());
        if resid < TOL && z.abs() <= 1.0 + TOL {
            AxisFixedPoints::Single(Vec3::new(0.0, 0.0, z.clamp(-1.0, 1.0)))
        } else {
            AxisFixedPoints::None
        }
    }
}

impl fmt::Display for AffineChannel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: M = {}, c = {}", self.label, self.m, self.c)
    }
}

/// Operators `K_μ` with `Σ K_μ† K_μ = I`.
#[derive(Debug, Clone, PartialEq)]
pub struct KrausSet {
    ops: Vec<CMat2>,
}

impl KrausSet {
    pub fn new(ops: Vec<CMat2>) -> Result<Self> {
        if ops.is_empty() {
            return Err(Error::InvalidKraus("empty Kraus set".into()));
        }
        let set = KrausSet { ops };
        let e = set.completeness_error();
        if !(e <= KRAUS_TOL) {
            return Err(Error::InvalidKraus(format!("Σ K†K deviates from I by {e:e}")));
        }
        Ok(set)
    }

    pub fn ops(&self) -> &[CMat2] {
        &self.ops
    }

    pub fn completeness_error(&self) -> f64 {
        let mut sum = [[C64::new(0.0, 0.0); 2]; 2];
        for k in &self.ops {
            sum = add2(&sum, &mul2(&adjoint2(k), k));
        }
        let mut e = 0.0f64;
        for i in 0..2 {
            for j in 0..2 {
                let t = if i == j { 1.0 } else { 0.0 };
                e = e.max((sum[i][j] - C64::new(t, 0.0)).norm());
            }
        }
        e
    }

    /// `Σ K_μ X K_μ†`.
    pub fn apply_matrix(&self, x: &CMat2) -> CMat2 {
        let mut out = [[C64::new(0.0, 0.0); 2]; 2];
        for k in &self.ops {
            out = add2(&out, &mul2(&mul2(k, x), &adjoint2(k)));
        }
        out
    }

    pub fn apply(&self, rho: &DensityMatrix) -> Result<DensityMatrix> {
        DensityMatrix::new(self.apply_matrix(rho.matrix()))
    }
}

fn real(x: f64) -> C64 {
    C64::new(x, 0.0)
}

fn scaled_pauli(i: usize, w: f64) -> CMat2 {
    scale2(&pauli(i), real(w))
}

fn check_prob(name: &str, p: f64) -> Result<()> {
    if !(0.0..=1.0).contains(&p) {
        return Err(Error::InvalidParameter(format!("{name} = {p} outside [0, 1]")));
    }
    Ok(())
}

/// Pauli channel `ρ ↦ Σ qᵢ σᵢ ρ σᵢ` with probabilities `(q_I, q_x, q_y, q_z)`.
pub fn kraus_pauli(q: [f64; 4]) -> Result<KrausSet> {
    for (i, &qi) in q.iter().enumerate() {
        check_prob(&format!("q{i}"), qi)?;
    }
    KrausSet::new((0..4).filter(|&i| q[i] > 0.0).map(|i| scaled_pauli(i, q[i].sqrt())).collect())
}

pub fn kraus_depolarizing(p: f64) -> Result<KrausSet> {
    check_prob("p", p)?;
    kraus_pauli([1.0 - 0.75 * p, 0.25 * p, 0.25 * p, 0.25 * p])
}

pub fn kraus_bit_flip(p: f64) -> Result<KrausSet> {
    check_prob("p", p)?;
    kraus_pauli([1.0 - p, p, 0.0, 0.0])
}

pub fn kraus_phase_flip(p: f64) -> Result<KrausSet> {
    check_prob("p", p)?;
    kraus_pauli([1.0 - p, 0.0, 0.0, p])
}

pub fn kraus_amplitude_damping(gamma: f64) -> Result<KrausSet> {
    check_prob("gamma", gamma)?;
    let z = real(0.0);
    KrausSet::new(vec![
        [[real(1.0), z], [z, real((1.0 - gamma).sqrt())]],
        [[z, real(gamma.sqrt())], [z, z]],
    ])
}

/// `{√(1−p) σx, √p U_δ}` with `U_δ = exp(−i(π+δ)/2 σx)`.
pub fn kraus_imperfect_not(p: f64, delta_alpha: f64) -> Result<KrausSet> {
    check_prob("p", p)?;
    if !delta_alpha.is_finite() {
        return Err(Error::InvalidParameter("non-finite rotation error".into()));
    }
    let (s, c) = (0.5 * (std::f64::consts::PI + delta_alpha)).sin_cos();
    let u = add2(&scale2(&pauli(0), real(c)), &scale2(&pauli(1), C64::new(0.0, -s)));
    KrausSet::new(vec![scaled_pauli(1, (1.0 - p).sqrt()), scale2(&u, real(p.sqrt()))])
}

/// Pauli-transfer form: `Mᵢⱼ = ½ Tr(σᵢ Φ(σⱼ))`, `cᵢ = ½ Tr(σᵢ Φ(I))`.
pub fn affine_from_kraus(ks: &KrausSet) -> AffineChannel {
    let comp = |i: usize, x: &CMat2| 0.5 * trace2(&mul2(&pauli(i), &ks.apply_matrix(x))).re;
    let mut m = Mat3::zeros();
    for j in 0..3 {
        let img = pauli(j + 1);
        for i in 0..3 {
            m[(i, j)] = comp(i + 1, &img);
        }
    }
    let id = pauli(0);
    let c = Vec3::new(comp(1, &id), comp(2, &id), comp(3, &id));
    AffineChannel { m, c, label: "kraus".into() }
}

/// `M = (1−p) I`.
pub fn depolarizing(p: f64) -> Result<AffineChannel> {
    check_prob("p", p)?;
    AffineChannel::new(Mat3::identity() * (1.0 - p), Vec3::ZERO, format!("dep:p={p}"))
}

/// `M = diag(1, 1−2p, 1−2p)`.
pub fn bit_flip(p: f64) -> Result<AffineChannel> {
    check_prob("p", p)?;
    let l = 1.0 - 2.0 * p;
    AffineChannel::new(Mat3::diag(1.0, l, l), Vec3::ZERO, format!("bf:p={p}"))
}

/// `M = diag(1−2p, 1−2p, 1)`.
pub fn phase_flip(p: f64) -> Result<AffineChannel> {
    check_prob("p", p)?;
    let l = 1.0 - 2.0 * p;
    AffineChannel::new(Mat3::diag(l, l, 1.0), Vec3::ZERO, format!("pf:p={p}"))
}

/// `M = diag(λx, λy, λz)`. Complete positivity is not certified.
pub fn diagonal_pauli(lx: f64, ly: f64, lz: f64) -> Result<AffineChannel> {
    for (n, l) in [("lx", lx), ("ly", ly), ("lz", lz)] {
        if !(-1.0..=1.0).contains(&l) {
            return Err(Error::InvalidParameter(format!("{n} = {l} outside [-1, 1]")));
        }
    }
    AffineChannel::new(Mat3::diag(lx, ly, lz), Vec3::ZERO, format!("pauli:lx={lx},ly={ly},lz={lz}"))
}

/// `M = diag(√(1−γ), √(1−γ), 1−γ)`, `c = (0, 0, γ)`.
pub fn amplitude_damping(gamma: f64) -> Result<AffineChannel> {
    check_prob("gamma", gamma)?;
    let t = (1.0 - gamma).sqrt();
    AffineChannel::new(Mat3::diag(t, t, 1.0 - gamma), Vec3::new(0.0, 0.0, gamma), format!("ad:g={gamma}"))
}

/// Ideal NOT with probability `1−p`, over-rotation by `π + δα` about x̂ with probability `p`.
pub fn imperfect_not(p: f64, delta_alpha: f64) -> Result<AffineChannel> {
    check_prob("p", p)?;
    if !delta_alpha.is_finite() {
        return Err(Error::InvalidParameter("non-finite rotation error".into()));
    }
    let d = (1.0 - p) + p * delta_alpha.cos();
    let o = p * delta_alpha.sin();
    let m = Mat3::from_rows([[1.0, 0.0, 0.0], [0.0, -d, o], [0.0, -o, -d]]);
    AffineChannel::new(m, Vec3::ZERO, format!("not:p={p},da={delta_alpha}"))
}

/// Optimal overlap of two commuting states with Bloch components `a`, `b` on a common axis:
/// `½[√((1+a)(1+b)) + √((1−a)(1−b))]`.
pub fn collinear_overlap(a: f64, b: f64) -> f64 {
    0.5 * (((1.0 + a) * (1.0 + b)).max(0.0).sqrt() + ((1.0 - a) * (1.0 - b)).max(0.0).sqrt())
}

/// Channel families with closed-form overlaps on their symmetry-adapted inputs.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ClosedForm {
    /// Any axis; inputs on ẑ here.
    Depolarizing { p: f64 },
    /// Inputs on ẑ.
    BitFlip { p: f64 },
    /// Inputs on x̂.
    PhaseFlip { p: f64 },
    /// Inputs on axis `axis` (0, 1, 2 for x, y, z), contracted by `lambda`.
    Pauli { axis: usize, lambda: f64 },
    /// Inputs on ẑ, `r' = γ + (1−γ) r`.
    AmplitudeDamping { gamma: f64 },
}

impl ClosedForm {
    pub fn input_axis(&self) -> Vec3 {
        match *self {
            ClosedForm::PhaseFlip { .. } => Vec3::X,
            ClosedForm::Pauli { axis, .. } => [Vec3::X, Vec3::Y, Vec3::Z][axis.min(2)],
            _ => Vec3::Z,
        }
    }

    /// The channel as an affine map; for `Pauli` the other two axes are left untouched.
    pub fn channel(&self) -> Result<AffineChannel> {
        match *self {
            ClosedForm::Depolarizing { p } => depolarizing(p),
            ClosedForm::BitFlip { p } => bit_flip(p),
            ClosedForm::PhaseFlip { p } => phase_flip(p),
            ClosedForm::Pauli { axis, lambda } => {
                let mut l = [1.0; 3];
                *l.get_mut(axis).ok_or_else(|| Error::InvalidParameter(format!("axis {axis}")))? = lambda;
                diagonal_pauli(l[0], l[1], l[2])
            }
            ClosedForm::AmplitudeDamping { gamma } => amplitude_damping(gamma),
        }
    }
}

/// The closed-form `g` for input `r · axis` under the named family.
pub fn channel_overlap_closed_form(family: &ClosedForm, r: f64) -> Result<f64> {
    if !(-1.0..=1.0).contains(&r) {
        return Err(Error::InvalidState(format!("r = {r} outside [-1, 1]")));
    }
    let g = |rp: f64| 0.5 * (((1.0 + r) * (1.0 + rp)).max(0.0).sqrt() + ((1.0 - r) * (1.0 - rp)).max(0.0).sqrt());
    match *family {
        ClosedForm::Depolarizing { p } => {
            check_prob("p", p)?;
            Ok(g((1.0 - p) * r))
        }
        ClosedForm::BitFlip { p } | ClosedForm::PhaseFlip { p } => {
            check_prob("p", p)?;
            Ok(g((1.0 - 2.0 * p) * r))
        }
        ClosedForm::Pauli { axis, lambda } => {
            if axis > 2 || !(-1.0..=1.0).contains(&lambda) {
                return Err(Error::InvalidParameter(format!("Pauli axis {axis}, lambda {lambda}")));
            }
            Ok(g(lambda * r))
        }
        ClosedForm::AmplitudeDamping { gamma } => {
            check_prob("gamma", gamma)?;
            Ok(g(gamma + (1.0 - gamma) * r))
        }
    }
}

/// A channel spec string with some parameters possibly left open for sweeping.
#[derive(Debug, Clone, PartialEq)]
pub struct ChannelTemplate {
    pub kind: String,
    pub params: BTreeMap<String, Vec<f64>>,
}

fn param_names(kind: &str) -> Option<&'static [&'static str]> {
    Some(match kind {
        "dep" | "bf" | "pf" => &["p"],
        "pauli" => &["lx", "ly", "lz"],
        "ad" => &["g"],
        "not" => &["p", "da"],
        "affine" => &["m", "c"],
        _ => return None,
    })
}

fn grammar_error(msg: String) -> Error {
    Error::InvalidParameter(format!("{msg}\nvalid channel specs:\n{CHANNEL_GRAMMAR}"))
}

impl ChannelTemplate {
    /// Parses `kind:name=value,...`. For `affine`, `m=` consumes nine reals and `c=` three.
    pub fn parse(spec: &str) -> Result<Self> {
        let spec = spec.trim();
        let (kind, rest) = spec.split_once(':').unwrap_or((spec, ""));
        let names = param_names(kind).ok_or_else(|| grammar_error(format!("unknown channel kind '{kind}'")))?;
        let mut params: BTreeMap<String, Vec<f64>> = BTreeMap::new();
        let mut current: Option<String> = None;
        for tok in rest.split(',').map(str::trim).filter(|t| !t.is_empty()) {
            let value = if let Some((name, v)) = tok.split_once('=') {
                let name = name.trim();
                if !names.contains(&name) {
                    return Err(grammar_error(format!("unknown parameter '{name}' for '{kind}'")));
                }
                if params.contains_key(name) {
                    return Err(grammar_error(format!("parameter '{name}' given twice")));
                }
                current = Some(name.to_string());
                v
            } else if kind == "affine" && current.is_some() {
                tok
            } else {
                return Err(grammar_error(format!("malformed token '{tok}' in '{spec}'")));
            };
            let x: f64 = value
                .trim()
                .parse()
                .map_err(|_| grammar_error(format!("'{value}' is not a real number")))?;
            if !x.is_finite() {
                return Err(grammar_error(format!("'{value}' is not finite")));
            }
            params.entry(current.clone().expect("set above")).or_default().push(x);
        }
        for (name, v) in &params {
            let want = match name.as_str() {
                "m" => 9,
                "c" => 3,
                _ => 1,
            };
            if v.len() != want {
                return Err(grammar_error(format!("parameter '{name}' needs {want} value(s), got {}", v.len())));
            }
        }
        Ok(ChannelTemplate { kind: kind.to_string(), params })
    }

    pub fn accepts(&self, name: &str) -> bool {
        param_names(&self.kind).is_some_and(|n| n.contains(&name)) && name != "m" && name != "c"
    }

    /// Builds the channel with `overrides` taking precedence over the parsed values.
    pub fn instantiate(&self, overrides: &[(&str, f64)]) -> Result<AffineChannel> {
        let get = |name: &str| -> Result<f64> {
            if let Some(&(_, v)) = overrides.iter().find(|(n, _)| *n == name) {
                return Ok(v);
            }
            self.params
                .get(name)
                .and_then(|v| v.first().copied())
                .ok_or_else(|| grammar_error(format!("channel '{}' is missing parameter '{name}'", self.kind)))
        };
        for (n, _) in overrides {
            if !self.accepts(n) {
                return Err(grammar_error(format!("channel '{}' has no scalar parameter '{n}'", self.kind)));
            }
        }
        match self.kind.as_str() {
            "dep" => depolarizing(get("p")?),
            "bf" => bit_flip(get("p")?),
            "pf" => phase_flip(get("p")?),
            "pauli" => diagonal_pauli(get("lx")?, get("ly")?, get("lz")?),
            "ad" => amplitude_damping(get("g")?),
            "not" => imperfect_not(get("p")?, get("da")?),
            "affine" => {
                let m = self.params.get("m").ok_or_else(|| grammar_error("affine channel needs m=".into()))?;
                let c = self.params.get("c").ok_or_else(|| grammar_error("affine channel needs c=".into()))?;
                AffineChannel::new(Mat3::from_row_slice(m)?, Vec3::new(c[0], c[1], c[2]), "affine")
            }
            other => Err(grammar_error(format!("unknown channel kind '{other}'"))),
        }
    }
}

/// Parses a fully specified channel string.
pub fn parse_channel(spec: &str) -> Result<AffineChannel> {
    ChannelTemplate::parse(spec)?.instantiate(&[])
}

/// `Φ(ρ(r))` through Kraus operators, read back as a Bloch vector.
pub fn apply_kraus(ks: &KrausSet, r: &BlochVector) -> Result<BlochVector> {
    bloch_from_density(&ks.apply(&crate::qstate::density_from_bloch(r))?)
}

/// The unitary channel `ρ ↦ U ρ U†` as a Kraus set.
pub fn kraus_unitary(u: &CMat2) -> Result<KrausSet> {
    KrausSet::new(vec![*u])
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::procrustes::optimal_overlap;
    use crate::qstate::pauli_dot;
    use crate::sampling;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;
    use std::f64::consts::PI;

    fn bv(x: f64, y: f64, z: f64) -> BlochVector {
        BlochVector::new(x, y, z).unwrap()
    }

    fn close(a: Vec3, b: Vec3, tol: f64) -> bool {
        (a - b).max_abs() <= tol
    }

    #[test]
    fn depolarizing_examples() {
        assert_eq!(depolarizing(0.0).unwrap().m, Mat3::identity());
        let out = depolarizing(1.0).unwrap().apply(&bv(0.3, 0.4, 0.5)).unwrap();
        assert_eq!(out.vec(), Vec3::ZERO);
        let out = depolarizing(0.5).unwrap().apply(&bv(0.0, 0.0, 0.8)).unwrap();
        assert!(close(out.vec(), Vec3::new(0.0, 0.0, 0.4), 1e-15));
        assert!(matches!(depolarizing(1.5), Err(Error::InvalidParameter(_))));
        assert!(depolarizing(-0.1).is_err());
    }

    #[test]
    fn flip_examples() {
        assert_eq!(bit_flip(0.0).unwrap().m, Mat3::identity());
        assert_eq!(bit_flip(1.0).unwrap().m, Mat3::diag(1.0, -1.0, -1.0));
        let out = bit_flip(0.25).unwrap().apply(&bv(0.0, 0.5, 0.5)).unwrap();
        assert!(close(out.vec(), Vec3::new(0.0, 0.25, 0.25), 1e-15));

        assert_eq!(phase_flip(0.0).unwrap().m, Mat3::identity());
        let out = phase_flip(0.5).unwrap().apply(&bv(0.3, -0.4, 0.5)).unwrap();
        assert_eq!((out.vec().x, out.vec().y), (0.0, 0.0));
        let out = phase_flip(0.3).unwrap().apply(&bv(0.5, 0.0, 0.2)).unwrap();
        assert!(close(out.vec(), Vec3::new(0.2, 0.0, 0.2), 1e-15));
    }

    #[test]
    fn pauli_and_damping_examples() {
        assert_eq!(diagonal_pauli(1.0, 1.0, 1.0).unwrap().m, Mat3::identity());
        assert_eq!(diagonal_pauli(1.0, 0.4, 0.4).unwrap().m, bit_flip(0.3).unwrap().m);
        let out = diagonal_pauli(0.9, 0.8, 0.7).unwrap().apply(&bv(1.0, 0.0, 0.0)).unwrap();
        assert!(close(out.vec(), Vec3::new(0.9, 0.0, 0.0), 1e-15));
        assert!(diagonal_pauli(1.1, 0.0, 0.0).is_err());

        let ad = amplitude_damping(0.0).unwrap();
        assert_eq!((ad.m, ad.c), (Mat3::identity(), Vec3::ZERO));
        let ad = amplitude_damping(1.0).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(21);
        for _ in 0..100 {
            assert_eq!(ad.apply(&sampling::ball_state(&mut rng)).unwrap().vec(), Vec3::Z);
        }
        let out = amplitude_damping(0.5).unwrap().apply(&bv(0.0, 0.0, 0.2)).unwrap();
        assert!(close(out.vec(), Vec3::new(0.0, 0.0, 0.6), 1e-15));
    }

    #[test]
    fn imperfect_not_examples() {
        let ideal = Mat3::diag(1.0, -1.0, -1.0);
        for p in [0.0, 0.3, 1.0] {
            assert!(imperfect_not(p, 0.0).unwrap().m.max_abs_diff(&ideal) < 1e-15);
        }
        assert!(imperfect_not(0.0, 0.7).unwrap().m.max_abs_diff(&ideal) < 1e-15);
        let out = imperfect_not(0.5, PI / 2.0).unwrap().apply(&bv(0.0, 1.0, 0.0)).unwrap();
        assert!(close(out.vec(), Vec3::new(0.0, -0.5, -0.5), 1e-15));
        assert!(imperfect_not(1.2, 0.0).is_err());
    }

    #[test]
    fn kraus_sets_reproduce_named_channels() {
        let mut rng = ChaCha8Rng::seed_from_u64(22);
        for _ in 0..200 {
            let p: f64 = rng.gen();
            let d: f64 = rng.gen_range(-PI..PI);
            let pairs = [
                (affine_from_kraus(&kraus_depolarizing(p).unwrap()), depolarizing(p).unwrap()),
                (affine_from_kraus(&kraus_bit_flip(p).unwrap()), bit_flip(p).unwrap()),
                (affine_from_kraus(&kraus_phase_flip(p).unwrap()), phase_flip(p).unwrap()),
                (affine_from_kraus(&kraus_amplitude_damping(p).unwrap()), amplitude_damping(p).unwrap()),
                (affine_from_kraus(&kraus_imperfect_not(p, d).unwrap()), imperfect_not(p, d).unwrap()),
            ];
            for (from_kraus, named) in pairs {
                assert!(from_kraus.m.max_abs_diff(&named.m) < 1e-12, "{named}");
                assert!(close(from_kraus.c, named.c, 1e-12), "{named}");
            }
        }
    }

    #[test]
    fn kraus_pauli_probabilities() {
        let q = [0.4, 0.3, 0.2, 0.1];
        let ch = affine_from_kraus(&kraus_pauli(q).unwrap());
        assert!(ch.m.max_abs_diff(&Mat3::diag(0.4, 0.2, 0.0)) < 1e-15);
        assert!(kraus_pauli([0.5, 0.6, 0.0, 0.0]).is_err());
    }

    #[test]
    fn affine_from_kraus_matches_density_route() {
        let mut rng = ChaCha8Rng::seed_from_u64(23);
        for _ in 0..2000 {
            let ks = match rng.gen_range(0..3) {
                0 => kraus_amplitude_damping(rng.gen()).unwrap(),
                1 => kraus_imperfect_not(rng.gen(), rng.gen_range(-1.0..1.0)).unwrap(),
                _ => kraus_pauli({
                    let mut q = [rng.gen::<f64>(), rng.gen(), rng.gen(), rng.gen()];
                    let s: f64 = q.iter().sum();
                    q.iter_mut().for_each(|x| *x /= s);
                    q
                })
                .unwrap(),
            };
            let ch = affine_from_kraus(&ks);
            let r = sampling::ball_state(&mut rng);
            let a = ch.apply(&r).unwrap();
            let b = apply_kraus(&ks, &r).unwrap();
            assert!(close(a.vec(), b.vec(), 1e-10));
        }
    }

    #[test]
    fn unitary_kraus_gives_rotation() {
        let mut rng = ChaCha8Rng::seed_from_u64(24);
        for _ in 0..1000 {
            let u = sampling::su2(&mut rng);
            let ch = affine_from_kraus(&kraus_unitary(&u).unwrap());
            assert!(ch.c.max_abs() < 1e-14);
            assert!((ch.m.transpose() * ch.m).max_abs_diff(&Mat3::identity()) < 1e-12);
            assert!((ch.m.det() - 1.0).abs() < 1e-12);
            // U (v·σ) U† = (M v)·σ on the basis
            for (j, v) in [Vec3::X, Vec3::Y, Vec3::Z].into_iter().enumerate() {
                let img = mul2(&mul2(&u, &pauli_dot(v)), &adjoint2(&u));
                let got = Vec3::new(
                    0.5 * trace2(&mul2(&pauli(1), &img)).re,
                    0.5 * trace2(&mul2(&pauli(2), &img)).re,
                    0.5 * trace2(&mul2(&pauli(3), &img)).re,
                );
                assert!(close(got, ch.m.col(j), 1e-12));
            }
        }
    }

    #[test]
    fn kraus_completeness_is_enforced() {
        let bad = vec![scaled_pauli(0, 0.9)];
        assert!(matches!(KrausSet::new(bad), Err(Error::InvalidKraus(_))));
        assert!(KrausSet::new(vec![]).is_err());
    }

    #[test]
    fn apply_rejects_escaping_outputs() {
        let ch = AffineChannel::new(Mat3::identity() * 1.5, Vec3::ZERO, "stretch").unwrap();
        assert!(matches!(ch.apply(&bv(0.0, 0.0, 0.9)), Err(Error::ChannelValidity(_))));
        assert!(!ch.ball_check().passed);
        assert!(AffineChannel::identity().ball_check().passed);
        assert_eq!(AffineChannel::identity().apply(&bv(0.1, 0.2, 0.3)).unwrap(), bv(0.1, 0.2, 0.3));
    }

    #[test]
    fn unital_channels_fix_the_origin() {
        let unital = [
            depolarizing(0.3).unwrap(),
            bit_flip(0.2).unwrap(),
            phase_flip(0.7).unwrap(),
            diagonal_pauli(0.5, -0.2, 0.1).unwrap(),
            imperfect_not(0.4, 0.3).unwrap(),
        ];
        for ch in &unital {
            assert!(ch.is_unital());
            assert!(ch.apply(&BlochVector::zero()).unwrap().vec().max_abs() <= 1e-14);
        }
        let ad = amplitude_damping(0.3).unwrap();
        assert!(!ad.is_unital());
        assert!(ad.apply(&BlochVector::zero()).unwrap().vec().norm() > 0.1);
    }

    #[test]
    fn fixed_points_on_z() {
        assert_eq!(amplitude_damping(1.0).unwrap().z_axis_fixed_points(), AxisFixedPoints::Single(Vec3::Z));
        assert_eq!(amplitude_damping(0.4).unwrap().z_axis_fixed_points(), AxisFixedPoints::Single(Vec3::Z));
        assert_eq!(depolarizing(0.0).unwrap().z_axis_fixed_points(), AxisFixedPoints::WholeAxis);
        assert_eq!(depolarizing(0.5).unwrap().z_axis_fixed_points(), AxisFixedPoints::Single(Vec3::ZERO));
        assert_eq!(phase_flip(0.2).unwrap().z_axis_fixed_points(), AxisFixedPoints::WholeAxis);
        assert_eq!(imperfect_not(0.3, 0.1).unwrap().z_axis_fixed_points(), AxisFixedPoints::Single(Vec3::ZERO));
    }

    #[test]
    fn collinear_examples() {
        assert!((collinear_overlap(0.3, 0.3) - 1.0).abs() < 1e-15);
        assert_eq!(collinear_overlap(1.0, -1.0), 0.0);
        assert!((collinear_overlap(0.8, 0.4) - 0.966_930_474_076_265).abs() < 1e-14);
    }

    #[test]
    fn closed_form_examples() {
        let g = channel_overlap_closed_form(&ClosedForm::Depolarizing { p: 0.5 }, 0.8).unwrap();
        assert!((g - collinear_overlap(0.8, 0.4)).abs() < 1e-14);
        let g = channel_overlap_closed_form(&ClosedForm::AmplitudeDamping { gamma: 1.0 }, -1.0).unwrap();
        assert_eq!(g, 0.0);
        // r_x is untouched by the bit flip
        let ch = bit_flip(0.37).unwrap();
        let r = bv(0.6, 0.0, 0.0);
        assert_eq!(optimal_overlap(&r, &ch.apply(&r).unwrap()).unwrap().g_star, 1.0);
        assert!(channel_overlap_closed_form(&ClosedForm::BitFlip { p: 2.0 }, 0.1).is_err());
        assert!(channel_overlap_closed_form(&ClosedForm::Pauli { axis: 3, lambda: 0.1 }, 0.1).is_err());
    }

    #[test]
    fn closed_forms_match_pipeline() {
        let mut rng = ChaCha8Rng::seed_from_u64(25);
        for _ in 0..2000 {
            let x: f64 = rng.gen();
            let family = match rng.gen_range(0..5) {
                0 => ClosedForm::Depolarizing { p: x },
                1 => ClosedForm::BitFlip { p: 0.5 * x },
                2 => ClosedForm::PhaseFlip { p: 0.5 * x },
                3 => ClosedForm::Pauli { axis: rng.gen_range(0..3), lambda: x },
                _ => ClosedForm::AmplitudeDamping { gamma: x },
            };
            let r: f64 = rng.gen_range(-1.0..=1.0);
            let input = BlochVector::from_vec(family.input_axis() * r).unwrap();
            let out = family.channel().unwrap().apply(&input).unwrap();
            let res = optimal_overlap(&input, &out).unwrap();
            let g = channel_overlap_closed_form(&family, r).unwrap();
            let (a, b) = (r, out.vec().dot(family.input_axis()));
            assert!((g - collinear_overlap(a, b)).abs() <= 1e-14);
            assert!((res.g_star - g).abs() <= 1e-9, "{family:?} r={r}");
            // same-direction members are aligned without rotation
            if a * b >= 0.0 {
                assert!(res.theta <= 1e-9, "{family:?} r={r} theta={}", res.theta);
            }
        }
    }

    #[test]
    fn spec_strings() {
        assert_eq!(parse_channel("dep:p=0.25").unwrap().m, depolarizing(0.25).unwrap().m);
        assert_eq!(parse_channel("bf:p=0.1").unwrap().m, bit_flip(0.1).unwrap().m);
        assert_eq!(parse_channel("pf:p=0.1").unwrap().m, phase_flip(0.1).unwrap().m);
        assert_eq!(parse_channel("pauli:lx=0.9,ly=0.8,lz=0.7").unwrap().m, Mat3::diag(0.9, 0.8, 0.7));
        assert_eq!(parse_channel("ad:g=0.5").unwrap().c, Vec3::new(0.0, 0.0, 0.5));
        assert_eq!(parse_channel("not:p=0.3,da=0.1").unwrap().m, imperfect_not(0.3, 0.1).unwrap().m);
        let aff = parse_channel("affine:m=0.5,0,0,0,0.5,0,0,0,0.5,c=0,0,0.25").unwrap();
        assert_eq!(aff.m, Mat3::identity() * 0.5);
        assert_eq!(aff.c, Vec3::new(0.0, 0.0, 0.25));

        for bad in ["", "xyz:p=1", "dep", "dep:q=0.1", "dep:p=abc", "dep:p=2", "dep:p=0.1,p=0.2", "affine:m=1,2,c=0,0,0", "pauli:lx=1,ly=1"] {
            let err = parse_channel(bad).unwrap_err();
            assert!(matches!(err, Error::InvalidParameter(_)), "{bad}");
        }
        let msg = parse_channel("nope").unwrap_err().to_string();
        assert!(msg.contains("ad:g=<g>"));

        let t = ChannelTemplate::parse("not:da=0.2").unwrap();
        assert!(t.instantiate(&[]).is_err());
        assert_eq!(t.instantiate(&[("p", 0.4)]).unwrap().m, imperfect_not(0.4, 0.2).unwrap().m);
        assert!(t.instantiate(&[("g", 0.4)]).is_err());
    }
}
