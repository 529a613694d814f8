//! Parameter sweeps, pair reports and verification suites behind the `qubit-align` binary.
//!
//! Everything here is deterministic: the same spec and seed give byte-identical output.

use std::fmt::Write as _;
use std::io::{self, Write};
use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::channels::{
    channel_overlap_closed_form, collinear_overlap, AffineChannel, AxisFixedPoints, ChannelTemplate,
    ClosedForm,
};
use crate::error::{Error, Result};
use crate::linalg3::{rotation_from_axis_angle, AxisAngle, Vec3};
use crate::metrics::{d_n, MetricReport};
use crate::procrustes::{fano_procrustes_matrix, lift_mismatch, lift_su2, optimal_overlap, procrustes_solve, procrustes_matrix};
use crate::purification::{canonical_purification, fano_overlap_squared, rotate_purification};
use crate::qstate::{density_from_bloch, mul4, projector_from_fano, trace4, uhlmann_fidelity, BlochVector};
use crate::sampling;

/// Fixed CSV column order.
pub const CSV_HEADER: &str =
    "param,r_x,r_y,r_z,rp_x,rp_y,rp_z,g_star,fidelity,d_n,theta,axis_x,axis_y,axis_z,degenerate";

/// `name:start:stop:count`, evaluated at `count ≥ 2` evenly spaced points.
#[derive(Debug, Clone, PartialEq)]
pub struct ParamRange {
    pub name: String,
    pub start: f64,
    pub stop: f64,
    pub count: usize,
}

impl ParamRange {
    pub fn values(&self) -> Vec<f64> {
        let last = (self.count - 1) as f64;
        (0..self.count)
            .map(|i| if i + 1 == self.count { self.stop } else { self.start + (self.stop - self.start) * (i as f64 / last) })
            .collect()
    }
}

impl FromStr for ParamRange {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let parts: Vec<&str> = s.split(':').collect();
        let bad = || Error::InvalidInput(format!("expected --param name:start:stop:count, got '{s}'"));
        if parts.len() != 4 || parts[0].is_empty() {
            return Err(bad());
        }
        let start: f64 = parse_real(parts[1])?;
        let stop: f64 = parse_real(parts[2])?;
        let count: usize = parts[3].trim().parse().map_err(|_| bad())?;
        if count < 2 {
            return Err(Error::InvalidInput(format!("sweep count must be at least 2, got {count}")));
        }
        Ok(ParamRange { name: parts[0].trim().to_string(), start, stop, count })
    }
}

fn parse_real(s: &str) -> Result<f64> {
    let t = s.trim();
    if t.ends_with("deg") || t.ends_with('°') {
        return Err(Error::InvalidInput(format!("'{t}': angles are in radians, degree suffixes are not accepted")));
    }
    match t.parse::<f64>() {
        Ok(x) if x.is_finite() => Ok(x),
        _ => Err(Error::InvalidInput(format!("'{t}' is not a finite real number"))),
    }
}

/// Parses `phi=..,theta=..,r=..` (radians) into a Bloch vector.
pub fn parse_state(s: &str) -> Result<BlochVector> {
    let (mut phi, mut theta, mut r) = (None, None, None);
    for tok in s.split(',').map(str::trim).filter(|t| !t.is_empty()) {
        let (k, v) = tok
            .split_once('=')
            .ok_or_else(|| Error::InvalidInput(format!("expected key=value in --state, got '{tok}'")))?;
        let slot = match k.trim() {
            "phi" => &mut phi,
            "theta" => &mut theta,
            "r" => &mut r,
            other => return Err(Error::InvalidInput(format!("unknown --state key '{other}'"))),
        };
        *slot = Some(parse_real(v)?);
    }
    let (phi, theta, r) = match (phi, theta, r) {
        (Some(a), Some(b), Some(c)) => (a, b, c),
        _ => return Err(Error::InvalidInput(format!("--state needs phi, theta and r, got '{s}'"))),
    };
    spherical_state(phi, theta, r)
}

fn spherical_state(phi: f64, theta: f64, r: f64) -> Result<BlochVector> {
    if !(0.0..2.0 * std::f64::consts::PI).contains(&phi) {
        return Err(Error::InvalidState(format!("phi = {phi} outside [0, 2π)")));
    }
    if !(0.0..=std::f64::consts::PI).contains(&theta) {
        return Err(Error::InvalidState(format!("theta = {theta} outside [0, π]")));
    }
    BlochVector::from_spherical(r, theta, phi)
}

/// Input-state families for a sweep.
#[derive(Debug, Clone, PartialEq)]
pub enum StateFamily {
    /// Fixed direction `(phi, theta)`, several radii.
    Radii { phi: f64, theta: f64, radii: Vec<f64> },
    /// Fixed radius, several `(phi, theta)` directions.
    Angles { radius: f64, angles: Vec<(f64, f64)> },
    /// States given one by one.
    Explicit(Vec<BlochVector>),
}

impl StateFamily {
    /// Radii 0.3, 0.6, 0.9 along `(φ, θ) = (π/4, π/3)`.
    pub fn radii_preset() -> Self {
        StateFamily::Radii { phi: std::f64::consts::FRAC_PI_4, theta: std::f64::consts::FRAC_PI_3, radii: vec![0.3, 0.6, 0.9] }
    }

    /// Directions `(0, π/4)`, `(π/4, π/3)`, `(π/2, π/2)` at radius 0.9.
    pub fn angles_preset() -> Self {
        use std::f64::consts::{FRAC_PI_2, FRAC_PI_3, FRAC_PI_4};
        StateFamily::Angles { radius: 0.9, angles: vec![(0.0, FRAC_PI_4), (FRAC_PI_4, FRAC_PI_3), (FRAC_PI_2, FRAC_PI_2)] }
    }

    pub fn preset(name: &str) -> Result<Self> {
        match name {
            "radii" => Ok(Self::radii_preset()),
            "angles" => Ok(Self::angles_preset()),
            other => Err(Error::InvalidInput(format!("unknown preset '{other}' (radii, angles)"))),
        }
    }

    pub fn states(&self) -> Result<Vec<BlochVector>> {
        match self {
            StateFamily::Radii { phi, theta, radii } => radii.iter().map(|&r| spherical_state(*phi, *theta, r)).collect(),
            StateFamily::Angles { radius, angles } => angles.iter().map(|&(p, t)| spherical_state(p, t, *radius)).collect(),
            StateFamily::Explicit(v) => Ok(v.clone()),
        }
    }
}

/// What the channel output is compared against.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Reference {
    /// The input state itself.
    #[default]
    Input,
    /// The input after an ideal NOT, `(x, y, z) ↦ (x, −y, −z)`.
    IdealNot,
}

impl FromStr for Reference {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "input" => Ok(Reference::Input),
            "ideal-not" => Ok(Reference::IdealNot),
            other => Err(Error::InvalidInput(format!("unknown reference '{other}' (input, ideal-not)"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepSpec {
    pub channel: ChannelTemplate,
    pub param: ParamRange,
    pub family: StateFamily,
    pub reference: Reference,
}

/// One sweep table row. `r` is the reference state, `rp` the channel output.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SweepRow {
    pub param: f64,
    pub r: Vec3,
    pub rp: Vec3,
    pub g_star: f64,
    pub fidelity: f64,
    pub d_n: f64,
    pub theta: f64,
    pub axis: Vec3,
    pub degenerate: bool,
}

impl SweepRow {
    pub fn csv_line(&self) -> String {
        let reals = [
            self.param, self.r.x, self.r.y, self.r.z, self.rp.x, self.rp.y, self.rp.z, self.g_star, self.fidelity,
            self.d_n, self.theta, self.axis.x, self.axis.y, self.axis.z,
        ];
        let mut s = String::new();
        for x in reals {
            write!(s, "{x:.16e},").expect("write to string");
        }
        s.push_str(if self.degenerate { "true" } else { "false" });
        s
    }
}

/// Rows ordered by family member, then parameter value.
pub fn run_sweep(spec: &SweepSpec) -> Result<Vec<SweepRow>> {
    if !spec.channel.accepts(&spec.param.name) {
        return Err(Error::InvalidParameter(format!(
            "channel '{}' has no sweepable parameter '{}'",
            spec.channel.kind, spec.param.name
        )));
    }
    let values = spec.param.values();
    let channels = values
        .iter()
        .map(|&v| spec.channel.instantiate(&[(spec.param.name.as_str(), v)]))
        .collect::<Result<Vec<_>>>()?;
    let mut rows = Vec::new();
    for input in spec.family.states()? {
        let reference = match spec.reference {
            Reference::Input => input,
            Reference::IdealNot => {
                let v = input.vec();
                BlochVector::from_vec(Vec3::new(v.x, -v.y, -v.z))?
            }
        };
        for (&value, ch) in values.iter().zip(&channels) {
            let out = ch.apply(&input)?;
            let res = optimal_overlap(&reference, &out)?;
            let rep = MetricReport::from_result(&res, &reference, &out)?;
            rows.push(SweepRow {
                param: value,
                r: reference.vec(),
                rp: out.vec(),
                g_star: rep.g_star,
                fidelity: rep.fidelity,
                d_n: rep.d_n,
                theta: res.theta,
                axis: res.axis,
                degenerate: res.degenerate,
            });
        }
    }
    Ok(rows)
}

pub fn write_csv<W: Write>(rows: &[SweepRow], mut w: W) -> io::Result<()> {
    writeln!(w, "{CSV_HEADER}")?;
    for row in rows {
        writeln!(w, "{}", row.csv_line())?;
    }
    Ok(())
}

/// Output formats for [`pair_report`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum PairFormat {
    #[default]
    Kv,
    Json,
    Csv,
}

impl FromStr for PairFormat {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "kv" => Ok(PairFormat::Kv),
            "json" => Ok(PairFormat::Json),
            "csv" => Ok(PairFormat::Csv),
            other => Err(Error::InvalidInput(format!("unknown format '{other}' (kv, json, csv)"))),
        }
    }
}

#[derive(Debug, Clone, Serialize)]
struct PairOutput {
    r: Vec3,
    s: Vec3,
    #[serde(flatten)]
    metrics: MetricReport,
    s_star: [[f64; 3]; 3],
    axis: Vec3,
    singular_values: [f64; 3],
    max_trace: f64,
    /// `[[re, im], [re, im]]` rows of `U⋆`.
    u_star: [[[f64; 2]; 2]; 2],
}

/// Full report for one state pair.
pub fn pair_report(r: &BlochVector, s: &BlochVector, format: PairFormat) -> Result<String> {
    let res = optimal_overlap(r, s)?;
    let metrics = MetricReport::from_result(&res, r, s)?;
    let u = res.u_star.matrix();
    let out = PairOutput {
        r: r.vec(),
        s: s.vec(),
        metrics,
        s_star: res.s_star.matrix().0,
        axis: res.axis,
        singular_values: res.singular_values,
        max_trace: res.max_trace,
        u_star: [0, 1].map(|i| [0, 1].map(|j| [u[i][j].re, u[i][j].im])),
    };
    let value = serde_json::to_value(&out).map_err(|e| Error::InvalidInput(e.to_string()))?;
    match format {
        PairFormat::Json => serde_json::to_string_pretty(&value).map_err(|e| Error::InvalidInput(e.to_string())),
        PairFormat::Kv | PairFormat::Csv => {
            let mut keys = Vec::new();
            let mut vals = Vec::new();
            flatten(&value, String::new(), &mut keys, &mut vals);
            if format == PairFormat::Kv {
                Ok(keys.iter().zip(&vals).map(|(k, v)| format!("{k}={v}\n")).collect())
            } else {
                Ok(format!("{}\n{}\n", keys.join(","), vals.join(",")))
            }
        }
    }
}

fn flatten(v: &serde_json::Value, prefix: String, keys: &mut Vec<String>, vals: &mut Vec<String>) {
    use serde_json::Value;
    let join = |k: &str| if prefix.is_empty() { k.to_string() } else { format!("{prefix}_{k}") };
    match v {
        Value::Object(map) => {
            for (k, x) in map {
                flatten(x, join(k), keys, vals);
            }
        }
        Value::Array(xs) => {
            for (i, x) in xs.iter().enumerate() {
                flatten(x, join(&i.to_string()), keys, vals);
            }
        }
        Value::Number(n) => {
            keys.push(prefix);
            vals.push(n.as_f64().map(|x| format!("{x:.16e}")).unwrap_or_else(|| n.to_string()));
        }
        other => {
            keys.push(prefix);
            vals.push(other.to_string());
        }
    }
}

/// Human-readable description of a channel.
pub fn channel_info(ch: &AffineChannel) -> String {
    let mut s = String::new();
    let _ = writeln!(s, "channel: {}", ch.label);
    for i in 0..3 {
        let r = ch.m.row(i);
        let _ = writeln!(s, "M[{i}] = [{:>12.9}, {:>12.9}, {:>12.9}]", r.x, r.y, r.z);
    }
    let _ = writeln!(s, "c    = [{:>12.9}, {:>12.9}, {:>12.9}]", ch.c.x, ch.c.y, ch.c.z);
    let _ = writeln!(s, "unital: {}", ch.is_unital());
    let fixed = match ch.z_axis_fixed_points() {
        AxisFixedPoints::None => "none".to_string(),
        AxisFixedPoints::Single(v) => format!("({}, {}, {})", v.x, v.y, v.z),
        AxisFixedPoints::WholeAxis => "every point of the z axis".to_string(),
    };
    let _ = writeln!(s, "fixed points on z axis: {fixed}");
    let check = ch.ball_check();
    let _ = writeln!(
        s,
        "ball check: {} ({} sphere samples, max output norm {:.12})",
        if check.passed { "pass" } else { "FAIL" },
        check.samples,
        check.max_output_norm
    );
    s
}

/// The verification suites.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Suite {
    FidelityConsistency,
    MetricAxioms,
    PurityConstraints,
    ProcrustesOptimality,
    ChannelClosedForms,
    Su2Lift,
}

impl Suite {
    pub const ALL: [Suite; 6] = [
        Suite::FidelityConsistency,
        Suite::MetricAxioms,
        Suite::PurityConstraints,
        Suite::ProcrustesOptimality,
        Suite::ChannelClosedForms,
        Suite::Su2Lift,
    ];

    pub fn name(&self) -> &'static str {
        match self {
            Suite::FidelityConsistency => "fidelity-consistency",
            Suite::MetricAxioms => "metric-axioms",
            Suite::PurityConstraints => "purity-constraints",
            Suite::ProcrustesOptimality => "procrustes-optimality",
            Suite::ChannelClosedForms => "channel-closed-forms",
            Suite::Su2Lift => "su2-lift",
        }
    }

    /// A suite name, or `all`.
    pub fn parse_list(s: &str) -> Result<Vec<Suite>> {
        if s == "all" {
            return Ok(Suite::ALL.to_vec());
        }
        Suite::ALL
            .iter()
            .find(|x| x.name() == s)
            .map(|x| vec![*x])
            .ok_or_else(|| {
                let names: Vec<_> = Suite::ALL.iter().map(|x| x.name()).collect();
                Error::InvalidInput(format!("unknown suite '{s}' ({}, all)", names.join(", ")))
            })
    }
}

/// One checked quantity inside a suite.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Check {
    pub name: &'static str,
    pub max_violation: f64,
    pub tolerance: f64,
}

impl Check {
    fn new(name: &'static str, tolerance: f64) -> Self {
        Check { name, max_violation: 0.0, tolerance }
    }

    fn record(&mut self, v: f64) {
        // NaN must register as a failure
        if v.is_nan() || v > self.max_violation {
            self.max_violation = if v.is_nan() { f64::INFINITY } else { v };
        }
    }

    pub fn passed(&self) -> bool {
        self.max_violation <= self.tolerance
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SuiteReport {
    pub suite: &'static str,
    pub samples: usize,
    pub checks: Vec<Check>,
}

impl SuiteReport {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(Check::passed)
    }

    pub fn summary(&self) -> String {
        let mut s = String::new();
        let _ = writeln!(s, "{} [{}] ({} samples)", self.suite, if self.passed() { "pass" } else { "FAIL" }, self.samples);
        for c in &self.checks {
            let _ = writeln!(
                s,
                "  {:<28} max violation {:.3e} (tolerance {:.0e}) {}",
                c.name,
                c.max_violation,
                c.tolerance,
                if c.passed() { "ok" } else { "FAIL" }
            );
        }
        s
    }
}

fn pair_sample(rng: &mut ChaCha8Rng, k: usize) -> (BlochVector, BlochVector) {
    match k % 4 {
        0 => (sampling::pure_state(rng), sampling::pure_state(rng)),
        1 => (sampling::pure_state(rng), sampling::ball_state(rng)),
        _ => (sampling::ball_state(rng), sampling::ball_state(rng)),
    }
}

/// Runs one suite on `samples` seeded draws.
pub fn run_suite(suite: Suite, samples: usize, seed: u64) -> Result<SuiteReport> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let checks = match suite {
        Suite::FidelityConsistency => {
            let mut c = Check::new("|g* - sqrt F|", 1e-9);
            for k in 0..samples {
                let (r, s) = pair_sample(&mut rng, k);
                let f = uhlmann_fidelity(&density_from_bloch(&r), &density_from_bloch(&s));
                c.record((optimal_overlap(&r, &s)?.g_star - f.sqrt()).abs());
            }
            vec![c]
        }
        Suite::MetricAxioms => {
            let mut sym = Check::new("symmetry", 1e-10);
            let mut tri = Check::new("triangle inequality", 1e-10);
            let mut inv = Check::new("unitary invariance", 1e-10);
            for _ in 0..samples {
                let (a, b, c) = (sampling::ball_state(&mut rng), sampling::ball_state(&mut rng), sampling::ball_state(&mut rng));
                let ab = d_n(&a, &b)?;
                sym.record((ab - d_n(&b, &a)?).abs());
                tri.record(ab - d_n(&a, &c)? - d_n(&c, &b)?);
                let rot = sampling::rotation(&mut rng);
                let (a2, b2) = (BlochVector::from_vec(rot.apply(a.vec()))?, BlochVector::from_vec(rot.apply(b.vec()))?);
                inv.record((ab - d_n(&a2, &b2)?).abs());
            }
            vec![sym, tri, inv]
        }
        Suite::PurityConstraints => {
            let mut inv = Check::new("purity constraints", 1e-10);
            let mut ovl = Check::new("overlap vs projector trace", 1e-10);
            for _ in 0..samples {
                let (r, s) = (sampling::ball_state(&mut rng), sampling::ball_state(&mut rng));
                let p = canonical_purification(&r);
                inv.record(p.constraint_violation());
                let q = rotate_purification(&canonical_purification(&s), &sampling::rotation(&mut rng));
                inv.record(q.constraint_violation());
                let direct = trace4(&mul4(&projector_from_fano(&p), &projector_from_fano(&q))).re;
                ovl.record((fano_overlap_squared(&p, &q) - direct).abs());
            }
            vec![inv, ovl]
        }
        Suite::ProcrustesOptimality => {
            let mut opt = Check::new("Tr(KS) - Tr(KS*)", 1e-10);
            let mut cf = Check::new("closed-form maximum", 1e-12);
            let mut routes = Check::new("gauge vs Fano K", 1e-12);
            for _ in 0..samples {
                let (r, s) = (sampling::ball_state(&mut rng), sampling::ball_state(&mut rng));
                let k = procrustes_matrix(&r, &s)?;
                routes.record(k.max_abs_diff(&fano_procrustes_matrix(&canonical_purification(&r), &canonical_purification(&s))));
                let sol = procrustes_solve(&k)?;
                cf.record((sol.max_trace - sol.closed_form).abs());
                for _ in 0..1000 {
                    let rot = sampling::rotation(&mut rng);
                    opt.record((k * *rot.matrix()).trace() - sol.max_trace);
                }
            }
            vec![opt, cf, routes]
        }
        Suite::ChannelClosedForms => {
            let mut g = Check::new("|g* - closed form|", 1e-9);
            let mut theta = Check::new("theta (same-direction pairs)", 1e-9);
            for _ in 0..samples {
                let x: f64 = rng.gen();
                let family = match rng.gen_range(0..5) {
                    0 => ClosedForm::Depolarizing { p: x },
                    1 => ClosedForm::BitFlip { p: x },
                    2 => ClosedForm::PhaseFlip { p: x },
                    3 => ClosedForm::Pauli { axis: rng.gen_range(0..3), lambda: 2.0 * x - 1.0 },
                    _ => ClosedForm::AmplitudeDamping { gamma: x },
                };
                let r: f64 = rng.gen_range(-1.0..=1.0);
                let input = BlochVector::from_vec(family.input_axis() * r)?;
                let out = family.channel()?.apply(&input)?;
                let res = optimal_overlap(&input, &out)?;
                let b = out.vec().dot(family.input_axis());
                let expected = channel_overlap_closed_form(&family, r)?;
                g.record((res.g_star - expected).abs().max((expected - collinear_overlap(r, b)).abs()));
                // antiparallel pairs are aligned by a half turn in the canonical gauge
                if r * b >= 0.0 {
                    theta.record(res.theta);
                }
            }
            vec![g, theta]
        }
        Suite::Su2Lift => {
            let mut conj = Check::new("U†(v.σ)U - (Sv).σ", 1e-10);
            let mut unit = Check::new("unitarity", 1e-10);
            for k in 0..samples {
                let (s_rot, u) = if k % 2 == 0 {
                    let (r, s) = pair_sample(&mut rng, k / 2);
                    let res = optimal_overlap(&r, &s)?;
                    (res.s_star, res.u_star)
                } else {
                    let angle = match k % 6 {
                        1 => std::f64::consts::PI - rng.gen_range(0.0..1e-6),
                        3 => rng.gen_range(0.0..1e-6),
                        _ => rng.gen_range(0.0..=std::f64::consts::PI),
                    };
                    let aa = AxisAngle::new(sampling::unit_vector(&mut rng), angle)?;
                    (rotation_from_axis_angle(&aa), lift_su2(&aa)?)
                };
                conj.record(lift_mismatch(&s_rot, &u));
                unit.record(u.unitarity_error());
            }
            vec![conj, unit]
        }
    };
    Ok(SuiteReport { suite: suite.name(), samples, checks })
}
