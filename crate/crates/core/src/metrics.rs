//! Fidelity-based distances, all as functions of the maximal purification overlap.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::procrustes::{optimal_overlap, ProcrustesResult};
use crate::qstate::{density_from_bloch, uhlmann_fidelity, BlochVector};

/// Slack allowed on arguments that must lie in `[0, 1]`.
pub const RANGE_TOL: f64 = 1e-12;

fn unit_interval(name: &str, x: f64) -> Result<f64> {
    if !(-RANGE_TOL..=1.0 + RANGE_TOL).contains(&x) {
        return Err(Error::InvalidInput(format!("{name} = {x} outside [0, 1]")));
    }
    Ok(x.clamp(0.0, 1.0))
}

/// `h₂(x) = −x log₂ x − (1−x) log₂(1−x)`, with `h₂(0) = h₂(1) = 0`.
pub fn binary_entropy(x: f64) -> Result<f64> {
    let x = unit_interval("x", x)?;
    let term = |t: f64| if t > 0.0 { -t * t.log2() } else { 0.0 };
    Ok((term(x) + term(1.0 - x)).min(1.0))
}

/// `D_N = √h₂((1+g)/2)`.
pub fn dn_from_overlap(g: f64) -> Result<f64> {
    let g = unit_interval("g", g)?;
    Ok(binary_entropy(0.5 * (1.0 + g))?.sqrt())
}

/// Bures distance `√(2(1 − √F))`.
pub fn bures_from_fidelity(f: f64) -> Result<f64> {
    let f = unit_interval("F", f)?;
    Ok((2.0 * (1.0 - f.sqrt())).max(0.0).sqrt())
}

/// Bures angle `arccos √F`.
pub fn bures_angle_from_fidelity(f: f64) -> Result<f64> {
    let f = unit_interval("F", f)?;
    Ok(f.sqrt().min(1.0).acos())
}

/// `√(1 − F)`.
pub fn root_infidelity_from_fidelity(f: f64) -> Result<f64> {
    let f = unit_interval("F", f)?;
    Ok((1.0 - f).sqrt())
}

/// All distances for a pair, plus the misalignment angle.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MetricReport {
    pub g_star: f64,
    pub fidelity: f64,
    pub d_n: f64,
    pub bures: f64,
    pub bures_angle: f64,
    pub root_infidelity: f64,
    pub theta: f64,
    pub degenerate: bool,
    /// `|g⋆ − √F|` against the spectral fidelity.
    pub fidelity_gap: f64,
}

impl MetricReport {
    pub fn from_result(res: &ProcrustesResult, r: &BlochVector, s: &BlochVector) -> Result<Self> {
        let g = res.g_star;
        let f = g * g;
        let spectral = uhlmann_fidelity(&density_from_bloch(r), &density_from_bloch(s));
        Ok(MetricReport {
            g_star: g,
            fidelity: f,
            d_n: dn_from_overlap(g)?,
            bures: bures_from_fidelity(f)?,
            bures_angle: bures_angle_from_fidelity(f)?,
            root_infidelity: root_infidelity_from_fidelity(f)?,
            theta: res.theta,
            degenerate: res.degenerate,
            fidelity_gap: (g - spectral.sqrt()).abs(),
        })
    }
}

/// Runs the Procrustes pipeline once and fills every distance.
pub fn metric_report(r: &BlochVector, s: &BlochVector) -> Result<MetricReport> {
    MetricReport::from_result(&optimal_overlap(r, s)?, r, s)
}

/// `D_N` between two states.
pub fn d_n(r: &BlochVector, s: &BlochVector) -> Result<f64> {
    dn_from_overlap(optimal_overlap(r, s)?.g_star)
}
