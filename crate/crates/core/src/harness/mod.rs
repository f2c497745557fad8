//! Experiment drivers: Monte-Carlo classification statistics over many phase
//! matrices, two-parameter slice scans, and the invariant verification suite.
//!
//! Every random draw is taken from [`substream`](crate::rng::substream), so
//! outputs depend on the configuration and seed only, never on the thread
//! count.

mod scan;
mod stats;
mod verify;

use std::fmt;
use std::str::FromStr;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::states::{random_phase_matrix, PhaseMode};
use crate::weyl::{gen_bell_basis, BellBasis, Dimension, PhaseMatrix};

pub use scan::{run_slice_scan, scan_counts, write_scan_csv, ScanCell, ScanCounts, ScanWindow, SCAN_HEADER};
pub use stats::{
    run_sample_stats, ColumnSummary, Correlations, ExperimentConfig, StatsReport, Summary, SystemReport,
    MAX_CLASSIFICATIONS,
};
pub use verify::{run_verify, Bound, InvariantCheck, VerifyReport};

/// How the Bell basis of each system is chosen.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(into = "String", try_from = "String")]
pub enum AlphaMode {
    /// The standard Bell basis (a single system).
    Standard,
    /// Phase angles iid uniform on `[0, 2π)`.
    Full,
    /// Phase angles iid uniform on `[0, ε)`.
    Small(f64),
}

impl AlphaMode {
    fn phase_mode(self) -> Option<PhaseMode> {
        match self {
            AlphaMode::Standard => None,
            AlphaMode::Full => Some(PhaseMode::Full),
            AlphaMode::Small(eps) => Some(PhaseMode::Small(eps)),
        }
    }

    /// The phase matrix of `system`, drawn from `substream(seed, "alpha", system)`.
    pub fn phase_matrix(self, d: Dimension, seed: u64, system: u64) -> Result<PhaseMatrix> {
        match self.phase_mode() {
            None => Ok(PhaseMatrix::ones(d)),
            Some(mode) => random_phase_matrix(d, mode, &mut crate::rng::substream(seed, "alpha", system)),
        }
    }

    pub fn basis(self, d: Dimension, seed: u64, system: u64) -> Result<BellBasis> {
        match self {
            AlphaMode::Standard => Ok(BellBasis::standard(d)),
            _ => gen_bell_basis(&self.phase_matrix(d, seed, system)?),
        }
    }
}

impl fmt::Display for AlphaMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            AlphaMode::Standard => f.write_str("standard"),
            AlphaMode::Full => f.write_str("full"),
            AlphaMode::Small(eps) => write!(f, "small:{eps}"),
        }
    }
}

impl FromStr for AlphaMode {
    type Err = Error;

    /// `standard`, `full` or `small:EPS` with `EPS > 0`.
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "standard" => Ok(AlphaMode::Standard),
            "full" => Ok(AlphaMode::Full),
            _ => {
                let eps = s
                    .strip_prefix("small:")
                    .and_then(|v| v.parse::<f64>().ok())
                    .ok_or_else(|| Error::InvalidInput(format!("unknown alpha mode '{s}'")))?;
                if !(eps > 0.0 && eps.is_finite()) {
                    return Err(Error::InvalidInput(format!(
                        "small-phase scale must be positive, got {eps}"
                    )));
                }
                Ok(AlphaMode::Small(eps))
            }
        }
    }
}

impl From<AlphaMode> for String {
    fn from(m: AlphaMode) -> String {
        m.to_string()
    }
}

impl TryFrom<String> for AlphaMode {
    type Error = Error;

    fn try_from(s: String) -> Result<Self> {
        s.parse()
    }
}

/// Pearson correlation coefficient.
pub fn pearson(xs: &[f64], ys: &[f64]) -> Result<f64> {
    if xs.len() != ys.len() {
        return Err(Error::DimensionMismatch {
            expected: xs.len(),
            found: ys.len(),
        });
    }
    if xs.len() < 2 {
        return Err(Error::InvalidInput("correlation needs at least two points".into()));
    }
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let (mut sxy, mut sxx, mut syy) = (0.0, 0.0, 0.0);
    for (x, y) in xs.iter().zip(ys) {
        let (dx, dy) = (x - mx, y - my);
        sxy += dx * dy;
        sxx += dx * dx;
        syy += dy * dy;
    }
    if sxx == 0.0 || syy == 0.0 {
        return Err(Error::ZeroVariance);
    }
    Ok((sxy / (sxx * syy).sqrt()).clamp(-1.0, 1.0))
}

pub(crate) fn uniform_in<R: Rng + ?Sized>(rng: &mut R, lo: f64, hi: f64) -> f64 {
    lo + (hi - lo) * rng.random::<f64>()
}
