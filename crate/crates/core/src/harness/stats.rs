use std::ops::Add;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{pearson, AlphaMode};
use crate::criteria::Classifier;
use crate::error::{Error, Result};
use crate::rng::substream;
use crate::states::{sample_region, SamplingRegion};
use crate::weyl::{BellBasis, Dimension};

/// Upper bound on `states × systems` accepted by [`run_sample_stats`].
pub const MAX_CLASSIFICATIONS: u64 = 1_000_000_000;
const MAX_STATES: usize = 50_000_000;
const CHUNK: usize = 256;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ExperimentConfig {
    pub d: Dimension,
    pub n_states: usize,
    /// Ignored in standard mode, which always has a single system.
    pub n_systems: usize,
    pub alpha_mode: AlphaMode,
    pub seed: u64,
    /// Worker threads; 0 lets rayon decide. Results do not depend on it.
    pub parallelism: usize,
    pub region: SamplingRegion,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub output_path: Option<String>,
}

impl ExperimentConfig {
    pub fn new(d: Dimension, n_states: usize, n_systems: usize, alpha_mode: AlphaMode, seed: u64) -> Self {
        Self {
            d,
            n_states,
            n_systems,
            alpha_mode,
            seed,
            parallelism: 0,
            region: SamplingRegion::default(),
            output_path: None,
        }
    }

    pub fn effective_systems(&self) -> usize {
        match self.alpha_mode {
            AlphaMode::Standard => 1,
            _ => self.n_systems,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.n_states == 0 {
            return Err(Error::InvalidInput("n_states must be at least 1".into()));
        }
        if self.n_systems == 0 {
            return Err(Error::InvalidInput("n_systems must be at least 1".into()));
        }
        if self.n_states > MAX_STATES {
            return Err(Error::TooLarge(format!(
                "{} states exceed the in-memory limit of {MAX_STATES}",
                self.n_states
            )));
        }
        let work = self.n_states as u64 * self.effective_systems() as u64;
        if work > MAX_CLASSIFICATIONS {
            return Err(Error::TooLarge(format!(
                "{work} classifications exceed the limit of {MAX_CLASSIFICATIONS}"
            )));
        }
        Ok(())
    }
}

/// Aggregate shares for one Bell basis over the shared coefficient set.
/// All `*_ppt` shares and `e3_only` are fractions of the PPT subpopulation
/// and are 0 when that subpopulation is empty.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SystemReport {
    pub system_id: u64,
    /// The phase matrix is drawn from `substream(alpha_seed, "alpha", system_id)`.
    pub alpha_seed: Option<u64>,
    pub basis: String,
    pub n_states: usize,
    pub n_ppt: usize,
    pub n_e2: usize,
    pub n_e3: usize,
    pub n_both: usize,
    pub rppt: f64,
    pub e2_ppt: f64,
    pub e3_ppt: f64,
    pub both_ppt: f64,
    pub union_ppt: f64,
    /// Share of E3-detected PPT states missed by E2.
    pub e3_only: f64,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
struct Counts {
    states: usize,
    ppt: usize,
    e2: usize,
    e3: usize,
    both: usize,
}

impl Add for Counts {
    type Output = Counts;

    fn add(self, o: Counts) -> Counts {
        Counts {
            states: self.states + o.states,
            ppt: self.ppt + o.ppt,
            e2: self.e2 + o.e2,
            e3: self.e3 + o.e3,
            both: self.both + o.both,
        }
    }
}

fn ratio(num: usize, den: usize) -> f64 {
    if den == 0 {
        0.0
    } else {
        num as f64 / den as f64
    }
}

impl SystemReport {
    fn from_counts(system_id: u64, alpha_seed: Option<u64>, basis: &BellBasis, c: Counts) -> Self {
        let e2_ppt = ratio(c.e2, c.ppt);
        let e3_ppt = ratio(c.e3, c.ppt);
        let both_ppt = ratio(c.both, c.ppt);
        Self {
            system_id,
            alpha_seed,
            basis: basis.id().to_string(),
            n_states: c.states,
            n_ppt: c.ppt,
            n_e2: c.e2,
            n_e3: c.e3,
            n_both: c.both,
            rppt: ratio(c.ppt, c.states),
            e2_ppt,
            e3_ppt,
            both_ppt,
            union_ppt: ratio(c.e2 + c.e3 - c.both, c.ppt),
            e3_only: ratio(c.e3 - c.both, c.e3),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ColumnSummary {
    pub min: f64,
    pub max: f64,
    pub mean: f64,
}

impl ColumnSummary {
    fn of(values: impl Iterator<Item = f64>) -> Self {
        let (mut min, mut max, mut sum, mut n) = (f64::INFINITY, f64::NEG_INFINITY, 0.0, 0usize);
        for v in values {
            min = min.min(v);
            max = max.max(v);
            sum += v;
            n += 1;
        }
        Self {
            min,
            max,
            mean: sum / n as f64,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Summary {
    pub rppt: ColumnSummary,
    pub e2_ppt: ColumnSummary,
    pub e3_ppt: ColumnSummary,
    pub both_ppt: ColumnSummary,
    pub union_ppt: ColumnSummary,
    pub e3_only: ColumnSummary,
}

impl Summary {
    fn of(systems: &[SystemReport]) -> Self {
        let col = |f: fn(&SystemReport) -> f64| ColumnSummary::of(systems.iter().map(f));
        Self {
            rppt: col(|s| s.rppt),
            e2_ppt: col(|s| s.e2_ppt),
            e3_ppt: col(|s| s.e3_ppt),
            both_ppt: col(|s| s.both_ppt),
            union_ppt: col(|s| s.union_ppt),
            e3_only: col(|s| s.e3_only),
        }
    }
}

/// Pearson coefficients across systems; `None` with fewer than two systems
/// or a constant column.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Correlations {
    pub rppt_e2_ppt: Option<f64>,
    pub rppt_e3_ppt: Option<f64>,
    pub rppt_both_ppt: Option<f64>,
}

impl Correlations {
    fn of(systems: &[SystemReport]) -> Self {
        let rppt: Vec<f64> = systems.iter().map(|s| s.rppt).collect();
        let with = |f: fn(&SystemReport) -> f64| {
            let ys: Vec<f64> = systems.iter().map(f).collect();
            pearson(&rppt, &ys).ok()
        };
        Self {
            rppt_e2_ppt: with(|s| s.e2_ppt),
            rppt_e3_ppt: with(|s| s.e3_ppt),
            rppt_both_ppt: with(|s| s.both_ppt),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct StatsReport {
    pub config: ExperimentConfig,
    /// The standard basis on the same coefficient set; present for the
    /// phase-matrix modes.
    pub reference: Option<SystemReport>,
    pub systems: Vec<SystemReport>,
    pub summary: Summary,
    pub correlations: Correlations,
}

fn count(basis: &BellBasis, cs: &[Vec<f64>]) -> Counts {
    let classifier = Classifier::new(basis);
    cs.par_chunks(CHUNK)
        .map(|chunk| {
            chunk.iter().fold(Counts::default(), |acc, c| {
                let r = classifier.classify_coefficients(c);
                let ppt = r.ppt as usize;
                acc + Counts {
                    states: 1,
                    ppt,
                    e2: ppt * r.e2_detects as usize,
                    e3: ppt * r.e3_detects as usize,
                    both: ppt * (r.e2_detects && r.e3_detects) as usize,
                }
            })
        })
        .reduce(Counts::default, Add::add)
}

/// The coefficient set shared by every system: state `i` comes from
/// `substream(seed, "c", i)`.
pub(crate) fn sample_set(d: Dimension, n: usize, region: SamplingRegion, seed: u64) -> Vec<Vec<f64>> {
    (0..n as u64)
        .into_par_iter()
        .map(|i| sample_region(d, region, &mut substream(seed, "c", i)))
        .collect()
}

/// Classifies one shared coefficient set in every system's Bell basis.
pub fn run_sample_stats(cfg: &ExperimentConfig) -> Result<StatsReport> {
    cfg.validate()?;
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(cfg.parallelism)
        .build()
        .map_err(|e| Error::InvalidInput(format!("thread pool: {e}")))?;
    pool.install(|| {
        let cs = sample_set(cfg.d, cfg.n_states, cfg.region, cfg.seed);
        let standard = BellBasis::standard(cfg.d);
        let standard_report = SystemReport::from_counts(0, None, &standard, count(&standard, &cs));
        let (reference, systems) = match cfg.alpha_mode {
            AlphaMode::Standard => (None, vec![standard_report]),
            mode => {
                let systems = (0..cfg.n_systems as u64)
                    .into_par_iter()
                    .map(|sys| {
                        let basis = mode.basis(cfg.d, cfg.seed, sys)?;
                        Ok(SystemReport::from_counts(
                            sys,
                            Some(cfg.seed),
                            &basis,
                            count(&basis, &cs),
                        ))
                    })
                    .collect::<Result<Vec<_>>>()?;
                (Some(standard_report), systems)
            }
        };
        Ok(StatsReport {
            config: cfg.clone(),
            summary: Summary::of(&systems),
            correlations: Correlations::of(&systems),
            reference,
            systems,
        })
    })
}
