use std::io::Write;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::criteria::Classifier;
use crate::error::{Error, Result};
use crate::states::{family_state, SliceCoordinates};
use crate::weyl::BellBasis;

pub const SCAN_HEADER: &str = "a,b,valid,ppt,e2,e3";

/// Rectangular grid over the `(a, b)` slice parameters, endpoints included.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ScanWindow {
    pub a_range: (f64, f64),
    pub b_range: (f64, f64),
    pub nx: usize,
    pub ny: usize,
}

impl Default for ScanWindow {
    fn default() -> Self {
        Self {
            a_range: (-1.0, 3.0),
            b_range: (-1.0, 3.0),
            nx: 201,
            ny: 201,
        }
    }
}

impl ScanWindow {
    fn coordinate(range: (f64, f64), n: usize, i: usize) -> f64 {
        if n == 1 {
            range.0
        } else {
            range.0 + (range.1 - range.0) * i as f64 / (n - 1) as f64
        }
    }

    /// Grid points with `b` varying slowest.
    pub fn points(&self) -> impl Iterator<Item = SliceCoordinates> + '_ {
        (0..self.ny).flat_map(move |j| {
            let b = Self::coordinate(self.b_range, self.ny, j);
            (0..self.nx).map(move |i| SliceCoordinates {
                a: Self::coordinate(self.a_range, self.nx, i),
                b,
            })
        })
    }

    fn validate(&self) -> Result<()> {
        let finite = [self.a_range.0, self.a_range.1, self.b_range.0, self.b_range.1]
            .iter()
            .all(|x| x.is_finite());
        if !finite || self.a_range.0 > self.a_range.1 || self.b_range.0 > self.b_range.1 {
            return Err(Error::InvalidInput("scan ranges must be finite with LO ≤ HI".into()));
        }
        if self.nx == 0 || self.ny == 0 {
            return Err(Error::InvalidInput(
                "scan grid needs at least one point per axis".into(),
            ));
        }
        Ok(())
    }
}

/// One grid point. The flags are false for invalid (non-positive) points.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ScanCell {
    pub a: f64,
    pub b: f64,
    pub valid: bool,
    pub ppt: bool,
    pub e2: bool,
    pub e3: bool,
}

/// Classifies every valid point of the slice family in `basis` (which must be
/// a qutrit basis).
pub fn run_slice_scan(basis: &BellBasis, window: &ScanWindow) -> Result<Vec<ScanCell>> {
    window.validate()?;
    if basis.dim().get() != 3 {
        return Err(Error::DimensionMismatch {
            expected: 3,
            found: basis.dim().get(),
        });
    }
    let classifier = Classifier::new(basis);
    let points: Vec<SliceCoordinates> = window.points().collect();
    points
        .par_iter()
        .map(|&p| {
            let cell = match family_state(p, basis)? {
                None => ScanCell {
                    a: p.a,
                    b: p.b,
                    valid: false,
                    ppt: false,
                    e2: false,
                    e3: false,
                },
                Some(state) => {
                    let r = classifier.classify(&state)?;
                    ScanCell {
                        a: p.a,
                        b: p.b,
                        valid: true,
                        ppt: r.ppt,
                        e2: r.e2_detects,
                        e3: r.e3_detects,
                    }
                }
            };
            Ok(cell)
        })
        .collect()
}

pub fn write_scan_csv<W: Write>(cells: &[ScanCell], mut out: W) -> std::io::Result<()> {
    writeln!(out, "{SCAN_HEADER}")?;
    for c in cells {
        writeln!(
            out,
            "{:.6},{:.6},{},{},{},{}",
            c.a, c.b, c.valid as u8, c.ppt as u8, c.e2 as u8, c.e3 as u8
        )?;
    }
    Ok(())
}

/// Cell counts per figure color class.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct ScanCounts {
    pub valid: usize,
    pub npt: usize,
    pub ppt: usize,
    /// PPT and detected by realignment.
    pub ppt_e2: usize,
    /// PPT and detected by the quasipure concurrence.
    pub ppt_e3: usize,
}

pub fn scan_counts(cells: &[ScanCell]) -> ScanCounts {
    let mut n = ScanCounts::default();
    for c in cells.iter().filter(|c| c.valid) {
        n.valid += 1;
        if c.ppt {
            n.ppt += 1;
            n.ppt_e2 += c.e2 as usize;
            n.ppt_e3 += c.e3 as usize;
        } else {
            n.npt += 1;
        }
    }
    n
}
