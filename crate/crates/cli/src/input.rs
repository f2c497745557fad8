//! State files accepted by `bellbasis classify`.

use serde::Deserialize;

use bellbasis::criteria::classify_density;
use bellbasis::qmat::{ComplexMatrix, DensityMatrix};
use bellbasis::weyl::gen_bell_basis;
use bellbasis::{
    BellBasis, BellDiagonalState, ClassificationRecord, Classifier, Dimension, Error, PhaseMatrix, Result,
};
use num_complex::Complex64;

#[derive(Debug, Deserialize)]
#[serde(untagged)]
pub enum Coefficients {
    Flat(Vec<f64>),
    Nested(Vec<Vec<f64>>),
}

#[derive(Debug, Deserialize)]
#[serde(untagged)]
pub enum AlphaSpec {
    Named(String),
    Phases { phases: Vec<Vec<f64>> },
}

#[derive(Debug, Deserialize)]
#[serde(untagged)]
pub enum StateFile {
    BellDiagonal {
        d: usize,
        c: Coefficients,
        alpha: Option<AlphaSpec>,
    },
    Density {
        d1: usize,
        d2: usize,
        rho: Vec<Vec<[f64; 2]>>,
    },
}

fn basis_for(d: Dimension, alpha: Option<AlphaSpec>) -> Result<BellBasis> {
    match alpha {
        None => Ok(BellBasis::standard(d)),
        Some(AlphaSpec::Named(name)) if name == "standard" => Ok(BellBasis::standard(d)),
        Some(AlphaSpec::Named(name)) => Err(Error::InvalidInput(format!(
            "alpha must be \"standard\" or {{\"phases\": ...}}, got \"{name}\""
        ))),
        Some(AlphaSpec::Phases { phases }) => gen_bell_basis(&PhaseMatrix::from_angles(d, &phases)?),
    }
}

impl StateFile {
    pub fn classify(self) -> Result<ClassificationRecord> {
        match self {
            StateFile::BellDiagonal { d, c, alpha } => {
                let d = Dimension::new(d)?;
                let c = match c {
                    Coefficients::Flat(v) => v,
                    Coefficients::Nested(rows) => {
                        if rows.len() != d.get() || rows.iter().any(|r| r.len() != d.get()) {
                            return Err(Error::InvalidInput(format!("c must be {0}x{0}", d.get())));
                        }
                        rows.concat()
                    }
                };
                let basis = basis_for(d, alpha)?;
                let state = BellDiagonalState::new(d, c, basis.id().clone())?;
                Classifier::new(&basis).classify(&state)
            }
            StateFile::Density { d1, d2, rho } => {
                let n = d1 * d2;
                if rho.len() != n || rho.iter().any(|r| r.len() != n) {
                    return Err(Error::InvalidInput(format!("rho must be {n}x{n}")));
                }
                let entries: Vec<Complex64> = rho.iter().flatten().map(|[re, im]| Complex64::new(*re, *im)).collect();
                let m = ComplexMatrix::from_row_major(n, n, &entries)?;
                classify_density(&DensityMatrix::new(m, (d1, d2))?)
            }
        }
    }
}
