//! Weyl–Heisenberg Bell bases for bipartite qudits and their generalizations.
//!
//! The crate builds the standard Bell basis `|Ω_{k,l}⟩ = (W_{k,l} ⊗ 𝟙)|Ω_{0,0}⟩`
//! and the phase-twisted bases `|Φ^α_{k,l}⟩`, compares the Pauli projection
//! channel with the Weyl-Twirl channel, classifies Bell-diagonal states with
//! the PPT, realignment and quasipure-concurrence criteria, simulates the
//! ancilla-based Bell-error identification circuit, and drives the Monte-Carlo
//! experiments in [`harness`].

pub mod channels;
pub mod criteria;
pub mod ecc;
pub mod error;
pub mod harness;
pub mod qmat;
pub mod rng;
pub mod states;
pub mod weyl;

pub use criteria::{ClassificationRecord, Classifier};
pub use error::{Error, Result};
pub use harness::{AlphaMode, ExperimentConfig, ScanCell, SystemReport};
pub use qmat::{ComplexMatrix, DensityMatrix, StateVector, Subsystem};
pub use states::{BellDiagonalState, PhaseMode, SamplingRegion, SliceCoordinates};
pub use weyl::{BasisId, BasisKind, BellBasis, BellIndex, Dimension, PhaseMatrix};
