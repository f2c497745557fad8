//! Bell-diagonal states, simplex sampling, the two-parameter slice family and
//! random product/separable states.

use std::f64::consts::TAU;

use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::Rng;
use rand_distr::{Exp1, StandardNormal};

use crate::error::{Error, Result};
use crate::qmat::{kron, ComplexMatrix, DensityMatrix, StateVector};
use crate::weyl::{BasisId, BellBasis, BellIndex, Dimension, PhaseMatrix};

/// Coefficients within this distance below zero are clamped to zero.
pub const COEFF_TOL: f64 = 1e-12;

/// `ρ = Σ c_{k,l} P_{k,l}` in a named Bell basis.
#[derive(Clone, Debug, PartialEq)]
pub struct BellDiagonalState {
    d: Dimension,
    // flat, c[k * d + l]
    c: Vec<f64>,
    basis: BasisId,
}

impl BellDiagonalState {
    /// Validates `c ≥ 0` and `Σ c = 1`. Entries in `[−1e-12, 0)` are clamped.
    pub fn new(d: Dimension, c: Vec<f64>, basis: BasisId) -> Result<Self> {
        if c.len() != d.squared() {
            return Err(Error::DimensionMismatch {
                expected: d.squared(),
                found: c.len(),
            });
        }
        if let Some(bad) = c.iter().find(|x| !x.is_finite() || **x < -COEFF_TOL) {
            return Err(Error::NotProbability(format!("coefficient {bad}")));
        }
        let c: Vec<f64> = c.into_iter().map(|x| x.max(0.0)).collect();
        let total: f64 = c.iter().sum();
        if (total - 1.0).abs() > 1e-12 {
            return Err(Error::NotProbability(format!("coefficients sum to {total}")));
        }
        Ok(Self { d, c, basis })
    }

    /// Like [`BellDiagonalState::new`] but with a looser sum tolerance,
    /// renormalizing afterwards. For channel outputs that carry round-off.
    pub fn from_image(d: Dimension, c: Vec<f64>, basis: BasisId, sum_tol: f64) -> Result<Self> {
        if let Some(bad) = c.iter().find(|x| !x.is_finite() || **x < -sum_tol.max(COEFF_TOL)) {
            return Err(Error::NotProbability(format!("coefficient {bad}")));
        }
        let c: Vec<f64> = c.into_iter().map(|x| x.max(0.0)).collect();
        let total: f64 = c.iter().sum();
        if (total - 1.0).abs() > sum_tol {
            return Err(Error::NotProbability(format!("coefficients sum to {total}")));
        }
        Self::new(d, c.iter().map(|x| x / total).collect(), basis)
    }

    pub fn uniform(d: Dimension, basis: BasisId) -> Self {
        let n = d.squared();
        Self {
            d,
            c: vec![1.0 / n as f64; n],
            basis,
        }
    }

    pub fn dim(&self) -> Dimension {
        self.d
    }

    pub fn coefficients(&self) -> &[f64] {
        &self.c
    }

    pub fn coefficient(&self, idx: BellIndex) -> f64 {
        self.c[idx.flat(self.d)]
    }

    pub fn basis_id(&self) -> &BasisId {
        &self.basis
    }

    /// Index of the largest coefficient; ties go to the lexicographically
    /// smallest `(k, l)`.
    pub fn dominant_index(&self) -> BellIndex {
        BellIndex::from_flat(self.d, dominant_flat(&self.c))
    }
}

pub(crate) fn dominant_flat(c: &[f64]) -> usize {
    let mut best = 0;
    for (i, &x) in c.iter().enumerate() {
        if x > c[best] {
            best = i;
        }
    }
    best
}

/// Uniform point on the `(d²−1)`-simplex: `d²` iid Exp(1) draws normalized by
/// their sum.
pub fn sample_simplex<R: Rng + ?Sized>(d: Dimension, rng: &mut R) -> Vec<f64> {
    sample_simplex_n(d.squared(), rng)
}

pub(crate) fn sample_simplex_n<R: Rng + ?Sized>(n: usize, rng: &mut R) -> Vec<f64> {
    let mut x: Vec<f64> = (0..n).map(|_| rng.sample::<f64, _>(Exp1)).collect();
    let total: f64 = x.iter().sum();
    for v in &mut x {
        *v /= total;
    }
    x
}

/// Where [`sample_region`] draws coefficient vectors from.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SamplingRegion {
    /// The whole simplex.
    Simplex,
    /// The enclosure polytope `{c : c_{k,l} ≤ 1/d for all k,l}`. Any
    /// coefficient above `1/d` makes the state NPT in every Bell basis
    /// (fidelity with a maximally entangled state exceeds `1/d`), so all PPT
    /// states live here.
    #[default]
    Enclosure,
}

impl SamplingRegion {
    pub fn contains(self, d: Dimension, c: &[f64]) -> bool {
        match self {
            SamplingRegion::Simplex => true,
            SamplingRegion::Enclosure => {
                let bound = 1.0 / d.get() as f64;
                c.iter().all(|&x| x <= bound)
            }
        }
    }
}

/// Uniform point of `region`, by rejection from [`sample_simplex`]. The
/// enclosure polytope holds at least half of the simplex volume for every `d`,
/// so the expected number of draws is at most 2.
pub fn sample_region<R: Rng + ?Sized>(d: Dimension, region: SamplingRegion, rng: &mut R) -> Vec<f64> {
    loop {
        let c = sample_simplex(d, rng);
        if region.contains(d, &c) {
            return c;
        }
    }
}

/// `Σ c_{k,l} P_{k,l}`, computed as `U diag(c) U†` with `U` the basis
/// change-of-basis unitary.
pub fn assemble_density(s: &BellDiagonalState, basis: &BellBasis) -> Result<DensityMatrix> {
    check_basis(s, basis)?;
    Ok(assemble_unchecked(&s.c, basis))
}

pub(crate) fn assemble_unchecked(c: &[f64], basis: &BellBasis) -> DensityMatrix {
    let u = basis.change_of_basis();
    let n = u.nrows();
    let scaled = DMatrix::from_fn(n, n, |r, col| u[(r, col)] * c[col]);
    let rho = scaled * u.adjoint();
    // U diag(c) U† is Hermitian up to round-off; force exact symmetry.
    let rho = (&rho + rho.adjoint()) * Complex64::new(0.5, 0.0);
    let d = basis.dim().get();
    DensityMatrix::from_trusted(ComplexMatrix::from_nalgebra(rho), (d, d)).expect("Bell-diagonal assembly is Hermitian")
}

pub(crate) fn check_basis(s: &BellDiagonalState, basis: &BellBasis) -> Result<()> {
    if s.d != basis.dim() {
        return Err(Error::DimensionMismatch {
            expected: basis.dim().get(),
            found: s.d.get(),
        });
    }
    if &s.basis != basis.id() {
        return Err(Error::BasisMismatch {
            expected: basis.id().to_string(),
            found: s.basis.to_string(),
        });
    }
    Ok(())
}

/// Parameters `(a, b)` of the two-dimensional qutrit slice family.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SliceCoordinates {
    pub a: f64,
    pub b: f64,
}

/// Coefficients of
/// `ρ(a,b) = q·𝟙/9 + (a/5)P₀₀ + (b/8)(P₀₁+P₀₂) + (1/(3√3))(P₁₀+P₁₁+P₁₂)`,
/// `q = 1 − a/5 − b/4 − 1/√3`. They always sum to one; they may be negative.
pub fn family_coefficients(p: SliceCoordinates) -> [f64; 9] {
    let inv_sqrt3 = 1.0 / 3f64.sqrt();
    let q = 1.0 - p.a / 5.0 - p.b / 4.0 - inv_sqrt3;
    let base = q / 9.0;
    let row1 = base + inv_sqrt3 / 3.0;
    [
        base + p.a / 5.0,
        base + p.b / 8.0,
        base + p.b / 8.0,
        row1,
        row1,
        row1,
        base,
        base,
        base,
    ]
}

/// The slice-family state at `p` in `basis`, or `None` outside the simplex.
pub fn family_state(p: SliceCoordinates, basis: &BellBasis) -> Result<Option<BellDiagonalState>> {
    if basis.dim().get() != 3 {
        return Err(Error::DimensionMismatch {
            expected: 3,
            found: basis.dim().get(),
        });
    }
    let c = family_coefficients(p);
    if c.iter().any(|x| *x < -COEFF_TOL) {
        return Ok(None);
    }
    let clamped: Vec<f64> = c.iter().map(|x| x.max(0.0)).collect();
    let total: f64 = clamped.iter().sum();
    let c = clamped.into_iter().map(|x| x / total).collect();
    BellDiagonalState::new(basis.dim(), c, basis.id().clone()).map(Some)
}

/// How phase angles are drawn for [`random_phase_matrix`].
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum PhaseMode {
    /// iid uniform on `[0, 2π)`
    Full,
    /// iid uniform on `[0, ε)`
    Small(f64),
}

pub fn random_phase_matrix<R: Rng + ?Sized>(d: Dimension, mode: PhaseMode, rng: &mut R) -> Result<PhaseMatrix> {
    let upper = match mode {
        PhaseMode::Full => TAU,
        PhaseMode::Small(eps) if eps > 0.0 && eps.is_finite() => eps,
        PhaseMode::Small(eps) => {
            return Err(Error::InvalidInput(format!(
                "small-phase scale must be positive, got {eps}"
            )))
        }
    };
    let n = d.get();
    let angles: Vec<Vec<f64>> = (0..n)
        .map(|_| (0..n).map(|_| rng.random::<f64>() * upper).collect())
        .collect();
    PhaseMatrix::from_angles(d, &angles)
}

/// `|ψ₁⟩ ⊗ |ψ₂⟩` with both factors normalized.
#[derive(Clone, Debug, PartialEq)]
pub struct ProductState {
    pub psi1: StateVector,
    pub psi2: StateVector,
}

impl ProductState {
    pub fn new(psi1: StateVector, psi2: StateVector) -> Result<Self> {
        if !psi1.is_normalized() || !psi2.is_normalized() {
            return Err(Error::InvalidInput("product-state factors must be normalized".into()));
        }
        Ok(Self { psi1, psi2 })
    }

    pub fn ket(&self) -> StateVector {
        self.psi1.kron(&self.psi2)
    }

    pub fn density(&self) -> DensityMatrix {
        DensityMatrix::from_trusted(
            kron(&self.psi1.projector(), &self.psi2.projector()),
            (self.psi1.dim(), self.psi2.dim()),
        )
        .expect("tensor product of projectors is Hermitian")
    }
}

/// Haar-random pure state: normalized vector of iid complex Gaussians.
pub fn haar_state<R: Rng + ?Sized>(dim: usize, rng: &mut R) -> StateVector {
    let amps: Vec<Complex64> = (0..dim)
        .map(|_| Complex64::new(rng.sample(StandardNormal), rng.sample(StandardNormal)))
        .collect();
    StateVector::new(amps).normalized()
}

pub fn random_product_state<R: Rng + ?Sized>(d: Dimension, rng: &mut R) -> ProductState {
    ProductState {
        psi1: haar_state(d.get(), rng),
        psi2: haar_state(d.get(), rng),
    }
}

/// `Σ q_i ρ₁ⁱ ⊗ ρ₂ⁱ` with weights uniform on the simplex and Haar-random
/// pure factors. Separable by construction.
pub fn random_separable<R: Rng + ?Sized>(d: Dimension, terms: usize, rng: &mut R) -> Result<DensityMatrix> {
    if terms == 0 {
        return Err(Error::InvalidInput("random_separable needs at least one term".into()));
    }
    let weights = sample_simplex_n(terms, rng);
    let n = d.get();
    let mut acc = ComplexMatrix::zeros(n * n, n * n);
    for q in weights {
        let term = random_product_state(d, rng).density().into_matrix();
        acc = &acc + &term.scale_real(q);
    }
    DensityMatrix::from_trusted(acc, (n, n))
}
