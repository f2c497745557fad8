//! Dense complex linear algebra for bipartite states.
//!
//! Bipartite basis vectors `|i⟩ ⊗ |k⟩` map to the flat index `i * d2 + k`
//! everywhere in this crate. The partial transpose, the realignment and the
//! partial trace all rely on that single convention.

use std::fmt;
use std::ops::{Add, Mul, Sub};

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use crate::error::{Error, Result};

/// Tolerance on `‖m − m†‖_max` below which a matrix is treated as Hermitian.
pub const HERMITIAN_TOL: f64 = 1e-10;

/// Eigenvalues below `-NEGATIVE_EIG_TOL` count as negative.
pub const NEGATIVE_EIG_TOL: f64 = 1e-9;

pub const ZERO: Complex64 = Complex64::new(0.0, 0.0);
pub const ONE: Complex64 = Complex64::new(1.0, 0.0);

/// Dense complex matrix.
#[derive(Clone, PartialEq)]
pub struct ComplexMatrix(DMatrix<Complex64>);

impl ComplexMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self(DMatrix::zeros(rows, cols))
    }

    pub fn identity(n: usize) -> Self {
        Self(DMatrix::identity(n, n))
    }

    pub fn from_fn(rows: usize, cols: usize, f: impl FnMut(usize, usize) -> Complex64) -> Self {
        Self(DMatrix::from_fn(rows, cols, f))
    }

    /// Builds a matrix from row-major entries. Rejects non-finite entries.
    pub fn from_row_major(rows: usize, cols: usize, entries: &[Complex64]) -> Result<Self> {
        if entries.len() != rows * cols {
            return Err(Error::DimensionMismatch {
                expected: rows * cols,
                found: entries.len(),
            });
        }
        if entries.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(Error::InvalidInput("non-finite matrix entry".into()));
        }
        Ok(Self(DMatrix::from_row_slice(rows, cols, entries)))
    }

    pub fn diag_real(values: &[f64]) -> Self {
        let n = values.len();
        Self::from_fn(n, n, |r, c| if r == c { Complex64::new(values[r], 0.0) } else { ZERO })
    }

    /// `|a⟩⟨b|`
    pub fn outer(a: &StateVector, b: &StateVector) -> Self {
        Self(&a.0 * b.0.adjoint())
    }

    pub fn from_nalgebra(m: DMatrix<Complex64>) -> Self {
        Self(m)
    }

    pub fn as_nalgebra(&self) -> &DMatrix<Complex64> {
        &self.0
    }

    pub fn into_nalgebra(self) -> DMatrix<Complex64> {
        self.0
    }

    pub fn rows(&self) -> usize {
        self.0.nrows()
    }

    pub fn cols(&self) -> usize {
        self.0.ncols()
    }

    pub fn is_square(&self) -> bool {
        self.rows() == self.cols()
    }

    pub fn get(&self, r: usize, c: usize) -> Complex64 {
        self.0[(r, c)]
    }

    pub fn set(&mut self, r: usize, c: usize, z: Complex64) {
        self.0[(r, c)] = z;
    }

    pub fn adjoint(&self) -> Self {
        Self(self.0.adjoint())
    }

    pub fn conj(&self) -> Self {
        Self(self.0.map(|z| z.conj()))
    }

    pub fn transpose(&self) -> Self {
        Self(self.0.transpose())
    }

    pub fn scale(&self, s: Complex64) -> Self {
        Self(&self.0 * s)
    }

    pub fn scale_real(&self, s: f64) -> Self {
        self.scale(Complex64::new(s, 0.0))
    }

    pub fn trace(&self) -> Complex64 {
        self.0.trace()
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.0.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    /// Frobenius distance `‖self − other‖_F`.
    pub fn distance(&self, other: &Self) -> f64 {
        debug_assert_eq!((self.rows(), self.cols()), (other.rows(), other.cols()));
        self.0
            .iter()
            .zip(other.0.iter())
            .map(|(a, b)| (a - b).norm_sqr())
            .sum::<f64>()
            .sqrt()
    }

    /// Largest entrywise modulus of `self − self†`.
    pub fn hermiticity_defect(&self) -> f64 {
        if !self.is_square() {
            return f64::INFINITY;
        }
        let n = self.rows();
        let mut worst = 0.0f64;
        for r in 0..n {
            for c in r..n {
                worst = worst.max((self.0[(r, c)] - self.0[(c, r)].conj()).norm());
            }
        }
        worst
    }

    /// `max |(self† self − 𝟙)_{rc}|`
    pub fn unitarity_defect(&self) -> f64 {
        let prod = self.0.adjoint() * &self.0;
        let n = prod.nrows();
        let mut worst = 0.0f64;
        for r in 0..n {
            for c in 0..n {
                let target = if r == c { ONE } else { ZERO };
                worst = worst.max((prod[(r, c)] - target).norm());
            }
        }
        worst
    }

    pub fn apply(&self, v: &StateVector) -> StateVector {
        StateVector(&self.0 * &v.0)
    }

    /// Row-major copy of the entries.
    pub fn to_row_major(&self) -> Vec<Complex64> {
        let mut out = Vec::with_capacity(self.rows() * self.cols());
        for r in 0..self.rows() {
            for c in 0..self.cols() {
                out.push(self.0[(r, c)]);
            }
        }
        out
    }

    /// `(m + m†)/2` after checking the Hermiticity defect is within [`HERMITIAN_TOL`].
    fn symmetrized(&self) -> Result<DMatrix<Complex64>> {
        let defect = self.hermiticity_defect();
        if defect.is_nan() || defect > HERMITIAN_TOL {
            return Err(Error::NotHermitian { defect });
        }
        Ok((&self.0 + self.0.adjoint()) * Complex64::new(0.5, 0.0))
    }
}

impl fmt::Debug for ComplexMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "ComplexMatrix{}x{}", self.rows(), self.cols())?;
        for r in 0..self.rows() {
            write!(f, "\n  [")?;
            for c in 0..self.cols() {
                let z = self.0[(r, c)];
                write!(f, " {:+.4}{:+.4}i", z.re, z.im)?;
            }
            write!(f, " ]")?;
        }
        Ok(())
    }
}

impl<'a> Mul<&'a ComplexMatrix> for &'a ComplexMatrix {
    type Output = ComplexMatrix;
    fn mul(self, rhs: &'a ComplexMatrix) -> ComplexMatrix {
        ComplexMatrix(&self.0 * &rhs.0)
    }
}

impl<'a> Add<&'a ComplexMatrix> for &'a ComplexMatrix {
    type Output = ComplexMatrix;
    fn add(self, rhs: &'a ComplexMatrix) -> ComplexMatrix {
        ComplexMatrix(&self.0 + &rhs.0)
    }
}

impl<'a> Sub<&'a ComplexMatrix> for &'a ComplexMatrix {
    type Output = ComplexMatrix;
    fn sub(self, rhs: &'a ComplexMatrix) -> ComplexMatrix {
        ComplexMatrix(&self.0 - &rhs.0)
    }
}

/// Dense complex column vector (a ket).
#[derive(Clone, Debug, PartialEq)]
pub struct StateVector(DVector<Complex64>);

impl StateVector {
    pub fn new(amplitudes: Vec<Complex64>) -> Self {
        Self(DVector::from_vec(amplitudes))
    }

    pub fn zeros(dim: usize) -> Self {
        Self(DVector::zeros(dim))
    }

    /// Computational basis ket `|index⟩`.
    pub fn basis(dim: usize, index: usize) -> Self {
        let mut v = DVector::zeros(dim);
        v[index] = ONE;
        Self(v)
    }

    pub fn from_nalgebra(v: DVector<Complex64>) -> Self {
        Self(v)
    }

    pub fn as_nalgebra(&self) -> &DVector<Complex64> {
        &self.0
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        self.0.as_slice()
    }

    pub fn amplitudes_mut(&mut self) -> &mut [Complex64] {
        self.0.as_mut_slice()
    }

    pub fn norm(&self) -> f64 {
        self.0.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    pub fn is_normalized(&self) -> bool {
        (self.norm() - 1.0).abs() <= 1e-12
    }

    pub fn normalized(&self) -> Self {
        let n = self.norm();
        Self(&self.0 / Complex64::new(n, 0.0))
    }

    /// `⟨self|other⟩`
    pub fn inner(&self, other: &Self) -> Complex64 {
        self.0.dotc(&other.0)
    }

    pub fn scale(&self, s: Complex64) -> Self {
        Self(&self.0 * s)
    }

    pub fn distance(&self, other: &Self) -> f64 {
        (&self.0 - &other.0).norm()
    }

    pub fn kron(&self, other: &Self) -> Self {
        Self(self.0.kronecker(&other.0))
    }

    /// `|self⟩⟨self|`
    pub fn projector(&self) -> ComplexMatrix {
        ComplexMatrix::outer(self, self)
    }
}

/// Bipartite density matrix on `H_{d1} ⊗ H_{d2}`.
#[derive(Clone, Debug, PartialEq)]
pub struct DensityMatrix {
    matrix: ComplexMatrix,
    dims: (usize, usize),
}

impl DensityMatrix {
    /// Validates Hermiticity, unit trace and positivity before accepting `matrix`.
    pub fn new(matrix: ComplexMatrix, dims: (usize, usize)) -> Result<Self> {
        let rho = Self::from_trusted(matrix, dims)?;
        let tr = rho.matrix.trace();
        if (tr.re - 1.0).abs() > 1e-12 || tr.im.abs() > 1e-12 {
            return Err(Error::NotDensityMatrix(format!("trace {tr}")));
        }
        let spec = hermitian_eigenvalues(&rho.matrix)?;
        if spec[0] < -NEGATIVE_EIG_TOL {
            return Err(Error::NotDensityMatrix(format!("smallest eigenvalue {:.3e}", spec[0])));
        }
        Ok(rho)
    }

    /// Checks shape and Hermiticity only. For matrices that are density
    /// matrices by construction (mixtures of projectors, channel outputs).
    pub fn from_trusted(matrix: ComplexMatrix, dims: (usize, usize)) -> Result<Self> {
        let n = dims.0 * dims.1;
        if matrix.rows() != n || matrix.cols() != n {
            return Err(Error::DimensionMismatch {
                expected: n,
                found: matrix.rows(),
            });
        }
        let defect = matrix.hermiticity_defect();
        if defect.is_nan() || defect > HERMITIAN_TOL {
            return Err(Error::NotHermitian { defect });
        }
        Ok(Self { matrix, dims })
    }

    pub fn pure(psi: &StateVector, dims: (usize, usize)) -> Result<Self> {
        Self::from_trusted(psi.normalized().projector(), dims)
    }

    pub fn maximally_mixed(d1: usize, d2: usize) -> Self {
        let n = d1 * d2;
        Self {
            matrix: ComplexMatrix::identity(n).scale_real(1.0 / n as f64),
            dims: (d1, d2),
        }
    }

    /// `ρ₁ ⊗ ρ₂` from two single-party matrices.
    pub fn product(rho1: &ComplexMatrix, rho2: &ComplexMatrix) -> Result<Self> {
        Self::from_trusted(kron(rho1, rho2), (rho1.rows(), rho2.rows()))
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.matrix
    }

    pub fn into_matrix(self) -> ComplexMatrix {
        self.matrix
    }

    pub fn dims(&self) -> (usize, usize) {
        self.dims
    }

    pub fn dim(&self) -> usize {
        self.dims.0 * self.dims.1
    }

    /// `⟨ψ|ρ|ψ⟩`, real part.
    pub fn expectation(&self, psi: &StateVector) -> f64 {
        psi.inner(&self.matrix.apply(psi)).re
    }
}

/// Which party of a bipartite system.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Subsystem {
    First,
    Second,
}

impl TryFrom<u8> for Subsystem {
    type Error = Error;
    fn try_from(id: u8) -> Result<Self> {
        match id {
            1 => Ok(Subsystem::First),
            2 => Ok(Subsystem::Second),
            other => Err(Error::InvalidSubsystem(other)),
        }
    }
}

pub fn kron(a: &ComplexMatrix, b: &ComplexMatrix) -> ComplexMatrix {
    ComplexMatrix(a.0.kronecker(&b.0))
}

/// Eigen-decomposition of a Hermitian matrix.
#[derive(Clone, Debug)]
pub struct Spectrum {
    /// Ascending.
    pub values: Vec<f64>,
    /// `vectors[i]` belongs to `values[i]`.
    pub vectors: Vec<StateVector>,
}

impl Spectrum {
    /// `Σ λ_i |v_i⟩⟨v_i|`
    pub fn reconstruct(&self) -> ComplexMatrix {
        let n = self.vectors.first().map_or(0, StateVector::dim);
        let mut acc = DMatrix::zeros(n, n);
        for (lambda, v) in self.values.iter().zip(&self.vectors) {
            acc += (&v.0 * v.0.adjoint()) * Complex64::new(*lambda, 0.0);
        }
        ComplexMatrix(acc)
    }
}

pub fn hermitian_spectrum(m: &ComplexMatrix) -> Result<Spectrum> {
    let sym = m.symmetrized()?;
    let eig = sym.symmetric_eigen();
    let mut order: Vec<usize> = (0..eig.eigenvalues.len()).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
    let values = order.iter().map(|&i| eig.eigenvalues[i]).collect();
    let vectors = order
        .iter()
        .map(|&i| StateVector(eig.eigenvectors.column(i).into_owned()))
        .collect();
    Ok(Spectrum { values, vectors })
}

/// Eigenvalues only, ascending. Cheaper than [`hermitian_spectrum`].
pub fn hermitian_eigenvalues(m: &ComplexMatrix) -> Result<Vec<f64>> {
    let sym = m.symmetrized()?;
    let mut values: Vec<f64> = sym.symmetric_eigenvalues().iter().copied().collect();
    values.sort_by(f64::total_cmp);
    Ok(values)
}

/// Singular values, descending.
pub fn singular_values(m: &ComplexMatrix) -> Vec<f64> {
    if m.rows() == 0 || m.cols() == 0 {
        return Vec::new();
    }
    let mut values: Vec<f64> = m.0.singular_values().iter().map(|s| s.max(0.0)).collect();
    values.sort_by(|a, b| b.total_cmp(a));
    values
}

/// Transpose on the second party: `(|i⟩⟨j| ⊗ |k⟩⟨l|)^Γ = |i⟩⟨j| ⊗ |l⟩⟨k|`.
pub fn partial_transpose(rho: &DensityMatrix) -> ComplexMatrix {
    partial_transpose_raw(&rho.matrix, rho.dims)
}

pub(crate) fn partial_transpose_raw(m: &ComplexMatrix, (d1, d2): (usize, usize)) -> ComplexMatrix {
    let mut out = DMatrix::zeros(d1 * d2, d1 * d2);
    for i in 0..d1 {
        for j in 0..d1 {
            for k in 0..d2 {
                for l in 0..d2 {
                    out[(i * d2 + l, j * d2 + k)] = m.0[(i * d2 + k, j * d2 + l)];
                }
            }
        }
    }
    ComplexMatrix(out)
}

/// Realignment: `(|i⟩⟨j| ⊗ |k⟩⟨l|)_R = |i⟩⟨k| ⊗ |j⟩⟨l|`.
///
/// The output is `d1² × d2²`, rows indexed by `(i, j)` and columns by `(k, l)`.
pub fn realign(rho: &DensityMatrix) -> ComplexMatrix {
    realign_raw(&rho.matrix, rho.dims)
}

pub(crate) fn realign_raw(m: &ComplexMatrix, (d1, d2): (usize, usize)) -> ComplexMatrix {
    let mut out = DMatrix::zeros(d1 * d1, d2 * d2);
    for i in 0..d1 {
        for j in 0..d1 {
            for k in 0..d2 {
                for l in 0..d2 {
                    out[(i * d1 + j, k * d2 + l)] = m.0[(i * d2 + k, j * d2 + l)];
                }
            }
        }
    }
    ComplexMatrix(out)
}

fn check_bipartite(m: &ComplexMatrix, (d1, d2): (usize, usize)) -> Result<()> {
    let n = d1 * d2;
    if m.rows() != n || m.cols() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            found: m.rows().max(m.cols()),
        });
    }
    Ok(())
}

/// [`partial_transpose`] on an arbitrary `d1·d2`-square operator.
pub fn partial_transpose_matrix(m: &ComplexMatrix, dims: (usize, usize)) -> Result<ComplexMatrix> {
    check_bipartite(m, dims)?;
    Ok(partial_transpose_raw(m, dims))
}

/// [`realign`] on an arbitrary `d1·d2`-square operator.
pub fn realign_matrix(m: &ComplexMatrix, dims: (usize, usize)) -> Result<ComplexMatrix> {
    check_bipartite(m, dims)?;
    Ok(realign_raw(m, dims))
}

/// Reduced state of the party named by `keep`.
pub fn partial_trace(rho: &DensityMatrix, keep: Subsystem) -> ComplexMatrix {
    let (d1, d2) = rho.dims;
    let m = &rho.matrix.0;
    match keep {
        Subsystem::First => ComplexMatrix::from_fn(d1, d1, |i, j| (0..d2).map(|k| m[(i * d2 + k, j * d2 + k)]).sum()),
        Subsystem::Second => ComplexMatrix::from_fn(d2, d2, |k, l| (0..d1).map(|i| m[(i * d2 + k, i * d2 + l)]).sum()),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64) -> Complex64 {
        Complex64::new(re, 0.0)
    }

    fn omega00(d: usize) -> StateVector {
        let mut v = StateVector::zeros(d * d);
        for i in 0..d {
            v.amplitudes_mut()[i * d + i] = c(1.0 / (d as f64).sqrt());
        }
        v
    }

    #[test]
    fn kron_identities_and_diag() {
        let i2 = ComplexMatrix::identity(2);
        assert_eq!(kron(&i2, &i2), ComplexMatrix::identity(4));
        let z = ComplexMatrix::diag_real(&[1.0, -1.0]);
        assert_eq!(kron(&z, &i2), ComplexMatrix::diag_real(&[1.0, 1.0, -1.0, -1.0]));
    }

    #[test]
    fn kron_of_shift_with_its_conjugate_is_a_permutation() {
        // d = 2: W_{0,1} = |0⟩⟨1| + |1⟩⟨0| is real, so W ⊗ W* = X ⊗ X which
        // maps |ab⟩ to |(1-a)(1-b)⟩.
        let x = ComplexMatrix::from_row_major(2, 2, &[ZERO, ONE, ONE, ZERO]).unwrap();
        let t = kron(&x, &x.conj());
        let expected = ComplexMatrix::from_fn(4, 4, |r, col| if r + col == 3 { ONE } else { ZERO });
        assert_eq!(t, expected);
        assert!(t.unitarity_defect() < 1e-15);
    }

    #[test]
    fn spectrum_of_diagonal() {
        let s = hermitian_spectrum(&ComplexMatrix::diag_real(&[3.0, 1.0, 2.0])).unwrap();
        assert_eq!(s.values.len(), 3);
        for (got, want) in s.values.iter().zip([1.0, 2.0, 3.0]) {
            assert!((got - want).abs() < 1e-14);
        }
    }

    #[test]
    fn spectrum_rejects_non_hermitian() {
        let m = ComplexMatrix::from_row_major(2, 2, &[ONE, ONE, ZERO, ONE]).unwrap();
        match hermitian_spectrum(&m) {
            Err(Error::NotHermitian { defect }) => assert!((defect - 1.0).abs() < 1e-15),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn singular_values_trivial_cases() {
        let s = singular_values(&ComplexMatrix::identity(3));
        assert!(s.iter().all(|v| (v - 1.0).abs() < 1e-14));
        let z = singular_values(&ComplexMatrix::zeros(3, 3));
        assert!(z.iter().all(|v| v.abs() < 1e-14));
    }

    #[test]
    fn partial_transpose_of_bell_projector_is_swap_over_d() {
        for d in [2usize, 3] {
            let rho = DensityMatrix::pure(&omega00(d), (d, d)).unwrap();
            let pt = partial_transpose(&rho);
            let swap = ComplexMatrix::from_fn(d * d, d * d, |r, col| {
                let (i, k) = (r / d, r % d);
                if col == k * d + i {
                    c(1.0 / d as f64)
                } else {
                    ZERO
                }
            });
            assert!(pt.distance(&swap) < 1e-14);
            let eig = hermitian_eigenvalues(&pt).unwrap();
            assert!((eig[0] + 1.0 / d as f64).abs() < 1e-12);
        }
        let rho = DensityMatrix::pure(&omega00(2), (2, 2)).unwrap();
        let eig = hermitian_eigenvalues(&partial_transpose(&rho)).unwrap();
        for (got, want) in eig.iter().zip([-0.5, 0.5, 0.5, 0.5]) {
            assert!((got - want).abs() < 1e-12);
        }
    }

    #[test]
    fn partial_transpose_of_product_transposes_second_factor() {
        let a = ComplexMatrix::from_row_major(
            2,
            2,
            &[c(0.7), Complex64::new(0.1, 0.2), Complex64::new(0.1, -0.2), c(0.3)],
        )
        .unwrap();
        let b = ComplexMatrix::from_row_major(
            2,
            2,
            &[c(0.4), Complex64::new(0.0, 0.3), Complex64::new(0.0, -0.3), c(0.6)],
        )
        .unwrap();
        let rho = DensityMatrix::product(&a, &b).unwrap();
        let pt = partial_transpose(&rho);
        assert!(pt.distance(&kron(&a, &b.transpose())) < 1e-15);
        assert!(hermitian_eigenvalues(&pt).unwrap()[0] > -1e-12);
    }

    #[test]
    fn realignment_of_identity_and_bell_projector() {
        let mixed = DensityMatrix::maximally_mixed(3, 3);
        let s = singular_values(&realign(&mixed));
        assert!((s[0] - 1.0 / 3.0).abs() < 1e-14);
        assert!(s[1..].iter().all(|v| v.abs() < 1e-14));

        let bell = DensityMatrix::pure(&omega00(3), (3, 3)).unwrap();
        let sum: f64 = singular_values(&realign(&bell)).iter().sum();
        assert!((sum - 3.0).abs() < 1e-12);
    }

    #[test]
    fn partial_trace_of_product_and_bell() {
        let a = ComplexMatrix::diag_real(&[0.25, 0.75]);
        let b = ComplexMatrix::diag_real(&[0.5, 0.2, 0.3]);
        let rho = DensityMatrix::product(&a, &b).unwrap();
        assert!(partial_trace(&rho, Subsystem::First).distance(&a) < 1e-15);
        assert!(partial_trace(&rho, Subsystem::Second).distance(&b) < 1e-15);

        let bell = DensityMatrix::pure(&omega00(3), (3, 3)).unwrap();
        let id3 = ComplexMatrix::identity(3).scale_real(1.0 / 3.0);
        for keep in [Subsystem::First, Subsystem::Second] {
            assert!(partial_trace(&bell, keep).distance(&id3) < 1e-15);
        }
    }

    #[test]
    fn invalid_subsystem_id() {
        assert_eq!(Subsystem::try_from(3), Err(Error::InvalidSubsystem(3)));
        assert_eq!(Subsystem::try_from(2), Ok(Subsystem::Second));
    }

    #[test]
    fn density_matrix_validation() {
        let bad_trace = ComplexMatrix::identity(4);
        assert!(matches!(
            DensityMatrix::new(bad_trace, (2, 2)),
            Err(Error::NotDensityMatrix(_))
        ));
        let negative = ComplexMatrix::diag_real(&[1.5, -0.5, 0.0, 0.0]);
        assert!(matches!(
            DensityMatrix::new(negative, (2, 2)),
            Err(Error::NotDensityMatrix(_))
        ));
        assert!(matches!(
            DensityMatrix::new(ComplexMatrix::identity(3), (2, 2)),
            Err(Error::DimensionMismatch { .. })
        ));
    }
}
