//! Entanglement criteria for bipartite qudit states.
//!
//! * PPT: negative eigenvalue of the partial transpose ⇒ entangled.
//! * E2 (realignment): trace norm of the realigned matrix above one ⇒ entangled.
//! * E3 (quasipure concurrence): `C_qp = max(0, S₀ − Σ_{i>0} S_i)` where `S`
//!   are the singular values of `T_{ij} = √(μ_i μ_j) ⟨Ψ_i|⊗⟨Ψ_j|ξ⟩`,
//!   `ξ = A|Ψ₀⟩⊗|Ψ₀⟩ / ‖A|Ψ₀⟩⊗|Ψ₀⟩‖` and `A` the two-copy concurrence operator.
//!
//! `ξ` is normalized to a unit vector. With that choice the generic pipeline
//! reproduces the explicit singular values `S_{k,l}` known for the standard
//! Bell-diagonal simplex (see `closed_form_matches_generic_pipeline`).

use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::qmat::{
    hermitian_eigenvalues, hermitian_spectrum, partial_transpose_raw, realign_raw, singular_values, ComplexMatrix,
    DensityMatrix, NEGATIVE_EIG_TOL,
};
use crate::states::{assemble_unchecked, check_basis, dominant_flat, BellDiagonalState};
use crate::weyl::{BellBasis, Dimension};

/// Realignment fires when the singular-value sum exceeds `1 + E2_TOL`.
pub const E2_TOL: f64 = 1e-9;
/// Quasipure concurrence fires when `C_qp > E3_TOL`.
pub const E3_TOL: f64 = 1e-9;

/// Outcome of the PPT test.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PptOutcome {
    pub ppt: bool,
    pub min_eigenvalue: f64,
}

/// Outcome of a criterion that fires on a scalar exceeding a threshold.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Detection {
    pub detects: bool,
    pub value: f64,
}

/// Per-state classification.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ClassificationRecord {
    pub ppt: bool,
    #[serde(rename = "e2")]
    pub e2_detects: bool,
    #[serde(rename = "e3")]
    pub e3_detects: bool,
    #[serde(rename = "min_pt_eig")]
    pub min_pt_eigenvalue: f64,
    #[serde(rename = "realign_sum")]
    pub realignment_sum: f64,
    pub c_qp: f64,
}

pub fn is_ppt(rho: &DensityMatrix) -> PptOutcome {
    ppt_raw(rho.matrix(), rho.dims())
}

fn ppt_raw(m: &ComplexMatrix, dims: (usize, usize)) -> PptOutcome {
    let pt = partial_transpose_raw(m, dims);
    let min_eigenvalue = hermitian_eigenvalues(&pt).expect("partial transpose of a Hermitian matrix is Hermitian")[0];
    PptOutcome {
        ppt: min_eigenvalue >= -NEGATIVE_EIG_TOL,
        min_eigenvalue,
    }
}

pub fn e2_realignment(rho: &DensityMatrix) -> Detection {
    e2_raw(rho.matrix(), rho.dims())
}

fn e2_raw(m: &ComplexMatrix, dims: (usize, usize)) -> Detection {
    let sum: f64 = singular_values(&realign_raw(m, dims)).iter().sum();
    Detection {
        detects: sum > 1.0 + E2_TOL,
        value: sum,
    }
}

/// The operator `A = 4 Σ_{i<j,k<l} |v⟩⟨v|`, `v = |ikjl⟩ − |jkil⟩ − |iljk⟩ + |jlik⟩`,
/// on two copies of `H_d ⊗ H_d` ordered `(A₁, B₁, A₂, B₂)`.
///
/// It acts entrywise as `(Az)_{ikjl} = 4(z_{ikjl} − z_{jkil} − z_{iljk} + z_{jlik})`;
/// the swap tables for that formula are built once per dimension.
#[derive(Clone, Debug)]
pub struct ConcurrenceOperator {
    d: usize,
    swap_a: Vec<usize>,
    swap_b: Vec<usize>,
    swap_ab: Vec<usize>,
}

impl ConcurrenceOperator {
    pub fn new(d: Dimension) -> Self {
        let n = d.get();
        let flat = |i: usize, k: usize, j: usize, l: usize| ((i * n + k) * n + j) * n + l;
        let size = n.pow(4);
        let mut swap_a = vec![0; size];
        let mut swap_b = vec![0; size];
        let mut swap_ab = vec![0; size];
        for i in 0..n {
            for k in 0..n {
                for j in 0..n {
                    for l in 0..n {
                        let at = flat(i, k, j, l);
                        swap_a[at] = flat(j, k, i, l);
                        swap_b[at] = flat(i, l, j, k);
                        swap_ab[at] = flat(j, l, i, k);
                    }
                }
            }
        }
        Self {
            d: n,
            swap_a,
            swap_b,
            swap_ab,
        }
    }

    pub fn dim(&self) -> usize {
        self.d
    }

    pub fn apply(&self, z: &[Complex64]) -> Vec<Complex64> {
        (0..z.len())
            .map(|at| (z[at] - z[self.swap_a[at]] - z[self.swap_b[at]] + z[self.swap_ab[at]]) * 4.0)
            .collect()
    }

    /// Dense `d⁴ × d⁴` matrix built literally from the defining sum.
    pub fn to_matrix(&self) -> ComplexMatrix {
        let n = self.d;
        let size = n.pow(4);
        let flat = |i: usize, k: usize, j: usize, l: usize| ((i * n + k) * n + j) * n + l;
        let mut m = DMatrix::<Complex64>::zeros(size, size);
        for i in 0..n {
            for j in i + 1..n {
                for k in 0..n {
                    for l in k + 1..n {
                        let v = [
                            (flat(i, k, j, l), 1.0),
                            (flat(j, k, i, l), -1.0),
                            (flat(i, l, j, k), -1.0),
                            (flat(j, l, i, k), 1.0),
                        ];
                        for &(r, sr) in &v {
                            for &(c, sc) in &v {
                                m[(r, c)] += Complex64::new(4.0 * sr * sc, 0.0);
                            }
                        }
                    }
                }
            }
        }
        ComplexMatrix::from_nalgebra(m)
    }

    /// `ξ = A|ψ⟩⊗|ψ⟩` normalized, as a `d² × d²` matrix whose row indexes the
    /// first copy and column the second. `None` when `A|ψψ⟩ = 0` (product `ψ`).
    fn xi(&self, psi: &[Complex64]) -> Option<DMatrix<Complex64>> {
        let n2 = self.d * self.d;
        let mut doubled = Vec::with_capacity(n2 * n2);
        for a in psi {
            for b in psi {
                doubled.push(a * b);
            }
        }
        let xi = self.apply(&doubled);
        let norm = xi.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        if norm < 1e-300 {
            return None;
        }
        Some(DMatrix::from_row_iterator(n2, n2, xi.into_iter().map(|z| z / norm)))
    }

    /// `C_qp` from an eigen-decomposition given as weights `mu` and the
    /// matching orthonormal eigenvectors (columns of `vectors`), with the
    /// dominant vector at column `dominant`.
    fn quasipure(&self, mu: &[f64], vectors: &DMatrix<Complex64>, dominant: usize) -> f64 {
        let psi0: Vec<Complex64> = vectors.column(dominant).iter().copied().collect();
        let Some(xi) = self.xi(&psi0) else {
            return 0.0;
        };
        // ⟨Ψ_a ⊗ Ψ_b|ξ⟩ = (U† Ξ U*)_{ab}
        let overlaps = vectors.adjoint() * xi * vectors.map(|z| z.conj());
        let roots: Vec<f64> = mu.iter().map(|m| m.max(0.0).sqrt()).collect();
        let t = DMatrix::from_fn(mu.len(), mu.len(), |a, b| overlaps[(a, b)] * (roots[a] * roots[b]));
        let s = singular_values(&ComplexMatrix::from_nalgebra(t));
        let rest: f64 = s[1..].iter().sum();
        (s[0] - rest).max(0.0)
    }
}

fn detection_from_cqp(c_qp: f64) -> Detection {
    Detection {
        detects: c_qp > E3_TOL,
        value: c_qp,
    }
}

/// Quasipure concurrence from a numerical eigen-decomposition of `ρ`.
///
/// The dominant eigenvector is the one the eigensolver returns for the
/// largest eigenvalue; within an exactly degenerate top eigenspace the
/// choice is solver-dependent.
pub fn e3_quasipure_generic(rho: &DensityMatrix) -> Result<Detection> {
    let (d1, d2) = rho.dims();
    if d1 != d2 {
        return Err(Error::InvalidInput(format!(
            "quasipure concurrence needs equal local dimensions, got {d1}x{d2}"
        )));
    }
    let op = ConcurrenceOperator::new(Dimension::new(d1)?);
    let spec = hermitian_spectrum(rho.matrix())?;
    let n = spec.values.len();
    // Descending order so the dominant vector sits in column 0.
    let mu: Vec<f64> = spec.values.iter().rev().copied().collect();
    let vectors = DMatrix::from_fn(n, n, |r, c| spec.vectors[n - 1 - c].amplitudes()[r]);
    Ok(detection_from_cqp(op.quasipure(&mu, &vectors, 0)))
}

/// Generic quasipure pipeline for a Bell-diagonal state, with the spectral
/// decomposition taken analytically: eigenvalues `c`, eigenvectors the basis
/// states, dominant vector the lexicographically first maximizer of `c`.
pub fn e3_quasipure_bell_diagonal(s: &BellDiagonalState, basis: &BellBasis) -> Result<Detection> {
    check_basis(s, basis)?;
    let op = ConcurrenceOperator::new(basis.dim());
    Ok(e3_bell_diagonal_with(&op, s.coefficients(), basis))
}

fn e3_bell_diagonal_with(op: &ConcurrenceOperator, c: &[f64], basis: &BellBasis) -> Detection {
    let dominant = dominant_flat(c);
    detection_from_cqp(op.quasipure(c, basis.change_of_basis(), dominant))
}

/// Explicit singular values for the standard simplex:
/// `S_{k,l} = √( d/(2(d−1)) · c_{k,l} · [ (1−2/d) c_{n,m} δ_{kn}δ_{lm} + c_{2n−k, 2m−l}/d² ] )`
/// with `(n, m)` the dominant index.
pub fn e3_quasipure_closed(s: &BellDiagonalState) -> Result<Detection> {
    if s.basis_id() != &crate::weyl::BasisId::standard() {
        return Err(Error::NonStandardBasis);
    }
    Ok(detection_from_cqp(closed_form_cqp(s.dim(), s.coefficients())))
}

pub(crate) fn closed_form_cqp(d: Dimension, c: &[f64]) -> f64 {
    let n = d.get();
    let df = n as f64;
    let dom = dominant_flat(c);
    let (dn, dm) = (dom / n, dom % n);
    let prefactor = df / (2.0 * (df - 1.0));
    let mut lead = 0.0;
    let mut rest = 0.0;
    for k in 0..n {
        for l in 0..n {
            let flat = k * n + l;
            let pk = (2 * dn + n - k) % n;
            let pl = (2 * dm + n - l) % n;
            let mut bracket = c[pk * n + pl] / (df * df);
            if flat == dom {
                bracket += (1.0 - 2.0 / df) * c[dom];
            }
            let s = (prefactor * c[flat] * bracket).max(0.0).sqrt();
            if flat == dom {
                lead = s;
            } else {
                rest += s;
            }
        }
    }
    (lead - rest).max(0.0)
}

/// Runs all three criteria on Bell-diagonal states of one basis. Holds the
/// concurrence operator so repeated calls do not rebuild it.
#[derive(Clone, Debug)]
pub struct Classifier<'a> {
    basis: &'a BellBasis,
    op: ConcurrenceOperator,
}

impl<'a> Classifier<'a> {
    pub fn new(basis: &'a BellBasis) -> Self {
        Self {
            basis,
            op: ConcurrenceOperator::new(basis.dim()),
        }
    }

    pub fn basis(&self) -> &BellBasis {
        self.basis
    }

    pub fn classify(&self, s: &BellDiagonalState) -> Result<ClassificationRecord> {
        check_basis(s, self.basis)?;
        Ok(self.classify_coefficients(s.coefficients()))
    }

    /// Skips the basis-tag check; `c` must be a probability vector for this basis.
    pub fn classify_coefficients(&self, c: &[f64]) -> ClassificationRecord {
        let rho = assemble_unchecked(c, self.basis);
        let ppt = ppt_raw(rho.matrix(), rho.dims());
        let e2 = e2_raw(rho.matrix(), rho.dims());
        let e3 = if self.basis.is_standard() {
            detection_from_cqp(closed_form_cqp(self.basis.dim(), c))
        } else {
            e3_bell_diagonal_with(&self.op, c, self.basis)
        };
        ClassificationRecord {
            ppt: ppt.ppt,
            e2_detects: e2.detects,
            e3_detects: e3.detects,
            min_pt_eigenvalue: ppt.min_eigenvalue,
            realignment_sum: e2.value,
            c_qp: e3.value,
        }
    }
}

pub fn classify(s: &BellDiagonalState, basis: &BellBasis) -> Result<ClassificationRecord> {
    Classifier::new(basis).classify(s)
}

/// Classification of an arbitrary bipartite density matrix (generic E3).
pub fn classify_density(rho: &DensityMatrix) -> Result<ClassificationRecord> {
    let ppt = is_ppt(rho);
    let e2 = e2_realignment(rho);
    let e3 = e3_quasipure_generic(rho)?;
    Ok(ClassificationRecord {
        ppt: ppt.ppt,
        e2_detects: e2.detects,
        e3_detects: e3.detects,
        min_pt_eigenvalue: ppt.min_eigenvalue,
        realignment_sum: e2.value,
        c_qp: e3.value,
    })
}
