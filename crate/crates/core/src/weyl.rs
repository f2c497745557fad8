//! Weyl–Heisenberg operators, Weyl-Twirl operators and (generalized) Bell bases.
//!
//! `W_{k,l} = Σ_j w^{jk} |j⟩⟨j+l|` with `w = exp(2πi/d)`; the standard Bell
//! basis is `|Ω_{k,l}⟩ = (W_{k,l} ⊗ 𝟙)|Ω_{0,0}⟩`. A unimodular phase matrix
//! `α` generalizes both to `V^α_{k,l} = Σ_j w^{jk} α_{j+l,l} |j⟩⟨j+l|` and
//! `|Φ^α_{k,l}⟩ = (V^α_{k,l} ⊗ 𝟙)|Ω_{0,0}⟩`.

use std::f64::consts::TAU;
use std::fmt;

use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::qmat::{kron, ComplexMatrix, DensityMatrix, StateVector, ONE, ZERO};

const UNIMODULAR_TOL: f64 = 1e-12;

/// Local dimension `d ≥ 2` of each qudit.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(try_from = "usize", into = "usize")]
pub struct Dimension(usize);

impl Dimension {
    pub fn new(d: usize) -> Result<Self> {
        if d < 2 {
            return Err(Error::InvalidDimension(d));
        }
        Ok(Self(d))
    }

    pub fn get(self) -> usize {
        self.0
    }

    /// `d²`, the number of Bell states.
    pub fn squared(self) -> usize {
        self.0 * self.0
    }

    /// `w^n` with `w = exp(2πi/d)`; `n` is reduced mod `d` first.
    pub fn root_pow(self, n: i64) -> Complex64 {
        let r = n.rem_euclid(self.0 as i64);
        if r == 0 {
            return ONE;
        }
        Complex64::from_polar(1.0, TAU * r as f64 / self.0 as f64)
    }

    /// Iterates over all `d²` indices in lexicographic `(k, l)` order.
    pub fn indices(self) -> impl Iterator<Item = BellIndex> {
        let d = self.0;
        (0..d * d).map(move |flat| BellIndex {
            k: flat / d,
            l: flat % d,
        })
    }
}

impl TryFrom<usize> for Dimension {
    type Error = Error;
    fn try_from(d: usize) -> Result<Self> {
        Self::new(d)
    }
}

impl From<Dimension> for usize {
    fn from(d: Dimension) -> usize {
        d.0
    }
}

impl fmt::Display for Dimension {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.0.fmt(f)
    }
}

/// Pair `(k, l)` of phase and shift indices, each in `[0, d)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct BellIndex {
    pub k: usize,
    pub l: usize,
}

impl BellIndex {
    /// Reduces both components mod `d`.
    pub fn new(d: Dimension, k: i64, l: i64) -> Self {
        let m = d.get() as i64;
        Self {
            k: k.rem_euclid(m) as usize,
            l: l.rem_euclid(m) as usize,
        }
    }

    pub fn origin() -> Self {
        Self { k: 0, l: 0 }
    }

    pub fn flat(self, d: Dimension) -> usize {
        self.k * d.get() + self.l
    }

    pub fn from_flat(d: Dimension, flat: usize) -> Self {
        Self {
            k: flat / d.get(),
            l: flat % d.get(),
        }
    }

    pub fn add(self, other: Self, d: Dimension) -> Self {
        Self::new(d, (self.k + other.k) as i64, (self.l + other.l) as i64)
    }

    pub fn neg(self, d: Dimension) -> Self {
        Self::new(d, -(self.k as i64), -(self.l as i64))
    }
}

impl fmt::Display for BellIndex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({},{})", self.k, self.l)
    }
}

/// Unimodular `d × d` matrix `α_{s,t}` defining a generalized Bell basis.
#[derive(Clone, Debug, PartialEq)]
pub struct PhaseMatrix {
    d: Dimension,
    // row-major, alpha[s * d + t]
    alpha: Vec<Complex64>,
}

/// JSON form `{"d": 3, "phases": [[angle, ...], ...]}`, `α_{s,t} = exp(i·angle)`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PhaseMatrixFile {
    pub d: usize,
    pub phases: Vec<Vec<f64>>,
}

impl PhaseMatrix {
    /// All-ones matrix; reproduces the standard construction.
    pub fn ones(d: Dimension) -> Self {
        Self {
            d,
            alpha: vec![ONE; d.squared()],
        }
    }

    /// `α_{s,t} = exp(i·angles[s][t])`.
    pub fn from_angles(d: Dimension, angles: &[Vec<f64>]) -> Result<Self> {
        let n = d.get();
        if angles.len() != n || angles.iter().any(|row| row.len() != n) {
            return Err(Error::InvalidInput(format!("phase matrix must be {n}x{n}")));
        }
        if angles.iter().flatten().any(|a| !a.is_finite()) {
            return Err(Error::InvalidInput("non-finite phase angle".into()));
        }
        let alpha = angles
            .iter()
            .flatten()
            .map(|&a| Complex64::from_polar(1.0, a))
            .collect();
        Ok(Self { d, alpha })
    }

    /// Row-major complex entries; rejects entries off the unit circle.
    pub fn from_entries(d: Dimension, entries: Vec<Complex64>) -> Result<Self> {
        let n = d.get();
        if entries.len() != n * n {
            return Err(Error::DimensionMismatch {
                expected: n * n,
                found: entries.len(),
            });
        }
        for (flat, z) in entries.iter().enumerate() {
            let modulus = z.norm();
            if modulus.is_nan() || (modulus - 1.0).abs() > UNIMODULAR_TOL {
                return Err(Error::NotUnimodular {
                    s: flat / n,
                    t: flat % n,
                    modulus,
                });
            }
        }
        Ok(Self { d, alpha: entries })
    }

    pub fn from_file(file: &PhaseMatrixFile) -> Result<Self> {
        Self::from_angles(Dimension::new(file.d)?, &file.phases)
    }

    pub fn to_file(&self) -> PhaseMatrixFile {
        let n = self.d.get();
        PhaseMatrixFile {
            d: n,
            phases: (0..n).map(|s| (0..n).map(|t| self.get(s, t).arg()).collect()).collect(),
        }
    }

    pub fn dim(&self) -> Dimension {
        self.d
    }

    /// `α_{s,t}` with both indices taken mod `d`.
    pub fn get(&self, s: usize, t: usize) -> Complex64 {
        let n = self.d.get();
        self.alpha[(s % n) * n + (t % n)]
    }

    pub fn entries(&self) -> &[Complex64] {
        &self.alpha
    }

    pub fn is_all_ones(&self) -> bool {
        self.alpha.iter().all(|z| (z - ONE).norm() <= UNIMODULAR_TOL)
    }

    /// FNV-1a over the entry bit patterns; used to tag states with their basis.
    fn fingerprint(&self) -> u64 {
        let mut h: u64 = 0xcbf2_9ce4_8422_2325;
        for z in &self.alpha {
            for bits in [z.re.to_bits(), z.im.to_bits()] {
                for byte in bits.to_le_bytes() {
                    h ^= byte as u64;
                    h = h.wrapping_mul(0x0000_0100_0000_01b3);
                }
            }
        }
        h
    }
}

/// Which construction produced a [`BellBasis`].
#[derive(Clone, Debug, PartialEq)]
pub enum BasisKind {
    Standard,
    Generalized(PhaseMatrix),
}

/// Identifier tying a Bell-diagonal state to the basis it was defined in.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct BasisId(String);

impl BasisId {
    pub fn standard() -> Self {
        Self("standard".into())
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }
}

impl fmt::Display for BasisId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

/// The `d²` Bell states of a basis, their projectors and the local unitaries
/// that generate them from `|Ω_{0,0}⟩`.
///
/// Everything is materialized once at construction. Index `(k, l)` lives at
/// flat position `k * d + l`.
#[derive(Clone, Debug)]
pub struct BellBasis {
    d: Dimension,
    kind: BasisKind,
    id: BasisId,
    ops: Vec<ComplexMatrix>,
    states: Vec<StateVector>,
    projectors: Vec<DensityMatrix>,
    // Columns are the basis states.
    unitary: DMatrix<Complex64>,
}

impl BellBasis {
    pub fn standard(d: Dimension) -> Self {
        let ops = d.indices().map(|idx| weyl_op(d, idx)).collect();
        Self::from_ops(d, BasisKind::Standard, BasisId::standard(), ops)
    }

    fn from_ops(d: Dimension, kind: BasisKind, id: BasisId, ops: Vec<ComplexMatrix>) -> Self {
        let seed = omega00(d);
        let id_d = ComplexMatrix::identity(d.get());
        let states: Vec<StateVector> = ops.iter().map(|v| kron(v, &id_d).apply(&seed)).collect();
        let n = d.get();
        let projectors = states
            .iter()
            .map(|s| DensityMatrix::from_trusted(s.projector(), (n, n)).expect("rank-one projector is Hermitian"))
            .collect();
        let unitary = DMatrix::from_fn(n * n, n * n, |r, c| states[c].amplitudes()[r]);
        Self {
            d,
            kind,
            id,
            ops,
            states,
            projectors,
            unitary,
        }
    }

    pub fn dim(&self) -> Dimension {
        self.d
    }

    pub fn kind(&self) -> &BasisKind {
        &self.kind
    }

    pub fn id(&self) -> &BasisId {
        &self.id
    }

    pub fn is_standard(&self) -> bool {
        matches!(self.kind, BasisKind::Standard)
    }

    pub fn state(&self, idx: BellIndex) -> &StateVector {
        &self.states[idx.flat(self.d)]
    }

    pub fn states(&self) -> &[StateVector] {
        &self.states
    }

    pub fn projector(&self, idx: BellIndex) -> &DensityMatrix {
        &self.projectors[idx.flat(self.d)]
    }

    pub fn projectors(&self) -> &[DensityMatrix] {
        &self.projectors
    }

    /// `W_{k,l}` or `V^α_{k,l}`.
    pub fn local_op(&self, idx: BellIndex) -> &ComplexMatrix {
        &self.ops[idx.flat(self.d)]
    }

    /// `V_{i,j} ⊗ V*_{i,j}` for this basis (`T_{i,j}` in the standard case).
    pub fn twirl_op(&self, idx: BellIndex) -> ComplexMatrix {
        let v = self.local_op(idx);
        kron(v, &v.conj())
    }

    /// `d² × d²` unitary whose columns are the basis states.
    pub fn change_of_basis(&self) -> &DMatrix<Complex64> {
        &self.unitary
    }
}

/// `|Ω_{0,0}⟩ = (1/√d) Σ_i |ii⟩`
pub fn omega00(d: Dimension) -> StateVector {
    let n = d.get();
    let amp = Complex64::new(1.0 / (n as f64).sqrt(), 0.0);
    let mut v = StateVector::zeros(n * n);
    for i in 0..n {
        v.amplitudes_mut()[i * n + i] = amp;
    }
    v
}

/// `W_{k,l} = Σ_j w^{jk} |j⟩⟨j+l|`
pub fn weyl_op(d: Dimension, idx: BellIndex) -> ComplexMatrix {
    let n = d.get();
    let mut m = ComplexMatrix::zeros(n, n);
    for j in 0..n {
        m.set(j, (j + idx.l) % n, d.root_pow((j * idx.k) as i64));
    }
    m
}

/// `|Ω_{k,l}⟩ = (W_{k,l} ⊗ 𝟙)|Ω_{0,0}⟩ = (1/√d) Σ_j w^{jk} |j⟩|j+l⟩`
pub fn bell_state(d: Dimension, idx: BellIndex) -> StateVector {
    let n = d.get();
    let amp = 1.0 / (n as f64).sqrt();
    let mut v = StateVector::zeros(n * n);
    for j in 0..n {
        v.amplitudes_mut()[j * n + (j + idx.l) % n] = d.root_pow((j * idx.k) as i64) * amp;
    }
    v
}

/// `T_{i,j} = W_{i,j} ⊗ W*_{i,j}`
pub fn twirl_op(d: Dimension, idx: BellIndex) -> ComplexMatrix {
    let w = weyl_op(d, idx);
    kron(&w, &w.conj())
}

/// `V^α_{k,l} = Σ_j w^{jk} α_{j+l,l} |j⟩⟨j+l|`
pub fn gen_weyl_op(alpha: &PhaseMatrix, idx: BellIndex) -> ComplexMatrix {
    let d = alpha.dim();
    let n = d.get();
    let mut m = ComplexMatrix::zeros(n, n);
    for j in 0..n {
        let col = (j + idx.l) % n;
        m.set(j, col, d.root_pow((j * idx.k) as i64) * alpha.get(col, idx.l));
    }
    m
}

/// Generalized Bell basis `{|Φ^α_{k,l}⟩}`.
///
/// An all-ones `α` yields the standard basis (and is tagged as such).
/// Unimodularity is enforced when the [`PhaseMatrix`] is built; this
/// re-checks it so hand-assembled matrices cannot slip through.
pub fn gen_bell_basis(alpha: &PhaseMatrix) -> Result<BellBasis> {
    let d = alpha.dim();
    let n = d.get();
    for (flat, z) in alpha.entries().iter().enumerate() {
        let modulus = z.norm();
        if modulus.is_nan() || (modulus - 1.0).abs() > UNIMODULAR_TOL {
            return Err(Error::NotUnimodular {
                s: flat / n,
                t: flat % n,
                modulus,
            });
        }
    }
    if alpha.is_all_ones() {
        return Ok(BellBasis::standard(d));
    }
    let ops = d.indices().map(|idx| gen_weyl_op(alpha, idx)).collect();
    let id = BasisId(format!("alpha-{:016x}", alpha.fingerprint()));
    Ok(BellBasis::from_ops(d, BasisKind::Generalized(alpha.clone()), id, ops))
}

/// `max |⟨Φ_{m,n}|Φ_{k,l}⟩ − δ_{mk}δ_{nl}|` over all pairs.
pub fn basis_gram_defect(basis: &BellBasis) -> f64 {
    let states = basis.states();
    let mut worst = 0.0f64;
    for (a, sa) in states.iter().enumerate() {
        for (b, sb) in states.iter().enumerate() {
            let target = if a == b { ONE } else { ZERO };
            worst = worst.max((sa.inner(sb) - target).norm());
        }
    }
    worst
}

/// `1 − |⟨a|b⟩| / (‖a‖‖b‖)` on vectorized operators; zero iff `a ∝ b`.
pub fn proportionality_defect(a: &ComplexMatrix, b: &ComplexMatrix) -> f64 {
    let inner: Complex64 = a
        .as_nalgebra()
        .iter()
        .zip(b.as_nalgebra().iter())
        .map(|(x, y)| x.conj() * y)
        .sum();
    let na = a.frobenius_norm();
    let nb = b.frobenius_norm();
    if na == 0.0 || nb == 0.0 {
        return 1.0;
    }
    (1.0 - inner.norm() / (na * nb)).max(0.0)
}

/// Largest [`proportionality_defect`] between `V_{k₁,l₁}V_{k₂,l₂}` and
/// `V_{k₁+k₂,l₁+l₂}` over all index pairs. Zero for the standard basis, where
/// the Weyl relations make the product a phase multiple.
pub fn group_closure_defect(basis: &BellBasis) -> f64 {
    let d = basis.dim();
    let mut worst = 0.0f64;
    for a in d.indices() {
        for b in d.indices() {
            let prod = basis.local_op(a) * basis.local_op(b);
            let target = basis.local_op(a.add(b, d));
            worst = worst.max(proportionality_defect(&prod, target));
        }
    }
    worst
}

/// Largest norm of the component of `(V_{i,j} ⊗ V*_{i,j})|Φ_{k,l}⟩`
/// orthogonal to `|Φ_{k,l}⟩`, over all `(i,j,k,l)`. Zero when every basis
/// state is an eigenvector of every twirl operator.
pub fn stabilizer_defect(basis: &BellBasis) -> f64 {
    let d = basis.dim();
    let mut worst = 0.0f64;
    for ij in d.indices() {
        let t = basis.twirl_op(ij);
        for kl in d.indices() {
            let phi = basis.state(kl);
            let img = t.apply(phi);
            let overlap = phi.inner(&img);
            let residual = img.distance(&phi.scale(overlap));
            worst = worst.max(residual);
        }
    }
    worst
}
