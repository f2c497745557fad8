//! Identification and correction of Bell-state errors through an ancilla.
//!
//! The pair `|Ω_{k,l}⟩` is an eigenvector of every `T_{i,j}` with eigenvalue
//! `w^{jk−il}`. Running `(F† ⊗ 𝟙)·CT_{i,j}·(F ⊗ 𝟙)` on `|0⟩ ⊗ |Ω_{k,l}⟩`
//! writes `Φ = jk − il (mod d)` into the ancilla and leaves the pair alone.
//! Two probes, `(i,j) = (0,1)` then `(1,0)`, give `Φ₁ = k` and `Φ₂ = −l`.

use rand::Rng;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::qmat::{kron, ComplexMatrix, StateVector, ZERO};
use crate::states::BellDiagonalState;
use crate::weyl::{bell_state, twirl_op, weyl_op, BasisId, BellIndex, Dimension};

/// The two probes whose phases decouple into `k` and `−l`.
pub const PROBE_PHASE: BellIndex = BellIndex { k: 0, l: 1 };
pub const PROBE_SHIFT: BellIndex = BellIndex { k: 1, l: 0 };

/// Probabilities `p_{k,l}` that `|Ω_{0,0}⟩` was turned into `|Ω_{k,l}⟩`.
#[derive(Clone, Debug, PartialEq)]
pub struct ErrorDistribution {
    d: Dimension,
    p: Vec<f64>,
}

impl ErrorDistribution {
    pub fn new(d: Dimension, p: Vec<f64>) -> Result<Self> {
        if p.len() != d.squared() {
            return Err(Error::DimensionMismatch {
                expected: d.squared(),
                found: p.len(),
            });
        }
        if p.iter().any(|x| !x.is_finite() || *x < 0.0) {
            return Err(Error::NotProbability("negative or non-finite error probability".into()));
        }
        let total: f64 = p.iter().sum();
        if (total - 1.0).abs() > 1e-12 {
            return Err(Error::NotProbability(format!("error probabilities sum to {total}")));
        }
        Ok(Self { d, p })
    }

    pub fn uniform(d: Dimension) -> Self {
        Self {
            d,
            p: vec![1.0 / d.squared() as f64; d.squared()],
        }
    }

    pub fn point(d: Dimension, idx: BellIndex) -> Self {
        let mut p = vec![0.0; d.squared()];
        p[idx.flat(d)] = 1.0;
        Self { d, p }
    }

    pub fn dim(&self) -> Dimension {
        self.d
    }

    pub fn probabilities(&self) -> &[f64] {
        &self.p
    }

    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> BellIndex {
        let u: f64 = rng.random();
        let mut acc = 0.0;
        for (flat, &q) in self.p.iter().enumerate() {
            acc += q;
            if u < acc {
                return BellIndex::from_flat(self.d, flat);
            }
        }
        // u landed in the round-off gap above the last cumulative sum.
        let last = self.p.iter().rposition(|&q| q > 0.0).unwrap_or(0);
        BellIndex::from_flat(self.d, last)
    }
}

/// `E(P₀₀) = Σ p_{k,l} P_{k,l}` in the standard basis.
pub fn apply_error_channel(p: &ErrorDistribution) -> BellDiagonalState {
    BellDiagonalState::new(p.d, p.p.clone(), BasisId::standard()).expect("validated distribution")
}

/// `F|j⟩ = (1/√d) Σ_k w^{kj} |k⟩`
pub fn fourier_gate(d: Dimension) -> ComplexMatrix {
    let n = d.get();
    let norm = 1.0 / (n as f64).sqrt();
    ComplexMatrix::from_fn(n, n, |k, j| d.root_pow((k * j) as i64) * norm)
}

/// `CT_{i,j}: |m⟩ ⊗ |n⟩ ↦ |m⟩ ⊗ T^m_{i,j}|n⟩`, block diagonal on `d · d²`.
pub fn controlled_twirl(d: Dimension, idx: BellIndex) -> ComplexMatrix {
    let n = d.get();
    let pair = n * n;
    let t = twirl_op(d, idx);
    let mut power = ComplexMatrix::identity(pair);
    let mut out = ComplexMatrix::zeros(n * pair, n * pair);
    for m in 0..n {
        for r in 0..pair {
            for c in 0..pair {
                out.set(m * pair + r, m * pair + c, power.get(r, c));
            }
        }
        power = &power * &t;
    }
    out
}

/// Ancilla qudit ⊗ Bell pair, ancilla first.
#[derive(Clone, Debug, PartialEq)]
pub struct CircuitState {
    d: Dimension,
    vec: StateVector,
}

impl CircuitState {
    /// `|0⟩ ⊗ pair`
    pub fn with_fresh_ancilla(d: Dimension, pair: &StateVector) -> Result<Self> {
        if pair.dim() != d.squared() {
            return Err(Error::DimensionMismatch {
                expected: d.squared(),
                found: pair.dim(),
            });
        }
        Ok(Self {
            d,
            vec: StateVector::basis(d.get(), 0).kron(pair),
        })
    }

    pub fn vector(&self) -> &StateVector {
        &self.vec
    }

    /// Reduced ancilla density matrix.
    pub fn ancilla_state(&self) -> ComplexMatrix {
        let n = self.d.get();
        let pair = n * n;
        let amps = self.vec.amplitudes();
        ComplexMatrix::from_fn(n, n, |a, b| {
            (0..pair).map(|r| amps[a * pair + r] * amps[b * pair + r].conj()).sum()
        })
    }

    /// Pair state conditioned on ancilla outcome `outcome`, renormalized.
    pub fn pair_given(&self, outcome: usize) -> StateVector {
        let pair = self.d.squared();
        let slice = &self.vec.amplitudes()[outcome * pair..(outcome + 1) * pair];
        StateVector::new(slice.to_vec()).normalized()
    }

    fn outcome_probabilities(&self) -> Vec<f64> {
        let pair = self.d.squared();
        self.vec
            .amplitudes()
            .chunks(pair)
            .map(|block| block.iter().map(|z| z.norm_sqr()).sum())
            .collect()
    }

    fn collapse(&self, outcome: usize) -> Self {
        let mut amps = vec![ZERO; self.vec.dim()];
        let pair = self.d.squared();
        amps[outcome * pair..(outcome + 1) * pair]
            .copy_from_slice(&self.vec.amplitudes()[outcome * pair..(outcome + 1) * pair]);
        Self {
            d: self.d,
            vec: StateVector::new(amps).normalized(),
        }
    }
}

/// The unitary `(F† ⊗ 𝟙)·CT_{i,j}·(F ⊗ 𝟙)`.
pub fn extraction_circuit(d: Dimension, idx: BellIndex) -> ComplexMatrix {
    let f = fourier_gate(d);
    let id = ComplexMatrix::identity(d.squared());
    let pre = kron(&f, &id);
    let post = kron(&f.adjoint(), &id);
    &(&post * &controlled_twirl(d, idx)) * &pre
}

/// Result of one phase extraction.
#[derive(Clone, Debug)]
pub struct Extraction {
    pub phi: usize,
    /// Probability of the reported outcome before collapse.
    pub probability: f64,
    /// Post-measurement state `|Φ⟩ ⊗ pair`.
    pub post: CircuitState,
}

fn run_circuit(state: &CircuitState, idx: BellIndex) -> CircuitState {
    let u = extraction_circuit(state.d, idx);
    CircuitState {
        d: state.d,
        vec: u.apply(&state.vec),
    }
}

/// Runs the circuit and reads the ancilla as the most likely outcome (for a
/// Bell-state pair the outcome is certain).
pub fn phase_extract(state: &CircuitState, idx: BellIndex) -> Extraction {
    let evolved = run_circuit(state, idx);
    let probs = evolved.outcome_probabilities();
    let phi = probs
        .iter()
        .enumerate()
        .max_by(|a, b| a.1.total_cmp(b.1))
        .map(|(i, _)| i)
        .unwrap_or(0);
    Extraction {
        phi,
        probability: probs[phi],
        post: evolved.collapse(phi),
    }
}

/// Like [`phase_extract`] but draws the ancilla outcome from the Born rule.
pub fn phase_extract_sampled<R: Rng + ?Sized>(state: &CircuitState, idx: BellIndex, rng: &mut R) -> Extraction {
    let evolved = run_circuit(state, idx);
    let probs = evolved.outcome_probabilities();
    let u: f64 = rng.random::<f64>() * probs.iter().sum::<f64>();
    let mut acc = 0.0;
    let mut phi = probs.len() - 1;
    for (i, p) in probs.iter().enumerate() {
        acc += p;
        if u < acc {
            phi = i;
            break;
        }
    }
    Extraction {
        phi,
        probability: probs[phi],
        post: evolved.collapse(phi),
    }
}

/// Inverts `Φ₁ = k`, `Φ₂ = −l` from the canonical probe pair.
pub fn decode(phi1: usize, phi2: usize, d: Dimension) -> BellIndex {
    BellIndex::new(d, phi1 as i64, -(phi2 as i64))
}

/// `(W†_{k,l} ⊗ 𝟙) pair`
pub fn correct(pair: &StateVector, idx: BellIndex) -> Result<StateVector> {
    let n2 = pair.dim();
    let n = (n2 as f64).sqrt().round() as usize;
    if n * n != n2 {
        return Err(Error::InvalidInput(format!("pair dimension {n2} is not a square")));
    }
    let d = Dimension::new(n)?;
    let op = kron(&weyl_op(d, idx).adjoint(), &ComplexMatrix::identity(n));
    Ok(op.apply(pair))
}

/// Outcome of identifying and correcting one known error.
#[derive(Clone, Debug, PartialEq)]
pub struct RoundOutcome {
    pub actual: BellIndex,
    pub decoded: BellIndex,
    /// `|⟨Ω₀₀|corrected⟩|²`
    pub fidelity: f64,
}

/// Prepares `|Ω_{k,l}⟩`, probes it twice, decodes and corrects.
pub fn run_round(d: Dimension, actual: BellIndex) -> RoundOutcome {
    let pair = bell_state(d, actual);
    let first = phase_extract(
        &CircuitState::with_fresh_ancilla(d, &pair).expect("pair dim"),
        PROBE_PHASE,
    );
    let pair = first.post.pair_given(first.phi);
    let second = phase_extract(
        &CircuitState::with_fresh_ancilla(d, &pair).expect("pair dim"),
        PROBE_SHIFT,
    );
    let pair = second.post.pair_given(second.phi);
    let decoded = decode(first.phi, second.phi, d);
    let corrected = correct(&pair, decoded).expect("pair dim");
    let fidelity = bell_state(d, BellIndex::origin()).inner(&corrected).norm_sqr();
    RoundOutcome {
        actual,
        decoded,
        fidelity,
    }
}

/// JSON report of [`run_demo`].
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct DemoReport {
    pub d: usize,
    pub trials: usize,
    pub success_rate: f64,
}

/// A round succeeds when the decoded index is right and the corrected pair
/// has fidelity `1 ± 1e-12` with `|Ω₀₀⟩`.
pub fn run_demo<R: Rng + ?Sized>(p: &ErrorDistribution, rounds: usize, rng: &mut R) -> Result<DemoReport> {
    if rounds == 0 {
        return Err(Error::InvalidInput("rounds must be at least 1".into()));
    }
    let d = p.dim();
    let successes = (0..rounds)
        .filter(|_| {
            let out = run_round(d, p.sample(rng));
            out.decoded == out.actual && (out.fidelity - 1.0).abs() <= 1e-12
        })
        .count();
    Ok(DemoReport {
        d: d.get(),
        trials: rounds,
        success_rate: successes as f64 / rounds as f64,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::substream;
    use num_complex::Complex64;

    fn dim(d: usize) -> Dimension {
        Dimension::new(d).unwrap()
    }

    #[test]
    fn error_channel_is_definitional() {
        let d = dim(3);
        let s = apply_error_channel(&ErrorDistribution::point(d, BellIndex::origin()));
        assert_eq!(s.coefficients()[0], 1.0);
        let s = apply_error_channel(&ErrorDistribution::uniform(d));
        assert!(s.coefficients().iter().all(|c| (c - 1.0 / 9.0).abs() < 1e-15));
        let p = vec![0.1, 0.2, 0.0, 0.3, 0.0, 0.0, 0.1, 0.2, 0.1];
        let s = apply_error_channel(&ErrorDistribution::new(d, p.clone()).unwrap());
        assert_eq!(s.coefficients(), p.as_slice());
        assert!(ErrorDistribution::new(d, vec![0.5; 9]).is_err());
    }

    #[test]
    fn fourier_gate_cases() {
        let h = fourier_gate(dim(2));
        let r = 1.0 / 2f64.sqrt();
        let expected = ComplexMatrix::from_row_major(
            2,
            2,
            &[
                Complex64::new(r, 0.0),
                Complex64::new(r, 0.0),
                Complex64::new(r, 0.0),
                Complex64::new(-r, 0.0),
            ],
        )
        .unwrap();
        assert!(h.distance(&expected) < 1e-15);
        assert!(fourier_gate(dim(5)).unitarity_defect() < 1e-12);
        let plus = fourier_gate(dim(4)).apply(&StateVector::basis(4, 0));
        assert!(plus
            .amplitudes()
            .iter()
            .all(|z| (z - Complex64::new(0.5, 0.0)).norm() < 1e-15));
    }

    #[test]
    fn controlled_twirl_blocks() {
        let d = dim(3);
        let idx = BellIndex { k: 1, l: 2 };
        let ct = controlled_twirl(d, idx);
        assert!(ct.unitarity_defect() < 1e-12);
        for kl in d.indices() {
            let omega = bell_state(d, kl);
            let phase = (idx.l * kl.k) as i64 - (idx.k * kl.l) as i64;
            for m in 0..3 {
                let input = StateVector::basis(3, m).kron(&omega);
                let expected = input.scale(d.root_pow(m as i64 * phase));
                assert!(ct.apply(&input).distance(&expected) < 1e-13);
            }
        }
    }

    #[test]
    fn phase_extract_examples() {
        let d = dim(3);
        let pair = bell_state(d, BellIndex { k: 2, l: 1 });
        let state = CircuitState::with_fresh_ancilla(d, &pair).unwrap();
        let a = phase_extract(&state, BellIndex { k: 0, l: 1 });
        assert_eq!(a.phi, 2);
        assert!((a.probability - 1.0).abs() < 1e-12);
        let b = phase_extract(&state, BellIndex { k: 1, l: 0 });
        assert_eq!(b.phi, 2);
        let c = phase_extract(&state, BellIndex::origin());
        assert_eq!(c.phi, 0);
        assert!(c.post.vector().distance(state.vector()) < 1e-12);
    }

    #[test]
    fn sampled_readout_agrees() {
        let d = dim(4);
        let pair = bell_state(d, BellIndex { k: 3, l: 1 });
        let state = CircuitState::with_fresh_ancilla(d, &pair).unwrap();
        let mut rng = substream(1, "ecc", 0);
        for probe in [PROBE_PHASE, PROBE_SHIFT] {
            assert_eq!(
                phase_extract_sampled(&state, probe, &mut rng).phi,
                phase_extract(&state, probe).phi
            );
        }
    }

    #[test]
    fn decode_examples() {
        assert_eq!(decode(2, 2, dim(3)), BellIndex { k: 2, l: 1 });
        assert_eq!(decode(1, 1, dim(2)), BellIndex { k: 1, l: 1 });
        assert_eq!(decode(0, 0, dim(5)), BellIndex::origin());
    }

    #[test]
    fn correction_recovers_omega00() {
        let d = dim(3);
        let origin = bell_state(d, BellIndex::origin());
        let same = correct(&origin, BellIndex::origin()).unwrap();
        assert!(same.distance(&origin) < 1e-15);
        let err = bell_state(d, BellIndex { k: 2, l: 1 });
        let fixed = correct(&err, BellIndex { k: 2, l: 1 }).unwrap();
        assert!((origin.inner(&fixed).norm_sqr() - 1.0).abs() < 1e-12);
        let wrong = correct(&err, BellIndex { k: 1, l: 1 }).unwrap();
        assert!(origin.inner(&wrong).norm_sqr() < 1e-12);
    }

    #[test]
    fn demo_always_succeeds() {
        let mut rng = substream(2, "ecc", 0);
        let r = run_demo(&ErrorDistribution::uniform(dim(3)), 200, &mut rng).unwrap();
        assert_eq!(r.success_rate, 1.0);
        let r = run_demo(&ErrorDistribution::point(dim(2), BellIndex::origin()), 10, &mut rng).unwrap();
        assert_eq!(r.success_rate, 1.0);
        assert!(run_demo(&ErrorDistribution::uniform(dim(2)), 0, &mut rng).is_err());
    }
}
