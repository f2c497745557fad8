use num_complex::Complex64;
use rand::Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use super::uniform_in;
use crate::channels::{
    channel_equiv_defect, find_separability_breaking, random_test_state, sep_conservation_check, witness_pairing,
    DEFECT_THRESHOLD,
};
use crate::criteria::{closed_form_cqp, e3_quasipure_generic};
use crate::ecc::{phase_extract, run_round, CircuitState};
use crate::qmat::{kron, partial_trace, ComplexMatrix, Subsystem};
use crate::rng::{substream, StreamRng};
use crate::states::{assemble_unchecked, random_phase_matrix, random_separable, sample_simplex, PhaseMode};
use crate::weyl::{
    basis_gram_defect, bell_state, gen_bell_basis, group_closure_defect, omega00, stabilizer_defect, twirl_op, weyl_op,
    BellBasis, BellIndex, Dimension,
};

const EXACT: f64 = 1e-12;
const CHANNEL: f64 = 1e-10;
const ORACLE: f64 = 1e-8;
/// Proportionality defect above which two operators are "not phase multiples".
const CLOSURE_BREAK: f64 = 1e-6;
/// Off-eigenvector residual above which stabilization counts as broken.
const STABILIZER_BREAK: f64 = 1e-3;
const BREAKING_SHARE: f64 = 0.99;
const CHANNEL_PROBES: usize = 12;
const SEPARABILITY_SEARCH: usize = 500;

/// Pass condition of a check.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", content = "value", rename_all = "snake_case")]
pub enum Bound {
    /// value < bound
    Below(f64),
    /// value ≥ bound
    AtLeast(f64),
}

impl Bound {
    fn holds(self, v: f64) -> bool {
        match self {
            Bound::Below(b) => v < b,
            Bound::AtLeast(b) => v >= b,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct InvariantCheck {
    pub name: String,
    pub d: usize,
    /// Maximum observed defect, or the observed share for counting checks.
    pub value: f64,
    pub bound: Bound,
    pub passed: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct VerifyReport {
    pub seed: u64,
    pub trials: usize,
    pub checks: Vec<InvariantCheck>,
    pub passed: bool,
}

impl VerifyReport {
    pub fn check(&self, name: &str, d: usize) -> Option<&InvariantCheck> {
        self.checks.iter().find(|c| c.name == name && c.d == d)
    }
}

fn push(checks: &mut Vec<InvariantCheck>, name: &str, d: Dimension, value: f64, bound: Bound) {
    checks.push(InvariantCheck {
        name: name.to_string(),
        d: d.get(),
        value,
        passed: bound.holds(value),
        bound,
    });
}

fn weyl_relations(d: Dimension) -> f64 {
    let mut worst = 0.0f64;
    for a in d.indices() {
        let w = weyl_op(d, a);
        let (k, l) = (a.k as i64, a.l as i64);
        let adj = weyl_op(d, BellIndex::new(d, -k, -l)).scale(d.root_pow(k * l));
        let conj = weyl_op(d, BellIndex::new(d, -k, l));
        let tr = weyl_op(d, BellIndex::new(d, k, -l)).scale(d.root_pow(-k * l));
        worst = worst
            .max(w.adjoint().distance(&adj))
            .max(w.conj().distance(&conj))
            .max(w.transpose().distance(&tr));
        for b in d.indices() {
            let prod = &w * &weyl_op(d, b);
            let rhs = weyl_op(d, a.add(b, d)).scale(d.root_pow(l * b.k as i64));
            worst = worst.max(prod.distance(&rhs));
        }
    }
    worst
}

fn twirl_group_law(d: Dimension) -> f64 {
    let id = ComplexMatrix::identity(d.squared());
    let ops: Vec<ComplexMatrix> = d.indices().map(|i| twirl_op(d, i)).collect();
    let mut worst = ops[0].distance(&id);
    for a in d.indices() {
        let ta = &ops[a.flat(d)];
        worst = worst.max((ta * &ops[a.neg(d).flat(d)]).distance(&id));
        for b in d.indices() {
            worst = worst.max((ta * &ops[b.flat(d)]).distance(&ops[a.add(b, d).flat(d)]));
        }
    }
    worst
}

fn twirl_eigenphase(d: Dimension) -> f64 {
    let mut worst = 0.0f64;
    for ij in d.indices() {
        let t = twirl_op(d, ij);
        for kl in d.indices() {
            let omega = bell_state(d, kl);
            let phase = d.root_pow(ij.l as i64 * kl.k as i64 - ij.k as i64 * kl.l as i64);
            worst = worst.max(t.apply(&omega).distance(&omega.scale(phase)));
        }
    }
    worst
}

fn random_matrix(n: usize, rng: &mut StreamRng) -> ComplexMatrix {
    ComplexMatrix::from_fn(n, n, |_, _| {
        Complex64::new(rng.sample(StandardNormal), rng.sample(StandardNormal))
    })
}

/// `(𝟙 ⊗ M)|Ω₀₀⟩ = (Mᵀ ⊗ 𝟙)|Ω₀₀⟩`
fn transport_identity(d: Dimension, trials: usize, rng: &mut StreamRng) -> f64 {
    let n = d.get();
    let omega = omega00(d);
    let id = ComplexMatrix::identity(n);
    (0..trials)
        .map(|_| {
            let m = random_matrix(n, rng);
            let lhs = kron(&id, &m).apply(&omega);
            let rhs = kron(&m.transpose(), &id).apply(&omega);
            lhs.distance(&rhs)
        })
        .fold(0.0, f64::max)
}

fn random_basis(d: Dimension, rng: &mut StreamRng) -> BellBasis {
    let alpha = random_phase_matrix(d, PhaseMode::Full, rng).expect("full phases");
    gen_bell_basis(&alpha).expect("unimodular")
}

fn local_mixedness(basis: &BellBasis) -> f64 {
    let d = basis.dim().get();
    let target = ComplexMatrix::identity(d).scale_real(1.0 / d as f64);
    basis
        .projectors()
        .iter()
        .flat_map(|p| [Subsystem::First, Subsystem::Second].map(|s| partial_trace(p, s).distance(&target)))
        .fold(0.0, f64::max)
}

fn share(hits: usize, total: usize) -> f64 {
    hits as f64 / total as f64
}

fn non_disturbance(d: Dimension) -> f64 {
    let probes: Vec<BellIndex> = d.indices().filter(|i| *i != BellIndex::origin()).collect();
    let mut worst = 0.0f64;
    for kl in d.indices() {
        let original = bell_state(d, kl);
        let mut pair = original.clone();
        for round in 0..10 {
            let state = CircuitState::with_fresh_ancilla(d, &pair).expect("pair dim");
            let out = phase_extract(&state, probes[round % probes.len()]);
            pair = out.post.pair_given(out.phi);
        }
        worst = worst.max((1.0 - original.inner(&pair).norm_sqr()).abs());
    }
    worst
}

fn ancilla_determinism(d: Dimension) -> f64 {
    let mut worst = 0.0f64;
    for kl in d.indices() {
        let state = CircuitState::with_fresh_ancilla(d, &bell_state(d, kl)).expect("pair dim");
        for ij in d.indices() {
            let out = phase_extract(&state, ij);
            worst = worst.max(1.0 - out.probability);
        }
    }
    worst
}

fn e3_oracle(d: Dimension, trials: usize, rng: &mut StreamRng) -> f64 {
    let basis = BellBasis::standard(d);
    (0..trials)
        .map(|_| {
            let c = sample_simplex(d, rng);
            let generic = e3_quasipure_generic(&assemble_unchecked(&c, &basis)).expect("valid density");
            (generic.value - closed_form_cqp(d, &c)).abs()
        })
        .fold(0.0, f64::max)
}

/// Runs every invariant family for each dimension. Counting checks (whether a
/// generalized basis breaks group closure, stabilization or channel
/// equivalence) need `d ≥ 3`; the qutrit and ququart E3 oracle runs only for
/// those two dimensions.
pub fn run_verify(dims: &[Dimension], trials: usize, seed: u64) -> VerifyReport {
    let trials = trials.max(1);
    let mut checks = Vec::new();
    for &d in dims {
        let n = d.get() as u64;
        let rng = |tag: &str| substream(seed, tag, n);

        push(&mut checks, "weyl_relations", d, weyl_relations(d), Bound::Below(EXACT));
        push(
            &mut checks,
            "twirl_group_law",
            d,
            twirl_group_law(d),
            Bound::Below(EXACT),
        );
        push(
            &mut checks,
            "twirl_eigenphase",
            d,
            twirl_eigenphase(d),
            Bound::Below(EXACT),
        );
        push(
            &mut checks,
            "transport_identity",
            d,
            transport_identity(d, trials, &mut rng("verify/transport")),
            Bound::Below(EXACT),
        );

        let mut r = rng("verify/basis");
        let (mut gram, mut local) = (0.0f64, 0.0f64);
        for _ in 0..trials {
            let basis = random_basis(d, &mut r);
            gram = gram.max(basis_gram_defect(&basis));
            local = local.max(local_mixedness(&basis));
        }
        push(&mut checks, "generalized_gram", d, gram, Bound::Below(CHANNEL));
        push(
            &mut checks,
            "generalized_local_mixedness",
            d,
            local,
            Bound::Below(EXACT),
        );

        let standard = BellBasis::standard(d);
        let equiv = channel_equiv_defect(&standard, trials, &mut rng("verify/equivalence")).expect("trials ≥ 1");
        push(&mut checks, "channel_equivalence", d, equiv, Bound::Below(CHANNEL));

        let mut r = rng("verify/separable");
        let conserved = (0..trials)
            .filter(|_| {
                let rho = random_separable(d, 1 + r.random_range(0..8), &mut r).expect("terms ≥ 1");
                let rep = sep_conservation_check(&rho, &standard).expect("dims match");
                rep.is_diagonal && rep.is_ppt
            })
            .count();
        push(
            &mut checks,
            "separability_conserved",
            d,
            share(conserved, trials),
            Bound::AtLeast(1.0),
        );

        let mut r = rng("verify/witness");
        let pairing = (0..trials)
            .map(|t| {
                let kappa: Vec<f64> = (0..d.squared()).map(|_| uniform_in(&mut r, -1.0, 1.0)).collect();
                let rho = random_test_state(&standard, t, &mut r);
                let (before, after) = witness_pairing(&kappa, &rho, &standard).expect("dims match");
                (before - after).abs()
            })
            .fold(0.0, f64::max);
        push(&mut checks, "witness_pairing", d, pairing, Bound::Below(EXACT));

        let (mut decode_ok, mut fidelity) = (true, 0.0f64);
        for idx in d.indices() {
            let out = run_round(d, idx);
            decode_ok &= out.decoded == idx;
            fidelity = fidelity.max((1.0 - out.fidelity).abs());
        }
        push(
            &mut checks,
            "ecc_decode_identity",
            d,
            decode_ok as u8 as f64,
            Bound::AtLeast(1.0),
        );
        push(&mut checks, "ecc_recovery_fidelity", d, fidelity, Bound::Below(EXACT));
        push(
            &mut checks,
            "ecc_non_disturbance",
            d,
            non_disturbance(d),
            Bound::Below(CHANNEL),
        );
        push(
            &mut checks,
            "ecc_ancilla_determinism",
            d,
            ancilla_determinism(d),
            Bound::Below(EXACT),
        );

        if d.get() >= 3 {
            let mut r = rng("verify/breaking");
            let (mut closure, mut stab, mut equiv) = (0, 0, 0);
            for _ in 0..trials {
                let basis = random_basis(d, &mut r);
                closure += (group_closure_defect(&basis) > CLOSURE_BREAK) as usize;
                stab += (stabilizer_defect(&basis) > STABILIZER_BREAK) as usize;
                let defect = channel_equiv_defect(&basis, CHANNEL_PROBES, &mut r).expect("probes ≥ 1");
                equiv += (defect > DEFECT_THRESHOLD) as usize;
            }
            push(
                &mut checks,
                "closure_breaking",
                d,
                share(closure, trials),
                Bound::AtLeast(BREAKING_SHARE),
            );
            push(
                &mut checks,
                "stabilizer_breaking",
                d,
                share(stab, trials),
                Bound::AtLeast(BREAKING_SHARE),
            );
            push(
                &mut checks,
                "equivalence_breaking",
                d,
                share(equiv, trials),
                Bound::AtLeast(BREAKING_SHARE),
            );

            let mut r = rng("verify/separability-breaking");
            let found = (0..trials).any(|_| {
                let basis = random_basis(d, &mut r);
                find_separability_breaking(&basis, SEPARABILITY_SEARCH, &mut r)
                    .expect("dims match")
                    .is_some()
            });
            push(
                &mut checks,
                "separability_breaking_found",
                d,
                found as u8 as f64,
                Bound::AtLeast(1.0),
            );
        }

        if matches!(d.get(), 3 | 4) {
            let oracle = e3_oracle(d, trials, &mut rng("verify/e3-oracle"));
            push(&mut checks, "e3_oracle", d, oracle, Bound::Below(ORACLE));
        }
    }
    let passed = checks.iter().all(|c| c.passed);
    VerifyReport {
        seed,
        trials,
        checks,
        passed,
    }
}
