use num_complex::Complex64;
use proptest::prelude::*;
use rand::Rng;
use rand_distr::StandardNormal;

use bellbasis::channels::{pauli_channel, pauli_image, random_test_state, twirl_channel, witness_pairing};
use bellbasis::criteria::{classify, Classifier};
use bellbasis::harness::run_verify;
use bellbasis::qmat::{
    hermitian_eigenvalues, hermitian_spectrum, kron, partial_transpose, partial_transpose_matrix, realign,
    realign_matrix, singular_values, ComplexMatrix, DensityMatrix,
};
use bellbasis::rng::{substream, StreamRng};
use bellbasis::states::{
    assemble_density, family_coefficients, random_phase_matrix, random_product_state, random_separable, sample_simplex,
    PhaseMode,
};
use bellbasis::weyl::{
    bell_state, gen_bell_basis, group_closure_defect, omega00, stabilizer_defect, twirl_op, weyl_op,
};
use bellbasis::{BasisId, BellBasis, BellDiagonalState, BellIndex, Dimension, SliceCoordinates};

fn dim(d: usize) -> Dimension {
    Dimension::new(d).unwrap()
}

fn random_basis(d: Dimension, rng: &mut StreamRng) -> BellBasis {
    gen_bell_basis(&random_phase_matrix(d, PhaseMode::Full, rng).unwrap()).unwrap()
}

fn gaussian_matrix(n: usize, rng: &mut StreamRng) -> ComplexMatrix {
    ComplexMatrix::from_fn(n, n, |_, _| {
        Complex64::new(rng.sample(StandardNormal), rng.sample(StandardNormal))
    })
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 64, failure_persistence: None, ..ProptestConfig::default() })]

    #[test]
    fn weyl_product_rule(d in 2usize..=5, k1 in 0i64..5, l1 in 0i64..5, k2 in 0i64..5, l2 in 0i64..5) {
        let d = dim(d);
        let a = BellIndex::new(d, k1, l1);
        let b = BellIndex::new(d, k2, l2);
        let lhs = &weyl_op(d, a) * &weyl_op(d, b);
        let rhs = weyl_op(d, a.add(b, d)).scale(d.root_pow(a.l as i64 * b.k as i64));
        prop_assert!(lhs.distance(&rhs) < 1e-12);
    }

    #[test]
    fn twirl_eigenphase(d in 2usize..=5, i in 0i64..5, j in 0i64..5, k in 0i64..5, l in 0i64..5) {
        let d = dim(d);
        let ij = BellIndex::new(d, i, j);
        let kl = BellIndex::new(d, k, l);
        let omega = bell_state(d, kl);
        let phase = d.root_pow(ij.l as i64 * kl.k as i64 - ij.k as i64 * kl.l as i64);
        prop_assert!(twirl_op(d, ij).apply(&omega).distance(&omega.scale(phase)) < 1e-12);
    }

    #[test]
    fn transport_identity(d in 2usize..=5, seed in any::<u64>()) {
        let d = dim(d);
        let n = d.get();
        let m = gaussian_matrix(n, &mut substream(seed, "m", 0));
        let id = ComplexMatrix::identity(n);
        let lhs = kron(&id, &m).apply(&omega00(d));
        let rhs = kron(&m.transpose(), &id).apply(&omega00(d));
        prop_assert!(lhs.distance(&rhs) < 1e-12);
    }

    #[test]
    fn reshuffles_are_linear_and_involutive(d in 2usize..=5, seed in any::<u64>(), lambda in -2.0f64..2.0) {
        let d = dim(d);
        let basis = BellBasis::standard(d);
        let mut rng = substream(seed, "rho", 0);
        let a = random_test_state(&basis, 0, &mut rng);
        let b = random_test_state(&basis, 2, &mut rng);
        let dims = a.dims();
        let mix = a.matrix() + &b.matrix().scale_real(lambda);
        for op in [partial_transpose_matrix, realign_matrix] {
            let lin = &op(a.matrix(), dims).unwrap() + &op(b.matrix(), dims).unwrap().scale_real(lambda);
            prop_assert!(op(&mix, dims).unwrap().distance(&lin) < 1e-12);
            let twice = op(&op(a.matrix(), dims).unwrap(), dims).unwrap();
            prop_assert!(twice.distance(a.matrix()) < 1e-12);
        }
        prop_assert!((partial_transpose(&a).trace() - a.matrix().trace()).norm() < 1e-12);
    }

    #[test]
    fn spectrum_reconstructs(d in 2usize..=4, seed in any::<u64>()) {
        let basis = BellBasis::standard(dim(d));
        let rho = random_test_state(&basis, 0, &mut substream(seed, "rho", 1));
        let spec = hermitian_spectrum(rho.matrix()).unwrap();
        prop_assert!(spec.reconstruct().distance(rho.matrix()) < 1e-9);
        prop_assert!(spec.values.windows(2).all(|w| w[0] <= w[1]));
    }

    #[test]
    fn assembly_is_affine(d in 2usize..=4, seed in any::<u64>(), lambda in 0.0f64..=1.0) {
        let d = dim(d);
        let mut rng = substream(seed, "c", 0);
        let basis = random_basis(d, &mut rng);
        let c1 = sample_simplex(d, &mut rng);
        let c2 = sample_simplex(d, &mut rng);
        let mix: Vec<f64> = c1.iter().zip(&c2).map(|(x, y)| lambda * x + (1.0 - lambda) * y).collect();
        let total: f64 = mix.iter().sum();
        let mix: Vec<f64> = mix.iter().map(|x| x / total).collect();
        let state = |c: Vec<f64>| BellDiagonalState::new(d, c, basis.id().clone()).unwrap();
        let lhs = assemble_density(&state(mix), &basis).unwrap();
        let r1 = assemble_density(&state(c1), &basis).unwrap();
        let r2 = assemble_density(&state(c2), &basis).unwrap();
        let rhs = &r1.matrix().scale_real(lambda) + &r2.matrix().scale_real(1.0 - lambda);
        prop_assert!(lhs.matrix().distance(&rhs) < 1e-12);
    }

    #[test]
    fn channels_preserve_trace_and_positivity(d in 2usize..=4, seed in any::<u64>(), family in 0usize..3) {
        let d = dim(d);
        let mut rng = substream(seed, "channel", 0);
        let basis = random_basis(d, &mut rng);
        let rho = random_test_state(&basis, family, &mut rng);
        for image in [twirl_channel(&rho, &basis).unwrap(), pauli_image(&rho, &basis).unwrap()] {
            prop_assert!((image.matrix().trace().re - 1.0).abs() < 1e-12);
            prop_assert!(hermitian_eigenvalues(image.matrix()).unwrap()[0] >= -1e-9);
        }
    }

    #[test]
    fn pauli_channel_is_idempotent(d in 2usize..=4, seed in any::<u64>()) {
        let d = dim(d);
        let mut rng = substream(seed, "idem", 0);
        let basis = random_basis(d, &mut rng);
        let rho = random_test_state(&basis, 0, &mut rng);
        let once = pauli_image(&rho, &basis).unwrap();
        let twice = pauli_image(&once, &basis).unwrap();
        prop_assert!(once.matrix().distance(twice.matrix()) < 1e-12);
        let c = pauli_channel(&once, &basis).unwrap();
        let c0 = pauli_channel(&rho, &basis).unwrap();
        for (x, y) in c.coefficients().iter().zip(c0.coefficients()) {
            prop_assert!((x - y).abs() < 1e-12);
        }
    }

    #[test]
    fn standard_twirl_is_idempotent_and_covariant(d in 2usize..=4, seed in any::<u64>(), i in 0i64..4, j in 0i64..4) {
        let d = dim(d);
        let basis = BellBasis::standard(d);
        let mut rng = substream(seed, "twirl", 0);
        let rho = random_test_state(&basis, 1, &mut rng);
        let once = twirl_channel(&rho, &basis).unwrap();
        let twice = twirl_channel(&once, &basis).unwrap();
        prop_assert!(once.matrix().distance(twice.matrix()) < 1e-10);
        let t = twirl_op(d, BellIndex::new(d, i, j));
        let conj = &(&t * rho.matrix()) * &t.adjoint();
        let conj = DensityMatrix::from_trusted(conj, rho.dims()).unwrap();
        let lhs = twirl_channel(&conj, &basis).unwrap();
        let rhs = &(&t * once.matrix()) * &t.adjoint();
        prop_assert!(lhs.matrix().distance(&rhs) < 1e-10);
    }

    #[test]
    fn witness_pairing_holds_in_any_basis(d in 2usize..=4, seed in any::<u64>()) {
        let d = dim(d);
        let mut rng = substream(seed, "witness", 0);
        let basis = random_basis(d, &mut rng);
        let kappa: Vec<f64> = (0..d.squared()).map(|_| rng.random_range(-1.0..1.0)).collect();
        let rho = random_test_state(&basis, 0, &mut rng);
        let (before, after) = witness_pairing(&kappa, &rho, &basis).unwrap();
        prop_assert!((before - after).abs() < 1e-12);
    }

    #[test]
    fn classification_respects_reflection_about_dominant_index(d in 3usize..=4, seed in any::<u64>()) {
        // Conjugation maps Ω_{k,l} to Ω_{−k,l}; combined with translations
        // this gives the reflection k ↦ 2n − k fixing the dominant index.
        let d = dim(d);
        let basis = BellBasis::standard(d);
        let c = sample_simplex(d, &mut substream(seed, "reflect", 0));
        let s = BellDiagonalState::new(d, c.clone(), BasisId::standard()).unwrap();
        let n = s.dominant_index();
        let mut reflected = vec![0.0; c.len()];
        for idx in d.indices() {
            let image = BellIndex::new(d, 2 * n.k as i64 - idx.k as i64, idx.l as i64);
            reflected[image.flat(d)] = c[idx.flat(d)];
        }
        let r = BellDiagonalState::new(d, reflected, BasisId::standard()).unwrap();
        let (x, y) = (classify(&s, &basis).unwrap(), classify(&r, &basis).unwrap());
        prop_assert_eq!((x.ppt, x.e2_detects, x.e3_detects), (y.ppt, y.e2_detects, y.e3_detects));
        prop_assert!((x.c_qp - y.c_qp).abs() < 1e-9);
        prop_assert!((x.realignment_sum - y.realignment_sum).abs() < 1e-9);
    }
}

#[test]
fn slice_validity_is_convex_on_grid() {
    let valid = |a: f64, b: f64| {
        family_coefficients(SliceCoordinates { a, b })
            .iter()
            .all(|&c| c >= -1e-12)
    };
    let grid: Vec<(f64, f64)> = (0..41)
        .flat_map(|j| (0..41).map(move |i| (-1.0 + 0.1 * i as f64, -1.0 + 0.1 * j as f64)))
        .filter(|&(a, b)| valid(a, b))
        .collect();
    assert!(grid.len() > 100);
    for (n, p) in grid.iter().enumerate() {
        for q in &grid[n + 1..] {
            for t in [0.25, 0.5, 0.75] {
                assert!(
                    valid(t * p.0 + (1.0 - t) * q.0, t * p.1 + (1.0 - t) * q.1),
                    "{p:?} {q:?}"
                );
            }
        }
    }
}

#[test]
fn realignment_never_detects_products() {
    for n in 2..=4 {
        let d = dim(n);
        let mut rng = substream(3, "products", n as u64);
        for _ in 0..500 {
            let rho = random_product_state(d, &mut rng).density();
            let sum: f64 = singular_values(&realign(&rho)).iter().sum();
            assert!(sum <= 1.0 + 1e-9, "d={n}: {sum}");
        }
    }
}

#[test]
fn criteria_never_fire_on_separable_states() {
    let d = dim(3);
    let mut rng = substream(4, "separable", 0);
    for _ in 0..500 {
        let terms = 1 + rng.random_range(0..8);
        let rho = random_separable(d, terms, &mut rng).unwrap();
        let rec = bellbasis::criteria::classify_density(&rho).unwrap();
        assert!(rec.ppt && !rec.e2_detects && !rec.e3_detects, "{rec:?}");
    }
}

#[test]
fn quasipure_concurrence_grows_along_isotropic_line() {
    for n in [3usize, 4] {
        let d = dim(n);
        let basis = BellBasis::standard(d);
        let classifier = Classifier::new(&basis);
        let n2 = d.squared() as f64;
        let mut last = f64::NEG_INFINITY;
        for step in 0..50 {
            let t = 1.0 / n2 + (1.0 - 1.0 / n2) * step as f64 / 49.0;
            let mut c = vec![(1.0 - t) / (n2 - 1.0); d.squared()];
            c[0] = t;
            let cqp = classifier.classify_coefficients(&c).c_qp;
            assert!(cqp >= last - 1e-12, "d={n} t={t}: {cqp} < {last}");
            last = cqp;
        }
        assert!(last > 0.0);
    }
}

#[test]
fn generalized_bases_break_weyl_structure() {
    let d = dim(3);
    let mut rng = substream(5, "breaking", 0);
    let (mut closure, mut stabilizer) = (0, 0);
    for _ in 0..100 {
        let basis = random_basis(d, &mut rng);
        closure += (group_closure_defect(&basis) > 1e-6) as usize;
        stabilizer += (stabilizer_defect(&basis) > 1e-3) as usize;
    }
    assert!(closure >= 99, "closure broken for {closure}/100");
    assert!(stabilizer >= 99, "stabilization broken for {stabilizer}/100");
    let standard = BellBasis::standard(d);
    assert!(group_closure_defect(&standard) < 1e-12);
    assert!(stabilizer_defect(&standard) < 1e-12);
}

#[test]
fn verification_suite_passes() {
    let dims: Vec<Dimension> = (2..=5).map(dim).collect();
    let report = run_verify(&dims, 20, 9);
    let failed: Vec<_> = report.checks.iter().filter(|c| !c.passed).collect();
    assert!(report.passed, "{failed:?}");
    assert!(report.check("weyl_relations", 5).unwrap().value < 1e-12);
}
