//! Pauli projection channel, Weyl-Twirl channel and the checks that compare them.
//!
//! `P(ρ) = Σ ⟨Φ_{k,l}|ρ|Φ_{k,l}⟩ P_{k,l}` and
//! `T(ρ) = (1/d²) Σ (V_{i,j} ⊗ V*_{i,j}) ρ (V_{i,j} ⊗ V*_{i,j})†`.
//! They coincide for the standard basis and generally differ otherwise.

use num_complex::Complex64;
use rand::Rng;

use crate::criteria::is_ppt;
use crate::error::{Error, Result};
use crate::qmat::{ComplexMatrix, DensityMatrix, StateVector};
use crate::states::{
    assemble_unchecked, haar_state, random_product_state, random_separable, BellDiagonalState, ProductState,
};
use crate::weyl::{BellBasis, BellIndex};

/// Defects above this are structural, not round-off.
pub const DEFECT_THRESHOLD: f64 = 1e-4;

/// Sum tolerance accepted on Pauli-channel outputs before renormalizing.
const IMAGE_SUM_TOL: f64 = 1e-10;

/// Selects one of the two channels over a basis.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ChannelKind {
    Pauli,
    Twirl,
}

impl ChannelKind {
    pub fn apply(self, rho: &DensityMatrix, basis: &BellBasis) -> Result<DensityMatrix> {
        match self {
            ChannelKind::Pauli => pauli_image(rho, basis),
            ChannelKind::Twirl => twirl_channel(rho, basis),
        }
    }
}

fn check_dims(rho: &DensityMatrix, basis: &BellBasis) -> Result<()> {
    let d = basis.dim().get();
    if rho.dims() != (d, d) {
        return Err(Error::DimensionMismatch {
            expected: d * d,
            found: rho.dim(),
        });
    }
    Ok(())
}

/// Raw diagonal `⟨Φ_{k,l}|ρ|Φ_{k,l}⟩`, no clamping.
pub fn bell_diagonal_entries(rho: &DensityMatrix, basis: &BellBasis) -> Result<Vec<f64>> {
    check_dims(rho, basis)?;
    Ok(basis.states().iter().map(|phi| rho.expectation(phi)).collect())
}

/// Coefficients of the Pauli-channel image.
pub fn pauli_channel(rho: &DensityMatrix, basis: &BellBasis) -> Result<BellDiagonalState> {
    let c = bell_diagonal_entries(rho, basis)?;
    BellDiagonalState::from_image(basis.dim(), c, basis.id().clone(), IMAGE_SUM_TOL)
}

/// The Pauli-channel image as a density matrix.
pub fn pauli_image(rho: &DensityMatrix, basis: &BellBasis) -> Result<DensityMatrix> {
    let s = pauli_channel(rho, basis)?;
    Ok(assemble_unchecked(s.coefficients(), basis))
}

pub fn twirl_channel(rho: &DensityMatrix, basis: &BellBasis) -> Result<DensityMatrix> {
    check_dims(rho, basis)?;
    let d = basis.dim();
    let n = rho.dim();
    let mut acc = ComplexMatrix::zeros(n, n);
    for idx in d.indices() {
        let t = basis.twirl_op(idx);
        let conj = &(&t * rho.matrix()) * &t.adjoint();
        acc = &acc + &conj;
    }
    let out = acc.scale_real(1.0 / d.squared() as f64);
    let sym = (&out + &out.adjoint()).scale_real(0.5);
    DensityMatrix::from_trusted(sym, rho.dims())
}

/// A random test state for channel comparisons, cycling through three families:
/// Haar-random pure bipartite states, pure superpositions of two basis states
/// with a random relative phase, and random separable mixtures.
pub fn random_test_state<R: Rng + ?Sized>(basis: &BellBasis, trial: usize, rng: &mut R) -> DensityMatrix {
    let d = basis.dim();
    let n = d.get();
    match trial % 3 {
        0 => DensityMatrix::pure(&haar_state(n * n, rng), (n, n)).expect("pure state"),
        1 => {
            let a = rng.random_range(0..d.squared());
            let mut b = rng.random_range(0..d.squared() - 1);
            if b >= a {
                b += 1;
            }
            let phase = Complex64::from_polar(1.0, rng.random::<f64>() * std::f64::consts::TAU);
            let sa = basis.state(BellIndex::from_flat(d, a));
            let sb = basis.state(BellIndex::from_flat(d, b)).scale(phase);
            let amps: Vec<Complex64> = sa
                .amplitudes()
                .iter()
                .zip(sb.amplitudes())
                .map(|(x, y)| x + y)
                .collect();
            DensityMatrix::pure(&StateVector::new(amps), (n, n)).expect("pure state")
        }
        _ => random_separable(d, 1 + rng.random_range(0..8), rng).expect("terms ≥ 1"),
    }
}

/// `max ‖T(ρ) − P(ρ)‖_F` over `trials` random states.
pub fn channel_equiv_defect<R: Rng + ?Sized>(basis: &BellBasis, trials: usize, rng: &mut R) -> Result<f64> {
    if trials == 0 {
        return Err(Error::InvalidInput("trials must be at least 1".into()));
    }
    let mut worst = 0.0f64;
    for trial in 0..trials {
        let rho = random_test_state(basis, trial, rng);
        let twirled = twirl_channel(&rho, basis)?;
        let projected = pauli_image(&rho, basis)?;
        worst = worst.max(twirled.matrix().distance(projected.matrix()));
    }
    Ok(worst)
}

/// Whether a separable input lands on a valid simplex point and whether that
/// point is PPT.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SeparabilityReport {
    pub is_diagonal: bool,
    pub is_ppt: bool,
    pub min_pt_eigenvalue: f64,
}

/// `rho_s` must be separable by construction (e.g. from `random_separable`).
pub fn sep_conservation_check(rho_s: &DensityMatrix, basis: &BellBasis) -> Result<SeparabilityReport> {
    let c = bell_diagonal_entries(rho_s, basis)?;
    let image = match BellDiagonalState::from_image(basis.dim(), c, basis.id().clone(), IMAGE_SUM_TOL) {
        Ok(s) => s,
        Err(Error::NotProbability(_)) => {
            return Ok(SeparabilityReport {
                is_diagonal: false,
                is_ppt: false,
                min_pt_eigenvalue: f64::NAN,
            })
        }
        Err(e) => return Err(e),
    };
    let ppt = is_ppt(&assemble_unchecked(image.coefficients(), basis));
    Ok(SeparabilityReport {
        is_diagonal: true,
        is_ppt: ppt.ppt,
        min_pt_eigenvalue: ppt.min_eigenvalue,
    })
}

/// A pure product state whose Pauli image is NPT.
#[derive(Clone, Debug)]
pub struct SeparabilityBreaking {
    pub product: ProductState,
    pub image: BellDiagonalState,
    pub min_pt_eigenvalue: f64,
}

/// Samples up to `attempts` Haar-random product states and returns the first
/// whose Pauli image in `basis` is NPT. Never succeeds for the standard basis.
pub fn find_separability_breaking<R: Rng + ?Sized>(
    basis: &BellBasis,
    attempts: usize,
    rng: &mut R,
) -> Result<Option<SeparabilityBreaking>> {
    for _ in 0..attempts {
        let product = random_product_state(basis.dim(), rng);
        let report = sep_conservation_check(&product.density(), basis)?;
        if report.is_diagonal && !report.is_ppt {
            let image = pauli_channel(&product.density(), basis)?;
            return Ok(Some(SeparabilityBreaking {
                product,
                image,
                min_pt_eigenvalue: report.min_pt_eigenvalue,
            }));
        }
    }
    Ok(None)
}

/// `(Tr(Kρ), Tr(K·P(ρ)))` for the Bell-diagonal operator `K = Σ κ_{k,l} P_{k,l}`.
/// `kappa` is flat, `kappa[k * d + l]`.
pub fn witness_pairing(kappa: &[f64], rho: &DensityMatrix, basis: &BellBasis) -> Result<(f64, f64)> {
    check_dims(rho, basis)?;
    let d = basis.dim();
    if kappa.len() != d.squared() {
        return Err(Error::DimensionMismatch {
            expected: d.squared(),
            found: kappa.len(),
        });
    }
    let n = rho.dim();
    let mut k_op = ComplexMatrix::zeros(n, n);
    for (p, &w) in basis.projectors().iter().zip(kappa) {
        k_op = &k_op + &p.matrix().scale_real(w);
    }
    let before = (&k_op * rho.matrix()).trace().re;
    let image = pauli_image(rho, basis)?;
    let after = (&k_op * image.matrix()).trace().re;
    Ok((before, after))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qmat::hermitian_eigenvalues;
    use crate::rng::substream;
    use crate::states::{random_phase_matrix, sample_simplex, PhaseMode};
    use crate::weyl::{gen_bell_basis, Dimension};

    fn dim(d: usize) -> Dimension {
        Dimension::new(d).unwrap()
    }

    fn random_basis(seed: u64) -> BellBasis {
        let alpha = random_phase_matrix(dim(3), PhaseMode::Full, &mut substream(seed, "alpha", 0)).unwrap();
        gen_bell_basis(&alpha).unwrap()
    }

    #[test]
    fn pauli_is_identity_on_bell_diagonal_input() {
        let d = dim(3);
        let basis = BellBasis::standard(d);
        let c = sample_simplex(d, &mut substream(1, "c", 0));
        let rho = assemble_unchecked(&c, &basis);
        let image = pauli_channel(&rho, &basis).unwrap();
        for (a, b) in image.coefficients().iter().zip(&c) {
            assert!((a - b).abs() < 1e-14);
        }
    }

    #[test]
    fn pauli_drops_bell_coherences() {
        // ρ = (|Ω₀₀⟩ + |Ω₀₁⟩)(⟨Ω₀₀| + ⟨Ω₀₁|)/2: coherences vanish, diagonal stays ½, ½.
        let d = dim(3);
        let basis = BellBasis::standard(d);
        let a = basis.state(BellIndex { k: 0, l: 0 });
        let b = basis.state(BellIndex { k: 0, l: 1 });
        let sum: Vec<Complex64> = a.amplitudes().iter().zip(b.amplitudes()).map(|(x, y)| x + y).collect();
        let rho = DensityMatrix::pure(&StateVector::new(sum), (3, 3)).unwrap();
        let image = pauli_channel(&rho, &basis).unwrap();
        let c = image.coefficients();
        assert!((c[0] - 0.5).abs() < 1e-14 && (c[1] - 0.5).abs() < 1e-14);
        assert!(c[2..].iter().all(|x| x.abs() < 1e-14));
    }

    #[test]
    fn pauli_matches_change_of_basis() {
        let d = dim(3);
        let basis = BellBasis::standard(d);
        let mut rng = substream(2, "rho", 0);
        let psi = haar_state(9, &mut rng);
        let rho = DensityMatrix::pure(&psi, (3, 3)).unwrap();
        // Independent route: ρ in the Bell basis is U† ρ U with U built from bell_state.
        let u = ComplexMatrix::from_fn(9, 9, |r, col| {
            crate::weyl::bell_state(d, BellIndex::from_flat(d, col)).amplitudes()[r]
        });
        let in_bell = &(&u.adjoint() * rho.matrix()) * &u;
        let image = pauli_channel(&rho, &basis).unwrap();
        for (i, c) in image.coefficients().iter().enumerate() {
            assert!((in_bell.get(i, i).re - c).abs() < 1e-13);
        }
    }

    #[test]
    fn twirl_equals_pauli_for_standard_basis() {
        for n in 2..=4 {
            let basis = BellBasis::standard(dim(n));
            let defect = channel_equiv_defect(&basis, 30, &mut substream(3, "rho", n as u64)).unwrap();
            assert!(defect < 1e-10, "d={n}: {defect}");
        }
    }

    #[test]
    fn twirl_is_unital() {
        let basis = random_basis(4);
        let mixed = DensityMatrix::maximally_mixed(3, 3);
        let out = twirl_channel(&mixed, &basis).unwrap();
        assert!(out.matrix().distance(mixed.matrix()) < 1e-14);
    }

    #[test]
    fn twirl_differs_from_pauli_for_random_phases() {
        let basis = random_basis(5);
        let defect = channel_equiv_defect(&basis, 30, &mut substream(5, "rho", 0)).unwrap();
        assert!(defect > DEFECT_THRESHOLD, "defect {defect}");
    }

    #[test]
    fn dimension_mismatch_rejected() {
        let basis = BellBasis::standard(dim(3));
        let rho = DensityMatrix::maximally_mixed(2, 2);
        assert!(matches!(
            pauli_channel(&rho, &basis),
            Err(Error::DimensionMismatch { .. })
        ));
        assert!(matches!(
            twirl_channel(&rho, &basis),
            Err(Error::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn both_channels_preserve_trace_and_positivity() {
        let basis = random_basis(6);
        let mut rng = substream(6, "rho", 0);
        for trial in 0..12 {
            let rho = random_test_state(&basis, trial, &mut rng);
            for kind in [ChannelKind::Pauli, ChannelKind::Twirl] {
                let out = kind.apply(&rho, &basis).unwrap();
                assert!((out.matrix().trace().re - 1.0).abs() < 1e-12);
                assert!(hermitian_eigenvalues(out.matrix()).unwrap()[0] > -1e-9);
            }
        }
    }

    #[test]
    fn separable_images_standard_basis() {
        let basis = BellBasis::standard(dim(3));
        let mut rng = substream(7, "sep", 0);
        for _ in 0..20 {
            let rho = random_separable(dim(3), 20, &mut rng).unwrap();
            let report = sep_conservation_check(&rho, &basis).unwrap();
            assert!(report.is_diagonal && report.is_ppt);
        }
        let report = sep_conservation_check(&DensityMatrix::maximally_mixed(3, 3), &basis).unwrap();
        assert!(report.is_diagonal && report.is_ppt);
        let image = pauli_channel(&DensityMatrix::maximally_mixed(3, 3), &basis).unwrap();
        assert!(image.coefficients().iter().all(|c| (c - 1.0 / 9.0).abs() < 1e-14));
    }

    #[test]
    fn witness_pairing_delta_kappa() {
        let basis = BellBasis::standard(dim(3));
        let mut kappa = vec![0.0; 9];
        kappa[0] = 1.0;
        let rho = random_test_state(&basis, 0, &mut substream(8, "rho", 0));
        let (before, after) = witness_pairing(&kappa, &rho, &basis).unwrap();
        let direct = rho.expectation(basis.state(BellIndex::origin()));
        assert!((before - direct).abs() < 1e-13 && (after - direct).abs() < 1e-13);
    }

    #[test]
    fn witness_pairing_random_alpha() {
        let basis = random_basis(9);
        let mut rng = substream(9, "rho", 0);
        for trial in 0..10 {
            let kappa: Vec<f64> = (0..9).map(|_| rng.random::<f64>() * 2.0 - 1.0).collect();
            let rho = random_test_state(&basis, trial, &mut rng);
            let (before, after) = witness_pairing(&kappa, &rho, &basis).unwrap();
            assert!((before - after).abs() < 1e-12);
        }
    }
}
