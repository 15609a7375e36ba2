use bh_core::spectra::{
    breit_wigner_fit, central_window, eigh, fit_density, histogram_l1, ks_distance, overlap_matrix, reference_cdf,
    sample_rmt, unfold, ReferenceKind, Spectrum, UnfoldedSpacings,
};
use bh_core::{build_hamiltonian, build_sectors, enumerate_basis, project_to_sector, stream_rng, Error, HamiltonianSpec, Representation, SparseHermitian};
use num_complex::Complex64;
use proptest::prelude::*;
use rand::seq::SliceRandom;
use rand::Rng;

fn disordered(n: u32, l: usize, u: f64, seed: u64) -> SparseHermitian {
    let basis = enumerate_basis(n, l, Representation::Site).unwrap();
    build_hamiltonian(&HamiltonianSpec::new(n, l, 1.0, u).with_theta(0.2).with_uniform_disorder(0.3, seed), &basis).unwrap()
}

#[test]
fn free_pair_spectrum_from_bloch_energies() {
    // two bosons on three sites: all unordered pairs of −cos(2πk/3)
    let basis = enumerate_basis(2, 3, Representation::Site).unwrap();
    let h = build_hamiltonian(&HamiltonianSpec::new(2, 3, 1.0, 0.0), &basis).unwrap();
    let eps: Vec<f64> = (0..3).map(|k| -(2.0 * std::f64::consts::PI * k as f64 / 3.0).cos()).collect();
    let mut oracle = Vec::new();
    for a in 0..3 {
        for b in a..3 {
            oracle.push(eps[a] + eps[b]);
        }
    }
    oracle.sort_by(f64::total_cmp);
    let e = eigh(&h, false).unwrap().eigenvalues;
    for (x, y) in e.iter().zip(&oracle) {
        assert!((x - y).abs() < 1e-12);
    }
}

#[test]
fn eigenpairs_meet_contracts() {
    let h = disordered(4, 5, 0.7, 3);
    let s = eigh(&h, true).unwrap();
    let scale = h.norm_bound();
    assert!(s.max_residual(&h).unwrap() <= 1e-8 * scale);
    assert!(s.orthonormality_error().unwrap() <= 1e-8);
    assert!(s.eigenvalues.windows(2).all(|w| w[0] <= w[1]));
}

#[test]
fn density_model_of_the_eight_site_ring() {
    // N = L = 8 spectrum assembled from its symmetry blocks
    let basis = enumerate_basis(8, 8, Representation::Site).unwrap();
    let h = build_hamiltonian(&HamiltonianSpec::from_u_parameter(8, 8, 0.3), &basis).unwrap();
    let mut levels = Vec::with_capacity(basis.len());
    for s in build_sectors(&basis).unwrap() {
        levels.extend(eigh(&project_to_sector(&h, &s).unwrap(), false).unwrap().eigenvalues);
    }
    assert_eq!(levels.len(), 6435);
    let spectrum = Spectrum::from_values(levels);
    let model = fit_density(&spectrum).unwrap();
    let l1 = histogram_l1(&spectrum, &model, 30);
    assert!(l1 <= 0.15, "L1 = {l1}");
}

#[test]
fn poisson_levels_have_exponential_integrated_distribution() {
    let mut rng = stream_rng(42, 0);
    let mut e = 0.0;
    let levels: Vec<f64> = (0..10_001)
        .map(|_| {
            e += -(1.0 - rng.random::<f64>()).ln();
            e
        })
        .collect();
    let spectrum = Spectrum::from_values(levels);
    let model = bh_core::spectra::UniformDensity { lo: spectrum.eigenvalues[0], hi: spectrum.eigenvalues[10_000], level_count: 10_000 };
    let s = unfold(&spectrum, &model, 0.0).unwrap();
    assert!(ks_distance(&s, ReferenceKind::Poisson).unwrap() < 0.02);
    assert!(ks_distance(&s, ReferenceKind::Goe).unwrap() > 0.15);
}

#[test]
fn two_by_two_unitary_ensemble_matches_its_law() {
    let s: Vec<f64> = (0..100_000u64)
        .map(|seed| {
            let e = sample_rmt(ReferenceKind::Gue, 2, seed).unwrap().eigenvalues;
            e[1] - e[0]
        })
        .collect();
    let spacings = UnfoldedSpacings::pool([&UnfoldedSpacings { s, source: None, trimming: 0.0 }]).unwrap();
    let ks = ks_distance(&spacings, ReferenceKind::Gue).unwrap();
    assert!(ks < 0.01, "{ks}");
}

#[test]
fn gue_reference_cdf_matches_quadrature_of_pdf() {
    // trapezoid integration of the density as an independent oracle
    let pdf = |s: f64| 32.0 / std::f64::consts::PI.powi(2) * s * s * (-4.0 * s * s / std::f64::consts::PI).exp();
    let h = 1e-4;
    let mut acc = 0.0;
    let mut s = 0.0;
    for target in [0.5, 1.0, 2.0] {
        while s < target - 1e-12 {
            acc += 0.5 * h * (pdf(s) + pdf(s + h));
            s += h;
        }
        assert!((reference_cdf(ReferenceKind::Gue, target).unwrap() - acc).abs() < 1e-8);
    }
}

#[test]
fn identical_couplings_give_degenerate_profile() {
    let h = disordered(4, 6, 0.4, 1);
    let a = eigh(&h, true).unwrap();
    let r = overlap_matrix(&a, &a.clone()).unwrap();
    let w = central_window(r.dim(), 1.0 / 3.0);
    assert!(matches!(breit_wigner_fit(&r, w, 10), Err(Error::DegenerateProfile(_))));
}

fn permuted(h: &SparseHermitian, perm: &[usize]) -> SparseHermitian {
    let triplets: Vec<(usize, usize, Complex64)> = h
        .entries()
        .iter()
        .flat_map(|e| {
            let (r, c) = (perm[e.row], perm[e.col]);
            if e.row == e.col {
                vec![(r, c, e.value)]
            } else {
                vec![(r, c, e.value), (c, r, e.value.conj())]
            }
        })
        .collect();
    SparseHermitian::from_triplets(h.dim(), &triplets, h.tag().clone()).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn spectrum_is_permutation_invariant(seed in 0u64..10_000, u in 0.0f64..2.0) {
        let h = disordered(3, 5, u, seed);
        let mut perm: Vec<usize> = (0..h.dim()).collect();
        perm.shuffle(&mut stream_rng(seed, 1));
        let a = eigh(&h, false).unwrap().eigenvalues;
        let b = eigh(&permuted(&h, &perm), false).unwrap().eigenvalues;
        let tol = 1e-10 * h.norm_bound();
        for (x, y) in a.iter().zip(&b) {
            prop_assert!((x - y).abs() <= tol);
        }
    }

    #[test]
    fn density_fit_is_translation_equivariant(
        levels in proptest::collection::vec(-50.0f64..50.0, 50..200),
        shift in -1e3f64..1e3,
    ) {
        let a = fit_density(&Spectrum::from_values(levels.clone())).unwrap();
        let b = fit_density(&Spectrum::from_values(levels.iter().map(|x| x + shift).collect())).unwrap();
        prop_assert!((b.mean - a.mean - shift).abs() < 1e-9 * (1.0 + shift.abs()));
        prop_assert!((b.sigma - a.sigma).abs() < 1e-9 * (1.0 + a.sigma + shift.abs()));
    }

    #[test]
    fn sampled_matrices_are_deterministic(seed in any::<u64>(), dim in 2usize..12, unitary in any::<bool>()) {
        let kind = if unitary { ReferenceKind::Gue } else { ReferenceKind::Goe };
        let a = sample_rmt(kind, dim, seed).unwrap().eigenvalues;
        let b = sample_rmt(kind, dim, seed).unwrap().eigenvalues;
        prop_assert_eq!(a.iter().map(|x| x.to_bits()).collect::<Vec<_>>(), b.iter().map(|x| x.to_bits()).collect::<Vec<_>>());
    }

    #[test]
    fn overlaps_are_doubly_stochastic(seed in 0u64..1000, du in 0.001f64..0.5) {
        let a = eigh(&disordered(3, 5, 0.3, seed), true).unwrap();
        let b = eigh(&disordered(3, 5, 0.3 + du, seed), true).unwrap();
        let r = overlap_matrix(&a, &b).unwrap();
        prop_assert!(r.stochasticity_error() < 1e-8);
        for m in 0..r.dim() {
            prop_assert!(r.row(m).iter().all(|&x| (0.0..=1.0 + 1e-12).contains(&x)));
        }
    }
}
