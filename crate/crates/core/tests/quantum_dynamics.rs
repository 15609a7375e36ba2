use bh_core::qdyn::{
    bec_state, default_dt, evolve, fit_decay, ground_state, linear_entropy, mean_momentum, one_particle_dm,
    time_reversal_fidelity, EvolveOptions, StateVector,
};
use bh_core::spectra::{eigh, eigh_dense};
use bh_core::{build_hamiltonian, enumerate_basis, stream_rng, BasisSet, HamiltonianSpec, Representation};
use faer::{c64, Mat};
use num_complex::Complex64;
use proptest::prelude::*;
use rand::Rng;

fn site(n: u32, l: usize) -> BasisSet {
    enumerate_basis(n, l, Representation::Site).unwrap()
}

fn random_state(dim: usize, seed: u64) -> StateVector {
    let mut rng = stream_rng(seed, 0);
    let v: Vec<Complex64> = (0..dim).map(|_| Complex64::new(rng.random::<f64>() - 0.5, rng.random::<f64>() - 0.5)).collect();
    let nrm = v.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt();
    StateVector::new(v.into_iter().map(|c| c / nrm).collect(), 0.0).unwrap()
}

#[test]
fn condensate_approximates_the_weakly_interacting_ground_state() {
    let b = site(15, 5);
    let h = build_hamiltonian(&HamiltonianSpec::new(15, 5, 1.0, 0.1 / 3.0), &b).unwrap();
    let g = ground_state(&h).unwrap();
    let overlap = g.state.overlap(&bec_state(&b)).norm_sqr();
    assert!(overlap > 0.9, "{overlap}");
}

#[test]
fn lanczos_and_dense_ground_energies_agree() {
    let b = site(5, 5);
    let h = build_hamiltonian(&HamiltonianSpec::from_u_parameter(5, 5, 0.3), &b).unwrap();
    let e_dense = eigh(&h, false).unwrap().eigenvalues[0];
    let g = ground_state(&h).unwrap();
    assert!((g.energy - e_dense).abs() < 1e-9);
    assert!(g.gap > 0.0 && g.warning.is_none());
}

#[test]
fn free_atoms_oscillate_without_damping() {
    for (n, l, f) in [(6u32, 4usize, 0.5), (3, 6, 1.0)] {
        let b = site(n, l);
        let spec = HamiltonianSpec::new(n, l, 1.0, 0.0).with_field(f);
        let period = 2.0 * std::f64::consts::PI / f;
        let rec = evolve(&b, &bec_state(&b), &spec, EvolveOptions::new(6.0 * period, default_dt(1.0, f)).sample_every(2))
            .unwrap();
        let fit = fit_decay(&rec).unwrap();
        assert!(fit.gamma.abs() < 1e-4, "{fit:?}");
        assert!(rec.entropy.iter().all(|s| (s - 1.0).abs() < 1e-9));
    }
}

#[test]
fn recorded_momentum_matches_direct_evaluation() {
    let b = site(4, 5);
    let spec = HamiltonianSpec::new(4, 5, 1.0, 0.4).with_field(0.7);
    let rec = evolve(&b, &bec_state(&b), &spec, EvolveOptions::new(3.0, 0.01)).unwrap();
    let t = rec.final_state.time;
    let p = mean_momentum(&b, &rec.final_state, t, 1.0, 0.7).unwrap();
    assert!((p - rec.momentum.last().unwrap()).abs() < 1e-12);
}

#[test]
fn interacting_evolution_reverses() {
    let b = site(4, 4);
    let spec = HamiltonianSpec::new(4, 4, 1.0, 0.8).with_field(0.6);
    let fid = time_reversal_fidelity(&b, &bec_state(&b), &spec, 15.0, 0.01).unwrap();
    assert!(fid > 1.0 - 1e-6, "{fid}");
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn density_matrix_is_a_state(n in 1u32..=5, l in 2usize..=5, seed in any::<u64>()) {
        let b = site(n, l);
        let psi = random_state(b.len(), seed);
        let r = one_particle_dm(&b, &psi).unwrap();
        let trace: f64 = (0..l).map(|i| r[i * l + i].re).sum();
        prop_assert!((trace - 1.0).abs() < 1e-10);
        let m = Mat::from_fn(l, l, |i, k| c64::new(r[i * l + k].re, r[i * l + k].im));
        let lowest = eigh_dense(&m, false).unwrap().eigenvalues[0];
        prop_assert!(lowest >= -1e-10, "{}", lowest);
        let s = linear_entropy(&r);
        prop_assert!(s >= 1.0 / l as f64 - 1e-9 && s <= 1.0 + 1e-9);
        let p = mean_momentum(&b, &psi, 0.3, 1.0, 0.5).unwrap();
        prop_assert!(p.abs() <= 1.0 + 1e-12);
    }

    #[test]
    fn evolution_preserves_norm_and_bounds(u in 0.0f64..2.0, f in 0.0f64..2.0, seed in 0u64..100) {
        let b = site(3, 4);
        let spec = HamiltonianSpec::new(3, 4, 1.0, u).with_field(f);
        let rec = evolve(&b, &random_state(b.len(), seed), &spec, EvolveOptions::new(5.0, default_dt(1.0, f))).unwrap();
        prop_assert!(rec.norm_drift < 1e-9);
        for (p, s) in rec.momentum.iter().zip(&rec.entropy) {
            prop_assert!(p.abs() <= 1.0 + 1e-9);
            prop_assert!(*s >= 0.25 - 1e-9 && *s <= 1.0 + 1e-9);
        }
    }
}
