use num_complex::Complex64;
use rand::Rng;

use super::krylov::{lowest_eigenpair, norm};
use crate::error::{Error, Result};
use crate::fock::BasisSet;
use crate::hamiltonian::SparseHermitian;
use crate::rng::stream_rng;

/// Normalized many-body amplitudes at a given time.
#[derive(Debug, Clone, PartialEq)]
pub struct StateVector {
    pub amplitudes: Vec<Complex64>,
    pub time: f64,
}

impl StateVector {
    pub fn new(amplitudes: Vec<Complex64>, time: f64) -> Result<Self> {
        let nrm = norm(&amplitudes);
        if (nrm - 1.0).abs() > 1e-9 {
            return Err(Error::Domain(format!("state norm {nrm} differs from 1")));
        }
        Ok(Self { amplitudes, time })
    }

    pub fn norm(&self) -> f64 {
        norm(&self.amplitudes)
    }

    pub fn overlap(&self, other: &StateVector) -> Complex64 {
        super::krylov::dot(&self.amplitudes, &other.amplitudes)
    }

    /// Multiply by the phase that makes the largest-modulus amplitude real
    /// and positive (the first one, on ties).
    pub fn fix_phase(&mut self) {
        let max = self.amplitudes.iter().fold(0.0f64, |m, c| m.max(c.norm()));
        if max == 0.0 {
            return;
        }
        let pivot = self.amplitudes.iter().find(|c| c.norm() >= max * (1.0 - 1e-9)).copied().unwrap();
        let phase = pivot.conj() / pivot.norm();
        self.amplitudes.iter_mut().for_each(|c| *c *= phase);
    }

    /// Complex conjugate, used to run the time-reversed protocol.
    pub fn conjugate(&self) -> StateVector {
        StateVector { amplitudes: self.amplitudes.iter().map(|c| c.conj()).collect(), time: -self.time }
    }
}

/// All N atoms in the k = 0 Bloch wave: amplitude √(N!/Πn_l!) L^{−N/2}.
pub fn bec_state(basis: &BasisSet) -> StateVector {
    let n = basis.particles();
    let l = basis.modes() as f64;
    let ln_fact = |k: u32| libm::lgamma(f64::from(k) + 1.0);
    let amplitudes = basis
        .states()
        .map(|s| {
            let ln = 0.5 * (ln_fact(n) - s.iter().map(|&k| ln_fact(k)).sum::<f64>()) - 0.5 * f64::from(n) * l.ln();
            Complex64::new(ln.exp(), 0.0)
        })
        .collect::<Vec<_>>();
    // lgamma rounding leaves the norm off by a few ulp
    let nrm = norm(&amplitudes);
    StateVector { amplitudes: amplitudes.into_iter().map(|c| c / nrm).collect(), time: 0.0 }
}

#[derive(Debug, Clone)]
pub struct GroundState {
    pub state: StateVector,
    pub energy: f64,
    /// Gap to the next level in the complement of the ground vector.
    pub gap: f64,
    /// Set when the lowest level is degenerate within 1e−10.
    pub warning: Option<String>,
}

/// Lowest eigenvector of H via Lanczos, with the deterministic phase fix.
pub fn ground_state(h: &SparseHermitian) -> Result<GroundState> {
    let dim = h.dim();
    if dim == 0 {
        return Err(Error::Dimension("empty matrix".into()));
    }
    let mut apply = |x: &[Complex64], y: &mut [Complex64]| h.apply(x, y);
    let random_start = |stream: u64| -> Vec<Complex64> {
        let mut rng = stream_rng(0x6772_6f75_6e64, stream);
        (0..dim).map(|_| Complex64::new(rng.random::<f64>() - 0.5, rng.random::<f64>() - 0.5)).collect()
    };
    let scale = h.norm_bound();
    let (energy, vec) = lowest_eigenpair(&mut apply, random_start(0), &[], scale)?;
    let (gap, warning) = if dim > 1 {
        let (e1, _) = lowest_eigenpair(&mut apply, random_start(1), std::slice::from_ref(&vec), scale)?;
        let gap = e1 - energy;
        let warn = (gap.abs() <= 1e-10).then(|| format!("ground level is degenerate (gap {gap:.2e}); phase-fixed vector is one member"));
        (gap, warn)
    } else {
        (f64::INFINITY, None)
    };
    let mut state = StateVector { amplitudes: vec, time: 0.0 };
    state.fix_phase();
    Ok(GroundState { state, energy, gap, warning })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fock::{enumerate_basis, Representation};
    use crate::hamiltonian::{build_hamiltonian, HamiltonianSpec};

    fn site(n: u32, l: usize) -> BasisSet {
        enumerate_basis(n, l, Representation::Site).unwrap()
    }

    #[test]
    fn condensate_amplitudes() {
        let s = bec_state(&site(1, 4));
        assert!(s.amplitudes.iter().all(|c| (c.re - 0.5).abs() < 1e-15 && c.im == 0.0));
        let s = bec_state(&site(2, 2));
        let expect = [0.5, std::f64::consts::FRAC_1_SQRT_2, 0.5];
        for (c, e) in s.amplitudes.iter().zip(expect) {
            assert!((c.re - e).abs() < 1e-15);
        }
        assert!((bec_state(&site(15, 5)).norm() - 1.0).abs() < 1e-14);
    }

    #[test]
    fn triangle_ground_state() {
        let b = site(1, 3);
        let g = ground_state(&build_hamiltonian(&HamiltonianSpec::new(1, 3, 1.0, 0.0), &b).unwrap()).unwrap();
        assert!((g.energy + 1.0).abs() < 1e-12);
        let r = 1.0 / 3f64.sqrt();
        assert!(g.state.amplitudes.iter().all(|c| (c - Complex64::new(r, 0.0)).norm() < 1e-9));
        assert!(g.warning.is_none());
    }

    #[test]
    fn free_ground_energy() {
        for (n, l) in [(4, 3), (3, 5), (6, 4)] {
            let b = site(n, l);
            let g = ground_state(&build_hamiltonian(&HamiltonianSpec::new(n, l, 1.0, 0.0), &b).unwrap()).unwrap();
            assert!((g.energy + f64::from(n)).abs() < 1e-9, "N={n} L={l}: {}", g.energy);
            // the ground state is the condensate itself
            assert!((g.state.overlap(&bec_state(&b)).norm() - 1.0).abs() < 1e-9);
        }
    }

    #[test]
    fn degeneracy_is_flagged() {
        // N=1, L=4, θ=π/4: levels -cos(κ+θ) pair up, the lowest two at κ = 0 and -π/2
        let b = site(1, 4);
        let h = build_hamiltonian(&HamiltonianSpec::new(1, 4, 1.0, 0.0).with_theta(std::f64::consts::FRAC_PI_4), &b)
            .unwrap();
        let g = ground_state(&h).unwrap();
        assert!(g.warning.is_some(), "gap {}", g.gap);
    }

    #[test]
    fn phase_fix_is_deterministic() {
        let mut s = StateVector::new(vec![Complex64::new(0.0, 0.6), Complex64::new(0.0, -0.8)], 0.0).unwrap();
        s.fix_phase();
        assert!((s.amplitudes[1] - Complex64::new(0.8, 0.0)).norm() < 1e-15);
        assert!((s.amplitudes[0] - Complex64::new(-0.6, 0.0)).norm() < 1e-15);
    }
}
