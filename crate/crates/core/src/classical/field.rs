use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Unit-norm mean field on the L-site ring, Σ|ψ_l|² = 1.
///
/// `lambda` is the macroscopic interaction Λ = U·N, so the uniform state
/// feels the nonlinear shift g = Λ/L = UN/L.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClassicalField {
    pub psi: Vec<Complex64>,
    pub lambda: f64,
}

impl ClassicalField {
    pub fn new(psi: Vec<Complex64>, lambda: f64) -> Result<Self> {
        if psi.is_empty() {
            return Err(Error::Domain("field needs at least one site".into()));
        }
        let nrm = norm_sqr(&psi);
        if (nrm - 1.0).abs() > 1e-12 {
            return Err(Error::Domain(format!("field norm² {nrm} differs from 1")));
        }
        if !lambda.is_finite() {
            return Err(Error::Domain(format!("interaction Λ must be finite, got {lambda}")));
        }
        Ok(Self { psi, lambda })
    }

    /// ψ_l = 1/√L.
    pub fn uniform(l: usize, lambda: f64) -> Self {
        let a = 1.0 / (l as f64).sqrt();
        Self { psi: vec![Complex64::new(a, 0.0); l], lambda }
    }

    /// ψ_l = e^{i2πkl/L}/√L.
    pub fn plane_wave(l: usize, k: usize, lambda: f64) -> Self {
        let a = 1.0 / (l as f64).sqrt();
        let kappa = 2.0 * std::f64::consts::PI * k as f64 / l as f64;
        Self { psi: (0..l).map(|s| Complex64::from_polar(a, kappa * s as f64)).collect(), lambda }
    }

    pub fn sites(&self) -> usize {
        self.psi.len()
    }

    pub fn norm_sqr(&self) -> f64 {
        norm_sqr(&self.psi)
    }

    /// g = Λ/L.
    pub fn g(&self) -> f64 {
        self.lambda / self.sites() as f64
    }

    pub fn with_global_phase(&self, phase: f64) -> Self {
        let z = Complex64::from_polar(1.0, phase);
        Self { psi: self.psi.iter().map(|c| c * z).collect(), lambda: self.lambda }
    }

    /// H = −(J/2)Σ(ψ*_{l+1}ψ_l e^{iFt} + c.c.) + (Λ/2)Σ|ψ_l|⁴.
    pub fn energy(&self, j: f64, f: f64, t: f64) -> f64 {
        energy(&self.psi, self.lambda, j, f, t)
    }

    /// p = −J Im(Σ ψ*_{l+1}ψ_l e^{iFt}).
    pub fn momentum(&self, j: f64, f: f64, t: f64) -> f64 {
        momentum(&self.psi, j, f, t)
    }
}

pub(crate) fn norm_sqr(psi: &[Complex64]) -> f64 {
    psi.iter().map(|c| c.norm_sqr()).sum()
}

/// Σ_l ψ*_{l+1} ψ_l on the ring.
pub(crate) fn hopping_sum(psi: &[Complex64]) -> Complex64 {
    let l = psi.len();
    (0..l).map(|s| psi[(s + 1) % l].conj() * psi[s]).sum()
}

pub(crate) fn energy(psi: &[Complex64], lambda: f64, j: f64, f: f64, t: f64) -> f64 {
    let hop = hopping_sum(psi) * Complex64::from_polar(1.0, f * t);
    let quartic: f64 = psi.iter().map(|c| c.norm_sqr().powi(2)).sum();
    -j * hop.re + 0.5 * lambda * quartic
}

pub(crate) fn momentum(psi: &[Complex64], j: f64, f: f64, t: f64) -> f64 {
    -j * (hopping_sum(psi) * Complex64::from_polar(1.0, f * t)).im
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_unnormalized() {
        let psi = vec![Complex64::new(1.0, 0.0), Complex64::new(1e-5, 0.0)];
        assert!(matches!(ClassicalField::new(psi, 0.0), Err(Error::Domain(_))));
        assert!(ClassicalField::new(vec![Complex64::new(0.6, 0.0), Complex64::new(0.0, 0.8)], 1.0).is_ok());
    }

    #[test]
    fn uniform_state_values() {
        let f = ClassicalField::uniform(5, 0.5);
        assert!((f.norm_sqr() - 1.0).abs() < 1e-15);
        assert!((f.g() - 0.1).abs() < 1e-15);
        // −J + Λ/(2L)
        assert!((f.energy(1.0, 0.0, 0.0) - (-1.0 + 0.05)).abs() < 1e-14);
        assert!(f.momentum(1.0, 0.0, 0.0).abs() < 1e-15);
        assert!((f.momentum(1.0, 1.0, 0.5) + 0.5f64.sin()).abs() < 1e-14);
    }

    #[test]
    fn plane_wave_momentum() {
        // Σψ*_{l+1}ψ_l = e^{−iκ}, so p = J sin κ
        let l = 6;
        for k in 0..l {
            let kappa = 2.0 * std::f64::consts::PI * k as f64 / l as f64;
            let f = ClassicalField::plane_wave(l, k, 0.0);
            assert!((f.momentum(1.0, 0.0, 0.0) - kappa.sin()).abs() < 1e-14);
            assert!((f.energy(1.0, 0.0, 0.0) + kappa.cos()).abs() < 1e-14);
        }
    }
}
