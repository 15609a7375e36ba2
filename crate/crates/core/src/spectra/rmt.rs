use faer::{c64, Mat};
use rand::Rng;
use rand_distr::StandardNormal;

use super::eigen::{dense_complex, dense_real, Spectrum};
use super::statistics::ReferenceKind;
use crate::error::{Error, Result};
use crate::rng::stream_rng;

/// Coefficient A of P(H) ∝ exp(−A Tr H²). This value puts the semicircle
/// edge at ±2·dim/π, so the mean density is √(1 − (πE/2·dim)²) up to
/// normalization.
pub fn ensemble_coefficient(dim: usize) -> f64 {
    std::f64::consts::PI.powi(2) / (4.0 * dim as f64)
}

/// One GOE or GUE matrix of size `dim`, diagonalized. Deterministic in `seed`.
pub fn sample_rmt(kind: ReferenceKind, dim: usize, seed: u64) -> Result<Spectrum> {
    if dim < 2 {
        return Err(Error::Domain(format!("random matrix dimension must be at least 2, got {dim}")));
    }
    let a = ensemble_coefficient(dim);
    // diagonal variance 1/(2A); off-diagonal real components 1/(4A)
    let sd_diag = (0.5 / a).sqrt();
    let sd_off = (0.25 / a).sqrt();
    let mut rng = stream_rng(seed, 0);
    let mut gauss = move || -> f64 { rng.sample(StandardNormal) };
    match kind {
        ReferenceKind::Goe => {
            let mut m = Mat::<f64>::zeros(dim, dim);
            for j in 0..dim {
                m[(j, j)] = sd_diag * gauss();
                for i in j + 1..dim {
                    let x = sd_off * gauss();
                    m[(i, j)] = x;
                    m[(j, i)] = x;
                }
            }
            dense_real(m, false)
        }
        ReferenceKind::Gue => {
            let mut m = Mat::<c64>::zeros(dim, dim);
            for j in 0..dim {
                m[(j, j)] = c64::new(sd_diag * gauss(), 0.0);
                for i in j + 1..dim {
                    let z = c64::new(sd_off * gauss(), sd_off * gauss());
                    m[(i, j)] = z;
                    m[(j, i)] = z.conj();
                }
            }
            dense_complex(m, false)
        }
        ReferenceKind::Poisson => Err(Error::Domain("no random-matrix ensemble for Poisson statistics".into())),
    }
}
