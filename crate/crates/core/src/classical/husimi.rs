use std::f64::consts::PI;

use num_complex::Complex64;
use rand::Rng;
use rand_distr::{Beta, Distribution, StandardNormal};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::field::ClassicalField;
use super::integrate::{integrate, IntegrateOptions};
use crate::error::{Error, Result};
use crate::rng::stream_rng;

/// Husimi distribution of the N-atom condensate, sampled as unit-norm fields.
#[derive(Debug, Clone, Serialize)]
pub struct HusimiEnsemble {
    pub members: Vec<ClassicalField>,
    pub seed: u64,
    pub n: u32,
    pub l: usize,
}

/// How the interaction Λ of the sampled fields is tied to U and N.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "kebab-case")]
pub enum LambdaConvention {
    /// Λ = U·N.
    #[default]
    MeanField,
    /// Λ = U·(N − 1), the coherent-state expectation of the interaction.
    CoherentState,
}

impl LambdaConvention {
    pub fn lambda(self, u: f64, n: u32) -> f64 {
        match self {
            LambdaConvention::MeanField => u * f64::from(n),
            LambdaConvention::CoherentState => u * f64::from(n.saturating_sub(1)),
        }
    }
}

/// Draw `count` fields with density ∝ |Σ_l ψ_l/√L|^{2N} on the unit sphere.
///
/// The condensate weight w = |c₀|² of the k = 0 mode follows Beta(N+1, L−1);
/// the phase of c₀ is uniform and the remaining modes form an isotropic
/// vector of length √(1−w). Member i uses stream i of `seed`. Fields carry
/// Λ = 0; see [`HusimiEnsemble::with_lambda`].
pub fn sample_husimi_bec(n: u32, l: usize, count: usize, seed: u64) -> Result<HusimiEnsemble> {
    if count == 0 {
        return Err(Error::Domain("ensemble needs at least one member".into()));
    }
    if l < 2 {
        return Err(Error::Domain(format!("Husimi sampling needs L >= 2, got {l}")));
    }
    let beta = Beta::new(f64::from(n) + 1.0, l as f64 - 1.0).map_err(|e| Error::Domain(format!("{e}")))?;
    let members = (0..count)
        .map(|i| {
            let mut rng = stream_rng(seed, i as u64);
            let w: f64 = beta.sample(&mut rng);
            let phase = 2.0 * PI * rng.random::<f64>();
            let mut modes = vec![Complex64::from_polar(w.sqrt(), phase)];
            let rest: Vec<Complex64> = (1..l)
                .map(|_| Complex64::new(StandardNormal.sample(&mut rng), StandardNormal.sample(&mut rng)))
                .collect();
            let rn = rest.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt();
            modes.extend(rest.into_iter().map(|c| c * ((1.0 - w).sqrt() / rn)));
            ClassicalField { psi: modes_to_sites(&modes), lambda: 0.0 }
        })
        .collect();
    Ok(HusimiEnsemble { members, seed, n, l })
}

// ψ_l = L^{−1/2} Σ_k c_k e^{i2πkl/L}, renormalized against rounding
fn modes_to_sites(c: &[Complex64]) -> Vec<Complex64> {
    let l = c.len();
    let psi: Vec<Complex64> = (0..l)
        .map(|s| {
            c.iter()
                .enumerate()
                .map(|(k, ck)| ck * Complex64::from_polar(1.0, 2.0 * PI * ((k * s) % l) as f64 / l as f64))
                .sum::<Complex64>()
                / (l as f64).sqrt()
        })
        .collect();
    let nrm = psi.iter().map(|x| x.norm_sqr()).sum::<f64>().sqrt();
    psi.into_iter().map(|x| x / nrm).collect()
}

impl HusimiEnsemble {
    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    pub fn with_lambda(mut self, lambda: f64) -> Self {
        self.members.iter_mut().for_each(|m| m.lambda = lambda);
        self
    }

    /// Set Λ from U under the given convention.
    pub fn with_interaction(self, u: f64, convention: LambdaConvention) -> Self {
        let lambda = convention.lambda(u, self.n);
        self.with_lambda(lambda)
    }

    /// |Σ_l ψ_l/√L|² per member.
    pub fn condensate_weights(&self) -> Vec<f64> {
        let s = (self.l as f64).sqrt();
        self.members.iter().map(|m| (m.psi.iter().sum::<Complex64>() / s).norm_sqr()).collect()
    }

    /// √L ψ_l with the condensate phase removed, per member and site.
    pub fn phase_referenced(&self) -> Vec<Vec<Complex64>> {
        let s = (self.l as f64).sqrt();
        self.members
            .iter()
            .map(|m| {
                let c0 = m.psi.iter().sum::<Complex64>();
                let rot = if c0.norm() > 0.0 { c0.conj() / c0.norm() } else { Complex64::new(1.0, 0.0) };
                m.psi.iter().map(|x| x * rot * s).collect()
            })
            .collect()
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct EnsembleRecord {
    pub times: Vec<f64>,
    pub p_mean: Vec<f64>,
    pub p_stderr: Vec<f64>,
    pub members: usize,
    pub n: u32,
    pub l: usize,
    pub lambda: f64,
    pub seed: u64,
}

impl EnsembleRecord {
    /// Ensemble mean times (N+L)/N. Husimi averages of ψ*_{l+1}ψ_l are
    /// anti-normally ordered, ⟨a_l a†_{l+1}⟩/(N+L), which carries this factor
    /// relative to ⟨a†_{l+1}a_l⟩/N. `None` for N = 0.
    pub fn quantum_estimate(&self) -> Option<Vec<f64>> {
        (self.n > 0).then(|| {
            let factor = (self.n as f64 + self.l as f64) / self.n as f64;
            self.p_mean.iter().map(|p| p * factor).collect()
        })
    }
}

// Neumaier-compensated running sum.
#[derive(Clone, Copy, Default)]
struct Compensated {
    sum: f64,
    c: f64,
}

impl Compensated {
    fn add(&mut self, x: f64) {
        let t = self.sum + x;
        if self.sum.abs() >= x.abs() {
            self.c += (self.sum - t) + x;
        } else {
            self.c += (x - t) + self.sum;
        }
        self.sum = t;
    }

    fn value(self) -> f64 {
        self.sum + self.c
    }
}

/// Evolve every member and average the classical momentum per sample.
///
/// Members run in parallel in chunks; sums are accumulated in member order
/// so the result does not depend on the thread count.
pub fn ensemble_evolve(ensemble: &HusimiEnsemble, j: f64, f: f64, t_max: f64, opts: IntegrateOptions) -> Result<EnsembleRecord> {
    if ensemble.is_empty() {
        return Err(Error::Domain("empty ensemble".into()));
    }
    let mut opts = opts;
    opts.keep_fields = false;
    opts.track_lyapunov = false;
    let chunk = 64usize.max(rayon::current_num_threads() * 8);
    let mut times = Vec::new();
    let mut sum: Vec<Compensated> = Vec::new();
    let mut sum_sq: Vec<Compensated> = Vec::new();
    for (c, members) in ensemble.members.chunks(chunk).enumerate() {
        let runs: Vec<Result<(Vec<f64>, Vec<f64>)>> = members
            .par_iter()
            .enumerate()
            .map(|(i, m)| {
                integrate(m, j, f, t_max, opts)
                    .map(|r| (r.times, r.momentum))
                    .map_err(|e| Error::Integrator(format!("member {}: {e}", c * chunk + i)))
            })
            .collect();
        for run in runs {
            let (t, p) = run?;
            if times.is_empty() {
                times = t;
                sum = vec![Compensated::default(); times.len()];
                sum_sq = sum.clone();
            }
            for ((s, q), x) in sum.iter_mut().zip(sum_sq.iter_mut()).zip(&p) {
                s.add(*x);
                q.add(x * x);
            }
        }
    }
    let m = ensemble.len() as f64;
    let p_mean: Vec<f64> = sum.iter().map(|s| s.value() / m).collect();
    let p_stderr = sum_sq
        .iter()
        .zip(&p_mean)
        .map(|(q, mean)| if m > 1.0 { ((q.value() - m * mean * mean).max(0.0) / (m - 1.0) / m).sqrt() } else { 0.0 })
        .collect();
    Ok(EnsembleRecord {
        times,
        p_mean,
        p_stderr,
        members: ensemble.len(),
        n: ensemble.n,
        l: ensemble.l,
        lambda: ensemble.members[0].lambda,
        seed: ensemble.seed,
    })
}
