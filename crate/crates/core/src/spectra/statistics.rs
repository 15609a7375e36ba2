//! Level densities, unfolding and nearest-neighbour spacing statistics.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use super::eigen::Spectrum;
use crate::error::{Error, Result};
use crate::hamiltonian::BasisTag;

/// Mean level density ρ(E), normalized to the number of levels.
pub trait LevelDensity {
    fn density(&self, e: f64) -> f64;

    fn validate(&self) -> Result<()> {
        Ok(())
    }
}

/// Gaussian level density with fitted center and width.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DensityModel {
    pub mean: f64,
    pub sigma: f64,
    pub level_count: usize,
}

impl DensityModel {
    /// Probability mass of the normalized model inside [a, b].
    pub fn mass_between(&self, a: f64, b: f64) -> f64 {
        let z = |x: f64| (x - self.mean) / (self.sigma * std::f64::consts::SQRT_2);
        0.5 * (libm::erf(z(b)) - libm::erf(z(a)))
    }
}

impl LevelDensity for DensityModel {
    fn density(&self, e: f64) -> f64 {
        let x = (e - self.mean) / self.sigma;
        self.level_count as f64 / (self.sigma * (2.0 * PI).sqrt()) * (-0.5 * x * x).exp()
    }

    fn validate(&self) -> Result<()> {
        if self.sigma > 0.0 && self.sigma.is_finite() {
            Ok(())
        } else {
            Err(Error::Model(format!("density width must be positive, got {}", self.sigma)))
        }
    }
}

/// Flat density of `level_count` levels spread over [lo, hi].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct UniformDensity {
    pub lo: f64,
    pub hi: f64,
    pub level_count: usize,
}

impl LevelDensity for UniformDensity {
    fn density(&self, _e: f64) -> f64 {
        self.level_count as f64 / (self.hi - self.lo)
    }

    fn validate(&self) -> Result<()> {
        if self.hi > self.lo {
            Ok(())
        } else {
            Err(Error::Model("empty support".into()))
        }
    }
}

/// Gaussian model from the sample mean and standard deviation of the levels.
pub fn fit_density(spectrum: &Spectrum) -> Result<DensityModel> {
    let e = &spectrum.eigenvalues;
    if e.len() < 50 {
        return Err(Error::InsufficientData(format!("density fit needs 50 levels, got {}", e.len())));
    }
    let n = e.len() as f64;
    let mean = e.iter().sum::<f64>() / n;
    let var = e.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1.0);
    Ok(DensityModel { mean, sigma: var.sqrt(), level_count: e.len() })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct UnfoldedSpacings {
    pub s: Vec<f64>,
    pub source: Option<BasisTag>,
    /// Fraction of levels dropped at each spectral edge.
    pub trimming: f64,
}

impl UnfoldedSpacings {
    /// Concatenate several sets of spacings and restore unit mean.
    pub fn pool<'a>(parts: impl IntoIterator<Item = &'a UnfoldedSpacings>) -> Result<Self> {
        let mut s = Vec::new();
        let mut trimming = 0.0;
        for p in parts {
            s.extend_from_slice(&p.s);
            trimming = p.trimming;
        }
        rescale(&mut s)?;
        Ok(Self { s, source: None, trimming })
    }

    pub fn len(&self) -> usize {
        self.s.len()
    }

    pub fn is_empty(&self) -> bool {
        self.s.is_empty()
    }

    pub fn mean(&self) -> f64 {
        self.s.iter().sum::<f64>() / self.s.len() as f64
    }
}

fn rescale(s: &mut [f64]) -> Result<()> {
    let total: f64 = s.iter().sum();
    if s.is_empty() || total <= 0.0 {
        return Err(Error::InsufficientData("no nonzero spacings to normalize".into()));
    }
    let m = total / s.len() as f64;
    for x in s.iter_mut() {
        *x /= m;
    }
    Ok(())
}

/// s_n = (E_{n+1} − E_n) ρ(E_n) on the central part of the spectrum.
pub fn unfold<D: LevelDensity + ?Sized>(spectrum: &Spectrum, model: &D, trim: f64) -> Result<UnfoldedSpacings> {
    if !(0.0..=0.4).contains(&trim) {
        return Err(Error::Domain(format!("trim fraction {trim} outside [0, 0.4]")));
    }
    model.validate()?;
    let e = &spectrum.eigenvalues;
    let cut = (trim * e.len() as f64).floor() as usize;
    let kept = &e[cut..e.len() - cut];
    if kept.len() < 2 {
        return Err(Error::InsufficientData("fewer than two levels survive trimming".into()));
    }
    let mut s: Vec<f64> = kept.windows(2).map(|w| ((w[1] - w[0]) * model.density(w[0])).max(0.0)).collect();
    rescale(&mut s)?;
    Ok(UnfoldedSpacings { s, source: spectrum.tag.clone(), trimming: trim })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ReferenceKind {
    Poisson,
    Goe,
    Gue,
}

impl std::fmt::Display for ReferenceKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            ReferenceKind::Poisson => "poisson",
            ReferenceKind::Goe => "goe",
            ReferenceKind::Gue => "gue",
        })
    }
}

/// Spacing law P(s) for integrable, orthogonal and unitary statistics.
pub fn reference_pdf(kind: ReferenceKind, s: f64) -> Result<f64> {
    if s < 0.0 || s.is_nan() {
        return Err(Error::Domain(format!("spacing must be non-negative, got {s}")));
    }
    Ok(match kind {
        ReferenceKind::Poisson => (-s).exp(),
        ReferenceKind::Goe => 0.5 * PI * s * (-0.25 * PI * s * s).exp(),
        ReferenceKind::Gue => 32.0 / (PI * PI) * s * s * (-4.0 * s * s / PI).exp(),
    })
}

/// Closed-form integral of [`reference_pdf`] from 0 to s.
pub fn reference_cdf(kind: ReferenceKind, s: f64) -> Result<f64> {
    if s < 0.0 || s.is_nan() {
        return Err(Error::Domain(format!("spacing must be non-negative, got {s}")));
    }
    Ok(match kind {
        ReferenceKind::Poisson => -(-s).exp_m1(),
        ReferenceKind::Goe => -(-0.25 * PI * s * s).exp_m1(),
        ReferenceKind::Gue => {
            libm::erf(2.0 * s / PI.sqrt()) - 4.0 * s / PI * (-4.0 * s * s / PI).exp()
        }
    })
}

/// Right-continuous empirical distribution function.
#[derive(Debug, Clone, PartialEq)]
pub struct EmpiricalCdf {
    sorted: Vec<f64>,
}

impl EmpiricalCdf {
    pub fn new(values: &[f64]) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::InsufficientData("empty sample".into()));
        }
        let mut sorted = values.to_vec();
        sorted.sort_by(f64::total_cmp);
        Ok(Self { sorted })
    }

    pub fn eval(&self, s: f64) -> f64 {
        self.sorted.partition_point(|&x| x <= s) as f64 / self.sorted.len() as f64
    }

    pub fn samples(&self) -> &[f64] {
        &self.sorted
    }

    /// Largest gap to a continuous reference CDF.
    pub fn sup_distance(&self, reference: impl Fn(f64) -> f64) -> f64 {
        let n = self.sorted.len() as f64;
        self.sorted
            .iter()
            .enumerate()
            .map(|(i, &x)| {
                let f = reference(x);
                (f - i as f64 / n).abs().max(((i + 1) as f64 / n - f).abs())
            })
            .fold(0.0, f64::max)
    }

    /// Two-sample Kolmogorov-Smirnov statistic.
    pub fn sup_distance_to(&self, other: &EmpiricalCdf) -> f64 {
        self.sorted
            .iter()
            .chain(&other.sorted)
            .map(|&x| (self.eval(x) - other.eval(x)).abs())
            .fold(0.0, f64::max)
    }
}

/// I(s) = ∫₀ˢ P(s′) ds′ estimated from the spacings.
pub fn integrated_distribution(spacings: &UnfoldedSpacings) -> Result<EmpiricalCdf> {
    if spacings.len() < 20 {
        return Err(Error::InsufficientData(format!("need 20 spacings, got {}", spacings.len())));
    }
    EmpiricalCdf::new(&spacings.s)
}

/// Kolmogorov-Smirnov distance between the spacings and a reference law.
pub fn ks_distance(spacings: &UnfoldedSpacings, kind: ReferenceKind) -> Result<f64> {
    let cdf = integrated_distribution(spacings)?;
    Ok(cdf.sup_distance(|s| reference_cdf(kind, s.max(0.0)).unwrap_or(0.0)))
}

/// L1 distance between a probability histogram of the levels and the
/// normalized Gaussian model.
pub fn histogram_l1(spectrum: &Spectrum, model: &DensityModel, bins: usize) -> f64 {
    let e = &spectrum.eigenvalues;
    let (lo, hi) = (e[0], e[e.len() - 1]);
    let width = (hi - lo) / bins as f64;
    let mut counts = vec![0usize; bins];
    for &x in e {
        let b = (((x - lo) / width) as usize).min(bins - 1);
        counts[b] += 1;
    }
    let n = e.len() as f64;
    (0..bins)
        .map(|b| {
            let a = lo + b as f64 * width;
            (counts[b] as f64 / n - model.mass_between(a, a + width)).abs()
        })
        .sum()
}
