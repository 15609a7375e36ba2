use std::f64::consts::PI;
use std::ops::Range;

use faer::Mat;
use serde::{Deserialize, Serialize};

use super::eigen::{Eigenvectors, Spectrum};
use crate::error::{Error, Result};

/// R(m, n) = |⟨a_m|b_n⟩|² between two complete eigenbases.
#[derive(Debug, Clone)]
pub struct OverlapMatrix {
    dim: usize,
    // row-major
    r: Vec<f64>,
    /// Interaction strengths (U of `a`, U of `b`) when known.
    pub params: Option<(f64, f64)>,
}

impl OverlapMatrix {
    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn get(&self, m: usize, n: usize) -> f64 {
        self.r[m * self.dim + n]
    }

    pub fn row(&self, m: usize) -> &[f64] {
        &self.r[m * self.dim..(m + 1) * self.dim]
    }

    /// Largest deviation of a row or column sum from 1.
    pub fn stochasticity_error(&self) -> f64 {
        let mut cols = vec![0.0; self.dim];
        let mut worst = 0.0f64;
        for m in 0..self.dim {
            let row = self.row(m);
            worst = worst.max((row.iter().sum::<f64>() - 1.0).abs());
            for (c, x) in cols.iter_mut().zip(row) {
                *c += x;
            }
        }
        cols.iter().fold(worst, |w, c| w.max((c - 1.0).abs()))
    }

    /// Weight of row `m` within `band` of the diagonal.
    pub fn band_mass(&self, m: usize, band: usize) -> f64 {
        let lo = m.saturating_sub(band);
        let hi = (m + band + 1).min(self.dim);
        self.row(m)[lo..hi].iter().sum()
    }
}

pub fn overlap_matrix(a: &Spectrum, b: &Spectrum) -> Result<OverlapMatrix> {
    let (va, vb) = match (&a.eigenvectors, &b.eigenvectors) {
        (Some(x), Some(y)) => (x, y),
        _ => return Err(Error::InsufficientData("overlaps need eigenvectors on both sides".into())),
    };
    if va.dim() != vb.dim() || va.count() != va.dim() || vb.count() != vb.dim() {
        return Err(Error::Dimension(format!(
            "eigenbases of size {}x{} and {}x{} are not comparable",
            va.dim(),
            va.count(),
            vb.dim(),
            vb.count()
        )));
    }
    if let (Some(ta), Some(tb)) = (&a.tag, &b.tag) {
        if ta.n != tb.n || ta.l != tb.l || ta.representation != tb.representation || ta.sector != tb.sector {
            return Err(Error::Dimension("eigenbases refer to different Fock bases".into()));
        }
    }
    let dim = va.dim();
    let mut r = vec![0.0; dim * dim];
    match (va, vb) {
        (Eigenvectors::Real(x), Eigenvectors::Real(y)) => {
            let g: Mat<f64> = x.transpose() * y;
            for m in 0..dim {
                for n in 0..dim {
                    r[m * dim + n] = g[(m, n)] * g[(m, n)];
                }
            }
        }
        _ => {
            let g = va.to_complex().adjoint() * vb.to_complex();
            for m in 0..dim {
                for n in 0..dim {
                    r[m * dim + n] = g[(m, n)].norm_sqr();
                }
            }
        }
    }
    let params = match (&a.tag, &b.tag) {
        (Some(ta), Some(tb)) => ta.spec.as_ref().zip(tb.spec.as_ref()).map(|(x, y)| (x.u, y.u)),
        _ => None,
    };
    let out = OverlapMatrix { dim, r, params };
    let err = out.stochasticity_error();
    if err > 1e-8 {
        return Err(Error::Integrity(format!("overlap matrix is not doubly stochastic (error {err:.3e})")));
    }
    Ok(out)
}

/// Lorentzian (Γ/2π) / (d² + Γ²/4).
pub fn breit_wigner(d: f64, gamma: f64) -> f64 {
    gamma / (2.0 * PI) / (d * d + 0.25 * gamma * gamma)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProfilePoint {
    pub d: i64,
    pub r_mean: f64,
    pub fit: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BreitWignerFit {
    pub gamma: f64,
    pub profile: Vec<ProfilePoint>,
    /// ‖R̄ − fit‖₂ / ‖R̄‖₂ over |d| ≤ 3Γ.
    pub relative_residual: f64,
    /// Sum of squared deviations over the fitted range.
    pub sse: f64,
}

/// Central `fraction` of `dim` indices.
pub fn central_window(dim: usize, fraction: f64) -> Range<usize> {
    let width = (dim as f64 * fraction).round() as usize;
    let start = (dim - width.min(dim)) / 2;
    start..start + width.min(dim)
}

/// R̄(d), the average of R(n, n+d) over n in `window`.
pub fn averaged_profile(r: &OverlapMatrix, window: Range<usize>, d_max: usize) -> Result<Vec<(i64, f64)>> {
    if window.len() < 20 || window.end > r.dim() {
        return Err(Error::InsufficientData(format!("averaging window {window:?} is too small or out of range")));
    }
    let d_max = d_max as i64;
    Ok((-d_max..=d_max)
        .map(|d| {
            let mut acc = 0.0;
            let mut count = 0usize;
            for n in window.clone() {
                let m = n as i64 + d;
                if m >= 0 && (m as usize) < r.dim() {
                    acc += r.get(n, m as usize);
                    count += 1;
                }
            }
            (d, if count > 0 { acc / count as f64 } else { 0.0 })
        })
        .collect())
}

/// Least-squares width of the averaged overlap profile over |d| ≤ d_max.
pub fn breit_wigner_fit(r: &OverlapMatrix, window: Range<usize>, d_max: usize) -> Result<BreitWignerFit> {
    let profile = averaged_profile(r, window, d_max)?;
    fit_profile(&profile)
}

pub fn fit_profile(profile: &[(i64, f64)]) -> Result<BreitWignerFit> {
    let center = profile.iter().find(|(d, _)| *d == 0).map_or(0.0, |p| p.1);
    let off: f64 = profile.iter().filter(|(d, _)| *d != 0).map(|p| p.1).sum();
    if center >= 1.0 - 1e-9 || off <= 1e-12 {
        return Err(Error::DegenerateProfile("overlap mass sits entirely on the diagonal".into()));
    }
    let sse = |log_g: f64| {
        let g = log_g.exp();
        profile.iter().map(|&(d, y)| (y - breit_wigner(d as f64, g)).powi(2)).sum::<f64>()
    };
    let (lo, hi, steps) = ((1e-2f64).ln(), (1e3f64).ln(), 600);
    let grid: Vec<f64> = (0..=steps).map(|i| lo + (hi - lo) * i as f64 / steps as f64).collect();
    let best = (0..grid.len()).min_by(|&i, &j| sse(grid[i]).total_cmp(&sse(grid[j]))).expect("nonempty grid");
    let mut a = grid[best.saturating_sub(1)];
    let mut b = grid[(best + 1).min(steps)];
    let phi = 0.5 * (5f64.sqrt() - 1.0);
    let mut c = b - phi * (b - a);
    let mut d = a + phi * (b - a);
    for _ in 0..100 {
        if sse(c) < sse(d) {
            b = d;
        } else {
            a = c;
        }
        c = b - phi * (b - a);
        d = a + phi * (b - a);
    }
    let gamma = (0.5 * (a + b)).exp();
    let points: Vec<ProfilePoint> = profile
        .iter()
        .map(|&(d, y)| ProfilePoint { d, r_mean: y, fit: breit_wigner(d as f64, gamma) })
        .collect();
    let (num, den) = points
        .iter()
        .filter(|p| (p.d as f64).abs() <= 3.0 * gamma)
        .fold((0.0, 0.0), |(n, m), p| (n + (p.r_mean - p.fit).powi(2), m + p.r_mean.powi(2)));
    Ok(BreitWignerFit {
        gamma,
        relative_residual: (num / den).sqrt(),
        sse: sse(gamma.ln()),
        profile: points,
    })
}
