//! Low-energy semiclassics: Bogoliubov frequencies, the effective island
//! Hamiltonian of the three-site ring, and the equidistant level ladder
//! obtained by quantizing its actions with ħ_eff = 1/N.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::spectra::Spectrum;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BogoliubovSet {
    pub j: f64,
    pub g: f64,
    pub l: usize,
    /// δ_k = J(1 − cos(2πk/L)) for k = 1..L−1.
    pub deltas: Vec<f64>,
    /// Ω_k = √(2gδ_k + δ_k²).
    pub omegas: Vec<f64>,
}

impl BogoliubovSet {
    /// Ω_k for 1 ≤ k < L.
    pub fn omega(&self, k: usize) -> f64 {
        self.omegas[k - 1]
    }
}

pub fn bogoliubov_frequencies(j: f64, g: f64, l: usize) -> Result<BogoliubovSet> {
    if !(j > 0.0) || !(g >= 0.0) || !g.is_finite() {
        return Err(Error::Domain(format!("need J > 0 and finite g >= 0, got J={j} g={g}")));
    }
    if l < 3 {
        return Err(Error::Domain(format!("Bogoliubov modes need L >= 3, got {l}")));
    }
    // min(k, L−k) keeps Ω_k = Ω_{L−k} exact in floating point
    let deltas: Vec<f64> = (1..l).map(|k| j * (1.0 - (2.0 * PI * k.min(l - k) as f64 / l as f64).cos())).collect();
    let omegas = deltas.iter().map(|d| (2.0 * g * d + d * d).sqrt()).collect();
    Ok(BogoliubovSet { j, g, l, deltas, omegas })
}

/// (δ+g)I + g√(I² − 4M²) cos 2θ.
pub fn effective_energy(i: f64, m: f64, theta: f64, delta: f64, g: f64) -> Result<f64> {
    if !(i >= 0.0) || m.abs() > 0.5 * i {
        return Err(Error::Domain(format!("need I >= 0 and |M| <= I/2, got I={i} M={m}")));
    }
    Ok((delta + g) * i + g * (i * i - 4.0 * m * m).max(0.0).sqrt() * (2.0 * theta).cos())
}

/// I on the level curve effective_energy(I, M, θ) = E.
fn action_on_curve(e: f64, m: f64, theta: f64, delta: f64, g: f64) -> Result<f64> {
    let a = delta + g;
    let c = (2.0 * theta).cos();
    if m == 0.0 {
        return Ok(e / (a + g * c));
    }
    // (a² − g²c²)I² − 2aE I + E² + 4g²c²M² = 0; keep the root on the curve
    let qa = a * a - g * g * c * c;
    let disc = g * g * c * c * (e * e - 4.0 * m * m * qa);
    if disc < 0.0 || qa <= 0.0 {
        return Err(Error::Domain(format!("energy {e} lies below the M={m} level curve")));
    }
    let root = disc.sqrt();
    [(a * e + root) / qa, (a * e - root) / qa]
        .into_iter()
        .filter(|&i| i >= 2.0 * m.abs() * (1.0 - 1e-12))
        .map(|i| (i, (effective_energy(i, m.abs().min(0.5 * i), theta, delta, g).unwrap_or(f64::NAN) - e).abs()))
        .filter(|(_, r)| r.is_finite())
        .min_by(|x, y| x.1.total_cmp(&y.1))
        .map(|(i, _)| i)
        .ok_or_else(|| Error::Domain(format!("no action on the level curve at E={e}, M={m}")))
}

fn simpson<F: Fn(f64) -> Result<f64>>(f: &F, a: f64, b: f64, tol: f64) -> Result<f64> {
    fn rec<F: Fn(f64) -> Result<f64>>(f: &F, a: f64, b: f64, fa: f64, fm: f64, fb: f64, whole: f64, tol: f64, depth: u32) -> Result<f64> {
        let m = 0.5 * (a + b);
        let (lm, rm) = (0.5 * (a + m), 0.5 * (m + b));
        let (flm, frm) = (f(lm)?, f(rm)?);
        let left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
        let right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
        let delta = left + right - whole;
        if depth == 0 || delta.abs() <= 15.0 * tol {
            return Ok(left + right + delta / 15.0);
        }
        Ok(rec(f, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1)? + rec(f, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1)?)
    }
    let (fa, fm, fb) = (f(a)?, f(0.5 * (a + b))?, f(b)?);
    let whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
    rec(f, a, b, fa, fm, fb, whole, tol, 40)
}

/// Ĩ = (1/2π)∮ I(θ, E) dθ along the level curve at fixed M.
///
/// Needs E ≥ 2|M|(δ+g), where the curve runs over every θ; below that it
/// closes on itself around θ = π/2 and the θ-average is not the action.
pub fn island_action(e: f64, m: f64, delta: f64, g: f64) -> Result<f64> {
    if !(delta > 0.0) || !(g >= 0.0) || !(e >= 0.0) {
        return Err(Error::Domain(format!("need δ > 0, g >= 0, E >= 0, got δ={delta} g={g} E={e}")));
    }
    if e < 2.0 * m.abs() * (delta + g) {
        return Err(Error::Domain(format!("E={e} is below 2|M|(δ+g) = {}", 2.0 * m.abs() * (delta + g))));
    }
    let integrand = |theta: f64| action_on_curve(e, m, theta, delta, g);
    // the integrand has period π; integrate one period and double
    Ok(2.0 * simpson(&integrand, 0.0, PI, 1e-13 * (1.0 + e))? / (2.0 * PI))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Level {
    /// Total number of quanta.
    pub n: usize,
    pub energy: f64,
    pub degeneracy: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SemiclassicalLevels {
    pub n: u32,
    pub l: usize,
    pub j: f64,
    pub u: f64,
    pub g: f64,
    /// Mean-field ground energy N(−J + g/2).
    pub e0: f64,
    /// Ω_1, the energy unit of the ladder.
    pub omega: f64,
    pub hbar_eff: f64,
    pub levels: Vec<Level>,
}

/// Predicted low-lying levels. For L = 3: E₀ + nΩ with degeneracy n+1.
/// For L > 3: harmonic sums Σ_k m_k Ω_k over all occupations with
/// Σ m_k ≤ n_max, merged where they coincide.
pub fn semiclassical_levels(n: u32, l: usize, j: f64, u: f64, n_max: usize) -> Result<SemiclassicalLevels> {
    if n == 0 {
        return Err(Error::Domain("semiclassical levels need N >= 1".into()));
    }
    let g = u * f64::from(n) / l as f64;
    let set = bogoliubov_frequencies(j, g, l)?;
    let e0 = f64::from(n) * (-j + 0.5 * g);
    let omega = set.omega(1);
    let levels = if l == 3 {
        (0..=n_max).map(|k| Level { n: k, energy: e0 + k as f64 * omega, degeneracy: k + 1 }).collect()
    } else {
        let mut raw: Vec<(usize, f64)> = Vec::new();
        let mut occ = vec![0usize; l - 1];
        loop {
            let total: usize = occ.iter().sum();
            if total <= n_max {
                raw.push((total, occ.iter().zip(&set.omegas).map(|(m, w)| *m as f64 * w).sum()));
            }
            // odometer over occupations bounded by n_max
            let mut i = 0;
            loop {
                if i == occ.len() {
                    break;
                }
                occ[i] += 1;
                if occ.iter().sum::<usize>() <= n_max {
                    break;
                }
                occ[i] = 0;
                i += 1;
            }
            if i == occ.len() {
                break;
            }
        }
        raw.sort_by(|a, b| a.1.total_cmp(&b.1).then(a.0.cmp(&b.0)));
        let mut levels: Vec<Level> = Vec::new();
        for (k, e) in raw {
            match levels.last_mut() {
                Some(last) if (last.energy - e0 - e).abs() <= 1e-12 * omega.max(1.0) && last.n == k => last.degeneracy += 1,
                _ => levels.push(Level { n: k, energy: e0 + e, degeneracy: 1 }),
            }
        }
        levels
    };
    Ok(SemiclassicalLevels { n, l, j, u, g, e0, omega, hbar_eff: 1.0 / f64::from(n), levels })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClusterRow {
    pub n: usize,
    /// n in units of Ω.
    pub predicted: f64,
    /// Mean of (E − E₀)/Ω over the cluster.
    pub exact_mean: f64,
    pub deviation: f64,
    pub multiplicity: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ComparisonReport {
    pub omega: f64,
    pub exact_e0: f64,
    pub rows: Vec<ClusterRow>,
    /// First n with |deviation| above `threshold`.
    pub breakdown: Option<usize>,
    pub threshold: f64,
    pub cluster_tolerance: f64,
}

pub const CLUSTER_TOLERANCE: f64 = 0.15;
pub const BREAKDOWN_THRESHOLD: f64 = 0.25;

/// Cluster the exact levels (consecutive levels closer than 0.15Ω join one
/// cluster), number the clusters from the ground, and compare with n.
pub fn compare_with_exact(levels: &SemiclassicalLevels, exact: &Spectrum) -> Result<ComparisonReport> {
    let spec = exact
        .tag
        .as_ref()
        .and_then(|t| t.spec.as_ref().map(|s| (t, s)))
        .ok_or_else(|| Error::Provenance("exact spectrum carries no Hamiltonian parameters".into()))?;
    let (tag, s) = spec;
    let close = |a: f64, b: f64| (a - b).abs() <= 1e-12 * a.abs().max(b.abs()).max(1.0);
    if s.n != levels.n || s.l != levels.l || !close(s.j, levels.j) || !close(s.u, levels.u) {
        return Err(Error::Provenance(format!(
            "spectrum for N={}, L={}, J={}, U={} compared with levels for N={}, L={}, J={}, U={}",
            s.n, s.l, s.j, s.u, levels.n, levels.l, levels.j, levels.u
        )));
    }
    if tag.sector.is_some() || s.epsilon.iter().any(|e| *e != 0.0) || s.theta != 0.0 || s.f != 0.0 {
        return Err(Error::Provenance("comparison needs the full clean spectrum".into()));
    }
    let e = &exact.eigenvalues;
    if e.is_empty() {
        return Err(Error::InsufficientData("empty spectrum".into()));
    }
    if e.windows(2).any(|w| w[1] < w[0]) {
        return Err(Error::Domain("exact spectrum must be sorted".into()));
    }
    let omega = levels.omega;
    let e0 = e[0];
    let n_max = levels.levels.iter().map(|l| l.n).max().unwrap_or(0);
    let mut rows = Vec::new();
    let mut start = 0;
    while start < e.len() && rows.len() <= n_max {
        let mut end = start + 1;
        while end < e.len() && e[end] - e[end - 1] <= CLUSTER_TOLERANCE * omega {
            end += 1;
        }
        let n = rows.len();
        let mean = e[start..end].iter().map(|x| (x - e0) / omega).sum::<f64>() / (end - start) as f64;
        rows.push(ClusterRow { n, predicted: n as f64, exact_mean: mean, deviation: mean - n as f64, multiplicity: end - start });
        start = end;
    }
    let breakdown = rows.iter().find(|r| r.deviation.abs() > BREAKDOWN_THRESHOLD).map(|r| r.n);
    Ok(ComparisonReport { omega, exact_e0: e0, rows, breakdown, threshold: BREAKDOWN_THRESHOLD, cluster_tolerance: CLUSTER_TOLERANCE })
}
