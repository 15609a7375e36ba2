use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use super::propagate::EvolutionRecord;
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DecayFit {
    pub gamma: f64,
    /// RMS residual of the straight-line fit to log|extrema|.
    pub residual: f64,
    pub window: (f64, f64),
    pub extrema: usize,
}

/// Largest |p| in each half Bloch period [kT_B/2, (k+1)T_B/2) fully covered
/// by the samples, refined by a parabola through the neighbouring samples.
pub fn half_period_extrema(times: &[f64], p: &[f64], f: f64) -> Result<Vec<(f64, f64)>> {
    if f <= 0.0 {
        return Err(Error::Domain("extrema are binned by half Bloch periods and need F > 0".into()));
    }
    let (Some(&t_first), Some(&t_last)) = (times.first(), times.last()) else {
        return Ok(Vec::new());
    };
    let half = PI / f;
    let mut out = Vec::new();
    let mut k = (t_first / half).ceil() as i64;
    let mut start = 0usize;
    while (k + 1) as f64 * half <= t_last + 1e-12 * half {
        let (lo, hi) = (k as f64 * half, (k + 1) as f64 * half);
        while start < times.len() && times[start] < lo {
            start += 1;
        }
        let mut end = start;
        while end < times.len() && times[end] < hi {
            end += 1;
        }
        if let Some(i) = (start..end).max_by(|&a, &b| p[a].abs().total_cmp(&p[b].abs())) {
            let (mut t, mut y) = (times[i], p[i].abs());
            if i > 0 && i + 1 < times.len() {
                let (ym, yp) = (p[i - 1].abs(), p[i + 1].abs());
                let h = 0.5 * (times[i + 1] - times[i - 1]);
                let curv = yp - 2.0 * y + ym;
                if curv < 0.0 {
                    let shift = 0.5 * (ym - yp) / curv;
                    if shift.abs() <= 1.0 {
                        t += shift * h;
                        y -= 0.125 * (yp - ym).powi(2) / curv;
                    }
                }
            }
            out.push((t, y));
        }
        start = end;
        k += 1;
    }
    Ok(out)
}

/// Exponential decay rate of the Bloch-oscillation extrema.
pub fn fit_decay(record: &EvolutionRecord) -> Result<DecayFit> {
    fit_decay_series(&record.times, &record.momentum, record.params.f)
}

pub fn fit_decay_series(times: &[f64], p: &[f64], f: f64) -> Result<DecayFit> {
    let ext: Vec<(f64, f64)> = half_period_extrema(times, p, f)?.into_iter().filter(|e| e.1 > 0.0).collect();
    if ext.len() < 4 {
        return Err(Error::InsufficientData(format!("decay fit needs 4 extrema, found {}", ext.len())));
    }
    let n = ext.len() as f64;
    let mt = ext.iter().map(|e| e.0).sum::<f64>() / n;
    let my = ext.iter().map(|e| e.1.ln()).sum::<f64>() / n;
    let sxx: f64 = ext.iter().map(|e| (e.0 - mt).powi(2)).sum();
    let sxy: f64 = ext.iter().map(|e| (e.0 - mt) * (e.1.ln() - my)).sum();
    let slope = sxy / sxx;
    let residual =
        (ext.iter().map(|e| (e.1.ln() - (my + slope * (e.0 - mt))).powi(2)).sum::<f64>() / n).sqrt();
    Ok(DecayFit { gamma: -slope, residual, window: (ext[0].0, ext[ext.len() - 1].0), extrema: ext.len() })
}

/// Collapse-and-revival form −J exp(−2n̄(1 − cos Ut)) sin(Ft).
pub fn revival_envelope(t: f64, nbar: f64, u: f64, j: f64, f: f64) -> f64 {
    -j * (-2.0 * nbar * (1.0 - (u * t).cos())).exp() * (f * t).sin()
}
