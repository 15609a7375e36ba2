use std::f64::consts::PI;

use faer::Mat;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::field::ClassicalField;
use crate::error::{Error, Result};

/// ψ_l(t) = L^{−1/2} exp(i(J/F) sin(Ft) − i g t), the Bloch-oscillating
/// uniform solution; its Λ is g·L.
pub fn periodic_solution(t: f64, j: f64, f: f64, g: f64, l: usize) -> Result<ClassicalField> {
    if f == 0.0 {
        return Err(Error::Domain("the periodic solution needs F != 0".into()));
    }
    if l == 0 {
        return Err(Error::Domain("ring needs at least one site".into()));
    }
    let phase = j / f * (f * t).sin() - g * t;
    let a = Complex64::from_polar(1.0 / (l as f64).sqrt(), phase);
    Ok(ClassicalField { psi: vec![a; l], lambda: g * l as f64 })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Stability {
    Stable,
    Unstable,
}

#[derive(Debug, Clone, Serialize)]
pub struct MonodromyResult {
    pub multipliers: Vec<Complex64>,
    /// max ln|λ| / T_B.
    pub max_exponent: f64,
    pub classification: Stability,
    pub period: f64,
    /// Tolerance on max|λ| − 1 used for the classification.
    pub tol_m: f64,
    /// Largest distance from a multiplier's 1/λ* to its nearest partner.
    pub pairing_error: f64,
    /// Π λ, which is 1 for the exact flow.
    pub determinant: f64,
}

/// Floquet multipliers of the linearization about [`periodic_solution`].
///
/// With δψ = e^{iφ(t)}η, where φ is the phase of the periodic solution, the
/// perturbation obeys the T_B-periodic real-linear system
/// i dη_l/dt = −(J/2)(η_{l−1}e^{iFt} + η_{l+1}e^{−iFt}) + (J cos Ft + g)η_l + g η*_l,
/// integrated here for the 2L real unit initial conditions with RK4.
pub fn monodromy(j: f64, g: f64, f: f64, l: usize) -> Result<MonodromyResult> {
    monodromy_with_tolerance(j, g, f, l, 1e-6)
}

pub fn monodromy_with_tolerance(j: f64, g: f64, f: f64, l: usize, tol_m: f64) -> Result<MonodromyResult> {
    if f == 0.0 {
        return Err(Error::Domain("monodromy needs F != 0".into()));
    }
    if l < 3 {
        return Err(Error::Domain(format!("monodromy needs L >= 3, got {l}")));
    }
    if !(j.is_finite() && g.is_finite()) {
        return Err(Error::Domain(format!("J and g must be finite, got J={j} g={g}")));
    }
    let period = 2.0 * PI / f.abs();
    let steps = (period / 0.005f64.min(period / 2000.0)).ceil() as usize;
    let h = period / steps as f64;
    let dim = 2 * l;

    // column c starts as the real unit vector e_c of (Re η, Im η)
    let mut cols: Vec<Vec<Complex64>> = (0..dim)
        .map(|c| {
            let mut v = vec![Complex64::new(0.0, 0.0); l];
            v[c % l] = if c < l { Complex64::new(1.0, 0.0) } else { Complex64::new(0.0, 1.0) };
            v
        })
        .collect();
    let rhs = |t: f64, x: &[Complex64], out: &mut [Complex64]| {
        let fwd = Complex64::from_polar(0.5 * j, f * t);
        let diag = j * (f * t).cos() + g;
        for s in 0..l {
            let hop = -(fwd * x[(s + l - 1) % l] + fwd.conj() * x[(s + 1) % l]);
            let v = hop + diag * x[s] + g * x[s].conj();
            // dη/dt = −i v
            out[s] = Complex64::new(v.im, -v.re);
        }
    };
    let mut k = [vec![Complex64::new(0.0, 0.0); l], vec![Complex64::new(0.0, 0.0); l], vec![Complex64::new(0.0, 0.0); l], vec![Complex64::new(0.0, 0.0); l]];
    let mut tmp = vec![Complex64::new(0.0, 0.0); l];
    for step in 0..steps {
        let t = step as f64 * h;
        for x in cols.iter_mut() {
            rhs(t, x, &mut k[0]);
            for s in 0..l {
                tmp[s] = x[s] + 0.5 * h * k[0][s];
            }
            rhs(t + 0.5 * h, &tmp, &mut k[1]);
            for s in 0..l {
                tmp[s] = x[s] + 0.5 * h * k[1][s];
            }
            rhs(t + 0.5 * h, &tmp, &mut k[2]);
            for s in 0..l {
                tmp[s] = x[s] + h * k[2][s];
            }
            rhs(t + h, &tmp, &mut k[3]);
            for s in 0..l {
                x[s] += h / 6.0 * (k[0][s] + 2.0 * k[1][s] + 2.0 * k[2][s] + k[3][s]);
            }
        }
        if cols.iter().any(|x| x.iter().any(|c| !c.is_finite())) {
            return Err(Error::Integrator(format!("linearized flow diverged at t={t:.4}")));
        }
    }
    let m = Mat::from_fn(dim, dim, |r, c| if r < l { cols[c][r].re } else { cols[c][r - l].im });
    let multipliers: Vec<Complex64> = m
        .eigenvalues()
        .map_err(|e| Error::Eigensolver(format!("monodromy eigenvalues: {e:?}")))?
        .into_iter()
        .map(|z| Complex64::new(z.re, z.im))
        .collect();
    let max_abs = multipliers.iter().map(|z| z.norm()).fold(0.0, f64::max);
    let pairing_error = multipliers
        .iter()
        .map(|z| {
            let partner = 1.0 / z.conj();
            multipliers.iter().map(|w| (w - partner).norm() / partner.norm().max(1.0)).fold(f64::INFINITY, f64::min)
        })
        .fold(0.0, f64::max);
    let determinant = multipliers.iter().product::<Complex64>().re;
    Ok(MonodromyResult {
        max_exponent: max_abs.ln() / period,
        classification: if max_abs <= 1.0 + tol_m { Stability::Stable } else { Stability::Unstable },
        period,
        tol_m,
        pairing_error,
        determinant,
        multipliers,
    })
}

/// Piecewise critical field: 3g applies for F < 2J, √(10gJ) for F > 2J.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CriticalField {
    pub weak: f64,
    pub strong: f64,
    /// Field separating the two branches, 2J.
    pub crossover: f64,
}

pub fn critical_field(j: f64, g: f64) -> Result<CriticalField> {
    if !(j > 0.0) || !(g >= 0.0) {
        return Err(Error::Domain(format!("need J > 0 and g >= 0, got J={j} g={g}")));
    }
    Ok(CriticalField { weak: 3.0 * g, strong: (10.0 * g * j).sqrt(), crossover: 2.0 * j })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn periodic_solution_values() {
        let f0 = periodic_solution(0.0, 1.0, 0.5, 0.1, 4).unwrap();
        assert!(f0.psi.iter().all(|c| (c - Complex64::new(0.5, 0.0)).norm() < 1e-15));
        assert!((f0.lambda - 0.4).abs() < 1e-15);
        for t in [0.3, 1.7, 9.0] {
            let p = periodic_solution(t, 1.0, 0.5, 0.1, 4).unwrap().momentum(1.0, 0.5, t);
            assert!((p + (0.5 * t).sin()).abs() < 1e-14);
        }
        assert!(matches!(periodic_solution(1.0, 1.0, 0.0, 0.1, 4), Err(Error::Domain(_))));
    }

    #[test]
    fn periodic_solution_residual() {
        // i dψ/dt against the right-hand side, by central differences
        let (j, f, g, l) = (1.0, 0.7, 0.3, 5);
        let lambda = g * l as f64;
        for t in [0.4, 2.0, 7.5] {
            let h = 1e-5;
            let a = periodic_solution(t - h, j, f, g, l).unwrap().psi;
            let b = periodic_solution(t + h, j, f, g, l).unwrap().psi;
            let x = periodic_solution(t, j, f, g, l).unwrap().psi;
            for s in 0..l {
                let lhs = Complex64::new(0.0, 1.0) * (b[s] - a[s]) / (2.0 * h);
                let fwd = Complex64::from_polar(1.0, f * t);
                let rhs = -0.5 * j * (x[(s + l - 1) % l] * fwd + x[(s + 1) % l] * fwd.conj()) + lambda * x[s].norm_sqr() * x[s];
                assert!((lhs - rhs).norm() < 1e-9);
            }
        }
    }

    #[test]
    fn linear_lattice_is_stable() {
        let r = monodromy(1.0, 0.0, 0.4, 6).unwrap();
        assert_eq!(r.classification, Stability::Stable);
        assert!(r.multipliers.iter().all(|z| (z.norm() - 1.0).abs() < 1e-8));
        assert!(r.pairing_error < 1e-6 && (r.determinant - 1.0).abs() < 1e-6);
    }

    #[test]
    fn weak_and_strong_field() {
        let weak = monodromy(1.0, 0.1, 0.05, 32).unwrap();
        assert_eq!(weak.classification, Stability::Unstable);
        assert!(weak.max_exponent > 0.0);
        let strong = monodromy(1.0, 0.1, 10.0, 32).unwrap();
        assert_eq!(strong.classification, Stability::Stable);
        for r in [&weak, &strong] {
            assert!((r.determinant - 1.0).abs() < 1e-6, "{}", r.determinant);
        }
        assert!(strong.pairing_error < 1e-6);
    }

    #[test]
    fn critical_field_formulas() {
        assert_eq!(critical_field(1.0, 0.0).unwrap(), CriticalField { weak: 0.0, strong: 0.0, crossover: 2.0 });
        let c = critical_field(1.0, 0.1).unwrap();
        assert!((c.weak - 0.3).abs() < 1e-15 && (c.strong - 1.0).abs() < 1e-15);
        let c4 = critical_field(1.0, 0.4).unwrap();
        assert!((c4.weak / c.weak - 4.0).abs() < 1e-12 && (c4.strong / c.strong - 2.0).abs() < 1e-12);
        assert!(critical_field(0.0, 0.1).is_err());
    }
}
