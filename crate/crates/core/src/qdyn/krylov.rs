//! Lanczos machinery shared by the ground-state solver and the propagator.

use faer::{Mat, Side};
use num_complex::Complex64;

use crate::error::{Error, Result};

pub(crate) type C = Complex64;

pub(crate) fn dot(a: &[C], b: &[C]) -> C {
    a.iter().zip(b).map(|(x, y)| x.conj() * y).sum()
}

pub(crate) fn norm(a: &[C]) -> f64 {
    a.iter().map(|x| x.norm_sqr()).sum::<f64>().sqrt()
}

/// Orthonormal Lanczos basis with the tridiagonal projection.
struct Lanczos {
    q: Vec<Vec<C>>,
    alpha: Vec<f64>,
    beta: Vec<f64>,
}

impl Lanczos {
    fn start(v: &[C]) -> Self {
        let nv = norm(v);
        Self { q: vec![v.iter().map(|x| x / nv).collect()], alpha: Vec::new(), beta: Vec::new() }
    }

    /// One step with full reorthogonalization (optionally also against
    /// `deflate`). Returns false once the space is invariant.
    fn extend(&mut self, apply: &mut impl FnMut(&[C], &mut [C]), deflate: &[Vec<C>]) -> bool {
        let k = self.q.len() - 1;
        let mut w = vec![C::new(0.0, 0.0); self.q[k].len()];
        apply(&self.q[k], &mut w);
        self.alpha.push(dot(&self.q[k], &w).re);
        for _ in 0..2 {
            for v in self.q.iter().chain(deflate) {
                let c = dot(v, &w);
                for (wi, vi) in w.iter_mut().zip(v) {
                    *wi -= c * vi;
                }
            }
        }
        let b = norm(&w);
        let scale = self.alpha.iter().fold(1e-300f64, |m, a| m.max(a.abs())).max(self.beta.last().copied().unwrap_or(0.0));
        if b <= 1e-13 * scale {
            return false;
        }
        self.beta.push(b);
        self.q.push(w.into_iter().map(|x| x / b).collect());
        true
    }

    /// Eigen-decomposition of the m×m tridiagonal block.
    fn ritz(&self) -> Result<(Vec<f64>, Mat<f64>)> {
        let m = self.alpha.len();
        let t = Mat::from_fn(m, m, |i, j| {
            if i == j {
                self.alpha[i]
            } else if i + 1 == j || j + 1 == i {
                self.beta[i.min(j)]
            } else {
                0.0
            }
        });
        let evd = t.self_adjoint_eigen(Side::Lower).map_err(|e| Error::Eigensolver(format!("{e:?}")))?;
        let s = evd.S().column_vector();
        Ok(((0..m).map(|i| s[i]).collect(), evd.U().to_owned()))
    }

    fn combine(&self, y: impl Fn(usize) -> C) -> Vec<C> {
        let mut out = vec![C::new(0.0, 0.0); self.q[0].len()];
        for (k, qk) in self.q.iter().take(self.alpha.len()).enumerate() {
            let c = y(k);
            for (o, x) in out.iter_mut().zip(qk) {
                *o += c * x;
            }
        }
        out
    }
}

/// Lowest eigenpair of the operator restricted to the complement of
/// `deflate`, by explicitly restarted Lanczos.
pub(crate) fn lowest_eigenpair(
    apply: &mut impl FnMut(&[C], &mut [C]),
    start: Vec<C>,
    deflate: &[Vec<C>],
    scale: f64,
) -> Result<(f64, Vec<C>)> {
    let dim = start.len();
    let mut v = start;
    for d in deflate {
        let c = dot(d, &v);
        for (vi, di) in v.iter_mut().zip(d) {
            *vi -= c * di;
        }
    }
    let m_max = dim.saturating_sub(deflate.len()).clamp(1, 120);
    let tol = 1e-11 * scale.max(1e-300);
    for _ in 0..200 {
        let mut lz = Lanczos::start(&v);
        while lz.alpha.len() < m_max {
            if !lz.extend(apply, deflate) {
                break;
            }
        }
        let (theta, y) = lz.ritz()?;
        let m = lz.alpha.len();
        let x = lz.combine(|k| C::new(y[(k, 0)], 0.0));
        // residual of the Ritz pair, computed directly
        let mut hx = vec![C::new(0.0, 0.0); dim];
        apply(&x, &mut hx);
        let r = hx.iter().zip(&x).map(|(a, b)| (a - theta[0] * b).norm_sqr()).sum::<f64>().sqrt();
        if r <= tol || m < m_max {
            let nx = norm(&x);
            return Ok((theta[0], x.into_iter().map(|c| c / nx).collect()));
        }
        v = x;
    }
    Err(Error::Eigensolver("Lanczos ground-state search did not converge".into()))
}

/// exp(−i τ H) v by a Lanczos projection grown until the a-posteriori
/// error estimate drops below `tol`.
pub(crate) fn expm_action(
    apply: &mut impl FnMut(&[C], &mut [C]),
    v: &[C],
    tau: f64,
    tol: f64,
    max_dim: usize,
) -> Result<(Vec<C>, usize)> {
    let nv = norm(v);
    if nv == 0.0 {
        return Ok((v.to_vec(), 0));
    }
    let mut lz = Lanczos::start(v);
    loop {
        let invariant = !lz.extend(apply, &[]);
        let m = lz.alpha.len();
        if invariant || m >= 3 || m == max_dim {
            let (theta, y) = lz.ritz()?;
            // c = exp(−iτT) e₁ in the Lanczos basis
            let coeff: Vec<C> = (0..m)
                .map(|k| (0..m).map(|j| y[(k, j)] * y[(0, j)] * C::from_polar(1.0, -tau * theta[j])).sum())
                .collect();
            let err = if invariant { 0.0 } else { lz.beta[m - 1] * coeff[m - 1].norm() };
            if err <= tol {
                let out = lz.combine(|k| coeff[k] * nv);
                return Ok((out, m));
            }
            if m >= max_dim {
                return Err(Error::Integrator(format!(
                    "Krylov space of dimension {max_dim} missed tolerance {tol:.1e} (estimate {err:.1e}); reduce dt"
                )));
            }
        }
    }
}
