use std::f64::consts::PI;
use std::sync::Arc;

use num_complex::Complex64;
use rand::Rng;
use rustfft::{Fft, FftPlanner};
use serde::{Deserialize, Serialize};

use super::field::{energy, momentum, norm_sqr, ClassicalField};
use crate::error::{Error, Result};
use crate::rng::stream_rng;

/// Composition used for one step of the split-step integrator.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "kebab-case")]
pub enum Splitting {
    /// Half nonlinear, full hop, half nonlinear (second order).
    Strang,
    /// Triple-jump composition of Strang steps (fourth order).
    #[default]
    Yoshida4,
}

/// Split-step propagator for
/// i dψ_l/dt = −(J/2)(ψ_{l−1}e^{iFt} + ψ_{l+1}e^{−iFt}) + Λ|ψ_l|²ψ_l.
///
/// The hop is diagonal in the Fourier modes ψ_l ∝ e^{iκl}, with energy
/// −J cos(κ − Ft); it is applied exactly over each substep. The on-site
/// phase rotation is exact as well, so each substep is norm preserving.
pub(crate) struct SplitStep {
    lambda: f64,
    j: f64,
    f: f64,
    kappa: Vec<f64>,
    fwd: Arc<dyn Fft<f64>>,
    inv: Arc<dyn Fft<f64>>,
    scratch: Vec<Complex64>,
    phases: Vec<Complex64>,
    splitting: Splitting,
}

impl SplitStep {
    pub(crate) fn new(l: usize, lambda: f64, j: f64, f: f64, splitting: Splitting) -> Self {
        let mut planner = FftPlanner::new();
        let fwd = planner.plan_fft_forward(l);
        let inv = planner.plan_fft_inverse(l);
        let scratch_len = fwd.get_inplace_scratch_len().max(inv.get_inplace_scratch_len());
        Self {
            lambda,
            j,
            f,
            kappa: (0..l).map(|k| 2.0 * PI * k as f64 / l as f64).collect(),
            fwd,
            inv,
            scratch: vec![Complex64::new(0.0, 0.0); scratch_len],
            phases: vec![Complex64::new(0.0, 0.0); l],
            splitting,
        }
    }

    // exp(i∫_t^{t+τ} J cos(κ − Fs) ds) per mode, with the integral written
    // as τ cos(κ − F t_mid) sinc(Fτ/2) to stay accurate for small F.
    fn set_phases(&mut self, t: f64, tau: f64) {
        let x = 0.5 * self.f * tau;
        let sinc = if x.abs() < 1e-8 { 1.0 - x * x / 6.0 } else { x.sin() / x };
        let mid = t + 0.5 * tau;
        let scale = 1.0 / self.kappa.len() as f64;
        for (p, k) in self.phases.iter_mut().zip(&self.kappa) {
            *p = Complex64::from_polar(scale, self.j * tau * (k - self.f * mid).cos() * sinc);
        }
    }

    fn apply_phases(&mut self, x: &mut [Complex64]) {
        self.fwd.process_with_scratch(x, &mut self.scratch);
        for (c, p) in x.iter_mut().zip(&self.phases) {
            *c *= p;
        }
        self.inv.process_with_scratch(x, &mut self.scratch);
    }

    fn nonlinear(&self, psi: &mut [Complex64], delta: Option<&mut [Complex64]>, tau: f64) {
        let lt = self.lambda * tau;
        match delta {
            None => {
                for c in psi.iter_mut() {
                    *c *= Complex64::from_polar(1.0, -lt * c.norm_sqr());
                }
            }
            Some(d) => {
                // δψ' = e^{−iΛ|ψ|²τ}(δψ − 2iΛτ ψ Re(ψ*δψ))
                for (c, dc) in psi.iter_mut().zip(d.iter_mut()) {
                    let rot = Complex64::from_polar(1.0, -lt * c.norm_sqr());
                    let dn = (c.conj() * *dc).re;
                    *dc = rot * (*dc - Complex64::new(0.0, 2.0 * lt * dn) * *c);
                    *c *= rot;
                }
            }
        }
    }

    fn strang(&mut self, psi: &mut [Complex64], mut delta: Option<&mut [Complex64]>, t: f64, tau: f64) {
        self.nonlinear(psi, delta.as_deref_mut(), 0.5 * tau);
        self.set_phases(t, tau);
        self.apply_phases(psi);
        if let Some(d) = delta.as_deref_mut() {
            self.apply_phases(d);
        }
        self.nonlinear(psi, delta, 0.5 * tau);
    }

    /// Advance from t to t + dt.
    pub(crate) fn step(&mut self, psi: &mut [Complex64], mut delta: Option<&mut [Complex64]>, t: f64, dt: f64) {
        match self.splitting {
            Splitting::Strang => self.strang(psi, delta, t, dt),
            Splitting::Yoshida4 => {
                let w1 = 1.0 / (2.0 - 2f64.cbrt());
                let w0 = 1.0 - 2.0 * w1;
                self.strang(psi, delta.as_deref_mut(), t, w1 * dt);
                self.strang(psi, delta.as_deref_mut(), t + w1 * dt, w0 * dt);
                self.strang(psi, delta, t + (w1 + w0) * dt, w1 * dt);
            }
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct IntegrateOptions {
    pub dt: f64,
    pub t0: f64,
    pub sample_every: usize,
    pub splitting: Splitting,
    /// Store the field at every sample.
    pub keep_fields: bool,
    /// Propagate a tangent vector and report the largest Lyapunov exponent.
    pub track_lyapunov: bool,
    /// Steps between tangent renormalizations.
    pub renormalize_every: usize,
}

impl IntegrateOptions {
    pub fn new(dt: f64) -> Self {
        Self {
            dt,
            t0: 0.0,
            sample_every: 1,
            splitting: Splitting::Yoshida4,
            keep_fields: false,
            track_lyapunov: false,
            renormalize_every: 10,
        }
    }

    pub fn sample_every(mut self, n: usize) -> Self {
        self.sample_every = n.max(1);
        self
    }

    pub fn splitting(mut self, s: Splitting) -> Self {
        self.splitting = s;
        self
    }

    pub fn keep_fields(mut self) -> Self {
        self.keep_fields = true;
        self
    }

    pub fn starting_at(mut self, t0: f64) -> Self {
        self.t0 = t0;
        self
    }
}

/// min(0.01/J, T_B/500).
pub fn default_classical_dt(j: f64, f: f64) -> f64 {
    let base = 0.01 / j.abs().max(1e-300);
    if f != 0.0 {
        base.min(2.0 * PI / f.abs() / 500.0)
    } else {
        base
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct TrajectoryResult {
    pub times: Vec<f64>,
    #[serde(skip)]
    pub fields: Option<Vec<Vec<Complex64>>>,
    pub energy: Vec<f64>,
    pub momentum: Vec<f64>,
    pub lyapunov_max: Option<f64>,
    /// Largest |‖ψ‖² − 1| over the samples.
    pub norm_drift: f64,
    /// Largest relative energy change over the samples (F = 0 only).
    pub energy_drift: Option<f64>,
    pub dt: f64,
    pub steps: usize,
    #[serde(skip)]
    pub final_field: ClassicalField,
}

const NORM_TOL: f64 = 1e-9;
const ENERGY_TOL: f64 = 1e-8;

/// Integrate the mean-field equation from `field` over [t0, t0 + t_max].
pub fn integrate(field: &ClassicalField, j: f64, f: f64, t_max: f64, opts: IntegrateOptions) -> Result<TrajectoryResult> {
    if !(opts.dt > 0.0) || !(t_max >= 0.0) || !t_max.is_finite() {
        return Err(Error::Domain(format!("need dt > 0 and finite t_max >= 0, got dt={} t_max={t_max}", opts.dt)));
    }
    if !j.is_finite() || !f.is_finite() {
        return Err(Error::Domain(format!("J and F must be finite, got J={j} F={f}")));
    }
    let steps = ((t_max / opts.dt) - 1e-9).ceil().max(0.0) as usize;
    let dt = if steps > 0 { t_max / steps as f64 } else { opts.dt };
    let l = field.sites();
    let mut prop = SplitStep::new(l, field.lambda, j, f, opts.splitting);
    let mut psi = field.psi.clone();
    let mut delta = opts.track_lyapunov.then(|| initial_tangent(l));
    let mut log_growth = 0.0;

    let e0 = energy(&psi, field.lambda, j, f, opts.t0);
    // relative to |E₀|, floored so that E₀ ≈ 0 does not blow up the ratio
    let e_scale = e0.abs().max(1e-3 * (j.abs() + field.lambda.abs()));
    let mut rec = TrajectoryResult {
        times: Vec::new(),
        fields: opts.keep_fields.then(Vec::new),
        energy: Vec::new(),
        momentum: Vec::new(),
        lyapunov_max: None,
        norm_drift: 0.0,
        energy_drift: (f == 0.0).then_some(0.0),
        dt,
        steps,
        final_field: field.clone(),
    };
    let sample = |rec: &mut TrajectoryResult, psi: &[Complex64], t: f64| -> Result<()> {
        let e = energy(psi, field.lambda, j, f, t);
        rec.times.push(t);
        rec.energy.push(e);
        rec.momentum.push(momentum(psi, j, f, t));
        if let Some(fs) = rec.fields.as_mut() {
            fs.push(psi.to_vec());
        }
        rec.norm_drift = rec.norm_drift.max((norm_sqr(psi) - 1.0).abs());
        if rec.norm_drift > 10.0 * NORM_TOL {
            return Err(Error::Integrator(format!("norm drift {:.2e} at t={t:.4}", rec.norm_drift)));
        }
        if let Some(d) = rec.energy_drift.as_mut() {
            *d = d.max((e - e0).abs() / e_scale);
            if *d > 10.0 * ENERGY_TOL {
                return Err(Error::Integrator(format!("relative energy drift {d:.2e} at t={t:.4}; reduce dt below {dt}")));
            }
        }
        Ok(())
    };
    sample(&mut rec, &psi, opts.t0)?;
    for step in 0..steps {
        let t = opts.t0 + step as f64 * dt;
        prop.step(&mut psi, delta.as_deref_mut(), t, dt);
        let done = step + 1;
        if let Some(d) = delta.as_mut() {
            if done % opts.renormalize_every.max(1) == 0 || done == steps {
                let nrm = norm_sqr(d).sqrt();
                log_growth += nrm.ln();
                d.iter_mut().for_each(|c| *c /= nrm);
            }
        }
        if done % opts.sample_every == 0 || done == steps {
            sample(&mut rec, &psi, opts.t0 + done as f64 * dt)?;
        }
    }
    if opts.track_lyapunov {
        let elapsed = steps as f64 * dt;
        rec.lyapunov_max = Some(if elapsed > 0.0 { (log_growth / elapsed).max(0.0) } else { 0.0 });
    }
    rec.final_field = ClassicalField { psi, lambda: field.lambda };
    Ok(rec)
}

fn initial_tangent(l: usize) -> Vec<Complex64> {
    let mut rng = stream_rng(0x0074_616e_6765_6e74, 0);
    let v: Vec<Complex64> = (0..l).map(|_| Complex64::new(rng.random::<f64>() - 0.5, rng.random::<f64>() - 0.5)).collect();
    let nrm = norm_sqr(&v).sqrt();
    v.into_iter().map(|c| c / nrm).collect()
}

/// Largest Lyapunov exponent from tangent-vector propagation of the split
/// step map. `t_max` should span at least a hundred hopping times 1/J.
pub fn lyapunov_max(field: &ClassicalField, j: f64, f: f64, t_max: f64) -> Result<f64> {
    let mut opts = IntegrateOptions::new(default_classical_dt(j, f)).sample_every(usize::MAX);
    opts.track_lyapunov = true;
    Ok(integrate(field, j, f, t_max, opts)?.lyapunov_max.unwrap_or(0.0))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn plane_wave_dispersion() {
        let l = 6;
        for k in 0..l {
            let start = ClassicalField::plane_wave(l, k, 0.0);
            let rec = integrate(&start, 1.0, 0.0, 3.0, IntegrateOptions::new(0.01).keep_fields()).unwrap();
            let kappa = 2.0 * PI * k as f64 / l as f64;
            let last = rec.fields.as_ref().unwrap().last().unwrap();
            for (a, b) in last.iter().zip(&start.psi) {
                // phase advances at rate J cos κ
                let expect = b * Complex64::from_polar(1.0, 3.0 * kappa.cos());
                assert!((a - expect).norm() < 1e-12, "k={k}");
            }
        }
    }

    #[test]
    fn uniform_state_is_stationary() {
        let start = ClassicalField::uniform(5, 2.0);
        let rec = integrate(&start, 1.0, 0.0, 50.0, IntegrateOptions::new(0.01).keep_fields().sample_every(100)).unwrap();
        for fld in rec.fields.unwrap() {
            assert!(fld.iter().all(|c| (c.norm() - 1.0 / 5f64.sqrt()).abs() < 1e-12));
        }
    }

    #[test]
    fn uniform_start_oscillates() {
        for lambda in [0.0, 0.5, 3.0] {
            let start = ClassicalField::uniform(5, lambda);
            let rec = integrate(&start, 1.0, 0.7, 20.0, IntegrateOptions::new(0.005)).unwrap();
            for (t, p) in rec.times.iter().zip(&rec.momentum) {
                assert!((p + (0.7 * t).sin()).abs() < 1e-6, "Λ={lambda} t={t}");
            }
        }
    }

    #[test]
    fn norm_and_energy_contracts() {
        let psi: Vec<Complex64> = (0..5).map(|l| Complex64::from_polar(1.0 + 0.3 * l as f64, 0.7 * (l * l) as f64)).collect();
        let nrm = norm_sqr(&psi).sqrt();
        let start = ClassicalField::new(psi.into_iter().map(|c| c / nrm).collect(), 2.0).unwrap();
        let rec = integrate(&start, 1.0, 0.0, 1000.0, IntegrateOptions::new(0.005).sample_every(50)).unwrap();
        assert!(rec.norm_drift < 1e-9, "{}", rec.norm_drift);
        assert!(rec.energy_drift.unwrap() < 1e-8, "{:?}", rec.energy_drift);
        // Strang at the same step misses the energy contract and says so
        let strang = integrate(&start, 1.0, 0.0, 1000.0, IntegrateOptions::new(0.005).splitting(Splitting::Strang));
        assert!(matches!(strang, Err(Error::Integrator(_))));
    }

    #[test]
    fn yoshida_is_fourth_order() {
        let psi: Vec<Complex64> = (0..4).map(|l| Complex64::from_polar(1.0, 1.3 * l as f64) * (1.0 + 0.2 * l as f64)).collect();
        let nrm = norm_sqr(&psi).sqrt();
        let start = ClassicalField::new(psi.into_iter().map(|c| c / nrm).collect(), 3.0).unwrap();
        let run = |dt: f64, s| {
            integrate(&start, 1.0, 0.4, 2.0, IntegrateOptions::new(dt).splitting(s)).unwrap().final_field.psi
        };
        let reference = run(1e-4, Splitting::Yoshida4);
        let err = |dt, s| run(dt, s).iter().zip(&reference).map(|(a, b)| (a - b).norm()).fold(0.0, f64::max);
        let strang = err(0.02, Splitting::Strang) / err(0.01, Splitting::Strang);
        let yoshida = err(0.04, Splitting::Yoshida4) / err(0.02, Splitting::Yoshida4);
        assert!((3.5..4.5).contains(&strang), "{strang}");
        assert!((13.0..19.0).contains(&yoshida), "{yoshida}");
    }

    #[test]
    fn global_phase_covariance() {
        let psi: Vec<Complex64> = (0..3).map(|l| Complex64::from_polar(1.0, 0.9 * l as f64) * (1.0 + 0.5 * l as f64)).collect();
        let nrm = norm_sqr(&psi).sqrt();
        let a = ClassicalField::new(psi.into_iter().map(|c| c / nrm).collect(), 4.0).unwrap();
        let b = a.with_global_phase(1.234);
        let opts = IntegrateOptions::new(0.01).keep_fields().sample_every(10);
        let ra = integrate(&a, 1.0, 0.3, 30.0, opts).unwrap();
        let rb = integrate(&b, 1.0, 0.3, 30.0, opts).unwrap();
        for (pa, pb) in ra.momentum.iter().zip(&rb.momentum) {
            assert!((pa - pb).abs() < 1e-9);
        }
        for (fa, fb) in ra.fields.unwrap().iter().zip(rb.fields.unwrap().iter()) {
            for (x, y) in fa.iter().zip(fb) {
                assert!((x.norm() - y.norm()).abs() < 1e-9);
            }
        }
    }

    #[test]
    fn linear_lattice_has_no_exponent() {
        let psi: Vec<Complex64> = (0..3).map(|l| Complex64::from_polar(1.0, 2.0 * l as f64) * (1.0 + l as f64)).collect();
        let nrm = norm_sqr(&psi).sqrt();
        let start = ClassicalField::new(psi.into_iter().map(|c| c / nrm).collect(), 0.0).unwrap();
        assert!(lyapunov_max(&start, 1.0, 0.0, 500.0).unwrap() < 1e-3);
    }

    #[test]
    fn rejects_bad_step() {
        let start = ClassicalField::uniform(3, 0.0);
        assert!(matches!(integrate(&start, 1.0, 0.0, 1.0, IntegrateOptions::new(0.0)), Err(Error::Domain(_))));
    }
}
