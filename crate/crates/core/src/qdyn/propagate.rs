use std::f64::consts::PI;

use num_complex::Complex64;
use serde::Serialize;

use super::krylov::{expm_action, norm};
use super::observables::{linear_entropy, momentum_from_hopping, OpdmTables};
use super::state::StateVector;
use crate::error::{Error, Result};
use crate::fock::BasisSet;
use crate::hamiltonian::{diagonal_energies, hopping_operator, CsrMatrix, HamiltonianSpec};

/// Ĥ(t) = −(J/2)(e^{i(θ+Ft)} K + h.c.) + D on the periodic ring, with the
/// static field moved into a time-dependent hopping phase.
#[derive(Debug, Clone)]
pub struct TiltedHamiltonian {
    k: CsrMatrix,
    k_adj: CsrMatrix,
    diag: Vec<f64>,
    j: f64,
    f: f64,
    theta: f64,
}

impl TiltedHamiltonian {
    pub fn new(spec: &HamiltonianSpec, basis: &BasisSet) -> Result<Self> {
        spec.validate()?;
        if spec.n != basis.particles() || spec.l != basis.modes() {
            return Err(Error::Dimension(format!(
                "spec for N={}, L={} on a basis for N={}, L={}",
                spec.n,
                spec.l,
                basis.particles(),
                basis.modes()
            )));
        }
        let k = hopping_operator(basis)?;
        let k_adj = k.adjoint();
        Ok(Self { k, k_adj, diag: diagonal_energies(spec, basis), j: spec.j, f: spec.f, theta: spec.theta })
    }

    pub fn dim(&self) -> usize {
        self.diag.len()
    }

    pub fn hopping(&self) -> &CsrMatrix {
        &self.k
    }

    pub fn apply(&self, t: f64, x: &[Complex64], y: &mut [Complex64]) {
        let phase = Complex64::from_polar(-0.5 * self.j, self.theta + self.f * t);
        for (yi, (xi, d)) in y.iter_mut().zip(x.iter().zip(&self.diag)) {
            *yi = xi * d;
        }
        for r in 0..self.dim() {
            let mut acc = Complex64::new(0.0, 0.0);
            for (c, v) in self.k.row(r) {
                acc += phase * v * x[c];
            }
            for (c, v) in self.k_adj.row(r) {
                acc += phase.conj() * v * x[c];
            }
            y[r] += acc;
        }
    }
}

/// Integration window and sampling for [`evolve`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct EvolveOptions {
    /// Start time; the protocol phase e^{iFt} is evaluated from here.
    pub t0: f64,
    /// Duration of the run.
    pub t_max: f64,
    pub dt: f64,
    pub sample_every: usize,
    pub keep_opdm: bool,
    /// Target error of each Krylov step.
    pub krylov_tol: f64,
}

impl EvolveOptions {
    pub fn new(t_max: f64, dt: f64) -> Self {
        Self { t0: 0.0, t_max, dt, sample_every: 1, keep_opdm: false, krylov_tol: 1e-12 }
    }

    pub fn sample_every(mut self, n: usize) -> Self {
        self.sample_every = n.max(1);
        self
    }

    pub fn starting_at(mut self, t0: f64) -> Self {
        self.t0 = t0;
        self
    }

    pub fn with_opdm(mut self) -> Self {
        self.keep_opdm = true;
        self
    }
}

/// min(T_B/500, 0.02/J), or 0.02/J without a field.
pub fn default_dt(j: f64, f: f64) -> f64 {
    let base = 0.02 / j.abs().max(1e-300);
    if f != 0.0 {
        base.min(2.0 * PI / f.abs() / 500.0)
    } else {
        base
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct EvolutionRecord {
    pub times: Vec<f64>,
    pub momentum: Vec<f64>,
    pub entropy: Vec<f64>,
    #[serde(skip)]
    pub opdm_snapshots: Option<Vec<Vec<Complex64>>>,
    pub params: HamiltonianSpec,
    /// Step actually used (t_max divided into whole steps).
    pub dt: f64,
    pub steps: usize,
    /// Largest |‖Ψ‖ − 1| seen at the samples.
    pub norm_drift: f64,
    pub max_krylov_dim: usize,
    #[serde(skip)]
    pub final_state: StateVector,
}

/// Propagate under Ĥ(t) with a midpoint-frozen Krylov exponential per step.
pub fn evolve(basis: &BasisSet, psi0: &StateVector, spec: &HamiltonianSpec, opts: EvolveOptions) -> Result<EvolutionRecord> {
    if !(opts.dt > 0.0) || !(opts.t_max >= 0.0) {
        return Err(Error::Domain(format!("need dt > 0 and t_max >= 0, got dt={} t_max={}", opts.dt, opts.t_max)));
    }
    if spec.f < 0.0 {
        return Err(Error::Domain(format!("static field must be non-negative, got {}", spec.f)));
    }
    if psi0.amplitudes.len() != basis.len() {
        return Err(Error::Dimension(format!("state of length {} on a basis of {}", psi0.amplitudes.len(), basis.len())));
    }
    let h = TiltedHamiltonian::new(spec, basis)?;
    let tables = OpdmTables::new(basis)?;
    let steps = ((opts.t_max / opts.dt) - 1e-9).ceil().max(0.0) as usize;
    let dt = if steps > 0 { opts.t_max / steps as f64 } else { opts.dt };

    let mut psi = psi0.amplitudes.clone();
    let mut rec = EvolutionRecord {
        times: Vec::new(),
        momentum: Vec::new(),
        entropy: Vec::new(),
        opdm_snapshots: opts.keep_opdm.then(Vec::new),
        params: spec.clone(),
        dt,
        steps,
        norm_drift: 0.0,
        max_krylov_dim: 0,
        final_state: psi0.clone(),
    };
    let n = basis.particles();
    let sample = |rec: &mut EvolutionRecord, psi: &[Complex64], t: f64| {
        let r = tables.opdm(psi);
        rec.times.push(t);
        rec.momentum.push(momentum_from_hopping(h.hopping(), psi, n, spec.j, spec.f, t));
        rec.entropy.push(linear_entropy(&r));
        if let Some(snaps) = rec.opdm_snapshots.as_mut() {
            snaps.push(r);
        }
        rec.norm_drift = rec.norm_drift.max((norm(psi) - 1.0).abs());
    };
    sample(&mut rec, &psi, opts.t0);
    for step in 0..steps {
        let t_mid = opts.t0 + (step as f64 + 0.5) * dt;
        let mut apply = |x: &[Complex64], y: &mut [Complex64]| h.apply(t_mid, x, y);
        let (next, m) = expm_action(&mut apply, &psi, dt, opts.krylov_tol, 60)?;
        psi = next;
        rec.max_krylov_dim = rec.max_krylov_dim.max(m);
        let done = step + 1;
        if done % opts.sample_every == 0 || done == steps {
            sample(&mut rec, &psi, opts.t0 + done as f64 * dt);
            if rec.norm_drift > 1e-6 {
                return Err(Error::Integrator(format!(
                    "norm drift {:.2e} at t={:.4}; use a smaller dt than {dt}",
                    rec.norm_drift,
                    opts.t0 + done as f64 * dt
                )));
            }
        }
    }
    rec.final_state = StateVector { amplitudes: psi, time: opts.t0 + steps as f64 * dt };
    Ok(rec)
}

/// Run forward over [0, T], then the conjugated state over [−T, 0]; returns
/// |⟨Ψ₀*|Ψ_back⟩|², which is 1 for exact dynamics.
pub fn time_reversal_fidelity(
    basis: &BasisSet,
    psi0: &StateVector,
    spec: &HamiltonianSpec,
    t_max: f64,
    dt: f64,
) -> Result<f64> {
    let fwd = evolve(basis, psi0, spec, EvolveOptions::new(t_max, dt).sample_every(usize::MAX))?;
    let back = evolve(
        basis,
        &fwd.final_state.conjugate(),
        spec,
        EvolveOptions::new(t_max, dt).starting_at(-t_max).sample_every(usize::MAX),
    )?;
    Ok(back.final_state.overlap(&psi0.conjugate()).norm_sqr())
}
