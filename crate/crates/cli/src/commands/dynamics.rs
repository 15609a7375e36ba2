//! bloch-quantum, bloch-classical and stability.

use bh_core::classical::{
    critical_field, default_classical_dt, ensemble_evolve, monodromy, sample_husimi_bec, IntegrateOptions, Stability,
};
use bh_core::io::Cell;
use bh_core::qdyn::{bec_state, default_dt, evolve, fit_decay_series, ground_state, EvolveOptions};
use bh_core::{build_hamiltonian, enumerate_basis, Representation};
use rayon::prelude::*;
use serde_json::{json, Value};

use crate::config::{Convention, Initial, Params, SplittingArg, TimeSpan};
use crate::error::CliError;
use crate::output::Run;

fn stability_name(s: Stability) -> &'static str {
    match s {
        Stability::Stable => "stable",
        Stability::Unstable => "unstable",
    }
}

/// --t-max, defaulting to 20 Bloch periods when there is a field.
fn duration(p: &mut Params, f: f64) -> Result<f64, CliError> {
    if p.t_max.is_none() && f == 0.0 {
        return Err(CliError::usage("--t-max is required without a field"));
    }
    p.t_max.get_or_insert(TimeSpan::Periods(20.0)).resolve(f)
}

fn positive(name: &str, x: f64) -> Result<f64, CliError> {
    if x > 0.0 && x.is_finite() {
        Ok(x)
    } else {
        Err(CliError::usage(format!("--{name} must be positive, got {x}")))
    }
}

/// Decay fit as JSON, or the reason it is unavailable.
fn decay(times: &[f64], p: &[f64], f: f64) -> Value {
    if f == 0.0 {
        return Value::Null;
    }
    match fit_decay_series(times, p, f) {
        Ok(fit) => json!(fit),
        Err(e) => json!({ "error": e.to_string() }),
    }
}

pub fn bloch_quantum(p: &mut Params, run: &mut Run) -> Result<(), CliError> {
    let spec = p.hamiltonian()?;
    let f = p.field();
    let t_max = duration(p, f)?;
    let dt = positive("dt", *p.dt.get_or_insert(default_dt(spec.j, f)))?;
    let every = *p.sample_every.get_or_insert(5);
    let basis = enumerate_basis(spec.n, spec.l, Representation::Site)?;
    let psi0 = match *p.initial.get_or_insert(Initial::Bec) {
        Initial::Bec => bec_state(&basis),
        Initial::Ground => ground_state(&build_hamiltonian(&spec, &basis)?)?.state,
    };
    println!("dimension {}, t_max {t_max:.4}, dt {dt:.3e}", basis.len());
    let rec = evolve(&basis, &psi0, &spec.with_field(f), EvolveOptions::new(t_max, dt).sample_every(every))?;
    run.csv(
        "",
        &["t", "p", "S"],
        rec.times
            .iter()
            .zip(&rec.momentum)
            .zip(&rec.entropy)
            .map(|((t, x), s)| [Cell::from(*t), Cell::from(*x), Cell::from(*s)]),
    )?;
    let fit = decay(&rec.times, &rec.momentum, f);
    if let Some(g) = fit.get("gamma").and_then(Value::as_f64) {
        println!("gamma {g:.6}");
    }
    run.result("decay_fit", fit)?;
    run.result("norm_drift", rec.norm_drift)?;
    run.result("dt_used", rec.dt)?;
    run.result("steps", rec.steps)?;
    run.result("samples", rec.times.len())?;
    run.result("max_krylov_dim", rec.max_krylov_dim)?;
    run.result("dimension", basis.len())
}

pub fn bloch_classical(p: &mut Params, run: &mut Run) -> Result<(), CliError> {
    let (j, u) = p.couplings()?;
    let (n, l) = (p.need_n()?, p.need_l()?);
    let f = p.field();
    let t_max = duration(p, f)?;
    let dt = positive("dt", *p.dt.get_or_insert(default_classical_dt(j, f)))?;
    let every = *p.sample_every.get_or_insert(10);
    let members = *p.members.get_or_insert(400);
    let convention = *p.convention.get_or_insert(Convention::MeanField);
    let splitting = *p.splitting.get_or_insert(SplittingArg::Yoshida4);
    let raw = *p.raw.get_or_insert(false);
    let seed = p.seed();
    let ensemble = sample_husimi_bec(n, l, members, seed)?.with_interaction(u, convention.into());
    let lambda = ensemble.members[0].lambda;
    println!("{members} members, Lambda {lambda:.6}, t_max {t_max:.4}, dt {dt:.3e}");
    let opts = IntegrateOptions::new(dt).sample_every(every).splitting(splitting.into());
    let rec = ensemble_evolve(&ensemble, j, f, t_max, opts)?;
    let factor = if raw || n == 0 { 1.0 } else { (f64::from(n) + l as f64) / f64::from(n) };
    let mean: Vec<f64> = rec.p_mean.iter().map(|x| x * factor).collect();
    run.csv(
        "",
        &["t", "p_mean", "p_stderr"],
        rec.times
            .iter()
            .zip(&mean)
            .zip(&rec.p_stderr)
            .map(|((t, m), s)| [Cell::from(*t), Cell::from(*m), Cell::from(s * factor)]),
    )?;
    let g = lambda / l as f64;
    let stability = if f != 0.0 && l >= 3 && g >= 0.0 && j > 0.0 {
        let m = monodromy(j, g, f.abs(), l)?;
        json!({"classification": stability_name(m.classification), "max_exponent": m.max_exponent})
    } else {
        Value::Null
    };
    run.result("lambda", lambda)?;
    run.result("g", g)?;
    run.result("critical_field", if j > 0.0 && g >= 0.0 { Some(critical_field(j, g)?) } else { None })?;
    run.result("periodic_orbit", stability)?;
    run.result("ordering_factor", factor)?;
    run.result("decay_fit", decay(&rec.times, &mean, f))?;
    run.result("members", rec.members)?;
    run.result("seed", seed)
}

pub fn stability(p: &mut Params, run: &mut Run) -> Result<(), CliError> {
    let l = p.need_l()?;
    let (j, g) = match p.g {
        Some(g) => (*p.j.get_or_insert(1.0), g),
        None => {
            let (j, u) = p.couplings()?;
            (j, u * f64::from(p.need_n()?) / l as f64)
        }
    };
    let fields: Vec<f64> = match p.f {
        Some(f) => vec![f],
        None => {
            let lo = positive("f-min", *p.f_min.get_or_insert(0.05))?;
            let hi = *p.f_max.get_or_insert(2.0);
            let points = *p.points.get_or_insert(40);
            if points < 2 || !(hi > lo) {
                return Err(CliError::usage("need --points >= 2 and --f-max > --f-min"));
            }
            (0..points).map(|i| lo + (hi - lo) * i as f64 / (points - 1) as f64).collect()
        }
    };
    let results: Vec<_> = fields.par_iter().map(|&f| monodromy(j, g, f, l)).collect::<Result<_, _>>()?;
    let modulus = |m: &bh_core::classical::MonodromyResult| m.multipliers.iter().map(|z| z.norm()).fold(0.0, f64::max);
    run.csv(
        "",
        &["F", "max_exponent", "max_modulus", "classification"],
        fields.iter().zip(&results).map(|(f, m)| {
            [Cell::from(*f), Cell::from(m.max_exponent), Cell::from(modulus(m)), Cell::Text(stability_name(m.classification))]
        }),
    )?;
    for (f, m) in fields.iter().zip(&results) {
        println!("F {f:.4}: {} (max exponent {:.3e})", stability_name(m.classification), m.max_exponent);
    }
    let changes: Vec<Value> = fields
        .windows(2)
        .zip(results.windows(2))
        .filter(|(_, m)| m[0].classification != m[1].classification)
        .map(|(f, m)| json!({"between": [f[0], f[1]], "from": stability_name(m[0].classification), "to": stability_name(m[1].classification)}))
        .collect();
    run.result("j", j)?;
    run.result("g", g)?;
    run.result("critical_field", critical_field(j, g)?)?;
    run.result("classification_changes", changes)?;
    run.result("max_pairing_error", results.iter().map(|m| m.pairing_error).fold(0.0, f64::max))
}
