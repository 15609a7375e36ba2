//! stats, rmt and overlap.

use std::f64::consts::PI;

use bh_core::io::Cell;
use bh_core::rng::seed_policy;
use bh_core::spectra::{
    breit_wigner_fit, central_window, eigh, fit_density, histogram_l1, integrated_distribution, ks_distance,
    overlap_matrix, reference_cdf, sample_rmt, unfold, LevelDensity, ReferenceKind, Spectrum, UnfoldedSpacings,
};
use bh_core::{build_hamiltonian, build_sectors, enumerate_basis, project_to_sector, Representation};
use rayon::prelude::*;
use serde_json::{json, Value};

use crate::config::{Ensemble, Params};
use crate::error::CliError;
use crate::output::Run;

const KINDS: [ReferenceKind; 3] = [ReferenceKind::Poisson, ReferenceKind::Goe, ReferenceKind::Gue];

/// Wigner semicircle of the sampled ensembles, edge at ±2·dim/π.
struct Semicircle {
    dim: usize,
}

impl Semicircle {
    fn radius(&self) -> f64 {
        2.0 * self.dim as f64 / PI
    }

    /// Normalized mass below E.
    fn cdf(&self, e: f64) -> f64 {
        let x = (e / self.radius()).clamp(-1.0, 1.0);
        0.5 + (x * (1.0 - x * x).sqrt() + x.asin()) / PI
    }

    /// L1 distance between the level histogram and the exact bin masses.
    fn histogram_l1(&self, levels: &[f64], bins: usize) -> f64 {
        let r = self.radius();
        let width = 2.0 * r / bins as f64;
        let mut counts = vec![0usize; bins];
        for e in levels {
            let b = ((e + r) / width).floor();
            if b >= 0.0 && (b as usize) < bins {
                counts[b as usize] += 1;
            }
        }
        counts
            .iter()
            .enumerate()
            .map(|(b, c)| {
                let a = -r + b as f64 * width;
                (*c as f64 / levels.len() as f64 - (self.cdf(a + width) - self.cdf(a))).abs()
            })
            .sum()
    }
}

impl LevelDensity for Semicircle {
    fn density(&self, e: f64) -> f64 {
        let r = self.radius();
        2.0 * self.dim as f64 / (PI * r * r) * (r * r - e * e).max(0.0).sqrt()
    }
}

fn ks_table(s: &UnfoldedSpacings) -> Result<Value, CliError> {
    let mut m = serde_json::Map::new();
    for k in KINDS {
        m.insert(k.to_string(), json!(ks_distance(s, k)?));
    }
    Ok(Value::Object(m))
}

fn closest(s: &UnfoldedSpacings) -> Result<ReferenceKind, CliError> {
    let mut best = (ReferenceKind::Poisson, f64::INFINITY);
    for k in KINDS {
        let d = ks_distance(s, k)?;
        if d < best.1 {
            best = (k, d);
        }
    }
    Ok(best.0)
}

/// Spacings plus the integrated distribution against the three laws.
fn write_spacings(run: &mut Run, s: &UnfoldedSpacings) -> Result<(), CliError> {
    run.csv("", &["s"], s.s.iter().map(|x| [Cell::from(*x)]))?;
    let cdf = integrated_distribution(s)?;
    let mut rows = Vec::new();
    for i in 0..=400 {
        let x = i as f64 * 0.01;
        rows.push([
            Cell::from(x),
            Cell::from(cdf.eval(x)),
            Cell::from(reference_cdf(ReferenceKind::Poisson, x)?),
            Cell::from(reference_cdf(ReferenceKind::Goe, x)?),
            Cell::from(reference_cdf(ReferenceKind::Gue, x)?),
        ]);
    }
    run.csv("cdf", &["s", "I", "I_poisson", "I_goe", "I_gue"], rows)
}

pub fn stats(p: &mut Params, run: &mut Run) -> Result<(), CliError> {
    let spec = p.hamiltonian()?;
    let trim = *p.trim.get_or_insert(0.1);
    let basis = enumerate_basis(spec.n, spec.l, Representation::Site)?;
    let h = build_hamiltonian(&spec, &basis)?;
    let sectored = *p.sectors.get_or_insert(spec.is_translation_invariant());
    let pooled = if sectored {
        // sectors k and L-k are mirror images with equal spectra; keep one of each pair
        let sectors: Vec<_> =
            build_sectors(&basis)?.into_iter().filter(|s| s.kappa_index <= spec.l / 2).collect();
        let parts: Vec<Option<UnfoldedSpacings>> = sectors
            .par_iter()
            .map(|s| -> Result<_, CliError> {
                let sp = eigh(&project_to_sector(&h, s)?, false)?;
                match fit_density(&sp) {
                    Ok(model) => Ok(Some(unfold(&sp, &model, trim)?)),
                    Err(bh_core::Error::InsufficientData(_)) => Ok(None),
                    Err(e) => Err(e.into()),
                }
            })
            .collect::<Result<_, _>>()?;
        let used: Vec<&UnfoldedSpacings> = parts.iter().flatten().collect();
        if used.is_empty() {
            return Err(bh_core::Error::InsufficientData("no sector has the 50 levels a density fit needs".into()).into());
        }
        println!("{} of {} sectors large enough to unfold", used.len(), sectors.len());
        run.result("sectors_used", used.len())?;
        UnfoldedSpacings::pool(used)?
    } else {
        let sp = eigh(&h, false)?;
        let model = fit_density(&sp)?;
        run.result("density_fit", model)?;
        run.result("density_l1", histogram_l1(&sp, &model, 20))?;
        unfold(&sp, &model, trim)?
    };
    write_spacings(run, &pooled)?;
    let nearest = closest(&pooled)?;
    println!("{} spacings, closest law {nearest}", pooled.len());
    run.result("spacings", pooled.len())?;
    run.result("ks", ks_table(&pooled)?)?;
    run.result("closest", nearest.to_string())
}

pub fn rmt(p: &mut Params, run: &mut Run) -> Result<(), CliError> {
    let kind: ReferenceKind = (*p.kind.get_or_insert(Ensemble::Goe)).into();
    let dims = p.dims.get_or_insert_with(|| vec![2]).clone();
    let samples = *p.samples.get_or_insert(1000);
    let trim = *p.trim.get_or_insert(0.1);
    let seed = p.seed();
    if samples == 0 {
        return Err(CliError::usage("--samples must be positive"));
    }
    let mut per_dim = Vec::new();
    for (task, &dim) in dims.iter().enumerate() {
        let spectra: Vec<Spectrum> = (0..samples)
            .into_par_iter()
            .map(|i| sample_rmt(kind, dim, seed_policy(seed, (task * samples + i) as u64)))
            .collect::<Result<_, _>>()?;
        let model = Semicircle { dim };
        let parts: Vec<UnfoldedSpacings> = if dim == 2 {
            // a single spacing per matrix; pooling restores the unit mean
            spectra
                .iter()
                .map(|s| UnfoldedSpacings { s: vec![s.eigenvalues[1] - s.eigenvalues[0]], source: None, trimming: 0.0 })
                .collect()
        } else {
            spectra.iter().map(|s| unfold(s, &model, trim)).collect::<Result<_, _>>()?
        };
        let pooled = UnfoldedSpacings::pool(&parts)?;
        run.csv(&format!("dim{dim}"), &["s"], pooled.s.iter().map(|x| [Cell::from(*x)]))?;
        let l1 = (dim >= 20).then(|| model.histogram_l1(&spectra[0].eigenvalues, 20));
        println!("dim {dim}: {} spacings, KS to {kind} {:.4}", pooled.len(), ks_distance(&pooled, kind)?);
        per_dim.push(json!({
            "dim": dim,
            "spacings": pooled.len(),
            "ks": ks_table(&pooled)?,
            "semicircle_l1": l1,
        }));
    }
    run.result("ensembles", per_dim)
}

pub fn overlap(p: &mut Params, run: &mut Run) -> Result<(), CliError> {
    let spec = p.hamiltonian()?;
    let u_prime = p.u_prime.ok_or_else(|| CliError::usage("--u-prime is required"))?;
    let fraction = *p.window.get_or_insert(1.0 / 3.0);
    let d_max = *p.d_max.get_or_insert(50);
    if !(fraction > 0.0 && fraction <= 1.0) {
        return Err(CliError::usage(format!("--window must lie in (0, 1], got {fraction}")));
    }
    let mut spec_b = spec.clone();
    spec_b.u = u_prime;
    let basis = enumerate_basis(spec.n, spec.l, Representation::Site)?;
    println!("diagonalizing two {}-dimensional matrices", basis.len());
    let a = eigh(&build_hamiltonian(&spec, &basis)?, true)?;
    let b = eigh(&build_hamiltonian(&spec_b, &basis)?, true)?;
    let r = overlap_matrix(&a, &b)?;
    let window = central_window(r.dim(), fraction);
    let fit = breit_wigner_fit(&r, window.clone(), d_max)?;
    run.csv(
        "",
        &["d", "R_mean", "fit"],
        fit.profile.iter().map(|pt| [Cell::from(pt.d), Cell::from(pt.r_mean), Cell::from(pt.fit)]),
    )?;
    let band_min = window.clone().map(|m| r.band_mass(m, d_max)).fold(f64::INFINITY, f64::min);
    println!("Gamma {:.4} (relative residual {:.3})", fit.gamma, fit.relative_residual);
    run.result("gamma", fit.gamma)?;
    run.result("relative_residual", fit.relative_residual)?;
    run.result("sse", fit.sse)?;
    run.result("window", [window.start, window.end])?;
    run.result("stochasticity_error", r.stochasticity_error())?;
    run.result("min_band_mass", band_min)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn semicircle_is_normalized() {
        let s = Semicircle { dim: 40 };
        let r = s.radius();
        let steps = 20_000;
        let h = 2.0 * r / steps as f64;
        let mass: f64 = (0..steps).map(|i| s.density(-r + (i as f64 + 0.5) * h) * h).sum();
        assert!((mass - 40.0).abs() < 1e-3, "{mass}");
        assert!((s.cdf(r) - 1.0).abs() < 1e-15 && s.cdf(-r).abs() < 1e-15);
        assert!((s.cdf(0.0) - 0.5).abs() < 1e-15);
    }
}
