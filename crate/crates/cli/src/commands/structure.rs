//! basis, spectrum and sweep-u.

use bh_core::io::Cell;
use bh_core::spectra::{eigh, fit_density};
use bh_core::{
    build_hamiltonian, build_sectors, enumerate_basis, hilbert_dimension, project_to_sector, HamiltonianSpec, Parity,
    Representation, SymmetrySector,
};
use rayon::prelude::*;
use serde_json::json;

use crate::config::{ParityArg, Params};
use crate::error::CliError;
use crate::output::Run;

pub fn parity_name(p: Parity) -> &'static str {
    match p {
        Parity::Even => "even",
        Parity::Odd => "odd",
        Parity::None => "none",
    }
}

fn parity_matches(p: Parity, want: Option<ParityArg>) -> bool {
    match want {
        None => true,
        Some(ParityArg::Even) => p == Parity::Even,
        Some(ParityArg::Odd) => p == Parity::Odd,
        Some(ParityArg::None) => p == Parity::None,
    }
}

pub fn basis(p: &mut Params, run: &mut Run) -> Result<(), CliError> {
    let (n, l) = (p.need_n()?, p.need_l()?);
    let dim = hilbert_dimension(n, l)?;
    println!("dimension {dim}");
    let sectors = build_sectors(&enumerate_basis(n, l, Representation::Site)?)?;
    println!("{:>11} {:>6} {:>8}", "kappa_index", "parity", "dim");
    for s in &sectors {
        println!("{:>11} {:>6} {:>8}", s.kappa_index, parity_name(s.parity), s.dim());
    }
    run.csv(
        "",
        &["kappa_index", "parity", "dim"],
        sectors.iter().map(|s| [Cell::from(s.kappa_index), Cell::Text(parity_name(s.parity)), Cell::from(s.dim())]),
    )?;
    run.result("dimension", dim)?;
    run.result(
        "sectors",
        sectors
            .iter()
            .map(|s| json!({"kappa_index": s.kappa_index, "parity": parity_name(s.parity), "dim": s.dim()}))
            .collect::<Vec<_>>(),
    )
}

/// Ascending eigenvalues of every sector, computed in parallel.
fn sector_spectra(h: &bh_core::SparseHermitian, sectors: &[SymmetrySector]) -> Result<Vec<Vec<f64>>, CliError> {
    let spectra: Result<Vec<_>, _> =
        sectors.par_iter().map(|s| eigh(&project_to_sector(h, s)?, false).map(|sp| sp.eigenvalues)).collect();
    Ok(spectra?)
}

pub fn spectrum(p: &mut Params, run: &mut Run) -> Result<(), CliError> {
    let spec = p.hamiltonian()?;
    let basis = enumerate_basis(spec.n, spec.l, Representation::Site)?;
    let h = build_hamiltonian(&spec, &basis)?;
    println!("dimension {}, {} stored nonzeros", h.dim(), h.nnz_upper());
    let values = if *p.sectors.get_or_insert(false) {
        let sectors = build_sectors(&basis)?;
        let spectra = sector_spectra(&h, &sectors)?;
        let mut rows = Vec::new();
        for (s, e) in sectors.iter().zip(&spectra) {
            for (i, x) in e.iter().enumerate() {
                rows.push([Cell::from(s.kappa_index), Cell::Text(parity_name(s.parity)), Cell::from(i), Cell::from(*x)]);
            }
        }
        run.csv("sectors", &["kappa_index", "parity", "index", "eigenvalue"], rows)?;
        let mut all: Vec<f64> = spectra.into_iter().flatten().collect();
        all.sort_by(f64::total_cmp);
        all
    } else {
        eigh(&h, false)?.eigenvalues
    };
    run.csv("", &["index", "eigenvalue"], values.iter().enumerate().map(|(i, e)| [Cell::from(i), Cell::from(*e)]))?;
    println!("ground energy {:.12}, top {:.12}", values[0], values[values.len() - 1]);
    run.result("dimension", h.dim())?;
    run.result("nnz_upper", h.nnz_upper())?;
    run.result("ground_energy", values[0])?;
    run.result("max_energy", values[values.len() - 1])?;
    if let Ok(model) = fit_density(&bh_core::spectra::Spectrum::from_values(values)) {
        run.result("density_fit", model)?;
    }
    Ok(())
}

pub fn sweep_u(p: &mut Params, run: &mut Run) -> Result<(), CliError> {
    if p.j.is_some() || p.u.is_some() || p.u_param.is_some() || p.g.is_some() {
        return Err(CliError::usage("sweep-u scans J = 1 - u, U = u itself; drop --j/--u/--u-param/--g"));
    }
    let (n, l) = (p.need_n()?, p.need_l()?);
    let lo = *p.u_min.get_or_insert(0.0);
    let hi = *p.u_max.get_or_insert(1.0);
    let points = *p.points.get_or_insert(101);
    if points < 2 || !(hi > lo) {
        return Err(CliError::usage("need --points >= 2 and --u-max > --u-min"));
    }
    let theta = *p.theta.get_or_insert(0.0);
    let basis = enumerate_basis(n, l, Representation::Site)?;
    let selected: Option<Vec<SymmetrySector>> = match (p.kappa, p.parity) {
        (None, None) => None,
        (None, Some(_)) => return Err(CliError::usage("--parity needs --kappa")),
        (Some(k), want) => {
            let s: Vec<_> = build_sectors(&basis)?
                .into_iter()
                .filter(|s| s.kappa_index == k && parity_matches(s.parity, want))
                .collect();
            if s.is_empty() {
                return Err(CliError::usage(format!("no sector with kappa index {k} and the requested parity")));
            }
            Some(s)
        }
    };
    let grid: Vec<f64> = (0..points).map(|i| lo + (hi - lo) * i as f64 / (points - 1) as f64).collect();
    let rows: Result<Vec<Vec<f64>>, CliError> = grid
        .iter()
        .map(|&u| {
            let spec = HamiltonianSpec::from_u_parameter(n, l, u).with_theta(theta);
            let h = build_hamiltonian(&spec, &basis)?;
            Ok(match &selected {
                None => eigh(&h, false)?.eigenvalues,
                Some(sectors) => {
                    let mut e: Vec<f64> = sector_spectra(&h, sectors)?.into_iter().flatten().collect();
                    e.sort_by(f64::total_cmp);
                    e
                }
            })
        })
        .collect();
    let rows = rows?;
    let levels = rows[0].len();
    let mut header = vec!["u".to_string()];
    header.extend((0..levels).map(|i| format!("e{i}")));
    let header: Vec<&str> = header.iter().map(String::as_str).collect();
    run.csv(
        "",
        &header,
        grid.iter().zip(&rows).map(|(u, e)| std::iter::once(Cell::from(*u)).chain(e.iter().map(|x| Cell::from(*x))).collect::<Vec<_>>()),
    )?;
    let min_gap = rows
        .iter()
        .flat_map(|e| e.windows(2).map(|w| w[1] - w[0]))
        .fold(f64::INFINITY, f64::min);
    println!("{levels} levels on {points} points, smallest adjacent gap {min_gap:.3e}");
    run.result("levels", levels)?;
    run.result("points", points)?;
    run.result("min_adjacent_gap", if levels > 1 { Some(min_gap) } else { None })
}
