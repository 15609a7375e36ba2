//! bogoliubov.

use bh_core::bogoliubov::{bogoliubov_frequencies, compare_with_exact, semiclassical_levels};
use bh_core::io::Cell;
use bh_core::spectra::eigh;
use bh_core::{build_hamiltonian, enumerate_basis, Representation};

use crate::config::Params;
use crate::error::CliError;
use crate::output::Run;

pub fn bogoliubov(p: &mut Params, run: &mut Run) -> Result<(), CliError> {
    let spec = p.hamiltonian()?;
    let n_max = *p.n_max.get_or_insert(10);
    let levels = semiclassical_levels(spec.n, spec.l, spec.j, spec.u, n_max)?;
    let modes = bogoliubov_frequencies(spec.j, levels.g, spec.l)?;
    let basis = enumerate_basis(spec.n, spec.l, Representation::Site)?;
    println!("g {:.6}, Omega {:.6}, exact diagonalization of dimension {}", levels.g, levels.omega, basis.len());
    let exact = eigh(&build_hamiltonian(&spec, &basis)?, false)?;
    let report = compare_with_exact(&levels, &exact)?;
    run.csv(
        "",
        &["n", "predicted", "exact_mean", "deviation", "multiplicity"],
        report.rows.iter().map(|r| {
            [
                Cell::from(r.n),
                Cell::from(r.predicted),
                Cell::from(r.exact_mean),
                Cell::from(r.deviation),
                Cell::from(r.multiplicity),
            ]
        }),
    )?;
    run.csv(
        "levels",
        &["n", "energy", "degeneracy"],
        levels.levels.iter().map(|lv| [Cell::from(lv.n), Cell::from(lv.energy), Cell::from(lv.degeneracy)]),
    )?;
    for r in &report.rows {
        println!("n {:>3}: exact {:.4} x{} (deviation {:+.4})", r.n, r.exact_mean, r.multiplicity, r.deviation);
    }
    run.result("g", levels.g)?;
    run.result("omega", levels.omega)?;
    run.result("frequencies", &modes.omegas)?;
    run.result("mean_field_e0", levels.e0)?;
    run.result("exact_e0", report.exact_e0)?;
    run.result("breakdown", report.breakdown)?;
    run.result("threshold", report.threshold)?;
    run.result("cluster_tolerance", report.cluster_tolerance)
}
