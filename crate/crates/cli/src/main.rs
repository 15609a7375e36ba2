//! `bhlab`: command-line driver for the Bose-Hubbard ring laboratory.

mod commands;
mod config;
mod error;
mod output;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use crate::config::{Command, Params};
use crate::error::CliError;
use crate::output::Run;

/// Thread count for every parallel stage; defaults to all cores.
const THREADS_VAR: &str = "BHLAB_THREADS";

#[derive(Parser)]
#[command(name = "bhlab", version, about = "Bose-Hubbard ring: spectra, statistics, Bloch dynamics and semiclassics")]
struct Cli {
    /// JSON file whose keys mirror the flag names; flags override it.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    #[command(subcommand)]
    command: Sub,
}

#[derive(Subcommand)]
enum Sub {
    /// Hilbert-space dimension and symmetry-sector table.
    Basis(Params),
    /// Eigenvalues of the static Hamiltonian, optionally per sector.
    Spectrum(Params),
    /// Levels along J = 1 - u, U = u.
    SweepU(Params),
    /// Unfolded nearest-neighbour spacings and distances to the reference laws.
    Stats(Params),
    /// Spacing statistics of sampled GOE/GUE matrices.
    Rmt(Params),
    /// Eigenbasis overlaps between U and U' with a Breit-Wigner fit.
    Overlap(Params),
    /// Exact Bloch oscillations of the tilted ring.
    BlochQuantum(Params),
    /// Truncated-Husimi ensemble of the mean-field equation.
    BlochClassical(Params),
    /// Floquet stability of the periodic mean-field solution.
    Stability(Params),
    /// Semiclassical level ladder against exact diagonalization.
    Bogoliubov(Params),
    /// Run the command named in the config file.
    Run(Params),
}

impl Sub {
    fn split(self) -> (Option<Command>, Params) {
        match self {
            Sub::Basis(p) => (Some(Command::Basis), p),
            Sub::Spectrum(p) => (Some(Command::Spectrum), p),
            Sub::SweepU(p) => (Some(Command::SweepU), p),
            Sub::Stats(p) => (Some(Command::Stats), p),
            Sub::Rmt(p) => (Some(Command::Rmt), p),
            Sub::Overlap(p) => (Some(Command::Overlap), p),
            Sub::BlochQuantum(p) => (Some(Command::BlochQuantum), p),
            Sub::BlochClassical(p) => (Some(Command::BlochClassical), p),
            Sub::Stability(p) => (Some(Command::Stability), p),
            Sub::Bogoliubov(p) => (Some(Command::Bogoliubov), p),
            Sub::Run(p) => (None, p),
        }
    }
}

fn init_threads() -> Result<(), CliError> {
    let Ok(raw) = std::env::var(THREADS_VAR) else {
        return Ok(());
    };
    let threads: usize = raw
        .trim()
        .parse()
        .ok()
        .filter(|t| *t > 0)
        .ok_or_else(|| CliError::usage(format!("{THREADS_VAR} must be a positive integer, got '{raw}'")))?;
    rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build_global()
        .map_err(|e| CliError::usage(format!("thread pool: {e}")))
}

fn execute(cli: Cli) -> Result<(), CliError> {
    init_threads()?;
    let (named, flags) = cli.command.split();
    let (file_command, mut params) = match &cli.config {
        Some(path) => {
            let (c, file) = config::load(path)?;
            (c, flags.merged_over(file))
        }
        None => (None, flags),
    };
    let command = match (named, file_command) {
        (Some(c), _) => c,
        (None, Some(c)) => c,
        (None, None) => return Err(CliError::usage("`run` needs a config file naming the command")),
    };
    let mut run = Run::new(command, params.out.clone())?;
    let p = &mut params;
    match command {
        Command::Basis => commands::basis(p, &mut run),
        Command::Spectrum => commands::spectrum(p, &mut run),
        Command::SweepU => commands::sweep_u(p, &mut run),
        Command::Stats => commands::stats(p, &mut run),
        Command::Rmt => commands::rmt(p, &mut run),
        Command::Overlap => commands::overlap(p, &mut run),
        Command::BlochQuantum => commands::bloch_quantum(p, &mut run),
        Command::BlochClassical => commands::bloch_classical(p, &mut run),
        Command::Stability => commands::stability(p, &mut run),
        Command::Bogoliubov => commands::bogoliubov(p, &mut run),
    }?;
    run.finish(&params)?;
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match execute(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error[{}]: {e}", e.category());
            ExitCode::from(e.exit_code())
        }
    }
}
