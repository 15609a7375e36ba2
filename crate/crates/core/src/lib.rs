//! Exact diagonalization, spectral statistics, quantum and semiclassical
//! dynamics for the one-dimensional Bose-Hubbard ring.

pub mod bogoliubov;
pub mod classical;
pub mod error;
pub mod fock;
pub mod hamiltonian;
pub mod io;
pub mod qdyn;
pub mod rng;
pub mod spectra;
pub mod symmetry;

pub use error::{Error, Result};
pub use fock::{enumerate_basis, hilbert_dimension, quasimomentum_of, BasisSet, FockState, Representation};
pub use hamiltonian::{
    build_hamiltonian, build_hamiltonian_bloch, hopping_operator, BasisTag, CsrMatrix, Entry, HamiltonianSpec,
    SparseHermitian,
};
pub use rng::{seed_policy, stream_rng};
pub use symmetry::{build_sectors, project_to_sector, Parity, SectorLabel, SymmetrySector};
