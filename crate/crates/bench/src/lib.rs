//! Fixtures shared by the benchmarks.

use bh_core::{build_hamiltonian, enumerate_basis, BasisSet, HamiltonianSpec, Representation, SparseHermitian};

/// Site basis and static Hamiltonian of a clean ring.
pub fn ring(n: u32, l: usize, j: f64, u: f64) -> (BasisSet, SparseHermitian) {
    let basis = enumerate_basis(n, l, Representation::Site).expect("valid ring");
    let h = build_hamiltonian(&HamiltonianSpec::new(n, l, j, u), &basis).expect("valid ring");
    (basis, h)
}
