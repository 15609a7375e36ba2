//! Bosonic Fock space: occupation-number states, complete bases and their
//! combinatorial ranking.
//!
//! States are kept in lexicographically *descending* order of the occupation
//! vector, so `(N, 0, ..., 0)` is always index 0 and `(0, ..., 0, N)` is the
//! last one. Lookup is an exact rank computation, O(L) per state.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Largest basis the enumerator will materialize.
pub const MAX_BASIS_DIM: usize = 50_000_000;

/// Which single-particle orbitals the occupations refer to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Representation {
    /// Wannier states, one per lattice site.
    Site,
    /// Bloch waves with quasimomentum 2πk/L, k = 0..L-1.
    Bloch,
}

/// A single occupation-number state.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct FockState {
    pub occ: Vec<u32>,
    pub representation: Representation,
}

impl FockState {
    pub fn new(occ: Vec<u32>, representation: Representation) -> Self {
        Self { occ, representation }
    }

    pub fn particles(&self) -> u64 {
        self.occ.iter().map(|&n| u64::from(n)).sum()
    }

    pub fn modes(&self) -> usize {
        self.occ.len()
    }
}

/// Total quasimomentum index `mod_L(Σ_k k n_k)` of a Bloch-mode state.
pub fn quasimomentum_of(state: &FockState) -> Result<usize> {
    if state.representation != Representation::Bloch {
        return Err(Error::Representation(
            "quasimomentum is defined for Bloch-mode occupations only".into(),
        ));
    }
    Ok(quasimomentum_index(&state.occ))
}

pub(crate) fn quasimomentum_index(occ: &[u32]) -> usize {
    let l = occ.len() as u64;
    let total = occ
        .iter()
        .enumerate()
        .fold(0u64, |acc, (k, &n)| (acc + (k as u64 % l) * (u64::from(n) % l)) % l);
    total as usize
}

/// Exact binomial coefficient, `None` on overflow of `u64`.
pub fn binomial(n: u64, k: u64) -> Option<u64> {
    if k > n {
        return Some(0);
    }
    let k = k.min(n - k);
    let mut acc: u128 = 1;
    for i in 0..k {
        acc = acc * u128::from(n - i) / u128::from(i + 1);
        if acc > u128::from(u64::MAX) {
            return None;
        }
    }
    Some(acc as u64)
}

/// Hilbert-space dimension (N+L-1)! / (N! (L-1)!).
pub fn hilbert_dimension(n: u32, l: usize) -> Result<usize> {
    if l == 0 {
        return Err(Error::Domain("at least one mode is required".into()));
    }
    let dim = binomial(u64::from(n) + l as u64 - 1, u64::from(n))
        .ok_or_else(|| Error::Capacity(format!("dimension of N={n}, L={l} overflows u64")))?;
    usize::try_from(dim)
        .map_err(|_| Error::Capacity(format!("dimension {dim} exceeds the platform word size")))
}

/// A complete, ordered Fock basis for N bosons in L modes.
#[derive(Debug, Clone)]
pub struct BasisSet {
    n: u32,
    l: usize,
    representation: Representation,
    // states stored back to back, stride `l`
    occ: Vec<u32>,
    // binom[m][r] = C(m + r, r), enough to rank any state of this basis
    ranks: Vec<Vec<u64>>,
}

/// Enumerate every composition of `n` into `l` parts, in descending
/// lexicographic order.
pub fn enumerate_basis(n: u32, l: usize, representation: Representation) -> Result<BasisSet> {
    if l < 2 {
        return Err(Error::Domain(format!("need L >= 2 modes, got {l}")));
    }
    let dim = hilbert_dimension(n, l)?;
    if dim > MAX_BASIS_DIM {
        return Err(Error::Capacity(format!(
            "basis of dimension {dim} exceeds the limit {MAX_BASIS_DIM}"
        )));
    }
    let mut occ = Vec::with_capacity(dim * l);
    let mut current = vec![0u32; l];
    fill(&mut occ, &mut current, 0, n);
    debug_assert_eq!(occ.len(), dim * l);

    let n_us = n as usize;
    let ranks = (0..=n_us)
        .map(|m| {
            (0..l)
                .map(|r| binomial((m + r) as u64, r as u64).expect("bounded by the basis dimension"))
                .collect()
        })
        .collect();
    Ok(BasisSet { n, l, representation, occ, ranks })
}

fn fill(out: &mut Vec<u32>, current: &mut [u32], pos: usize, remaining: u32) {
    let l = current.len();
    if pos == l - 1 {
        current[pos] = remaining;
        out.extend_from_slice(current);
        return;
    }
    for v in (0..=remaining).rev() {
        current[pos] = v;
        fill(out, current, pos + 1, remaining - v);
    }
}

impl BasisSet {
    pub fn particles(&self) -> u32 {
        self.n
    }

    pub fn modes(&self) -> usize {
        self.l
    }

    pub fn representation(&self) -> Representation {
        self.representation
    }

    pub fn len(&self) -> usize {
        self.occ.len() / self.l
    }

    pub fn is_empty(&self) -> bool {
        self.occ.is_empty()
    }

    /// Occupations of state `i`.
    pub fn state(&self, i: usize) -> &[u32] {
        &self.occ[i * self.l..(i + 1) * self.l]
    }

    pub fn fock_state(&self, i: usize) -> FockState {
        FockState::new(self.state(i).to_vec(), self.representation)
    }

    pub fn states(&self) -> impl ExactSizeIterator<Item = &[u32]> + '_ {
        self.occ.chunks_exact(self.l)
    }

    /// Ordinal of an occupation vector, or `None` if it does not belong to
    /// this basis.
    pub fn index_of(&self, occ: &[u32]) -> Option<usize> {
        if occ.len() != self.l {
            return None;
        }
        let mut remaining = self.n;
        let mut rank = 0u64;
        for (i, &ni) in occ[..self.l - 1].iter().enumerate() {
            if ni > remaining {
                return None;
            }
            let above = remaining - ni;
            if above > 0 {
                // states sharing the prefix but with a larger value here:
                // Σ_{m<above} C(m + r, r) = C(above - 1 + r + 1, r + 1), r = L - i - 2
                let r = self.l - i - 1;
                rank += self.ranks[(above - 1) as usize][r];
            }
            remaining -= ni;
        }
        if occ[self.l - 1] != remaining {
            return None;
        }
        Some(rank as usize)
    }

    /// Index lookup for a full [`FockState`], checking the representation.
    pub fn index(&self, state: &FockState) -> Option<usize> {
        if state.representation != self.representation {
            return None;
        }
        self.index_of(&state.occ)
    }
}
