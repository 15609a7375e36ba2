//! Hamiltonian parameters and sparse Hermitian matrix assembly in the site
//! (Wannier) and Bloch representations.

use std::io::Write;

use num_complex::Complex64;
use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fock::{quasimomentum_index, BasisSet, Representation};
use crate::rng::stream_rng;
use crate::symmetry::SectorLabel;

/// Physical parameters of a (possibly disordered, Peierls-phased, tilted)
/// Bose-Hubbard ring. Boundary conditions are always periodic.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HamiltonianSpec {
    pub n: u32,
    pub l: usize,
    /// Hopping energy.
    pub j: f64,
    /// Microscopic on-site interaction.
    pub u: f64,
    /// On-site energies, one per site.
    pub epsilon: Vec<f64>,
    /// Bound the on-site energies were drawn within (|ε_l| ≤ epsilon_max).
    pub epsilon_max: f64,
    /// Peierls phase on the hopping term.
    pub theta: f64,
    /// Static field, equal to the Bloch frequency (lattice period 1, ħ = 1).
    pub f: f64,
}

impl HamiltonianSpec {
    /// Clean ring: no disorder, no phase, no field.
    pub fn new(n: u32, l: usize, j: f64, u: f64) -> Self {
        Self { n, l, j, u, epsilon: vec![0.0; l], epsilon_max: 0.0, theta: 0.0, f: 0.0 }
    }

    /// `J = 1 - u`, `U = u`.
    pub fn from_u_parameter(n: u32, l: usize, u: f64) -> Self {
        Self::new(n, l, 1.0 - u, u)
    }

    pub fn with_theta(mut self, theta: f64) -> Self {
        self.theta = theta;
        self
    }

    pub fn with_field(mut self, f: f64) -> Self {
        self.f = f;
        self
    }

    pub fn with_epsilon(mut self, epsilon: Vec<f64>) -> Self {
        self.epsilon_max = epsilon.iter().fold(0.0f64, |m, e| m.max(e.abs()));
        self.epsilon = epsilon;
        self
    }

    /// On-site energies drawn uniformly from [-eps, eps] on the seeded stream.
    pub fn with_uniform_disorder(mut self, eps: f64, seed: u64) -> Self {
        let mut rng = stream_rng(seed, 0);
        self.epsilon = (0..self.l).map(|_| if eps > 0.0 { rng.random_range(-eps..=eps) } else { 0.0 }).collect();
        self.epsilon_max = eps;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if self.l < 2 {
            return Err(Error::Domain(format!("need L >= 2 sites, got {}", self.l)));
        }
        if self.epsilon.len() != self.l {
            return Err(Error::Dimension(format!(
                "{} on-site energies for {} sites",
                self.epsilon.len(),
                self.l
            )));
        }
        for (name, v) in [("J", self.j), ("U", self.u), ("F", self.f), ("theta", self.theta)] {
            if !v.is_finite() {
                return Err(Error::Domain(format!("{name} must be finite, got {v}")));
            }
        }
        if let Some(e) = self.epsilon.iter().find(|e| !e.is_finite() || e.abs() > self.epsilon_max + 1e-15) {
            return Err(Error::Domain(format!("on-site energy {e} outside ±{}", self.epsilon_max)));
        }
        Ok(())
    }

    pub fn is_translation_invariant(&self) -> bool {
        self.epsilon.iter().all(|&e| e == self.epsilon[0])
    }

    /// Reflection l -> L+1-l maps θ to -θ; it is a symmetry only for real hopping.
    pub fn is_reflection_invariant(&self) -> bool {
        let reflected_eps = self.epsilon.iter().rev().zip(&self.epsilon).all(|(a, b)| a == b);
        reflected_eps && (self.theta.sin() == 0.0)
    }

    /// Mean filling n̄ = N/L.
    pub fn filling(&self) -> f64 {
        f64::from(self.n) / self.l as f64
    }

    /// Macroscopic interaction g = U N / L.
    pub fn macroscopic_g(&self) -> f64 {
        self.u * f64::from(self.n) / self.l as f64
    }
}

/// Which basis a matrix is written in.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BasisTag {
    pub n: u32,
    pub l: usize,
    pub representation: Representation,
    pub sector: Option<SectorLabel>,
    /// Parameters the matrix was built from, when it came from a Hamiltonian.
    pub spec: Option<HamiltonianSpec>,
}

/// One stored upper-triangle element.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Entry {
    pub row: usize,
    pub col: usize,
    pub value: Complex64,
}

/// Hermitian matrix stored as its upper triangle (row <= col), sorted by
/// (row, col), without explicit zeros.
#[derive(Debug, Clone)]
pub struct SparseHermitian {
    dim: usize,
    entries: Vec<Entry>,
    tag: BasisTag,
}

impl SparseHermitian {
    /// Build from upper-triangle entries. Duplicates are summed, zeros dropped.
    pub fn from_upper(dim: usize, mut entries: Vec<Entry>, tag: BasisTag) -> Result<Self> {
        for e in &entries {
            if e.row > e.col || e.col >= dim {
                return Err(Error::Integrity(format!(
                    "entry ({}, {}) is not in the upper triangle of a {dim}x{dim} matrix",
                    e.row, e.col
                )));
            }
            if e.row == e.col && e.value.im != 0.0 {
                return Err(Error::Integrity(format!(
                    "diagonal entry {} has imaginary part {}",
                    e.row, e.value.im
                )));
            }
        }
        entries.sort_by_key(|e| (e.row, e.col));
        let mut merged: Vec<Entry> = Vec::with_capacity(entries.len());
        for e in entries {
            match merged.last_mut() {
                Some(last) if last.row == e.row && last.col == e.col => last.value += e.value,
                _ => merged.push(e),
            }
        }
        merged.retain(|e| e.value != Complex64::new(0.0, 0.0));
        for e in &mut merged {
            // no negative zeros in dumps
            e.value = Complex64::new(e.value.re + 0.0, e.value.im + 0.0);
        }
        Ok(Self { dim, entries: merged, tag })
    }

    /// Build from a full list of (row, col, value) triplets, verifying
    /// H = H† exactly.
    pub fn from_triplets(dim: usize, triplets: &[(usize, usize, Complex64)], tag: BasisTag) -> Result<Self> {
        use std::collections::BTreeMap;
        let mut full: BTreeMap<(usize, usize), Complex64> = BTreeMap::new();
        for &(r, c, v) in triplets {
            if r >= dim || c >= dim {
                return Err(Error::Dimension(format!("entry ({r}, {c}) outside {dim}x{dim}")));
            }
            *full.entry((r, c)).or_default() += v;
        }
        for (&(r, c), &v) in &full {
            let mirror = full.get(&(c, r)).copied().unwrap_or_default();
            if v != mirror.conj() {
                return Err(Error::Integrity(format!("H[{r},{c}] = {v} but conj(H[{c},{r}]) = {}", mirror.conj())));
            }
        }
        let upper = full
            .into_iter()
            .filter(|((r, c), _)| r <= c)
            .map(|((row, col), value)| Entry { row, col, value })
            .collect();
        Self::from_upper(dim, upper, tag)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn entries(&self) -> &[Entry] {
        &self.entries
    }

    pub fn nnz_upper(&self) -> usize {
        self.entries.len()
    }

    /// Number of nonzeros of the full (symmetrically completed) matrix.
    pub fn nnz_full(&self) -> usize {
        self.entries.iter().map(|e| if e.row == e.col { 1 } else { 2 }).sum()
    }

    pub fn tag(&self) -> &BasisTag {
        &self.tag
    }

    /// True if every stored value is real.
    pub fn is_real(&self) -> bool {
        self.entries.iter().all(|e| e.value.im == 0.0)
    }

    /// Value at (row, col) of the completed matrix.
    pub fn get(&self, row: usize, col: usize) -> Complex64 {
        let (r, c, conj) = if row <= col { (row, col, false) } else { (col, row, true) };
        match self.entries.binary_search_by_key(&(r, c), |e| (e.row, e.col)) {
            Ok(i) => {
                let v = self.entries[i].value;
                if conj {
                    v.conj()
                } else {
                    v
                }
            }
            Err(_) => Complex64::new(0.0, 0.0),
        }
    }

    /// Largest |H_ij| of the completed matrix.
    pub fn max_abs(&self) -> f64 {
        self.entries.iter().map(|e| e.value.norm()).fold(0.0, f64::max)
    }

    /// Maximum absolute row sum of the completed matrix, an upper bound on ‖H‖₂.
    pub fn norm_bound(&self) -> f64 {
        let mut rows = vec![0.0; self.dim];
        for e in &self.entries {
            rows[e.row] += e.value.norm();
            if e.row != e.col {
                rows[e.col] += e.value.norm();
            }
        }
        rows.into_iter().fold(0.0, f64::max)
    }

    /// y = H x for the completed matrix.
    pub fn apply(&self, x: &[Complex64], y: &mut [Complex64]) {
        assert_eq!(x.len(), self.dim);
        assert_eq!(y.len(), self.dim);
        y.iter_mut().for_each(|v| *v = Complex64::new(0.0, 0.0));
        for e in &self.entries {
            y[e.row] += e.value * x[e.col];
            if e.row != e.col {
                y[e.col] += e.value.conj() * x[e.row];
            }
        }
    }

    /// Completed matrix in compressed-row form.
    pub fn to_csr(&self) -> CsrMatrix {
        let mut triplets: Vec<(usize, usize, Complex64)> = Vec::with_capacity(self.nnz_full());
        for e in &self.entries {
            triplets.push((e.row, e.col, e.value));
            if e.row != e.col {
                triplets.push((e.col, e.row, e.value.conj()));
            }
        }
        CsrMatrix::from_triplets(self.dim, self.dim, triplets)
    }

    /// Debug dump: one `row col re im` line per stored upper-triangle entry.
    pub fn write_triples<W: Write>(&self, mut out: W) -> std::io::Result<()> {
        for e in &self.entries {
            writeln!(out, "{} {} {:.16e} {:.16e}", e.row, e.col, e.value.re, e.value.im)?;
        }
        Ok(())
    }
}

/// General sparse matrix in compressed-row form, used for operators that are
/// not Hermitian on their own (e.g. the directed hopping Σ a†_{l+1} a_l).
#[derive(Debug, Clone)]
pub struct CsrMatrix {
    nrows: usize,
    ncols: usize,
    row_ptr: Vec<usize>,
    col_idx: Vec<usize>,
    values: Vec<Complex64>,
}

impl CsrMatrix {
    pub fn from_triplets(nrows: usize, ncols: usize, mut triplets: Vec<(usize, usize, Complex64)>) -> Self {
        triplets.sort_by_key(|&(r, c, _)| (r, c));
        let mut row_ptr = vec![0usize; nrows + 1];
        let mut col_idx = Vec::with_capacity(triplets.len());
        let mut values: Vec<Complex64> = Vec::with_capacity(triplets.len());
        let mut last: Option<(usize, usize)> = None;
        for (r, c, v) in triplets {
            if last == Some((r, c)) {
                *values.last_mut().expect("duplicate follows an entry") += v;
                continue;
            }
            last = Some((r, c));
            row_ptr[r + 1] += 1;
            col_idx.push(c);
            values.push(v);
        }
        for r in 0..nrows {
            row_ptr[r + 1] += row_ptr[r];
        }
        Self { nrows, ncols, row_ptr, col_idx, values }
    }

    pub fn nrows(&self) -> usize {
        self.nrows
    }

    pub fn ncols(&self) -> usize {
        self.ncols
    }

    pub fn nnz(&self) -> usize {
        self.values.len()
    }

    pub fn row(&self, r: usize) -> impl Iterator<Item = (usize, Complex64)> + '_ {
        let span = self.row_ptr[r]..self.row_ptr[r + 1];
        self.col_idx[span.clone()].iter().copied().zip(self.values[span].iter().copied())
    }

    /// y = A x
    pub fn apply(&self, x: &[Complex64], y: &mut [Complex64]) {
        for (r, yr) in y.iter_mut().enumerate().take(self.nrows) {
            let mut acc = Complex64::new(0.0, 0.0);
            for k in self.row_ptr[r]..self.row_ptr[r + 1] {
                acc += self.values[k] * x[self.col_idx[k]];
            }
            *yr = acc;
        }
    }

    /// Conjugate transpose.
    pub fn adjoint(&self) -> CsrMatrix {
        let mut triplets = Vec::with_capacity(self.nnz());
        for r in 0..self.nrows {
            for (c, v) in self.row(r) {
                triplets.push((c, r, v.conj()));
            }
        }
        CsrMatrix::from_triplets(self.ncols, self.nrows, triplets)
    }
}

fn check_basis(spec: &HamiltonianSpec, basis: &BasisSet, rep: Representation) -> Result<()> {
    spec.validate()?;
    if basis.representation() != rep {
        return Err(Error::Representation(format!(
            "expected a {rep:?} basis, got {:?}",
            basis.representation()
        )));
    }
    if basis.particles() != spec.n || basis.modes() != spec.l {
        return Err(Error::Dimension(format!(
            "basis is for N={}, L={} but the Hamiltonian is for N={}, L={}",
            basis.particles(),
            basis.modes(),
            spec.n,
            spec.l
        )));
    }
    Ok(())
}

/// Static Hamiltonian in the site basis:
/// -(J/2) Σ_l (e^{iθ} a†_{l+1} a_l + h.c.) + (U/2) Σ_l n_l(n_l-1) + Σ_l ε_l n_l,
/// periodic boundary. The field F must be zero here; the tilt is handled by
/// the time-dependent gauge in `qdyn`.
pub fn build_hamiltonian(spec: &HamiltonianSpec, basis: &BasisSet) -> Result<SparseHermitian> {
    check_basis(spec, basis, Representation::Site)?;
    if spec.f != 0.0 {
        return Err(Error::Domain("build_hamiltonian assembles the static part only (F = 0)".into()));
    }
    let l = spec.l;
    let dim = basis.len();
    let hop = Complex64::from_polar(-0.5 * spec.j, spec.theta);
    let hop_conj = hop.conj();

    // Row r of the upper triangle holds ⟨r|H|c⟩ for c >= r, i.e. the
    // conjugates of ⟨c|H|r⟩ obtained by acting on |r⟩.
    let rows: Vec<Vec<Entry>> = (0..dim)
        .into_par_iter()
        .map(|r| {
            let occ = basis.state(r);
            let mut target = occ.to_vec();
            let mut row: Vec<Entry> = Vec::with_capacity(2 * l + 1);
            // integer double occupancy, scaled once
            let pairs: u64 = occ.iter().map(|&n| u64::from(n) * u64::from(n.saturating_sub(1))).sum();
            let onsite: f64 = occ.iter().zip(&spec.epsilon).map(|(&n, e)| f64::from(n) * e).sum();
            let diag = 0.5 * spec.u * pairs as f64 + onsite;
            row.push(Entry { row: r, col: r, value: Complex64::new(diag, 0.0) });
            for site in 0..l {
                let next = (site + 1) % l;
                // a†_{next} a_{site} with amplitude hop, and its h.c. a†_{site} a_{next}
                for (from, to, amp) in [(site, next, hop), (next, site, hop_conj)] {
                    if occ[from] == 0 {
                        continue;
                    }
                    let factor = (f64::from(occ[from]) * f64::from(occ[to] + 1)).sqrt();
                    target[from] -= 1;
                    target[to] += 1;
                    let c = basis.index_of(&target).expect("hopping stays inside the basis");
                    target[from] += 1;
                    target[to] -= 1;
                    if c >= r {
                        // ⟨c|H|r⟩ = amp·factor, stored entry is its conjugate
                        row.push(Entry { row: r, col: c, value: (amp * factor).conj() });
                    }
                }
            }
            row
        })
        .collect();
    let tag = BasisTag { n: spec.n, l, representation: Representation::Site, sector: None, spec: Some(spec.clone()) };
    SparseHermitian::from_upper(dim, rows.into_iter().flatten().collect(), tag)
}

/// Static Hamiltonian in the Bloch-mode basis:
/// -J Σ_k cos(2πk/L) n_k + (U/2L) Σ b†_{k1} b†_{k2} b_{k3} b_{k4} δ̃(k1+k2-k3-k4).
/// Disorder and the Peierls phase are only supported in the site basis.
pub fn build_hamiltonian_bloch(spec: &HamiltonianSpec, basis: &BasisSet) -> Result<SparseHermitian> {
    check_basis(spec, basis, Representation::Bloch)?;
    if spec.epsilon.iter().any(|&e| e != 0.0) || spec.theta != 0.0 || spec.f != 0.0 {
        return Err(Error::UnsupportedRepresentation(
            "disorder, Peierls phase and field are only supported in the site basis".into(),
        ));
    }
    let l = spec.l;
    let dim = basis.len();
    let two_pi = 2.0 * std::f64::consts::PI;
    let kinetic: Vec<f64> = (0..l).map(|k| -spec.j * (two_pi * k as f64 / l as f64).cos()).collect();
    let coupling = spec.u / (2.0 * l as f64);

    let rows: Vec<Vec<Entry>> = (0..dim)
        .into_par_iter()
        .map(|r| {
            let occ = basis.state(r);
            let mut acc: Vec<(usize, f64)> = Vec::new();
            let diag: f64 = occ.iter().zip(&kinetic).map(|(&n, e)| f64::from(n) * e).sum();
            acc.push((r, diag));
            if coupling != 0.0 {
                let mut work = occ.to_vec();
                for k4 in 0..l {
                    if work[k4] == 0 {
                        continue;
                    }
                    let a4 = f64::from(work[k4]).sqrt();
                    work[k4] -= 1;
                    for k3 in 0..l {
                        if work[k3] == 0 {
                            continue;
                        }
                        let a3 = a4 * f64::from(work[k3]).sqrt();
                        work[k3] -= 1;
                        for k1 in 0..l {
                            let k2 = (k3 + k4 + l - k1) % l;
                            let c2 = a3 * f64::from(work[k2] + 1).sqrt();
                            work[k2] += 1;
                            let c1 = c2 * f64::from(work[k1] + 1).sqrt();
                            work[k1] += 1;
                            let c = basis.index_of(&work).expect("momentum-conserving scattering stays in basis");
                            if c >= r {
                                acc.push((c, coupling * c1));
                            }
                            work[k1] -= 1;
                            work[k2] -= 1;
                        }
                        work[k3] += 1;
                    }
                    work[k4] += 1;
                }
            }
            // Real matrix: ⟨r|H|c⟩ = ⟨c|H|r⟩.
            acc.into_iter()
                .map(|(c, v)| Entry { row: r, col: c, value: Complex64::new(v, 0.0) })
                .collect::<Vec<_>>()
        })
        .collect();
    let tag = BasisTag { n: spec.n, l, representation: Representation::Bloch, sector: None, spec: Some(spec.clone()) };
    let h = SparseHermitian::from_upper(dim, rows.into_iter().flatten().collect(), tag)?;
    debug_assert!(h.entries().iter().all(|e| {
        quasimomentum_index(basis.state(e.row)) == quasimomentum_index(basis.state(e.col))
    }));
    Ok(h)
}

/// Directed hopping operator K = Σ_l a†_{l+1} a_l on a site basis
/// (periodic). K† hops the other way.
pub fn hopping_operator(basis: &BasisSet) -> Result<CsrMatrix> {
    if basis.representation() != Representation::Site {
        return Err(Error::Representation("hopping operator needs a site basis".into()));
    }
    let l = basis.modes();
    let dim = basis.len();
    let rows: Vec<Vec<(usize, usize, Complex64)>> = (0..dim)
        .into_par_iter()
        .map(|c| {
            let occ = basis.state(c);
            let mut target = occ.to_vec();
            let mut out = Vec::with_capacity(l);
            for site in 0..l {
                let next = (site + 1) % l;
                if occ[site] == 0 {
                    continue;
                }
                let factor = (f64::from(occ[site]) * f64::from(occ[next] + 1)).sqrt();
                target[site] -= 1;
                target[next] += 1;
                let r = basis.index_of(&target).expect("hopping stays inside the basis");
                target[site] += 1;
                target[next] -= 1;
                out.push((r, c, Complex64::new(factor, 0.0)));
            }
            out
        })
        .collect();
    Ok(CsrMatrix::from_triplets(dim, dim, rows.into_iter().flatten().collect()))
}

/// Diagonal of the interaction plus on-site terms, (U/2) Σ n(n-1) + Σ ε n.
pub fn diagonal_energies(spec: &HamiltonianSpec, basis: &BasisSet) -> Vec<f64> {
    basis
        .states()
        .map(|occ| {
            let pairs: u64 = occ.iter().map(|&n| u64::from(n) * u64::from(n.saturating_sub(1))).sum();
            let onsite: f64 = occ.iter().zip(&spec.epsilon).map(|(&n, e)| f64::from(n) * e).sum();
            0.5 * spec.u * pairs as f64 + onsite
        })
        .collect()
}
