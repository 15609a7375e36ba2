//! Translation (quasimomentum) and reflection symmetry sectors of the
//! periodic site basis.
//!
//! A sector vector is |r, κ⟩ = R^{-1/2} Σ_{j<R} e^{-iκj} Ŝ^j |r⟩, where Ŝ is the
//! cyclic permutation |n_1, ..., n_L⟩ -> |n_2, ..., n_L, n_1⟩ and R the orbit
//! length of the representative r. It exists iff κR ≡ 0 (mod 2π). At κ = 0
//! and κ = π the reflection l -> L+1-l commutes with Ŝ on the sector and
//! splits it into even and odd parts.

use std::f64::consts::PI;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fock::{BasisSet, Representation};
use crate::hamiltonian::{BasisTag, Entry, SparseHermitian};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Parity {
    Even,
    Odd,
    None,
}

impl std::fmt::Display for Parity {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Parity::Even => "even",
            Parity::Odd => "odd",
            Parity::None => "none",
        })
    }
}

/// (quasimomentum index, parity) pair identifying a sector.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct SectorLabel {
    pub kappa_index: usize,
    pub parity: Parity,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct OrbitRep {
    /// Basis index of the representative (lexicographically largest member).
    pub state: usize,
    pub length: usize,
}

/// One symmetry-adapted block of the Fock space.
#[derive(Debug, Clone)]
pub struct SymmetrySector {
    pub kappa_index: usize,
    pub parity: Parity,
    /// One representative per sector vector.
    pub orbit_reps: Vec<OrbitRep>,
    n: u32,
    l: usize,
    basis_dim: usize,
    // sparse components (basis index, amplitude) of each orthonormal sector vector
    vectors: Vec<Vec<(usize, Complex64)>>,
}

impl SymmetrySector {
    pub fn dim(&self) -> usize {
        self.vectors.len()
    }

    pub fn label(&self) -> SectorLabel {
        SectorLabel { kappa_index: self.kappa_index, parity: self.parity }
    }

    /// Quasimomentum κ = 2πk/L.
    pub fn kappa(&self) -> f64 {
        2.0 * PI * self.kappa_index as f64 / self.l as f64
    }

    pub fn vectors(&self) -> &[Vec<(usize, Complex64)>] {
        &self.vectors
    }

    /// Sector vector `i` as a dense vector over the full basis.
    pub fn dense_vector(&self, i: usize) -> Vec<Complex64> {
        let mut v = vec![Complex64::new(0.0, 0.0); self.basis_dim];
        for &(f, c) in &self.vectors[i] {
            v[f] += c;
        }
        v
    }
}

/// Whether κ = 2πk/L admits a reflection split.
pub fn parity_allowed(kappa_index: usize, l: usize) -> bool {
    kappa_index == 0 || (l % 2 == 0 && kappa_index == l / 2)
}

fn rotate_left(occ: &[u32], out: &mut [u32]) {
    let l = occ.len();
    out[..l - 1].copy_from_slice(&occ[1..]);
    out[l - 1] = occ[0];
}

/// Partition the site basis into translation orbits and emit every nonempty
/// (κ, parity) sector. Sector dimensions sum to the basis dimension.
pub fn build_sectors(basis: &BasisSet) -> Result<Vec<SymmetrySector>> {
    if basis.representation() != Representation::Site {
        return Err(Error::Representation("symmetry sectors are built on the site basis".into()));
    }
    let l = basis.modes();
    let dim = basis.len();

    // orbit index of each state, and orbit member lists in translation order
    let mut orbit_of = vec![usize::MAX; dim];
    let mut orbits: Vec<Vec<usize>> = Vec::new();
    let mut buf = vec![0u32; l];
    for i in 0..dim {
        if orbit_of[i] != usize::MAX {
            continue;
        }
        let id = orbits.len();
        let mut members = vec![i];
        orbit_of[i] = id;
        let mut cur = basis.state(i).to_vec();
        loop {
            rotate_left(&cur, &mut buf);
            let j = basis.index_of(&buf).expect("translation stays inside the basis");
            if j == i {
                break;
            }
            orbit_of[j] = id;
            members.push(j);
            std::mem::swap(&mut cur, &mut buf);
        }
        orbits.push(members);
    }

    let mut sectors = Vec::new();
    for k in 0..l {
        let kappa = 2.0 * PI * k as f64 / l as f64;
        let compatible = |len: usize| (k * len) % l == 0;
        let plane_wave = |members: &[usize]| -> Vec<(usize, Complex64)> {
            let norm = (members.len() as f64).sqrt().recip();
            members
                .iter()
                .enumerate()
                .map(|(j, &s)| (s, Complex64::from_polar(norm, -kappa * j as f64)))
                .collect()
        };

        if !parity_allowed(k, l) {
            let mut reps = Vec::new();
            let mut vectors = Vec::new();
            for members in orbits.iter().filter(|m| compatible(m.len())) {
                reps.push(OrbitRep { state: members[0], length: members.len() });
                vectors.push(plane_wave(members));
            }
            if !vectors.is_empty() {
                sectors.push(SymmetrySector {
                    kappa_index: k,
                    parity: Parity::None,
                    orbit_reps: reps,
                    n: basis.particles(),
                    l,
                    basis_dim: dim,
                    vectors,
                });
            }
            continue;
        }

        let mut even = (Vec::new(), Vec::new());
        let mut odd = (Vec::new(), Vec::new());
        let mut reflected = vec![0u32; l];
        for (id, members) in orbits.iter().enumerate().filter(|(_, m)| compatible(m.len())) {
            let v = plane_wave(members);
            let image: Vec<(usize, Complex64)> = v
                .iter()
                .map(|&(s, c)| {
                    let occ = basis.state(s);
                    for (dst, src) in reflected.iter_mut().zip(occ.iter().rev()) {
                        *dst = *src;
                    }
                    (basis.index_of(&reflected).expect("reflection stays inside the basis"), c)
                })
                .collect();
            let image_orbit = orbit_of[image[0].0];
            let rep = OrbitRep { state: members[0], length: members.len() };
            if image_orbit == id {
                // P|r,κ⟩ = ±|r,κ⟩; read the sign off the representative's amplitude
                let on_rep = image.iter().find(|(s, _)| *s == members[0]).map(|&(_, c)| c).unwrap_or_default();
                let sign = on_rep / v[0].1;
                if (sign - 1.0).norm() < 1e-9 {
                    even.0.push(rep);
                    even.1.push(v);
                } else if (sign + 1.0).norm() < 1e-9 {
                    odd.0.push(rep);
                    odd.1.push(v);
                } else {
                    return Err(Error::Integrity(format!("reflection eigenvalue {sign} is not ±1")));
                }
            } else if image_orbit > id {
                let s = std::f64::consts::FRAC_1_SQRT_2;
                let plus: Vec<_> = v.iter().chain(&image).map(|&(f, c)| (f, c * s)).collect();
                let minus: Vec<_> =
                    v.iter().map(|&(f, c)| (f, c * s)).chain(image.iter().map(|&(f, c)| (f, -c * s))).collect();
                even.0.push(rep);
                even.1.push(plus);
                odd.0.push(rep);
                odd.1.push(minus);
            }
        }
        for (parity, (reps, vectors)) in [(Parity::Even, even), (Parity::Odd, odd)] {
            if !vectors.is_empty() {
                sectors.push(SymmetrySector {
                    kappa_index: k,
                    parity,
                    orbit_reps: reps,
                    n: basis.particles(),
                    l,
                    basis_dim: dim,
                    vectors,
                });
            }
        }
    }
    Ok(sectors)
}

/// The block of a translation-invariant site-basis Hamiltonian in the given
/// sector's orthonormal basis.
pub fn project_to_sector(h: &SparseHermitian, sector: &SymmetrySector) -> Result<SparseHermitian> {
    let tag = h.tag();
    if tag.representation != Representation::Site || tag.sector.is_some() {
        return Err(Error::Representation("projection needs a full site-basis matrix".into()));
    }
    if tag.n != sector.n || tag.l != sector.l || h.dim() != sector.basis_dim {
        return Err(Error::Dimension(format!(
            "matrix for N={}, L={} (dim {}) does not match sector for N={}, L={} (dim {})",
            tag.n,
            tag.l,
            h.dim(),
            sector.n,
            sector.l,
            sector.basis_dim
        )));
    }
    let spec = tag
        .spec
        .as_ref()
        .ok_or_else(|| Error::SymmetryBroken("matrix carries no parameters to certify its symmetry".into()))?;
    if !spec.is_translation_invariant() {
        return Err(Error::SymmetryBroken("on-site disorder breaks translation invariance".into()));
    }
    if sector.parity != Parity::None && !spec.is_reflection_invariant() {
        return Err(Error::SymmetryBroken("a complex hopping phase breaks reflection symmetry".into()));
    }

    const NONE: u32 = u32::MAX;
    let mut owner = vec![(NONE, Complex64::new(0.0, 0.0)); h.dim()];
    for (i, v) in sector.vectors.iter().enumerate() {
        for &(f, c) in v {
            owner[f] = (i as u32, c);
        }
    }
    let csr = h.to_csr();
    let scale = h.max_abs().max(f64::MIN_POSITIVE);

    let columns: Vec<Vec<Entry>> = sector
        .vectors
        .par_iter()
        .enumerate()
        .map(|(b, vb)| {
            // w = H v_b, gathered sparsely; column f of H is the conjugate of row f
            let mut w: Vec<(usize, Complex64)> = Vec::new();
            for &(f, cf) in vb {
                for (t, hv) in csr.row(f) {
                    w.push((t, cf * hv.conj()));
                }
            }
            let mut elems: Vec<(usize, Complex64)> = Vec::new();
            for (t, wt) in w {
                let (a, ca) = owner[t];
                if a != NONE && (a as usize) <= b {
                    elems.push((a as usize, ca.conj() * wt));
                }
            }
            elems.sort_by_key(|&(a, _)| a);
            let mut out: Vec<Entry> = Vec::new();
            for (a, v) in elems {
                match out.last_mut() {
                    Some(last) if last.row == a => last.value += v,
                    _ => out.push(Entry { row: a, col: b, value: v }),
                }
            }
            out.retain(|e| e.value.norm() > 1e-14 * scale);
            for e in &mut out {
                if e.row == e.col {
                    e.value.im = 0.0;
                }
                // exact reals where the phases cancel
                if e.value.im.abs() <= 1e-15 * scale {
                    e.value.im = 0.0;
                }
            }
            out
        })
        .collect();

    let tag = BasisTag {
        n: tag.n,
        l: tag.l,
        representation: Representation::Site,
        sector: Some(sector.label()),
        spec: Some(spec.clone()),
    };
    SparseHermitian::from_upper(sector.dim(), columns.into_iter().flatten().collect(), tag)
}
