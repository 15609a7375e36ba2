use num_complex::Complex64;
use rayon::prelude::*;

use super::krylov::dot;
use super::state::StateVector;
use crate::error::{Error, Result};
use crate::fock::{BasisSet, Representation};
use crate::hamiltonian::{hopping_operator, CsrMatrix};

/// Precomputed transitions a†_l a_m for every ordered pair l ≠ m, used to
/// evaluate one-particle density matrices quickly along a run.
#[derive(Debug, Clone)]
pub struct OpdmTables {
    n: u32,
    l: usize,
    // occupations as f64, stride l
    occ: Vec<f64>,
    // per pair (l, m), l != m: (source, target, amplitude) with
    // a†_l a_m |source⟩ = amplitude |target⟩
    hops: Vec<Vec<(u32, u32, f64)>>,
}

impl OpdmTables {
    pub fn new(basis: &BasisSet) -> Result<Self> {
        if basis.representation() != Representation::Site {
            return Err(Error::Representation("density matrices are taken in the site basis".into()));
        }
        let l = basis.modes();
        let occ: Vec<f64> = basis.states().flat_map(|s| s.iter().map(|&n| f64::from(n))).collect();
        let hops = (0..l * l)
            .into_par_iter()
            .map(|pair| {
                let (dst, src) = (pair / l, pair % l);
                if dst == src {
                    return Vec::new();
                }
                let mut target = vec![0u32; l];
                let mut out = Vec::new();
                for (i, s) in basis.states().enumerate() {
                    if s[src] == 0 {
                        continue;
                    }
                    target.copy_from_slice(s);
                    target[src] -= 1;
                    target[dst] += 1;
                    let j = basis.index_of(&target).expect("hop stays inside the basis");
                    let amp = (f64::from(s[src]) * f64::from(s[dst] + 1)).sqrt();
                    out.push((i as u32, j as u32, amp));
                }
                out
            })
            .collect();
        Ok(Self { n: basis.particles(), l, occ, hops })
    }

    /// R_{lm} = ⟨a†_l a_m⟩ / N as a row-major L×L matrix.
    pub fn opdm(&self, psi: &[Complex64]) -> Vec<Complex64> {
        let l = self.l;
        let n = f64::from(self.n.max(1));
        let mut r = vec![Complex64::new(0.0, 0.0); l * l];
        for (i, c) in psi.iter().enumerate() {
            let w = c.norm_sqr();
            for site in 0..l {
                r[site * l + site] += w * self.occ[i * l + site];
            }
        }
        for (pair, hops) in self.hops.iter().enumerate() {
            if hops.is_empty() {
                continue;
            }
            let acc: Complex64 = hops.iter().map(|&(i, j, a)| psi[j as usize].conj() * psi[i as usize] * a).sum();
            r[pair] = acc;
        }
        r.iter_mut().for_each(|x| *x /= n);
        r
    }
}

/// Linear entropy Tr(R²) of an L×L row-major Hermitian matrix.
pub fn linear_entropy(r: &[Complex64]) -> f64 {
    r.iter().map(|x| x.norm_sqr()).sum()
}

/// One-particle density matrix of a state on the given basis.
pub fn one_particle_dm(basis: &BasisSet, psi: &StateVector) -> Result<Vec<Complex64>> {
    check_dims(basis, psi)?;
    Ok(OpdmTables::new(basis)?.opdm(&psi.amplitudes))
}

fn check_dims(basis: &BasisSet, psi: &StateVector) -> Result<()> {
    if psi.amplitudes.len() != basis.len() {
        return Err(Error::Dimension(format!("state of length {} on a basis of {}", psi.amplitudes.len(), basis.len())));
    }
    Ok(())
}

/// p = −(J/N) Im⟨K⟩ e^{iFt} with K = Σ_l a†_{l+1} a_l, from a prebuilt K.
pub fn momentum_from_hopping(k: &CsrMatrix, psi: &[Complex64], n: u32, j: f64, f: f64, t: f64) -> f64 {
    let mut kpsi = vec![Complex64::new(0.0, 0.0); psi.len()];
    k.apply(psi, &mut kpsi);
    let expect = dot(psi, &kpsi) * Complex64::from_polar(1.0, f * t);
    -j / f64::from(n.max(1)) * expect.im
}

/// Mean momentum per atom at time t for the tilted ring with parameters J, F.
pub fn mean_momentum(basis: &BasisSet, psi: &StateVector, t: f64, j: f64, f: f64) -> Result<f64> {
    check_dims(basis, psi)?;
    let k = hopping_operator(basis)?;
    Ok(momentum_from_hopping(&k, &psi.amplitudes, basis.particles(), j, f, t))
}
