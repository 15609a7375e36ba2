use faer::{c64, Mat, Side};
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::hamiltonian::{BasisTag, SparseHermitian};

/// Largest matrix `eigh` will densify unless told otherwise.
pub const DEFAULT_DENSE_LIMIT: usize = 12_000;

/// Eigenvectors stored column-wise; real when the input matrix was real.
#[derive(Debug, Clone)]
pub enum Eigenvectors {
    Real(Mat<f64>),
    Complex(Mat<c64>),
}

impl Eigenvectors {
    pub fn dim(&self) -> usize {
        match self {
            Eigenvectors::Real(m) => m.nrows(),
            Eigenvectors::Complex(m) => m.nrows(),
        }
    }

    pub fn count(&self) -> usize {
        match self {
            Eigenvectors::Real(m) => m.ncols(),
            Eigenvectors::Complex(m) => m.ncols(),
        }
    }

    pub fn column(&self, j: usize) -> Vec<Complex64> {
        match self {
            Eigenvectors::Real(m) => m.col_as_slice(j).iter().map(|&x| Complex64::new(x, 0.0)).collect(),
            Eigenvectors::Complex(m) => m.col_as_slice(j).to_vec(),
        }
    }

    pub(crate) fn to_complex(&self) -> Mat<c64> {
        match self {
            Eigenvectors::Real(m) => Mat::from_fn(m.nrows(), m.ncols(), |i, j| c64::new(m[(i, j)], 0.0)),
            Eigenvectors::Complex(m) => m.clone(),
        }
    }
}

/// Ascending eigenvalues with optional eigenvectors and provenance.
#[derive(Debug, Clone)]
pub struct Spectrum {
    pub eigenvalues: Vec<f64>,
    pub eigenvectors: Option<Eigenvectors>,
    pub tag: Option<BasisTag>,
}

impl Spectrum {
    pub fn from_values(mut eigenvalues: Vec<f64>) -> Self {
        eigenvalues.sort_by(f64::total_cmp);
        Self { eigenvalues, eigenvectors: None, tag: None }
    }

    pub fn len(&self) -> usize {
        self.eigenvalues.len()
    }

    pub fn is_empty(&self) -> bool {
        self.eigenvalues.is_empty()
    }

    /// Largest ‖Hv − λv‖ over the stored pairs.
    pub fn max_residual(&self, h: &SparseHermitian) -> Option<f64> {
        let vecs = self.eigenvectors.as_ref()?;
        let mut worst = 0.0f64;
        let mut hv = vec![Complex64::new(0.0, 0.0); h.dim()];
        for (j, &lambda) in self.eigenvalues.iter().enumerate() {
            let v = vecs.column(j);
            h.apply(&v, &mut hv);
            let r = hv.iter().zip(&v).map(|(a, b)| (a - lambda * b).norm_sqr()).sum::<f64>().sqrt();
            worst = worst.max(r);
        }
        Some(worst)
    }

    /// Largest deviation of VᴴV from the identity.
    pub fn orthonormality_error(&self) -> Option<f64> {
        let vecs = self.eigenvectors.as_ref()?;
        let v = vecs.to_complex();
        let g = v.adjoint() * &v;
        let mut worst = 0.0f64;
        for j in 0..g.ncols() {
            for i in 0..g.nrows() {
                let target = if i == j { 1.0 } else { 0.0 };
                worst = worst.max((g[(i, j)] - c64::new(target, 0.0)).norm());
            }
        }
        Some(worst)
    }
}

/// Full eigendecomposition of a sparse Hermitian matrix via a dense solver.
pub fn eigh(h: &SparseHermitian, want_vectors: bool) -> Result<Spectrum> {
    eigh_with_limit(h, want_vectors, DEFAULT_DENSE_LIMIT)
}

pub fn eigh_with_limit(h: &SparseHermitian, want_vectors: bool, dense_limit: usize) -> Result<Spectrum> {
    let n = h.dim();
    if n > dense_limit {
        return Err(Error::Capacity(format!("dimension {n} exceeds the dense limit {dense_limit}")));
    }
    let mut spectrum = if h.is_real() {
        let mut m = Mat::<f64>::zeros(n, n);
        for e in h.entries() {
            m[(e.col, e.row)] = e.value.re;
        }
        dense_real(m, want_vectors)?
    } else {
        let mut m = Mat::<c64>::zeros(n, n);
        for e in h.entries() {
            // lower triangle holds the conjugate of the stored upper entry
            m[(e.col, e.row)] = e.value.conj();
        }
        dense_complex(m, want_vectors)?
    };
    spectrum.tag = Some(h.tag().clone());
    Ok(spectrum)
}

/// Eigendecomposition of a dense complex matrix, which must be exactly
/// Hermitian.
pub fn eigh_dense(m: &Mat<c64>, want_vectors: bool) -> Result<Spectrum> {
    if m.nrows() != m.ncols() {
        return Err(Error::Dimension(format!("matrix is {}x{}", m.nrows(), m.ncols())));
    }
    let n = m.nrows();
    for j in 0..n {
        for i in 0..=j {
            if m[(i, j)] != m[(j, i)].conj() {
                return Err(Error::Integrity(format!("matrix is not Hermitian at ({i}, {j})")));
            }
        }
    }
    if (0..n).all(|j| (0..n).all(|i| m[(i, j)].im == 0.0)) {
        dense_real(Mat::from_fn(n, n, |i, j| m[(i, j)].re), want_vectors)
    } else {
        dense_complex(m.clone(), want_vectors)
    }
}

pub(crate) fn dense_real(m: Mat<f64>, want_vectors: bool) -> Result<Spectrum> {
    if want_vectors {
        let evd = m.self_adjoint_eigen(Side::Lower).map_err(|e| Error::Eigensolver(format!("{e:?}")))?;
        let s = evd.S().column_vector();
        Ok(Spectrum {
            eigenvalues: (0..s.nrows()).map(|i| s[i]).collect(),
            eigenvectors: Some(Eigenvectors::Real(evd.U().to_owned())),
            tag: None,
        })
    } else {
        let values = m.self_adjoint_eigenvalues(Side::Lower).map_err(|e| Error::Eigensolver(format!("{e:?}")))?;
        Ok(Spectrum { eigenvalues: values, eigenvectors: None, tag: None })
    }
}

pub(crate) fn dense_complex(m: Mat<c64>, want_vectors: bool) -> Result<Spectrum> {
    if want_vectors {
        let evd = m.self_adjoint_eigen(Side::Lower).map_err(|e| Error::Eigensolver(format!("{e:?}")))?;
        let s = evd.S().column_vector();
        Ok(Spectrum {
            eigenvalues: (0..s.nrows()).map(|i| s[i].re).collect(),
            eigenvectors: Some(Eigenvectors::Complex(evd.U().to_owned())),
            tag: None,
        })
    } else {
        let values = m.self_adjoint_eigenvalues(Side::Lower).map_err(|e| Error::Eigensolver(format!("{e:?}")))?;
        Ok(Spectrum { eigenvalues: values, eigenvectors: None, tag: None })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fock::{enumerate_basis, Representation};
    use crate::hamiltonian::{build_hamiltonian, HamiltonianSpec};

    #[test]
    fn tight_binding_triangle() {
        let b = enumerate_basis(1, 3, Representation::Site).unwrap();
        let h = build_hamiltonian(&HamiltonianSpec::new(1, 3, 1.0, 0.0), &b).unwrap();
        let s = eigh(&h, true).unwrap();
        let expect = [-1.0, 0.5, 0.5];
        for (a, b) in s.eigenvalues.iter().zip(expect) {
            assert!((a - b).abs() < 1e-12);
        }
        assert!(s.max_residual(&h).unwrap() < 1e-12);
        assert!(s.orthonormality_error().unwrap() < 1e-12);
    }

    #[test]
    fn diagonal_input_is_sorted() {
        let m = Mat::from_fn(3, 3, |i, j| if i == j { c64::new([3.0, 1.0, 2.0][i], 0.0) } else { c64::new(0.0, 0.0) });
        let s = eigh_dense(&m, false).unwrap();
        assert_eq!(s.eigenvalues, vec![1.0, 2.0, 3.0]);
    }

    #[test]
    fn non_hermitian_dense_input_rejected() {
        let mut m = Mat::<c64>::zeros(2, 2);
        m[(0, 1)] = c64::new(1.0, 0.0);
        assert!(matches!(eigh_dense(&m, false), Err(Error::Integrity(_))));
    }

    #[test]
    fn dense_limit_enforced() {
        let b = enumerate_basis(3, 4, Representation::Site).unwrap();
        let h = build_hamiltonian(&HamiltonianSpec::new(3, 4, 1.0, 1.0), &b).unwrap();
        assert!(matches!(eigh_with_limit(&h, false, 10), Err(Error::Capacity(_))));
    }

    #[test]
    fn free_pairs_match_bloch_diagonal() {
        // N=2, L=3, U=0: every pair of single-particle energies -cos(2πk/3)
        let b = enumerate_basis(2, 3, Representation::Site).unwrap();
        let h = build_hamiltonian(&HamiltonianSpec::new(2, 3, 1.0, 0.0), &b).unwrap();
        let got = eigh(&h, false).unwrap().eigenvalues;
        let eps: Vec<f64> = (0..3).map(|k| -(2.0 * std::f64::consts::PI * k as f64 / 3.0).cos()).collect();
        let mut expect = Vec::new();
        for k1 in 0..3 {
            for k2 in k1..3 {
                expect.push(eps[k1] + eps[k2]);
            }
        }
        expect.sort_by(f64::total_cmp);
        for (a, b) in got.iter().zip(&expect) {
            assert!((a - b).abs() < 1e-12, "{got:?} vs {expect:?}");
        }
    }

    #[test]
    fn complex_path_residuals() {
        let b = enumerate_basis(3, 4, Representation::Site).unwrap();
        let spec = HamiltonianSpec::new(3, 4, 1.0, 0.7).with_theta(0.4).with_epsilon(vec![0.1, -0.2, 0.05, 0.0]);
        let h = build_hamiltonian(&spec, &b).unwrap();
        assert!(!h.is_real());
        let s = eigh(&h, true).unwrap();
        assert!(s.max_residual(&h).unwrap() < 1e-8 * h.norm_bound());
        assert!(s.orthonormality_error().unwrap() < 1e-8);
        assert!(s.eigenvalues.windows(2).all(|w| w[0] <= w[1]));
    }
}
