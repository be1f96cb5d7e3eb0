//! Hermitian eigendecomposition of the Hamiltonian blocks.

use nalgebra::{DVector, SymmetricEigen};
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::model::CMatrix;

const HERMITIAN_TOL: f64 = 1e-12;

/// `H = U diag(Λ) U†` with eigenvalues ascending.
#[derive(Debug, Clone)]
pub struct SpectralDecomposition {
    pub eigenvalues: DVector<f64>,
    pub eigenvectors: CMatrix,
}

impl SpectralDecomposition {
    pub fn dim(&self) -> usize {
        self.eigenvalues.len()
    }

    /// `U diag(Λ) U†`.
    pub fn reconstruct(&self) -> CMatrix {
        let mut scaled = self.eigenvectors.clone();
        for (k, mut col) in scaled.column_iter_mut().enumerate() {
            col *= Complex64::new(self.eigenvalues[k], 0.0);
        }
        scaled * self.eigenvectors.adjoint()
    }

    /// `U f(Λ) U† v` for a scalar spectral function `f`.
    pub fn apply_function<F>(&self, v: &DVector<Complex64>, f: F) -> DVector<Complex64>
    where
        F: Fn(f64) -> Complex64,
    {
        let mut coeffs = self.eigenvectors.ad_mul(v);
        for (c, &e) in coeffs.iter_mut().zip(self.eigenvalues.iter()) {
            *c *= f(e);
        }
        &self.eigenvectors * coeffs
    }
}

/// Diagonalize a Hermitian matrix.
///
/// Degenerate eigenvalues keep the solver's relative order after a stable
/// sort; the choice of basis inside a degenerate subspace does not change
/// any spectral function of the matrix.
pub fn diagonalize(block: &CMatrix) -> Result<SpectralDecomposition> {
    let n = block.nrows();
    if block.ncols() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            found: block.ncols(),
        });
    }
    for i in 0..n {
        for j in i..n {
            if (block[(i, j)] - block[(j, i)].conj()).norm() > HERMITIAN_TOL {
                return Err(Error::InvalidParams(format!(
                    "matrix is not Hermitian at ({i}, {j})"
                )));
            }
        }
    }
    let eig = SymmetricEigen::try_new(block.clone(), f64::EPSILON, 10_000 * n.max(1))
        .ok_or(Error::NoConvergence { dim: n })?;

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
    let eigenvalues = DVector::from_iterator(n, order.iter().map(|&k| eig.eigenvalues[k]));
    let eigenvectors = CMatrix::from_fn(n, n, |i, k| eig.eigenvectors[(i, order[k])]);
    Ok(SpectralDecomposition {
        eigenvalues,
        eigenvectors,
    })
}
