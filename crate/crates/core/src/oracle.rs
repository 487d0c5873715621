//! Dense reference computations for small meshes (n up to about 50).
//!
//! These are deliberately naive: a cyclic Jacobi eigensolver and explicit
//! graph Fourier filtering. They exist to check the sparse, recursive code
//! paths, not to be used in training.

use ndarray::{Array1, Array2, ArrayView2};

use crate::error::{Error, Result};
use crate::laplacian::Laplacian;

/// Eigendecomposition of a real symmetric matrix: `a = V diag(w) V^T`.
#[derive(Debug, Clone)]
pub struct SymmetricEigen {
    /// Ascending.
    pub eigenvalues: Array1<f64>,
    /// One eigenvector per column, orthonormal.
    pub eigenvectors: Array2<f64>,
}

/// Cyclic Jacobi rotations until the off-diagonal Frobenius norm drops below `1e-12`.
pub fn jacobi_eigen(a: ArrayView2<'_, f64>) -> Result<SymmetricEigen> {
    let n = a.nrows();
    if a.ncols() != n {
        return Err(Error::arg("jacobi_eigen needs a square matrix"));
    }
    let mut m = a.to_owned();
    let mut v = Array2::<f64>::eye(n);
    const MAX_SWEEPS: usize = 100;
    for _ in 0..MAX_SWEEPS {
        let off: f64 = (0..n)
            .flat_map(|i| (0..n).filter(move |&j| j != i).map(move |j| (i, j)))
            .map(|(i, j)| m[[i, j]] * m[[i, j]])
            .sum::<f64>()
            .sqrt();
        if off < 1e-12 {
            break;
        }
        for p in 0..n {
            for q in (p + 1)..n {
                let apq = m[[p, q]];
                if apq == 0.0 {
                    continue;
                }
                let theta = (m[[q, q]] - m[[p, p]]) / (2.0 * apq);
                let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                let t = if theta == 0.0 { 1.0 } else { t };
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;
                for k in 0..n {
                    let mkp = m[[k, p]];
                    let mkq = m[[k, q]];
                    m[[k, p]] = c * mkp - s * mkq;
                    m[[k, q]] = s * mkp + c * mkq;
                }
                for k in 0..n {
                    let mpk = m[[p, k]];
                    let mqk = m[[q, k]];
                    m[[p, k]] = c * mpk - s * mqk;
                    m[[q, k]] = s * mpk + c * mqk;
                }
                for k in 0..n {
                    let vkp = v[[k, p]];
                    let vkq = v[[k, q]];
                    v[[k, p]] = c * vkp - s * vkq;
                    v[[k, q]] = s * vkp + c * vkq;
                }
            }
        }
    }
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| m[[i, i]].total_cmp(&m[[j, j]]));
    let eigenvalues = Array1::from_iter(order.iter().map(|&i| m[[i, i]]));
    let mut eigenvectors = Array2::zeros((n, n));
    for (dst, &src) in order.iter().enumerate() {
        eigenvectors.column_mut(dst).assign(&v.column(src));
    }
    Ok(SymmetricEigen {
        eigenvalues,
        eigenvectors,
    })
}

/// Graph Fourier basis of a Laplacian.
#[derive(Debug, Clone)]
pub struct SpectralOracle {
    pub eigenvectors: Array2<f64>,
    pub eigenvalues: Array1<f64>,
}

impl SpectralOracle {
    pub fn new(laplacian: &Laplacian) -> Result<Self> {
        let dense = laplacian.matrix().to_dense();
        let SymmetricEigen {
            eigenvalues,
            eigenvectors,
        } = jacobi_eigen(dense.view())?;
        Ok(Self {
            eigenvectors,
            eigenvalues,
        })
    }

    pub fn size(&self) -> usize {
        self.eigenvalues.len()
    }

    /// `U^T x`.
    pub fn forward(&self, x: ArrayView2<'_, f64>) -> Array2<f64> {
        self.eigenvectors.t().dot(&x)
    }

    /// `U x_hat`.
    pub fn inverse(&self, x_hat: ArrayView2<'_, f64>) -> Array2<f64> {
        self.eigenvectors.dot(&x_hat)
    }

    pub fn reconstruct(&self) -> Array2<f64> {
        let scaled = &self.eigenvectors * &self.eigenvalues.view().insert_axis(ndarray::Axis(0));
        scaled.dot(&self.eigenvectors.t())
    }
}

/// Chebyshev polynomial `T_k(x)` in closed form.
pub fn chebyshev_t(k: usize, x: f64) -> f64 {
    let k = k as f64;
    if x.abs() <= 1.0 {
        (k * x.acos()).cos()
    } else if x > 1.0 {
        (k * x.acosh()).cosh()
    } else {
        let sign = if (k as u64).is_multiple_of(2) { 1.0 } else { -1.0 };
        sign * (k * (-x).acosh()).cosh()
    }
}

/// `U g(L~) U^T x` where `g(l) = sum_k theta_k T_k(2 l / lambda_max - 1)`,
/// the same filter applied to every feature column.
pub fn dense_spectral_filter(
    oracle: &SpectralOracle,
    lambda_max: f64,
    x: ArrayView2<'_, f64>,
    theta: &[f64],
) -> Result<Array2<f64>> {
    if x.nrows() != oracle.size() {
        return Err(Error::arg(format!(
            "features have {} rows, basis has {}",
            x.nrows(),
            oracle.size()
        )));
    }
    if theta.is_empty() {
        return Err(Error::arg("need at least one Chebyshev coefficient"));
    }
    let gains = oracle.eigenvalues.mapv(|l| {
        let s = 2.0 * l / lambda_max - 1.0;
        theta
            .iter()
            .enumerate()
            .map(|(k, t)| t * chebyshev_t(k, s))
            .sum::<f64>()
    });
    let mut spectrum = oracle.forward(x);
    for (mut row, g) in spectrum.rows_mut().into_iter().zip(gains.iter()) {
        row *= *g;
    }
    Ok(oracle.inverse(spectrum.view()))
}
