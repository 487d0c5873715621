//! Mesh down-sampling (vertex-subset decimation) and barycentric up-sampling.
//!
//! `Q_d` selects the surviving vertices of a decimation; `Q_u` maps the coarse
//! mesh back to the fine vertex set. Both act on features by sparse products.

mod decimate;
mod quadric;
mod upsample;

use ndarray::{Array2, ArrayView2};

use crate::error::Result;
use crate::sparse::SparseMatrix;

pub use decimate::{decimate, score_contraction, Contraction};
pub use quadric::{compute_vertex_quadrics, VertexQuadric};
pub use upsample::{build_upsampling, closest_point_barycentric};

/// Binary `n x m` selection matrix of a decimation from `m` to `n` vertices.
#[derive(Debug, Clone, PartialEq)]
pub struct DownsampleMatrix {
    pub matrix: SparseMatrix,
    /// Source vertex kept for each coarse vertex, in coarse order.
    pub kept_indices: Vec<usize>,
}

impl DownsampleMatrix {
    /// Recovers the kept indices from a stored selection matrix.
    pub fn from_matrix(matrix: SparseMatrix) -> Result<Self> {
        let mut kept_indices = Vec::with_capacity(matrix.rows());
        let mut used = vec![false; matrix.cols()];
        for r in 0..matrix.rows() {
            let row: Vec<_> = matrix.row(r).collect();
            match row[..] {
                [(c, v)] if v == 1.0 && !used[c] => {
                    used[c] = true;
                    kept_indices.push(c);
                }
                _ => {
                    return Err(crate::Error::Format(format!(
                        "row {r} of a down-sampling matrix must hold a single unused 1"
                    )))
                }
            }
        }
        Ok(Self {
            matrix,
            kept_indices,
        })
    }
}

/// `m x n` interpolation matrix from a coarse mesh back to the fine one.
#[derive(Debug, Clone, PartialEq)]
pub struct UpsampleMatrix {
    pub matrix: SparseMatrix,
}

/// Sparse product `q * features`.
pub fn apply_sampling(q: &SparseMatrix, features: ArrayView2<'_, f64>) -> Result<Array2<f64>> {
    q.mul_dense(features)
}

#[cfg(test)]
pub(crate) mod test_meshes {
    pub use crate::eval::synth::grid;
}
