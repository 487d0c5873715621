//! Combinatorial graph Laplacian `L = D - A` and its rescaling into `[-1, 1]`.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::mesh::{build_adjacency, Mesh};
use crate::sparse::SparseMatrix;

#[derive(Debug, Clone, PartialEq)]
pub struct Laplacian {
    matrix: SparseMatrix,
    degrees: Vec<f64>,
}

impl Laplacian {
    pub fn matrix(&self) -> &SparseMatrix {
        &self.matrix
    }

    pub fn degrees(&self) -> &[f64] {
        &self.degrees
    }

    pub fn size(&self) -> usize {
        self.degrees.len()
    }

    pub fn from_mesh(mesh: &Mesh) -> Result<Self> {
        build_laplacian(&build_adjacency(mesh)?)
    }
}

/// `2 L / lambda_max - I`.
#[derive(Debug, Clone, PartialEq)]
pub struct ScaledLaplacian {
    matrix: SparseMatrix,
    lambda_max: f64,
}

impl ScaledLaplacian {
    pub fn matrix(&self) -> &SparseMatrix {
        &self.matrix
    }

    pub fn lambda_max(&self) -> f64 {
        self.lambda_max
    }

    pub fn size(&self) -> usize {
        self.matrix.rows()
    }

    /// Adjacency, Laplacian, power-iteration estimate and scaling in one go.
    pub fn from_mesh(mesh: &Mesh, opts: &PowerIteration) -> Result<Self> {
        let lap = Laplacian::from_mesh(mesh)?;
        let lambda = estimate_lambda_max(&lap, opts);
        scale_laplacian(&lap, lambda)
    }
}

pub fn build_laplacian(adjacency: &SparseMatrix) -> Result<Laplacian> {
    if adjacency.rows() != adjacency.cols() {
        return Err(Error::Contract(format!(
            "adjacency must be square, got {:?}",
            adjacency.shape()
        )));
    }
    if !adjacency.is_symmetric() {
        return Err(Error::Contract("adjacency matrix is not symmetric".into()));
    }
    let n = adjacency.rows();
    if let Some(i) = (0..n).find(|&i| adjacency.get(i, i) != 0.0) {
        return Err(Error::Contract(format!("adjacency has a self loop at {i}")));
    }
    let degrees = adjacency.row_sums();
    let off_diagonal = adjacency.triplets().map(|(r, c, v)| (r, c, -v));
    let diagonal = degrees.iter().enumerate().map(|(i, &d)| (i, i, d));
    let matrix = SparseMatrix::from_triplets(n, n, off_diagonal.chain(diagonal))?;
    Ok(Laplacian { matrix, degrees })
}

/// Settings for the largest-eigenvalue estimate.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PowerIteration {
    pub seed: u64,
    /// Stop once successive Rayleigh quotients differ by less than this.
    pub tolerance: f64,
    pub max_iterations: usize,
    /// Returned for a Laplacian without edges.
    pub floor: f64,
    /// Multiplier applied to the converged estimate.
    pub margin: f64,
}

impl Default for PowerIteration {
    fn default() -> Self {
        Self {
            seed: 0,
            tolerance: 1e-8,
            max_iterations: 10_000,
            floor: 2.0,
            margin: 1.0,
        }
    }
}

/// Largest eigenvalue of a (positive semidefinite) Laplacian by power iteration.
pub fn estimate_lambda_max(laplacian: &Laplacian, opts: &PowerIteration) -> f64 {
    let n = laplacian.size();
    let l = laplacian.matrix();
    if l.nnz() == 0 {
        return opts.floor;
    }
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    let mut v: Vec<f64> = (0..n).map(|_| StandardNormal.sample(&mut rng)).collect();
    normalize(&mut v);

    let mut w = vec![0.0; n];
    let mut previous = f64::NAN;
    let mut rayleigh = 0.0;
    for _ in 0..opts.max_iterations {
        for (r, wr) in w.iter_mut().enumerate() {
            *wr = l.row(r).map(|(c, x)| x * v[c]).sum();
        }
        rayleigh = dot(&v, &w);
        let norm = dot(&w, &w).sqrt();
        if norm == 0.0 {
            return opts.floor;
        }
        for (vi, wi) in v.iter_mut().zip(&w) {
            *vi = wi / norm;
        }
        if (rayleigh - previous).abs() < opts.tolerance {
            break;
        }
        previous = rayleigh;
    }
    if rayleigh <= 0.0 {
        return opts.floor;
    }
    rayleigh * opts.margin
}

pub fn scale_laplacian(laplacian: &Laplacian, lambda_max: f64) -> Result<ScaledLaplacian> {
    if !(lambda_max > 0.0 && lambda_max.is_finite()) {
        return Err(Error::arg(format!(
            "lambda_max must be positive and finite, got {lambda_max}"
        )));
    }
    let n = laplacian.size();
    let s = 2.0 / lambda_max;
    let scaled = laplacian.matrix().triplets().map(|(r, c, v)| (r, c, s * v));
    let shift = (0..n).map(|i| (i, i, -1.0));
    let matrix = SparseMatrix::from_triplets(n, n, scaled.chain(shift))?;
    Ok(ScaledLaplacian { matrix, lambda_max })
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn normalize(v: &mut [f64]) {
    let norm = dot(v, v).sqrt();
    v.iter_mut().for_each(|x| *x /= norm);
}

#[cfg(test)]
mod tests {
    use super::*;
    use ndarray::array;

    fn path3() -> SparseMatrix {
        SparseMatrix::from_triplets(
            3,
            3,
            vec![(0, 1, 1.0), (1, 0, 1.0), (1, 2, 1.0), (2, 1, 1.0)],
        )
        .unwrap()
    }

    fn k4() -> SparseMatrix {
        let t = (0..4).flat_map(|i| (0..4).filter(move |&j| j != i).map(move |j| (i, j, 1.0)));
        SparseMatrix::from_triplets(4, 4, t).unwrap()
    }

    fn edge() -> Laplacian {
        let a = SparseMatrix::from_triplets(2, 2, vec![(0, 1, 1.0), (1, 0, 1.0)]).unwrap();
        build_laplacian(&a).unwrap()
    }

    #[test]
    fn path_graph_laplacian() {
        let l = build_laplacian(&path3()).unwrap();
        assert_eq!(
            l.matrix().to_dense(),
            array![[1., -1., 0.], [-1., 2., -1.], [0., -1., 1.]]
        );
        assert_eq!(l.degrees(), &[1.0, 2.0, 1.0]);
    }

    #[test]
    fn isolated_vertex_laplacian_is_zero() {
        let l = build_laplacian(&SparseMatrix::zeros(1, 1)).unwrap();
        assert_eq!(l.matrix().nnz(), 0);
        assert_eq!(l.degrees(), &[0.0]);
    }

    #[test]
    fn k4_laplacian() {
        let l = build_laplacian(&k4()).unwrap();
        let d = l.matrix().to_dense();
        for i in 0..4 {
            for j in 0..4 {
                assert_eq!(d[[i, j]], if i == j { 3.0 } else { -1.0 });
            }
        }
        assert!(l.matrix().row_sums().iter().all(|&s| s == 0.0));
    }

    #[test]
    fn non_symmetric_adjacency_is_a_contract_violation() {
        let a = SparseMatrix::from_triplets(2, 2, vec![(0, 1, 1.0)]).unwrap();
        assert!(matches!(build_laplacian(&a), Err(Error::Contract(_))));
    }

    #[test]
    fn lambda_max_small_graphs() {
        let opts = PowerIteration::default();
        let rel = |a: f64, b: f64| ((a - b) / b).abs();
        assert!(rel(estimate_lambda_max(&edge(), &opts), 2.0) < 1e-6);
        let k4 = build_laplacian(&k4()).unwrap();
        assert!(rel(estimate_lambda_max(&k4, &opts), 4.0) < 1e-6);
        let p3 = build_laplacian(&path3()).unwrap();
        assert!(rel(estimate_lambda_max(&p3, &opts), 3.0) < 1e-6);
    }

    #[test]
    fn lambda_max_is_seed_deterministic() {
        let p3 = build_laplacian(&path3()).unwrap();
        let opts = PowerIteration {
            seed: 42,
            ..Default::default()
        };
        assert_eq!(
            estimate_lambda_max(&p3, &opts).to_bits(),
            estimate_lambda_max(&p3, &opts).to_bits()
        );
    }

    #[test]
    fn edgeless_laplacian_uses_floor() {
        let l = build_laplacian(&SparseMatrix::zeros(3, 3)).unwrap();
        let lambda = estimate_lambda_max(&l, &PowerIteration::default());
        assert_eq!(lambda, 2.0);
        let s = scale_laplacian(&l, lambda).unwrap();
        assert_eq!(s.matrix().to_dense(), -ndarray::Array2::<f64>::eye(3));
    }

    #[test]
    fn scaled_edge() {
        let s = scale_laplacian(&edge(), 2.0).unwrap();
        assert_eq!(s.matrix().to_dense(), array![[0., -1.], [-1., 0.]]);
    }

    #[test]
    fn non_positive_lambda_is_rejected() {
        assert!(matches!(scale_laplacian(&edge(), 0.0), Err(Error::Argument(_))));
        assert!(matches!(scale_laplacian(&edge(), -1.0), Err(Error::Argument(_))));
    }
}
