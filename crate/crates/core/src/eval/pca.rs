//! Linear shape model baseline.

use nalgebra::DMatrix;
use ndarray::{Array1, Array2, ArrayView2};

use crate::error::{Error, Result};

/// Mean shape plus `k` orthonormal components over flattened `3n` vectors,
/// in descending singular value order.
#[derive(Debug, Clone, PartialEq)]
pub struct PcaModel {
    pub mean_shape: Array2<f64>,
    /// `k x 3n`, one component per row.
    pub components: Array2<f64>,
    pub singular_values: Vec<f64>,
}

/// Top-`k` right singular vectors of the centered data matrix. Each component
/// is signed so that its largest-magnitude entry (first on ties) is positive.
pub fn pca_fit(train: &[ArrayView2<'_, f64>], k: usize) -> Result<PcaModel> {
    if train.len() < k + 1 {
        return Err(Error::arg(format!(
            "PCA with {k} components needs at least {} meshes, got {}",
            k + 1,
            train.len()
        )));
    }
    let shape = train[0].dim();
    if shape.1 != 3 || train.iter().any(|m| m.dim() != shape) {
        return Err(Error::arg("training meshes must all be n x 3"));
    }
    let d = shape.0 * 3;
    let count = train.len();
    let mut mean = Array2::<f64>::zeros(shape);
    for m in train {
        mean += m;
    }
    mean /= count as f64;

    let mut data = DMatrix::<f64>::zeros(count, d);
    for (r, m) in train.iter().enumerate() {
        for (c, (v, mu)) in m.iter().zip(mean.iter()).enumerate() {
            data[(r, c)] = v - mu;
        }
    }
    let svd = data.svd(false, true);
    let v_t = svd
        .v_t
        .ok_or_else(|| Error::Contract("SVD did not return right singular vectors".into()))?;
    let mut order: Vec<usize> = (0..svd.singular_values.len()).collect();
    order.sort_by(|&a, &b| {
        svd.singular_values[b]
            .total_cmp(&svd.singular_values[a])
            .then(a.cmp(&b))
    });

    let mut components = Array2::zeros((k, d));
    let mut singular_values = Vec::with_capacity(k);
    for (row, &src) in order.iter().take(k).enumerate() {
        let mut comp: Vec<f64> = v_t.row(src).iter().copied().collect();
        let pivot = comp
            .iter()
            .enumerate()
            .fold((0, 0.0f64), |best, (i, &v)| if v.abs() > best.1 { (i, v.abs()) } else { best })
            .0;
        if comp[pivot] < 0.0 {
            comp.iter_mut().for_each(|v| *v = -*v);
        }
        components.row_mut(row).assign(&Array1::from(comp));
        singular_values.push(svd.singular_values[src]);
    }
    Ok(PcaModel {
        mean_shape: mean,
        components,
        singular_values,
    })
}

impl PcaModel {
    pub fn k(&self) -> usize {
        self.components.nrows()
    }

    pub fn num_vertices(&self) -> usize {
        self.mean_shape.nrows()
    }

    /// Components only (`3n * k`); the mean shape is not counted.
    pub fn num_parameters(&self) -> usize {
        self.components.len()
    }

    fn check(&self, x: ArrayView2<'_, f64>) -> Result<()> {
        if x.dim() != self.mean_shape.dim() {
            return Err(Error::arg(format!(
                "expected {:?} vertices, got {:?}",
                self.mean_shape.dim(),
                x.dim()
            )));
        }
        Ok(())
    }

    pub fn encode(&self, x: ArrayView2<'_, f64>) -> Result<Array1<f64>> {
        self.check(x)?;
        let centered: Array1<f64> = x.iter().zip(self.mean_shape.iter()).map(|(a, b)| a - b).collect();
        Ok(self.components.dot(&centered))
    }

    pub fn decode(&self, coeffs: &Array1<f64>) -> Result<Array2<f64>> {
        if coeffs.len() != self.k() {
            return Err(Error::arg(format!(
                "expected {} coefficients, got {}",
                self.k(),
                coeffs.len()
            )));
        }
        let flat = self.components.t().dot(coeffs);
        let offset = flat
            .into_shape_with_order(self.mean_shape.dim())
            .map_err(|e| Error::Contract(e.to_string()))?;
        Ok(offset + &self.mean_shape)
    }

    /// Projection onto the component span, then back to coordinates.
    pub fn reconstruct(&self, x: ArrayView2<'_, f64>) -> Result<Array2<f64>> {
        self.decode(&self.encode(x)?)
    }
}
