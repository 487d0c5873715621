//! Per-vertex Euclidean errors and their summaries.

use ndarray::ArrayView2;

use crate::error::{Error, Result};

/// Row-wise Euclidean norm of `pred - gt`.
pub fn euclidean_error(pred: ArrayView2<'_, f64>, gt: ArrayView2<'_, f64>) -> Result<Vec<f64>> {
    if pred.dim() != gt.dim() {
        return Err(Error::arg(format!(
            "prediction {:?} and ground truth {:?} differ in shape",
            pred.dim(),
            gt.dim()
        )));
    }
    Ok(pred
        .rows()
        .into_iter()
        .zip(gt.rows())
        .map(|(p, g)| p.iter().zip(g).map(|(a, b)| (a - b) * (a - b)).sum::<f64>().sqrt())
        .collect())
}

/// Pooled statistics over a set of per-vertex errors.
#[derive(Debug, Clone, PartialEq)]
pub struct ErrorStats {
    pub mean: f64,
    /// Population standard deviation.
    pub std: f64,
    pub median: f64,
    pub max: f64,
    pub count: usize,
}

impl ErrorStats {
    pub fn from_errors(errors: &[f64]) -> Result<Self> {
        if errors.is_empty() {
            return Err(Error::arg("no errors to summarize"));
        }
        if errors.iter().any(|e| !(*e >= 0.0) || !e.is_finite()) {
            return Err(Error::arg("errors must be finite and nonnegative"));
        }
        let n = errors.len() as f64;
        let mean = errors.iter().sum::<f64>() / n;
        let var = errors.iter().map(|e| (e - mean) * (e - mean)).sum::<f64>() / n;
        let mut sorted = errors.to_vec();
        sorted.sort_by(f64::total_cmp);
        let mid = sorted.len() / 2;
        let median = if sorted.len().is_multiple_of(2) {
            0.5 * (sorted[mid - 1] + sorted[mid])
        } else {
            sorted[mid]
        };
        Ok(Self {
            mean,
            std: var.sqrt(),
            median,
            max: sorted[sorted.len() - 1],
            count: errors.len(),
        })
    }
}

/// Fraction of errors `<= edge` for each edge. Edges must be sorted ascending.
pub fn cumulative_error_histogram(errors: &[f64], bin_edges: &[f64]) -> Result<Vec<f64>> {
    if bin_edges.iter().any(|e| !e.is_finite()) || bin_edges.windows(2).any(|w| w[1] < w[0]) {
        return Err(Error::arg("bin edges must be finite and sorted ascending"));
    }
    if errors.iter().any(|e| !(*e >= 0.0)) {
        return Err(Error::arg("errors must be nonnegative"));
    }
    if errors.is_empty() {
        return Ok(vec![1.0; bin_edges.len()]);
    }
    let mut sorted = errors.to_vec();
    sorted.sort_by(f64::total_cmp);
    let n = sorted.len() as f64;
    Ok(bin_edges
        .iter()
        .map(|&edge| sorted.partition_point(|&e| e <= edge) as f64 / n)
        .collect())
}

/// `bins + 1` evenly spaced edges from 0 to `max` (inclusive).
pub fn uniform_edges(max: f64, bins: usize) -> Vec<f64> {
    let bins = bins.max(1);
    (0..=bins)
        .map(|i| if i == bins { max } else { max * i as f64 / bins as f64 })
        .collect()
}

/// `edge_mm,fraction` CSV.
pub fn histogram_csv(edges: &[f64], fractions: &[f64]) -> String {
    let mut out = String::from("edge_mm,fraction\n");
    for (e, f) in edges.iter().zip(fractions) {
        out.push_str(&format!("{e:.6},{f:.6}\n"));
    }
    out
}
