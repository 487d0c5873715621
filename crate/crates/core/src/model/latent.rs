//! Latent-space sweeps, Gaussian sampling and latent statistics.

use std::io::Write;
use std::path::Path;

use ndarray::{Array1, Array2, ArrayView2};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use super::autoencoder::AutoencoderModel;
use super::hierarchy::MeshHierarchy;
use crate::error::{Error, Result};
use crate::mesh::Mesh;

/// Sweep steps `j = -4..=4`.
pub const SWEEP_STEPS: std::ops::RangeInclusive<i32> = -4..=4;
pub const SWEEP_FACTOR: f64 = 0.3;

/// Decodes `z` with component `dim` scaled by `1 + factor * j` for each `j`
/// in [`SWEEP_STEPS`]. Entry `j = 0` is the plain reconstruction.
pub fn latent_sweep(
    model: &AutoencoderModel,
    hierarchy: &MeshHierarchy,
    vertices: ArrayView2<'_, f64>,
    dim: usize,
    factor: f64,
) -> Result<Vec<(i32, Array2<f64>)>> {
    if dim >= model.z_dim() {
        return Err(Error::arg(format!(
            "latent dimension {dim} out of range for z_dim {}",
            model.z_dim()
        )));
    }
    let z = model.encode(hierarchy, vertices)?.mu;
    SWEEP_STEPS
        .map(|j| {
            let mut zt = z.clone();
            zt[dim] *= 1.0 + factor * j as f64;
            Ok((j, model.decode(hierarchy, zt.view())?))
        })
        .collect()
}

/// Standard normal draws rejected outside `[-sigma_range, sigma_range]`.
pub fn truncated_normal(rng: &mut ChaCha8Rng, len: usize, sigma_range: f64) -> Array1<f64> {
    Array1::from_shape_simple_fn(len, || loop {
        let v: f64 = StandardNormal.sample(rng);
        if v.abs() <= sigma_range {
            return v;
        }
    })
}

/// Decodes `count` latent vectors drawn from a truncated unit Gaussian.
pub fn sample_gaussian(
    model: &AutoencoderModel,
    hierarchy: &MeshHierarchy,
    count: usize,
    sigma_range: f64,
    seed: u64,
) -> Result<Vec<Array2<f64>>> {
    if sigma_range <= 0.0 || !sigma_range.is_finite() {
        return Err(Error::arg("sigma range must be positive"));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count)
        .map(|_| {
            let z = truncated_normal(&mut rng, model.z_dim(), sigma_range);
            model.decode(hierarchy, z.view())
        })
        .collect()
}

/// Per-dimension moments of the latent codes of a set of meshes.
#[derive(Debug, Clone, PartialEq)]
pub struct LatentStats {
    pub mean: Vec<f64>,
    /// Aggregate variance: spread of the means plus, for variational models,
    /// the average posterior variance.
    pub variance: Vec<f64>,
}

impl LatentStats {
    pub fn mean_norm(&self) -> f64 {
        self.mean.iter().map(|m| m * m).sum::<f64>().sqrt()
    }

    /// Mean of `|variance_d - 1|`.
    pub fn variance_gap(&self) -> f64 {
        self.variance.iter().map(|v| (v - 1.0).abs()).sum::<f64>() / self.variance.len() as f64
    }
}

pub fn latent_statistics(
    model: &AutoencoderModel,
    hierarchy: &MeshHierarchy,
    frames: &[ArrayView2<'_, f64>],
) -> Result<LatentStats> {
    if frames.is_empty() {
        return Err(Error::arg("no frames"));
    }
    let mut codes = Vec::with_capacity(frames.len());
    for chunk in frames.chunks(32) {
        codes.extend(model.encode_batch(hierarchy, chunk)?);
    }
    let d = model.z_dim();
    let n = codes.len() as f64;
    let mut mean = vec![0.0; d];
    let mut post = vec![0.0; d];
    for c in &codes {
        for k in 0..d {
            mean[k] += c.mu[k] / n;
            if let Some(lv) = &c.log_var {
                post[k] += lv[k].exp() / n;
            }
        }
    }
    let mut variance = post;
    for c in &codes {
        for k in 0..d {
            variance[k] += (c.mu[k] - mean[k]).powi(2) / n;
        }
    }
    Ok(LatentStats { mean, variance })
}

/// Mean over all pairs of the mean per-vertex Euclidean distance.
pub fn mean_pairwise_distance(meshes: &[Array2<f64>]) -> f64 {
    let mut sum = 0.0;
    let mut pairs = 0usize;
    for i in 0..meshes.len() {
        for j in i + 1..meshes.len() {
            let d = &meshes[i] - &meshes[j];
            let per_vertex: f64 = d
                .rows()
                .into_iter()
                .map(|r| r.dot(&r).sqrt())
                .sum::<f64>()
                / d.nrows() as f64;
            sum += per_vertex;
            pairs += 1;
        }
    }
    if pairs == 0 {
        0.0
    } else {
        sum / pairs as f64
    }
}

/// Writes `<prefix>_<i>.obj` for each mesh plus `manifest.txt` with one
/// `file<TAB>label` line per mesh.
pub fn write_mesh_series(
    dir: &Path,
    prefix: &str,
    faces: &[[usize; 3]],
    meshes: &[(String, Array2<f64>)],
) -> Result<()> {
    std::fs::create_dir_all(dir)?;
    let mut manifest = std::io::BufWriter::new(std::fs::File::create(dir.join("manifest.txt"))?);
    let width = meshes.len().saturating_sub(1).to_string().len().max(3);
    for (i, (label, v)) in meshes.iter().enumerate() {
        let name = format!("{prefix}_{i:0width$}.obj");
        Mesh::new(v.clone(), faces.to_vec())?.save_obj(&dir.join(&name))?;
        writeln!(manifest, "{name}\t{label}")?;
    }
    manifest.flush()?;
    Ok(())
}
