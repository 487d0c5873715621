//! Binary checkpoints.
//!
//! Layout: the 8 magic bytes `MESHAECK`, a little-endian `u32` version, a
//! little-endian `u64` header length, a JSON header, then little-endian `f64`
//! arrays: template vertices, normalization mean, normalization scale,
//! `lambda_max` per level, and every parameter tensor in declaration order.

use std::io::{Read, Write};
use std::path::Path;

use ndarray::Array2;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::autoencoder::{AutoencoderModel, ModelSpec, Normalization};
use super::hierarchy::{build_hierarchy_with_counts, MeshHierarchy};
use crate::error::{Error, Result};
use crate::mesh::Mesh;
use crate::nn::{Parameterized, TrainConfig};

const MAGIC: &[u8; 8] = b"MESHAECK";
pub const CHECKPOINT_VERSION: u32 = 1;

#[derive(Debug, Serialize, Deserialize)]
struct TensorInfo {
    name: String,
    len: usize,
}

#[derive(Debug, Serialize, Deserialize)]
struct Header {
    spec: ModelSpec,
    config: Option<TrainConfig>,
    vertex_counts: Vec<usize>,
    /// Informational copy; the payload holds the exact values.
    lambda_max: Vec<f64>,
    faces: Vec<[usize; 3]>,
    tensors: Vec<TensorInfo>,
}

/// A trained model with the hierarchy it runs on.
#[derive(Debug, Clone)]
pub struct Checkpoint {
    pub model: AutoencoderModel,
    pub hierarchy: MeshHierarchy,
    pub config: Option<TrainConfig>,
}

pub fn write_checkpoint<W: Write>(
    mut w: W,
    model: &AutoencoderModel,
    hierarchy: &MeshHierarchy,
    config: Option<&TrainConfig>,
) -> Result<()> {
    model.check_hierarchy(hierarchy)?;
    let template = hierarchy.mesh(0);
    let lambda = hierarchy.lambda_max();
    let params = model.params();
    let header = Header {
        spec: model.spec().clone(),
        config: config.cloned(),
        vertex_counts: hierarchy.vertex_counts(),
        lambda_max: lambda.clone(),
        faces: template.faces().to_vec(),
        tensors: params
            .iter()
            .map(|p| TensorInfo {
                name: p.name.clone(),
                len: p.values.len(),
            })
            .collect(),
    };
    let json = serde_json::to_vec(&header).map_err(|e| Error::Format(e.to_string()))?;
    w.write_all(MAGIC)?;
    w.write_all(&CHECKPOINT_VERSION.to_le_bytes())?;
    w.write_all(&(json.len() as u64).to_le_bytes())?;
    w.write_all(&json)?;

    let mut put = |vals: &mut dyn Iterator<Item = f64>| -> Result<()> {
        for v in vals {
            w.write_all(&v.to_le_bytes())?;
        }
        Ok(())
    };
    put(&mut template.vertices().iter().copied())?;
    put(&mut model.normalization.mean.iter().copied())?;
    put(&mut std::iter::once(model.normalization.scale))?;
    put(&mut lambda.iter().copied())?;
    for p in &params {
        put(&mut p.values.iter().copied())?;
    }
    w.flush()?;
    Ok(())
}

struct Payload<'a> {
    bytes: &'a [u8],
}

impl Payload<'_> {
    fn take(&mut self, n: usize) -> Result<Vec<f64>> {
        let need = n.checked_mul(8).ok_or_else(|| Error::Format("size overflow".into()))?;
        if self.bytes.len() < need {
            return Err(Error::Format("checkpoint payload is truncated".into()));
        }
        let (head, rest) = self.bytes.split_at(need);
        self.bytes = rest;
        Ok(head
            .chunks_exact(8)
            .map(|c| f64::from_le_bytes(c.try_into().expect("8 bytes")))
            .collect())
    }
}

/// Reads a checkpoint and rebuilds its hierarchy from the stored template.
/// Fails with a format error if the rebuilt per-level `lambda_max` values do
/// not match the stored ones bit for bit.
pub fn read_checkpoint<R: Read>(mut r: R) -> Result<Checkpoint> {
    let mut magic = [0u8; 8];
    r.read_exact(&mut magic)?;
    if &magic != MAGIC {
        return Err(Error::Format("not a checkpoint file".into()));
    }
    let mut b4 = [0u8; 4];
    r.read_exact(&mut b4)?;
    let version = u32::from_le_bytes(b4);
    if version != CHECKPOINT_VERSION {
        return Err(Error::Format(format!("unsupported checkpoint version {version}")));
    }
    let mut b8 = [0u8; 8];
    r.read_exact(&mut b8)?;
    let len = usize::try_from(u64::from_le_bytes(b8))
        .map_err(|_| Error::Format("header too large".into()))?;
    let mut json = vec![0u8; len];
    r.read_exact(&mut json)?;
    let header: Header =
        serde_json::from_slice(&json).map_err(|e| Error::Format(format!("bad header: {e}")))?;
    let mut bytes = Vec::new();
    r.read_to_end(&mut bytes)?;
    let mut payload = Payload { bytes: &bytes };

    let n = *header
        .vertex_counts
        .first()
        .ok_or_else(|| Error::Format("no vertex counts".into()))?;
    let vertices = Array2::from_shape_vec((n, 3), payload.take(n * 3)?)
        .map_err(|e| Error::Format(e.to_string()))?;
    let mean = Array2::from_shape_vec((n, 3), payload.take(n * 3)?)
        .map_err(|e| Error::Format(e.to_string()))?;
    let scale = payload.take(1)?[0];
    let lambda = payload.take(header.vertex_counts.len())?;

    let template = Mesh::new(vertices, header.faces.clone())?;
    let hierarchy = build_hierarchy_with_counts(&template, &header.vertex_counts)?;
    let rebuilt = hierarchy.lambda_max();
    if rebuilt.iter().zip(&lambda).any(|(a, b)| a.to_bits() != b.to_bits()) {
        return Err(Error::Format(format!(
            "rebuilt hierarchy does not match the checkpoint: lambda_max {rebuilt:?} vs {lambda:?}"
        )));
    }

    let mut model = AutoencoderModel::new(
        header.spec.clone(),
        &hierarchy,
        &mut ChaCha8Rng::seed_from_u64(0),
    )?;
    model.normalization = Normalization { mean, scale };
    {
        let params = model.params_mut();
        if params.len() != header.tensors.len() {
            return Err(Error::Format(format!(
                "checkpoint lists {} tensors, model has {}",
                header.tensors.len(),
                params.len()
            )));
        }
        for (p, info) in params.into_iter().zip(&header.tensors) {
            if p.name != info.name || p.values.len() != info.len {
                return Err(Error::Format(format!(
                    "tensor `{}` ({}) does not match model tensor `{}` ({})",
                    info.name,
                    info.len,
                    p.name,
                    p.values.len()
                )));
            }
            p.values.copy_from_slice(&payload.take(info.len)?);
        }
    }
    if !payload.bytes.is_empty() {
        return Err(Error::Format("trailing bytes after checkpoint payload".into()));
    }
    Ok(Checkpoint {
        model,
        hierarchy,
        config: header.config,
    })
}

pub fn save_checkpoint(
    path: &Path,
    model: &AutoencoderModel,
    hierarchy: &MeshHierarchy,
    config: Option<&TrainConfig>,
) -> Result<()> {
    let f = std::fs::File::create(path)?;
    write_checkpoint(std::io::BufWriter::new(f), model, hierarchy, config)
}

pub fn load_checkpoint(path: &Path) -> Result<Checkpoint> {
    let f = std::fs::File::open(path)?;
    read_checkpoint(std::io::BufReader::new(f))
}
