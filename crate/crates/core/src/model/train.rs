//! Mini-batch training loop.

use std::io::Write;

use ndarray::{Array2, ArrayView2};
use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use super::autoencoder::{AutoencoderModel, ModelSpec, Normalization};
use super::hierarchy::MeshHierarchy;
use crate::error::{Error, Result};
use crate::nn::{decay_learning_rate, sgd_momentum_step, OptimizerState, Parameterized, TrainConfig};

const INIT_STREAM: u64 = 0;
const TRAIN_STREAM: u64 = 1;

/// One epoch of training history. Losses are in normalized units and are
/// averaged over the samples of the epoch.
#[derive(Debug, Clone, PartialEq)]
pub struct EpochRecord {
    pub epoch: usize,
    pub lr: f64,
    pub train_l1: f64,
    pub train_kl: f64,
    pub train_total: f64,
    pub val_l1: Option<f64>,
}

pub const HISTORY_HEADER: &str = "epoch,lr,train_l1,train_kl,train_total,val_l1";

pub fn write_history_csv<W: Write>(records: &[EpochRecord], mut w: W) -> Result<()> {
    writeln!(w, "{HISTORY_HEADER}")?;
    for r in records {
        let val = r.val_l1.map(|v| format!("{v:.9e}")).unwrap_or_default();
        writeln!(
            w,
            "{},{:.9e},{:.9e},{:.9e},{:.9e},{val}",
            r.epoch, r.lr, r.train_l1, r.train_kl, r.train_total
        )?;
    }
    Ok(())
}

/// Freshly initialized model for `config`, seeded from `config.seed`.
pub fn build_model(config: &TrainConfig, hierarchy: &MeshHierarchy) -> Result<AutoencoderModel> {
    config.validate()?;
    let spec = ModelSpec::with_levels(
        config.k_order,
        config.z_dim,
        config.variational(),
        hierarchy.num_levels(),
    );
    build_model_with_spec(spec, config.seed, hierarchy)
}

pub fn build_model_with_spec(
    spec: ModelSpec,
    seed: u64,
    hierarchy: &MeshHierarchy,
) -> Result<AutoencoderModel> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(INIT_STREAM);
    AutoencoderModel::new(spec, hierarchy, &mut rng)
}

/// Mean L1 reconstruction error (normalized units) with `z = mu`.
pub fn evaluate_l1(
    model: &AutoencoderModel,
    hierarchy: &MeshHierarchy,
    frames: &[ArrayView2<'_, f64>],
    batch_size: usize,
) -> Result<f64> {
    if frames.is_empty() {
        return Err(Error::arg("no frames to evaluate"));
    }
    let mut sum = 0.0;
    for chunk in frames.chunks(batch_size.max(1)) {
        sum += model.reconstruction_l1(hierarchy, chunk)? * chunk.len() as f64;
    }
    Ok(sum / frames.len() as f64)
}

/// Fits the normalization to `train`, then runs `config.epochs` epochs of
/// shuffled mini-batch SGD with momentum. `val` may be empty.
pub fn train_autoencoder(
    model: &mut AutoencoderModel,
    hierarchy: &MeshHierarchy,
    train: &[ArrayView2<'_, f64>],
    val: &[ArrayView2<'_, f64>],
    config: &TrainConfig,
) -> Result<Vec<EpochRecord>> {
    config.validate()?;
    model.check_hierarchy(hierarchy)?;
    if train.is_empty() {
        return Err(Error::arg("training set is empty"));
    }
    model.normalization = Normalization::fit(train.iter().copied())?;

    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    rng.set_stream(TRAIN_STREAM);
    let mut state = OptimizerState::new(
        &*model,
        config.learning_rate,
        config.lr_decay,
        config.momentum,
    );
    let z_dim = model.z_dim();
    let mut order: Vec<usize> = (0..train.len()).collect();
    let mut history = Vec::with_capacity(config.epochs);
    for epoch in 0..config.epochs {
        order.shuffle(&mut rng);
        let (mut l1, mut kl, mut total) = (0.0, 0.0, 0.0);
        for idx in order.chunks(config.batch_size) {
            let batch: Vec<_> = idx.iter().map(|&i| train[i]).collect();
            let noise = model.is_variational().then(|| {
                Array2::from_shape_simple_fn((batch.len(), z_dim), || {
                    StandardNormal.sample(&mut rng)
                })
            });
            let (obj, grads) = model.objective(
                hierarchy,
                &batch,
                noise.as_ref().map(|n| n.view()),
                config.kl_weight_at(epoch),
                config.l1_weight_penalty,
            )?;
            if !obj.total.is_finite() {
                return Err(Error::Divergence {
                    epoch,
                    detail: format!("loss became {}", obj.total),
                });
            }
            sgd_momentum_step(model.params_mut(), &grads, &mut state)?;
            let w = batch.len() as f64;
            l1 += obj.l1 * w;
            kl += obj.kl * w;
            total += obj.total * w;
        }
        let n = train.len() as f64;
        let val_l1 = if val.is_empty() {
            None
        } else {
            Some(evaluate_l1(model, hierarchy, val, config.batch_size)?)
        };
        history.push(EpochRecord {
            epoch,
            lr: state.current_lr,
            train_l1: l1 / n,
            train_kl: kl / n,
            train_total: total / n,
            val_l1,
        });
        decay_learning_rate(&mut state);
    }
    Ok(history)
}
