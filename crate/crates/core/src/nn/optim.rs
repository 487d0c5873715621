use super::{ParamMut, Parameterized};
use crate::error::{Error, Result};

/// Classical momentum buffers plus the exponentially decayed learning rate.
#[derive(Debug, Clone, PartialEq)]
pub struct OptimizerState {
    pub velocities: Vec<Vec<f64>>,
    pub initial_lr: f64,
    pub current_lr: f64,
    pub lr_decay: f64,
    pub momentum: f64,
    pub epoch: usize,
}

impl OptimizerState {
    /// Zero velocities shaped like the parameters of `model`.
    pub fn new<P: Parameterized + ?Sized>(model: &P, lr: f64, lr_decay: f64, momentum: f64) -> Self {
        Self {
            velocities: model.params().iter().map(|p| vec![0.0; p.values.len()]).collect(),
            initial_lr: lr,
            current_lr: lr,
            lr_decay,
            momentum,
            epoch: 0,
        }
    }
}

/// `v <- momentum * v + g; w <- w - lr * v` for every tensor.
///
/// A non-finite gradient aborts the step before any parameter is touched.
pub fn sgd_momentum_step(
    params: Vec<ParamMut<'_>>,
    grads: &[Vec<f64>],
    state: &mut OptimizerState,
) -> Result<()> {
    if params.len() != grads.len() || params.len() != state.velocities.len() {
        return Err(Error::arg(format!(
            "{} parameter tensors, {} gradients, {} velocity buffers",
            params.len(),
            grads.len(),
            state.velocities.len()
        )));
    }
    for (p, g) in params.iter().zip(grads) {
        if p.values.len() != g.len() {
            return Err(Error::arg(format!(
                "gradient for `{}` has {} entries, expected {}",
                p.name,
                g.len(),
                p.values.len()
            )));
        }
        if g.iter().any(|v| !v.is_finite()) {
            return Err(Error::Divergence {
                epoch: state.epoch,
                detail: format!("non-finite gradient in `{}`", p.name),
            });
        }
    }
    let lr = state.current_lr;
    let mu = state.momentum;
    for ((p, g), v) in params.into_iter().zip(grads).zip(state.velocities.iter_mut()) {
        for ((w, &gi), vi) in p.values.iter_mut().zip(g).zip(v.iter_mut()) {
            *vi = mu * *vi + gi;
            *w -= lr * *vi;
        }
    }
    Ok(())
}

/// Advances one epoch: `lr = lr_0 * decay^epoch`.
pub fn decay_learning_rate(state: &mut OptimizerState) {
    state.epoch += 1;
    state.current_lr = state.initial_lr * state.lr_decay.powi(state.epoch as i32);
}
