//! Dense layers, losses and the SGD-with-momentum optimizer.

mod config;
mod dense;
mod loss;
mod optim;

pub use config::TrainConfig;
pub use dense::{dense_backward, dense_forward, DenseCache, DenseGrads, DenseLayer};
pub use loss::{kl_divergence, l1_loss, l1_weight_penalty, KlTerm};
pub use optim::{decay_learning_rate, sgd_momentum_step, OptimizerState};

/// Whether a tensor is subject to the weight penalty.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ParamKind {
    Weight,
    Bias,
}

#[derive(Debug)]
pub struct Param<'a> {
    pub name: String,
    pub kind: ParamKind,
    pub values: &'a [f64],
}

#[derive(Debug)]
pub struct ParamMut<'a> {
    pub name: String,
    pub kind: ParamKind,
    pub values: &'a mut [f64],
}

/// Anything holding trainable tensors, visited in a fixed declaration order.
pub trait Parameterized {
    fn params(&self) -> Vec<Param<'_>>;
    fn params_mut(&mut self) -> Vec<ParamMut<'_>>;

    fn num_parameters(&self) -> usize {
        self.params().iter().map(|p| p.values.len()).sum()
    }
}

impl Parameterized for crate::spectral_conv::ChebConvLayer {
    fn params(&self) -> Vec<Param<'_>> {
        vec![
            Param {
                name: "theta".into(),
                kind: ParamKind::Weight,
                values: self.theta().as_slice().expect("standard layout"),
            },
            Param {
                name: "bias".into(),
                kind: ParamKind::Bias,
                values: self.bias().as_slice().expect("standard layout"),
            },
        ]
    }

    fn params_mut(&mut self) -> Vec<ParamMut<'_>> {
        let (theta, bias) = self.parts_mut();
        let theta = theta.as_slice_mut().expect("standard layout");
        let bias = bias.as_slice_mut().expect("standard layout");
        vec![
            ParamMut {
                name: "theta".into(),
                kind: ParamKind::Weight,
                values: theta,
            },
            ParamMut {
                name: "bias".into(),
                kind: ParamKind::Bias,
                values: bias,
            },
        ]
    }
}
