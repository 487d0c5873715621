use ndarray::{Array1, Array2, ArrayView2, Axis};
use rand::Rng;

use super::{Param, ParamKind, ParamMut, Parameterized};
use crate::error::{Error, Result};

/// Fully connected layer `y = x W + b` on row-vector samples.
#[derive(Debug, Clone, PartialEq)]
pub struct DenseLayer {
    pub weights: Array2<f64>,
    pub bias: Array1<f64>,
}

impl DenseLayer {
    pub fn zeros(d_in: usize, d_out: usize) -> Self {
        Self {
            weights: Array2::zeros((d_in, d_out)),
            bias: Array1::zeros(d_out),
        }
    }

    pub fn glorot<R: Rng>(d_in: usize, d_out: usize, rng: &mut R) -> Self {
        let s = (6.0 / ((d_in + d_out) as f64)).sqrt();
        Self {
            weights: Array2::from_shape_simple_fn((d_in, d_out), || rng.random_range(-s..=s)),
            bias: Array1::zeros(d_out),
        }
    }

    pub fn d_in(&self) -> usize {
        self.weights.nrows()
    }

    pub fn d_out(&self) -> usize {
        self.weights.ncols()
    }
}

impl Parameterized for DenseLayer {
    fn params(&self) -> Vec<Param<'_>> {
        vec![
            Param {
                name: "weights".into(),
                kind: ParamKind::Weight,
                values: self.weights.as_slice().expect("standard layout"),
            },
            Param {
                name: "bias".into(),
                kind: ParamKind::Bias,
                values: self.bias.as_slice().expect("standard layout"),
            },
        ]
    }

    fn params_mut(&mut self) -> Vec<ParamMut<'_>> {
        vec![
            ParamMut {
                name: "weights".into(),
                kind: ParamKind::Weight,
                values: self.weights.as_slice_mut().expect("standard layout"),
            },
            ParamMut {
                name: "bias".into(),
                kind: ParamKind::Bias,
                values: self.bias.as_slice_mut().expect("standard layout"),
            },
        ]
    }
}

#[derive(Debug, Clone)]
pub struct DenseCache {
    input: Array2<f64>,
}

#[derive(Debug, Clone)]
pub struct DenseGrads {
    pub x: Array2<f64>,
    pub weights: Array2<f64>,
    pub bias: Array1<f64>,
}

pub fn dense_forward(layer: &DenseLayer, x: ArrayView2<'_, f64>) -> Result<(Array2<f64>, DenseCache)> {
    if x.ncols() != layer.d_in() {
        return Err(Error::arg(format!(
            "dense layer expects {} inputs, got {}",
            layer.d_in(),
            x.ncols()
        )));
    }
    let mut y = x.dot(&layer.weights);
    y += &layer.bias;
    Ok((y, DenseCache { input: x.to_owned() }))
}

pub fn dense_backward(
    layer: &DenseLayer,
    cache: &DenseCache,
    grad_y: ArrayView2<'_, f64>,
) -> Result<DenseGrads> {
    if grad_y.dim() != (cache.input.nrows(), layer.d_out()) {
        return Err(Error::arg(format!(
            "dense gradient has shape {:?}, expected ({}, {})",
            grad_y.dim(),
            cache.input.nrows(),
            layer.d_out()
        )));
    }
    Ok(DenseGrads {
        x: grad_y.dot(&layer.weights.t()),
        weights: cache.input.t().dot(&grad_y),
        bias: grad_y.sum_axis(Axis(0)),
    })
}
