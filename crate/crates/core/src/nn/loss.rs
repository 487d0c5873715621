use ndarray::{Array2, ArrayView2, Zip};

use super::{ParamKind, Parameterized};
use crate::error::{Error, Result};

/// Mean absolute error over all entries; gradient `sign(pred - target) / count`
/// with `sign(0) = 0`.
pub fn l1_loss(pred: ArrayView2<'_, f64>, target: ArrayView2<'_, f64>) -> Result<(f64, Array2<f64>)> {
    if pred.dim() != target.dim() {
        return Err(Error::arg(format!(
            "prediction {:?} and target {:?} differ in shape",
            pred.dim(),
            target.dim()
        )));
    }
    let count = pred.len().max(1) as f64;
    let mut loss = 0.0;
    let mut grad = Array2::zeros(pred.dim());
    Zip::from(&mut grad)
        .and(&pred)
        .and(&target)
        .for_each(|g, &p, &t| {
            let d = p - t;
            loss += d.abs();
            *g = if d > 0.0 {
                1.0 / count
            } else if d < 0.0 {
                -1.0 / count
            } else {
                0.0
            };
        });
    Ok((loss / count, grad))
}

/// KL divergence of `N(mu, exp(log_var))` from the unit Gaussian, summed over
/// every entry, with its gradients.
#[derive(Debug, Clone)]
pub struct KlTerm {
    pub loss: f64,
    pub grad_mu: Vec<f64>,
    pub grad_log_var: Vec<f64>,
}

pub fn kl_divergence(mu: &[f64], log_var: &[f64]) -> Result<KlTerm> {
    if mu.len() != log_var.len() {
        return Err(Error::arg("mu and log_var lengths differ"));
    }
    let mut loss = 0.0;
    let mut grad_log_var = Vec::with_capacity(mu.len());
    for (&m, &lv) in mu.iter().zip(log_var) {
        let var = lv.exp();
        loss += -0.5 * (1.0 + lv - m * m - var);
        grad_log_var.push(0.5 * (var - 1.0));
    }
    Ok(KlTerm {
        loss,
        grad_mu: mu.to_vec(),
        grad_log_var,
    })
}

/// `coefficient * sum |w|` over weight tensors (biases excluded). Returns one
/// gradient vector per parameter tensor, zeros for biases.
pub fn l1_weight_penalty<P: Parameterized + ?Sized>(params: &P, coefficient: f64) -> (f64, Vec<Vec<f64>>) {
    let mut total = 0.0;
    let grads = params
        .params()
        .into_iter()
        .map(|p| match p.kind {
            ParamKind::Bias => vec![0.0; p.values.len()],
            ParamKind::Weight => {
                if coefficient == 0.0 {
                    return vec![0.0; p.values.len()];
                }
                p.values
                    .iter()
                    .map(|&w| {
                        total += w.abs();
                        if w > 0.0 {
                            coefficient
                        } else if w < 0.0 {
                            -coefficient
                        } else {
                            0.0
                        }
                    })
                    .collect()
            }
        })
        .collect();
    (coefficient * total, grads)
}
