//! Chebyshev spectral graph convolution and ReLU, with hand-written gradients.
//!
//! A layer filters each input feature with a degree `K-1` polynomial of the
//! scaled Laplacian, one coefficient vector per (input, output) feature pair:
//!
//! ```text
//! y_j = sum_i sum_k theta[k, i, j] T_k(L~) x_i + b_j
//! ```
//!
//! `T_k(L~) x` is never formed as a matrix; it is produced by the three-term
//! recurrence `T_k = 2 L~ T_{k-1} - T_{k-2}` on the features themselves. The
//! recurrence outputs are stacked side by side, so the coefficient contraction
//! becomes one dense product `[T_0 x | ... | T_{K-1} x] * Theta`.
//!
//! Batches are `(batch * n) x F` arrays holding the samples one after another.

use ndarray::{s, Array1, Array2, ArrayView2, ArrayViewMut2, Axis};
use rand::Rng;

use crate::error::{Error, Result};
use crate::laplacian::ScaledLaplacian;

pub type FeatureMatrix = Array2<f64>;

#[derive(Debug, Clone, PartialEq)]
pub struct ChebConvLayer {
    /// `(K * F_in) x F_out`; row `k * F_in + i` holds `theta[k, i, :]`.
    theta: Array2<f64>,
    bias: Array1<f64>,
    k_order: usize,
}

impl ChebConvLayer {
    pub fn zeros(k_order: usize, f_in: usize, f_out: usize) -> Result<Self> {
        if k_order == 0 {
            return Err(Error::arg("Chebyshev order K must be at least 1"));
        }
        Ok(Self {
            theta: Array2::zeros((k_order * f_in, f_out)),
            bias: Array1::zeros(f_out),
            k_order,
        })
    }

    /// Uniform `[-s, s]` coefficients with `s = sqrt(6 / (K F_in + F_out))`, zero bias.
    pub fn glorot<R: Rng>(k_order: usize, f_in: usize, f_out: usize, rng: &mut R) -> Result<Self> {
        let mut layer = Self::zeros(k_order, f_in, f_out)?;
        let s = (6.0 / ((k_order * f_in + f_out) as f64)).sqrt();
        layer.theta.mapv_inplace(|_| rng.random_range(-s..=s));
        Ok(layer)
    }

    /// Builds a layer from a stacked `(K * F_in) x F_out` coefficient matrix.
    pub fn from_parts(k_order: usize, theta: Array2<f64>, bias: Array1<f64>) -> Result<Self> {
        if k_order == 0 || !theta.nrows().is_multiple_of(k_order) {
            return Err(Error::arg(format!(
                "theta with {} rows is not a stack of {k_order} blocks",
                theta.nrows()
            )));
        }
        if bias.len() != theta.ncols() {
            return Err(Error::arg("bias length must equal F_out"));
        }
        if theta.iter().chain(bias.iter()).any(|v| !v.is_finite()) {
            return Err(Error::arg("non-finite layer parameter"));
        }
        Ok(Self {
            theta,
            bias,
            k_order,
        })
    }

    pub fn k_order(&self) -> usize {
        self.k_order
    }

    pub fn f_in(&self) -> usize {
        self.theta.nrows() / self.k_order
    }

    pub fn f_out(&self) -> usize {
        self.theta.ncols()
    }

    pub fn theta(&self) -> &Array2<f64> {
        &self.theta
    }

    pub fn theta_mut(&mut self) -> &mut Array2<f64> {
        &mut self.theta
    }

    pub fn bias(&self) -> &Array1<f64> {
        &self.bias
    }

    pub fn bias_mut(&mut self) -> &mut Array1<f64> {
        &mut self.bias
    }

    pub fn parts_mut(&mut self) -> (&mut Array2<f64>, &mut Array1<f64>) {
        (&mut self.theta, &mut self.bias)
    }

    /// Coefficient of `T_k` from input feature `i` to output feature `j`.
    pub fn coefficient(&self, k: usize, i: usize, j: usize) -> f64 {
        self.theta[[k * self.f_in() + i, j]]
    }

    pub fn set_coefficient(&mut self, k: usize, i: usize, j: usize, value: f64) {
        let f_in = self.f_in();
        self.theta[[k * f_in + i, j]] = value;
    }

    pub fn num_parameters(&self) -> usize {
        self.theta.len() + self.bias.len()
    }
}

/// Forward state kept for the backward pass.
#[derive(Debug, Clone)]
pub struct ChebCache<'a> {
    laplacian: &'a ScaledLaplacian,
    /// `[T_0 x | T_1 x | ... | T_{K-1} x]`, `(batch * n) x (K * F_in)`.
    basis: Array2<f64>,
    batch: usize,
    k_order: usize,
}

impl ChebCache<'_> {
    /// `T_k(L~) x` for the cached input.
    pub fn basis_term(&self, k: usize) -> ArrayView2<'_, f64> {
        let f_in = self.basis.ncols() / self.k_order;
        self.basis.slice(s![.., k * f_in..(k + 1) * f_in])
    }
}

#[derive(Debug, Clone)]
pub struct ChebGrads {
    pub x: Array2<f64>,
    /// Same stacked layout as [`ChebConvLayer::theta`].
    pub theta: Array2<f64>,
    pub bias: Array1<f64>,
}

pub fn cheb_forward<'a>(
    lt: &'a ScaledLaplacian,
    x: ArrayView2<'_, f64>,
    layer: &ChebConvLayer,
) -> Result<(FeatureMatrix, ChebCache<'a>)> {
    cheb_forward_batch(lt, x, 1, layer)
}

pub fn cheb_forward_batch<'a>(
    lt: &'a ScaledLaplacian,
    x: ArrayView2<'_, f64>,
    batch: usize,
    layer: &ChebConvLayer,
) -> Result<(FeatureMatrix, ChebCache<'a>)> {
    let n = lt.size();
    let f_in = layer.f_in();
    if x.ncols() != f_in {
        return Err(Error::arg(format!(
            "layer expects {f_in} input features, got {}",
            x.ncols()
        )));
    }
    if x.nrows() != batch * n {
        return Err(Error::arg(format!(
            "expected {batch} x {n} vertex rows, got {}",
            x.nrows()
        )));
    }
    let k_order = layer.k_order;
    let l = lt.matrix();
    let rows = batch * n;
    // Recur on a vertex-major layout (n x batch*F_in) so every sparse row
    // update touches one long contiguous run, then lay the terms side by side.
    let mut terms: Vec<Array2<f64>> = Vec::with_capacity(k_order);
    terms.push(interleave(x, batch));
    if k_order > 1 {
        terms.push(l.mul_blocks(terms[0].view(), 1));
    }
    for k in 2..k_order {
        let mut tk = terms[k - 2].mapv(|v| -v);
        l.mul_blocks_into(terms[k - 1].view(), 1, 2.0, tk.view_mut());
        terms.push(tk);
    }
    let mut basis = Array2::zeros((rows, k_order * f_in));
    for (k, t) in terms.iter().enumerate() {
        deinterleave_into(t, batch, basis.slice_mut(s![.., k * f_in..(k + 1) * f_in]));
    }
    let mut y = basis.dot(&layer.theta);
    y += &layer.bias;
    Ok((
        y,
        ChebCache {
            laplacian: lt,
            basis,
            batch,
            k_order,
        },
    ))
}

pub fn cheb_backward(
    cache: &ChebCache<'_>,
    grad_y: ArrayView2<'_, f64>,
    layer: &ChebConvLayer,
) -> Result<ChebGrads> {
    let k_order = layer.k_order;
    let f_in = layer.f_in();
    if cache.k_order != k_order || cache.basis.ncols() != k_order * f_in {
        return Err(Error::Contract(
            "cache was produced by a layer of a different shape".into(),
        ));
    }
    if grad_y.dim() != (cache.basis.nrows(), layer.f_out()) {
        return Err(Error::Contract(format!(
            "output gradient {:?} does not match the cached forward pass ({}, {})",
            grad_y.dim(),
            cache.basis.nrows(),
            layer.f_out()
        )));
    }
    let theta = cache.basis.t().dot(&grad_y);
    let bias = grad_y.sum_axis(Axis(0));

    // Adjoint of the recurrence; L~ is symmetric so it is its own transpose.
    let full = grad_y.dot(&layer.theta.t());
    let mut adj: Vec<Array2<f64>> = (0..k_order)
        .map(|k| interleave(full.slice(s![.., k * f_in..(k + 1) * f_in]), cache.batch))
        .collect();
    let l = cache.laplacian.matrix();
    for k in (2..k_order).rev() {
        let ak = std::mem::take(&mut adj[k]);
        adj[k - 2] -= &ak;
        l.mul_blocks_into(ak.view(), 1, 2.0, adj[k - 1].view_mut());
    }
    if k_order > 1 {
        let a1 = std::mem::take(&mut adj[1]);
        l.mul_blocks_into(a1.view(), 1, 1.0, adj[0].view_mut());
    }
    let mut x = Array2::zeros((cache.basis.nrows(), f_in));
    deinterleave_into(&adj[0], cache.batch, x.view_mut());
    Ok(ChebGrads { x, theta, bias })
}

/// `(batch * n) x f` sample-major rows to `n x (batch * f)` vertex-major rows.
fn interleave(x: ArrayView2<'_, f64>, batch: usize) -> Array2<f64> {
    let n = x.nrows() / batch;
    let f = x.ncols();
    let mut out = Array2::zeros((n, batch * f));
    for b in 0..batch {
        out.slice_mut(s![.., b * f..(b + 1) * f])
            .assign(&x.slice(s![b * n..(b + 1) * n, ..]));
    }
    out
}

/// Inverse of [`interleave`], written into `out`.
fn deinterleave_into(t: &Array2<f64>, batch: usize, mut out: ArrayViewMut2<'_, f64>) {
    let n = t.nrows();
    let f = t.ncols() / batch;
    for b in 0..batch {
        out.slice_mut(s![b * n..(b + 1) * n, ..])
            .assign(&t.slice(s![.., b * f..(b + 1) * f]));
    }
}

/// Rectifier over already-biased pre-activations.
pub fn bias_relu_forward(x: ArrayView2<'_, f64>) -> (Array2<f64>, Array2<bool>) {
    let mask = x.mapv(|v| v > 0.0);
    let y = x.mapv(|v| if v > 0.0 { v } else { 0.0 });
    (y, mask)
}

/// Gradient passes where the input was strictly positive (subgradient 0 at 0).
pub fn bias_relu_backward(mask: &Array2<bool>, grad_y: ArrayView2<'_, f64>) -> Result<Array2<f64>> {
    if mask.dim() != grad_y.dim() {
        return Err(Error::Contract("ReLU mask and gradient shapes differ".into()));
    }
    let mut g = grad_y.to_owned();
    g.zip_mut_with(mask, |v, &m| {
        if !m {
            *v = 0.0
        }
    });
    Ok(g)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::eval::synth::grid;
    use crate::laplacian::{build_laplacian, scale_laplacian, Laplacian, PowerIteration};
    use crate::sparse::SparseMatrix;
    use ndarray::array;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn edgeless(n: usize) -> ScaledLaplacian {
        let l = build_laplacian(&SparseMatrix::zeros(n, n)).unwrap();
        scale_laplacian(&l, 2.0).unwrap()
    }

    fn random_matrix(rng: &mut ChaCha8Rng, r: usize, c: usize) -> Array2<f64> {
        Array2::from_shape_fn((r, c), |_| rng.random_range(-1.0..1.0))
    }

    #[test]
    fn order_one_identity_is_identity() {
        let lt = edgeless(3);
        let mut layer = ChebConvLayer::zeros(1, 2, 2).unwrap();
        layer.set_coefficient(0, 0, 0, 1.0);
        layer.set_coefficient(0, 1, 1, 1.0);
        let x = array![[1.0, -2.0], [0.5, 3.0], [4.0, 0.0]];
        let (y, _) = cheb_forward(&lt, x.view(), &layer).unwrap();
        assert_eq!(y, x);
    }

    #[test]
    fn edgeless_mesh_order_two() {
        let lt = edgeless(4);
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let layer = ChebConvLayer::glorot(2, 3, 2, &mut rng).unwrap();
        let x = random_matrix(&mut rng, 4, 3);
        let (y, _) = cheb_forward(&lt, x.view(), &layer).unwrap();
        for v in 0..4 {
            for j in 0..2 {
                let want: f64 = (0..3)
                    .map(|i| (layer.coefficient(0, i, j) - layer.coefficient(1, i, j)) * x[[v, i]])
                    .sum();
                assert!((y[[v, j]] - want).abs() < 1e-15);
            }
        }
    }

    #[test]
    fn feature_mismatch_is_rejected() {
        let lt = edgeless(3);
        let layer = ChebConvLayer::zeros(2, 2, 1).unwrap();
        let x = Array2::zeros((3, 3));
        assert!(matches!(
            cheb_forward(&lt, x.view(), &layer),
            Err(Error::Argument(_))
        ));
    }

    #[test]
    fn zero_output_gradient_gives_zero_gradients() {
        let m = grid(3, 3, |x, y| x * y);
        let lt = crate::ScaledLaplacian::from_mesh(&m, &PowerIteration::default()).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let layer = ChebConvLayer::glorot(4, 3, 2, &mut rng).unwrap();
        let x = random_matrix(&mut rng, 9, 3);
        let (_, cache) = cheb_forward(&lt, x.view(), &layer).unwrap();
        let g = cheb_backward(&cache, Array2::zeros((9, 2)).view(), &layer).unwrap();
        assert!(g.x.iter().chain(g.theta.iter()).chain(g.bias.iter()).all(|&v| v == 0.0));
    }

    #[test]
    fn order_one_theta_gradient_is_inner_product() {
        let lt = edgeless(5);
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let layer = ChebConvLayer::glorot(1, 3, 2, &mut rng).unwrap();
        let x = random_matrix(&mut rng, 5, 3);
        let gy = random_matrix(&mut rng, 5, 2);
        let (_, cache) = cheb_forward(&lt, x.view(), &layer).unwrap();
        let g = cheb_backward(&cache, gy.view(), &layer).unwrap();
        for i in 0..3 {
            for j in 0..2 {
                // Same sum, possibly in another order: allow a few ulps.
                let want = x.column(i).dot(&gy.column(j));
                let mag: f64 = x.column(i).iter().zip(gy.column(j)).map(|(a, b)| (a * b).abs()).sum();
                assert!((g.theta[[i, j]] - want).abs() <= 8.0 * f64::EPSILON * mag);
            }
        }
    }

    #[test]
    fn mismatched_gradient_is_a_contract_violation() {
        let lt = edgeless(3);
        let layer = ChebConvLayer::zeros(2, 1, 1).unwrap();
        let x = Array2::zeros((3, 1));
        let (_, cache) = cheb_forward(&lt, x.view(), &layer).unwrap();
        let other = ChebConvLayer::zeros(3, 1, 1).unwrap();
        assert!(matches!(
            cheb_backward(&cache, Array2::zeros((3, 1)).view(), &other),
            Err(Error::Contract(_))
        ));
        assert!(matches!(
            cheb_backward(&cache, Array2::zeros((4, 1)).view(), &layer),
            Err(Error::Contract(_))
        ));
    }

    #[test]
    fn batched_forward_equals_per_sample_forward() {
        let m = grid(4, 3, |x, y| (x + y).sin());
        let lt = crate::ScaledLaplacian::from_mesh(&m, &PowerIteration::default()).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let layer = ChebConvLayer::glorot(5, 2, 3, &mut rng).unwrap();
        let x = random_matrix(&mut rng, 24, 2);
        let (y, _) = cheb_forward_batch(&lt, x.view(), 2, &layer).unwrap();
        for b in 0..2 {
            let xb = x.slice(s![b * 12..(b + 1) * 12, ..]);
            let (yb, _) = cheb_forward(&lt, xb, &layer).unwrap();
            let diff = (&yb - &y.slice(s![b * 12..(b + 1) * 12, ..])).mapv(f64::abs);
            assert!(diff.iter().all(|&d| d < 1e-13));
        }
    }

    #[test]
    fn relu_edge_cases() {
        let neg = array![[-1.0, -0.5], [-2.0, 0.0]];
        let (y, mask) = bias_relu_forward(neg.view());
        assert!(y.iter().all(|&v| v == 0.0));
        let g = bias_relu_backward(&mask, Array2::ones((2, 2)).view()).unwrap();
        assert!(g.iter().all(|&v| v == 0.0));

        let pos = array![[1.0, 0.5], [2.0, 3.0]];
        let (y, mask) = bias_relu_forward(pos.view());
        assert_eq!(y, pos);
        let gy = array![[0.1, 0.2], [0.3, 0.4]];
        assert_eq!(bias_relu_backward(&mask, gy.view()).unwrap(), gy);
    }

    #[test]
    fn laplacian_from_mesh_matches_manual_chain() {
        let m = grid(3, 2, |_, _| 0.0);
        let lap = Laplacian::from_mesh(&m).unwrap();
        assert!(lap.matrix().row_sums().iter().all(|&s| s == 0.0));
    }
}
