//! Convolutional mesh autoencoder over a [`MeshHierarchy`].

use ndarray::{Array1, Array2, ArrayView1, ArrayView2, Axis};
use rand::Rng;
use serde::{Deserialize, Serialize};

use super::hierarchy::MeshHierarchy;

/// Starting bias of the log-variance head. Keeps early posterior noise small
/// so the decoder learns to read `z` before the KL term pulls it to the prior.
pub const LOGVAR_BIAS_INIT: f64 = -6.0;
use crate::error::{Error, Result};
use crate::nn::{
    dense_backward, dense_forward, kl_divergence, l1_loss, l1_weight_penalty, DenseCache,
    DenseLayer, Param, ParamMut, Parameterized,
};
use crate::spectral_conv::{
    bias_relu_backward, bias_relu_forward, cheb_backward, cheb_forward_batch, ChebCache,
    ChebConvLayer,
};

/// Layer widths. `encoder_widths[l]` is the feature count entering encoder
/// level `l`; `decoder_widths[0]` is the width at the coarsest level and the
/// last entry is the output width.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ModelSpec {
    pub k_order: usize,
    pub z_dim: usize,
    pub encoder_widths: Vec<usize>,
    pub decoder_widths: Vec<usize>,
    pub variational: bool,
}

impl ModelSpec {
    /// Four-level face model: 3-16-16-16-32 down, 32-32-16-16-3 up.
    pub fn standard(k_order: usize, z_dim: usize, variational: bool) -> Self {
        Self {
            k_order,
            z_dim,
            encoder_widths: vec![3, 16, 16, 16, 32],
            decoder_widths: vec![32, 32, 16, 16, 3],
            variational,
        }
    }

    /// The standard widths adapted to `levels` pooling steps: the first and
    /// last encoder widths stay 3 and 32, the rest are 16. `levels = 4` equals
    /// [`ModelSpec::standard`].
    pub fn with_levels(k_order: usize, z_dim: usize, variational: bool, levels: usize) -> Self {
        let mut encoder_widths = vec![3];
        encoder_widths.extend(std::iter::repeat_n(16, levels.saturating_sub(1)));
        encoder_widths.push(32);
        let mut decoder_widths = vec![32];
        if levels >= 2 {
            decoder_widths.push(32);
            decoder_widths.extend(std::iter::repeat_n(16, levels - 2));
        }
        decoder_widths.push(3);
        Self {
            k_order,
            z_dim,
            encoder_widths,
            decoder_widths,
            variational,
        }
    }

    pub fn num_levels(&self) -> usize {
        self.encoder_widths.len().saturating_sub(1)
    }

    pub fn validate(&self) -> Result<()> {
        let l = self.num_levels();
        if l == 0 || self.decoder_widths.len() != l + 1 {
            return Err(Error::arg(
                "encoder and decoder need the same number (>= 1) of levels",
            ));
        }
        if self.encoder_widths[0] != 3 || self.decoder_widths[l] != 3 {
            return Err(Error::arg("input and output width must be 3"));
        }
        if self.k_order == 0 || self.z_dim == 0 {
            return Err(Error::arg("k_order and z_dim must be positive"));
        }
        if self.encoder_widths.iter().chain(&self.decoder_widths).any(|&w| w == 0) {
            return Err(Error::arg("layer widths must be positive"));
        }
        Ok(())
    }
}

/// Affine map between data coordinates and the units the network sees:
/// `x_net = (x - mean) / scale`.
#[derive(Debug, Clone, PartialEq)]
pub struct Normalization {
    pub mean: Array2<f64>,
    pub scale: f64,
}

impl Normalization {
    pub fn identity(n: usize) -> Self {
        Self {
            mean: Array2::zeros((n, 3)),
            scale: 1.0,
        }
    }

    /// Per-vertex mean shape and one global standard deviation of the
    /// centered coordinates.
    pub fn fit<'a, I>(frames: I) -> Result<Self>
    where
        I: IntoIterator<Item = ArrayView2<'a, f64>>,
    {
        let frames: Vec<_> = frames.into_iter().collect();
        let first = frames.first().ok_or_else(|| Error::arg("no frames to normalize"))?;
        let mut mean = Array2::zeros(first.dim());
        for f in &frames {
            if f.dim() != mean.dim() {
                return Err(Error::arg("frames differ in shape"));
            }
            mean += f;
        }
        mean /= frames.len() as f64;
        let mut ss = 0.0;
        for f in &frames {
            ss += (f - &mean).mapv(|v| v * v).sum();
        }
        let count = (frames.len() * mean.len()) as f64;
        let std = (ss / count).sqrt();
        let scale = if std > 0.0 && std.is_finite() { std } else { 1.0 };
        Ok(Self { mean, scale })
    }

    pub fn apply(&self, x: ArrayView2<'_, f64>) -> Array2<f64> {
        (&x - &self.mean) / self.scale
    }

    pub fn invert(&self, x: ArrayView2<'_, f64>) -> Array2<f64> {
        &x * self.scale + &self.mean
    }
}

/// Encoder output for one mesh.
#[derive(Debug, Clone, PartialEq)]
pub struct Encoding {
    pub mu: Array1<f64>,
    /// Present for variational models.
    pub log_var: Option<Array1<f64>>,
}

/// One row of the shape trace: layer name and output `(rows, cols)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TraceRow {
    pub layer: &'static str,
    pub shape: (usize, usize),
}

/// Batch objective, averaged over samples.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Objective {
    pub l1: f64,
    pub kl: f64,
    pub penalty: f64,
    pub total: f64,
}

#[derive(Debug, Clone)]
pub struct AutoencoderModel {
    spec: ModelSpec,
    pub encoder_convs: Vec<ChebConvLayer>,
    pub encoder_fc: DenseLayer,
    pub encoder_fc_logvar: Option<DenseLayer>,
    pub decoder_fc: DenseLayer,
    pub decoder_convs: Vec<ChebConvLayer>,
    pub normalization: Normalization,
}

struct Pass<'h> {
    batch: usize,
    enc_cheb: Vec<ChebCache<'h>>,
    enc_mask: Vec<Array2<bool>>,
    enc_fc: DenseCache,
    enc_lv: Option<(DenseCache, Array2<f64>)>,
    mu: Array2<f64>,
    noise: Option<Array2<f64>>,
    dec_fc: DenseCache,
    dec_cheb: Vec<ChebCache<'h>>,
    dec_mask: Vec<Array2<bool>>,
    output: Array2<f64>,
}

impl AutoencoderModel {
    /// Glorot-initialized model sized for `hierarchy`.
    pub fn new<R: Rng>(spec: ModelSpec, hierarchy: &MeshHierarchy, rng: &mut R) -> Result<Self> {
        spec.validate()?;
        let l = spec.num_levels();
        if hierarchy.num_levels() != l {
            return Err(Error::arg(format!(
                "model has {l} levels, hierarchy has {}",
                hierarchy.num_levels()
            )));
        }
        let k = spec.k_order;
        let coarse = hierarchy.mesh(l).num_vertices();
        let mut encoder_convs = Vec::with_capacity(l);
        for w in spec.encoder_widths.windows(2) {
            encoder_convs.push(ChebConvLayer::glorot(k, w[0], w[1], rng)?);
        }
        let flat_in = coarse * spec.encoder_widths[l];
        let encoder_fc = DenseLayer::glorot(flat_in, spec.z_dim, rng);
        let encoder_fc_logvar = spec
            .variational
            .then(|| {
                let mut head = DenseLayer::glorot(flat_in, spec.z_dim, rng);
                head.bias.fill(LOGVAR_BIAS_INIT);
                head
            });
        let decoder_fc = DenseLayer::glorot(spec.z_dim, coarse * spec.decoder_widths[0], rng);
        let mut decoder_convs = Vec::with_capacity(l);
        for w in spec.decoder_widths.windows(2) {
            decoder_convs.push(ChebConvLayer::glorot(k, w[0], w[1], rng)?);
        }
        Ok(Self {
            normalization: Normalization::identity(hierarchy.mesh(0).num_vertices()),
            spec,
            encoder_convs,
            encoder_fc,
            encoder_fc_logvar,
            decoder_fc,
            decoder_convs,
        })
    }

    pub fn spec(&self) -> &ModelSpec {
        &self.spec
    }

    pub fn z_dim(&self) -> usize {
        self.spec.z_dim
    }

    pub fn is_variational(&self) -> bool {
        self.encoder_fc_logvar.is_some()
    }

    pub fn num_vertices(&self) -> usize {
        self.normalization.mean.nrows()
    }

    /// Checks that the layer shapes fit `hierarchy`.
    pub fn check_hierarchy(&self, hierarchy: &MeshHierarchy) -> Result<()> {
        let l = self.spec.num_levels();
        let counts = hierarchy.vertex_counts();
        if counts.len() != l + 1
            || counts[0] != self.num_vertices()
            || self.encoder_fc.d_in() != counts[l] * self.spec.encoder_widths[l]
            || self.decoder_fc.d_out() != counts[l] * self.spec.decoder_widths[0]
        {
            return Err(Error::arg(format!(
                "model does not fit a hierarchy with vertex counts {counts:?}"
            )));
        }
        Ok(())
    }

    fn check_input(&self, x: ArrayView2<'_, f64>) -> Result<()> {
        if x.dim() != (self.num_vertices(), 3) {
            return Err(Error::arg(format!(
                "expected {} x 3 vertices, got {:?}",
                self.num_vertices(),
                x.dim()
            )));
        }
        Ok(())
    }

    fn stack(&self, inputs: &[ArrayView2<'_, f64>]) -> Result<Array2<f64>> {
        let n = self.num_vertices();
        let mut x = Array2::zeros((inputs.len() * n, 3));
        for (b, v) in inputs.iter().enumerate() {
            self.check_input(*v)?;
            x.slice_mut(ndarray::s![b * n..(b + 1) * n, ..])
                .assign(&self.normalization.apply(*v));
        }
        Ok(x)
    }

    /// Runs encoder and decoder on normalized, stacked inputs.
    /// `noise` (batch x z_dim) turns on reparameterized sampling.
    fn forward<'h>(
        &self,
        h: &'h MeshHierarchy,
        x: Array2<f64>,
        batch: usize,
        noise: Option<Array2<f64>>,
        mut trace: Option<&mut Vec<TraceRow>>,
    ) -> Result<Pass<'h>> {
        let l = self.spec.num_levels();
        let mut record = |layer: &'static str, rows: usize, cols: usize| {
            if let Some(t) = trace.as_deref_mut() {
                t.push(TraceRow {
                    layer,
                    shape: (rows / batch, cols),
                });
            }
        };

        let mut hcur = x;
        let mut enc_cheb = Vec::with_capacity(l);
        let mut enc_mask = Vec::with_capacity(l);
        for (lvl, conv) in self.encoder_convs.iter().enumerate() {
            let (pre, cache) = cheb_forward_batch(h.laplacian(lvl), hcur.view(), batch, conv)?;
            let (act, mask) = bias_relu_forward(pre.view());
            record("conv", act.nrows(), act.ncols());
            hcur = h.down(lvl).matrix.mul_blocks(act.view(), batch);
            record("down", hcur.nrows(), hcur.ncols());
            enc_cheb.push(cache);
            enc_mask.push(mask);
        }
        let flat_len = hcur.len() / batch;
        let flat = hcur
            .into_shape_with_order((batch, flat_len))
            .map_err(|e| Error::Contract(e.to_string()))?;
        let (mu, enc_fc) = dense_forward(&self.encoder_fc, flat.view())?;
        record("dense", batch, mu.ncols());
        let enc_lv = match &self.encoder_fc_logvar {
            Some(head) => Some(dense_forward(head, flat.view())?),
            None => None,
        };
        let enc_lv = enc_lv.map(|(lv, c)| (c, lv));

        let z = match (&noise, &enc_lv) {
            (Some(eps), Some((_, lv))) => {
                if eps.dim() != mu.dim() {
                    return Err(Error::arg(format!(
                        "noise has shape {:?}, expected {:?}",
                        eps.dim(),
                        mu.dim()
                    )));
                }
                &mu + &(lv.mapv(|v| (0.5 * v).exp()) * eps)
            }
            _ => mu.clone(),
        };

        let coarse = h.mesh(l).num_vertices();
        let (d, dec_fc) = dense_forward(&self.decoder_fc, z.view())?;
        let width = self.spec.decoder_widths[0];
        let mut hcur = d
            .into_shape_with_order((batch * coarse, width))
            .map_err(|e| Error::Contract(e.to_string()))?;
        record("dense", hcur.nrows(), hcur.ncols());
        let mut dec_cheb = Vec::with_capacity(l);
        let mut dec_mask = Vec::with_capacity(l);
        for (i, conv) in self.decoder_convs.iter().enumerate() {
            let lvl = l - 1 - i;
            hcur = h.up(lvl).matrix.mul_blocks(hcur.view(), batch);
            record("up", hcur.nrows(), hcur.ncols());
            let (pre, cache) = cheb_forward_batch(h.laplacian(lvl), hcur.view(), batch, conv)?;
            dec_cheb.push(cache);
            if i + 1 < l {
                let (act, mask) = bias_relu_forward(pre.view());
                dec_mask.push(mask);
                hcur = act;
            } else {
                hcur = pre;
            }
            record("conv", hcur.nrows(), hcur.ncols());
        }
        Ok(Pass {
            batch,
            enc_cheb,
            enc_mask,
            enc_fc,
            enc_lv,
            mu,
            noise,
            dec_fc,
            dec_cheb,
            dec_mask,
            output: hcur,
        })
    }

    /// Gradients of `grad_out . output + w_kld * kl_scale * KL` for every
    /// parameter tensor, in declaration order.
    fn backward(
        &self,
        h: &MeshHierarchy,
        pass: &Pass<'_>,
        grad_out: Array2<f64>,
        kl_weight: f64,
    ) -> Result<Vec<Vec<f64>>> {
        let l = self.spec.num_levels();
        let batch = pass.batch;
        let mut dec_grads = vec![None; l];
        let mut g = grad_out;
        for i in (0..l).rev() {
            let lvl = l - 1 - i;
            if i + 1 < l {
                g = bias_relu_backward(&pass.dec_mask[i], g.view())?;
            }
            let cg = cheb_backward(&pass.dec_cheb[i], g.view(), &self.decoder_convs[i])?;
            g = h.up_transpose(lvl).mul_blocks(cg.x.view(), batch);
            dec_grads[i] = Some((cg.theta, cg.bias));
        }
        let g_flat = g
            .into_shape_with_order((batch, self.decoder_fc.d_out()))
            .map_err(|e| Error::Contract(e.to_string()))?;
        let dfc = dense_backward(&self.decoder_fc, &pass.dec_fc, g_flat.view())?;
        let g_z = dfc.x;

        let (g_mu, lv_grads) = match &pass.enc_lv {
            Some((cache, lv)) => {
                let mut g_mu = g_z.clone();
                let mut g_lv = match &pass.noise {
                    Some(eps) => &g_z * eps * &lv.mapv(|v| 0.5 * (0.5 * v).exp()),
                    None => Array2::zeros(lv.dim()),
                };
                if kl_weight != 0.0 {
                    let kl = kl_divergence(
                        pass.mu.as_slice().expect("standard layout"),
                        lv.as_slice().expect("standard layout"),
                    )?;
                    let gm = Array2::from_shape_vec(pass.mu.dim(), kl.grad_mu)
                        .map_err(|e| Error::Contract(e.to_string()))?;
                    let gl = Array2::from_shape_vec(lv.dim(), kl.grad_log_var)
                        .map_err(|e| Error::Contract(e.to_string()))?;
                    g_mu.scaled_add(kl_weight, &gm);
                    g_lv.scaled_add(kl_weight, &gl);
                }
                let head = self.encoder_fc_logvar.as_ref().expect("variational");
                (g_mu, Some(dense_backward(head, cache, g_lv.view())?))
            }
            None => (g_z, None),
        };

        let efc = dense_backward(&self.encoder_fc, &pass.enc_fc, g_mu.view())?;
        let mut g_flat = efc.x;
        if let Some(lg) = &lv_grads {
            g_flat += &lg.x;
        }
        let coarse = h.mesh(l).num_vertices();
        let mut g = g_flat
            .into_shape_with_order((batch * coarse, self.spec.encoder_widths[l]))
            .map_err(|e| Error::Contract(e.to_string()))?;
        let mut enc_grads = vec![None; l];
        for lvl in (0..l).rev() {
            g = h.down_transpose(lvl).mul_blocks(g.view(), batch);
            g = bias_relu_backward(&pass.enc_mask[lvl], g.view())?;
            let cg = cheb_backward(&pass.enc_cheb[lvl], g.view(), &self.encoder_convs[lvl])?;
            g = cg.x;
            enc_grads[lvl] = Some((cg.theta, cg.bias));
        }

        let mut out = Vec::new();
        let flat2 = |a: Array2<f64>| a.into_raw_vec_and_offset().0;
        let flat1 = |a: Array1<f64>| a.into_raw_vec_and_offset().0;
        for (t, b) in enc_grads.into_iter().map(|x| x.expect("filled")) {
            out.push(flat2(t));
            out.push(flat1(b));
        }
        out.push(flat2(efc.weights));
        out.push(flat1(efc.bias));
        if let Some(lg) = lv_grads {
            out.push(flat2(lg.weights));
            out.push(flat1(lg.bias));
        }
        out.push(flat2(dfc.weights));
        out.push(flat1(dfc.bias));
        for (t, b) in dec_grads.into_iter().map(|x| x.expect("filled")) {
            out.push(flat2(t));
            out.push(flat1(b));
        }
        Ok(out)
    }

    /// Mean over the batch of `L1 + w_kld * KL`, plus the weight penalty, with
    /// gradients for every parameter tensor. `noise` (batch x z_dim) is only
    /// used by variational models; without it `z = mu`.
    pub fn objective(
        &self,
        h: &MeshHierarchy,
        inputs: &[ArrayView2<'_, f64>],
        noise: Option<ArrayView2<'_, f64>>,
        w_kld: f64,
        penalty_coefficient: f64,
    ) -> Result<(Objective, Vec<Vec<f64>>)> {
        let batch = inputs.len();
        if batch == 0 {
            return Err(Error::arg("empty batch"));
        }
        let x = self.stack(inputs)?;
        let noise = if self.is_variational() {
            noise.map(|n| n.to_owned())
        } else {
            None
        };
        let pass = self.forward(h, x.clone(), batch, noise, None)?;
        let (l1, grad_out) = l1_loss(pass.output.view(), x.view())?;
        let kl = match &pass.enc_lv {
            Some((_, lv)) => {
                kl_divergence(
                    pass.mu.as_slice().expect("standard layout"),
                    lv.as_slice().expect("standard layout"),
                )?
                .loss
                    / batch as f64
            }
            None => 0.0,
        };
        let kl_weight = if self.is_variational() { w_kld / batch as f64 } else { 0.0 };
        let mut grads = self.backward(h, &pass, grad_out, kl_weight)?;
        let (penalty, pgrads) = l1_weight_penalty(self, penalty_coefficient);
        for (g, pg) in grads.iter_mut().zip(pgrads) {
            for (a, b) in g.iter_mut().zip(pg) {
                *a += b;
            }
        }
        let kl_term = if self.is_variational() { w_kld * kl } else { 0.0 };
        Ok((
            Objective {
                l1,
                kl,
                penalty,
                total: l1 + kl_term + penalty,
            },
            grads,
        ))
    }

    /// Mean L1 reconstruction error of a batch in normalized units, `z = mu`.
    pub fn reconstruction_l1(
        &self,
        h: &MeshHierarchy,
        inputs: &[ArrayView2<'_, f64>],
    ) -> Result<f64> {
        if inputs.is_empty() {
            return Err(Error::arg("empty batch"));
        }
        let x = self.stack(inputs)?;
        let pass = self.forward(h, x.clone(), inputs.len(), None, None)?;
        Ok(l1_loss(pass.output.view(), x.view())?.0)
    }

    /// Latent code of one mesh (data coordinates).
    pub fn encode(&self, h: &MeshHierarchy, vertices: ArrayView2<'_, f64>) -> Result<Encoding> {
        Ok(self.encode_batch(h, &[vertices])?.remove(0))
    }

    pub fn encode_batch(
        &self,
        h: &MeshHierarchy,
        inputs: &[ArrayView2<'_, f64>],
    ) -> Result<Vec<Encoding>> {
        if inputs.is_empty() {
            return Ok(Vec::new());
        }
        let x = self.stack(inputs)?;
        let pass = self.forward(h, x, inputs.len(), None, None)?;
        Ok((0..inputs.len())
            .map(|b| Encoding {
                mu: pass.mu.row(b).to_owned(),
                log_var: pass.enc_lv.as_ref().map(|(_, lv)| lv.row(b).to_owned()),
            })
            .collect())
    }

    /// Decoded mesh vertices (data coordinates) for a latent code.
    pub fn decode(&self, h: &MeshHierarchy, z: ArrayView1<'_, f64>) -> Result<Array2<f64>> {
        if z.len() != self.z_dim() {
            return Err(Error::arg(format!(
                "latent vector has {} entries, model expects {}",
                z.len(),
                self.z_dim()
            )));
        }
        if z.iter().any(|v| !v.is_finite()) {
            return Err(Error::arg("latent vector is not finite"));
        }
        let l = self.spec.num_levels();
        let (d, _) = dense_forward(&self.decoder_fc, z.insert_axis(Axis(0)))?;
        let coarse = h.mesh(l).num_vertices();
        let mut hcur = d
            .into_shape_with_order((coarse, self.spec.decoder_widths[0]))
            .map_err(|e| Error::Contract(e.to_string()))?;
        for (i, conv) in self.decoder_convs.iter().enumerate() {
            let lvl = l - 1 - i;
            hcur = h.up(lvl).matrix.mul_blocks(hcur.view(), 1);
            let (pre, _) = cheb_forward_batch(h.laplacian(lvl), hcur.view(), 1, conv)?;
            hcur = if i + 1 < l { bias_relu_forward(pre.view()).0 } else { pre };
        }
        Ok(self.normalization.invert(hcur.view()))
    }

    /// `decode(encode(x).mu)`.
    pub fn reconstruct(&self, h: &MeshHierarchy, vertices: ArrayView2<'_, f64>) -> Result<Array2<f64>> {
        let e = self.encode(h, vertices)?;
        self.decode(h, e.mu.view())
    }

    /// Output shape of every encoder and decoder stage for one input mesh.
    pub fn shape_trace(&self, h: &MeshHierarchy, vertices: ArrayView2<'_, f64>) -> Result<Vec<TraceRow>> {
        let x = self.stack(&[vertices])?;
        let mut trace = Vec::new();
        self.forward(h, x, 1, None, Some(&mut trace))?;
        Ok(trace)
    }
}

fn chain<'a>(prefix: String, p: Vec<Param<'a>>) -> impl Iterator<Item = Param<'a>> {
    p.into_iter().map(move |mut q| {
        q.name = format!("{prefix}.{}", q.name);
        q
    })
}

fn chain_mut<'a>(prefix: String, p: Vec<ParamMut<'a>>) -> impl Iterator<Item = ParamMut<'a>> {
    p.into_iter().map(move |mut q| {
        q.name = format!("{prefix}.{}", q.name);
        q
    })
}

impl Parameterized for AutoencoderModel {
    fn params(&self) -> Vec<Param<'_>> {
        let mut out = Vec::new();
        for (i, c) in self.encoder_convs.iter().enumerate() {
            out.extend(chain(format!("encoder_conv{i}"), c.params()));
        }
        out.extend(chain("encoder_fc".into(), self.encoder_fc.params()));
        if let Some(lv) = &self.encoder_fc_logvar {
            out.extend(chain("encoder_fc_logvar".into(), lv.params()));
        }
        out.extend(chain("decoder_fc".into(), self.decoder_fc.params()));
        for (i, c) in self.decoder_convs.iter().enumerate() {
            out.extend(chain(format!("decoder_conv{i}"), c.params()));
        }
        out
    }

    fn params_mut(&mut self) -> Vec<ParamMut<'_>> {
        let mut out = Vec::new();
        for (i, c) in self.encoder_convs.iter_mut().enumerate() {
            out.extend(chain_mut(format!("encoder_conv{i}"), c.params_mut()));
        }
        out.extend(chain_mut("encoder_fc".into(), self.encoder_fc.params_mut()));
        if let Some(lv) = &mut self.encoder_fc_logvar {
            out.extend(chain_mut("encoder_fc_logvar".into(), lv.params_mut()));
        }
        out.extend(chain_mut("decoder_fc".into(), self.decoder_fc.params_mut()));
        for (i, c) in self.decoder_convs.iter_mut().enumerate() {
            out.extend(chain_mut(format!("decoder_conv{i}"), c.params_mut()));
        }
        out
    }
}

/// Total number of trainable scalars.
pub fn count_parameters<P: Parameterized + ?Sized>(model: &P) -> usize {
    model.num_parameters()
}
