//! The forked convolutional regression model.
//!
//! Two identical branches of three same-padded 3x3 conv layers (depths 16,
//! 32, 64; ReLU; 20% dropout; no pooling) process the XY and XZ images.
//! Their outputs concatenate to N x N x 128, flatten, and pass through a
//! dense head of 512/256/128 ReLU units with 30% dropout into a linear
//! 75-unit output, one coordinate per joint axis.

use encoder::EncodedImage;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::ops::{
    apply_dropout, conv2d_backward, conv2d_forward, dropout_mask, mm_a_bt, mm_ab_acc, mm_at_b_acc,
    relu,
};
pub use crate::ops::Mode;
use crate::tensor::Tensor;
use crate::NnError;

/// Architecture hyperparameters.
#[derive(Debug, Clone, PartialEq)]
pub struct ModelConfig {
    /// Image side N; inputs are N x N x 3.
    pub input_side: usize,
    /// Input channels per image.
    pub input_channels: usize,
    /// Depths of the three conv layers per branch.
    pub conv_depths: [usize; 3],
    /// Widths of the three dense head layers.
    pub head_widths: [usize; 3],
    /// Output units (25 joints x 3 axes).
    pub output_len: usize,
    /// Kernel side of every conv layer.
    pub kernel_side: usize,
    /// Dropout rate after each conv layer.
    pub conv_dropout: f64,
    /// Dropout rate after each head layer.
    pub head_dropout: f64,
}

impl Default for ModelConfig {
    fn default() -> Self {
        Self {
            input_side: 16,
            input_channels: 3,
            conv_depths: [16, 32, 64],
            head_widths: [512, 256, 128],
            output_len: 75,
            kernel_side: 3,
            conv_dropout: 0.2,
            head_dropout: 0.3,
        }
    }
}

impl ModelConfig {
    /// Tiny variant for gradient checking: 4 x 4 x 3 inputs, conv depths
    /// 2/2/2, head 8/8/8.
    pub fn miniature() -> Self {
        Self {
            input_side: 4,
            conv_depths: [2, 2, 2],
            head_widths: [8, 8, 8],
            ..Self::default()
        }
    }

    pub fn validate(&self) -> Result<(), NnError> {
        if self.input_side == 0 || self.input_channels == 0 || self.output_len == 0 {
            return Err(NnError::Config("dimensions must be positive"));
        }
        if self.kernel_side % 2 == 0 || self.kernel_side == 0 {
            return Err(NnError::Config("kernel side must be odd"));
        }
        if self.conv_depths.contains(&0) || self.head_widths.contains(&0) {
            return Err(NnError::Config("layer sizes must be positive"));
        }
        if !(0.0..1.0).contains(&self.conv_dropout) || !(0.0..1.0).contains(&self.head_dropout) {
            return Err(NnError::Config("dropout rates must lie in [0, 1)"));
        }
        Ok(())
    }

    /// Length of the flattened concatenation feeding the head.
    pub fn flatten_len(&self) -> usize {
        self.input_side * self.input_side * 2 * self.conv_depths[2]
    }

    /// Closed-form total trainable parameter count.
    pub fn param_count(&self) -> usize {
        let k = self.kernel_side;
        let mut total = 0;
        let mut c_in = self.input_channels;
        for d in self.conv_depths {
            total += 2 * conv2d_param_count(k, c_in, d, true);
            c_in = d;
        }
        let mut width_in = self.flatten_len();
        for w in self.head_widths {
            total += width_in * w + w;
            width_in = w;
        }
        total + width_in * self.output_len + self.output_len
    }
}

/// Trainable parameters of one conv layer: kernels `[k, k, C, D]` and a
/// per-depth bias.
#[derive(Debug, Clone, PartialEq)]
pub struct ConvLayer {
    pub kernels: Tensor,
    pub bias: Tensor,
}

/// Trainable parameters of one dense layer: weight `[in, out]` and bias.
#[derive(Debug, Clone, PartialEq)]
pub struct DenseLayer {
    pub weight: Tensor,
    pub bias: Tensor,
}

/// Full parameter set; gradients and Adam moments share this shape.
#[derive(Debug, Clone, PartialEq)]
pub struct Parameters {
    pub branch_xy: Vec<ConvLayer>,
    pub branch_xz: Vec<ConvLayer>,
    pub head: Vec<DenseLayer>,
    pub output: DenseLayer,
}

/// Trainable parameters of a conv layer: `k^2 * c_in * d`, plus `d` biases.
pub fn conv2d_param_count(k: usize, c_in: usize, d: usize, with_bias: bool) -> usize {
    k * k * c_in * d + if with_bias { d } else { 0 }
}

impl Parameters {
    fn build(
        cfg: &ModelConfig,
        mut init: impl FnMut(&[usize], f64) -> Tensor,
        mut init_relu_bias: impl FnMut(usize) -> Tensor,
    ) -> Self {
        let k = cfg.kernel_side;
        let make_branch =
            |init: &mut dyn FnMut(&[usize], f64) -> Tensor,
             init_bias: &mut dyn FnMut(usize) -> Tensor| {
                let mut layers = Vec::new();
                let mut c_in = cfg.input_channels;
                for d in cfg.conv_depths {
                    let fan_in = (k * k * c_in) as f64;
                    layers.push(ConvLayer {
                        kernels: init(&[k, k, c_in, d], (6.0 / fan_in).sqrt()),
                        bias: init_bias(d),
                    });
                    c_in = d;
                }
                layers
            };
        let branch_xy = make_branch(&mut init, &mut init_relu_bias);
        let branch_xz = make_branch(&mut init, &mut init_relu_bias);
        let mut head = Vec::new();
        let mut w_in = cfg.flatten_len();
        for w in cfg.head_widths {
            head.push(DenseLayer {
                weight: init(&[w_in, w], (6.0 / w_in as f64).sqrt()),
                bias: init_relu_bias(w),
            });
            w_in = w;
        }
        let output = DenseLayer {
            weight: init(&[w_in, cfg.output_len], (3.0 / w_in as f64).sqrt()),
            bias: Tensor::zeros(&[cfg.output_len]),
        };
        Self {
            branch_xy,
            branch_xz,
            head,
            output,
        }
    }

    /// All-zero parameters with the model's shapes.
    pub fn zeros(cfg: &ModelConfig) -> Self {
        Self::build(cfg, |dims, _| Tensor::zeros(dims), |d| Tensor::zeros(&[d]))
    }

    /// Fan-in scaled uniform init: variance 2/fan_in before ReLU layers,
    /// 1/fan_in for the linear output. ReLU-layer biases start small and
    /// strictly positive so no unit sits exactly on the activation kink;
    /// the linear output bias starts at zero.
    pub fn init(cfg: &ModelConfig, seed: u64) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut rng_bias = ChaCha8Rng::seed_from_u64(seed ^ 0x5bd1_e995);
        Self::build(
            cfg,
            move |dims, a| {
                let len = dims.iter().product();
                let data = (0..len).map(|_| rng.random_range(-a..a)).collect();
                Tensor::from_vec(dims, data).expect("constructed length matches")
            },
            move |d| {
                let data = (0..d).map(|_| rng_bias.random_range(0.01..0.02)).collect();
                Tensor::from_vec(&[d], data).expect("constructed length matches")
            },
        )
    }

    /// Named tensors in canonical checkpoint order.
    pub fn named_tensors(&self) -> Vec<(String, &Tensor)> {
        let mut out = Vec::new();
        for (branch, layers) in [("branch_xy", &self.branch_xy), ("branch_xz", &self.branch_xz)] {
            for (l, layer) in layers.iter().enumerate() {
                out.push((format!("{branch}.conv{l}.kernel"), &layer.kernels));
                out.push((format!("{branch}.conv{l}.bias"), &layer.bias));
            }
        }
        for (l, layer) in self.head.iter().enumerate() {
            out.push((format!("head.dense{l}.weight"), &layer.weight));
            out.push((format!("head.dense{l}.bias"), &layer.bias));
        }
        out.push(("output.weight".to_string(), &self.output.weight));
        out.push(("output.bias".to_string(), &self.output.bias));
        out
    }

    /// Mutable tensors in the same canonical order as
    /// [`Self::named_tensors`].
    pub fn tensors_mut(&mut self) -> Vec<&mut Tensor> {
        let mut out: Vec<&mut Tensor> = Vec::new();
        for layers in [&mut self.branch_xy, &mut self.branch_xz] {
            for layer in layers.iter_mut() {
                out.push(&mut layer.kernels);
                out.push(&mut layer.bias);
            }
        }
        for layer in self.head.iter_mut() {
            out.push(&mut layer.weight);
            out.push(&mut layer.bias);
        }
        out.push(&mut self.output.weight);
        out.push(&mut self.output.bias);
        out
    }

    /// Total scalar parameter count.
    pub fn value_count(&self) -> usize {
        self.named_tensors().iter().map(|(_, t)| t.len()).sum()
    }
}

/// Mean squared error over two equal-length vectors.
pub fn mse_loss(pred: &[f64], truth: &[f64]) -> Result<f64, NnError> {
    if pred.len() != truth.len() || pred.is_empty() {
        return Err(NnError::Shape(format!(
            "mse_loss lengths {} vs {}",
            pred.len(),
            truth.len()
        )));
    }
    Ok(pred
        .iter()
        .zip(truth)
        .map(|(p, t)| (p - t) * (p - t))
        .sum::<f64>()
        / pred.len() as f64)
}

/// One training sample: both encoded views plus the normalized target.
#[derive(Debug, Clone)]
pub struct TrainSample {
    pub img_xy: EncodedImage,
    pub img_xz: EncodedImage,
    pub target: Vec<f64>,
}

struct ConvTrace {
    input: Tensor,
    activated: Tensor,
    mask: Vec<u8>,
}

struct HeadLayerTrace {
    input: Tensor,
    activated: Tensor,
    masks: Vec<u8>,
}

struct BatchTrace {
    branch_xy: Vec<Vec<ConvTrace>>,
    branch_xz: Vec<Vec<ConvTrace>>,
    head: Vec<HeadLayerTrace>,
    out_input: Tensor,
}

fn mix(a: u64, b: u64) -> u64 {
    let mut z = a ^ b.wrapping_mul(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

const TAG_BRANCH_XY: u64 = 1000;
const TAG_BRANCH_XZ: u64 = 2000;
const TAG_HEAD: u64 = 3000;

/// The forked CNN with its parameters.
#[derive(Debug, Clone)]
pub struct ForkedModel {
    cfg: ModelConfig,
    params: Parameters,
}

impl ForkedModel {
    /// Seeded fan-in initialization.
    pub fn new(cfg: ModelConfig, seed: u64) -> Result<Self, NnError> {
        cfg.validate()?;
        let params = Parameters::init(&cfg, seed);
        Ok(Self { cfg, params })
    }

    /// All-zero parameters (outputs are identically zero).
    pub fn zeroed(cfg: ModelConfig) -> Result<Self, NnError> {
        cfg.validate()?;
        let params = Parameters::zeros(&cfg);
        Ok(Self { cfg, params })
    }

    pub fn from_parts(cfg: ModelConfig, params: Parameters) -> Result<Self, NnError> {
        cfg.validate()?;
        Ok(Self { cfg, params })
    }

    pub fn config(&self) -> &ModelConfig {
        &self.cfg
    }

    pub fn params(&self) -> &Parameters {
        &self.params
    }

    pub fn params_mut(&mut self) -> &mut Parameters {
        &mut self.params
    }

    fn image_tensor(&self, img: &EncodedImage) -> Tensor {
        Tensor::from_vec(
            &[img.side(), img.side(), 3],
            img.flat_values(),
        )
        .expect("image is side*side*3 by construction")
    }

    fn check_images(&self, xy: &EncodedImage, xz: &EncodedImage) -> Result<(), NnError> {
        if xy.side() != xz.side() {
            return Err(NnError::Shape(format!(
                "image sides differ: {} vs {}",
                xy.side(),
                xz.side()
            )));
        }
        if xy.side() != self.cfg.input_side {
            return Err(NnError::Shape(format!(
                "model expects {0}x{0} images, got {1}x{1}",
                self.cfg.input_side,
                xy.side()
            )));
        }
        Ok(())
    }

    fn branch_forward(
        &self,
        layers: &[ConvLayer],
        image: Tensor,
        mode: Mode,
        sample_seed: u64,
        tag: u64,
        rate: f64,
        trace: Option<&mut Vec<ConvTrace>>,
    ) -> Tensor {
        let mut x = image;
        let mut traces = trace;
        for (l, layer) in layers.iter().enumerate() {
            let pre = conv2d_forward(&x, &layer.kernels, &layer.bias)
                .expect("branch shapes are construction-consistent");
            let activated = relu(&pre);
            let mut out = activated.clone();
            let mask = if mode == Mode::Train && rate > 0.0 {
                let mask = dropout_mask(out.len(), rate, mix(sample_seed, tag + l as u64));
                apply_dropout(out.data_mut(), &mask, rate);
                mask
            } else {
                Vec::new()
            };
            if let Some(tr) = traces.as_deref_mut() {
                tr.push(ConvTrace {
                    input: x,
                    activated,
                    mask,
                });
            }
            x = out;
        }
        x
    }

    /// Forward pass over a batch; rows of the returned tensor are the
    /// per-sample 75-vectors.
    fn forward_batch_inner(
        &self,
        images: &[(&EncodedImage, &EncodedImage)],
        mode: Mode,
        seed: u64,
        want_trace: bool,
    ) -> Result<(Tensor, Option<BatchTrace>), NnError> {
        let b = images.len();
        if b == 0 {
            return Err(NnError::EmptyDataset);
        }
        for (xy, xz) in images {
            self.check_images(xy, xz)?;
        }
        let f = self.cfg.flatten_len();
        let half = f / 2;
        let mut x1 = Tensor::zeros(&[b, f]);
        let mut trace_xy = Vec::with_capacity(if want_trace { b } else { 0 });
        let mut trace_xz = Vec::with_capacity(if want_trace { b } else { 0 });

        let d3 = self.cfg.conv_depths[2];
        for (s, (xy, xz)) in images.iter().enumerate() {
            let sample_seed = mix(seed, s as u64);
            let mut t_xy = Vec::new();
            let mut t_xz = Vec::new();
            let out_xy = self.branch_forward(
                &self.params.branch_xy,
                self.image_tensor(xy),
                mode,
                sample_seed,
                TAG_BRANCH_XY,
                self.cfg.conv_dropout,
                want_trace.then_some(&mut t_xy),
            );
            let out_xz = self.branch_forward(
                &self.params.branch_xz,
                self.image_tensor(xz),
                mode,
                sample_seed,
                TAG_BRANCH_XZ,
                self.cfg.conv_dropout,
                want_trace.then_some(&mut t_xz),
            );
            // Interleave per pixel: xy channels then xz channels, flattened
            // row-major.
            let row = &mut x1.data_mut()[s * f..(s + 1) * f];
            for p in 0..half / d3 {
                row[p * 2 * d3..p * 2 * d3 + d3]
                    .copy_from_slice(&out_xy.data()[p * d3..(p + 1) * d3]);
                row[p * 2 * d3 + d3..(p + 1) * 2 * d3]
                    .copy_from_slice(&out_xz.data()[p * d3..(p + 1) * d3]);
            }
            if want_trace {
                trace_xy.push(t_xy);
                trace_xz.push(t_xz);
            }
        }

        // Dense head, batched.
        let mut head_traces = Vec::new();
        let mut x = x1;
        for (l, layer) in self.params.head.iter().enumerate() {
            let (w_in, w_out) = (layer.weight.dims()[0], layer.weight.dims()[1]);
            debug_assert_eq!(x.dims()[1], w_in);
            let mut pre = Tensor::zeros(&[b, w_out]);
            for row in pre.data_mut().chunks_exact_mut(w_out) {
                row.copy_from_slice(layer.bias.data());
            }
            mm_ab_acc(pre.data_mut(), x.data(), layer.weight.data(), b, w_in, w_out);
            let activated = relu(&pre);
            let mut out = activated.clone();
            let masks = if mode == Mode::Train && self.cfg.head_dropout > 0.0 {
                let mut masks = Vec::with_capacity(b * w_out);
                for s in 0..b {
                    masks.extend(dropout_mask(
                        w_out,
                        self.cfg.head_dropout,
                        mix(mix(seed, s as u64), TAG_HEAD + l as u64),
                    ));
                }
                apply_dropout(out.data_mut(), &masks, self.cfg.head_dropout);
                masks
            } else {
                Vec::new()
            };
            if want_trace {
                head_traces.push(HeadLayerTrace {
                    input: x.clone(),
                    activated,
                    masks,
                });
            }
            x = out;
        }

        let (w_in, w_out) = (
            self.params.output.weight.dims()[0],
            self.params.output.weight.dims()[1],
        );
        let mut y = Tensor::zeros(&[b, w_out]);
        for row in y.data_mut().chunks_exact_mut(w_out) {
            row.copy_from_slice(self.params.output.bias.data());
        }
        mm_ab_acc(
            y.data_mut(),
            x.data(),
            self.params.output.weight.data(),
            b,
            w_in,
            w_out,
        );

        let trace = want_trace.then_some(BatchTrace {
            branch_xy: trace_xy,
            branch_xz: trace_xz,
            head: head_traces,
            out_input: x,
        });
        Ok((y, trace))
    }

    /// Forward one image pair. Deterministic in [`Mode::Infer`]; in
    /// [`Mode::Train`] the seed fixes the dropout masks.
    pub fn forward(
        &self,
        img_xy: &EncodedImage,
        img_xz: &EncodedImage,
        mode: Mode,
        seed: u64,
    ) -> Result<Vec<f64>, NnError> {
        let (y, _) = self.forward_batch_inner(&[(img_xy, img_xz)], mode, seed, false)?;
        Ok(y.data().to_vec())
    }

    /// Mean inference-mode MSE over a dataset.
    pub fn evaluate(&self, samples: &[TrainSample], batch_size: usize) -> Result<f64, NnError> {
        if samples.is_empty() {
            return Err(NnError::EmptyDataset);
        }
        let mut total = 0.0;
        for chunk in samples.chunks(batch_size.max(1)) {
            let images: Vec<(&EncodedImage, &EncodedImage)> =
                chunk.iter().map(|s| (&s.img_xy, &s.img_xz)).collect();
            let (y, _) = self.forward_batch_inner(&images, Mode::Infer, 0, false)?;
            let out = self.cfg.output_len;
            for (s, sample) in chunk.iter().enumerate() {
                total += mse_loss(&y.data()[s * out..(s + 1) * out], &sample.target)?;
            }
        }
        Ok(total / samples.len() as f64)
    }

    /// Forward the batch in train mode and backpropagate the mean MSE.
    ///
    /// Dropout masks are drawn once from `seed` and reused exactly in the
    /// backward pass. Returns the batch loss and per-parameter gradients.
    pub fn backward(
        &self,
        batch: &[&TrainSample],
        seed: u64,
    ) -> Result<(f64, Parameters), NnError> {
        let b = batch.len();
        if b == 0 {
            return Err(NnError::EmptyDataset);
        }
        let out_len = self.cfg.output_len;
        for s in batch {
            if s.target.len() != out_len {
                return Err(NnError::Shape(format!(
                    "target length {} != {}",
                    s.target.len(),
                    out_len
                )));
            }
        }
        let images: Vec<(&EncodedImage, &EncodedImage)> =
            batch.iter().map(|s| (&s.img_xy, &s.img_xz)).collect();
        let (y, trace) = self.forward_batch_inner(&images, Mode::Train, seed, true)?;
        let trace = trace.expect("trace requested");

        // Mean batch MSE and its gradient.
        let mut loss = 0.0;
        let mut dy = Tensor::zeros(&[b, out_len]);
        for s in 0..b {
            for i in 0..out_len {
                let diff = y.data()[s * out_len + i] - batch[s].target[i];
                loss += diff * diff;
                dy.data_mut()[s * out_len + i] = 2.0 * diff / (b * out_len) as f64;
            }
        }
        loss /= (b * out_len) as f64;

        let mut grads = Parameters::zeros(&self.cfg);

        // Output layer.
        let w_last = self.params.output.weight.dims()[0];
        mm_at_b_acc(
            grads.output.weight.data_mut(),
            trace.out_input.data(),
            dy.data(),
            b,
            w_last,
            out_len,
        );
        for row in dy.data().chunks_exact(out_len) {
            for (g, v) in grads.output.bias.data_mut().iter_mut().zip(row) {
                *g += v;
            }
        }
        let mut d_cur = Tensor::zeros(&[b, w_last]);
        mm_a_bt(
            d_cur.data_mut(),
            dy.data(),
            self.params.output.weight.data(),
            b,
            out_len,
            w_last,
        );

        // Head layers in reverse.
        let head_scale = 1.0 / (1.0 - self.cfg.head_dropout);
        for l in (0..self.params.head.len()).rev() {
            let layer = &self.params.head[l];
            let tr = &trace.head[l];
            let (w_in, w_out) = (layer.weight.dims()[0], layer.weight.dims()[1]);
            // Through dropout, then ReLU.
            let mut dpre = d_cur;
            if !tr.masks.is_empty() {
                for (v, &m) in dpre.data_mut().iter_mut().zip(&tr.masks) {
                    *v = if m == 1 { *v * head_scale } else { 0.0 };
                }
            }
            for (v, &a) in dpre.data_mut().iter_mut().zip(tr.activated.data()) {
                if a <= 0.0 {
                    *v = 0.0;
                }
            }
            mm_at_b_acc(
                grads.head[l].weight.data_mut(),
                tr.input.data(),
                dpre.data(),
                b,
                w_in,
                w_out,
            );
            for row in dpre.data().chunks_exact(w_out) {
                for (g, v) in grads.head[l].bias.data_mut().iter_mut().zip(row) {
                    *g += v;
                }
            }
            let mut d_prev = Tensor::zeros(&[b, w_in]);
            mm_a_bt(
                d_prev.data_mut(),
                dpre.data(),
                layer.weight.data(),
                b,
                w_out,
                w_in,
            );
            d_cur = d_prev;
        }

        // Split the flatten gradient back into per-sample branch gradients.
        let n = self.cfg.input_side;
        let d3 = self.cfg.conv_depths[2];
        let f = self.cfg.flatten_len();
        let conv_scale = 1.0 / (1.0 - self.cfg.conv_dropout);
        for s in 0..b {
            let row = &d_cur.data()[s * f..(s + 1) * f];
            let mut d_xy = Tensor::zeros(&[n, n, d3]);
            let mut d_xz = Tensor::zeros(&[n, n, d3]);
            for p in 0..n * n {
                d_xy.data_mut()[p * d3..(p + 1) * d3]
                    .copy_from_slice(&row[p * 2 * d3..p * 2 * d3 + d3]);
                d_xz.data_mut()[p * d3..(p + 1) * d3]
                    .copy_from_slice(&row[p * 2 * d3 + d3..(p + 1) * 2 * d3]);
            }
            self.branch_backward(
                &self.params.branch_xy,
                &trace.branch_xy[s],
                d_xy,
                conv_scale,
                &mut grads.branch_xy,
            );
            self.branch_backward(
                &self.params.branch_xz,
                &trace.branch_xz[s],
                d_xz,
                conv_scale,
                &mut grads.branch_xz,
            );
        }

        Ok((loss, grads))
    }

    fn branch_backward(
        &self,
        layers: &[ConvLayer],
        traces: &[ConvTrace],
        mut d_out: Tensor,
        scale: f64,
        grads: &mut Vec<ConvLayer>,
    ) {
        for l in (0..layers.len()).rev() {
            let tr = &traces[l];
            let mut dpre = d_out;
            if !tr.mask.is_empty() {
                for (v, &m) in dpre.data_mut().iter_mut().zip(&tr.mask) {
                    *v = if m == 1 { *v * scale } else { 0.0 };
                }
            }
            for (v, &a) in dpre.data_mut().iter_mut().zip(tr.activated.data()) {
                if a <= 0.0 {
                    *v = 0.0;
                }
            }
            let (d_input, dk, db) = conv2d_backward(&tr.input, &layers[l].kernels, &dpre)
                .expect("trace shapes match layer shapes");
            for (g, v) in grads[l].kernels.data_mut().iter_mut().zip(dk.data()) {
                *g += v;
            }
            for (g, v) in grads[l].bias.data_mut().iter_mut().zip(db.data()) {
                *g += v;
            }
            d_out = d_input;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use radar_dsp::Plane;

    fn image(side: usize, seed: u64) -> EncodedImage {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let values: Vec<f64> = (0..side * side * 3).map(|_| rng.random_range(0.0..1.0)).collect();
        EncodedImage::from_flat(side, Plane::XY, &values).unwrap()
    }

    #[test]
    fn zeroed_model_outputs_zeros() {
        let model = ForkedModel::zeroed(ModelConfig::miniature()).unwrap();
        let y = model
            .forward(&image(4, 1), &image(4, 2), Mode::Infer, 0)
            .unwrap();
        assert_eq!(y.len(), 75);
        assert!(y.iter().all(|&v| v == 0.0));
    }

    #[test]
    fn inference_is_deterministic_and_training_is_stochastic() {
        let model = ForkedModel::new(ModelConfig::miniature(), 5).unwrap();
        let (xy, xz) = (image(4, 1), image(4, 2));
        let a = model.forward(&xy, &xz, Mode::Infer, 0).unwrap();
        let b = model.forward(&xy, &xz, Mode::Infer, 99).unwrap();
        assert_eq!(a, b);

        let t1 = model.forward(&xy, &xz, Mode::Train, 1).unwrap();
        let t2 = model.forward(&xy, &xz, Mode::Train, 2).unwrap();
        let t1_again = model.forward(&xy, &xz, Mode::Train, 1).unwrap();
        assert_eq!(t1, t1_again);
        assert_ne!(t1, t2);
    }

    #[test]
    fn image_side_mismatch_is_structural() {
        let model = ForkedModel::new(ModelConfig::miniature(), 5).unwrap();
        assert!(matches!(
            model.forward(&image(4, 1), &image(8, 2), Mode::Infer, 0),
            Err(NnError::Shape(_))
        ));
        assert!(model
            .forward(&image(8, 1), &image(8, 2), Mode::Infer, 0)
            .is_err());
    }

    #[test]
    fn mse_loss_reference_values() {
        let a = vec![1.0; 75];
        assert_eq!(mse_loss(&a, &a).unwrap(), 0.0);
        let b = vec![2.0; 75];
        assert_eq!(mse_loss(&a, &b).unwrap(), 1.0);
        let mut c = vec![0.0; 75];
        c[0] = 3.0;
        let z = vec![0.0; 75];
        assert!((mse_loss(&c, &z).unwrap() - 0.12).abs() < 1e-15);
        assert!(mse_loss(&a, &[1.0]).is_err());
    }

    #[test]
    fn parameter_counts_match_closed_form() {
        assert_eq!(conv2d_param_count(3, 3, 1, false), 27);
        assert_eq!(conv2d_param_count(3, 3, 16, true), 448);
        assert_eq!(conv2d_param_count(1, 1, 1, false), 1);

        let full = ModelConfig::default();
        assert_eq!(full.param_count(), 16_998_795);
        let model = ForkedModel::new(full, 0).unwrap();
        assert_eq!(model.params().value_count(), 16_998_795);

        let mini = ModelConfig::miniature();
        assert_eq!(mini.param_count(), 1603);
        let model = ForkedModel::new(mini, 0).unwrap();
        assert_eq!(model.params().value_count(), 1603);
    }

    #[test]
    fn conv_parameters_scale_linearly_in_depth() {
        let base = conv2d_param_count(3, 3, 1, false);
        for d in [2, 7, 64] {
            assert_eq!(conv2d_param_count(3, 3, d, false), d * base);
        }
    }

    #[test]
    fn forward_shape_chain_for_default_config() {
        let cfg = ModelConfig::default();
        assert_eq!(cfg.flatten_len(), 32_768);
        assert_eq!(cfg.head_widths, [512, 256, 128]);
        assert_eq!(cfg.output_len, 75);
        let model = ForkedModel::new(cfg, 3).unwrap();
        let dims: Vec<Vec<usize>> = model
            .params()
            .named_tensors()
            .iter()
            .map(|(_, t)| t.dims().to_vec())
            .collect();
        assert_eq!(dims[0], vec![3, 3, 3, 16]);
        assert_eq!(dims[2], vec![3, 3, 16, 32]);
        assert_eq!(dims[4], vec![3, 3, 32, 64]);
        assert_eq!(dims[12], vec![32_768, 512]);
        assert_eq!(dims[14], vec![512, 256]);
        assert_eq!(dims[16], vec![256, 128]);
        assert_eq!(dims[18], vec![128, 75]);
        let y = model
            .forward(&image(16, 1), &image(16, 2), Mode::Infer, 0)
            .unwrap();
        assert_eq!(y.len(), 75);
    }

    #[test]
    fn zero_loss_batch_has_zero_gradients() {
        let model = ForkedModel::zeroed(ModelConfig::miniature()).unwrap();
        let sample = TrainSample {
            img_xy: image(4, 1),
            img_xz: image(4, 2),
            target: vec![0.0; 75],
        };
        let (loss, grads) = model.backward(&[&sample], 0).unwrap();
        assert_eq!(loss, 0.0);
        for (_, t) in grads.named_tensors() {
            assert!(t.data().iter().all(|&v| v == 0.0));
        }
    }
}
