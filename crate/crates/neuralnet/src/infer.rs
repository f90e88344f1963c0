//! Latency-oriented f32 inference path.
//!
//! Streaming use is dominated by weight-memory traffic on the first dense
//! layer, so inference runs on the f32 checkpoint values directly (half
//! the traffic of the f64 training path) and skips zero activations, which
//! ReLU makes plentiful. Agreement with the f64 forward pass is within
//! f32 rounding and is covered by tests.

use encoder::EncodedImage;

use crate::checkpoint::Checkpoint;
use crate::model::{ForkedModel, Mode, ModelConfig};
use crate::NnError;

/// Anything that maps an image pair to the 75 normalized outputs.
pub trait Predictor: Send + Sync {
    fn predict(&self, xy: &EncodedImage, xz: &EncodedImage) -> Result<Vec<f64>, NnError>;
}

/// The canonical f64 model in inference mode.
impl Predictor for ForkedModel {
    fn predict(&self, xy: &EncodedImage, xz: &EncodedImage) -> Result<Vec<f64>, NnError> {
        self.forward(xy, xz, Mode::Infer, 0)
    }
}

struct ConvLayerF32 {
    kernels: Vec<f32>, // [k, k, c, d]
    bias: Vec<f32>,
    c_in: usize,
    depth: usize,
}

struct DenseLayerF32 {
    weight: Vec<f32>, // [in, out]
    bias: Vec<f32>,
    n_in: usize,
    n_out: usize,
}

/// f32 forward-only model.
pub struct InferModel {
    cfg: ModelConfig,
    branch_xy: Vec<ConvLayerF32>,
    branch_xz: Vec<ConvLayerF32>,
    head: Vec<DenseLayerF32>,
    output: DenseLayerF32,
}

impl InferModel {
    /// Build directly from checkpoint tensors (no f64 detour).
    pub fn from_checkpoint(ckpt: &Checkpoint) -> Result<Self, NnError> {
        let cfg = ckpt.model_config().map_err(NnError::Checkpoint)?;
        cfg.validate()?;
        let entry = |name: &str| -> Result<&crate::checkpoint::TensorEntry, NnError> {
            ckpt.tensors()
                .iter()
                .find(|t| t.name == name)
                .ok_or_else(|| {
                    NnError::Checkpoint(crate::checkpoint::CheckpointError::MissingTensor(
                        name.to_string(),
                    ))
                })
        };
        let conv_branch = |prefix: &str| -> Result<Vec<ConvLayerF32>, NnError> {
            let mut layers = Vec::new();
            let mut c_in = cfg.input_channels;
            for (l, d) in cfg.conv_depths.into_iter().enumerate() {
                let k = entry(&format!("{prefix}.conv{l}.kernel"))?;
                let b = entry(&format!("{prefix}.conv{l}.bias"))?;
                let want = cfg.kernel_side * cfg.kernel_side * c_in * d;
                if k.values.len() != want || b.values.len() != d {
                    return Err(NnError::Shape(format!("{prefix}.conv{l} size")));
                }
                layers.push(ConvLayerF32 {
                    kernels: k.values.clone(),
                    bias: b.values.clone(),
                    c_in,
                    depth: d,
                });
                c_in = d;
            }
            Ok(layers)
        };
        let dense = |name: &str, n_in: usize, n_out: usize| -> Result<DenseLayerF32, NnError> {
            let w = entry(&format!("{name}.weight"))?;
            let b = entry(&format!("{name}.bias"))?;
            if w.values.len() != n_in * n_out || b.values.len() != n_out {
                return Err(NnError::Shape(format!("{name} size")));
            }
            Ok(DenseLayerF32 {
                weight: w.values.clone(),
                bias: b.values.clone(),
                n_in,
                n_out,
            })
        };
        let mut head = Vec::new();
        let mut w_in = cfg.flatten_len();
        for (l, w) in cfg.head_widths.into_iter().enumerate() {
            head.push(dense(&format!("head.dense{l}"), w_in, w)?);
            w_in = w;
        }
        Ok(Self {
            branch_xy: conv_branch("branch_xy")?,
            branch_xz: conv_branch("branch_xz")?,
            output: dense("output", w_in, cfg.output_len)?,
            head,
            cfg,
        })
    }

    /// Convenience: snapshot a live model.
    pub fn from_model(model: &ForkedModel) -> Self {
        let ckpt = Checkpoint::capture(model, None, 0, f64::INFINITY);
        Self::from_checkpoint(&ckpt).expect("capture produces a complete checkpoint")
    }

    pub fn config(&self) -> &ModelConfig {
        &self.cfg
    }

    fn branch(&self, layers: &[ConvLayerF32], image: &EncodedImage) -> Vec<f32> {
        let n = self.cfg.input_side;
        let mut x: Vec<f32> = image.flat_values().iter().map(|&v| v as f32).collect();
        let k = self.cfg.kernel_side;
        let pad = (k / 2) as isize;
        for layer in layers {
            let (c, d) = (layer.c_in, layer.depth);
            let mut out = vec![0.0f32; n * n * d];
            for y in 0..n as isize {
                for xcol in 0..n as isize {
                    let acc = &mut out[(y as usize * n + xcol as usize) * d
                        ..(y as usize * n + xcol as usize + 1) * d];
                    acc.copy_from_slice(&layer.bias);
                    for ky in 0..k as isize {
                        let sy = y + ky - pad;
                        if sy < 0 || sy >= n as isize {
                            continue;
                        }
                        for kx in 0..k as isize {
                            let sx = xcol + kx - pad;
                            if sx < 0 || sx >= n as isize {
                                continue;
                            }
                            let src = ((sy as usize) * n + sx as usize) * c;
                            let kbase = ((ky as usize * k) + kx as usize) * c;
                            for ch in 0..c {
                                let xv = x[src + ch];
                                if xv == 0.0 {
                                    continue;
                                }
                                let wrow = &layer.kernels[(kbase + ch) * d..(kbase + ch + 1) * d];
                                for (a, w) in acc.iter_mut().zip(wrow) {
                                    *a += xv * w;
                                }
                            }
                        }
                    }
                    for a in acc.iter_mut() {
                        if *a < 0.0 {
                            *a = 0.0;
                        }
                    }
                }
            }
            x = out;
        }
        x
    }

    fn dense(layer: &DenseLayerF32, x: &[f32], relu_after: bool) -> Vec<f32> {
        let mut y = layer.bias.clone();
        for (k, &xv) in x.iter().enumerate() {
            if xv == 0.0 {
                continue;
            }
            let wrow = &layer.weight[k * layer.n_out..(k + 1) * layer.n_out];
            for (yv, w) in y.iter_mut().zip(wrow) {
                *yv += xv * w;
            }
        }
        if relu_after {
            for v in y.iter_mut() {
                if *v < 0.0 {
                    *v = 0.0;
                }
            }
        }
        debug_assert_eq!(x.len(), layer.n_in);
        y
    }
}

impl Predictor for InferModel {
    fn predict(&self, xy: &EncodedImage, xz: &EncodedImage) -> Result<Vec<f64>, NnError> {
        if xy.side() != xz.side() || xy.side() != self.cfg.input_side {
            return Err(NnError::Shape(format!(
                "expected {0}x{0} image pair, got {1} and {2}",
                self.cfg.input_side,
                xy.side(),
                xz.side()
            )));
        }
        let out_xy = self.branch(&self.branch_xy, xy);
        let out_xz = self.branch(&self.branch_xz, xz);
        let d3 = self.cfg.conv_depths[2];
        let n2 = self.cfg.input_side * self.cfg.input_side;
        let mut x = vec![0.0f32; self.cfg.flatten_len()];
        for p in 0..n2 {
            x[p * 2 * d3..p * 2 * d3 + d3].copy_from_slice(&out_xy[p * d3..(p + 1) * d3]);
            x[p * 2 * d3 + d3..(p + 1) * 2 * d3].copy_from_slice(&out_xz[p * d3..(p + 1) * d3]);
        }
        for layer in &self.head {
            x = Self::dense(layer, &x, true);
        }
        let y = Self::dense(&self.output, &x, false);
        Ok(y.into_iter().map(|v| v as f64).collect())
    }
}
