//! Binary checkpoint format.
//!
//! Layout (all integers little-endian, values 32-bit IEEE-754):
//!
//! ```text
//! magic "MMPW" | version: u32 | tensor_count: u32
//! tensor_count x record
//! record "epoch"          (rank 1, dims [1])
//! record "best_val_loss"  (rank 1, dims [1])
//!
//! record = name_len: u32 | name: UTF-8 | rank: u32 | dims: u32 x rank
//!          | values: f32 x prod(dims), row-major
//! ```
//!
//! Tensors carry the model parameters, a `meta.model_config` descriptor
//! and the Adam moment state (`optim.step`, `optim.m.*`, `optim.v.*`).
//! Parsing never trusts a declared length without checking the remaining
//! input first.

use std::fs;
use std::path::Path;

use thiserror::Error;

use crate::adam::AdamState;
use crate::model::{ForkedModel, ModelConfig, Parameters};
use crate::tensor::Tensor;
use crate::NnError;

const MAGIC: &[u8; 4] = b"MMPW";
const VERSION: u32 = 1;
const MAX_NAME_LEN: u32 = 1 << 16;
const MAX_RANK: u32 = 32;

/// Errors from reading or interpreting a checkpoint.
#[derive(Debug, Error)]
pub enum CheckpointError {
    #[error("bad magic bytes (not a checkpoint)")]
    BadMagic,

    #[error("unsupported format version {got}")]
    UnsupportedVersion { got: u32 },

    #[error("file is truncated")]
    Truncated,

    #[error("malformed checkpoint: {0}")]
    Malformed(&'static str),

    #[error("unexpected trailing bytes")]
    TrailingBytes,

    #[error("tensor `{0}` is missing")]
    MissingTensor(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

/// One named tensor as stored on disk.
#[derive(Debug, Clone, PartialEq)]
pub struct TensorEntry {
    pub name: String,
    pub dims: Vec<u32>,
    pub values: Vec<f32>,
}

/// A serialized model snapshot: parameters, optimizer moments, the epoch
/// index and the best validation loss.
#[derive(Debug, Clone, PartialEq)]
pub struct Checkpoint {
    tensors: Vec<TensorEntry>,
    epoch: u32,
    best_val_loss: f32,
}

fn entry_from_tensor(name: String, t: &Tensor) -> TensorEntry {
    TensorEntry {
        name,
        dims: t.dims().iter().map(|&d| d as u32).collect(),
        values: t.data().iter().map(|&v| v as f32).collect(),
    }
}

impl Checkpoint {
    /// Snapshot a model (and optionally its optimizer state).
    pub fn capture(
        model: &ForkedModel,
        adam: Option<&AdamState>,
        epoch: u32,
        best_val_loss: f64,
    ) -> Self {
        let cfg = model.config();
        let mut tensors = vec![TensorEntry {
            name: "meta.model_config".to_string(),
            dims: vec![12],
            values: vec![
                cfg.input_side as f32,
                cfg.input_channels as f32,
                cfg.conv_depths[0] as f32,
                cfg.conv_depths[1] as f32,
                cfg.conv_depths[2] as f32,
                cfg.head_widths[0] as f32,
                cfg.head_widths[1] as f32,
                cfg.head_widths[2] as f32,
                cfg.output_len as f32,
                cfg.kernel_side as f32,
                (cfg.conv_dropout * 1e6).round() as f32,
                (cfg.head_dropout * 1e6).round() as f32,
            ],
        }];
        for (name, t) in model.params().named_tensors() {
            tensors.push(entry_from_tensor(name, t));
        }
        if let Some(state) = adam {
            tensors.push(TensorEntry {
                name: "optim.step".to_string(),
                dims: vec![1],
                values: vec![state.step as f32],
            });
            for (name, t) in state.m.named_tensors() {
                tensors.push(entry_from_tensor(format!("optim.m.{name}"), t));
            }
            for (name, t) in state.v.named_tensors() {
                tensors.push(entry_from_tensor(format!("optim.v.{name}"), t));
            }
        }
        Self {
            tensors,
            epoch,
            best_val_loss: best_val_loss as f32,
        }
    }

    pub fn epoch(&self) -> u32 {
        self.epoch
    }

    pub fn best_val_loss(&self) -> f32 {
        self.best_val_loss
    }

    pub fn tensors(&self) -> &[TensorEntry] {
        &self.tensors
    }

    fn find(&self, name: &str) -> Result<&TensorEntry, CheckpointError> {
        self.tensors
            .iter()
            .find(|t| t.name == name)
            .ok_or_else(|| CheckpointError::MissingTensor(name.to_string()))
    }

    /// Reconstruct the model configuration stored in the checkpoint.
    pub fn model_config(&self) -> Result<ModelConfig, CheckpointError> {
        let meta = self.find("meta.model_config")?;
        if meta.values.len() != 12 {
            return Err(CheckpointError::Malformed("meta.model_config length"));
        }
        let v = &meta.values;
        Ok(ModelConfig {
            input_side: v[0] as usize,
            input_channels: v[1] as usize,
            conv_depths: [v[2] as usize, v[3] as usize, v[4] as usize],
            head_widths: [v[5] as usize, v[6] as usize, v[7] as usize],
            output_len: v[8] as usize,
            kernel_side: v[9] as usize,
            conv_dropout: v[10] as f64 / 1e6,
            head_dropout: v[11] as f64 / 1e6,
        })
    }

    /// Rebuild an f64 model from the stored parameters.
    pub fn to_model(&self) -> Result<ForkedModel, NnError> {
        let cfg = self.model_config()?;
        cfg.validate()?;
        let mut params = Parameters::zeros(&cfg);
        let names: Vec<String> = params.named_tensors().iter().map(|(n, _)| n.clone()).collect();
        for (name, tensor) in names.iter().zip(params.tensors_mut()) {
            let entry = self.find(name)?;
            let want: Vec<u32> = tensor.dims().iter().map(|&d| d as u32).collect();
            if entry.dims != want {
                return Err(NnError::Checkpoint(CheckpointError::Malformed(
                    "tensor dims disagree with model config",
                )));
            }
            for (dst, src) in tensor.data_mut().iter_mut().zip(&entry.values) {
                *dst = *src as f64;
            }
        }
        ForkedModel::from_parts(cfg, params)
    }

    /// Serialize to the binary format.
    pub fn to_bytes(&self) -> Vec<u8> {
        let mut out = Vec::new();
        out.extend_from_slice(MAGIC);
        out.extend_from_slice(&VERSION.to_le_bytes());
        out.extend_from_slice(&(self.tensors.len() as u32).to_le_bytes());
        for t in &self.tensors {
            write_record(&mut out, &t.name, &t.dims, &t.values);
        }
        write_record(&mut out, "epoch", &[1], &[self.epoch as f32]);
        write_record(&mut out, "best_val_loss", &[1], &[self.best_val_loss]);
        out
    }

    /// Parse the binary format; never panics on malformed input.
    pub fn from_bytes(bytes: &[u8]) -> Result<Self, CheckpointError> {
        let mut r = Reader { buf: bytes, pos: 0 };
        if r.take(4)? != MAGIC {
            return Err(CheckpointError::BadMagic);
        }
        let version = r.u32()?;
        if version != VERSION {
            return Err(CheckpointError::UnsupportedVersion { got: version });
        }
        let count = r.u32()? as usize;
        let mut tensors = Vec::with_capacity(count.min(1024));
        for _ in 0..count {
            tensors.push(r.record()?);
        }
        let epoch_rec = r.record()?;
        if epoch_rec.name != "epoch" || epoch_rec.values.len() != 1 {
            return Err(CheckpointError::Malformed("epoch metadata"));
        }
        let loss_rec = r.record()?;
        if loss_rec.name != "best_val_loss" || loss_rec.values.len() != 1 {
            return Err(CheckpointError::Malformed("best_val_loss metadata"));
        }
        if r.pos != bytes.len() {
            return Err(CheckpointError::TrailingBytes);
        }
        let epoch_f = epoch_rec.values[0];
        if !(0.0..=u32::MAX as f32).contains(&epoch_f) {
            return Err(CheckpointError::Malformed("epoch out of range"));
        }
        Ok(Self {
            tensors,
            epoch: epoch_f as u32,
            best_val_loss: loss_rec.values[0],
        })
    }

    pub fn save(&self, path: &Path) -> Result<(), CheckpointError> {
        fs::write(path, self.to_bytes())?;
        Ok(())
    }

    pub fn load(path: &Path) -> Result<Self, CheckpointError> {
        let bytes = fs::read(path)?;
        Self::from_bytes(&bytes)
    }
}

fn write_record(out: &mut Vec<u8>, name: &str, dims: &[u32], values: &[f32]) {
    out.extend_from_slice(&(name.len() as u32).to_le_bytes());
    out.extend_from_slice(name.as_bytes());
    out.extend_from_slice(&(dims.len() as u32).to_le_bytes());
    for d in dims {
        out.extend_from_slice(&d.to_le_bytes());
    }
    for v in values {
        out.extend_from_slice(&v.to_le_bytes());
    }
}

struct Reader<'a> {
    buf: &'a [u8],
    pos: usize,
}

impl<'a> Reader<'a> {
    fn take(&mut self, n: usize) -> Result<&'a [u8], CheckpointError> {
        if self.buf.len() - self.pos < n {
            return Err(CheckpointError::Truncated);
        }
        let s = &self.buf[self.pos..self.pos + n];
        self.pos += n;
        Ok(s)
    }

    fn u32(&mut self) -> Result<u32, CheckpointError> {
        let b = self.take(4)?;
        Ok(u32::from_le_bytes([b[0], b[1], b[2], b[3]]))
    }

    fn record(&mut self) -> Result<TensorEntry, CheckpointError> {
        let name_len = self.u32()?;
        if name_len > MAX_NAME_LEN {
            return Err(CheckpointError::Malformed("name length"));
        }
        let name_bytes = self.take(name_len as usize)?;
        let name = std::str::from_utf8(name_bytes)
            .map_err(|_| CheckpointError::Malformed("name is not UTF-8"))?
            .to_string();
        let rank = self.u32()?;
        if rank > MAX_RANK {
            return Err(CheckpointError::Malformed("rank"));
        }
        let mut dims = Vec::with_capacity(rank as usize);
        let mut count: u64 = 1;
        for _ in 0..rank {
            let d = self.u32()?;
            count = count
                .checked_mul(d as u64)
                .ok_or(CheckpointError::Malformed("element count overflow"))?;
            dims.push(d);
        }
        let byte_len = count
            .checked_mul(4)
            .ok_or(CheckpointError::Malformed("element count overflow"))?;
        if byte_len > (self.buf.len() - self.pos) as u64 {
            return Err(CheckpointError::Truncated);
        }
        let raw = self.take(byte_len as usize)?;
        let values = raw
            .chunks_exact(4)
            .map(|c| f32::from_le_bytes([c[0], c[1], c[2], c[3]]))
            .collect();
        Ok(TensorEntry { name, dims, values })
    }
}
