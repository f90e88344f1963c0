//! From-scratch neural network stack for joint regression.
//!
//! Two convolutional branches (one per radar view) feed a shared dense
//! head that regresses the 75 joint coordinates. Everything is f64 and
//! hand-differentiated; training is plain minibatch Adam with
//! checkpoint-on-best-validation. [`InferModel`] provides an f32 forward
//! path for latency-sensitive streaming use.

mod adam;
mod checkpoint;
mod infer;
mod model;
mod ops;
mod tensor;
mod train;

pub use adam::{adam_step, sgd_step, AdamState};
pub use checkpoint::{Checkpoint, CheckpointError, TensorEntry};
pub use infer::{InferModel, Predictor};
pub use model::{
    conv2d_param_count, mse_loss, ForkedModel, Mode, ModelConfig, Parameters,
};
pub use ops::{concat_depth, conv2d_forward, dense_forward, dropout, flatten, relu};
pub use tensor::Tensor;
pub use train::{train, EpochStats, TrainConfig, TrainSample};

use thiserror::Error;

/// Errors raised by tensor ops, the model and training.
#[derive(Debug, Error)]
pub enum NnError {
    #[error("shape mismatch: {0}")]
    Shape(String),

    #[error("invalid configuration: {0}")]
    Config(&'static str),

    #[error("dataset is empty")]
    EmptyDataset,

    #[error(transparent)]
    Checkpoint(#[from] CheckpointError),
}
