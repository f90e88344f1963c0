//! Evaluation protocol for 3-D joint regression.
//!
//! Computes per-joint MAE over the test set, identifies the k worst
//! (outlier) joints, reports per-axis localization error and per-frame
//! Euclidean error over the retained skeleton, and compares everything
//! against a mean-of-training baseline, including empirical error CDFs on
//! a shared grid. All error math expects world units (metres), i.e.
//! denormalized predictions.

mod metrics;
mod report;

pub use metrics::{
    baseline_predictor, error_cdf, error_cdf_with_max, euclid_series, identify_outliers,
    mae_per_joint, per_axis_error, BaselinePredictor, Cdf, PerAxisError,
};
pub use report::{evaluate, write_csv_tables, EvalReport};

use thiserror::Error;

/// 25 joints x 3 axes, flattened joint-major (x depth, y azimuth,
/// z elevation).
pub type JointVector = [f64; 75];

#[derive(Debug, Error)]
pub enum EvalError {
    #[error("prediction and truth frame counts differ: {preds} vs {truths}")]
    LengthMismatch { preds: usize, truths: usize },

    #[error("empty input: {0}")]
    Empty(&'static str),

    #[error("invalid argument: {0}")]
    InvalidArg(&'static str),
}
