//! Error types for the radar processing chain.

use thiserror::Error;

/// Errors raised by waveform math, synthesis and cube processing.
#[derive(Debug, Error)]
pub enum RadarError {
    /// An argument fell outside its mathematical domain.
    #[error("invalid {name} = {value}: {reason}")]
    Domain {
        name: &'static str,
        value: f64,
        reason: &'static str,
    },

    /// A synthesis scene contained no targets.
    #[error("scene contains no targets")]
    EmptyScene,

    /// A target lies beyond the range that the sampling rate can represent.
    #[error("target {index} at {range_m:.3} m exceeds the unambiguous range {max_m:.3} m")]
    BeyondUnambiguousRange {
        index: usize,
        range_m: f64,
        max_m: f64,
    },

    /// Cube dimensions disagree with the chirp configuration.
    #[error("cube dimensions {got:?} do not match config {want:?} (channels, chirps, samples)")]
    DimensionMismatch {
        got: (usize, usize, usize),
        want: (usize, usize, usize),
    },
}

impl RadarError {
    pub(crate) fn domain(name: &'static str, value: f64, reason: &'static str) -> Self {
        RadarError::Domain {
            name,
            value,
            reason,
        }
    }
}
