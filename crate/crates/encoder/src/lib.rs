//! Low-size high-resolution encoding of radar point clouds.
//!
//! A frame of at most N^2 detections becomes one N x N RGB image: pixel k
//! (row-major) carries the k-th detection in canonical order, its channels
//! holding normalized depth, normalized lateral position and normalized
//! intensity; pixels past the detection count are exactly (0, 0, 0). The
//! image size is constant regardless of point count, unlike a voxel grid
//! whose size is fixed by scene extent over resolution (see
//! [`voxel_dimension`]).
//!
//! Normalization is global per dataset: scene-box corners map to 0 and 1,
//! and the same parameters denormalize network outputs back to world
//! coordinates.

mod image;
mod norm;
mod skeleton;
mod voxel;

pub use image::{decode_image, encode_frame, image_side, EncodeResult, EncodedImage};
pub use norm::{compute_norm, AxisRange, NormParseError, NormalizationParams};
pub use skeleton::{denormalize_skeleton, normalize_skeleton, FLAT_LEN};
pub use voxel::voxel_dimension;

use thiserror::Error;

/// Errors raised by encoding and normalization.
#[derive(Debug, Error)]
pub enum EncodeError {
    #[error("frame holds {got} points but the image capacity is {capacity}")]
    TooManyPoints { got: usize, capacity: usize },

    #[error("degenerate {axis} range: max must exceed min")]
    DegenerateAxis { axis: &'static str },

    #[error("non-positive resolution {value} on axis {axis}")]
    BadResolution { axis: &'static str, value: f64 },

    #[error("image side must be at least 1")]
    ZeroSide,
}
