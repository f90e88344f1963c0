//! Skeleton flattening and [0, 1] normalization.

use scene_sim::SkeletonFrame;

use crate::norm::NormalizationParams;

/// Flattened skeleton length: 25 joints x 3 coordinates.
pub const FLAT_LEN: usize = 75;

/// Flatten and normalize a skeleton: `[j0.x, j0.y, j0.z, j1.x, ...]` with
/// x against the depth bounds, y azimuth and z elevation. Values outside
/// the bounds clamp to [0, 1].
pub fn normalize_skeleton(s: &SkeletonFrame, norm: &NormalizationParams) -> [f64; FLAT_LEN] {
    let mut out = [0.0; FLAT_LEN];
    for (j, joint) in s.joints.iter().enumerate() {
        out[3 * j] = norm.depth.normalize(joint[0]).0;
        out[3 * j + 1] = norm.azimuth.normalize(joint[1]).0;
        out[3 * j + 2] = norm.elevation.normalize(joint[2]).0;
    }
    out
}

/// Map a normalized 75-vector back to world-space joint positions.
pub fn denormalize_skeleton(v: &[f64; FLAT_LEN], norm: &NormalizationParams) -> [[f64; 3]; 25] {
    let mut joints = [[0.0; 3]; 25];
    for (j, joint) in joints.iter_mut().enumerate() {
        joint[0] = norm.depth.denormalize(v[3 * j]);
        joint[1] = norm.azimuth.denormalize(v[3 * j + 1]);
        joint[2] = norm.elevation.denormalize(v[3 * j + 2]);
    }
    joints
}
