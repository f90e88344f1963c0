//! Size of the rejected voxel-grid representation, kept for comparison
//! against the constant 16 x 16 x 3 image encoding.

use crate::EncodeError;

/// Voxel-grid input dimensions `(X/dx, Y/dy, Z/dz, 3)` for a scene of the
/// given per-axis extents and resolutions, ceiling-rounded.
pub fn voxel_dimension(
    extent_m: [f64; 3],
    resolution_m: [f64; 3],
) -> Result<(u64, u64, u64, u64), EncodeError> {
    const AXES: [&str; 3] = ["x", "y", "z"];
    let mut dims = [0u64; 3];
    for i in 0..3 {
        if !(resolution_m[i] > 0.0) {
            return Err(EncodeError::BadResolution {
                axis: AXES[i],
                value: resolution_m[i],
            });
        }
        // Tolerate the last-ulp overshoot of divisions like 3.0 / 0.3.
        dims[i] = ((extent_m[i] / resolution_m[i]) - 1e-9).ceil().max(1.0) as u64;
    }
    Ok((dims[0], dims[1], dims[2], 3))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn five_metre_scene_at_five_centimetres() {
        assert_eq!(
            voxel_dimension([5.0, 5.0, 5.0], [0.05, 0.05, 0.05]).unwrap(),
            (100, 100, 100, 3)
        );
    }

    #[test]
    fn single_voxel_when_extent_equals_resolution() {
        assert_eq!(
            voxel_dimension([0.1, 0.2, 0.3], [0.1, 0.2, 0.3]).unwrap(),
            (1, 1, 1, 3)
        );
    }

    #[test]
    fn mixed_extents_at_ten_centimetres() {
        assert_eq!(
            voxel_dimension([2.0, 4.0, 5.0], [0.1, 0.1, 0.1]).unwrap(),
            (20, 40, 50, 3)
        );
    }

    #[test]
    fn non_positive_resolution_is_rejected() {
        assert!(voxel_dimension([1.0, 1.0, 1.0], [0.1, 0.0, 0.1]).is_err());
        assert!(voxel_dimension([1.0, 1.0, 1.0], [0.1, -0.1, 0.1]).is_err());
    }

    #[test]
    fn voxel_grid_dwarfs_the_image_encoding() {
        let (x, y, z, c) = voxel_dimension([5.0, 5.0, 5.0], [0.05, 0.05, 0.05]).unwrap();
        let voxel_values = x * y * z * c;
        let image_values = 16 * 16 * 3u64;
        assert_eq!(voxel_values, 3_000_000);
        assert!(voxel_values / image_values > 3900);
    }
}
