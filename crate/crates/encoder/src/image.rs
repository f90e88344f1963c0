//! RGB image construction from radar frames.

use radar_dsp::Plane;
use scene_sim::{RadarFrame, RadarModule, ReflectionPoint};

use crate::norm::NormalizationParams;
use crate::EncodeError;

/// Smallest image side whose pixel count holds `max_points` detections.
pub fn image_side(max_points: usize) -> usize {
    (max_points as f64).sqrt().ceil() as usize
}

/// One N x N x 3 encoded frame; channel values lie in [0, 1] and pixels
/// beyond the detection count are exactly (0, 0, 0).
#[derive(Debug, Clone, PartialEq)]
pub struct EncodedImage {
    side: usize,
    plane: Plane,
    pixels: Vec<[f64; 3]>,
}

impl EncodedImage {
    /// All-zero image (no detections).
    pub fn empty(side: usize, plane: Plane) -> Result<Self, EncodeError> {
        if side == 0 {
            return Err(EncodeError::ZeroSide);
        }
        Ok(Self {
            side,
            plane,
            pixels: vec![[0.0; 3]; side * side],
        })
    }

    pub fn side(&self) -> usize {
        self.side
    }

    pub fn plane(&self) -> Plane {
        self.plane
    }

    /// Pixels in row-major order.
    pub fn pixels(&self) -> &[[f64; 3]] {
        &self.pixels
    }

    pub fn pixel(&self, row: usize, col: usize) -> [f64; 3] {
        self.pixels[row * self.side + col]
    }

    /// Total channel-value count (side * side * 3).
    pub fn value_count(&self) -> usize {
        self.pixels.len() * 3
    }

    /// Flat channel values in row-major (row, col, channel) order.
    pub fn flat_values(&self) -> Vec<f64> {
        self.pixels.iter().flatten().copied().collect()
    }

    /// Rebuild an image from flat channel values.
    pub fn from_flat(side: usize, plane: Plane, values: &[f64]) -> Result<Self, EncodeError> {
        if side == 0 {
            return Err(EncodeError::ZeroSide);
        }
        if values.len() != side * side * 3 {
            return Err(EncodeError::TooManyPoints {
                got: values.len(),
                capacity: side * side * 3,
            });
        }
        let pixels = values
            .chunks_exact(3)
            .map(|c| [c[0], c[1], c[2]])
            .collect();
        Ok(Self {
            side,
            plane,
            pixels,
        })
    }
}

/// Canonical detection order: descending intensity, ties broken by
/// ascending depth then lateral, so the image is stable under any
/// permutation of the input point set.
fn canonical_order(points: &[ReflectionPoint]) -> Vec<&ReflectionPoint> {
    let mut refs: Vec<&ReflectionPoint> = points.iter().collect();
    refs.sort_by(|a, b| {
        b.intensity
            .total_cmp(&a.intensity)
            .then(a.depth.total_cmp(&b.depth))
            .then(a.lateral.total_cmp(&b.lateral))
    });
    refs
}

/// Outcome of encoding one frame.
#[derive(Debug, Clone)]
pub struct EncodeResult {
    pub image: EncodedImage,
    /// Channel values clamped into [0, 1]; nonzero means the frame drifted
    /// outside the calibration bounds.
    pub clamped: usize,
}

/// Encode one radar frame as an N x N x 3 image.
///
/// The lateral channel is normalized with the azimuth bounds for R-1
/// frames and the elevation bounds for R-2 frames. Out-of-bounds values
/// are clamped and counted rather than rejected.
pub fn encode_frame(
    frame: &RadarFrame,
    norm: &NormalizationParams,
    side: usize,
) -> Result<EncodeResult, EncodeError> {
    norm.validate()?;
    let mut image = EncodedImage::empty(side, frame.module.plane())?;
    let capacity = side * side;
    if frame.points.len() > capacity {
        return Err(EncodeError::TooManyPoints {
            got: frame.points.len(),
            capacity,
        });
    }
    let lateral_axis = match frame.module {
        RadarModule::R1 => &norm.azimuth,
        RadarModule::R2 => &norm.elevation,
    };

    let mut clamped = 0usize;
    for (k, point) in canonical_order(&frame.points).into_iter().enumerate() {
        let (d, c0) = norm.depth.normalize(point.depth);
        let (l, c1) = lateral_axis.normalize(point.lateral);
        let (i, c2) = norm.intensity.normalize(point.intensity);
        clamped += usize::from(c0) + usize::from(c1) + usize::from(c2);
        image.pixels[k] = [d, l, i];
    }
    Ok(EncodeResult { image, clamped })
}

/// Recover `(depth, lateral, intensity)` triples from an encoded image by
/// inverting the affine maps of all non-zero pixels.
///
/// A detection that would encode exactly to (0, 0, 0) is indistinguishable
/// from an empty pixel and is dropped; in practice the intensity of a real
/// detection is never exactly at the lower bound.
pub fn decode_image(img: &EncodedImage, norm: &NormalizationParams) -> Vec<(f64, f64, f64)> {
    let lateral_axis = match img.plane {
        Plane::XY => &norm.azimuth,
        Plane::XZ => &norm.elevation,
    };
    img.pixels
        .iter()
        .filter(|p| p.iter().any(|&v| v != 0.0))
        .map(|p| {
            (
                norm.depth.denormalize(p[0]),
                lateral_axis.denormalize(p[1]),
                norm.intensity.denormalize(p[2]),
            )
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use scene_sim::RadarModule;

    fn norm() -> NormalizationParams {
        NormalizationParams {
            depth: crate::AxisRange::new(0.0, 5.0),
            azimuth: crate::AxisRange::new(-2.5, 2.5),
            elevation: crate::AxisRange::new(0.0, 2.5),
            intensity: crate::AxisRange::new(0.0, 1.0),
        }
    }

    fn frame(module: RadarModule, points: Vec<ReflectionPoint>) -> RadarFrame {
        RadarFrame {
            timestamp_us: 0,
            module,
            points,
        }
    }

    fn pt(depth: f64, lateral: f64, intensity: f64) -> ReflectionPoint {
        ReflectionPoint {
            depth,
            lateral,
            velocity: 0.0,
            intensity,
        }
    }

    #[test]
    fn empty_frame_is_all_zero() {
        let r = encode_frame(&frame(RadarModule::R1, vec![]), &norm(), 16).unwrap();
        assert!(r.image.pixels().iter().all(|p| *p == [0.0; 3]));
        assert_eq!(r.image.value_count(), 768);
        assert_eq!(r.clamped, 0);
        assert!(decode_image(&r.image, &norm()).is_empty());
    }

    #[test]
    fn single_midpoint_detection_fills_pixel_zero() {
        let f = frame(RadarModule::R1, vec![pt(2.5, 0.0, 1.0)]);
        let r = encode_frame(&f, &norm(), 16).unwrap();
        assert_eq!(r.image.pixel(0, 0), [0.5, 0.5, 1.0]);
        for k in 1..256 {
            assert_eq!(r.image.pixels()[k], [0.0; 3]);
        }
        let decoded = decode_image(&r.image, &norm());
        assert_eq!(decoded.len(), 1);
        let (d, l, i) = decoded[0];
        assert!((d - 2.5).abs() < 1e-12 && l.abs() < 1e-12 && (i - 1.0).abs() < 1e-12);
    }

    #[test]
    fn full_frame_leaves_no_zero_pixel() {
        let points: Vec<ReflectionPoint> = (0..256)
            .map(|i| pt(0.5 + 0.01 * i as f64, -1.0 + 0.005 * i as f64, 0.2 + 0.003 * i as f64))
            .collect();
        let r = encode_frame(&frame(RadarModule::R1, points), &norm(), 16).unwrap();
        assert!(r.image.pixels().iter().all(|p| p.iter().any(|&v| v != 0.0)));
    }

    #[test]
    fn overfull_frame_is_a_structural_error() {
        let points: Vec<ReflectionPoint> = (0..257).map(|i| pt(1.0, 0.0, 0.5 + i as f64 * 1e-4)).collect();
        assert!(matches!(
            encode_frame(&frame(RadarModule::R1, points), &norm(), 16),
            Err(EncodeError::TooManyPoints { got: 257, capacity: 256 })
        ));
    }

    #[test]
    fn out_of_bounds_values_clamp_and_count() {
        let f = frame(RadarModule::R1, vec![pt(6.0, -3.0, 0.5)]);
        let r = encode_frame(&f, &norm(), 16).unwrap();
        assert_eq!(r.clamped, 2);
        assert_eq!(r.image.pixel(0, 0), [1.0, 0.0, 0.5]);
    }

    #[test]
    fn r2_frames_use_elevation_bounds() {
        let f = frame(RadarModule::R2, vec![pt(2.5, 1.25, 1.0)]);
        let r = encode_frame(&f, &norm(), 16).unwrap();
        assert_eq!(r.image.plane(), Plane::XZ);
        assert_eq!(r.image.pixel(0, 0), [0.5, 0.5, 1.0]);
    }

    #[test]
    fn encoding_is_permutation_invariant() {
        let a = vec![pt(1.0, 0.5, 0.9), pt(2.0, -0.5, 0.4), pt(3.0, 1.5, 0.7)];
        let mut b = a.clone();
        b.reverse();
        let ia = encode_frame(&frame(RadarModule::R1, a), &norm(), 16).unwrap();
        let ib = encode_frame(&frame(RadarModule::R1, b), &norm(), 16).unwrap();
        assert_eq!(ia.image, ib.image);
    }

    proptest! {
        // Encode/decode round-trips the point multiset through the image.
        #[test]
        fn encode_decode_round_trip(
            n in 0usize..=256,
            seed in 0u64..1000,
        ) {
            use rand::{Rng, SeedableRng};
            let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
            let points: Vec<ReflectionPoint> = (0..n)
                .map(|_| pt(
                    rng.random_range(0.01..4.99),
                    rng.random_range(-2.49..2.49),
                    rng.random_range(0.01..1.0),
                ))
                .collect();
            let f = frame(RadarModule::R1, points.clone());
            let r = encode_frame(&f, &norm(), 16).unwrap();
            prop_assert_eq!(r.clamped, 0);
            prop_assert!(r.image.pixels().iter().flatten().all(|v| (0.0..=1.0).contains(v)));

            let mut decoded = decode_image(&r.image, &norm());
            prop_assert_eq!(decoded.len(), n);
            let mut want: Vec<(f64, f64, f64)> =
                points.iter().map(|p| (p.depth, p.lateral, p.intensity)).collect();
            let key = |p: &(f64, f64, f64)| (p.0, p.1, p.2);
            decoded.sort_by(|x, y| key(x).partial_cmp(&key(y)).unwrap());
            want.sort_by(|x, y| key(x).partial_cmp(&key(y)).unwrap());
            for (d, w) in decoded.iter().zip(&want) {
                prop_assert!((d.0 - w.0).abs() < 1e-6);
                prop_assert!((d.1 - w.1).abs() < 1e-6);
                prop_assert!((d.2 - w.2).abs() < 1e-6);
            }
        }
    }
}
