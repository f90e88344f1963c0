//! Scene normalization parameters and their sidecar text format.

use std::fmt::Write as _;

use scene_sim::SceneBounds;
use thiserror::Error;

use crate::EncodeError;

/// Inclusive value range of one normalized axis.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AxisRange {
    pub min: f64,
    pub max: f64,
}

impl AxisRange {
    pub fn new(min: f64, max: f64) -> Self {
        Self { min, max }
    }

    /// Affine map onto [0, 1], clamped; the flag reports clamping.
    pub fn normalize(&self, v: f64) -> (f64, bool) {
        let t = (v - self.min) / (self.max - self.min);
        if t < 0.0 {
            (0.0, true)
        } else if t > 1.0 {
            (1.0, true)
        } else {
            (t, false)
        }
    }

    /// Inverse affine map back to world units.
    pub fn denormalize(&self, t: f64) -> f64 {
        self.min + t * (self.max - self.min)
    }
}

/// Per-axis normalization bounds for depth, azimuth, elevation and
/// intensity.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NormalizationParams {
    pub depth: AxisRange,
    pub azimuth: AxisRange,
    pub elevation: AxisRange,
    pub intensity: AxisRange,
}

/// Errors from parsing the sidecar document.
#[derive(Debug, Error, PartialEq)]
pub enum NormParseError {
    #[error("line {line}: expected `axis = min,max`")]
    BadLine { line: usize },

    #[error("line {line}: unknown axis `{name}`")]
    UnknownAxis { line: usize, name: String },

    #[error("line {line}: axis `{name}` given twice")]
    DuplicateAxis { line: usize, name: String },

    #[error("line {line}: bad number")]
    BadNumber { line: usize },

    #[error("axis `{name}` missing")]
    MissingAxis { name: &'static str },

    #[error("axis `{name}`: max must exceed min")]
    EmptyRange { name: String },
}

const AXES: [&str; 4] = ["depth", "azimuth", "elevation", "intensity"];

impl NormalizationParams {
    pub fn validate(&self) -> Result<(), EncodeError> {
        for (axis, r) in [
            ("depth", self.depth),
            ("azimuth", self.azimuth),
            ("elevation", self.elevation),
            ("intensity", self.intensity),
        ] {
            if !(r.max > r.min) {
                return Err(EncodeError::DegenerateAxis { axis });
            }
        }
        Ok(())
    }

    /// Render the sidecar document. `f64` formatting round-trips exactly.
    pub fn to_sidecar_string(&self) -> String {
        let mut s = String::new();
        let _ = writeln!(s, "# scene normalization bounds: axis = min,max");
        for (name, r) in [
            ("depth", self.depth),
            ("azimuth", self.azimuth),
            ("elevation", self.elevation),
            ("intensity", self.intensity),
        ] {
            let _ = writeln!(s, "{} = {},{}", name, r.min, r.max);
        }
        s
    }

    /// Parse the sidecar document written by [`Self::to_sidecar_string`].
    pub fn from_sidecar_str(text: &str) -> Result<Self, NormParseError> {
        let mut found: [Option<AxisRange>; 4] = [None; 4];
        for (i, raw) in text.lines().enumerate() {
            let line = i + 1;
            let trimmed = raw.trim();
            if trimmed.is_empty() || trimmed.starts_with('#') {
                continue;
            }
            let (name, rest) = trimmed
                .split_once('=')
                .ok_or(NormParseError::BadLine { line })?;
            let name = name.trim();
            let slot = AXES
                .iter()
                .position(|a| *a == name)
                .ok_or_else(|| NormParseError::UnknownAxis {
                    line,
                    name: name.to_string(),
                })?;
            if found[slot].is_some() {
                return Err(NormParseError::DuplicateAxis {
                    line,
                    name: name.to_string(),
                });
            }
            let (lo, hi) = rest
                .split_once(',')
                .ok_or(NormParseError::BadLine { line })?;
            let min: f64 = lo
                .trim()
                .parse()
                .map_err(|_| NormParseError::BadNumber { line })?;
            let max: f64 = hi
                .trim()
                .parse()
                .map_err(|_| NormParseError::BadNumber { line })?;
            if !min.is_finite() || !max.is_finite() {
                return Err(NormParseError::BadNumber { line });
            }
            if !(max > min) {
                return Err(NormParseError::EmptyRange {
                    name: name.to_string(),
                });
            }
            found[slot] = Some(AxisRange::new(min, max));
        }
        let get = |i: usize| found[i].ok_or(NormParseError::MissingAxis { name: AXES[i] });
        Ok(Self {
            depth: get(0)?,
            azimuth: get(1)?,
            elevation: get(2)?,
            intensity: get(3)?,
        })
    }
}

/// Identity mapping of the scene box corners (plus an intensity range)
/// onto the unit interval.
pub fn compute_norm(
    bounds: &SceneBounds,
    intensity: (f64, f64),
) -> Result<NormalizationParams, EncodeError> {
    let params = NormalizationParams {
        depth: AxisRange::new(bounds.x[0], bounds.x[1]),
        azimuth: AxisRange::new(bounds.y[0], bounds.y[1]),
        elevation: AxisRange::new(bounds.z[0], bounds.z[1]),
        intensity: AxisRange::new(intensity.0, intensity.1),
    };
    params.validate()?;
    Ok(params)
}

/// Intensity span matching the simulator's RCS table over desk ranges.
pub const DEFAULT_INTENSITY_RANGE: (f64, f64) = (0.0, 0.03);

impl Default for NormalizationParams {
    /// Desk-scale defaults: the [`SceneBounds::desk`] box and
    /// [`DEFAULT_INTENSITY_RANGE`].
    fn default() -> Self {
        compute_norm(&SceneBounds::desk(), DEFAULT_INTENSITY_RANGE).expect("desk box is valid")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn affine_map_reference_points() {
        let norm = compute_norm(&SceneBounds::desk(), (0.0, 1.0)).unwrap();
        // depth in [0,5]: 2.5 -> 0.5, endpoints to 0 and 1.
        assert_eq!(norm.depth.normalize(2.5), (0.5, false));
        assert_eq!(norm.depth.normalize(0.0), (0.0, false));
        assert_eq!(norm.depth.normalize(5.0), (1.0, false));
        // azimuth in [-2.5,2.5]; the reference case uses [-2,2]: -1 -> 0.25.
        let az = AxisRange::new(-2.0, 2.0);
        assert_eq!(az.normalize(-1.0), (0.25, false));
    }

    #[test]
    fn clamping_is_flagged() {
        let r = AxisRange::new(0.0, 1.0);
        assert_eq!(r.normalize(-0.5), (0.0, true));
        assert_eq!(r.normalize(1.5), (1.0, true));
    }

    #[test]
    fn degenerate_box_is_rejected() {
        let mut b = SceneBounds::desk();
        b.x = [1.0, 1.0];
        assert!(compute_norm(&b, (0.0, 1.0)).is_err());
        assert!(compute_norm(&SceneBounds::desk(), (1.0, 1.0)).is_err());
    }

    #[test]
    fn sidecar_round_trips_exactly() {
        let norm = NormalizationParams {
            depth: AxisRange::new(0.125, 5.5),
            azimuth: AxisRange::new(-2.25, 2.75),
            elevation: AxisRange::new(0.0, 2.5),
            intensity: AxisRange::new(1e-4, 0.0315),
        };
        let text = norm.to_sidecar_string();
        let back = NormalizationParams::from_sidecar_str(&text).unwrap();
        assert_eq!(norm, back);
    }

    #[test]
    fn sidecar_parse_errors_name_the_defect() {
        assert_eq!(
            NormalizationParams::from_sidecar_str("depth 0,1"),
            Err(NormParseError::BadLine { line: 1 })
        );
        assert_eq!(
            NormalizationParams::from_sidecar_str("warp = 0,1"),
            Err(NormParseError::UnknownAxis {
                line: 1,
                name: "warp".into()
            })
        );
        assert_eq!(
            NormalizationParams::from_sidecar_str("depth = a,b"),
            Err(NormParseError::BadNumber { line: 1 })
        );
        assert_eq!(
            NormalizationParams::from_sidecar_str("depth = 0,5"),
            Err(NormParseError::MissingAxis { name: "azimuth" })
        );
        assert_eq!(
            NormalizationParams::from_sidecar_str("depth = 5,0"),
            Err(NormParseError::EmptyRange {
                name: "depth".into()
            })
        );
        let dup = "depth = 0,5\ndepth = 0,6";
        assert!(matches!(
            NormalizationParams::from_sidecar_str(dup),
            Err(NormParseError::DuplicateAxis { line: 2, .. })
        ));
    }
}
