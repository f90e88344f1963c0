//! Core scene and frame types.

use radar_dsp::{Plane, RadarError};
use thiserror::Error;

use crate::joints::JointId;
use crate::motion::MotionClass;

/// Errors raised by motion generation, reflection and association.
#[derive(Debug, Error)]
pub enum SimError {
    #[error("invalid {name}: {reason}")]
    InvalidArg {
        name: &'static str,
        reason: &'static str,
    },

    #[error("joint {joint} at ({x:.3}, {y:.3}, {z:.3}) lies outside the scene bounds")]
    OutsideBounds {
        joint: &'static str,
        x: f64,
        y: f64,
        z: f64,
    },

    #[error("{stream} stream is not time-ordered at index {index}")]
    UnsortedStream {
        stream: &'static str,
        index: usize,
    },

    #[error("{stream} stream carries a frame tagged with the wrong radar module")]
    WrongModule { stream: &'static str },

    #[error("frames {later_us} us and {earlier_us} us are not strictly ordered")]
    NonPositiveFrameGap { earlier_us: i64, later_us: i64 },

    #[error(transparent)]
    Radar(#[from] RadarError),
}

/// Axis-aligned scene volume; x is depth, y azimuth, z elevation (metres).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SceneBounds {
    pub x: [f64; 2],
    pub y: [f64; 2],
    pub z: [f64; 2],
}

impl SceneBounds {
    /// Desk-scale default: 5 m deep, 5 m wide, 2.5 m tall.
    pub fn desk() -> Self {
        Self {
            x: [0.0, 5.0],
            y: [-2.5, 2.5],
            z: [0.0, 2.5],
        }
    }

    pub fn contains(&self, p: [f64; 3]) -> bool {
        p[0] >= self.x[0]
            && p[0] <= self.x[1]
            && p[1] >= self.y[0]
            && p[1] <= self.y[1]
            && p[2] >= self.z[0]
            && p[2] <= self.z[1]
    }

    pub fn validate(&self) -> Result<(), SimError> {
        for (axis, [lo, hi]) in [self.x, self.y, self.z].iter().enumerate() {
            if !(hi > lo) {
                return Err(SimError::InvalidArg {
                    name: ["x bounds", "y bounds", "z bounds"][axis],
                    reason: "max must exceed min",
                });
            }
        }
        Ok(())
    }
}

/// Ground-truth skeleton at one instant: 25 joints as (x depth, y azimuth,
/// z elevation) in metres.
#[derive(Debug, Clone, PartialEq)]
pub struct SkeletonFrame {
    pub timestamp_us: i64,
    pub joints: [[f64; 3]; 25],
}

impl SkeletonFrame {
    pub fn joint(&self, id: JointId) -> [f64; 3] {
        self.joints[id as usize]
    }
}

/// Which radar module produced a frame.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum RadarModule {
    /// Depth-azimuth module.
    R1,
    /// Depth-elevation module (rotated 90 degrees).
    R2,
}

impl RadarModule {
    pub fn plane(self) -> Plane {
        match self {
            RadarModule::R1 => Plane::XY,
            RadarModule::R2 => Plane::XZ,
        }
    }
}

/// One reflection: position in the module plane, radial velocity and
/// normalized intensity.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ReflectionPoint {
    /// Depth coordinate (m), positive.
    pub depth: f64,
    /// Lateral coordinate (m): azimuth for R1, elevation for R2.
    pub lateral: f64,
    /// Radial velocity (m/s); positive means approaching.
    pub velocity: f64,
    /// Normalized reflected power in (0, 1].
    pub intensity: f64,
}

/// Per-CPI point cloud from one module.
#[derive(Debug, Clone, PartialEq)]
pub struct RadarFrame {
    pub timestamp_us: i64,
    pub module: RadarModule,
    pub points: Vec<ReflectionPoint>,
}

/// One associated training sample: both radar views plus the ground truth.
#[derive(Debug, Clone, PartialEq)]
pub struct DatasetRecord {
    pub radar_xy: RadarFrame,
    pub radar_xz: RadarFrame,
    pub truth: SkeletonFrame,
    pub motion: MotionClass,
}
