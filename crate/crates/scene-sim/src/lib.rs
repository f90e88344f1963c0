//! Synthetic scene generation for radar-based skeletal tracking.
//!
//! Produces ground-truth 25-joint skeleton tracks for four motion classes
//! and converts each frame into the point clouds two orthogonally mounted
//! radar modules would report: R-1 observes depth-azimuth, R-2
//! depth-elevation. Scatterers sit on joints and along bones, carry
//! per-joint radar cross sections, and reflect with configurable position
//! noise and miss probability.
//!
//! Everything is deterministic given its seed; frames may be generated in
//! parallel by deriving per-frame seeds from a master seed.

mod associate;
mod joints;
mod motion;
mod reflect;
mod types;

pub use associate::{associate, Association};
pub use joints::{JointId, ALL_JOINTS, HAND_REGION_JOINTS, JOINT_COUNT};
pub use motion::{generate_motion, MotionClass, BASE_TIMESTAMP_US};
pub use reflect::{reflect, reflect_full_dsp, ReflectConfig};
pub use types::{
    DatasetRecord, RadarFrame, RadarModule, ReflectionPoint, SceneBounds, SimError, SkeletonFrame,
};
