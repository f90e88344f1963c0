//! FMCW radar signal model and processing chain.
//!
//! Covers the path from waveform parameters to a Cartesian point cloud:
//!
//! 1. Stretch-processed baseband synthesis for point targets, including
//!    TDM-MIMO virtual-channel phases ([`synthesize_baseband`]).
//! 2. Fast-time / slow-time / channel FFTs with peak extraction
//!    ([`process_cube`]), yielding range, velocity and angle per detection.
//! 3. Scalar waveform relations: beat frequency, range and velocity
//!    resolution, Doppler shift, RCS/amplitude conversion and array
//!    steering phase.
//!
//! All functions are pure; concurrent use is safe.

mod config;
mod process;
mod synth;
mod waveform;

pub mod error;

pub use config::ChirpConfig;
pub use error::RadarError;
pub use process::{
    process_cube, range_spectrum, to_cartesian, Detection, Plane, RangeSpectrum,
    MAX_DETECTIONS_PER_CPI,
};
pub use synth::{synthesize_baseband, NoiseSpec, PointTarget, RadarCube};
pub use waveform::{
    amplitude_from_rcs, beat_frequency, doppler_frequency, range_resolution, rcs_from_amplitude,
    steering_phase, velocity_resolution,
};
