//! Skeleton-to-point-cloud reflection model.
//!
//! Scatterers sit on every joint and at fixed spacing along every bone.
//! Each carries the RCS of its joint (bone scatterers interpolate their
//! endpoints in dB), reflects with an intensity given by the RCS/amplitude
//! relation at its observed range, suffers isotropic Gaussian position
//! noise, and is dropped independently with a miss probability. The
//! strongest `max_points` survive, sorted by descending intensity.
//!
//! The default path is geometric. [`reflect_full_dsp`] instead routes the
//! scatterers through baseband synthesis and cube processing to validate
//! the shortcut against the full chain on small scenes.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use radar_dsp::{
    amplitude_from_rcs, process_cube, synthesize_baseband, to_cartesian, ChirpConfig, NoiseSpec,
    PointTarget,
};

use crate::joints::{bones, default_rcs_table, ALL_JOINTS, JOINT_COUNT};
use crate::types::{RadarFrame, RadarModule, ReflectionPoint, SceneBounds, SimError, SkeletonFrame};

/// Scatterer and sensor model parameters.
#[derive(Debug, Clone)]
pub struct ReflectConfig {
    pub bounds: SceneBounds,
    /// Isotropic position noise sigma (m).
    pub position_noise_m: f64,
    /// Independent drop probability per scatterer.
    pub miss_probability: f64,
    /// One extra scatterer per this much bone length (m).
    pub bone_scatterer_spacing_m: f64,
    /// Per-joint RCS (dBsm) in canonical joint order.
    pub rcs_dbsm: [f64; JOINT_COUNT],
    /// Point-cloud cap per frame.
    pub max_points: usize,
}

impl Default for ReflectConfig {
    fn default() -> Self {
        Self {
            bounds: SceneBounds::desk(),
            position_noise_m: 0.02,
            miss_probability: 0.05,
            bone_scatterer_spacing_m: 0.15,
            rcs_dbsm: default_rcs_table(),
            max_points: 256,
        }
    }
}

impl ReflectConfig {
    /// Noise-free variant: no position noise, no misses.
    pub fn noiseless() -> Self {
        Self {
            position_noise_m: 0.0,
            miss_probability: 0.0,
            ..Self::default()
        }
    }

    fn validate(&self) -> Result<(), SimError> {
        self.bounds.validate()?;
        if !(self.position_noise_m >= 0.0) {
            return Err(SimError::InvalidArg {
                name: "position_noise_m",
                reason: "must be non-negative",
            });
        }
        if !(0.0..1.0).contains(&self.miss_probability) {
            return Err(SimError::InvalidArg {
                name: "miss_probability",
                reason: "must lie in [0, 1)",
            });
        }
        if !(self.bone_scatterer_spacing_m > 0.0) {
            return Err(SimError::InvalidArg {
                name: "bone_scatterer_spacing_m",
                reason: "must be positive",
            });
        }
        if self.max_points == 0 {
            return Err(SimError::InvalidArg {
                name: "max_points",
                reason: "must be at least 1",
            });
        }
        Ok(())
    }
}

/// Smallest usable depth; a radar cannot resolve a zero-range echo.
const MIN_DEPTH_M: f64 = 1e-3;

struct Scatterer {
    pos: [f64; 3],
    rcs_dbsm: f64,
}

/// Deterministic scatterer layout for one skeleton pose.
fn scatterers(frame: &SkeletonFrame, cfg: &ReflectConfig) -> Vec<Scatterer> {
    let mut out = Vec::with_capacity(64);
    for j in ALL_JOINTS {
        out.push(Scatterer {
            pos: frame.joint(j),
            rcs_dbsm: cfg.rcs_dbsm[j.index()],
        });
    }
    for (p, c) in bones() {
        let a = frame.joint(p);
        let b = frame.joint(c);
        let len = dist(a, b);
        let extra = (len / cfg.bone_scatterer_spacing_m).floor() as usize;
        for k in 1..=extra {
            let f = k as f64 / (extra + 1) as f64;
            out.push(Scatterer {
                pos: lerp(a, b, f),
                rcs_dbsm: cfg.rcs_dbsm[p.index()] * (1.0 - f) + cfg.rcs_dbsm[c.index()] * f,
            });
        }
    }
    out
}

fn dist(a: [f64; 3], b: [f64; 3]) -> f64 {
    ((a[0] - b[0]).powi(2) + (a[1] - b[1]).powi(2) + (a[2] - b[2]).powi(2)).sqrt()
}

fn lerp(a: [f64; 3], b: [f64; 3], f: f64) -> [f64; 3] {
    [
        a[0] + (b[0] - a[0]) * f,
        a[1] + (b[1] - a[1]) * f,
        a[2] + (b[2] - a[2]) * f,
    ]
}

fn lateral(pos: [f64; 3], module: RadarModule) -> f64 {
    match module {
        RadarModule::R1 => pos[1],
        RadarModule::R2 => pos[2],
    }
}

fn planar_range(pos: [f64; 3], module: RadarModule) -> f64 {
    pos[0].hypot(lateral(pos, module))
}

fn check_bounds(frame: &SkeletonFrame, bounds: &SceneBounds) -> Result<(), SimError> {
    for j in ALL_JOINTS {
        let p = frame.joint(j);
        if !bounds.contains(p) {
            return Err(SimError::OutsideBounds {
                joint: j.name(),
                x: p[0],
                y: p[1],
                z: p[2],
            });
        }
    }
    Ok(())
}

fn frame_gap_s(frame: &SkeletonFrame, prev: &SkeletonFrame) -> Result<f64, SimError> {
    if prev.timestamp_us >= frame.timestamp_us {
        return Err(SimError::NonPositiveFrameGap {
            earlier_us: prev.timestamp_us,
            later_us: frame.timestamp_us,
        });
    }
    Ok((frame.timestamp_us - prev.timestamp_us) as f64 * 1e-6)
}

fn module_rng(seed: u64, module: RadarModule) -> ChaCha8Rng {
    let salt = match module {
        RadarModule::R1 => 0x517c_c1b7_2722_0a95u64,
        RadarModule::R2 => 0x9e37_79b9_7f4a_7c15u64,
    };
    ChaCha8Rng::seed_from_u64(seed ^ salt)
}

/// Convert one skeleton frame into the point cloud seen by `module`.
///
/// `prev` supplies the previous pose of the same track so that radial
/// velocities can be derived from frame-to-frame displacement; pass `None`
/// for the first frame (velocities are then zero).
pub fn reflect(
    frame: &SkeletonFrame,
    prev: Option<&SkeletonFrame>,
    module: RadarModule,
    cfg: &ReflectConfig,
    seed: u64,
) -> Result<RadarFrame, SimError> {
    cfg.validate()?;
    check_bounds(frame, &cfg.bounds)?;
    let dt = prev.map(|p| frame_gap_s(frame, p)).transpose()?;

    let current = scatterers(frame, cfg);
    let previous = prev.map(|p| scatterers(p, cfg));

    let mut rng = module_rng(seed, module);
    let mut points = Vec::with_capacity(current.len());
    for (i, s) in current.iter().enumerate() {
        // Fixed draw order keeps the stream stable across configs.
        let miss: f64 = rng.random();
        let n0: f64 = StandardNormal.sample(&mut rng);
        let n1: f64 = StandardNormal.sample(&mut rng);
        let n2: f64 = StandardNormal.sample(&mut rng);
        if miss < cfg.miss_probability {
            continue;
        }
        let noisy = [
            s.pos[0] + cfg.position_noise_m * n0,
            s.pos[1] + cfg.position_noise_m * n1,
            s.pos[2] + cfg.position_noise_m * n2,
        ];
        if noisy[0] <= MIN_DEPTH_M {
            continue;
        }

        let velocity = match (&previous, dt) {
            (Some(prev_s), Some(dt)) => {
                let r_now = planar_range(s.pos, module);
                let r_before = planar_range(prev_s[i].pos, module);
                (r_before - r_now) / dt
            }
            _ => 0.0,
        };

        let observed_range = planar_range(noisy, module);
        let intensity = amplitude_from_rcs(s.rcs_dbsm, observed_range)?.min(1.0);
        points.push(ReflectionPoint {
            depth: noisy[0],
            lateral: lateral(noisy, module),
            velocity,
            intensity,
        });
    }

    sort_by_intensity(&mut points);
    points.truncate(cfg.max_points);
    Ok(RadarFrame {
        timestamp_us: frame.timestamp_us,
        module,
        points,
    })
}

fn sort_by_intensity(points: &mut [ReflectionPoint]) {
    points.sort_unstable_by(|a, b| {
        b.intensity
            .total_cmp(&a.intensity)
            .then(a.depth.total_cmp(&b.depth))
            .then(a.lateral.total_cmp(&b.lateral))
    });
}

/// Full-chain variant of [`reflect`]: scatterers become point targets, a
/// baseband cube is synthesized and processed, and the detections are
/// projected back into the module plane.
pub fn reflect_full_dsp(
    frame: &SkeletonFrame,
    prev: Option<&SkeletonFrame>,
    module: RadarModule,
    chirp: &ChirpConfig,
    cfg: &ReflectConfig,
    threshold: f64,
    noise: &NoiseSpec,
    seed: u64,
) -> Result<RadarFrame, SimError> {
    cfg.validate()?;
    check_bounds(frame, &cfg.bounds)?;
    let dt = prev.map(|p| frame_gap_s(frame, p)).transpose()?;

    let current = scatterers(frame, cfg);
    let previous = prev.map(|p| scatterers(p, cfg));

    let mut rng = module_rng(seed, module);
    let mut targets = Vec::with_capacity(current.len());
    for (i, s) in current.iter().enumerate() {
        let miss: f64 = rng.random();
        let n0: f64 = StandardNormal.sample(&mut rng);
        let n1: f64 = StandardNormal.sample(&mut rng);
        let n2: f64 = StandardNormal.sample(&mut rng);
        if miss < cfg.miss_probability {
            continue;
        }
        let noisy = [
            s.pos[0] + cfg.position_noise_m * n0,
            s.pos[1] + cfg.position_noise_m * n1,
            s.pos[2] + cfg.position_noise_m * n2,
        ];
        if noisy[0] <= MIN_DEPTH_M {
            continue;
        }
        let velocity = match (&previous, dt) {
            (Some(prev_s), Some(dt)) => {
                let r_now = planar_range(s.pos, module);
                let r_before = planar_range(prev_s[i].pos, module);
                (r_before - r_now) / dt
            }
            _ => 0.0,
        };
        targets.push(PointTarget {
            range: planar_range(noisy, module),
            velocity,
            angle: lateral(noisy, module).atan2(noisy[0]),
            rcs_dbsm: s.rcs_dbsm,
        });
    }

    let cube = synthesize_baseband(chirp, &targets, noise)?;
    let detections = process_cube(&cube, chirp, threshold)?;

    let mut points: Vec<ReflectionPoint> = detections
        .iter()
        .map(|d| {
            let (depth, lat) = to_cartesian(d, module.plane());
            ReflectionPoint {
                depth,
                lateral: lat,
                velocity: d.velocity,
                intensity: d.power,
            }
        })
        .collect();
    sort_by_intensity(&mut points);
    points.truncate(cfg.max_points);
    Ok(RadarFrame {
        timestamp_us: frame.timestamp_us,
        module,
        points,
    })
}
