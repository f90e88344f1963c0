//! Seeded kinematic motion generator for the four motion classes.
//!
//! A fixed bone-length skeleton is posed per frame: walking translates the
//! root at constant speed (bouncing between configurable depth limits) with
//! counter-phase sinusoidal arm and leg swing; the arm-swing classes keep
//! the subject in place and oscillate only the named arm(s) rigidly about
//! the shoulder. Rigid rotations keep every bone length exact.

use std::f64::consts::PI;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::joints::{rest_pose, JointId, JOINT_COUNT};
use crate::types::{SimError, SkeletonFrame};

/// Timestamp of frame zero (microseconds since the Unix epoch).
pub const BASE_TIMESTAMP_US: i64 = 1_700_000_000_000_000;

/// The four recorded motion classes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum MotionClass {
    Walking,
    LeftArmSwing,
    RightArmSwing,
    BothArmsSwing,
}

impl MotionClass {
    pub const ALL: [MotionClass; 4] = [
        MotionClass::Walking,
        MotionClass::LeftArmSwing,
        MotionClass::RightArmSwing,
        MotionClass::BothArmsSwing,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            MotionClass::Walking => "walking",
            MotionClass::LeftArmSwing => "left_arm_swing",
            MotionClass::RightArmSwing => "right_arm_swing",
            MotionClass::BothArmsSwing => "both_arms_swing",
        }
    }

    pub fn parse(s: &str) -> Option<MotionClass> {
        match s {
            "walking" => Some(MotionClass::Walking),
            "left_arm_swing" => Some(MotionClass::LeftArmSwing),
            "right_arm_swing" => Some(MotionClass::RightArmSwing),
            "both_arms_swing" => Some(MotionClass::BothArmsSwing),
            _ => None,
        }
    }
}

use JointId::*;

const LEFT_ARM: [JointId; 5] = [ElbowL, WristL, HandL, HandTipL, ThumbL];
const RIGHT_ARM: [JointId; 5] = [ElbowR, WristR, HandR, HandTipR, ThumbR];
const LEFT_LEG: [JointId; 3] = [KneeL, AnkleL, FootL];
const RIGHT_LEG: [JointId; 3] = [KneeR, AnkleR, FootR];

/// Depth band the walking subject moves through.
const WALK_X_MIN: f64 = 1.2;
const WALK_X_MAX: f64 = 4.4;
/// Root height above the floor.
const ROOT_Z: f64 = 1.0;
/// Approximate stride length used to derive the swing cadence.
const STRIDE_M: f64 = 0.7;

struct MotionParams {
    start_x: f64,
    start_y: f64,
    speed: f64,
    swing_amp: f64,
    swing_hz: f64,
    phase: f64,
}

fn draw_params(class: MotionClass, seed: u64) -> MotionParams {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    match class {
        MotionClass::Walking => MotionParams {
            start_x: rng.random_range(1.6..2.4),
            start_y: rng.random_range(-0.3..0.3),
            speed: rng.random_range(0.5..0.9),
            swing_amp: rng.random_range(0.25..0.4),
            swing_hz: 0.0, // derived from speed
            phase: rng.random_range(0.0..2.0 * PI),
        },
        _ => MotionParams {
            start_x: rng.random_range(2.0..3.5),
            start_y: rng.random_range(-0.5..0.5),
            speed: 0.0,
            swing_amp: rng.random_range(0.5..0.9),
            swing_hz: rng.random_range(0.4..0.7),
            phase: rng.random_range(0.0..2.0 * PI),
        },
    }
}

/// Rotate `v` about the y axis by `angle`; the arms and legs hang along -z
/// in the rest pose, so this pitches them forward and back.
fn rotate_y(v: [f64; 3], angle: f64) -> [f64; 3] {
    let (s, c) = angle.sin_cos();
    [v[0] * c + v[2] * s, v[1], -v[0] * s + v[2] * c]
}

fn apply_chain(
    joints: &mut [[f64; 3]; JOINT_COUNT],
    rest: &[[f64; 3]; JOINT_COUNT],
    pivot: JointId,
    chain: &[JointId],
    angle: f64,
) {
    let origin = rest[pivot.index()];
    for &j in chain {
        let rel = [
            rest[j.index()][0] - origin[0],
            rest[j.index()][1] - origin[1],
            rest[j.index()][2] - origin[2],
        ];
        let rot = rotate_y(rel, angle);
        joints[j.index()] = [origin[0] + rot[0], origin[1] + rot[1], origin[2] + rot[2]];
    }
}

/// Fold an unbounded path coordinate into [lo, hi] by reflecting at the
/// ends (triangle wave).
fn fold(p: f64, lo: f64, hi: f64) -> f64 {
    let span = hi - lo;
    let m = (p - lo).rem_euclid(2.0 * span);
    if m <= span {
        lo + m
    } else {
        lo + 2.0 * span - m
    }
}

/// Generate a seeded skeleton track.
///
/// Frame count is `round(duration * fps)`; timestamps start at
/// [`BASE_TIMESTAMP_US`] and advance by `1e6 / fps` microseconds.
pub fn generate_motion(
    class: MotionClass,
    duration_s: f64,
    fps: f64,
    seed: u64,
) -> Result<Vec<SkeletonFrame>, SimError> {
    if !(duration_s > 0.0) {
        return Err(SimError::InvalidArg {
            name: "duration_s",
            reason: "must be positive",
        });
    }
    if !(fps > 0.0) {
        return Err(SimError::InvalidArg {
            name: "fps",
            reason: "must be positive",
        });
    }

    let params = draw_params(class, seed);
    let rest = rest_pose();
    let n_frames = (duration_s * fps).round() as usize;
    let mut frames = Vec::with_capacity(n_frames);

    for i in 0..n_frames {
        let t = i as f64 / fps;
        let mut joints = *rest;

        match class {
            MotionClass::Walking => {
                let cadence = params.speed / STRIDE_M;
                let osc = 2.0 * PI * cadence * t + params.phase;
                // Left arm swings with the right leg and vice versa.
                apply_chain(&mut joints, rest, ShoulderL, &LEFT_ARM, params.swing_amp * osc.sin());
                apply_chain(&mut joints, rest, ShoulderR, &RIGHT_ARM, -params.swing_amp * osc.sin());
                let leg_amp = 0.8 * params.swing_amp;
                apply_chain(&mut joints, rest, HipL, &LEFT_LEG, -leg_amp * osc.sin());
                apply_chain(&mut joints, rest, HipR, &RIGHT_LEG, leg_amp * osc.sin());
            }
            MotionClass::LeftArmSwing => {
                let a = params.swing_amp * (2.0 * PI * params.swing_hz * t + params.phase).sin();
                apply_chain(&mut joints, rest, ShoulderL, &LEFT_ARM, a);
            }
            MotionClass::RightArmSwing => {
                let a = params.swing_amp * (2.0 * PI * params.swing_hz * t + params.phase).sin();
                apply_chain(&mut joints, rest, ShoulderR, &RIGHT_ARM, a);
            }
            MotionClass::BothArmsSwing => {
                let a = params.swing_amp * (2.0 * PI * params.swing_hz * t + params.phase).sin();
                apply_chain(&mut joints, rest, ShoulderL, &LEFT_ARM, a);
                apply_chain(&mut joints, rest, ShoulderR, &RIGHT_ARM, -a);
            }
        }

        let root_x = if class == MotionClass::Walking {
            fold(params.start_x + params.speed * t, WALK_X_MIN, WALK_X_MAX)
        } else {
            params.start_x
        };
        for j in joints.iter_mut() {
            j[0] += root_x;
            j[1] += params.start_y;
            j[2] += ROOT_Z;
        }

        frames.push(SkeletonFrame {
            timestamp_us: BASE_TIMESTAMP_US + ((i as f64) * 1e6 / fps).round() as i64,
            joints,
        });
    }
    Ok(frames)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::joints::{bones, ALL_JOINTS};

    #[test]
    fn walking_one_second_is_20_frames_with_increasing_root() {
        let frames = generate_motion(MotionClass::Walking, 1.0, 20.0, 7).unwrap();
        assert_eq!(frames.len(), 20);
        for w in frames.windows(2) {
            assert!(
                w[1].joint(JointId::SpineBase)[0] > w[0].joint(JointId::SpineBase)[0],
                "root depth must increase"
            );
        }
    }

    #[test]
    fn left_arm_swing_keeps_right_arm_stationary() {
        let frames = generate_motion(MotionClass::LeftArmSwing, 3.0, 20.0, 11).unwrap();
        let first = &frames[0];
        for f in &frames {
            for j in [ElbowR, WristR, HandR, HandTipR, ThumbR, ShoulderR] {
                assert_eq!(f.joint(j), first.joint(j), "right arm must not move");
            }
        }
        // The left wrist does move.
        assert!(frames
            .iter()
            .any(|f| f.joint(WristL) != first.joint(WristL)));
    }

    #[test]
    fn same_seed_is_bit_identical() {
        let a = generate_motion(MotionClass::BothArmsSwing, 2.0, 20.0, 99).unwrap();
        let b = generate_motion(MotionClass::BothArmsSwing, 2.0, 20.0, 99).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn bone_lengths_stay_constant_across_every_class() {
        for class in MotionClass::ALL {
            let frames = generate_motion(class, 4.0, 20.0, 5).unwrap();
            let reference: Vec<f64> = bones()
                .iter()
                .map(|&(p, c)| dist(frames[0].joint(p), frames[0].joint(c)))
                .collect();
            for f in &frames {
                for (&(p, c), &want) in bones().iter().zip(&reference) {
                    let got = dist(f.joint(p), f.joint(c));
                    assert!(
                        (got - want).abs() < 1e-6,
                        "{class:?}: bone {p:?}->{c:?} drifted from {want} to {got}"
                    );
                }
            }
        }
    }

    #[test]
    fn frames_stay_inside_the_desk_bounds() {
        let bounds = crate::types::SceneBounds::desk();
        for class in MotionClass::ALL {
            for seed in 0..5 {
                let frames = generate_motion(class, 30.0, 20.0, seed).unwrap();
                for f in &frames {
                    for j in ALL_JOINTS {
                        assert!(bounds.contains(f.joint(j)), "{class:?} seed {seed}");
                    }
                }
            }
        }
    }

    #[test]
    fn bad_arguments_are_rejected() {
        assert!(generate_motion(MotionClass::Walking, 0.0, 20.0, 0).is_err());
        assert!(generate_motion(MotionClass::Walking, 1.0, 0.0, 0).is_err());
    }

    fn dist(a: [f64; 3], b: [f64; 3]) -> f64 {
        ((a[0] - b[0]).powi(2) + (a[1] - b[1]).powi(2) + (a[2] - b[2]).powi(2)).sqrt()
    }
}
