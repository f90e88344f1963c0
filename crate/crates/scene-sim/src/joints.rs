//! The 25-joint skeleton: identifiers, topology, rest pose and per-joint
//! radar cross sections.

use std::sync::OnceLock;

/// Kinect-v2 joint set; the enum discriminant is the canonical index used
/// for flattening.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
#[repr(usize)]
pub enum JointId {
    SpineBase = 0,
    SpineMid = 1,
    Neck = 2,
    Head = 3,
    ShoulderL = 4,
    ElbowL = 5,
    WristL = 6,
    HandL = 7,
    ShoulderR = 8,
    ElbowR = 9,
    WristR = 10,
    HandR = 11,
    HipL = 12,
    KneeL = 13,
    AnkleL = 14,
    FootL = 15,
    HipR = 16,
    KneeR = 17,
    AnkleR = 18,
    FootR = 19,
    SpineShoulder = 20,
    HandTipL = 21,
    ThumbL = 22,
    HandTipR = 23,
    ThumbR = 24,
}

pub const JOINT_COUNT: usize = 25;

use JointId::*;

/// All joints in canonical order.
pub const ALL_JOINTS: [JointId; JOINT_COUNT] = [
    SpineBase,
    SpineMid,
    Neck,
    Head,
    ShoulderL,
    ElbowL,
    WristL,
    HandL,
    ShoulderR,
    ElbowR,
    WristR,
    HandR,
    HipL,
    KneeL,
    AnkleL,
    FootL,
    HipR,
    KneeR,
    AnkleR,
    FootR,
    SpineShoulder,
    HandTipL,
    ThumbL,
    HandTipR,
    ThumbR,
];

/// The eight small-RCS hand-region joints (wrists, palms, hand tips and
/// thumbs) that dominate the error tail.
pub const HAND_REGION_JOINTS: [JointId; 8] = [
    WristL, HandL, WristR, HandR, HandTipL, ThumbL, HandTipR, ThumbR,
];

/// Parent of each joint in the kinematic tree; the spine base is the root.
const PARENT: [Option<JointId>; JOINT_COUNT] = [
    None,                // SpineBase
    Some(SpineBase),     // SpineMid
    Some(SpineShoulder), // Neck
    Some(Neck),          // Head
    Some(SpineShoulder), // ShoulderL
    Some(ShoulderL),     // ElbowL
    Some(ElbowL),        // WristL
    Some(WristL),        // HandL
    Some(SpineShoulder), // ShoulderR
    Some(ShoulderR),     // ElbowR
    Some(ElbowR),        // WristR
    Some(WristR),        // HandR
    Some(SpineBase),     // HipL
    Some(HipL),          // KneeL
    Some(KneeL),         // AnkleL
    Some(AnkleL),        // FootL
    Some(SpineBase),     // HipR
    Some(HipR),          // KneeR
    Some(KneeR),         // AnkleR
    Some(AnkleR),        // FootR
    Some(SpineMid),      // SpineShoulder
    Some(HandL),         // HandTipL
    Some(HandL),         // ThumbL
    Some(HandR),         // HandTipR
    Some(HandR),         // ThumbR
];

/// Offset of each joint from its parent in the rest pose (m); x depth,
/// y azimuth (left positive), z elevation. Arms hang down, feet point
/// forward.
const REST_OFFSET: [[f64; 3]; JOINT_COUNT] = [
    [0.0, 0.0, 0.0],      // SpineBase (root)
    [0.0, 0.0, 0.18],     // SpineMid
    [0.0, 0.0, 0.08],     // Neck
    [0.0, 0.0, 0.17],     // Head
    [0.0, 0.19, -0.03],   // ShoulderL
    [0.0, 0.02, -0.28],   // ElbowL
    [0.0, 0.01, -0.26],   // WristL
    [0.0, 0.0, -0.08],    // HandL
    [0.0, -0.19, -0.03],  // ShoulderR
    [0.0, -0.02, -0.28],  // ElbowR
    [0.0, -0.01, -0.26],  // WristR
    [0.0, 0.0, -0.08],    // HandR
    [0.0, 0.09, -0.07],   // HipL
    [0.0, 0.01, -0.43],   // KneeL
    [0.0, 0.0, -0.42],    // AnkleL
    [0.13, 0.0, -0.05],   // FootL
    [0.0, -0.09, -0.07],  // HipR
    [0.0, -0.01, -0.43],  // KneeR
    [0.0, 0.0, -0.42],    // AnkleR
    [0.13, 0.0, -0.05],   // FootR
    [0.0, 0.0, 0.22],     // SpineShoulder
    [0.0, 0.0, -0.09],    // HandTipL
    [0.03, -0.02, -0.03], // ThumbL
    [0.0, 0.0, -0.09],    // HandTipR
    [0.03, 0.02, -0.03],  // ThumbR
];

/// Per-joint radar cross section (dBsm): torso largest, hand digits
/// smallest, so hand-region returns are the weakest.
const RCS_DBSM: [f64; JOINT_COUNT] = [
    -3.0,  // SpineBase
    -3.0,  // SpineMid
    -8.0,  // Neck
    -8.0,  // Head
    -12.0, // ShoulderL
    -15.0, // ElbowL
    -22.0, // WristL
    -22.0, // HandL
    -12.0, // ShoulderR
    -15.0, // ElbowR
    -22.0, // WristR
    -22.0, // HandR
    -3.0,  // HipL
    -12.0, // KneeL
    -15.0, // AnkleL
    -15.0, // FootL
    -3.0,  // HipR
    -12.0, // KneeR
    -15.0, // AnkleR
    -15.0, // FootR
    -3.0,  // SpineShoulder
    -22.0, // HandTipL
    -22.0, // ThumbL
    -22.0, // HandTipR
    -22.0, // ThumbR
];

impl JointId {
    pub fn index(self) -> usize {
        self as usize
    }

    pub fn from_index(i: usize) -> Option<JointId> {
        ALL_JOINTS.get(i).copied()
    }

    pub fn parent(self) -> Option<JointId> {
        PARENT[self.index()]
    }

    pub fn name(self) -> &'static str {
        match self {
            SpineBase => "spine_base",
            SpineMid => "spine_mid",
            Neck => "neck",
            Head => "head",
            ShoulderL => "shoulder_l",
            ElbowL => "elbow_l",
            WristL => "wrist_l",
            HandL => "hand_l",
            ShoulderR => "shoulder_r",
            ElbowR => "elbow_r",
            WristR => "wrist_r",
            HandR => "hand_r",
            HipL => "hip_l",
            KneeL => "knee_l",
            AnkleL => "ankle_l",
            FootL => "foot_l",
            HipR => "hip_r",
            KneeR => "knee_r",
            AnkleR => "ankle_r",
            FootR => "foot_r",
            SpineShoulder => "spine_shoulder",
            HandTipL => "hand_tip_l",
            ThumbL => "thumb_l",
            HandTipR => "hand_tip_r",
            ThumbR => "thumb_r",
        }
    }

    /// Default radar cross section of the joint (dBsm).
    pub fn default_rcs_dbsm(self) -> f64 {
        RCS_DBSM[self.index()]
    }
}

/// Default per-joint RCS table in canonical joint order.
pub(crate) fn default_rcs_table() -> [f64; JOINT_COUNT] {
    RCS_DBSM
}

/// Rest-pose joint positions relative to the spine base.
pub(crate) fn rest_pose() -> &'static [[f64; 3]; JOINT_COUNT] {
    static POSE: OnceLock<[[f64; 3]; JOINT_COUNT]> = OnceLock::new();
    POSE.get_or_init(|| {
        let mut pose = [[0.0f64; 3]; JOINT_COUNT];
        let mut done = [false; JOINT_COUNT];
        done[SpineBase.index()] = true;
        // The tree is shallow; a few sweeps settle every joint.
        while done.iter().any(|d| !d) {
            for j in ALL_JOINTS {
                if done[j.index()] {
                    continue;
                }
                if let Some(p) = j.parent() {
                    if done[p.index()] {
                        let off = REST_OFFSET[j.index()];
                        let base = pose[p.index()];
                        pose[j.index()] = [base[0] + off[0], base[1] + off[1], base[2] + off[2]];
                        done[j.index()] = true;
                    }
                }
            }
        }
        pose
    })
}

/// All (parent, child) bone pairs.
pub(crate) fn bones() -> Vec<(JointId, JointId)> {
    ALL_JOINTS
        .iter()
        .filter_map(|&j| j.parent().map(|p| (p, j)))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exactly_25_joints_and_8_hand_region() {
        assert_eq!(ALL_JOINTS.len(), 25);
        assert_eq!(HAND_REGION_JOINTS.len(), 8);
        for (i, j) in ALL_JOINTS.iter().enumerate() {
            assert_eq!(j.index(), i);
        }
    }

    #[test]
    fn hand_region_has_smallest_rcs() {
        for j in ALL_JOINTS {
            let is_hand = HAND_REGION_JOINTS.contains(&j);
            if is_hand {
                assert_eq!(j.default_rcs_dbsm(), -22.0);
            } else {
                assert!(j.default_rcs_dbsm() > -22.0);
            }
        }
    }

    #[test]
    fn rest_pose_is_plausible() {
        let pose = rest_pose();
        // Head above the root, feet below, left/right symmetric in y.
        assert!(pose[Head.index()][2] > 0.6);
        assert!(pose[FootL.index()][2] < -0.9);
        assert_eq!(pose[ShoulderL.index()][1], -pose[ShoulderR.index()][1]);
        assert_eq!(bones().len(), 24);
    }
}
