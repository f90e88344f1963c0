//! Error metrics over prediction/truth series.

use scene_sim::{JointId, JOINT_COUNT};

use crate::{EvalError, JointVector};

fn check_series(preds: &[JointVector], truths: &[JointVector]) -> Result<(), EvalError> {
    if preds.len() != truths.len() {
        return Err(EvalError::LengthMismatch {
            preds: preds.len(),
            truths: truths.len(),
        });
    }
    if preds.is_empty() {
        return Err(EvalError::Empty("prediction series"));
    }
    Ok(())
}

/// Per-joint mean absolute error (m), averaged over frames and the three
/// axes.
pub fn mae_per_joint(
    preds: &[JointVector],
    truths: &[JointVector],
) -> Result<[f64; JOINT_COUNT], EvalError> {
    check_series(preds, truths)?;
    let mut mae = [0.0; JOINT_COUNT];
    for (p, t) in preds.iter().zip(truths) {
        for j in 0..JOINT_COUNT {
            for a in 0..3 {
                mae[j] += (p[3 * j + a] - t[3 * j + a]).abs();
            }
        }
    }
    let scale = 1.0 / (3.0 * preds.len() as f64);
    for v in mae.iter_mut() {
        *v *= scale;
    }
    Ok(mae)
}

/// The `k` joints with the highest MAE; ties resolve to the lower joint
/// index. The result is sorted by joint index.
pub fn identify_outliers(
    mae: &[f64; JOINT_COUNT],
    k: usize,
) -> Result<Vec<JointId>, EvalError> {
    if k >= JOINT_COUNT {
        return Err(EvalError::InvalidArg("outlier count must be below 25"));
    }
    let mut order: Vec<usize> = (0..JOINT_COUNT).collect();
    order.sort_by(|&a, &b| mae[b].total_cmp(&mae[a]).then(a.cmp(&b)));
    let mut outliers: Vec<JointId> = order[..k]
        .iter()
        .map(|&i| JointId::from_index(i).expect("index below 25"))
        .collect();
    outliers.sort();
    Ok(outliers)
}

/// Mean absolute localization error per axis over the retained joints.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize)]
pub struct PerAxisError {
    pub depth_m: f64,
    pub azimuth_m: f64,
    pub elevation_m: f64,
}

pub fn per_axis_error(
    preds: &[JointVector],
    truths: &[JointVector],
    retained: &[JointId],
) -> Result<PerAxisError, EvalError> {
    check_series(preds, truths)?;
    if retained.is_empty() {
        return Err(EvalError::Empty("retained joint set"));
    }
    let mut sums = [0.0f64; 3];
    for (p, t) in preds.iter().zip(truths) {
        for &j in retained {
            let j = j.index();
            for a in 0..3 {
                sums[a] += (p[3 * j + a] - t[3 * j + a]).abs();
            }
        }
    }
    let n = (preds.len() * retained.len()) as f64;
    Ok(PerAxisError {
        depth_m: sums[0] / n,
        azimuth_m: sums[1] / n,
        elevation_m: sums[2] / n,
    })
}

/// Constant predictor: the per-coordinate mean of the training truths.
#[derive(Debug, Clone)]
pub struct BaselinePredictor {
    mean: JointVector,
}

impl BaselinePredictor {
    pub fn predict(&self) -> JointVector {
        self.mean
    }

    /// The same constant answer for every query frame.
    pub fn predict_series(&self, frames: usize) -> Vec<JointVector> {
        vec![self.mean; frames]
    }
}

pub fn baseline_predictor(train_truths: &[JointVector]) -> Result<BaselinePredictor, EvalError> {
    if train_truths.is_empty() {
        return Err(EvalError::Empty("training truths"));
    }
    let mut mean = [0.0; 75];
    for t in train_truths {
        for (m, v) in mean.iter_mut().zip(t) {
            *m += v;
        }
    }
    for m in mean.iter_mut() {
        *m /= train_truths.len() as f64;
    }
    Ok(BaselinePredictor { mean })
}

/// Per-frame, per-retained-joint 3-D Euclidean distances (m).
pub fn euclid_series(
    preds: &[JointVector],
    truths: &[JointVector],
    retained: &[JointId],
) -> Result<Vec<Vec<f64>>, EvalError> {
    check_series(preds, truths)?;
    Ok(preds
        .iter()
        .zip(truths)
        .map(|(p, t)| {
            retained
                .iter()
                .map(|&j| {
                    let j = j.index();
                    let dx = p[3 * j] - t[3 * j];
                    let dy = p[3 * j + 1] - t[3 * j + 1];
                    let dz = p[3 * j + 2] - t[3 * j + 2];
                    (dx * dx + dy * dy + dz * dz).sqrt()
                })
                .collect()
        })
        .collect())
}

/// Empirical CDF sampled on an even grid.
#[derive(Debug, Clone, PartialEq, serde::Serialize)]
pub struct Cdf {
    pub abscissae: Vec<f64>,
    pub probabilities: Vec<f64>,
}

impl Cdf {
    /// Empirical probability P(error <= x).
    pub fn value_at(&self, x: f64) -> f64 {
        // The grid is even; interpolate by counting grid points <= x.
        match self
            .abscissae
            .iter()
            .rposition(|&a| a <= x)
        {
            Some(i) => self.probabilities[i],
            None => 0.0,
        }
    }
}

/// Number of CDF sample points.
pub const CDF_POINTS: usize = 100;

/// Empirical CDF at [`CDF_POINTS`] evenly spaced abscissae from 0 to the
/// maximum error.
pub fn error_cdf(errors: &[f64]) -> Result<Cdf, EvalError> {
    let max = errors.iter().cloned().fold(0.0f64, f64::max);
    error_cdf_with_max(errors, max)
}

/// Same as [`error_cdf`] on a caller-chosen grid end, so two error sets
/// can be compared on a shared grid.
pub fn error_cdf_with_max(errors: &[f64], max_abscissa: f64) -> Result<Cdf, EvalError> {
    if errors.is_empty() {
        return Err(EvalError::Empty("error list"));
    }
    if errors.iter().any(|&e| e < 0.0 || !e.is_finite()) {
        return Err(EvalError::InvalidArg("errors must be finite and non-negative"));
    }
    if !(max_abscissa >= 0.0) {
        return Err(EvalError::InvalidArg("grid end must be non-negative"));
    }
    let mut sorted = errors.to_vec();
    sorted.sort_by(f64::total_cmp);
    let n = sorted.len() as f64;
    let abscissae: Vec<f64> = (0..CDF_POINTS)
        .map(|i| max_abscissa * i as f64 / (CDF_POINTS - 1) as f64)
        .collect();
    let probabilities = abscissae
        .iter()
        .map(|&x| sorted.partition_point(|&e| e <= x) as f64 / n)
        .collect();
    Ok(Cdf {
        abscissae,
        probabilities,
    })
}
