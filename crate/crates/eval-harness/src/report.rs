//! Assembled evaluation report with JSON and CSV emission.

use std::fs;
use std::io::Write;
use std::path::Path;

use scene_sim::{JointId, ALL_JOINTS, JOINT_COUNT};
use serde::Serialize;

use crate::metrics::{
    baseline_predictor, error_cdf_with_max, euclid_series, identify_outliers, mae_per_joint,
    per_axis_error, Cdf, PerAxisError,
};
use crate::{EvalError, JointVector};

/// Model-vs-baseline pairing used throughout the report.
#[derive(Debug, Clone, Serialize)]
pub struct Paired<T> {
    pub model: T,
    pub baseline: T,
}

/// Per-joint MAE row.
#[derive(Debug, Clone, Serialize)]
pub struct JointMae {
    pub joint: &'static str,
    pub model_m: f64,
    pub baseline_m: f64,
    pub outlier: bool,
}

/// Full evaluation against the paper protocol: per-joint MAE, top-k
/// outlier exclusion, per-axis errors, per-frame Euclidean error and
/// error CDFs, each with its mean-of-training baseline counterpart.
#[derive(Debug, Clone, Serialize)]
pub struct EvalReport {
    pub frames: usize,
    pub outlier_k: usize,
    pub outliers: Vec<&'static str>,
    pub retained: Vec<&'static str>,
    pub per_joint_mae: Vec<JointMae>,
    pub per_axis: Paired<PerAxisError>,
    /// Mean 3-D Euclidean error over retained joints and frames (m).
    pub mean_euclid_m: Paired<f64>,
    pub per_frame_mean_euclid_m: Paired<Vec<f64>>,
    pub cdf: Paired<Cdf>,
    #[serde(skip)]
    retained_ids: Vec<JointId>,
}

impl EvalReport {
    pub fn retained_ids(&self) -> &[JointId] {
        &self.retained_ids
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }

    /// Model CDF >= baseline CDF at every abscissa of the shared grid.
    pub fn model_dominates_baseline(&self) -> bool {
        self.cdf
            .model
            .probabilities
            .iter()
            .zip(&self.cdf.baseline.probabilities)
            .all(|(m, b)| m >= b)
    }
}

fn mean(series: &[Vec<f64>]) -> f64 {
    let total: f64 = series.iter().flatten().sum();
    let count: usize = series.iter().map(Vec::len).sum();
    total / count.max(1) as f64
}

/// Run the full protocol.
///
/// All series are world-unit (denormalized) 75-vectors; `train_truths`
/// feeds the mean baseline; `outlier_k` joints with the highest model MAE
/// are excluded from the retained-skeleton statistics.
pub fn evaluate(
    preds: &[JointVector],
    truths: &[JointVector],
    train_truths: &[JointVector],
    outlier_k: usize,
) -> Result<EvalReport, EvalError> {
    let baseline = baseline_predictor(train_truths)?;
    let base_preds = baseline.predict_series(truths.len());

    let model_mae = mae_per_joint(preds, truths)?;
    let base_mae = mae_per_joint(&base_preds, truths)?;
    let outliers = identify_outliers(&model_mae, outlier_k)?;
    let retained_ids: Vec<JointId> = ALL_JOINTS
        .into_iter()
        .filter(|j| !outliers.contains(j))
        .collect();
    debug_assert_eq!(retained_ids.len() + outliers.len(), JOINT_COUNT);

    let per_axis = Paired {
        model: per_axis_error(preds, truths, &retained_ids)?,
        baseline: per_axis_error(&base_preds, truths, &retained_ids)?,
    };

    let model_euclid = euclid_series(preds, truths, &retained_ids)?;
    let base_euclid = euclid_series(&base_preds, truths, &retained_ids)?;
    let flat_model: Vec<f64> = model_euclid.iter().flatten().copied().collect();
    let flat_base: Vec<f64> = base_euclid.iter().flatten().copied().collect();
    let grid_max = flat_model
        .iter()
        .chain(&flat_base)
        .cloned()
        .fold(0.0f64, f64::max);
    let cdf = Paired {
        model: error_cdf_with_max(&flat_model, grid_max)?,
        baseline: error_cdf_with_max(&flat_base, grid_max)?,
    };

    let per_frame = Paired {
        model: model_euclid
            .iter()
            .map(|f| f.iter().sum::<f64>() / f.len().max(1) as f64)
            .collect::<Vec<f64>>(),
        baseline: base_euclid
            .iter()
            .map(|f| f.iter().sum::<f64>() / f.len().max(1) as f64)
            .collect::<Vec<f64>>(),
    };

    Ok(EvalReport {
        frames: truths.len(),
        outlier_k,
        outliers: outliers.iter().map(|j| j.name()).collect(),
        retained: retained_ids.iter().map(|j| j.name()).collect(),
        per_joint_mae: ALL_JOINTS
            .into_iter()
            .map(|j| JointMae {
                joint: j.name(),
                model_m: model_mae[j.index()],
                baseline_m: base_mae[j.index()],
                outlier: outliers.contains(&j),
            })
            .collect(),
        per_axis,
        mean_euclid_m: Paired {
            model: mean(&model_euclid),
            baseline: mean(&base_euclid),
        },
        per_frame_mean_euclid_m: per_frame,
        cdf,
        retained_ids,
    })
}

/// Write the three plot-ready tables: `per_joint_mae.csv`,
/// `per_frame_errors.csv` and `cdf.csv`.
pub fn write_csv_tables(report: &EvalReport, dir: &Path) -> std::io::Result<()> {
    fs::create_dir_all(dir)?;

    let mut f = fs::File::create(dir.join("per_joint_mae.csv"))?;
    writeln!(f, "joint,model_mae_m,baseline_mae_m,outlier")?;
    for row in &report.per_joint_mae {
        writeln!(
            f,
            "{},{},{},{}",
            row.joint, row.model_m, row.baseline_m, row.outlier
        )?;
    }

    let mut f = fs::File::create(dir.join("per_frame_errors.csv"))?;
    writeln!(f, "frame,model_mean_euclid_m,baseline_mean_euclid_m")?;
    for (i, (m, b)) in report
        .per_frame_mean_euclid_m
        .model
        .iter()
        .zip(&report.per_frame_mean_euclid_m.baseline)
        .enumerate()
    {
        writeln!(f, "{i},{m},{b}")?;
    }

    let mut f = fs::File::create(dir.join("cdf.csv"))?;
    writeln!(f, "abscissa_m,model_p,baseline_p")?;
    for ((x, m), b) in report
        .cdf
        .model
        .abscissae
        .iter()
        .zip(&report.cdf.model.probabilities)
        .zip(&report.cdf.baseline.probabilities)
    {
        writeln!(f, "{x},{m},{b}")?;
    }
    Ok(())
}
