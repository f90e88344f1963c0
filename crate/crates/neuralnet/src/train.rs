//! Minibatch training with checkpoint-on-best-validation.

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::adam::{adam_step, AdamState};
use crate::checkpoint::Checkpoint;
use crate::model::ForkedModel;
pub use crate::model::TrainSample;
use crate::NnError;

/// Optimizer and loop hyperparameters.
#[derive(Debug, Clone, PartialEq)]
pub struct TrainConfig {
    pub learning_rate: f64,
    pub beta1: f64,
    pub beta2: f64,
    pub epsilon: f64,
    pub batch_size: usize,
    pub max_epochs: usize,
    pub seed: u64,
    /// Stop once the validation loss drops below this value.
    pub stop_at_val_loss: Option<f64>,
}

impl Default for TrainConfig {
    fn default() -> Self {
        Self {
            learning_rate: 1e-3,
            beta1: 0.9,
            beta2: 0.999,
            epsilon: 1e-8,
            batch_size: 64,
            max_epochs: 50,
            seed: 0,
            stop_at_val_loss: None,
        }
    }
}

impl TrainConfig {
    pub fn validate(&self) -> Result<(), NnError> {
        if !(self.learning_rate > 0.0) {
            return Err(NnError::Config("learning rate must be positive"));
        }
        if !(0.0 < self.beta1 && self.beta1 < 1.0 && 0.0 < self.beta2 && self.beta2 < 1.0) {
            return Err(NnError::Config("betas must lie in (0, 1)"));
        }
        if !(self.epsilon > 0.0) {
            return Err(NnError::Config("epsilon must be positive"));
        }
        if self.batch_size == 0 || self.max_epochs == 0 {
            return Err(NnError::Config("batch size and epochs must be positive"));
        }
        Ok(())
    }
}

/// Losses recorded after one epoch; the validation loss is dropout-free.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EpochStats {
    pub epoch: usize,
    pub train_loss: f64,
    pub val_loss: f64,
}

fn mix(a: u64, b: u64) -> u64 {
    let mut z = a ^ b.wrapping_mul(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Epoch loop of seed-shuffled minibatches with Adam updates.
///
/// After every epoch the validation loss is evaluated in inference mode; a
/// checkpoint is captured whenever it improves. Returns the checkpoint of
/// the best epoch (not the last) together with the full loss history.
pub fn train(
    model: &mut ForkedModel,
    train_set: &[TrainSample],
    val_set: &[TrainSample],
    cfg: &TrainConfig,
) -> Result<(Checkpoint, Vec<EpochStats>), NnError> {
    cfg.validate()?;
    if train_set.is_empty() || val_set.is_empty() {
        return Err(NnError::EmptyDataset);
    }

    let mut state = AdamState::new(model.config());
    let mut history = Vec::new();
    let mut best: Option<(f64, Checkpoint)> = None;

    let mut order: Vec<usize> = (0..train_set.len()).collect();
    for epoch in 0..cfg.max_epochs {
        let mut rng = ChaCha8Rng::seed_from_u64(mix(cfg.seed, epoch as u64));
        order.shuffle(&mut rng);

        let mut epoch_loss = 0.0;
        for (batch_idx, chunk) in order.chunks(cfg.batch_size).enumerate() {
            let batch: Vec<&TrainSample> = chunk.iter().map(|&i| &train_set[i]).collect();
            let dropout_seed = mix(mix(cfg.seed, epoch as u64), 0x8000_0000 + batch_idx as u64);
            let (loss, grads) = model.backward(&batch, dropout_seed)?;
            adam_step(model.params_mut(), &grads, &mut state, cfg);
            epoch_loss += loss * batch.len() as f64;
        }
        let train_loss = epoch_loss / train_set.len() as f64;
        let val_loss = model.evaluate(val_set, cfg.batch_size)?;
        history.push(EpochStats {
            epoch,
            train_loss,
            val_loss,
        });

        if best.as_ref().is_none_or(|(b, _)| val_loss < *b) {
            let ckpt = Checkpoint::capture(model, Some(&state), epoch as u32, val_loss);
            best = Some((val_loss, ckpt));
        }
        if cfg.stop_at_val_loss.is_some_and(|target| val_loss < target) {
            break;
        }
    }

    let (_, ckpt) = best.expect("at least one epoch ran");
    Ok((ckpt, history))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::adam::sgd_step;
    use crate::model::{ForkedModel, Mode, ModelConfig};
    use encoder::EncodedImage;
    use radar_dsp::Plane;
    use rand::Rng;

    fn image(side: usize, rng: &mut ChaCha8Rng) -> EncodedImage {
        let values: Vec<f64> = (0..side * side * 3).map(|_| rng.random_range(0.0..1.0)).collect();
        EncodedImage::from_flat(side, Plane::XY, &values).unwrap()
    }

    fn dataset(n: usize, seed: u64) -> Vec<TrainSample> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        (0..n)
            .map(|_| {
                let img_xy = image(4, &mut rng);
                let img_xz = image(4, &mut rng);
                // Targets follow the image statistics so a small net can
                // actually represent them.
                let m = img_xy.flat_values().iter().sum::<f64>() / 48.0;
                let target = (0..75)
                    .map(|o| 0.2 + 0.6 * m + 0.001 * o as f64)
                    .collect();
                TrainSample {
                    img_xy,
                    img_xz,
                    target,
                }
            })
            .collect()
    }

    #[test]
    fn tiny_set_overfits_and_best_checkpoint_matches_history() {
        let data = dataset(8, 42);
        // Dropout off: this exercises the loop and checkpoint mechanics,
        // not regularized fitting.
        let mut mcfg = ModelConfig::miniature();
        mcfg.conv_dropout = 0.0;
        mcfg.head_dropout = 0.0;
        let mut model = ForkedModel::new(mcfg, 7).unwrap();
        let cfg = TrainConfig {
            learning_rate: 5e-3,
            batch_size: 8,
            max_epochs: 400,
            seed: 1,
            stop_at_val_loss: Some(1e-3),
            ..TrainConfig::default()
        };
        let (ckpt, history) = train(&mut model, &data, &data, &cfg).unwrap();
        let best_hist = history
            .iter()
            .map(|e| e.val_loss)
            .fold(f64::INFINITY, f64::min);
        assert!(
            best_hist < 1e-3,
            "failed to overfit: best val {best_hist} after {} epochs",
            history.len()
        );
        assert_eq!(ckpt.best_val_loss() as f64, best_hist as f32 as f64);
        let best_epoch = history
            .iter()
            .min_by(|a, b| a.val_loss.total_cmp(&b.val_loss))
            .unwrap()
            .epoch;
        assert_eq!(ckpt.epoch() as usize, best_epoch);
    }

    #[test]
    fn training_is_seed_deterministic() {
        let data = dataset(16, 9);
        let cfg = TrainConfig {
            batch_size: 4,
            max_epochs: 5,
            seed: 3,
            ..TrainConfig::default()
        };
        let mut m1 = ForkedModel::new(ModelConfig::miniature(), 2).unwrap();
        let (_, h1) = train(&mut m1, &data, &data, &cfg).unwrap();
        let mut m2 = ForkedModel::new(ModelConfig::miniature(), 2).unwrap();
        let (_, h2) = train(&mut m2, &data, &data, &cfg).unwrap();
        assert_eq!(h1, h2);
        assert_eq!(m1.params(), m2.params());
    }

    #[test]
    fn empty_datasets_are_rejected() {
        let data = dataset(4, 1);
        let mut model = ForkedModel::new(ModelConfig::miniature(), 0).unwrap();
        assert!(matches!(
            train(&mut model, &[], &data, &TrainConfig::default()),
            Err(NnError::EmptyDataset)
        ));
        assert!(matches!(
            train(&mut model, &data, &[], &TrainConfig::default()),
            Err(NnError::EmptyDataset)
        ));
    }

    #[test]
    fn full_batch_descent_is_monotone_without_dropout() {
        let mut cfg = ModelConfig::miniature();
        cfg.conv_dropout = 0.0;
        cfg.head_dropout = 0.0;
        let mut model = ForkedModel::new(cfg, 11).unwrap();
        let data = dataset(8, 5);
        let batch: Vec<&TrainSample> = data.iter().collect();
        let mut last = f64::INFINITY;
        for _ in 0..50 {
            let (loss, grads) = model.backward(&batch, 0).unwrap();
            assert!(
                loss <= last + 1e-12,
                "loss increased: {last} -> {loss}"
            );
            last = loss;
            sgd_step(model.params_mut(), &grads, 1e-4);
        }
    }

    #[test]
    fn trained_model_beats_its_initialization() {
        let data = dataset(12, 33);
        let mut model = ForkedModel::new(ModelConfig::miniature(), 4).unwrap();
        let before = model.evaluate(&data, 4).unwrap();
        let cfg = TrainConfig {
            batch_size: 4,
            max_epochs: 30,
            seed: 5,
            ..TrainConfig::default()
        };
        let (_, history) = train(&mut model, &data, &data, &cfg).unwrap();
        let after = model.evaluate(&data, 4).unwrap();
        assert!(after < before, "no improvement: {before} -> {after}");
        assert_eq!(history.len(), 30);
        // Infer-mode eval matches the recorded val loss of the final epoch.
        assert!((history.last().unwrap().val_loss - after).abs() < 1e-12);
        let _ = Mode::Infer;
    }
}
