//! Baseband synthesis for point-target scenes.
//!
//! Each target contributes, per virtual channel `m`, chirp `n` and fast-time
//! instant `t`, the stretch-processed tone
//!
//! ```text
//! A * exp(j*2*pi*(f0*tau_n + (BW/2T)*(2*tau_n*t - tau_n^2))) * exp(j*phi(m))
//! ```
//!
//! with the round-trip delay `tau_n = 2*(R0 - v*n*T)/c` and the steering
//! phase `phi(m) = 2*pi*m*d*sin(theta)/lambda`. The quadratic `tau_n^2`
//! term is kept here even though readout math ignores it.

use std::f64::consts::PI;

use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::config::ChirpConfig;
use crate::error::RadarError;
use crate::waveform::{amplitude_from_rcs, steering_phase};

/// One ideal point scatterer.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PointTarget {
    /// Range at the start of the CPI (m).
    pub range: f64,
    /// Radial velocity (m/s); positive means approaching.
    pub velocity: f64,
    /// Angle of arrival (rad), within (-pi/2, pi/2).
    pub angle: f64,
    /// Radar cross section (dBsm).
    pub rcs_dbsm: f64,
}

/// Additive receiver noise for synthesis.
///
/// `snr_db` is measured against the weakest target's per-sample power;
/// `None` disables noise entirely.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NoiseSpec {
    pub snr_db: Option<f64>,
    pub seed: u64,
}

impl Default for NoiseSpec {
    fn default() -> Self {
        Self {
            snr_db: Some(20.0),
            seed: 0,
        }
    }
}

impl NoiseSpec {
    /// No additive noise.
    pub fn noiseless() -> Self {
        Self {
            snr_db: None,
            seed: 0,
        }
    }
}

/// Complex baseband samples over one CPI, indexed
/// `[virtual channel][chirp][fast-time sample]`.
#[derive(Debug, Clone)]
pub struct RadarCube {
    n_channels: usize,
    n_chirps: usize,
    n_samples: usize,
    data: Vec<Complex64>,
}

impl RadarCube {
    pub(crate) fn zeros(n_channels: usize, n_chirps: usize, n_samples: usize) -> Self {
        Self {
            n_channels,
            n_chirps,
            n_samples,
            data: vec![Complex64::new(0.0, 0.0); n_channels * n_chirps * n_samples],
        }
    }

    /// (channels, chirps, samples).
    pub fn dims(&self) -> (usize, usize, usize) {
        (self.n_channels, self.n_chirps, self.n_samples)
    }

    /// Fast-time samples of one chirp on one channel.
    pub fn chirp(&self, channel: usize, chirp: usize) -> &[Complex64] {
        let base = (channel * self.n_chirps + chirp) * self.n_samples;
        &self.data[base..base + self.n_samples]
    }

    pub(crate) fn chirp_mut(&mut self, channel: usize, chirp: usize) -> &mut [Complex64] {
        let base = (channel * self.n_chirps + chirp) * self.n_samples;
        &mut self.data[base..base + self.n_samples]
    }

    /// All samples in `[channel][chirp][sample]` order.
    pub fn samples(&self) -> &[Complex64] {
        &self.data
    }
}

/// Synthesize the baseband cube for a scene of point targets.
///
/// Targets past the unambiguous range are rejected rather than aliased.
pub fn synthesize_baseband(
    cfg: &ChirpConfig,
    targets: &[PointTarget],
    noise: &NoiseSpec,
) -> Result<RadarCube, RadarError> {
    cfg.validate()?;
    if targets.is_empty() {
        return Err(RadarError::EmptyScene);
    }
    let max_range = cfg.unambiguous_range();
    for (index, t) in targets.iter().enumerate() {
        if !(t.range > 0.0) {
            return Err(RadarError::domain(
                "target range",
                t.range,
                "range must be positive",
            ));
        }
        if t.range >= max_range {
            return Err(RadarError::BeyondUnambiguousRange {
                index,
                range_m: t.range,
                max_m: max_range,
            });
        }
        if t.angle.abs() >= PI / 2.0 {
            return Err(RadarError::domain(
                "target angle",
                t.angle,
                "angle must lie within (-pi/2, pi/2)",
            ));
        }
    }

    let n_channels = cfg.virtual_channels();
    let n_chirps = cfg.n_chirps;
    let n_samples = cfg.samples_per_chirp();
    let lambda = cfg.lambda();
    let slope = cfg.chirp_rate();
    let dt = 1.0 / cfg.fs;

    let mut cube = RadarCube::zeros(n_channels, n_chirps, n_samples);
    let mut amplitudes = Vec::with_capacity(targets.len());
    for t in targets {
        amplitudes.push(amplitude_from_rcs(t.rcs_dbsm, t.range)?);
    }

    let mut tone = vec![Complex64::new(0.0, 0.0); n_samples];
    for (t, &amp) in targets.iter().zip(&amplitudes) {
        // Per-channel phasors are chirp-independent.
        let channel_phasors: Vec<Complex64> = (0..n_channels)
            .map(|m| {
                let phi = steering_phase(m, cfg.d_rx, t.angle, lambda).expect("lambda > 0");
                Complex64::from_polar(1.0, phi)
            })
            .collect();

        for chirp in 0..n_chirps {
            let tau = 2.0 * (t.range - t.velocity * chirp as f64 * cfg.t_chirp) / cfg.c;
            let base = 2.0 * PI * (cfg.f0 * tau - 0.5 * slope * tau * tau);
            let step = 2.0 * PI * slope * tau * dt;
            for (i, v) in tone.iter_mut().enumerate() {
                *v = Complex64::from_polar(amp, base + step * i as f64);
            }
            for (m, phasor) in channel_phasors.iter().enumerate() {
                let dst = cube.chirp_mut(m, chirp);
                for (d, s) in dst.iter_mut().zip(tone.iter()) {
                    *d += phasor * s;
                }
            }
        }
    }

    if let Some(snr_db) = noise.snr_db {
        let weakest = amplitudes.iter().cloned().fold(f64::INFINITY, f64::min);
        let noise_var = weakest * weakest * 10f64.powf(-snr_db / 10.0);
        let sigma = (noise_var / 2.0).sqrt();
        let mut rng = ChaCha8Rng::seed_from_u64(noise.seed);
        for v in cube.data.iter_mut() {
            let re: f64 = StandardNormal.sample(&mut rng);
            let im: f64 = StandardNormal.sample(&mut rng);
            *v += Complex64::new(sigma * re, sigma * im);
        }
    }

    Ok(cube)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::waveform::beat_frequency;

    #[test]
    fn single_static_target_is_one_tone_per_chirp() {
        let cfg = ChirpConfig::desk_79ghz();
        let target = PointTarget {
            range: 5.0,
            velocity: 0.0,
            angle: 0.0,
            rcs_dbsm: 0.0,
        };
        let cube = synthesize_baseband(&cfg, &[target], &NoiseSpec::noiseless()).unwrap();
        let f_beat = beat_frequency(&cfg, 5.0).unwrap();
        let expected_step = 2.0 * std::f64::consts::PI * f_beat / cfg.fs;

        for chirp in [0, 63, 127] {
            let s = cube.chirp(0, chirp);
            for w in s.windows(2) {
                let inc = (w[1] / w[0]).arg();
                assert!(
                    (inc - expected_step).abs() < 1e-9,
                    "phase increment {inc} vs {expected_step}"
                );
            }
        }
    }

    #[test]
    fn empty_scene_is_rejected() {
        let cfg = ChirpConfig::desk_79ghz();
        assert!(matches!(
            synthesize_baseband(&cfg, &[], &NoiseSpec::noiseless()),
            Err(RadarError::EmptyScene)
        ));
    }

    #[test]
    fn target_beyond_unambiguous_range_is_rejected_by_name() {
        let cfg = ChirpConfig::desk_79ghz();
        let targets = [
            PointTarget {
                range: 5.0,
                velocity: 0.0,
                angle: 0.0,
                rcs_dbsm: 0.0,
            },
            PointTarget {
                range: cfg.unambiguous_range() + 1.0,
                velocity: 0.0,
                angle: 0.0,
                rcs_dbsm: 0.0,
            },
        ];
        match synthesize_baseband(&cfg, &targets, &NoiseSpec::noiseless()) {
            Err(RadarError::BeyondUnambiguousRange { index, .. }) => assert_eq!(index, 1),
            other => panic!("expected range rejection, got {other:?}"),
        }
    }

    #[test]
    fn noise_is_seed_deterministic() {
        let cfg = ChirpConfig::desk_79ghz();
        let t = PointTarget {
            range: 3.0,
            velocity: 0.5,
            angle: 0.2,
            rcs_dbsm: -5.0,
        };
        let spec = NoiseSpec {
            snr_db: Some(10.0),
            seed: 42,
        };
        let a = synthesize_baseband(&cfg, &[t], &spec).unwrap();
        let b = synthesize_baseband(&cfg, &[t], &spec).unwrap();
        assert_eq!(a.samples(), b.samples());
    }
}
