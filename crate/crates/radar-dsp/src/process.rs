//! Range-Doppler-angle processing of a baseband cube.
//!
//! Three FFT passes (fast time, slow time, virtual channel) with unitary
//! 1/sqrt(N) scaling and zero padding to the next power of two, followed by
//! local-maximum peak extraction above a relative power threshold. Values
//! are read off bin centres; no interpolation.

use num_complex::Complex64;
use rustfft::FftPlanner;

use crate::config::ChirpConfig;
use crate::error::RadarError;
use crate::synth::RadarCube;

/// Upper bound on detections kept per CPI; the strongest survive.
pub const MAX_DETECTIONS_PER_CPI: usize = 256;

/// Projection plane of a radar module.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Plane {
    /// Depth-azimuth.
    XY,
    /// Depth-elevation.
    XZ,
}

/// One resolved reflection point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Detection {
    /// Slant range (m).
    pub range: f64,
    /// Radial velocity (m/s); positive means approaching.
    pub velocity: f64,
    /// Angle of arrival (rad).
    pub angle: f64,
    /// Calibrated amplitude estimate in (0, 1].
    pub power: f64,
}

/// Fast-time spectra of every (channel, chirp) pair.
#[derive(Debug, Clone)]
pub struct RangeSpectrum {
    pub n_channels: usize,
    pub n_chirps: usize,
    pub n_bins: usize,
    data: Vec<Complex64>,
}

impl RangeSpectrum {
    /// Spectrum bins in `[channel][chirp][bin]` order.
    pub fn data(&self) -> &[Complex64] {
        &self.data
    }

    /// Sum of squared magnitudes over all cells.
    pub fn total_power(&self) -> f64 {
        self.data.iter().map(|z| z.norm_sqr()).sum()
    }
}

fn fft_padded(
    planner: &mut FftPlanner<f64>,
    input: &[Complex64],
    n_fft: usize,
    scratch: &mut Vec<Complex64>,
) -> Vec<Complex64> {
    let mut buf = vec![Complex64::new(0.0, 0.0); n_fft];
    buf[..input.len()].copy_from_slice(input);
    let fft = planner.plan_fft_forward(n_fft);
    scratch.resize(fft.get_inplace_scratch_len(), Complex64::new(0.0, 0.0));
    fft.process_with_scratch(&mut buf, scratch);
    let scale = 1.0 / (n_fft as f64).sqrt();
    for v in buf.iter_mut() {
        *v *= scale;
    }
    buf
}

/// Unitary fast-time FFT of every chirp, zero-padded to a power of two.
///
/// Total spectral power equals the cube's sample power (Parseval).
pub fn range_spectrum(cube: &RadarCube) -> RangeSpectrum {
    let (n_channels, n_chirps, n_samples) = cube.dims();
    let n_bins = n_samples.next_power_of_two();
    let mut planner = FftPlanner::new();
    let mut scratch = Vec::new();
    let mut data = Vec::with_capacity(n_channels * n_chirps * n_bins);
    for ch in 0..n_channels {
        for chirp in 0..n_chirps {
            data.extend_from_slice(&fft_padded(
                &mut planner,
                cube.chirp(ch, chirp),
                n_bins,
                &mut scratch,
            ));
        }
    }
    RangeSpectrum {
        n_channels,
        n_chirps,
        n_bins,
        data,
    }
}

fn signed_bin(bin: usize, n: usize) -> i64 {
    if bin < n.div_ceil(2) {
        bin as i64
    } else {
        bin as i64 - n as i64
    }
}

/// Resolve detections from a baseband cube.
///
/// Cells qualify when their power reaches `threshold` times the strongest
/// cell and they dominate their six axis neighbours (wrap-around in Doppler
/// and angle). At most [`MAX_DETECTIONS_PER_CPI`] survive, strongest first.
pub fn process_cube(
    cube: &RadarCube,
    cfg: &ChirpConfig,
    threshold: f64,
) -> Result<Vec<Detection>, RadarError> {
    cfg.validate()?;
    if !(threshold > 0.0 && threshold <= 1.0) {
        return Err(RadarError::domain(
            "threshold",
            threshold,
            "relative power threshold must lie in (0, 1]",
        ));
    }
    let want = (
        cfg.virtual_channels(),
        cfg.n_chirps,
        cfg.samples_per_chirp(),
    );
    if cube.dims() != want {
        return Err(RadarError::DimensionMismatch {
            got: cube.dims(),
            want,
        });
    }
    let (n_channels, n_chirps, n_samples) = cube.dims();

    let stage1 = range_spectrum(cube);
    let nr = stage1.n_bins;
    let nd = n_chirps.next_power_of_two();
    let na = n_channels.next_power_of_two();

    let mut planner = FftPlanner::new();
    let mut scratch = Vec::new();

    // Slow-time FFT: [ch][chirp][r] -> [ch][d][r].
    let mut stage2 = vec![Complex64::new(0.0, 0.0); n_channels * nd * nr];
    let mut column = vec![Complex64::new(0.0, 0.0); n_chirps];
    for ch in 0..n_channels {
        for r in 0..nr {
            for chirp in 0..n_chirps {
                column[chirp] = stage1.data[(ch * n_chirps + chirp) * nr + r];
            }
            let spec = fft_padded(&mut planner, &column, nd, &mut scratch);
            for (d, v) in spec.into_iter().enumerate() {
                stage2[(ch * nd + d) * nr + r] = v;
            }
        }
    }

    // Channel FFT: [ch][d][r] -> power at [r][d][a].
    let mut power = vec![0.0f64; nr * nd * na];
    let mut chans = vec![Complex64::new(0.0, 0.0); n_channels];
    for d in 0..nd {
        for r in 0..nr {
            for ch in 0..n_channels {
                chans[ch] = stage2[(ch * nd + d) * nr + r];
            }
            let spec = fft_padded(&mut planner, &chans, na, &mut scratch);
            for (a, v) in spec.into_iter().enumerate() {
                power[(r * nd + d) * na + a] = v.norm_sqr();
            }
        }
    }

    let max_power = power.iter().cloned().fold(0.0f64, f64::max);
    if max_power <= 0.0 {
        return Ok(Vec::new());
    }
    let floor = threshold * max_power;

    let idx = |r: usize, d: usize, a: usize| (r * nd + d) * na + a;
    let mut peaks: Vec<(usize, f64)> = Vec::new();
    for r in 0..nr {
        for d in 0..nd {
            for a in 0..na {
                let here = idx(r, d, a);
                let p = power[here];
                if p < floor {
                    continue;
                }
                let mut neighbours = [usize::MAX; 6];
                let mut n_count = 0;
                if r > 0 {
                    neighbours[n_count] = idx(r - 1, d, a);
                    n_count += 1;
                }
                if r + 1 < nr {
                    neighbours[n_count] = idx(r + 1, d, a);
                    n_count += 1;
                }
                neighbours[n_count] = idx(r, (d + nd - 1) % nd, a);
                n_count += 1;
                neighbours[n_count] = idx(r, (d + 1) % nd, a);
                n_count += 1;
                neighbours[n_count] = idx(r, d, (a + na - 1) % na);
                n_count += 1;
                neighbours[n_count] = idx(r, d, (a + 1) % na);
                n_count += 1;

                // Dominate every neighbour; exact ties resolve to the lower
                // linear index so plateau cells yield a single peak.
                let is_peak = neighbours[..n_count].iter().all(|&nb| {
                    nb == here || p > power[nb] || (p == power[nb] && here < nb)
                });
                if is_peak {
                    peaks.push((here, p));
                }
            }
        }
    }

    peaks.sort_unstable_by(|a, b| b.1.total_cmp(&a.1).then(a.0.cmp(&b.0)));
    peaks.truncate(MAX_DETECTIONS_PER_CPI);

    let lambda = cfg.lambda();
    let gain = (n_samples * n_chirps * n_channels) as f64 / ((nr * nd * na) as f64).sqrt();
    let detections = peaks
        .into_iter()
        .map(|(cell, p)| {
            let a = cell % na;
            let d = (cell / na) % nd;
            let r = cell / (na * nd);
            let f_beat = r as f64 * cfg.fs / nr as f64;
            let range = f_beat * cfg.c / (2.0 * cfg.chirp_rate());
            let f_doppler = signed_bin(d, nd) as f64 / (nd as f64 * cfg.t_chirp);
            let velocity = -lambda * f_doppler / 2.0;
            let u = signed_bin(a, na) as f64 / na as f64;
            let angle = (u * lambda / cfg.d_rx).clamp(-1.0, 1.0).asin();
            let power = (p.sqrt() / gain).min(1.0);
            Detection {
                range,
                velocity,
                angle,
                power,
            }
        })
        .collect();
    Ok(detections)
}

/// Project a detection into its module plane: `(R cos(theta), R sin(theta))`.
///
/// The lateral coordinate is azimuth for [`Plane::XY`] and elevation for
/// [`Plane::XZ`].
pub fn to_cartesian(det: &Detection, _plane: Plane) -> (f64, f64) {
    (det.range * det.angle.cos(), det.range * det.angle.sin())
}
