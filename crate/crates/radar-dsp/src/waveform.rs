//! Scalar FMCW waveform relations.
//!
//! Stretch processing turns a target echo into a single baseband tone whose
//! frequency is proportional to range:
//!
//! ```text
//! f_beat = (BW/T) * 2*R / c
//! ```
//!
//! Doppler across chirps, resolutions and the array steering phase follow
//! the same linear-chirp model.

use std::f64::consts::PI;

use crate::config::ChirpConfig;
use crate::error::RadarError;

/// Beat frequency (Hz) of a target at range `r0` after stretch processing.
pub fn beat_frequency(cfg: &ChirpConfig, r0: f64) -> Result<f64, RadarError> {
    if !(r0 > 0.0) {
        return Err(RadarError::domain("r0", r0, "range must be positive"));
    }
    Ok(cfg.chirp_rate() * 2.0 * r0 / cfg.c)
}

/// Range resolution c/(2*BW) in metres.
pub fn range_resolution(cfg: &ChirpConfig) -> Result<f64, RadarError> {
    if !(cfg.bw > 0.0) {
        return Err(RadarError::domain("bw", cfg.bw, "bandwidth must be positive"));
    }
    Ok(cfg.c / (2.0 * cfg.bw))
}

/// Velocity resolution lambda/(2*CPI) in m/s.
pub fn velocity_resolution(cfg: &ChirpConfig) -> Result<f64, RadarError> {
    if cfg.n_chirps < 2 {
        return Err(RadarError::domain(
            "n_chirps",
            cfg.n_chirps as f64,
            "Doppler needs at least two chirps",
        ));
    }
    Ok(cfg.lambda() / (2.0 * cfg.cpi()))
}

/// Doppler shift -2v/lambda (Hz); positive velocity means approaching.
pub fn doppler_frequency(v: f64, lambda: f64) -> Result<f64, RadarError> {
    if !(lambda > 0.0) {
        return Err(RadarError::domain(
            "lambda",
            lambda,
            "wavelength must be positive",
        ));
    }
    Ok(-2.0 * v / lambda)
}

/// Radar cross section (dBsm) from the normalized received amplitude at
/// range `r0`.
pub fn rcs_from_amplitude(a_r: f64, r0: f64) -> Result<f64, RadarError> {
    if !(a_r > 0.0) {
        return Err(RadarError::domain("a_r", a_r, "amplitude must be positive"));
    }
    if !(r0 > 0.0) {
        return Err(RadarError::domain("r0", r0, "range must be positive"));
    }
    Ok(20.0 * (4.0 * PI * r0 * r0 * a_r).log10())
}

/// Normalized received amplitude for a target of `sigma_dbsm` at range
/// `r0`; algebraic inverse of [`rcs_from_amplitude`].
pub fn amplitude_from_rcs(sigma_dbsm: f64, r0: f64) -> Result<f64, RadarError> {
    if !(r0 > 0.0) {
        return Err(RadarError::domain("r0", r0, "range must be positive"));
    }
    Ok(10f64.powf(sigma_dbsm / 20.0) / (4.0 * PI * r0 * r0))
}

/// Progressive phase 2*pi*n*d*sin(theta)/lambda of array element `n` for an
/// arrival angle `theta`.
pub fn steering_phase(n: usize, d: f64, theta: f64, lambda: f64) -> Result<f64, RadarError> {
    if !(lambda > 0.0) {
        return Err(RadarError::domain(
            "lambda",
            lambda,
            "wavelength must be positive",
        ));
    }
    Ok(2.0 * PI * n as f64 * d * theta.sin() / lambda)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn cfg(bw: f64, t_chirp: f64) -> ChirpConfig {
        let mut c = ChirpConfig::desk_79ghz();
        c.bw = bw;
        c.t_chirp = t_chirp;
        c
    }

    #[test]
    fn beat_frequency_reference_values() {
        // (3.072 GHz / 92 us) * (2*5 / 3e8), evaluated by hand.
        let f = beat_frequency(&cfg(3.072e9, 92e-6), 5.0).unwrap();
        assert!((f - 1_113_043.4782608696).abs() < 1e-2, "got {f}");

        // Chirp-rate times delay chosen to land exactly on 1 MHz.
        let f = beat_frequency(&cfg(4e9, 1e-4), 3.75).unwrap();
        assert!((f - 1.0e6).abs() < 1e-6, "got {f}");
    }

    #[test]
    fn beat_frequency_zero_range_limit() {
        let c = cfg(3.072e9, 92e-6);
        let f = beat_frequency(&c, 1e-12).unwrap();
        assert!(f > 0.0 && f < 1e-3);
        assert!(beat_frequency(&c, 0.0).is_err());
        assert!(beat_frequency(&c, -1.0).is_err());
    }

    #[test]
    fn range_resolution_reference_values() {
        let r = range_resolution(&cfg(3.072e9, 92e-6)).unwrap();
        assert!((r - 0.048828125).abs() < 1e-12, "got {r}");

        let r = range_resolution(&cfg(1.5e8, 92e-6)).unwrap();
        assert!((r - 1.0).abs() < 1e-12);

        // bw = c/2 forces exactly one metre.
        let r = range_resolution(&cfg(1.5e8, 92e-6)).unwrap();
        assert_eq!(r, 1.0);
    }

    #[test]
    fn velocity_resolution_reference_values() {
        let c = ChirpConfig::desk_79ghz();
        let dv = velocity_resolution(&c).unwrap();
        assert!((dv - 0.16123761695101815).abs() < 1e-9, "got {dv}");

        // Doubling the chirp count halves the resolution cell.
        let mut c2 = c.clone();
        c2.n_chirps *= 2;
        let dv2 = velocity_resolution(&c2).unwrap();
        assert!((dv2 - dv / 2.0).abs() < 1e-15);

        // CPI = lambda/2 seconds forces exactly 1 m/s.
        let mut c3 = c.clone();
        c3.n_chirps = 2;
        c3.t_chirp = c3.lambda() / 4.0;
        let dv3 = velocity_resolution(&c3).unwrap();
        assert!((dv3 - 1.0).abs() < 1e-12);

        let mut c4 = c;
        c4.n_chirps = 1;
        assert!(velocity_resolution(&c4).is_err());
    }

    #[test]
    fn doppler_frequency_reference_values() {
        let f = doppler_frequency(1.0, 3.797e-3).unwrap();
        assert!((f + 526.7316302343955).abs() < 1e-9, "got {f}");
        assert_eq!(doppler_frequency(0.0, 3.797e-3).unwrap(), 0.0);
        let f_neg = doppler_frequency(-1.0, 3.797e-3).unwrap();
        assert!((f_neg - 526.7316302343955).abs() < 1e-9);
        assert!(doppler_frequency(1.0, 0.0).is_err());
    }

    #[test]
    fn rcs_amplitude_reference_values() {
        let s = rcs_from_amplitude(1.0, 1.0).unwrap();
        assert!((s - 21.984197280441926).abs() < 1e-9, "got {s}");

        let s = rcs_from_amplitude(1.0 / (4.0 * std::f64::consts::PI), 1.0).unwrap();
        assert!(s.abs() < 1e-12);

        // +40 dB from the R^2 term at ten times the range.
        let s = rcs_from_amplitude(1.0, 10.0).unwrap();
        assert!((s - 61.984197280441926).abs() < 1e-9);

        assert!(rcs_from_amplitude(0.0, 1.0).is_err());
        assert!(rcs_from_amplitude(1.0, 0.0).is_err());
    }

    #[test]
    fn amplitude_from_rcs_reference_values() {
        let a = amplitude_from_rcs(21.98, 1.0).unwrap();
        assert!((a - 0.9995168869678659).abs() < 1e-12, "got {a}");

        let a = amplitude_from_rcs(0.0, 1.0).unwrap();
        assert!((a - 1.0 / (4.0 * std::f64::consts::PI)).abs() < 1e-15);

        // R^-2 law: doubling range divides amplitude by four.
        let a1 = amplitude_from_rcs(7.5, 1.3).unwrap();
        let a2 = amplitude_from_rcs(7.5, 2.6).unwrap();
        assert!((a1 / a2 - 4.0).abs() < 1e-12);

        assert!(amplitude_from_rcs(0.0, 0.0).is_err());
    }

    #[test]
    fn steering_phase_reference_values() {
        let lambda = 3.8e-3;
        let p = steering_phase(1, 0.5 * lambda, 30f64.to_radians(), lambda).unwrap();
        assert!((p - std::f64::consts::FRAC_PI_2).abs() < 1e-12, "got {p}");

        for n in 0..8 {
            assert_eq!(steering_phase(n, 0.5 * lambda, 0.0, lambda).unwrap(), 0.0);
        }

        let p1 = steering_phase(1, 0.5 * lambda, 0.4, lambda).unwrap();
        let p2 = steering_phase(2, 0.5 * lambda, 0.4, lambda).unwrap();
        assert!((p2 - 2.0 * p1).abs() < 1e-12);
    }

    proptest! {
        // Round-trip between RCS and amplitude over the whole desk-scale
        // envelope.
        #[test]
        fn rcs_amplitude_round_trip(sigma in -20.0..40.0f64, r0 in 0.5..10.0f64) {
            let a = amplitude_from_rcs(sigma, r0).unwrap();
            let back = rcs_from_amplitude(a, r0).unwrap();
            prop_assert!((back - sigma).abs() < 1e-9);
        }

        // Steering phase is odd in theta and linear in the element index.
        #[test]
        fn steering_phase_odd_and_linear(theta in -1.4..1.4f64, n in 0usize..16) {
            let lambda = 3.8e-3;
            let d = 0.5 * lambda;
            let p = steering_phase(n, d, theta, lambda).unwrap();
            let p_neg = steering_phase(n, d, -theta, lambda).unwrap();
            prop_assert!((p + p_neg).abs() < 1e-12);
            let p1 = steering_phase(1, d, theta, lambda).unwrap();
            prop_assert!((p - n as f64 * p1).abs() < 1e-9);
        }
    }
}
