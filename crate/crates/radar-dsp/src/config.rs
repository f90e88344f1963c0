//! FMCW waveform and antenna-geometry parameters.

use crate::error::RadarError;

/// FMCW chirp and array parameters for one radar module.
///
/// Angles are resolved by a TDM-MIMO virtual array of `n_tx * n_rx`
/// elements indexed contiguously at `d_rx` spacing.
#[derive(Debug, Clone, PartialEq)]
pub struct ChirpConfig {
    /// Chirp start frequency (Hz). Also the carrier used for wavelength.
    pub f0: f64,
    /// Sweep bandwidth (Hz).
    pub bw: f64,
    /// Duration of one chirp (s).
    pub t_chirp: f64,
    /// Chirps per coherent processing interval.
    pub n_chirps: usize,
    /// Fast-time (baseband) sample rate (Hz).
    pub fs: f64,
    /// Real receive elements.
    pub n_rx: usize,
    /// Real transmit elements.
    pub n_tx: usize,
    /// Receive element spacing (m); half a wavelength to avoid grating lobes.
    pub d_rx: f64,
    /// Transmit element spacing (m).
    pub d_tx: f64,
    /// Propagation speed (m/s).
    pub c: f64,
}

impl ChirpConfig {
    /// Desk-scale 79 GHz preset: 3.072 GHz sweep, 92 us chirps, 128 chirps
    /// per CPI, 2 TX x 4 RX. The 4 MHz sample rate puts the unambiguous
    /// range just under 18 m.
    ///
    /// Uses the rounded propagation speed 3e8 m/s that the rest of the
    /// reference parameter set was derived with.
    pub fn desk_79ghz() -> Self {
        let c = 3.0e8;
        let f0 = 79.0e9;
        let d_rx = 0.5 * c / f0;
        Self {
            f0,
            bw: 3.072e9,
            t_chirp: 92.0e-6,
            n_chirps: 128,
            fs: 4.0e6,
            n_rx: 4,
            n_tx: 2,
            d_rx,
            // One TX step spans the whole RX aperture, making the virtual
            // array contiguous at d_rx spacing.
            d_tx: 4.0 * d_rx,
            c,
        }
    }

    /// Carrier wavelength (m).
    pub fn lambda(&self) -> f64 {
        self.c / self.f0
    }

    /// Coherent processing interval (s).
    pub fn cpi(&self) -> f64 {
        self.n_chirps as f64 * self.t_chirp
    }

    /// Size of the TDM-MIMO virtual array.
    pub fn virtual_channels(&self) -> usize {
        self.n_tx * self.n_rx
    }

    /// Fast-time samples per chirp.
    pub fn samples_per_chirp(&self) -> usize {
        (self.fs * self.t_chirp).round() as usize
    }

    /// Largest range whose beat frequency stays below the sample rate.
    pub fn unambiguous_range(&self) -> f64 {
        self.fs * self.c * self.t_chirp / (2.0 * self.bw)
    }

    /// Chirp rate BW/T (Hz/s).
    pub fn chirp_rate(&self) -> f64 {
        self.bw / self.t_chirp
    }

    /// Check structural invariants.
    pub fn validate(&self) -> Result<(), RadarError> {
        if !(self.f0 > 0.0) {
            return Err(RadarError::domain("f0", self.f0, "must be positive"));
        }
        if !(self.bw > 0.0) {
            return Err(RadarError::domain("bw", self.bw, "must be positive"));
        }
        if !(self.t_chirp > 0.0) {
            return Err(RadarError::domain(
                "t_chirp",
                self.t_chirp,
                "must be positive",
            ));
        }
        if !(self.fs > 0.0) {
            return Err(RadarError::domain("fs", self.fs, "must be positive"));
        }
        if !(self.c > 0.0) {
            return Err(RadarError::domain("c", self.c, "must be positive"));
        }
        if self.n_chirps == 0 {
            return Err(RadarError::domain("n_chirps", 0.0, "must be at least 1"));
        }
        if self.n_rx == 0 || self.n_tx == 0 {
            return Err(RadarError::domain(
                "n_rx/n_tx",
                0.0,
                "element counts must be at least 1",
            ));
        }
        if self.samples_per_chirp() == 0 {
            return Err(RadarError::domain(
                "fs*t_chirp",
                self.fs * self.t_chirp,
                "chirp must contain at least one sample",
            ));
        }
        // Anti-grating constraint: d_rx = lambda/2.
        let want = 0.5 * self.lambda();
        if (self.d_rx - want).abs() > 1e-6 * want {
            return Err(RadarError::domain(
                "d_rx",
                self.d_rx,
                "receive spacing must equal half the carrier wavelength",
            ));
        }
        Ok(())
    }
}
