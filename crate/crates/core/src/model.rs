//! Shared domain types: resonant modes, pump drive, and the full transducer
//! operating point.
//!
//! Conventions fixed here and relied on everywhere else:
//!
//! * All stored frequencies and rates are angular (rad/s). Plain-Hz values
//!   exist only at user-facing boundaries and cross through
//!   [`hz_to_angular`] exactly once.
//! * Loss rates are full energy-decay linewidths. Amplitude equations use
//!   half-rates where the physics requires them; that division happens at
//!   the point of use, never in storage.
//! * Quality factors quoted for a mode are intrinsic. Loaded rates are
//!   built by adding external coupling through an explicit ratio
//!   (`coupling_rate = ratio * intrinsic_rate`), which is how the coupling
//!   conditions 0.7x, 2.3x, 3.4x are specified.

use std::f64::consts::TAU;

use crate::error::{Error, Result};

/// Convert a plain frequency in Hz to an angular frequency in rad/s.
#[inline]
pub fn hz_to_angular(f: f64) -> f64 {
    TAU * f
}

/// Convert an angular frequency in rad/s back to plain Hz.
#[inline]
pub fn angular_to_hz(omega: f64) -> f64 {
    omega / TAU
}

/// One resonant mode: its angular frequency and its loss budget, split into
/// an intrinsic part and an external-coupling part.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ModeParams {
    frequency: f64,
    intrinsic_rate: f64,
    coupling_rate: f64,
}

impl ModeParams {
    pub fn new(frequency: f64, intrinsic_rate: f64, coupling_rate: f64) -> Result<Self> {
        if !(frequency > 0.0) || !frequency.is_finite() {
            return Err(Error::invalid("frequency", frequency, "must be > 0"));
        }
        if !(intrinsic_rate >= 0.0) || !intrinsic_rate.is_finite() {
            return Err(Error::invalid(
                "intrinsic_rate",
                intrinsic_rate,
                "must be >= 0",
            ));
        }
        if !(coupling_rate >= 0.0) || !coupling_rate.is_finite() {
            return Err(Error::invalid(
                "coupling_rate",
                coupling_rate,
                "must be >= 0",
            ));
        }
        Ok(Self {
            frequency,
            intrinsic_rate,
            coupling_rate,
        })
    }

    /// Angular resonance frequency, rad/s.
    pub fn frequency(&self) -> f64 {
        self.frequency
    }

    /// Intrinsic energy-decay rate, rad/s.
    pub fn intrinsic_rate(&self) -> f64 {
        self.intrinsic_rate
    }

    /// External-coupling energy-decay rate, rad/s.
    pub fn coupling_rate(&self) -> f64 {
        self.coupling_rate
    }

    /// Total linewidth: exact sum of the intrinsic and coupling parts.
    pub fn total_rate(&self) -> f64 {
        self.intrinsic_rate + self.coupling_rate
    }

    /// Fraction of the mode's photons leaving through the useful port,
    /// `coupling_rate / total_rate`. Zero for a lossless, uncoupled mode.
    pub fn extraction_ratio(&self) -> f64 {
        let total = self.total_rate();
        if total == 0.0 {
            0.0
        } else {
            self.coupling_rate / total
        }
    }

    /// Same mode with the external coupling replaced by
    /// `ratio * intrinsic_rate`. Used by coupling sweeps.
    pub fn with_coupling_ratio(&self, ratio: f64) -> Result<Self> {
        if !(ratio >= 0.0) || !ratio.is_finite() {
            return Err(Error::invalid("coupling_ratio", ratio, "must be >= 0"));
        }
        Self::new(
            self.frequency,
            self.intrinsic_rate,
            ratio * self.intrinsic_rate,
        )
    }
}

/// Build a mode from an intrinsic quality factor and an external-coupling
/// ratio: `intrinsic_rate = frequency / intrinsic_q`,
/// `coupling_rate = coupling_ratio * intrinsic_rate`.
pub fn mode_from_q(frequency: f64, intrinsic_q: f64, coupling_ratio: f64) -> Result<ModeParams> {
    if !(frequency > 0.0) || !frequency.is_finite() {
        return Err(Error::invalid("frequency", frequency, "must be > 0"));
    }
    if !(intrinsic_q > 0.0) {
        return Err(Error::invalid("intrinsic_q", intrinsic_q, "must be > 0"));
    }
    if !(coupling_ratio >= 0.0) || !coupling_ratio.is_finite() {
        return Err(Error::invalid(
            "coupling_ratio",
            coupling_ratio,
            "must be >= 0",
        ));
    }
    let intrinsic_rate = frequency / intrinsic_q;
    ModeParams::new(frequency, intrinsic_rate, coupling_ratio * intrinsic_rate)
}

/// Coherent drive on the optical pump mode.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PumpDrive {
    power: f64,
    detuning: f64,
}

impl PumpDrive {
    /// `power` in W, `detuning` the angular offset of the pump-mode
    /// resonance from the drive laser (rad/s).
    pub fn new(power: f64, detuning: f64) -> Result<Self> {
        if !(power >= 0.0) || !power.is_finite() {
            return Err(Error::invalid("power", power, "must be >= 0"));
        }
        if !detuning.is_finite() {
            return Err(Error::invalid("detuning", detuning, "must be finite"));
        }
        Ok(Self { power, detuning })
    }

    pub fn power(&self) -> f64 {
        self.power
    }

    pub fn detuning(&self) -> f64 {
        self.detuning
    }
}

/// Complete transducer configuration: the three modes taking part in the
/// three-wave mixing, the single-photon coupling rate, and the pump drive.
///
/// The signal and microwave modes must each have a nonzero total linewidth;
/// degenerate zero-linewidth configurations are rejected here so that the
/// steady-state formulas downstream never divide by zero.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OperatingPoint {
    optical_signal: ModeParams,
    optical_pump: ModeParams,
    microwave: ModeParams,
    g_eo: f64,
    pump: PumpDrive,
}

impl OperatingPoint {
    pub fn new(
        optical_signal: ModeParams,
        optical_pump: ModeParams,
        microwave: ModeParams,
        g_eo: f64,
        pump: PumpDrive,
    ) -> Result<Self> {
        if !(g_eo >= 0.0) || !g_eo.is_finite() {
            return Err(Error::invalid("g_eo", g_eo, "must be >= 0"));
        }
        if optical_signal.total_rate() == 0.0 {
            return Err(Error::invalid(
                "optical_signal.total_rate",
                0.0,
                "must be > 0",
            ));
        }
        if microwave.total_rate() == 0.0 {
            return Err(Error::invalid("microwave.total_rate", 0.0, "must be > 0"));
        }
        Ok(Self {
            optical_signal,
            optical_pump,
            microwave,
            g_eo,
            pump,
        })
    }

    pub fn optical_signal(&self) -> &ModeParams {
        &self.optical_signal
    }

    /// The pumped optical mode. Only its frequency enters the default
    /// formulas; see [`Self::pump_mode_total_rate`] for the loss rule.
    pub fn optical_pump(&self) -> &ModeParams {
        &self.optical_pump
    }

    pub fn microwave(&self) -> &ModeParams {
        &self.microwave
    }

    /// Single-photon electro-optic coupling rate, rad/s.
    pub fn g_eo(&self) -> f64 {
        self.g_eo
    }

    pub fn pump(&self) -> &PumpDrive {
        &self.pump
    }

    /// Linewidth used in the intracavity-pump denominator. The pump mode is
    /// assumed to share the signal mode's loss budget; a pump mode
    /// constructed with its own nonzero rates overrides that default.
    pub fn pump_mode_total_rate(&self) -> f64 {
        let own = self.optical_pump.total_rate();
        if own > 0.0 {
            own
        } else {
            self.optical_signal.total_rate()
        }
    }

    /// Copy of this operating point with the signal mode's external
    /// coupling set to `ratio * intrinsic_rate`.
    pub fn with_signal_coupling_ratio(&self, ratio: f64) -> Result<Self> {
        let mut op = *self;
        op.optical_signal = self.optical_signal.with_coupling_ratio(ratio)?;
        Ok(op)
    }

    /// Copy of this operating point with a different pump power.
    pub fn with_pump_power(&self, power: f64) -> Result<Self> {
        let mut op = *self;
        op.pump = PumpDrive::new(power, self.pump.detuning())?;
        Ok(op)
    }
}
