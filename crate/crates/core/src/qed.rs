//! Optical readout of a dispersively coupled transmon through the
//! transducer.
//!
//! In the dispersive regime the qubit acts as a static, state-dependent
//! shift `chi sigma_z` of the microwave resonance; its own dynamics are not
//! simulated. Renormalized qubit and cavity frequencies are absorbed into
//! the rotating frame, so only `chi` enters the math. The steady state of
//! the interaction-picture equations under the shifted readout drive gives
//!
//! ```text
//! eta(chi) = gamma_ac gamma_bc (2G / gamma_a)^2
//!            / | i chi + gamma_b/2 + 2 G^2 / gamma_a |^2
//! ```
//!
//! with `G^2 = n_p g_eo^2`: a Lorentzian in `chi` of half-width
//! `gamma_b (1 + C) / 2` that reduces to the resonant conversion efficiency
//! at `chi = 0`. [`crate::dynamics::integrate_dispersive`] checks this
//! closed form independently.

use crate::converter;
use crate::error::{Error, Result};
use crate::model::OperatingPoint;
use crate::optimize;

/// Qubit eigenstate label; the dispersive shift enters as `chi * sigma_z`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum QubitState {
    Ground,
    Excited,
}

impl QubitState {
    pub fn sigma_z(&self) -> f64 {
        match self {
            QubitState::Ground => -1.0,
            QubitState::Excited => 1.0,
        }
    }
}

/// Frozen qubit parameters for one readout evaluation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QubitParams {
    pub dispersive_shift: f64,
    pub state: QubitState,
}

impl QubitParams {
    /// Signed shift of the microwave resonance, `chi * sigma_z`.
    pub fn effective_shift(&self) -> f64 {
        self.dispersive_shift * self.state.sigma_z()
    }
}

/// Readout efficiency seen with the qubit frozen in `qubit.state`. The
/// efficiency is even in the shift, so both states convert equally well;
/// what distinguishes them is the output tone position (see
/// [`readout_spectrum_labels`]).
pub fn readout_efficiency_for_qubit(op: &OperatingPoint, qubit: &QubitParams) -> f64 {
    readout_efficiency(op, qubit.effective_shift())
}

/// Conversion efficiency of the readout tone when the microwave resonance
/// is dispersively shifted by `chi` (rad/s). Even in `chi`.
pub fn readout_efficiency(op: &OperatingPoint, chi: f64) -> f64 {
    let gamma_a = op.optical_signal().total_rate();
    let gamma_b = op.microwave().total_rate();
    let g2 = converter::pumped_coupling_squared(op);
    let numerator = op.optical_signal().coupling_rate() * op.microwave().coupling_rate() * 4.0 * g2
        / (gamma_a * gamma_a);
    let real = 0.5 * gamma_b + 2.0 * g2 / gamma_a;
    numerator / (chi * chi + real * real)
}

/// Result of a dispersive-shift resolution search.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum DispersiveResolution {
    /// Smallest |chi| at which the efficiency drops below the threshold.
    Resolved(f64),
    /// The efficiency stayed above the threshold out to the search ceiling
    /// of `1e3 * gamma_b`.
    BeyondCeiling { ceiling: f64 },
}

/// Smallest `|chi|` with `eta(chi) < threshold`, located by bisection to
/// 1e-6 relative. The threshold must lie strictly between 0 and the
/// unshifted efficiency `eta(0)`.
pub fn dispersive_resolution(op: &OperatingPoint, threshold: f64) -> Result<DispersiveResolution> {
    let peak = readout_efficiency(op, 0.0);
    if !(threshold > 0.0 && threshold < peak) {
        return Err(Error::InvalidThreshold {
            threshold,
            limit: peak,
        });
    }
    let ceiling = 1e3 * op.microwave().total_rate();
    if readout_efficiency(op, ceiling) >= threshold {
        return Ok(DispersiveResolution::BeyondCeiling { ceiling });
    }
    let chi = optimize::bisect(
        |chi| readout_efficiency(op, chi) - threshold,
        0.0,
        ceiling,
        1e-6,
    );
    Ok(DispersiveResolution::Resolved(chi))
}

/// Which tone of the output optical spectrum a frequency belongs to.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ToneLabel {
    Pump,
    SignalQubitGround,
    SignalQubitExcited,
}

/// Tone ledger of the output optical field: the pump at its own frequency
/// and one converted-signal tone per qubit state at
/// `w_pump + w_microwave + chi * sigma_z`. Bookkeeping for plots only.
pub fn readout_spectrum_labels(op: &OperatingPoint, chi: f64) -> Vec<(f64, ToneLabel)> {
    let pump = op.optical_pump().frequency();
    let base = pump + op.microwave().frequency();
    let ground = QubitParams {
        dispersive_shift: chi,
        state: QubitState::Ground,
    };
    let excited = QubitParams {
        dispersive_shift: chi,
        state: QubitState::Excited,
    };
    vec![
        (pump, ToneLabel::Pump),
        (
            base + ground.effective_shift(),
            ToneLabel::SignalQubitGround,
        ),
        (
            base + excited.effective_shift(),
            ToneLabel::SignalQubitExcited,
        ),
    ]
}
