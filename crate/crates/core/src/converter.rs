//! Steady-state transduction chain: intracavity pump photon number,
//! cooperativity, conversion efficiency on and off resonance, bandwidth,
//! and the coupling/power sweeps built on them.
//!
//! # Closed forms
//!
//! The intracavity pump amplitude under a drive of power `P` detuned by
//! `delta_p` from the pump mode is
//!
//! ```text
//! alpha = sqrt(gamma_ac) A_in / (i delta_p - gamma_a / 2),
//! |A_in|^2 = P / (hbar w_p)
//! ```
//!
//! so the pump photon number is
//! `n_p = gamma_ac (P / hbar w_p) / (delta_p^2 + (gamma_a/2)^2)`.
//! The pump mode is assumed to share the signal mode's loss budget unless
//! the operating point carries an explicit pump-mode linewidth.
//!
//! The pump-enhanced coupling is `G^2 = n_p g_eo^2`, the cooperativity
//! `C = 4 G^2 / (gamma_a gamma_b)`, the internal efficiency
//! `eta_i = 4C / (1 + C)^2` (unity at `C = 1`), and the total efficiency
//! multiplies in both extraction ratios:
//! `eta = (gamma_ac / gamma_a)(gamma_bc / gamma_b) eta_i`.
//!
//! # Detuned efficiency: derivation
//!
//! For inputs detuned by the same `Delta` from both resonances (the
//! conversion is frequency-translating, so a detuned microwave input maps
//! to an equally detuned optical output), write the coupled amplitude
//! equations in the co-rotating frame of the drives:
//!
//! ```text
//! da/dt = (i Delta - gamma_a/2) a + i G b - sqrt(gamma_ac) A_in
//! db/dt = (i Delta - gamma_b/2) b + i G a - sqrt(gamma_bc) B_in
//! ```
//!
//! Setting the derivatives to zero with only the microwave drive on
//! (`A_in = 0`) and `D_m = -i Delta + gamma_m / 2`:
//!
//! ```text
//! a_ss = -i G sqrt(gamma_bc) B_in / (D_a D_b + G^2)
//! ```
//!
//! The emitted optical flux is `|sqrt(gamma_ac) a_ss|^2`, hence
//!
//! ```text
//! eta(Delta) = gamma_ac gamma_bc G^2 / |D_a D_b + G^2|^2
//! ```
//!
//! which reduces algebraically to the resonant expression at `Delta = 0`
//! and is symmetric under exchanging the optical and microwave roles at
//! fixed `G` (reciprocity). The time-domain integrator in [`crate::dynamics`]
//! gates this closed form independently.

use num_complex::Complex64;

use crate::constants::REDUCED_PLANCK;
use crate::error::{Error, Result};
use crate::model::OperatingPoint;
use crate::optimize;
use crate::parallel;

/// Everything the resonant steady state yields in one evaluation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ConversionResult {
    /// Intracavity pump photon number `n_p`.
    pub pump_photons: f64,
    /// Cooperativity `C`.
    pub cooperativity: f64,
    /// Internal efficiency `4C / (1 + C)^2`.
    pub internal_efficiency: f64,
    /// Total efficiency including both extraction ratios.
    pub total_efficiency: f64,
}

/// Intracavity pump photon number for the operating point's drive.
pub fn pump_photon_number(op: &OperatingPoint) -> f64 {
    let drive_flux = op.pump().power() / (REDUCED_PLANCK * op.optical_pump().frequency());
    let half_width = 0.5 * op.pump_mode_total_rate();
    let detuning = op.pump().detuning();
    op.optical_signal().coupling_rate() * drive_flux
        / (detuning * detuning + half_width * half_width)
}

/// Pump-enhanced coupling squared, `G^2 = n_p g_eo^2` (rad^2/s^2).
pub fn pumped_coupling_squared(op: &OperatingPoint) -> f64 {
    pump_photon_number(op) * op.g_eo() * op.g_eo()
}

/// Cooperativity `C = 4 n_p g_eo^2 / (gamma_a gamma_b)`. Zero linewidths
/// are rejected when the operating point is constructed, so this is total.
pub fn cooperativity(op: &OperatingPoint) -> f64 {
    4.0 * pumped_coupling_squared(op)
        / (op.optical_signal().total_rate() * op.microwave().total_rate())
}

/// Resonant steady-state conversion figures.
pub fn efficiency(op: &OperatingPoint) -> ConversionResult {
    let pump_photons = pump_photon_number(op);
    let c = 4.0 * pump_photons * op.g_eo() * op.g_eo()
        / (op.optical_signal().total_rate() * op.microwave().total_rate());
    let internal = 4.0 * c / ((1.0 + c) * (1.0 + c));
    let total =
        op.optical_signal().extraction_ratio() * op.microwave().extraction_ratio() * internal;
    ConversionResult {
        pump_photons,
        cooperativity: c,
        internal_efficiency: internal,
        total_efficiency: total,
    }
}

/// The detuned closed form as a pure function of the rates. Split out so
/// the reciprocity property can be checked with `G` held fixed.
pub fn detuned_efficiency_from_rates(
    coupling_a: f64,
    total_a: f64,
    coupling_b: f64,
    total_b: f64,
    pumped_coupling_sq: f64,
    delta: f64,
) -> f64 {
    let d_a = Complex64::new(0.5 * total_a, -delta);
    let d_b = Complex64::new(0.5 * total_b, -delta);
    let denom = d_a * d_b + pumped_coupling_sq;
    coupling_a * coupling_b * pumped_coupling_sq / denom.norm_sqr()
}

/// Conversion efficiency for inputs detuned by `delta` (rad/s) from both
/// resonances. Reduces to [`efficiency`] at `delta = 0`.
pub fn efficiency_detuned(op: &OperatingPoint, delta: f64) -> f64 {
    detuned_efficiency_from_rates(
        op.optical_signal().coupling_rate(),
        op.optical_signal().total_rate(),
        op.microwave().coupling_rate(),
        op.microwave().total_rate(),
        pumped_coupling_squared(op),
        delta,
    )
}

/// Full width at half maximum of `eta(Delta)`, found by bracketing and
/// bisection on each side of `Delta = 0` to 1e-9 relative tolerance.
pub fn bandwidth(op: &OperatingPoint) -> Result<f64> {
    let peak = efficiency_detuned(op, 0.0);
    if !(peak > 0.0) {
        return Err(Error::UndefinedBandwidth);
    }
    let half = 0.5 * peak;
    let scale = op
        .microwave()
        .total_rate()
        .min(op.optical_signal().total_rate());
    let half_crossing = |side: f64| -> f64 {
        // Expand until eta drops below half peak, then bisect the bracket.
        let mut hi = 0.5 * scale;
        for _ in 0..200 {
            if efficiency_detuned(op, side * hi) < half {
                break;
            }
            hi *= 2.0;
        }
        optimize::bisect(|d| efficiency_detuned(op, side * d) - half, 0.0, hi, 1e-9)
    };
    Ok(half_crossing(1.0) + half_crossing(-1.0))
}

/// One row of the optical-coupling sweep.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CouplingSweepRow {
    pub ratio: f64,
    pub pump_photons: f64,
    pub cooperativity: f64,
    pub efficiency: f64,
}

/// Evaluate the conversion chain across external-coupling ratios
/// `gamma_ac / gamma_a0`, everything else fixed. Rows come back in input
/// order regardless of how the evaluation is scheduled.
pub fn sweep_optical_coupling(
    base: &OperatingPoint,
    ratios: &[f64],
) -> Result<Vec<CouplingSweepRow>> {
    if ratios.is_empty() {
        return Err(Error::Usage(
            "coupling sweep needs at least one ratio".into(),
        ));
    }
    for &r in ratios {
        if !(r >= 0.0) || !r.is_finite() {
            return Err(Error::invalid("ratio", r, "must be >= 0"));
        }
    }
    let rows = parallel::map(ratios, |&ratio| {
        let op = base
            .with_signal_coupling_ratio(ratio)
            .expect("ratio validated above");
        let result = efficiency(&op);
        CouplingSweepRow {
            ratio,
            pump_photons: result.pump_photons,
            cooperativity: result.cooperativity,
            efficiency: result.total_efficiency,
        }
    });
    Ok(rows)
}

/// One row of the pump-power sweep.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PowerSweepRow {
    pub power_w: f64,
    pub pump_photons: f64,
    pub cooperativity: f64,
    pub efficiency: f64,
}

/// Evaluate the conversion chain across pump powers (W).
pub fn sweep_pump_power(base: &OperatingPoint, powers: &[f64]) -> Result<Vec<PowerSweepRow>> {
    if powers.is_empty() {
        return Err(Error::Usage("power sweep needs at least one power".into()));
    }
    for &p in powers {
        if !(p >= 0.0) || !p.is_finite() {
            return Err(Error::invalid("power", p, "must be >= 0"));
        }
    }
    let rows = parallel::map(powers, |&power_w| {
        let op = base
            .with_pump_power(power_w)
            .expect("power validated above");
        let result = efficiency(&op);
        PowerSweepRow {
            power_w,
            pump_photons: result.pump_photons,
            cooperativity: result.cooperativity,
            efficiency: result.total_efficiency,
        }
    });
    Ok(rows)
}

/// Objective for [`optimal_coupling_ratio`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CouplingObjective {
    PumpPhotons,
    Cooperativity,
    Efficiency,
}

/// Grid scan plus golden-section refinement of the chosen figure of merit
/// over the signal-mode coupling ratio. Returns `(ratio, value)`.
pub fn optimal_coupling_ratio(
    base: &OperatingPoint,
    lo: f64,
    hi: f64,
    objective: CouplingObjective,
) -> Result<(f64, f64)> {
    if !(lo >= 0.0 && hi > lo) {
        return Err(Error::invalid("ratio range", hi - lo, "needs 0 <= lo < hi"));
    }
    let eval = |ratio: f64| {
        let op = base
            .with_signal_coupling_ratio(ratio)
            .expect("range validated");
        match objective {
            CouplingObjective::PumpPhotons => pump_photon_number(&op),
            CouplingObjective::Cooperativity => cooperativity(&op),
            CouplingObjective::Efficiency => efficiency(&op).total_efficiency,
        }
    };
    Ok(optimize::grid_then_golden_max(eval, lo, hi, 512, 1e-4))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{mode_from_q, ModeParams, OperatingPoint, PumpDrive};
    use proptest::prelude::*;
    use std::f64::consts::TAU;

    /// Design-point transducer: optical Q 1e7 at 192.43 THz, microwave Q
    /// 1e5 at 8.93 GHz with 3.4x output coupling, g_eo = 2 pi x 46.75 Hz,
    /// pump detuned by 2 pi x 10 MHz.
    fn design_point(ratio_a: f64, power_w: f64) -> OperatingPoint {
        let omega_a = TAU * 192.43e12;
        let omega_b = TAU * 8.93e9;
        let delta_p = TAU * 10e6;
        let signal = mode_from_q(omega_a, 1e7, ratio_a).unwrap();
        let pump_mode = ModeParams::new(omega_a - (omega_b + delta_p), 0.0, 0.0).unwrap();
        let microwave = mode_from_q(omega_b, 1e5, 3.4).unwrap();
        OperatingPoint::new(
            signal,
            pump_mode,
            microwave,
            TAU * 46.75,
            PumpDrive::new(power_w, delta_p).unwrap(),
        )
        .unwrap()
    }

    /// Operating point with prescribed raw rates and a pump power chosen so
    /// the cooperativity comes out at `target_c`.
    fn op_with_cooperativity(ratio_a: f64, ratio_b: f64, target_c: f64) -> OperatingPoint {
        let base = {
            let omega_a = TAU * 192.43e12;
            let omega_b = TAU * 8.93e9;
            let signal = mode_from_q(omega_a, 1e7, ratio_a).unwrap();
            let pump_mode = ModeParams::new(omega_a - omega_b, 0.0, 0.0).unwrap();
            let microwave = mode_from_q(omega_b, 1e5, ratio_b).unwrap();
            OperatingPoint::new(
                signal,
                pump_mode,
                microwave,
                TAU * 46.75,
                PumpDrive::new(1.0, TAU * 10e6).unwrap(),
            )
            .unwrap()
        };
        let c_at_unit_power = cooperativity(&base);
        base.with_pump_power(target_c / c_at_unit_power).unwrap()
    }

    #[test]
    fn no_drive_no_pump_photons() {
        let op = design_point(2.3, 0.0);
        assert_eq!(pump_photon_number(&op), 0.0);
        assert_eq!(cooperativity(&op), 0.0);
        assert_eq!(efficiency(&op).total_efficiency, 0.0);
    }

    #[test]
    fn pump_photon_number_hand_value() {
        // gamma_ac = 1e8, gamma_a = 2e8, resonant drive, flux 1e15 /s:
        // n_p = 1e8 * 1e15 / (1e8)^2 = 1e7.
        let omega = 1e15;
        let signal = ModeParams::new(omega, 1e8, 1e8).unwrap();
        let pump_mode = ModeParams::new(omega, 0.0, 0.0).unwrap();
        let microwave = ModeParams::new(1e10, 1e6, 1e6).unwrap();
        let power = 1e15 * REDUCED_PLANCK * omega;
        let op = OperatingPoint::new(
            signal,
            pump_mode,
            microwave,
            100.0,
            PumpDrive::new(power, 0.0).unwrap(),
        )
        .unwrap();
        let n_p = pump_photon_number(&op);
        assert!(((n_p - 1e7) / 1e7).abs() < 1e-12, "got {n_p}");
    }

    #[test]
    fn pump_photon_number_linear_in_power() {
        let op = design_point(2.3, 140e-6);
        let doubled = op.with_pump_power(2.0 * 140e-6).unwrap();
        assert_eq!(pump_photon_number(&doubled), 2.0 * pump_photon_number(&op));
    }

    #[test]
    fn cooperativity_hand_value() {
        // n_p = 1e7, g = 300, gamma_a = 4e8, gamma_b = 2e6 -> C = 4.5e-3.
        let omega = 1e15;
        let signal = ModeParams::new(omega, 2e8, 2e8).unwrap();
        let pump_mode = ModeParams::new(omega, 0.0, 0.0).unwrap();
        let microwave = ModeParams::new(1e10, 1e6, 1e6).unwrap();
        let power = 2e15 * REDUCED_PLANCK * omega; // n_p = 2e8*2e15/(2e8)^2 = 1e7
        let op = OperatingPoint::new(
            signal,
            pump_mode,
            microwave,
            300.0,
            PumpDrive::new(power, 0.0).unwrap(),
        )
        .unwrap();
        assert!((pump_photon_number(&op) - 1e7).abs() < 1.0);
        let c = cooperativity(&op);
        assert!((c - 4.5e-3).abs() < 1e-5, "got {c}");
    }

    #[test]
    fn zero_coupling_means_zero_cooperativity() {
        let mut_op = {
            let omega = 1e15;
            let signal = ModeParams::new(omega, 1e8, 1e8).unwrap();
            let pump_mode = ModeParams::new(omega, 0.0, 0.0).unwrap();
            let microwave = ModeParams::new(1e10, 1e6, 1e6).unwrap();
            OperatingPoint::new(
                signal,
                pump_mode,
                microwave,
                0.0,
                PumpDrive::new(1e-3, 0.0).unwrap(),
            )
            .unwrap()
        };
        assert_eq!(cooperativity(&mut_op), 0.0);
    }

    #[test]
    fn unity_internal_efficiency_at_matched_cooperativity() {
        // C = 1 with both extraction ratios 1 gives eta = 1. Lossless
        // extraction needs intrinsic rates that vanish next to coupling.
        let omega = 1e15;
        let signal = ModeParams::new(omega, 1e-4, 1e8).unwrap();
        let pump_mode = ModeParams::new(omega, 0.0, 0.0).unwrap();
        let microwave = ModeParams::new(1e10, 1e-8, 1e6).unwrap();
        let base = OperatingPoint::new(
            signal,
            pump_mode,
            microwave,
            500.0,
            PumpDrive::new(1.0, 0.0).unwrap(),
        )
        .unwrap();
        let op = base.with_pump_power(1.0 / cooperativity(&base)).unwrap();
        let result = efficiency(&op);
        assert!((result.cooperativity - 1.0).abs() < 1e-9);
        assert!((result.total_efficiency - 1.0).abs() < 1e-9);
    }

    #[test]
    fn design_point_efficiency_identity() {
        // C = 0.58 with ratios 2.3 and 3.4:
        // eta = (2.3/3.3)(3.4/4.4) * 4 * 0.58 / 1.58^2 = 0.5005.
        let op = op_with_cooperativity(2.3, 3.4, 0.58);
        let result = efficiency(&op);
        assert!((result.cooperativity - 0.58).abs() < 1e-12);
        assert!(
            (result.total_efficiency - 0.5005).abs() < 0.002,
            "got {}",
            result.total_efficiency
        );
    }

    #[test]
    fn detuned_matches_resonant_at_zero() {
        let op = op_with_cooperativity(2.3, 3.4, 0.58);
        let resonant = efficiency(&op).total_efficiency;
        let detuned = efficiency_detuned(&op, 0.0);
        assert!(((detuned - resonant) / resonant).abs() <= 1e-12);
    }

    #[test]
    fn detuned_tail_decays_monotonically() {
        let op = op_with_cooperativity(2.3, 3.4, 0.58);
        let width = op.microwave().total_rate() + op.optical_signal().total_rate();
        let mut last = efficiency_detuned(&op, width);
        for k in 2..40 {
            let eta = efficiency_detuned(&op, k as f64 * width);
            assert!(eta < last);
            last = eta;
        }
        assert!(last < 1e-6);
    }

    #[test]
    fn narrowband_half_width_identity() {
        // gamma_a >> gamma_b: FWHM approaches gamma_b (1 + C).
        let op = op_with_cooperativity(2.3, 3.4, 0.58);
        let expected = op.microwave().total_rate() * 1.58;
        let fwhm = bandwidth(&op).unwrap();
        assert!(
            ((fwhm - expected) / expected).abs() < 0.05,
            "fwhm {fwhm}, expected {expected}"
        );
    }

    #[test]
    fn bandwidth_single_lorentzian_limit() {
        let op = op_with_cooperativity(2.3, 3.4, 1e-4);
        let fwhm = bandwidth(&op).unwrap();
        let gamma_b = op.microwave().total_rate();
        assert!(((fwhm - gamma_b) / gamma_b).abs() < 0.01, "got {fwhm}");
    }

    #[test]
    fn bandwidth_half_max_points_symmetric() {
        let op = op_with_cooperativity(2.3, 3.4, 0.58);
        let half = 0.5 * efficiency_detuned(&op, 0.0);
        let right = optimize::bisect(
            |d| efficiency_detuned(&op, d) - half,
            0.0,
            10.0 * op.microwave().total_rate(),
            1e-12,
        );
        let left = optimize::bisect(
            |d| efficiency_detuned(&op, -d) - half,
            0.0,
            10.0 * op.microwave().total_rate(),
            1e-12,
        );
        assert!(((right - left) / right).abs() <= 1e-9);
    }

    #[test]
    fn bandwidth_undefined_without_pump() {
        let op = design_point(2.3, 0.0);
        assert!(matches!(bandwidth(&op), Err(Error::UndefinedBandwidth)));
    }

    #[test]
    fn pump_photon_optimum_detuning_shifted() {
        // Stationary point of n_p over the coupling ratio sits at
        // sqrt(1 + 4 delta_p^2 / gamma_a0^2); critical coupling only when
        // the pump drive is resonant.
        let op = design_point(1.0, 140e-6);
        let gamma_a0 = op.optical_signal().intrinsic_rate();
        let delta_p = op.pump().detuning();
        let expected = (1.0 + 4.0 * delta_p * delta_p / (gamma_a0 * gamma_a0)).sqrt();
        let (ratio, _) =
            optimal_coupling_ratio(&op, 0.0, 6.0, CouplingObjective::PumpPhotons).unwrap();
        assert!(
            ((ratio - expected) / expected).abs() < 1e-3,
            "ratio {ratio}, expected {expected}"
        );

        let resonant = {
            let mut o = op;
            o = OperatingPoint::new(
                *o.optical_signal(),
                *o.optical_pump(),
                *o.microwave(),
                o.g_eo(),
                PumpDrive::new(140e-6, 0.0).unwrap(),
            )
            .unwrap();
            o
        };
        let (ratio0, _) =
            optimal_coupling_ratio(&resonant, 0.0, 6.0, CouplingObjective::PumpPhotons).unwrap();
        assert!((ratio0 - 1.0).abs() < 1e-3, "got {ratio0}");
    }

    #[test]
    fn cooperativity_optimum_undercoupled() {
        let op = design_point(1.0, 140e-6);
        let (ratio, _) =
            optimal_coupling_ratio(&op, 0.0, 6.0, CouplingObjective::Cooperativity).unwrap();
        assert!(
            (0.6..=0.8).contains(&ratio),
            "cooperativity optimum at ratio {ratio}"
        );
    }

    #[test]
    fn coupling_sweep_zero_ratio_row() {
        let op = design_point(1.0, 140e-6);
        let rows = sweep_optical_coupling(&op, &[0.0, 1.0]).unwrap();
        assert_eq!(rows[0].pump_photons, 0.0);
        assert_eq!(rows[0].cooperativity, 0.0);
        assert_eq!(rows[0].efficiency, 0.0);
        assert!(rows[1].cooperativity > 0.0);
    }

    #[test]
    fn coupling_sweep_rejects_bad_input() {
        let op = design_point(1.0, 140e-6);
        assert!(sweep_optical_coupling(&op, &[]).is_err());
        assert!(sweep_optical_coupling(&op, &[0.5, -1.0]).is_err());
    }

    #[test]
    fn power_sweep_cooperativity_exactly_linear() {
        let op = design_point(2.3, 1.0);
        let powers: Vec<f64> = (1..=8).map(|k| k as f64 * 20e-6).collect();
        let rows = sweep_pump_power(&op, &powers).unwrap();
        let slope = rows[0].cooperativity / rows[0].power_w;
        for row in &rows {
            let ratio = row.cooperativity / row.power_w;
            assert!(((ratio - slope) / slope).abs() <= 1e-12);
        }
    }

    #[test]
    fn power_sweep_efficiency_monotone_below_matching() {
        let base = op_with_cooperativity(2.3, 3.4, 1.0);
        let p_match = base.pump().power();
        let powers: Vec<f64> = (0..=20).map(|k| k as f64 * p_match / 20.0).collect();
        let rows = sweep_pump_power(&base, &powers).unwrap();
        assert_eq!(rows[0].power_w, 0.0);
        assert_eq!(rows[0].efficiency, 0.0);
        for pair in rows.windows(2) {
            assert!(pair[1].efficiency >= pair[0].efficiency);
            assert!(pair[1].cooperativity <= 1.0 + 1e-9);
        }
    }

    proptest! {
        #[test]
        fn reciprocity_of_detuned_closed_form(
            ca in 1e5f64..1e9,
            ia in 1e5f64..1e9,
            cb in 1e3f64..1e7,
            ib in 1e3f64..1e7,
            g2 in 1e8f64..1e16,
            delta_frac in -3.0f64..3.0,
        ) {
            let (ga, gb) = (ca + ia, cb + ib);
            let delta = delta_frac * gb;
            let forward = detuned_efficiency_from_rates(ca, ga, cb, gb, g2, delta);
            let swapped = detuned_efficiency_from_rates(cb, gb, ca, ga, g2, delta);
            prop_assert!((forward - swapped).abs() <= 1e-12 * forward.abs().max(swapped.abs()));
        }

        #[test]
        fn internal_efficiency_symmetric_and_peaked(c in 1e-6f64..1e6) {
            let eta = |c: f64| 4.0 * c / ((1.0 + c) * (1.0 + c));
            prop_assert!((eta(c) - eta(1.0 / c)).abs() <= 1e-12 * eta(c).max(1e-300));
            prop_assert!(eta(c) <= 1.0);
        }

        #[test]
        fn efficiency_bounded_by_extraction(
            ratio_a in 0.01f64..10.0,
            ratio_b in 0.01f64..10.0,
            c_target in 1e-3f64..5.0,
        ) {
            let op = op_with_cooperativity(ratio_a, ratio_b, c_target);
            let result = efficiency(&op);
            let bound = op.optical_signal().extraction_ratio()
                * op.microwave().extraction_ratio();
            prop_assert!(result.total_efficiency <= bound * (1.0 + 1e-12));
            prop_assert!(result.internal_efficiency <= 1.0 + 1e-12);
            prop_assert!(result.total_efficiency <= result.internal_efficiency + 1e-12);
        }
    }
}
