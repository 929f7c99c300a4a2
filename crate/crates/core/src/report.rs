//! Cross-module invariant suite behind the `validate` CLI command.
//!
//! Every check is deterministic (randomized inputs are seeded) and reports
//! its name, the observed value, the expected value, and the tolerance it
//! was held to. The loaded-Q check honors the `double_count_dielectric`
//! configuration flag, so flipping that flag demonstrates which check
//! guards the single-counting rule: that one fails, the others stand.

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::config::RunConfig;
use crate::converter;
use crate::dynamics;
use crate::electrooptic::{
    self, loaded_q_with, CrystalOptics, DielectricCounting, FieldProfile, QBudget,
};
use crate::entanglement;
use crate::error::Result;
use crate::model::{hz_to_angular, ModeParams, OperatingPoint, PumpDrive};
use crate::optimize;
use crate::qed;
use crate::sensing::{self, PumpStrength, SensingParams};

#[derive(Debug, Clone, Serialize)]
pub struct CheckResult {
    pub check: &'static str,
    pub observed: f64,
    pub expected: f64,
    pub tolerance: f64,
    pub pass: bool,
}

impl CheckResult {
    fn measure(check: &'static str, observed: f64, expected: f64, tolerance: f64) -> Self {
        Self {
            check,
            observed,
            expected,
            tolerance,
            pass: (observed - expected).abs() <= tolerance,
        }
    }

    /// Pass when `observed` lies inside `[lo, hi]`; reported with the band
    /// midpoint and half-width.
    fn within(check: &'static str, observed: f64, lo: f64, hi: f64) -> Self {
        Self {
            check,
            observed,
            expected: 0.5 * (lo + hi),
            tolerance: 0.5 * (hi - lo),
            pass: (lo..=hi).contains(&observed),
        }
    }
}

/// Random operating point spanning under- to over-coupling with a
/// cooperativity in [0.01, 2]; unit-order rates keep the oracle runs fast.
fn random_operating_point(rng: &mut ChaCha8Rng) -> OperatingPoint {
    let omega = 1e6;
    let gamma_a0 = rng.gen_range(0.5..2.0);
    let gamma_b0 = rng.gen_range(0.05..0.2);
    let ratio_a = rng.gen_range(0.1..5.0);
    let ratio_b = rng.gen_range(0.1..5.0);
    let signal = ModeParams::new(omega, gamma_a0, ratio_a * gamma_a0).unwrap();
    let pump_mode = ModeParams::new(omega, 0.0, 0.0).unwrap();
    let microwave = ModeParams::new(omega / 10.0, gamma_b0, ratio_b * gamma_b0).unwrap();
    let base = OperatingPoint::new(
        signal,
        pump_mode,
        microwave,
        rng.gen_range(0.01..0.3),
        PumpDrive::new(1.0, 0.0).unwrap(),
    )
    .unwrap();
    let c_target = rng.gen_range(0.01..2.0);
    let c_unit = converter::cooperativity(&base);
    base.with_pump_power(c_target / c_unit).unwrap()
}

fn op_with_cooperativity(cfg: &RunConfig, c: f64) -> Result<OperatingPoint> {
    let base = cfg.operating_point()?;
    let c_at_base = converter::cooperativity(&base);
    base.with_pump_power(cfg.power_w * c / c_at_base)
}

/// Run the full suite. Checks never abort the suite; construction errors
/// would indicate a broken default configuration and do propagate.
pub fn run_validation(cfg: &RunConfig) -> Result<Vec<CheckResult>> {
    let mut results = Vec::new();

    // Loaded-Q budget at the design participation and loss tangent. The
    // double-counting fault flag reroutes this computation and breaks it.
    {
        let counting = if cfg.double_count_dielectric {
            DielectricCounting::Double
        } else {
            DielectricCounting::Single
        };
        let budget = QBudget::new(cfg.participation, cfg.loss_tangent, 1e10)?;
        let observed = loaded_q_with(&budget, counting);
        let expected = 1.0 / (cfg.participation * cfg.loss_tangent);
        results.push(CheckResult::measure(
            "loaded_q_design_budget",
            observed,
            expected,
            2e-3 * expected,
        ));
    }

    // eta = (2.3/3.3)(3.4/4.4) * 4C/(1+C)^2 at C = 0.58.
    {
        let op = op_with_cooperativity(cfg, 0.58)?;
        let eta = converter::efficiency(&op).total_efficiency;
        results.push(CheckResult::measure(
            "efficiency_identity_at_c_0p58",
            eta,
            (2.3 / 3.3) * (3.4 / 4.4) * 4.0 * 0.58 / (1.58 * 1.58),
            1e-9,
        ));
    }

    // Internal efficiency peaks at exactly one for C = 1.
    {
        let op = op_with_cooperativity(cfg, 1.0)?;
        let eta_i = converter::efficiency(&op).internal_efficiency;
        results.push(CheckResult::measure(
            "internal_efficiency_peak",
            eta_i,
            1.0,
            1e-9,
        ));
    }

    // Detuned closed form collapses to the resonant one at zero detuning.
    {
        let op = op_with_cooperativity(cfg, 0.58)?;
        let resonant = converter::efficiency(&op).total_efficiency;
        let detuned = converter::efficiency_detuned(&op, 0.0);
        results.push(CheckResult::measure(
            "detuned_consistency_at_zero",
            (detuned - resonant).abs() / resonant,
            0.0,
            1e-12,
        ));
    }

    // Oracle equivalence, plain conversion.
    {
        let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
        let mut worst: f64 = 0.0;
        for _ in 0..5 {
            let op = random_operating_point(&mut rng);
            let delta = rng.gen_range(-1.0..1.0) * op.microwave().total_rate();
            let drive = dynamics::DriveTone::new(Complex64::new(0.7, -0.2), delta)?;
            let optical = dynamics::DriveTone::new(Complex64::new(0.0, 0.0), delta)?;
            let run = dynamics::integrate(&op, &optical, &drive, 1e6, 1e-9)?;
            let eta_oracle =
                dynamics::steady_conversion_efficiency(&op, &run, &drive).unwrap_or(f64::NAN);
            let eta_closed = converter::efficiency_detuned(&op, delta);
            worst = worst.max(((eta_oracle - eta_closed) / eta_closed).abs());
        }
        results.push(CheckResult::measure(
            "oracle_plain_equivalence",
            worst,
            0.0,
            1e-6,
        ));
    }

    // Oracle equivalence, dispersive readout.
    {
        let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed ^ 0x9e3779b97f4a7c15);
        let mut worst: f64 = 0.0;
        for _ in 0..5 {
            let op = random_operating_point(&mut rng);
            let chi = rng.gen_range(-10.0..10.0) * op.microwave().total_rate();
            let drive = dynamics::DriveTone::new(Complex64::new(0.4, 0.1), 0.0)?;
            let run = dynamics::integrate_dispersive(&op, chi, &drive, 1e6, 1e-9)?;
            let a_ss = run.steady_state_a.unwrap_or(Complex64::new(f64::NAN, 0.0));
            let eta_oracle = op.optical_signal().coupling_rate() * a_ss.norm_sqr()
                / drive.amplitude().norm_sqr();
            let eta_closed = qed::readout_efficiency(&op, chi);
            worst = worst.max(((eta_oracle - eta_closed) / eta_closed).abs());
        }
        results.push(CheckResult::measure(
            "oracle_dispersive_equivalence",
            worst,
            0.0,
            1e-6,
        ));
    }

    // Blue-scheme probability classes partition unity.
    {
        let mut worst: f64 = 0.0;
        for k in 0..=500 {
            let x = 0.01 * k as f64;
            let params = entanglement::EntanglementProtocolParams::new(
                x / cfg.attempt_s,
                cfg.attempt_s,
                cfg.reset_s,
                entanglement::Scheme::Blue,
            )?;
            let p = entanglement::blue_sideband(&params).probabilities;
            let total = p["p0"] * p["p0"]
                + p["p10"]
                + p["p01"]
                + p["p11"]
                + p["p_multi_single"]
                + p["p_single_multi"]
                + p["p_multi_multi"];
            worst = worst.max((total - 1.0).abs());
        }
        results.push(CheckResult::measure(
            "blue_partition_unity",
            worst,
            0.0,
            1e-12,
        ));
    }

    // Red fidelity dominates blue pointwise on (0, 2].
    {
        let mut worst_violation: f64 = 0.0;
        for k in 1..=200 {
            let x = 0.01 * k as f64;
            let blue = entanglement::EntanglementProtocolParams::new(
                x / cfg.attempt_s,
                cfg.attempt_s,
                cfg.reset_s,
                entanglement::Scheme::Blue,
            )?;
            let red = entanglement::EntanglementProtocolParams::new(
                x / cfg.attempt_s,
                cfg.attempt_s,
                cfg.reset_s,
                entanglement::Scheme::Red,
            )?;
            let diff = entanglement::blue_sideband(&blue).fidelity
                - entanglement::red_sideband(&red).fidelity;
            worst_violation = worst_violation.max(diff);
        }
        results.push(CheckResult::measure(
            "red_fidelity_dominates_blue",
            worst_violation.max(0.0),
            0.0,
            1e-15,
        ));
    }

    // Standard-scheme noise never beats the combined floor.
    {
        let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed ^ 0x51ab);
        let mut worst_violation: f64 = 0.0;
        for _ in 0..1000 {
            let kappa_a = 10f64.powf(rng.gen_range(4.0..10.0));
            let kappa_b = kappa_a / 10f64.powf(rng.gen_range(0.1..4.0));
            let g2 = kappa_a * kappa_a * kappa_b / 4.0 * 10f64.powf(rng.gen_range(-6.0..6.0));
            let n_t = rng.gen_range(0.0..10.0);
            let params =
                SensingParams::new(kappa_a, kappa_b, n_t, PumpStrength::CouplingSquared(g2))?;
            let delta = kappa_b * 10f64.powf(rng.gen_range(-3.0..3.0));
            let s = sensing::noise_standard(&params, delta)?;
            let (s_rf, s_sql) = sensing::noise_floors(&params, delta);
            worst_violation = worst_violation.max((s_rf + s_sql - s) / s);
        }
        results.push(CheckResult::measure(
            "noise_floor_inequality",
            worst_violation.max(0.0),
            0.0,
            1e-12,
        ));
    }

    // Pump-minimized standard noise equals 4 kappa_b on resonance.
    {
        let params = SensingParams::new(1e8, 1e6, 0.0, PumpStrength::CouplingSquared(1.0))?;
        let min = sensing::pump_minimized_standard(&params, 0.0);
        results.push(CheckResult::measure(
            "pump_minimized_standard_noise",
            min / (4.0 * params.kappa_b()),
            1.0,
            1e-9,
        ));
    }

    // The back-action-evading spectrum crosses the combined floor at
    // C = kappa_a / kappa_b.
    {
        let (kappa_a, kappa_b) = (1e8, 1e6);
        let floor = 3.0 * kappa_b;
        let crossing = optimize::bisect(
            |log_c| {
                let params = SensingParams::new(
                    kappa_a,
                    kappa_b,
                    0.0,
                    PumpStrength::Cooperativity(log_c.exp()),
                )
                .expect("valid");
                sensing::noise_bae(&params, 0.0).expect("C > 0") - floor
            },
            (1.0f64).ln(),
            (1e6f64).ln(),
            1e-12,
        )
        .exp();
        results.push(CheckResult::measure(
            "bae_floor_crossing",
            crossing / (kappa_a / kappa_b),
            1.0,
            1e-9,
        ));
    }

    // Cooperativity-optimal coupling sits just under critical coupling.
    {
        let op = cfg.operating_point()?;
        let (ratio, _) = converter::optimal_coupling_ratio(
            &op,
            0.0,
            6.0,
            converter::CouplingObjective::Cooperativity,
        )?;
        results.push(CheckResult::within(
            "cooperativity_optimal_coupling",
            ratio,
            0.6,
            0.8,
        ));
    }

    // Pump-photon optimum shifted above critical coupling by the pump
    // detuning.
    {
        let op = cfg.operating_point()?;
        let gamma_a0 = op.optical_signal().intrinsic_rate();
        let delta_p = op.pump().detuning();
        let expected = (1.0 + 4.0 * delta_p * delta_p / (gamma_a0 * gamma_a0)).sqrt();
        let (ratio, _) = converter::optimal_coupling_ratio(
            &op,
            0.0,
            6.0,
            converter::CouplingObjective::PumpPhotons,
        )?;
        results.push(CheckResult::measure(
            "pump_photon_optimal_coupling",
            ratio / expected,
            1.0,
            1e-3,
        ));
    }

    // Readout half-width identity chi_1/2 = gamma_b (1 + C) / 2.
    {
        let op = op_with_cooperativity(cfg, 0.58)?;
        let c = converter::cooperativity(&op);
        let expected = 0.5 * op.microwave().total_rate() * (1.0 + c);
        let eta0 = qed::readout_efficiency(&op, 0.0);
        let observed = match qed::dispersive_resolution(&op, 0.5 * eta0)? {
            qed::DispersiveResolution::Resolved(chi) => chi,
            qed::DispersiveResolution::BeyondCeiling { .. } => f64::NAN,
        };
        results.push(CheckResult::measure(
            "readout_halfwidth_identity",
            observed / expected,
            1.0,
            0.01,
        ));
    }

    // Electro-optic prefactor against the hand-evaluated uniform profile.
    {
        let profile = FieldProfile::from_fn(|_| 1e10, 256, cfg.stored_energy_j)?;
        let optics = CrystalOptics::new(cfg.refractive_index, cfg.r33_m_per_v)?;
        let op_freq = hz_to_angular(cfg.f_a_hz);
        let g = electrooptic::g_eo_from_profile(
            &profile,
            &optics,
            op_freq,
            op_freq,
            hz_to_angular(cfg.f_b_hz),
        )?;
        results.push(CheckResult::measure(
            "geo_uniform_profile",
            g.magnitude / hz_to_angular(88.0),
            1.0,
            0.01,
        ));
    }

    Ok(results)
}

/// Render the report as a JSON array (machine-readable contract of the
/// `validate` command).
pub fn render_json(results: &[CheckResult]) -> String {
    serde_json::to_string_pretty(results).expect("report serializes")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn fresh_configuration_passes_everything() {
        let results = run_validation(&RunConfig::default()).unwrap();
        assert!(results.len() >= 12);
        for r in &results {
            assert!(
                r.pass,
                "{} failed: observed {}, expected {} +- {}",
                r.check, r.observed, r.expected, r.tolerance
            );
        }
    }

    #[test]
    fn double_counting_fault_breaks_only_the_loaded_q_check() {
        let mut cfg = RunConfig::default();
        cfg.set("double_count_dielectric", "true").unwrap();
        let results = run_validation(&cfg).unwrap();
        for r in &results {
            if r.check == "loaded_q_design_budget" {
                assert!(!r.pass, "fault flag should break the loaded-Q check");
            } else {
                assert!(r.pass, "{} unexpectedly failed", r.check);
            }
        }
    }

    #[test]
    fn report_is_json_with_complete_records() {
        let results = run_validation(&RunConfig::default()).unwrap();
        let json = render_json(&results);
        let parsed: serde_json::Value = serde_json::from_str(&json).unwrap();
        let array = parsed.as_array().unwrap();
        assert_eq!(array.len(), results.len());
        for item in array {
            assert!(item.get("check").is_some());
            assert!(item.get("observed").is_some());
            assert!(item.get("expected").is_some());
            assert!(item.get("tolerance").is_some());
            assert!(item.get("pass").is_some());
        }
    }
}
