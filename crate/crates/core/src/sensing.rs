//! Noise spectral densities for transducer-based microwave measurement:
//! the standard single-quadrature scheme, its quantum-limit and RF floors,
//! and the back-action-evading variant.
//!
//! Half-linewidths `kappa_m = gamma_m / 2` are the working variables here;
//! the convention is configurable (see [`LinewidthConvention`]) because the
//! source formulas never pin the kappa/gamma relation. The standard scheme
//! at detuning `Delta` reads
//!
//! ```text
//! S(Delta) = 2 kappa_b (2 n_T + 1)
//!          + (kappa_b^2 + Delta^2)(kappa_a^2 + Delta^2) / (4 n_p g^2)
//!          + 4 n_p g^2 / (kappa_a^2 + Delta^2)
//! ```
//!
//! whose two pump-dependent terms bound it from below by
//! `S_RF + 2 S_SQL >= S_RF + S_SQL` (arithmetic-geometric mean), with
//! `S_RF = 2 kappa_b (2 n_T + 1)` and `S_SQL = sqrt(kappa_b^2 + Delta^2)`.
//! The pump-optimal value on resonance with no thermal photons is exactly
//! `4 kappa_b`, reached at `4 n_p g^2 = kappa_a^2 kappa_b`.
//!
//! Back-action cancellation removes the last term and leaves
//!
//! ```text
//! S(Delta) = 2 kappa_b (2 n_T + 1)
//!          + (kappa_b^2 + Delta^2)(kappa_a^2 + Delta^2) / (C kappa_a kappa_b^2)
//! ```
//!
//! which crosses below the `S_RF + S_SQL` floor exactly at
//! `C = kappa_a / kappa_b` on resonance and tends to the RF floor as the
//! cooperativity grows.

use crate::converter;
use crate::error::{Error, Result};
use crate::model::OperatingPoint;
use crate::parallel;

/// How the pump strength is specified.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum PumpStrength {
    /// `n_p g_eo^2` in rad^2/s^2.
    CouplingSquared(f64),
    /// Cooperativity; converted through `C = G^2 / (kappa_a kappa_b)`.
    Cooperativity(f64),
}

/// Relation between the stored `kappa` values and a mode's full linewidth.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum LinewidthConvention {
    /// `kappa = gamma / 2` (default).
    #[default]
    HalfLinewidth,
    /// `kappa = gamma`, kept for sensitivity analysis.
    FullLinewidth,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SensingParams {
    kappa_a: f64,
    kappa_b: f64,
    thermal_photons: f64,
    pump: PumpStrength,
}

impl SensingParams {
    pub fn new(
        kappa_a: f64,
        kappa_b: f64,
        thermal_photons: f64,
        pump: PumpStrength,
    ) -> Result<Self> {
        if !(kappa_a > 0.0) || !kappa_a.is_finite() {
            return Err(Error::invalid("kappa_a", kappa_a, "must be > 0"));
        }
        if !(kappa_b > 0.0) || !kappa_b.is_finite() {
            return Err(Error::invalid("kappa_b", kappa_b, "must be > 0"));
        }
        if !(thermal_photons >= 0.0) || !thermal_photons.is_finite() {
            return Err(Error::invalid(
                "thermal_photons",
                thermal_photons,
                "must be >= 0",
            ));
        }
        let strength = match pump {
            PumpStrength::CouplingSquared(x) => x,
            PumpStrength::Cooperativity(c) => c,
        };
        if !(strength >= 0.0) || !strength.is_finite() {
            return Err(Error::invalid("pump_strength", strength, "must be >= 0"));
        }
        Ok(Self {
            kappa_a,
            kappa_b,
            thermal_photons,
            pump,
        })
    }

    /// Derive the parameters from a transducer operating point, with the
    /// pump strength taken from its drive.
    pub fn from_operating_point(
        op: &OperatingPoint,
        thermal_photons: f64,
        convention: LinewidthConvention,
    ) -> Result<Self> {
        let scale = match convention {
            LinewidthConvention::HalfLinewidth => 0.5,
            LinewidthConvention::FullLinewidth => 1.0,
        };
        Self::new(
            scale * op.optical_signal().total_rate(),
            scale * op.microwave().total_rate(),
            thermal_photons,
            PumpStrength::CouplingSquared(converter::pumped_coupling_squared(op)),
        )
    }

    pub fn kappa_a(&self) -> f64 {
        self.kappa_a
    }

    pub fn kappa_b(&self) -> f64 {
        self.kappa_b
    }

    pub fn thermal_photons(&self) -> f64 {
        self.thermal_photons
    }

    /// Pump strength as `n_p g^2` regardless of how it was specified.
    pub fn coupling_squared(&self) -> f64 {
        match self.pump {
            PumpStrength::CouplingSquared(x) => x,
            PumpStrength::Cooperativity(c) => c * self.kappa_a * self.kappa_b,
        }
    }

    /// Pump strength as a cooperativity regardless of how it was specified.
    pub fn cooperativity(&self) -> f64 {
        match self.pump {
            PumpStrength::CouplingSquared(x) => x / (self.kappa_a * self.kappa_b),
            PumpStrength::Cooperativity(c) => c,
        }
    }

    pub fn with_pump(&self, pump: PumpStrength) -> Result<Self> {
        Self::new(self.kappa_a, self.kappa_b, self.thermal_photons, pump)
    }
}

/// Noise density of the standard single-quadrature measurement.
pub fn noise_standard(params: &SensingParams, delta: f64) -> Result<f64> {
    let g2 = params.coupling_squared();
    if g2 == 0.0 {
        return Err(Error::DivisionGuard("noise_standard needs n_p g^2 > 0"));
    }
    let kb2 = params.kappa_b * params.kappa_b + delta * delta;
    let ka2 = params.kappa_a * params.kappa_a + delta * delta;
    let (s_rf, _) = noise_floors(params, delta);
    Ok(s_rf + kb2 * ka2 / (4.0 * g2) + 4.0 * g2 / ka2)
}

/// Noise density of the back-action-evading measurement.
pub fn noise_bae(params: &SensingParams, delta: f64) -> Result<f64> {
    let c = params.cooperativity();
    if c == 0.0 {
        return Err(Error::DivisionGuard("noise_bae needs C > 0"));
    }
    let kb2 = params.kappa_b * params.kappa_b + delta * delta;
    let ka2 = params.kappa_a * params.kappa_a + delta * delta;
    let (s_rf, _) = noise_floors(params, delta);
    Ok(s_rf + kb2 * ka2 / (c * params.kappa_a * params.kappa_b * params.kappa_b))
}

/// The two fundamental floors `(S_RF, S_SQL)`.
pub fn noise_floors(params: &SensingParams, delta: f64) -> (f64, f64) {
    let s_rf = 2.0 * params.kappa_b * (2.0 * params.thermal_photons + 1.0);
    let s_sql = (params.kappa_b * params.kappa_b + delta * delta).sqrt();
    (s_rf, s_sql)
}

/// Minimum of [`noise_standard`] over the pump strength at fixed detuning,
/// located by golden-section search in log pump strength.
pub fn pump_minimized_standard(params: &SensingParams, delta: f64) -> f64 {
    let ka2 = params.kappa_a * params.kappa_a + delta * delta;
    let kb2 = params.kappa_b * params.kappa_b + delta * delta;
    // The optimum sits at 4 g^2 = sqrt(kb2) ka2; bracket it by 1e4 each way.
    let center = (kb2.sqrt() * ka2 / 4.0).ln();
    let span = 1e4f64.ln();
    let (_, min_value) = crate::optimize::golden_section_max(
        |log_g2| {
            let p = params
                .with_pump(PumpStrength::CouplingSquared(log_g2.exp()))
                .expect("positive pump");
            -noise_standard(&p, delta).expect("nonzero pump")
        },
        center - span,
        center + span,
        1e-10,
    );
    -min_value
}

/// One row of the noise-versus-power sweep. Rows whose pump strength is
/// zero (so neither spectrum is defined) carry the guard error instead of
/// values.
#[derive(Debug)]
pub struct NoiseSweepRow {
    pub power_w: f64,
    pub values: Result<NoiseRatios>,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NoiseRatios {
    pub cooperativity: f64,
    pub standard_over_sql: f64,
    pub bae_over_sql: f64,
}

/// Noise densities normalized by the quantum limit across a pump-power
/// grid, with the cooperativity taken from the transducer chain.
pub fn sweep_noise_vs_power(
    op: &OperatingPoint,
    thermal_photons: f64,
    convention: LinewidthConvention,
    powers: &[f64],
    delta: f64,
) -> Result<Vec<NoiseSweepRow>> {
    if powers.is_empty() {
        return Err(Error::Usage("noise sweep needs at least one power".into()));
    }
    let base = SensingParams::from_operating_point(op, thermal_photons, convention)?;
    let rows = parallel::map(powers, |&power_w| {
        let values = (|| {
            let driven = op.with_pump_power(power_w)?;
            let c = converter::cooperativity(&driven);
            let params = base.with_pump(PumpStrength::Cooperativity(c))?;
            let (_, s_sql) = noise_floors(&params, delta);
            Ok(NoiseRatios {
                cooperativity: c,
                standard_over_sql: noise_standard(&params, delta)? / s_sql,
                bae_over_sql: noise_bae(&params, delta)? / s_sql,
            })
        })();
        NoiseSweepRow { power_w, values }
    });
    Ok(rows)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn params(g2: f64) -> SensingParams {
        SensingParams::new(1e8, 1e6, 0.0, PumpStrength::CouplingSquared(g2)).unwrap()
    }

    #[test]
    fn standard_at_stationary_pump_is_four_kappa_b() {
        // 4 n_p g^2 = kappa_a^2 kappa_b makes both pump terms equal
        // kappa_b, so S = 4 kappa_b.
        let p = params(1e22 / 4.0);
        let s = noise_standard(&p, 0.0).unwrap();
        assert!(((s - 4e6) / 4e6).abs() <= 1e-9, "got {s}");
    }

    #[test]
    fn pump_minimum_equals_four_kappa_b() {
        let p = params(1.0);
        let min = pump_minimized_standard(&p, 0.0);
        assert!(
            ((min - 4.0 * p.kappa_b()) / (4.0 * p.kappa_b())).abs() <= 1e-9,
            "got {min}"
        );
    }

    #[test]
    fn thermal_occupation_doubles_rf_floor() {
        let p = SensingParams::new(1e8, 1e6, 0.5, PumpStrength::CouplingSquared(1e20)).unwrap();
        let (s_rf, _) = noise_floors(&p, 0.0);
        assert_eq!(s_rf, 4e6);
        let cold = params(1e20);
        let hot = noise_standard(&p, 0.0).unwrap();
        let base = noise_standard(&cold, 0.0).unwrap();
        assert!((hot - base - 2e6).abs() < 1e-6 * hot);
    }

    #[test]
    fn bae_threshold_identity() {
        // C = kappa_a / kappa_b: S = 2 kappa_b + kappa_a / C = 3 kappa_b,
        // exactly the floor S_RF + S_SQL.
        let p = SensingParams::new(1e8, 1e6, 0.0, PumpStrength::Cooperativity(100.0)).unwrap();
        let s = noise_bae(&p, 0.0).unwrap();
        let (s_rf, s_sql) = noise_floors(&p, 0.0);
        assert!(((s - (s_rf + s_sql)) / s).abs() <= 1e-12, "got {s}");
    }

    #[test]
    fn bae_beats_the_standard_bound_above_threshold() {
        let p = SensingParams::new(1e8, 1e6, 0.0, PumpStrength::Cooperativity(1000.0)).unwrap();
        let s = noise_bae(&p, 0.0).unwrap();
        assert!((s - 2.1e6).abs() <= 1e-9 * s, "got {s}");
        assert!(s < 3.0 * p.kappa_b());
    }

    #[test]
    fn bae_approaches_rf_floor_at_large_cooperativity() {
        let p = SensingParams::new(1e8, 1e6, 0.0, PumpStrength::Cooperativity(1e12)).unwrap();
        let s = noise_bae(&p, 0.0).unwrap();
        let (s_rf, _) = noise_floors(&p, 0.0);
        assert!((s - s_rf) / s_rf < 1e-3);
    }

    #[test]
    fn floors_match_printed_values() {
        let p = params(1e20);
        assert_eq!(noise_floors(&p, 0.0), (2e6, 1e6));
        let (_, s_sql) = noise_floors(&p, 3f64.sqrt() * 1e6);
        assert!((s_sql - 2e6).abs() < 1e-6 * s_sql);
        // S_RF has no detuning dependence.
        assert_eq!(noise_floors(&p, 5e7).0, noise_floors(&p, 0.0).0);
    }

    #[test]
    fn spectra_even_in_detuning() {
        let p = params(1e20);
        for delta in [1e4, 1e6, 1e8] {
            assert_eq!(
                noise_standard(&p, delta).unwrap(),
                noise_standard(&p, -delta).unwrap()
            );
            assert_eq!(
                noise_bae(&p, delta).unwrap(),
                noise_bae(&p, -delta).unwrap()
            );
        }
    }

    #[test]
    fn zero_pump_is_guarded() {
        let p = params(0.0);
        assert!(matches!(
            noise_standard(&p, 0.0),
            Err(Error::DivisionGuard(_))
        ));
        assert!(matches!(noise_bae(&p, 0.0), Err(Error::DivisionGuard(_))));
    }

    #[test]
    fn pump_strength_representations_agree() {
        let by_g2 = SensingParams::new(1e8, 1e6, 0.0, PumpStrength::CouplingSquared(5e15)).unwrap();
        let c = by_g2.cooperativity();
        let by_c = SensingParams::new(1e8, 1e6, 0.0, PumpStrength::Cooperativity(c)).unwrap();
        assert_eq!(by_g2.coupling_squared(), 5e15);
        assert!((by_c.coupling_squared() - 5e15).abs() <= 1e-3);
        assert_eq!(by_c.cooperativity(), c);
    }

    #[test]
    fn convention_scales_linewidths() {
        use crate::model::{mode_from_q, ModeParams, OperatingPoint, PumpDrive};
        use std::f64::consts::TAU;
        let omega_a = TAU * 192.43e12;
        let omega_b = TAU * 8.93e9;
        let op = OperatingPoint::new(
            mode_from_q(omega_a, 1e8, 2.3).unwrap(),
            ModeParams::new(omega_a - omega_b, 0.0, 0.0).unwrap(),
            mode_from_q(omega_b, 1e5, 3.4).unwrap(),
            TAU * 46.75,
            PumpDrive::new(140e-6, TAU * 10e6).unwrap(),
        )
        .unwrap();
        let half =
            SensingParams::from_operating_point(&op, 0.0, LinewidthConvention::HalfLinewidth)
                .unwrap();
        let full =
            SensingParams::from_operating_point(&op, 0.0, LinewidthConvention::FullLinewidth)
                .unwrap();
        assert_eq!(full.kappa_a(), 2.0 * half.kappa_a());
        assert_eq!(full.kappa_b(), 2.0 * half.kappa_b());
    }

    #[test]
    fn noise_sweep_monotone_and_guarded() {
        use crate::model::{mode_from_q, ModeParams, OperatingPoint, PumpDrive};
        use std::f64::consts::TAU;
        let omega_a = TAU * 192.43e12;
        let omega_b = TAU * 8.93e9;
        let op = OperatingPoint::new(
            mode_from_q(omega_a, 1e8, 2.3).unwrap(),
            ModeParams::new(omega_a - omega_b, 0.0, 0.0).unwrap(),
            mode_from_q(omega_b, 1e5, 3.4).unwrap(),
            TAU * 46.75,
            PumpDrive::new(140e-6, TAU * 10e6).unwrap(),
        )
        .unwrap();
        let powers: Vec<f64> = (0..=40).map(|k| k as f64 * 5e-4).collect();
        let rows = sweep_noise_vs_power(&op, 0.0, LinewidthConvention::HalfLinewidth, &powers, 0.0)
            .unwrap();
        assert!(matches!(rows[0].values, Err(Error::DivisionGuard(_))));
        let ratios: Vec<f64> = rows[1..]
            .iter()
            .map(|r| r.values.as_ref().unwrap().bae_over_sql)
            .collect();
        for pair in ratios.windows(2) {
            assert!(pair[1] <= pair[0]);
        }
    }

    #[test]
    fn resonant_floor_crossing_power_is_microwave_q_independent() {
        // On resonance the crossing condition C > kappa_a / kappa_b reads
        // n_p g^2 > kappa_a^2: the kappa_b dependence cancels between the
        // threshold and the cooperativity. Pinned here so a formula change
        // that reintroduces a kappa_b dependence gets flagged.
        use crate::model::{mode_from_q, ModeParams, OperatingPoint, PumpDrive};
        use std::f64::consts::TAU;
        let omega_a = TAU * 192.43e12;
        let omega_b = TAU * 8.93e9;
        let crossing_power = |q_b: f64| {
            let op = OperatingPoint::new(
                mode_from_q(omega_a, 1e8, 2.3).unwrap(),
                ModeParams::new(omega_a - omega_b, 0.0, 0.0).unwrap(),
                mode_from_q(omega_b, q_b, 3.4).unwrap(),
                TAU * 46.75,
                PumpDrive::new(140e-6, TAU * 10e6).unwrap(),
            )
            .unwrap();
            let powers: Vec<f64> = (0..400).map(|k| 1e-9 * 1.1f64.powi(k)).collect();
            let rows =
                sweep_noise_vs_power(&op, 0.0, LinewidthConvention::HalfLinewidth, &powers, 0.0)
                    .unwrap();
            rows.iter()
                .find(|r| r.values.as_ref().is_ok_and(|v| v.bae_over_sql < 3.0))
                .map(|r| r.power_w)
                .expect("grid spans the crossing")
        };
        assert_eq!(crossing_power(1e5), crossing_power(1e6));
    }

    proptest! {
        #[test]
        fn standard_never_beats_combined_floor(
            kappa_a in 1e4f64..1e10,
            ratio in 1.1f64..1e4,
            n_t in 0.0f64..10.0,
            g2_scale in -6.0f64..6.0,
            delta_scale in -3.0f64..3.0,
        ) {
            let kappa_b = kappa_a / ratio;
            let g2 = kappa_a * kappa_a * kappa_b / 4.0 * 10f64.powf(g2_scale);
            let p = SensingParams::new(kappa_a, kappa_b, n_t, PumpStrength::CouplingSquared(g2)).unwrap();
            let delta = kappa_b * 10f64.powf(delta_scale);
            let s = noise_standard(&p, delta).unwrap();
            let (s_rf, s_sql) = noise_floors(&p, delta);
            prop_assert!(s >= (s_rf + s_sql) * (1.0 - 1e-12));
        }
    }
}
