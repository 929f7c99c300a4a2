//! Flat run configuration: every tunable the CLI exposes, in boundary
//! units (Hz, W, s, dimensionless). Defaults are the design operating
//! point; `--set key=value` overrides land here.
//!
//! Angular conversion happens exactly once, inside
//! [`RunConfig::operating_point`].

use std::collections::BTreeMap;
use std::collections::BTreeSet;

use crate::electrooptic::CrystalOptics;
use crate::entanglement::{EntanglementProtocolParams, R0Model, Scheme};
use crate::error::{Error, Result};
use crate::model::{hz_to_angular, mode_from_q, ModeParams, OperatingPoint, PumpDrive};

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    // Transducer.
    pub f_a_hz: f64,
    pub q_a: f64,
    pub ratio_a: f64,
    pub f_b_hz: f64,
    pub q_b: f64,
    pub ratio_b: f64,
    pub g_eo_hz: f64,
    pub delta_p_hz: f64,
    pub power_w: f64,
    /// Zero means the pump mode shares the signal mode's loss budget.
    pub pump_linewidth_hz: f64,

    // Entanglement protocol.
    pub r0_per_s: f64,
    pub attempt_s: f64,
    pub reset_s: f64,
    pub scheme: Scheme,
    pub r0_model: R0Model,
    /// Zero keeps figure runs on the closed forms; nonzero switches the
    /// entanglement figures to Monte Carlo with this many attempts.
    pub attempts: u64,
    pub seed: u64,

    // Sensing and readout.
    pub n_thermal: f64,
    pub delta_hz: f64,
    pub chi_hz: f64,

    // Electro-optics.
    pub stored_energy_j: f64,
    pub refractive_index: f64,
    pub r33_m_per_v: f64,
    pub participation: f64,
    pub loss_tangent: f64,
    pub double_count_dielectric: bool,

    /// Scratch value for the identity sweep target.
    pub x: f64,

    overridden: BTreeSet<String>,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            f_a_hz: 192.43e12,
            q_a: 1e7,
            ratio_a: 2.3,
            f_b_hz: 8.93e9,
            q_b: 1e5,
            ratio_b: 3.4,
            g_eo_hz: 46.75,
            delta_p_hz: 10e6,
            power_w: 140e-6,
            pump_linewidth_hz: 0.0,
            r0_per_s: 1e4,
            attempt_s: 1e-6,
            reset_s: 1e-6,
            scheme: Scheme::Blue,
            r0_model: R0Model::Direct,
            attempts: 0,
            seed: 0x5eed_cafe,
            n_thermal: 0.0,
            delta_hz: 0.0,
            chi_hz: 0.0,
            stored_energy_j: 1.0,
            refractive_index: 2.21,
            r33_m_per_v: 30.8e-12,
            participation: 0.96,
            loss_tangent: 1e-5,
            double_count_dielectric: false,
            x: 0.0,
            overridden: BTreeSet::new(),
        }
    }
}

impl RunConfig {
    /// Apply one `key=value` override.
    pub fn set(&mut self, key: &str, value: &str) -> Result<()> {
        let parse_f64 = || -> Result<f64> {
            value
                .parse::<f64>()
                .map_err(|_| Error::Config(format!("key `{key}`: `{value}` is not a number")))
        };
        match key {
            "scheme" => {
                self.scheme = match value {
                    "blue" => Scheme::Blue,
                    "red" => Scheme::Red,
                    _ => {
                        return Err(Error::Config(format!(
                            "key `scheme`: expected blue|red, got `{value}`"
                        )))
                    }
                };
            }
            "r0_model" => {
                self.r0_model = match value {
                    "direct" => R0Model::Direct,
                    "cooperativity_scaled" => R0Model::CooperativityScaled,
                    _ => {
                        return Err(Error::Config(format!(
                            "key `r0_model`: expected direct|cooperativity_scaled, got `{value}`"
                        )))
                    }
                };
            }
            "attempts" => {
                self.attempts = value.parse::<u64>().map_err(|_| {
                    Error::Config(format!("key `attempts`: `{value}` is not an integer"))
                })?;
            }
            "seed" => {
                self.seed = value.parse::<u64>().map_err(|_| {
                    Error::Config(format!("key `seed`: `{value}` is not an integer"))
                })?;
            }
            "double_count_dielectric" => {
                self.double_count_dielectric = value.parse::<bool>().map_err(|_| {
                    Error::Config(format!(
                        "key `double_count_dielectric`: `{value}` is not a bool"
                    ))
                })?;
            }
            _ => {
                let v = parse_f64()?;
                self.set_f64(key, v)?;
            }
        }
        self.overridden.insert(key.to_string());
        Ok(())
    }

    /// Numeric setter used by sweep axes and `set`.
    pub fn set_f64(&mut self, key: &str, v: f64) -> Result<()> {
        let slot = match key {
            "f_a_hz" => &mut self.f_a_hz,
            "q_a" => &mut self.q_a,
            "ratio_a" => &mut self.ratio_a,
            "f_b_hz" => &mut self.f_b_hz,
            "q_b" => &mut self.q_b,
            "ratio_b" => &mut self.ratio_b,
            "g_eo_hz" => &mut self.g_eo_hz,
            "delta_p_hz" => &mut self.delta_p_hz,
            "power_w" => &mut self.power_w,
            "pump_linewidth_hz" => &mut self.pump_linewidth_hz,
            "r0_per_s" => &mut self.r0_per_s,
            "attempt_s" => &mut self.attempt_s,
            "reset_s" => &mut self.reset_s,
            "n_thermal" => &mut self.n_thermal,
            "delta_hz" => &mut self.delta_hz,
            "chi_hz" => &mut self.chi_hz,
            "stored_energy_j" => &mut self.stored_energy_j,
            "refractive_index" => &mut self.refractive_index,
            "r33_m_per_v" => &mut self.r33_m_per_v,
            "participation" => &mut self.participation,
            "loss_tangent" => &mut self.loss_tangent,
            "x" => &mut self.x,
            _ => return Err(Error::Config(format!("unknown key `{key}`"))),
        };
        *slot = v;
        self.overridden.insert(key.to_string());
        Ok(())
    }

    pub fn is_set(&self, key: &str) -> bool {
        self.overridden.contains(key)
    }

    /// Build the operating point. The pump mode sits one free spectral
    /// range (microwave frequency plus pump detuning) below the signal.
    pub fn operating_point(&self) -> Result<OperatingPoint> {
        let signal = mode_from_q(hz_to_angular(self.f_a_hz), self.q_a, self.ratio_a)?;
        let microwave = mode_from_q(hz_to_angular(self.f_b_hz), self.q_b, self.ratio_b)?;
        let pump_freq = hz_to_angular(self.f_a_hz - self.f_b_hz - self.delta_p_hz);
        let pump_mode = ModeParams::new(pump_freq, hz_to_angular(self.pump_linewidth_hz), 0.0)?;
        OperatingPoint::new(
            signal,
            pump_mode,
            microwave,
            hz_to_angular(self.g_eo_hz),
            PumpDrive::new(self.power_w, hz_to_angular(self.delta_p_hz))?,
        )
    }

    pub fn protocol_params(&self) -> Result<EntanglementProtocolParams> {
        EntanglementProtocolParams::new(self.r0_per_s, self.attempt_s, self.reset_s, self.scheme)
    }

    pub fn crystal_optics(&self) -> Result<CrystalOptics> {
        CrystalOptics::new(self.refractive_index, self.r33_m_per_v)
    }

    /// Canonical key/value view of the resolved configuration, used for
    /// the manifest digest. Deterministic ordering and formatting.
    pub fn digest_map(&self) -> BTreeMap<String, String> {
        let mut m = BTreeMap::new();
        let f = crate::csvout::fmt_float;
        m.insert("f_a_hz".into(), f(self.f_a_hz));
        m.insert("q_a".into(), f(self.q_a));
        m.insert("ratio_a".into(), f(self.ratio_a));
        m.insert("f_b_hz".into(), f(self.f_b_hz));
        m.insert("q_b".into(), f(self.q_b));
        m.insert("ratio_b".into(), f(self.ratio_b));
        m.insert("g_eo_hz".into(), f(self.g_eo_hz));
        m.insert("delta_p_hz".into(), f(self.delta_p_hz));
        m.insert("power_w".into(), f(self.power_w));
        m.insert("pump_linewidth_hz".into(), f(self.pump_linewidth_hz));
        m.insert("r0_per_s".into(), f(self.r0_per_s));
        m.insert("attempt_s".into(), f(self.attempt_s));
        m.insert("reset_s".into(), f(self.reset_s));
        m.insert("scheme".into(), self.scheme.label().into());
        m.insert("r0_model".into(), self.r0_model.label().into());
        m.insert("attempts".into(), self.attempts.to_string());
        m.insert("seed".into(), self.seed.to_string());
        m.insert("n_thermal".into(), f(self.n_thermal));
        m.insert("delta_hz".into(), f(self.delta_hz));
        m.insert("chi_hz".into(), f(self.chi_hz));
        m.insert("stored_energy_j".into(), f(self.stored_energy_j));
        m.insert("refractive_index".into(), f(self.refractive_index));
        m.insert("r33_m_per_v".into(), f(self.r33_m_per_v));
        m.insert("participation".into(), f(self.participation));
        m.insert("loss_tangent".into(), f(self.loss_tangent));
        m.insert(
            "double_count_dielectric".into(),
            self.double_count_dielectric.to_string(),
        );
        m.insert("x".into(), f(self.x));
        m.insert("schema_version".into(), SCHEMA_VERSION.to_string());
        m
    }
}
