//! Declarative parameter sweeps: a TOML spec names a registered target
//! quantity, fixes any configuration keys, and describes one or two axes.
//! The Cartesian product is evaluated in axis-major order and written as
//! CSV next to a run manifest.
//!
//! ```toml
//! schema_version = 1
//! target = "efficiency_detuned"
//! output_path = "eta_map.csv"
//!
//! [fixed]
//! power_w = 140e-6
//!
//! [axis1]
//! name = "q_b"
//! min = 1e4
//! max = 1e6
//! count = 31
//! scale = "log"
//!
//! [axis2]
//! name = "delta_hz"
//! min = -500e3
//! max = 500e3
//! count = 101
//! ```
//!
//! Axis names are configuration keys (see [`crate::config::RunConfig`]);
//! the `identity` target returns the scratch key `x`, which gives sweeps a
//! passthrough for plumbing tests.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};
use std::time::Instant;

use serde::Deserialize;

use crate::config::{RunConfig, SCHEMA_VERSION};
use crate::converter;
use crate::csvout;
use crate::entanglement;
use crate::error::{Error, Result};
use crate::manifest::{digest_config, RunManifest};
use crate::model::{angular_to_hz, hz_to_angular};
use crate::parallel;
use crate::qed;
use crate::sensing::{self, LinewidthConvention, PumpStrength, SensingParams};

/// Axis scaling.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum AxisScale {
    Linear,
    Log,
}

#[derive(Debug, Clone, Deserialize, PartialEq)]
pub struct AxisSpec {
    pub name: String,
    pub min: f64,
    pub max: f64,
    pub count: usize,
    #[serde(default = "default_scale")]
    pub scale: AxisScale,
}

fn default_scale() -> AxisScale {
    AxisScale::Linear
}

impl AxisSpec {
    fn validate(&self) -> Result<()> {
        if self.count < 2 {
            return Err(Error::Config(format!(
                "axis `{}`: count must be >= 2, got {}",
                self.name, self.count
            )));
        }
        if !(self.min < self.max) {
            return Err(Error::Config(format!(
                "axis `{}`: needs min < max, got [{}, {}]",
                self.name, self.min, self.max
            )));
        }
        if self.scale == AxisScale::Log && !(self.min > 0.0) {
            return Err(Error::Config(format!(
                "axis `{}`: log scale requires min > 0, got {}",
                self.name, self.min
            )));
        }
        Ok(())
    }

    pub fn grid(&self) -> Vec<f64> {
        grid(self.min, self.max, self.count, self.scale)
    }
}

/// Evenly spaced grid, linear or logarithmic, endpoints included.
pub fn grid(min: f64, max: f64, count: usize, scale: AxisScale) -> Vec<f64> {
    let n = count.max(2);
    (0..n)
        .map(|i| {
            let t = i as f64 / (n - 1) as f64;
            match scale {
                AxisScale::Linear => min + t * (max - min),
                AxisScale::Log => min * (max / min).powf(t),
            }
        })
        .collect()
}

#[derive(Debug, Clone, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct SweepSpec {
    pub schema_version: u32,
    pub target: String,
    pub output_path: PathBuf,
    #[serde(default)]
    pub fixed: BTreeMap<String, toml::Value>,
    pub axis1: AxisSpec,
    pub axis2: Option<AxisSpec>,
}

impl SweepSpec {
    pub fn from_toml_str(text: &str) -> Result<Self> {
        let spec: SweepSpec = toml::from_str(text).map_err(|e| Error::Config(e.to_string()))?;
        if spec.schema_version != SCHEMA_VERSION {
            return Err(Error::Config(format!(
                "schema_version {} unsupported (expected {SCHEMA_VERSION})",
                spec.schema_version
            )));
        }
        spec.axis1.validate()?;
        if let Some(axis2) = &spec.axis2 {
            axis2.validate()?;
        }
        Ok(spec)
    }

    pub fn from_path(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        Self::from_toml_str(&text)
    }
}

/// Evaluate one registered target quantity under a resolved configuration.
/// Boundary units: every `*_hz` key is plain Hz, converted here.
pub fn evaluate_target(target: &str, cfg: &RunConfig) -> Result<f64> {
    match target {
        "identity" => Ok(cfg.x),
        "pump_photons" => Ok(converter::pump_photon_number(&cfg.operating_point()?)),
        "cooperativity" => Ok(converter::cooperativity(&cfg.operating_point()?)),
        "efficiency" => Ok(converter::efficiency(&cfg.operating_point()?).total_efficiency),
        "efficiency_detuned" => Ok(converter::efficiency_detuned(
            &cfg.operating_point()?,
            hz_to_angular(cfg.delta_hz),
        )),
        "bandwidth_hz" => Ok(angular_to_hz(converter::bandwidth(
            &cfg.operating_point()?,
        )?)),
        "readout_efficiency" => Ok(qed::readout_efficiency(
            &cfg.operating_point()?,
            hz_to_angular(cfg.chi_hz),
        )),
        "noise_standard_over_sql" => {
            let (params, delta) = sensing_inputs(cfg)?;
            let (_, sql) = sensing::noise_floors(&params, delta);
            Ok(sensing::noise_standard(&params, delta)? / sql)
        }
        "noise_bae_over_sql" => {
            let (params, delta) = sensing_inputs(cfg)?;
            let (_, sql) = sensing::noise_floors(&params, delta);
            Ok(sensing::noise_bae(&params, delta)? / sql)
        }
        "entanglement_rate" => Ok(entanglement::herald_statistics(&cfg.protocol_params()?).rate),
        "entanglement_infidelity" => {
            Ok(entanglement::herald_statistics(&cfg.protocol_params()?).infidelity)
        }
        other => Err(Error::UnknownTarget(other.to_string())),
    }
}

fn sensing_inputs(cfg: &RunConfig) -> Result<(SensingParams, f64)> {
    let op = cfg.operating_point()?;
    let c = converter::cooperativity(&op);
    let params = SensingParams::from_operating_point(
        &op,
        cfg.n_thermal,
        LinewidthConvention::HalfLinewidth,
    )?
    .with_pump(PumpStrength::Cooperativity(c))?;
    Ok((params, hz_to_angular(cfg.delta_hz)))
}

/// Run a sweep spec against a base configuration. Output lands at
/// `out_dir/output_path`, with a manifest alongside
/// (`<output_path>.manifest.json`).
pub fn run_sweep(spec: &SweepSpec, base: &RunConfig, out_dir: &Path) -> Result<RunManifest> {
    let started = Instant::now();
    let mut cfg = base.clone();
    for (key, value) in &spec.fixed {
        match value {
            toml::Value::Float(v) => cfg.set_f64(key, *v)?,
            toml::Value::Integer(v) => {
                // Integer-valued keys (seed, attempts) stay integers.
                match key.as_str() {
                    "seed" | "attempts" => cfg.set(key, &v.to_string())?,
                    _ => cfg.set_f64(key, *v as f64)?,
                }
            }
            toml::Value::String(s) => cfg.set(key, s)?,
            toml::Value::Boolean(b) => cfg.set(key, &b.to_string())?,
            other => {
                return Err(Error::Config(format!(
                    "fixed key `{key}`: unsupported value {other}"
                )))
            }
        }
    }

    let grid1 = spec.axis1.grid();
    let grid2 = spec.axis2.as_ref().map(|a| a.grid());

    // Cartesian product in axis-major order.
    let points: Vec<(f64, Option<f64>)> = match &grid2 {
        None => grid1.iter().map(|&v| (v, None)).collect(),
        Some(g2) => grid1
            .iter()
            .flat_map(|&v1| g2.iter().map(move |&v2| (v1, Some(v2))))
            .collect(),
    };

    let target = spec.target.clone();
    // Resolve the target once so typos fail before the whole grid runs.
    {
        let mut probe = cfg.clone();
        probe.set_f64(&spec.axis1.name, spec.axis1.grid()[0])?;
        if let (Some(axis2), Some(g2)) = (&spec.axis2, &grid2) {
            probe.set_f64(&axis2.name, g2[0])?;
        }
        evaluate_target(&target, &probe)?;
    }

    let axis1_name = spec.axis1.name.clone();
    let axis2_name = spec.axis2.as_ref().map(|a| a.name.clone());
    let values: Vec<Result<f64>> = parallel::map(&points, |&(v1, v2)| {
        let mut point_cfg = cfg.clone();
        point_cfg.set_f64(&axis1_name, v1)?;
        if let (Some(name), Some(v2)) = (&axis2_name, v2) {
            point_cfg.set_f64(name, v2)?;
        }
        evaluate_target(&target, &point_cfg)
    });

    let header = match &axis2_name {
        None => format!("{},{}", spec.axis1.name, spec.target),
        Some(name) => format!("{},{},{}", spec.axis1.name, name, spec.target),
    };
    let mut rows: Vec<Vec<String>> = Vec::with_capacity(points.len());
    for ((v1, v2), value) in points.iter().zip(values) {
        let value = value?;
        let mut row = vec![csvout::fmt_float(*v1)];
        if let Some(v2) = v2 {
            row.push(csvout::fmt_float(*v2));
        }
        row.push(csvout::fmt_float(value));
        rows.push(row);
    }
    let document = csvout::csv_document(&header, rows);

    let out_path = out_dir.join(&spec.output_path);
    let checksum = csvout::write_with_checksum(&out_path, &document)?;

    let mut digest_input = cfg.digest_map();
    digest_input.insert("sweep.target".into(), spec.target.clone());
    digest_input.insert("sweep.axis1".into(), format!("{:?}", spec.axis1));
    digest_input.insert("sweep.axis2".into(), format!("{:?}", spec.axis2));
    let command = format!("sweep {}", spec.output_path.display());
    let mut manifest = RunManifest::new(
        command.clone(),
        digest_config(&command, &digest_input),
        None,
    );
    manifest.record_output(&out_path, checksum);
    manifest
        .metadata
        .insert("rows".into(), (document.lines().count() - 1).to_string());
    manifest.wall_time_s = started.elapsed().as_secs_f64();
    manifest.write_json(&out_path.with_extension("manifest.json"))?;
    Ok(manifest)
}
