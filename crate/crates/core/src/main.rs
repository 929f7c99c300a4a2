//! `cavity-eo`: command-line front end for the transduction toolkit.
//!
//! Exit codes: 0 success, 1 validation failure, 2 usage/config error,
//! 3 I/O error.

use std::path::PathBuf;
use std::str::FromStr;

use clap::{Parser, Subcommand};

use cavity_eo::config::RunConfig;
use cavity_eo::electrooptic::{g_eo_from_profile, FieldProfile};
use cavity_eo::error::{Error, Result};
use cavity_eo::figures::{run_figure, Figure};
use cavity_eo::model::{angular_to_hz, hz_to_angular};
use cavity_eo::report;
use cavity_eo::sweep::{run_sweep, SweepSpec};

#[derive(Parser)]
#[command(
    name = "cavity-eo",
    version,
    about = "Cavity electro-optic transduction toolkit"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Reproduce a named figure as CSV data plus a run manifest.
    Figure {
        /// One of: fig3c fig3d fig3e fig4a fig4b fig4c fig5b fig6a fig6b fig7
        name: String,
        /// Override a configuration key, e.g. --set q_b=2e5 (repeatable).
        #[arg(long = "set", value_name = "KEY=VALUE")]
        set: Vec<String>,
        /// Output directory.
        #[arg(long, default_value = ".")]
        out: PathBuf,
    },
    /// Run a declarative sweep described by a TOML config.
    Sweep {
        config: PathBuf,
        #[arg(long = "set", value_name = "KEY=VALUE")]
        set: Vec<String>,
        #[arg(long, default_value = ".")]
        out: PathBuf,
    },
    /// Evaluate the electro-optic coupling rate for a field-profile file.
    Geo {
        /// Two-column `phi_degrees,field_V_per_m` text file.
        profile: PathBuf,
        /// Stored microwave energy in J.
        #[arg(long, default_value_t = 1.0)]
        energy: f64,
        #[arg(long = "set", value_name = "KEY=VALUE")]
        set: Vec<String>,
    },
    /// Run the cross-module invariant suite and print a JSON report.
    Validate {
        #[arg(long = "set", value_name = "KEY=VALUE")]
        set: Vec<String>,
    },
}

fn apply_overrides(cfg: &mut RunConfig, pairs: &[String]) -> Result<()> {
    for pair in pairs {
        let (key, value) = pair
            .split_once('=')
            .ok_or_else(|| Error::Usage(format!("--set expects KEY=VALUE, got `{pair}`")))?;
        cfg.set(key.trim(), value.trim())?;
    }
    Ok(())
}

fn run(cli: Cli) -> Result<i32> {
    match cli.command {
        Command::Figure { name, set, out } => {
            let figure = Figure::from_str(&name)?;
            let mut cfg = RunConfig::default();
            apply_overrides(&mut cfg, &set)?;
            std::fs::create_dir_all(&out)?;
            let manifest = run_figure(figure, &cfg, &out)?;
            println!(
                "{}",
                serde_json::to_string_pretty(&manifest).expect("manifest serializes")
            );
            Ok(0)
        }
        Command::Sweep { config, set, out } => {
            let spec = SweepSpec::from_path(&config)?;
            let mut cfg = RunConfig::default();
            apply_overrides(&mut cfg, &set)?;
            std::fs::create_dir_all(&out)?;
            let manifest = run_sweep(&spec, &cfg, &out)?;
            println!(
                "{}",
                serde_json::to_string_pretty(&manifest).expect("manifest serializes")
            );
            Ok(0)
        }
        Command::Geo {
            profile,
            energy,
            set,
        } => {
            let mut cfg = RunConfig::default();
            apply_overrides(&mut cfg, &set)?;
            let profile = FieldProfile::from_path(&profile, energy)?;
            let optics = cfg.crystal_optics()?;
            let omega_signal = hz_to_angular(cfg.f_a_hz);
            let omega_pump = hz_to_angular(cfg.f_a_hz - cfg.f_b_hz - cfg.delta_p_hz);
            let omega_microwave = hz_to_angular(cfg.f_b_hz);
            let g =
                g_eo_from_profile(&profile, &optics, omega_pump, omega_signal, omega_microwave)?;
            let report = serde_json::json!({
                "g_eo_signed_hz": angular_to_hz(g.signed),
                "g_eo_magnitude_hz": angular_to_hz(g.magnitude),
                "stored_energy_j": energy,
                "samples": profile.samples().len(),
            });
            println!(
                "{}",
                serde_json::to_string_pretty(&report).expect("serializes")
            );
            Ok(0)
        }
        Command::Validate { set } => {
            let mut cfg = RunConfig::default();
            apply_overrides(&mut cfg, &set)?;
            let results = report::run_validation(&cfg)?;
            println!("{}", report::render_json(&results));
            let failures = results.iter().filter(|r| !r.pass).count();
            if failures > 0 {
                eprintln!("{failures} validation check(s) failed");
                Ok(1)
            } else {
                Ok(0)
            }
        }
    }
}

fn main() {
    let cli = Cli::parse();
    let code = match run(cli) {
        Ok(code) => code,
        Err(err) => {
            eprintln!("error: {err}");
            err.exit_code()
        }
    };
    std::process::exit(code);
}
