//! Named figure reproductions: each figure writes its module-defined CSV
//! with the design-point defaults (plus any overrides) and a run manifest
//! alongside.
//!
//! | name  | contents                                            |
//! |-------|-----------------------------------------------------|
//! | fig3c | pump photons vs optical coupling ratio              |
//! | fig3d | cooperativity vs optical coupling ratio             |
//! | fig3e | efficiency vs optical coupling ratio                |
//! | fig4a | cooperativity vs pump power                         |
//! | fig4b | efficiency vs pump power                            |
//! | fig4c | efficiency vs input detuning                        |
//! | fig5b | readout efficiency vs (microwave Q, dispersive shift) |
//! | fig6a | entanglement rate vs pump grid                      |
//! | fig6b | entanglement infidelity vs pump grid                |
//! | fig7  | sensing noise over SQL vs pump power                |
//!
//! fig3c/d/e share one table (`ratio,n_pump,cooperativity,efficiency`), as
//! do fig4a/b and fig6a/b; the figure name picks the file name, the column
//! contract is fixed per table. fig7 defaults to an optical Q of 1e8
//! (unless `q_a` is overridden), the condition its source plot was drawn
//! at.

use std::path::Path;
use std::str::FromStr;
use std::time::Instant;

use crate::config::RunConfig;
use crate::converter;
use crate::csvout::{self, fmt_float};
use crate::entanglement::{self, R0Model};
use crate::error::{Error, Result};
use crate::manifest::{digest_config, RunManifest};
use crate::model::{angular_to_hz, hz_to_angular};
use crate::parallel::{self, Execution};
use crate::qed;
use crate::sensing::{self, LinewidthConvention};
use crate::sweep::{grid, AxisScale};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Figure {
    Fig3c,
    Fig3d,
    Fig3e,
    Fig4a,
    Fig4b,
    Fig4c,
    Fig5b,
    Fig6a,
    Fig6b,
    Fig7,
}

impl Figure {
    pub const ALL: [Figure; 10] = [
        Figure::Fig3c,
        Figure::Fig3d,
        Figure::Fig3e,
        Figure::Fig4a,
        Figure::Fig4b,
        Figure::Fig4c,
        Figure::Fig5b,
        Figure::Fig6a,
        Figure::Fig6b,
        Figure::Fig7,
    ];

    pub fn name(&self) -> &'static str {
        match self {
            Figure::Fig3c => "fig3c",
            Figure::Fig3d => "fig3d",
            Figure::Fig3e => "fig3e",
            Figure::Fig4a => "fig4a",
            Figure::Fig4b => "fig4b",
            Figure::Fig4c => "fig4c",
            Figure::Fig5b => "fig5b",
            Figure::Fig6a => "fig6a",
            Figure::Fig6b => "fig6b",
            Figure::Fig7 => "fig7",
        }
    }
}

impl FromStr for Figure {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Figure::ALL
            .iter()
            .find(|f| f.name() == s)
            .copied()
            .ok_or_else(|| Error::UnknownFigure(s.to_string()))
    }
}

/// Run one named figure; returns the manifest that was written alongside
/// the CSV.
pub fn run_figure(figure: Figure, cfg: &RunConfig, out_dir: &Path) -> Result<RunManifest> {
    run_figure_exec(figure, cfg, out_dir, Execution::Auto)
}

/// [`run_figure`] under an explicit execution policy (outputs identical).
pub fn run_figure_exec(
    figure: Figure,
    cfg: &RunConfig,
    out_dir: &Path,
    exec: Execution,
) -> Result<RunManifest> {
    let started = Instant::now();
    let mut cfg = cfg.clone();
    let (document, stochastic, extra_meta) = match figure {
        Figure::Fig3c | Figure::Fig3d | Figure::Fig3e => (coupling_table(&cfg)?, false, vec![]),
        Figure::Fig4a | Figure::Fig4b => (power_table(&cfg)?, false, vec![]),
        Figure::Fig4c => (detuning_table(&cfg)?, false, vec![]),
        Figure::Fig5b => (readout_map(&cfg, exec)?, false, vec![]),
        Figure::Fig6a | Figure::Fig6b => {
            let (doc, meta) = entanglement_table(&cfg, exec)?;
            (doc, cfg.attempts > 0, meta)
        }
        Figure::Fig7 => {
            // The source plot for this figure uses a 1e8 optical Q.
            if !cfg.is_set("q_a") {
                cfg.q_a = 1e8;
            }
            noise_table(&cfg)?
        }
    };

    let out_path = out_dir.join(format!("{}.csv", figure.name()));
    let checksum = csvout::write_with_checksum(&out_path, &document)?;

    let command = format!("figure {}", figure.name());
    let digest = digest_config(&command, &cfg.digest_map());
    let seed = stochastic.then_some(cfg.seed);
    let mut manifest = RunManifest::new(command, digest, seed);
    manifest.record_output(&out_path, checksum);
    for (k, v) in extra_meta {
        manifest.metadata.insert(k, v);
    }
    manifest.wall_time_s = started.elapsed().as_secs_f64();
    manifest.write_json(&out_path.with_extension("manifest.json"))?;
    Ok(manifest)
}

fn coupling_table(cfg: &RunConfig) -> Result<String> {
    let op = cfg.operating_point()?;
    let ratios = grid(0.0, 5.0, 501, AxisScale::Linear);
    let rows = converter::sweep_optical_coupling(&op, &ratios)?;
    Ok(csvout::csv_document(
        "ratio,n_pump,cooperativity,efficiency",
        rows.iter().map(|r| {
            vec![
                fmt_float(r.ratio),
                fmt_float(r.pump_photons),
                fmt_float(r.cooperativity),
                fmt_float(r.efficiency),
            ]
        }),
    ))
}

fn power_table(cfg: &RunConfig) -> Result<String> {
    let op = cfg.operating_point()?;
    let powers = grid(1e-6, 1e-2, 401, AxisScale::Log);
    let rows = converter::sweep_pump_power(&op, &powers)?;
    Ok(csvout::csv_document(
        "power_W,n_pump,cooperativity,efficiency",
        rows.iter().map(|r| {
            vec![
                fmt_float(r.power_w),
                fmt_float(r.pump_photons),
                fmt_float(r.cooperativity),
                fmt_float(r.efficiency),
            ]
        }),
    ))
}

fn detuning_table(cfg: &RunConfig) -> Result<String> {
    let op = cfg.operating_point()?;
    // Span a few microwave linewidths so the half-max points are inside.
    let gamma_b_hz = angular_to_hz(op.microwave().total_rate());
    let detunings = grid(-5.0 * gamma_b_hz, 5.0 * gamma_b_hz, 1001, AxisScale::Linear);
    let rows: Vec<(f64, f64)> = detunings
        .iter()
        .map(|&d| (d, converter::efficiency_detuned(&op, hz_to_angular(d))))
        .collect();
    Ok(csvout::csv_document(
        "detuning_Hz,efficiency",
        rows.iter()
            .map(|&(d, eta)| vec![fmt_float(d), fmt_float(eta)]),
    ))
}

fn readout_map(cfg: &RunConfig, exec: Execution) -> Result<String> {
    let q_values = grid(1e4, 1e7, 61, AxisScale::Log);
    let chi_values = grid(-500e3, 500e3, 201, AxisScale::Linear);
    let rows: Vec<Result<Vec<(f64, f64, f64)>>> = parallel::map_exec(
        &q_values,
        |&q_b| {
            let mut row_cfg = cfg.clone();
            row_cfg.set_f64("q_b", q_b)?;
            let op = row_cfg.operating_point()?;
            Ok(chi_values
                .iter()
                .map(|&chi_hz| {
                    (
                        q_b,
                        chi_hz,
                        qed::readout_efficiency(&op, hz_to_angular(chi_hz)),
                    )
                })
                .collect())
        },
        exec,
    );
    let mut cells = Vec::new();
    for row in rows {
        for (q_b, chi_hz, eta) in row? {
            cells.push(vec![fmt_float(q_b), fmt_float(chi_hz), fmt_float(eta)]);
        }
    }
    Ok(csvout::csv_document("q_b,chi_Hz,efficiency", cells))
}

/// Extra manifest metadata attached by a figure builder.
type FigureMeta = Vec<(String, String)>;

fn entanglement_table(cfg: &RunConfig, exec: Execution) -> Result<(String, FigureMeta)> {
    let op = cfg.operating_point()?;
    let params = cfg.protocol_params()?;
    let sweep_grid = match cfg.r0_model {
        // Direct: the grid is the generation rate itself.
        R0Model::Direct => grid(1e3, 1e7, 301, AxisScale::Log),
        R0Model::CooperativityScaled => grid(1e-6, 1e-2, 301, AxisScale::Log),
    };
    // Both pumping schemes unless one was pinned explicitly.
    let schemes: Vec<entanglement::Scheme> = if cfg.is_set("scheme") {
        vec![cfg.scheme]
    } else {
        vec![entanglement::Scheme::Blue, entanglement::Scheme::Red]
    };

    let monte_carlo = cfg.attempts > 0;
    let header = if monte_carlo {
        "power_W,r0_per_s,rate_per_s,infidelity,scheme,r0_model,rate_stderr,infidelity_stderr,attempts,seed"
    } else {
        "power_W,r0_per_s,rate_per_s,infidelity,scheme,r0_model"
    };

    let mut cells: Vec<Vec<String>> = Vec::new();
    for scheme in schemes {
        let scheme_params = entanglement::EntanglementProtocolParams::new(
            params.generation_rate(),
            params.attempt_duration(),
            params.reset_time(),
            scheme,
        )?;
        let rows = entanglement::sweep_power(&scheme_params, &op, &sweep_grid, cfg.r0_model)?;
        if monte_carlo {
            let indexed: Vec<(usize, entanglement::EntanglementSweepRow)> =
                rows.into_iter().enumerate().collect();
            let mc_rows: Vec<Result<Vec<String>>> = parallel::map_exec(
                &indexed,
                |(index, row)| {
                    let row_params = scheme_params.with_generation_rate(row.r0_per_s)?;
                    // Per-row seeds derive from the run seed and row index.
                    let seed = cfg.seed.wrapping_add(*index as u64);
                    let mc = entanglement::monte_carlo(&row_params, cfg.attempts, seed)?;
                    Ok(vec![
                        fmt_float(row.power_w),
                        fmt_float(row.r0_per_s),
                        fmt_float(mc.rate),
                        fmt_float(mc.infidelity.unwrap_or(f64::NAN)),
                        scheme.label().to_string(),
                        cfg.r0_model.label().to_string(),
                        fmt_float(mc.rate_stderr),
                        fmt_float(mc.fidelity_stderr.unwrap_or(f64::NAN)),
                        cfg.attempts.to_string(),
                        seed.to_string(),
                    ])
                },
                exec,
            );
            for row in mc_rows {
                cells.push(row?);
            }
        } else {
            for row in rows {
                cells.push(vec![
                    fmt_float(row.power_w),
                    fmt_float(row.r0_per_s),
                    fmt_float(row.rate_per_s),
                    fmt_float(row.infidelity),
                    scheme.label().to_string(),
                    cfg.r0_model.label().to_string(),
                ]);
            }
        }
    }
    let meta = vec![(
        "r0_model".to_string(),
        format!(
            "{} (direct: the power column carries the swept generation rate)",
            cfg.r0_model.label()
        ),
    )];
    Ok((csvout::csv_document(header, cells), meta))
}

fn noise_table(cfg: &RunConfig) -> Result<(String, bool, FigureMeta)> {
    let op = cfg.operating_point()?;
    let powers = grid(1e-6, 1e-1, 301, AxisScale::Log);
    let delta = hz_to_angular(cfg.delta_hz);
    let rows = sensing::sweep_noise_vs_power(
        &op,
        cfg.n_thermal,
        LinewidthConvention::HalfLinewidth,
        &powers,
        delta,
    )?;
    let mut skipped = 0usize;
    let mut cells = Vec::new();
    for row in &rows {
        match &row.values {
            Ok(v) => cells.push(vec![
                fmt_float(row.power_w),
                fmt_float(v.cooperativity),
                fmt_float(v.standard_over_sql),
                fmt_float(v.bae_over_sql),
                fmt_float(cfg.delta_hz),
            ]),
            Err(_) => skipped += 1,
        }
    }
    let doc = csvout::csv_document(
        "power_W,cooperativity,s_standard_over_sql,s_bae_over_sql,detuning_Hz",
        cells,
    );
    let meta = vec![("rows_skipped".to_string(), skipped.to_string())];
    Ok((doc, false, meta))
}
