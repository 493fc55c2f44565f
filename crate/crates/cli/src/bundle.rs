//! Result bundles: the raw ensemble of a pipeline run plus the derived
//! plot data.
//!
//! A bundle directory holds `config.txt`, `ensemble.csv` and
//! `discarded_paths.csv`. [`emit_plot_data`] derives `psi.csv`,
//! `psi_extended.csv`, `reconstruction.csv` and `metrics.json` from those
//! three files alone.

use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use spde_inverse::inversion::TRIM_FRACTION;
use spde_inverse::{build_psi, periodize, reconstruct, run_ensemble, DataSeries, EnsembleSummary};

use crate::config::{sampler_name, ExperimentConfig};
use crate::csvio::{fmt_f64, read_table, write_table, write_text, Cell};
use crate::error::{CliError, Result};

pub const CONFIG_FILE: &str = "config.txt";
pub const ENSEMBLE_FILE: &str = "ensemble.csv";
pub const DISCARDED_FILE: &str = "discarded_paths.csv";
pub const PSI_FILE: &str = "psi.csv";
pub const PSI_EXTENDED_FILE: &str = "psi_extended.csv";
pub const RECONSTRUCTION_FILE: &str = "reconstruction.csv";
pub const METRICS_FILE: &str = "metrics.json";

/// Figures reported in `metrics.json`.
#[derive(Debug, Clone, PartialEq)]
pub struct Metrics {
    pub rel_l2_error_trimmed: f64,
    pub rel_l2_error_full: f64,
    pub negative_mass: f64,
    pub psi_at_zero: f64,
    pub paths: usize,
    pub discarded_paths: usize,
    pub flagged_samples: usize,
    pub min_retained: usize,
}

/// Runs the ensemble for `config`, writes the bundle into `out_dir` and
/// emits the plot data.
pub fn run_pipeline(config: &ExperimentConfig, out_dir: &Path) -> Result<Metrics> {
    let run = config.run_config()?;
    let summary = run_ensemble(&run, config.sampler)?;
    fs::create_dir_all(out_dir).map_err(|e| CliError::io(out_dir, e))?;
    write_text(&out_dir.join(CONFIG_FILE), &config.to_config_string(false))?;
    write_ensemble(&summary, out_dir)?;
    emit_plot_data(out_dir)
}

fn write_ensemble(s: &EnsembleSummary, dir: &Path) -> Result<()> {
    let rows = (0..s.mean_log_u.len()).map(|n| {
        vec![
            Cell::F(s.mean_log_u.t(n)),
            Cell::F(s.mean_log_u.values()[n]),
            Cell::F(s.var_log_u.values()[n]),
            Cell::F(s.mean_u.values()[n]),
            Cell::F(s.v_observed.values()[n]),
            Cell::U(s.retained[n] as u64),
        ]
    });
    write_table(
        &dir.join(ENSEMBLE_FILE),
        &["t", "mean_log_u", "var_log_u", "mean_u", "v", "retained"],
        rows,
    )?;
    write_table(
        &dir.join(DISCARDED_FILE),
        &["path"],
        s.discarded_paths.iter().map(|&p| vec![Cell::U(p)]),
    )
}

struct Ensemble {
    mean_log_u: DataSeries,
    v: DataSeries,
    retained: Vec<usize>,
    discarded: usize,
}

fn read_ensemble(dir: &Path, config: &ExperimentConfig) -> Result<Ensemble> {
    let path = dir.join(ENSEMBLE_FILE);
    let table = read_table(&path)?;
    let column = |name: &str| {
        table.column(name).ok_or_else(|| CliError::Format {
            path: path.clone(),
            message: format!("missing column '{name}'"),
        })
    };
    let tau = config.grid()?.tau();
    if table.rows.len() != config.n + 1 {
        return Err(CliError::Format {
            path,
            message: format!("expected {} rows, got {}", config.n + 1, table.rows.len()),
        });
    }
    let mean_log_u = DataSeries::new(0.0, tau, column("mean_log_u")?)?;
    let v = DataSeries::new(0.0, tau, column("v")?)?;
    let retained = column("retained")?.iter().map(|&r| r as usize).collect();
    let discarded = read_table(&dir.join(DISCARDED_FILE))?.rows.len();
    Ok(Ensemble {
        mean_log_u,
        v,
        retained,
        discarded,
    })
}

/// Derives the plot CSVs and `metrics.json` from the bundle in `dir`.
pub fn emit_plot_data(dir: &Path) -> Result<Metrics> {
    for name in [CONFIG_FILE, ENSEMBLE_FILE, DISCARDED_FILE] {
        if !dir.join(name).is_file() {
            return Err(CliError::MissingBundle(dir.into()));
        }
    }
    let config = ExperimentConfig::load(&dir.join(CONFIG_FILE))?;
    let ensemble = read_ensemble(dir, &config)?;
    let potential = config.potential.to_potential()?;

    let psi = build_psi(&ensemble.mean_log_u, &ensemble.v)?;
    let extended = periodize(&psi)?;
    let result = reconstruct(&extended, &config.filter(), Some(&potential))?;

    write_series(&dir.join(PSI_FILE), "psi", &psi)?;
    write_series(
        &dir.join(PSI_EXTENDED_FILE),
        "psi_extended",
        &extended.extended,
    )?;
    let rows = result
        .q_squared
        .iter()
        .map(|(t, q2)| vec![Cell::F(t), Cell::F(potential.eval_squared(t)), Cell::F(q2)]);
    write_table(
        &dir.join(RECONSTRUCTION_FILE),
        &["t", "q2_true", "q2_rec"],
        rows,
    )?;

    let kept = config.paths - ensemble.discarded;
    let metrics = Metrics {
        rel_l2_error_trimmed: result.rel_l2_error_trimmed.expect("truth supplied"),
        rel_l2_error_full: result.rel_l2_error_full.expect("truth supplied"),
        negative_mass: result.negative_mass,
        psi_at_zero: psi.values()[0],
        paths: config.paths,
        discarded_paths: ensemble.discarded,
        flagged_samples: ensemble.retained.iter().map(|r| kept - r).sum(),
        min_retained: ensemble.retained.iter().copied().min().unwrap_or(0),
    };
    write_text(&dir.join(METRICS_FILE), &metrics_json(&metrics, &config))?;
    Ok(metrics)
}

fn write_series(path: &Path, name: &str, s: &DataSeries) -> Result<()> {
    write_table(
        path,
        &["t", name],
        s.iter().map(|(t, v)| vec![Cell::F(t), Cell::F(v)]),
    )
}

fn json_string(s: &str) -> String {
    let mut out = String::from("\"");
    for c in s.chars() {
        match c {
            '"' => out.push_str("\\\""),
            '\\' => out.push_str("\\\\"),
            c if (c as u32) < 0x20 => {
                let _ = write!(out, "\\u{:04x}", c as u32);
            }
            c => out.push(c),
        }
    }
    out.push('"');
    out
}

fn json_number(x: f64) -> String {
    if x.is_finite() {
        fmt_f64(x)
    } else {
        "null".into()
    }
}

fn json_object(fields: &[(&str, String)], indent: &str) -> String {
    let inner = format!("{indent}  ");
    let body: Vec<String> = fields
        .iter()
        .map(|(k, v)| format!("{inner}{}: {v}", json_string(k)))
        .collect();
    format!("{{\n{}\n{indent}}}", body.join(",\n"))
}

/// Keys appear in a fixed order.
pub fn metrics_json(m: &Metrics, c: &ExperimentConfig) -> String {
    let t = c.t_final;
    let opt = |x: Option<f64>| x.map_or_else(|| "null".to_string(), json_number);
    let parameters = json_object(
        &[
            ("a", json_number(c.a)),
            ("T", json_number(c.t_final)),
            ("M", c.m.to_string()),
            ("N", c.n.to_string()),
            ("u0", json_string(&c.u0.to_string())),
            ("potential", json_string(&c.potential.to_string())),
            ("observation_index", c.observation_index.to_string()),
            ("P", c.paths.to_string()),
            ("epsilon", json_number(c.epsilon)),
            ("method", json_string(&c.method.to_string())),
            ("mu", opt(c.mu)),
            ("xi_max", opt(c.xi_max)),
            ("base_seed", c.base_seed.to_string()),
            ("sampler", json_string(sampler_name(c.sampler))),
        ],
        "  ",
    );
    let mut out = json_object(
        &[
            ("rel_l2_error_trimmed", json_number(m.rel_l2_error_trimmed)),
            (
                "trim_interval",
                format!(
                    "[{}, {}]",
                    json_number(TRIM_FRACTION * t),
                    json_number((1.0 - TRIM_FRACTION) * t)
                ),
            ),
            ("rel_l2_error_full", json_number(m.rel_l2_error_full)),
            ("negative_mass", json_number(m.negative_mass)),
            ("psi_at_zero", json_number(m.psi_at_zero)),
            ("paths", m.paths.to_string()),
            ("discarded_paths", m.discarded_paths.to_string()),
            ("flagged_samples", m.flagged_samples.to_string()),
            ("min_retained", m.min_retained.to_string()),
            ("parameters", parameters),
        ],
        "",
    );
    out.push('\n');
    out
}
