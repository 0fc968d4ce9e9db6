//! Subcommand bodies. Each returns the text to emit; the binary decides
//! where it goes.

use std::fmt::Write as _;
use std::path::Path;

use sqzopto::model::{Direction, ModelParams};
use sqzopto::moments::{drift_system, write_drift_dump, DriftInputs};
use sqzopto::steadystate::{operating_point, OperatingPoint, SteadyStateError};
use sqzopto::sweep::{evaluate_point, figure_preset, run_sweep, MeasureSet, RowStatus, SweepRow, PRESET_NAMES};
use thiserror::Error;

use crate::config::{ConfigError, Resolved};
use crate::output::{format_cm, num, render_csv, write_atomic, CsvMeta};

/// Process exit codes.
pub mod exit {
    pub const OK: i32 = 0;
    pub const FAILURE: i32 = 1;
    pub const CONFIG: i32 = 2;
    pub const UNSTABLE: i32 = 3;
    pub const NONCONVERGENCE: i32 = 4;
}

#[derive(Debug, Error)]
pub enum CliError {
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error("drift matrix is not Hurwitz (spectral abscissa {0:e}); no steady state")]
    Unstable(f64),
    #[error("{0}")]
    NonConvergence(SteadyStateError),
    #[error("{0}")]
    Failed(String),
    #[error("i/o: {0}")]
    Io(#[from] std::io::Error),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) => exit::CONFIG,
            CliError::Unstable(_) => exit::UNSTABLE,
            CliError::NonConvergence(_) => exit::NONCONVERGENCE,
            CliError::Failed(_) | CliError::Io(_) => exit::FAILURE,
        }
    }
}

impl From<csv::Error> for CliError {
    fn from(e: csv::Error) -> Self {
        CliError::Failed(e.to_string())
    }
}

fn operating(params: &ModelParams<f64>, r: &Resolved) -> Result<OperatingPoint<f64>, CliError> {
    operating_point(params, &r.solver).map_err(|e| match e {
        SteadyStateError::Model(m) => CliError::Config(ConfigError::Other(m.to_string())),
        e @ SteadyStateError::NonConvergence { .. } => CliError::NonConvergence(e),
        e => CliError::Failed(e.to_string()),
    })
}

fn source(r: &Resolved, what: &str) -> String {
    match &r.preset {
        Some(p) => format!("{what} preset={p}"),
        None => format!("{what} config"),
    }
}

fn cplx(z: num_complex::Complex<f64>) -> String {
    let sign = if z.im.is_sign_negative() { "-" } else { "+" };
    format!("{} {sign} {}i", num(z.re), num(z.im.abs()))
}

/// Effective quantities for both drive directions as an aligned text report.
pub fn derive(r: &Resolved) -> Result<String, CliError> {
    let mut s = String::new();
    for dir in Direction::BOTH {
        let mut p = r.params;
        p.direction = dir;
        let op = operating(&p, r)?;
        let d = &op.derived;
        let _ = writeln!(s, "[{dir}]");
        let mut line = |k: &str, v: String| {
            let _ = writeln!(s, "  {k:<12} {v}");
        };
        line("Xi_d", num(d.xi_d));
        line("omega_s", num(d.omega_s));
        line("Delta_s", num(op.delta_s));
        line("N_s", num(d.n_s));
        line("M_s", cplx(d.m_s));
        for j in 0..2 {
            line(&format!("Lambda_{}", j + 1), cplx(d.lambda_eff[j]));
        }
        for j in 0..2 {
            line(
                &format!("Pi_{}", j + 1),
                d.pi_factor[j].map(num).unwrap_or_else(|| "-".into()),
            );
        }
        line("r_e", num(d.r_e));
        line("theta_e", num(d.theta_e));
        line("delta_r", num(d.delta_r));
        line("delta_theta", num(d.delta_theta));
        for w in &op.warnings {
            line("warning", w.to_string());
        }
    }
    Ok(s)
}

/// Enhancement factor over the `(r_d, theta_d)` grid, as CSV.
pub fn pi_grid(r: &Resolved) -> Result<Vec<u8>, CliError> {
    let mut spec = figure_preset("fig1b").map_err(|e| CliError::Failed(e.to_string()))?;
    spec.base = r.params;
    spec.solver = r.solver;
    spec.tolerances = r.tolerances;
    spec.frequency_unit = r.unit;
    let rows = run_sweep(&spec, r.workers.unwrap_or(1)).map_err(|e| CliError::Failed(e.to_string()))?;
    let axes: Vec<_> = spec.axes.iter().map(|a| a.name).collect();
    Ok(render_csv(
        &rows,
        &axes,
        &spec.measures,
        &CsvMeta {
            source: &source(r, "derive --pi-grid"),
            timestamp: r.timestamp,
        },
    )?)
}

pub struct SteadyOutput {
    pub csv: Vec<u8>,
    pub cm: Option<String>,
}

/// One direction at one point: CSV row of all measures, plus the CM.
pub fn steady(r: &Resolved, dir: Direction, drift_dump: Option<&Path>) -> Result<SteadyOutput, CliError> {
    let mut p = r.params;
    p.direction = dir;
    let op = operating(&p, r)?;
    let (system, _) = drift_system(&DriftInputs::new(&op, &p));
    if let Some(dir) = drift_dump {
        write_drift_dump(&system, dir)?;
    }
    if !(system.spectral_abscissa < r.tolerances.stability) {
        return Err(CliError::Unstable(system.spectral_abscissa));
    }
    let measures = MeasureSet::all();
    let result = evaluate_point(&p, &measures, &r.solver, &r.tolerances);
    match &result.status {
        RowStatus::Ok => {}
        RowStatus::Unstable => return Err(CliError::Unstable(result.spectral_abscissa.unwrap_or(f64::NAN))),
        RowStatus::Invalid(m) => return Err(CliError::Config(ConfigError::Other(m.clone()))),
        RowStatus::Failed(m) => return Err(CliError::Failed(m.clone())),
    }
    let cm = result.cm.as_ref().map(format_cm);
    let row = SweepRow {
        point: 0,
        axis_values: Vec::new(),
        direction: dir,
        result,
        asymmetry: [None, None],
    };
    let csv = render_csv(
        &[row],
        &[],
        &measures,
        &CsvMeta {
            source: &source(r, "steady"),
            timestamp: r.timestamp,
        },
    )?;
    Ok(SteadyOutput { csv, cm })
}

pub struct SweepOutput {
    pub csv: Vec<u8>,
    pub rows: Vec<SweepRow>,
}

pub fn sweep(r: &Resolved) -> Result<SweepOutput, CliError> {
    let spec = r.sweep.as_ref().ok_or_else(|| {
        CliError::Config(ConfigError::Other(
            "nothing to sweep: give --preset or [[sweep.axis]] entries".into(),
        ))
    })?;
    let workers = r
        .workers
        .unwrap_or_else(|| std::thread::available_parallelism().map_or(1, |n| n.get()));
    let rows = run_sweep(spec, workers).map_err(|e| CliError::Config(ConfigError::Other(e.to_string())))?;
    let axes: Vec<_> = spec.axes.iter().map(|a| a.name).collect();
    let csv = render_csv(
        &rows,
        &axes,
        &spec.measures,
        &CsvMeta {
            source: &source(r, "sweep"),
            timestamp: r.timestamp,
        },
    )?;
    Ok(SweepOutput { csv, rows })
}

/// One line per row status, for the end-of-run summary.
pub fn summarize(rows: &[SweepRow]) -> String {
    let count = |label: &str| rows.iter().filter(|r| r.result.status.label() == label).count();
    format!(
        "{} rows: {} ok, {} unstable, {} invalid, {} failed",
        rows.len(),
        count("ok"),
        count("unstable"),
        count("invalid"),
        count("failed")
    )
}

pub fn preset_list() -> String {
    let mut s = String::new();
    for name in PRESET_NAMES {
        let spec = figure_preset(name).expect("listed presets exist");
        let axes: Vec<String> = spec
            .axes
            .iter()
            .map(|a| format!("{}[{}]", a.name, a.values.len()))
            .collect();
        let dirs: Vec<&str> = spec.directions.iter().map(|d| d.as_str()).collect();
        let _ = writeln!(s, "{name:<18} {:<40} {}", axes.join(" x "), dirs.join(","));
    }
    s
}

pub fn write_cm(path: &Path, text: &str) -> Result<(), CliError> {
    Ok(write_atomic(path, text.as_bytes())?)
}
