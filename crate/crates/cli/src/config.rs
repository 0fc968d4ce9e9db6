//! TOML run configuration.
//!
//! ```toml
//! [units]
//! frequency_unit = "16 MHz"
//!
//! [model]
//! base = "fig2"            # optional: start from a preset's parameters
//! kappa = "4.9 MHz"
//! q_m = 1e5                # or gamma_m = "160 Hz"
//! nbar_m = 100             # or temperature = "110 mK"
//! lambda = "0.32 MHz"
//! delta_c = "1 wm"
//! r_d = 0.1
//! theta_d = "1 pi"
//!
//! [drive]
//! g = ["0.16 MHz", "0.21 MHz"]
//!
//! [reservoir.cw]
//! delta_r = 0.4
//! delta_theta = "1 pi"
//!
//! [[sweep.axis]]
//! name = "delta_c"
//! range = ["0.5 wm", "1.5 wm"]
//! points = 401
//! ```

use std::path::{Path, PathBuf};

use num_complex::Complex;
use serde::Deserialize;
use sqzopto::gaussian::STEERING_ZERO;
use sqzopto::model::units::{thermal_occupancy, FrequencyUnit};
use sqzopto::model::{Direction, Drive, ModelParams, Reservoir};
use sqzopto::moments::stability_threshold;
use sqzopto::steadystate::SolverOptions;
use sqzopto::sweep::{
    fig4_params, figs123_params, figure_preset, Axis, AxisName, MeasureSet, SweepSpec, Tolerances, ENTANGLEMENT_ZERO,
    UNIT_MHZ,
};
use thiserror::Error;
use toml::Spanned;

use crate::quantity::{Kind, PerMode, Value};

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("cannot read {path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },
    #[error("{0}")]
    Syntax(String),
    #[error("line {line}: {key}: {msg}")]
    Key { line: usize, key: String, msg: String },
    #[error("{key}: {msg}")]
    Missing { key: String, msg: String },
    #[error("{0}")]
    Other(String),
}

type S<T> = Spanned<T>;

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    #[serde(default)]
    pub units: UnitsSection,
    #[serde(default)]
    pub model: ModelSection,
    pub drive: Option<DriveSection>,
    #[serde(default)]
    pub reservoir: ReservoirSection,
    #[serde(default)]
    pub solver: SolverSection,
    #[serde(default)]
    pub tolerances: ToleranceSection,
    pub sweep: Option<SweepSection>,
    #[serde(default)]
    pub output: OutputSection,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct UnitsSection {
    /// `omega_m / 2pi` in laboratory units; defaults to 16 MHz.
    pub frequency_unit: Option<S<Value>>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModelSection {
    /// `figs123`, `fig4`, or any preset name.
    pub base: Option<S<String>>,
    pub kappa: Option<S<Value>>,
    pub omega_m: Option<S<PerMode>>,
    pub gamma_m: Option<S<PerMode>>,
    /// Mechanical quality factor, alternative to `gamma_m`.
    pub q_m: Option<S<PerMode>>,
    pub nbar_m: Option<S<PerMode>>,
    /// Bath temperature, alternative to `nbar_m`.
    pub temperature: Option<S<PerMode>>,
    pub lambda: Option<S<Value>>,
    pub delta_c: Option<S<Value>>,
    pub r_d: Option<S<Value>>,
    pub theta_d: Option<S<Value>>,
    pub direction: Option<S<String>>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DriveSection {
    /// `effective` (default) or `physical`.
    pub mode: Option<S<String>>,
    pub g: Option<S<PerMode>>,
    pub beta_s: Option<S<Value>>,
    pub g0: Option<S<PerMode>>,
    pub epsilon_d: Option<S<Value>>,
    pub epsilon_phase: Option<S<Value>>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ReservoirSection {
    pub ccw: Option<ReservoirEntry>,
    pub cw: Option<ReservoirEntry>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ReservoirEntry {
    pub delta_r: Option<S<Value>>,
    pub delta_theta: Option<S<Value>>,
    pub r_e: Option<S<Value>>,
    pub theta_e: Option<S<Value>>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SolverSection {
    pub tol: Option<f64>,
    pub max_iter: Option<usize>,
    pub mixing: Option<f64>,
    pub pole_guard: Option<f64>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ToleranceSection {
    pub stability: Option<f64>,
    pub steering_zero: Option<f64>,
    pub entanglement_zero: Option<f64>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepSection {
    pub preset: Option<S<String>>,
    /// `both`, `ccw`, `cw`, or a list.
    pub directions: Option<S<Directions>>,
    pub measures: Option<S<Vec<String>>>,
    #[serde(default)]
    pub axis: Vec<AxisSection>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(untagged)]
pub enum Directions {
    One(String),
    Many(Vec<String>),
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AxisSection {
    pub name: S<String>,
    pub range: Option<S<Vec<Value>>>,
    pub points: Option<S<usize>>,
    pub values: Option<S<Vec<Value>>>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputSection {
    pub path: Option<PathBuf>,
    pub workers: Option<usize>,
    pub timestamp: Option<bool>,
}

/// Everything a subcommand needs, in dimensionless internal units.
#[derive(Debug, Clone)]
pub struct Resolved {
    pub params: ModelParams<f64>,
    pub unit: FrequencyUnit,
    pub solver: SolverOptions<f64>,
    pub tolerances: Tolerances,
    /// Present when the configuration (or preset) describes a sweep.
    pub sweep: Option<SweepSpec>,
    pub preset: Option<String>,
    pub out: Option<PathBuf>,
    pub workers: Option<usize>,
    pub timestamp: bool,
}

impl RunConfig {
    pub fn parse(src: &str) -> Result<Self, ConfigError> {
        toml::from_str(src).map_err(|e| ConfigError::Syntax(e.to_string()))
    }

    pub fn load(path: &Path) -> Result<(Self, String), ConfigError> {
        let src = std::fs::read_to_string(path).map_err(|source| ConfigError::Io {
            path: path.to_path_buf(),
            source,
        })?;
        Ok((Self::parse(&src)?, src))
    }
}

struct Ctx<'a> {
    src: &'a str,
    unit: FrequencyUnit,
}

impl Ctx<'_> {
    fn err<T>(&self, key: &str, span: std::ops::Range<usize>, msg: impl Into<String>) -> Result<T, ConfigError> {
        let line = self.src[..span.start.min(self.src.len())].matches('\n').count() + 1;
        Err(ConfigError::Key {
            line,
            key: key.to_string(),
            msg: msg.into(),
        })
    }

    fn value(&self, key: &str, v: &S<Value>, kind: Kind) -> Result<f64, ConfigError> {
        v.get_ref()
            .convert(kind, self.unit)
            .or_else(|m| self.err(key, v.span(), m))
    }

    fn per_mode(&self, key: &str, v: &S<PerMode>, kind: Kind) -> Result<[f64; 2], ConfigError> {
        v.get_ref()
            .convert(kind, self.unit)
            .or_else(|m| self.err(key, v.span(), m))
    }

    fn opt(&self, key: &str, v: &Option<S<Value>>, kind: Kind) -> Result<Option<f64>, ConfigError> {
        v.as_ref().map(|v| self.value(key, v, kind)).transpose()
    }
}

fn missing<T>(key: &str) -> Result<T, ConfigError> {
    Err(ConfigError::Missing {
        key: key.into(),
        msg: "required when no base parameter set is given".into(),
    })
}

fn base_params(name: &str) -> Option<ModelParams<f64>> {
    match name {
        "figs123" => Some(figs123_params()),
        "fig4" => Some(fig4_params()),
        other => figure_preset(other).ok().map(|s| s.base),
    }
}

fn parse_measures(names: &[String]) -> Result<MeasureSet, String> {
    let mut m = MeasureSet::none();
    for n in names {
        match n.as_str() {
            "entanglement" => m.entanglement = true,
            "steering" => m.steering = true,
            "residual" => m.residual = true,
            "derived" => m.derived = true,
            "covariance" => m.covariance = true,
            "all" => m = MeasureSet::all(),
            other => {
                return Err(format!(
                    "unknown measure '{other}' (entanglement, steering, residual, derived, covariance, all)"
                ))
            }
        }
    }
    Ok(m)
}

fn axis_kind(name: AxisName) -> Kind {
    match name {
        AxisName::DeltaC => Kind::Frequency,
        AxisName::ThetaD | AxisName::DeltaTheta(_) => Kind::Angle,
        AxisName::TemperatureMk => Kind::Temperature,
        AxisName::RD | AxisName::DeltaR(_) | AxisName::NbarM | AxisName::GScale => Kind::Plain,
    }
}

/// Command-line overrides applied on top of the file.
#[derive(Debug, Clone, Default)]
pub struct Overrides {
    pub preset: Option<String>,
    pub out: Option<PathBuf>,
    pub workers: Option<usize>,
    pub no_timestamp: bool,
}

/// Resolves a parsed configuration (or none, for preset-only runs).
pub fn resolve(cfg: Option<(&RunConfig, &str)>, ov: &Overrides) -> Result<Resolved, ConfigError> {
    let empty = RunConfig::default();
    let (cfg, src) = cfg.unwrap_or((&empty, ""));

    let preset_name = match (&ov.preset, cfg.sweep.as_ref().and_then(|s| s.preset.as_ref())) {
        (Some(p), _) => Some(p.clone()),
        (None, Some(p)) => Some(p.get_ref().clone()),
        (None, None) => None,
    };
    let preset = match &preset_name {
        Some(name) => Some(figure_preset(name).map_err(|e| ConfigError::Other(e.to_string()))?),
        None => None,
    };

    let mut ctx = Ctx {
        src,
        unit: FrequencyUnit::new(UNIT_MHZ),
    };
    if let Some(u) = &cfg.units.frequency_unit {
        let mhz = u
            .get_ref()
            .convert(Kind::Frequency, FrequencyUnit::new(1.0))
            .or_else(|m| ctx.err("units.frequency_unit", u.span(), m))?;
        if !(mhz > 0.0) {
            return ctx.err("units.frequency_unit", u.span(), "must be positive");
        }
        ctx.unit = FrequencyUnit::new(mhz);
    }

    let m = &cfg.model;
    let mut params = match &m.base {
        Some(b) => match base_params(b.get_ref()) {
            Some(p) => Some(p),
            None => {
                return ctx.err(
                    "model.base",
                    b.span(),
                    format!("unknown parameter set '{}'", b.get_ref()),
                )
            }
        },
        None => preset.as_ref().map(|s| s.base),
    };
    let p = match params.as_mut() {
        Some(p) => p,
        None => {
            params = Some(scratch_params(&ctx, cfg)?);
            params.as_mut().unwrap()
        }
    };
    apply_model(&ctx, cfg, p)?;
    let params = *p;

    let d = SolverOptions::<f64>::default();
    let solver = SolverOptions {
        tol: cfg.solver.tol.unwrap_or(d.tol),
        max_iter: cfg.solver.max_iter.unwrap_or(d.max_iter),
        mixing: cfg.solver.mixing.unwrap_or(d.mixing),
        pole_guard: cfg.solver.pole_guard.unwrap_or(d.pole_guard),
    };
    if !(solver.mixing > 0.0 && solver.mixing <= 1.0) {
        return Err(ConfigError::Other(format!(
            "solver.mixing must lie in (0, 1], got {}",
            solver.mixing
        )));
    }
    let tolerances = Tolerances {
        stability: cfg.tolerances.stability.unwrap_or(stability_threshold()),
        steering_zero: cfg.tolerances.steering_zero.unwrap_or(STEERING_ZERO),
        entanglement_zero: cfg.tolerances.entanglement_zero.unwrap_or(ENTANGLEMENT_ZERO),
    };

    let sweep = build_sweep(&ctx, cfg.sweep.as_ref(), preset, params, solver, tolerances)?;

    Ok(Resolved {
        params,
        unit: ctx.unit,
        solver,
        tolerances,
        sweep,
        preset: preset_name,
        out: ov.out.clone().or_else(|| cfg.output.path.clone()),
        workers: ov.workers.or(cfg.output.workers),
        timestamp: !ov.no_timestamp && cfg.output.timestamp.unwrap_or(true),
    })
}

fn scratch_params(ctx: &Ctx, cfg: &RunConfig) -> Result<ModelParams<f64>, ConfigError> {
    let m = &cfg.model;
    let req = |key: &str, v: &Option<S<Value>>, kind| match v {
        Some(v) => ctx.value(key, v, kind),
        None => missing(key),
    };
    if m.gamma_m.is_none() && m.q_m.is_none() {
        return missing("model.gamma_m");
    }
    if m.nbar_m.is_none() && m.temperature.is_none() {
        return missing("model.nbar_m");
    }
    if cfg.drive.is_none() {
        return missing("drive");
    }
    Ok(ModelParams {
        kappa: req("model.kappa", &m.kappa, Kind::Frequency)?,
        omega_m: [1.0, 1.0],
        gamma_m: [0.0; 2],
        nbar_m: [0.0; 2],
        lambda_hop: req("model.lambda", &m.lambda, Kind::Frequency)?,
        delta_c: req("model.delta_c", &m.delta_c, Kind::Frequency)?,
        r_d: req("model.r_d", &m.r_d, Kind::Plain)?,
        theta_d: req("model.theta_d", &m.theta_d, Kind::Angle)?,
        reservoir: sqzopto::model::PerDirection {
            ccw: Reservoir::matched(),
            cw: Reservoir::matched(),
        },
        drive: Drive::effective(0.0, 0.0),
        direction: Direction::Ccw,
    })
}

fn apply_model(ctx: &Ctx, cfg: &RunConfig, p: &mut ModelParams<f64>) -> Result<(), ConfigError> {
    let m = &cfg.model;
    if let Some(v) = ctx.opt("model.kappa", &m.kappa, Kind::Frequency)? {
        p.kappa = v;
    }
    if let Some(v) = &m.omega_m {
        p.omega_m = ctx.per_mode("model.omega_m", v, Kind::Frequency)?;
    }
    match (&m.gamma_m, &m.q_m) {
        (Some(_), Some(q)) => return ctx.err("model.q_m", q.span(), "give either gamma_m or q_m, not both"),
        (Some(g), None) => p.gamma_m = ctx.per_mode("model.gamma_m", g, Kind::Frequency)?,
        (None, Some(q)) => {
            let q = ctx.per_mode("model.q_m", q, Kind::Plain)?;
            p.gamma_m = [p.omega_m[0] / q[0], p.omega_m[1] / q[1]];
        }
        (None, None) => {}
    }
    match (&m.nbar_m, &m.temperature) {
        (Some(_), Some(t)) => {
            return ctx.err(
                "model.temperature",
                t.span(),
                "give either nbar_m or temperature, not both",
            )
        }
        (Some(n), None) => p.nbar_m = ctx.per_mode("model.nbar_m", n, Kind::Plain)?,
        (None, Some(t)) => {
            let mk = ctx.per_mode("model.temperature", t, Kind::Temperature)?;
            for j in 0..2 {
                p.nbar_m[j] = thermal_occupancy(ctx.unit.angular() * p.omega_m[j], mk[j] * 1e-3)
                    .or_else(|e| ctx.err("model.temperature", t.span(), e.to_string()))?;
            }
        }
        (None, None) => {}
    }
    if let Some(v) = ctx.opt("model.lambda", &m.lambda, Kind::Frequency)? {
        p.lambda_hop = v;
    }
    if let Some(v) = ctx.opt("model.delta_c", &m.delta_c, Kind::Frequency)? {
        p.delta_c = v;
    }
    if let Some(v) = ctx.opt("model.r_d", &m.r_d, Kind::Plain)? {
        p.r_d = v;
    }
    if let Some(v) = ctx.opt("model.theta_d", &m.theta_d, Kind::Angle)? {
        p.theta_d = v;
    }
    if let Some(d) = &m.direction {
        p.direction = d
            .get_ref()
            .parse()
            .or_else(|e: String| ctx.err("model.direction", d.span(), e))?;
    }
    if let Some(dr) = &cfg.drive {
        p.drive = drive(ctx, dr, p.drive)?;
    }
    for (dir, entry) in [(Direction::Ccw, &cfg.reservoir.ccw), (Direction::Cw, &cfg.reservoir.cw)] {
        if let Some(e) = entry {
            *p.reservoir.get_mut(dir) = reservoir(ctx, dir, e, *p.reservoir.get(dir))?;
        }
    }
    Ok(())
}

fn drive(ctx: &Ctx, d: &DriveSection, current: Drive<f64>) -> Result<Drive<f64>, ConfigError> {
    let mode = d.mode.as_ref().map(|m| m.get_ref().as_str());
    let physical = match mode {
        None => d.g0.is_some() || d.epsilon_d.is_some(),
        Some("effective") => false,
        Some("physical") => true,
        Some(other) => {
            let m = d.mode.as_ref().unwrap();
            return ctx.err(
                "drive.mode",
                m.span(),
                format!("unknown drive mode '{other}' (effective or physical)"),
            );
        }
    };
    if physical {
        let (g0, eps) = match (&d.g0, &d.epsilon_d) {
            (Some(g0), Some(eps)) => (g0, eps),
            (None, _) => return missing("drive.g0"),
            (_, None) => return missing("drive.epsilon_d"),
        };
        let g0 = ctx.per_mode("drive.g0", g0, Kind::Frequency)?;
        let amp = ctx.value("drive.epsilon_d", eps, Kind::Frequency)?;
        let ph = ctx
            .opt("drive.epsilon_phase", &d.epsilon_phase, Kind::Angle)?
            .unwrap_or(0.0);
        Ok(Drive::Physical {
            g0,
            epsilon_d: Complex::from_polar(amp, ph),
        })
    } else {
        let (g_cur, beta_cur) = match current {
            Drive::Effective { g, beta_s } => (g, beta_s),
            Drive::Physical { .. } => ([Complex::new(0.0, 0.0); 2], 0.0),
        };
        let g = match &d.g {
            Some(g) => {
                let g = ctx.per_mode("drive.g", g, Kind::Frequency)?;
                [Complex::new(g[0], 0.0), Complex::new(g[1], 0.0)]
            }
            None if matches!(current, Drive::Effective { .. }) => g_cur,
            None => return missing("drive.g"),
        };
        let beta_s = ctx.opt("drive.beta_s", &d.beta_s, Kind::Frequency)?.unwrap_or(beta_cur);
        Ok(Drive::Effective { g, beta_s })
    }
}

fn reservoir(
    ctx: &Ctx,
    dir: Direction,
    e: &ReservoirEntry,
    current: Reservoir<f64>,
) -> Result<Reservoir<f64>, ConfigError> {
    let key = |k: &str| format!("reservoir.{dir}.{k}");
    let mismatch = e.delta_r.is_some() || e.delta_theta.is_some();
    let absolute = e.r_e.is_some() || e.theta_e.is_some();
    if mismatch && absolute {
        let span = e.r_e.as_ref().or(e.theta_e.as_ref()).unwrap().span();
        return ctx.err(
            &key("r_e"),
            span,
            "give either delta_r/delta_theta or r_e/theta_e, not both",
        );
    }
    if absolute {
        let (r0, t0) = match current {
            Reservoir::Absolute { r_e, theta_e } => (r_e, theta_e),
            Reservoir::Mismatch { .. } => (0.0, 0.0),
        };
        return Ok(Reservoir::Absolute {
            r_e: ctx.opt(&key("r_e"), &e.r_e, Kind::Plain)?.unwrap_or(r0),
            theta_e: ctx.opt(&key("theta_e"), &e.theta_e, Kind::Angle)?.unwrap_or(t0),
        });
    }
    let (r0, t0) = match current {
        Reservoir::Mismatch { delta_r, delta_theta } => (delta_r, delta_theta),
        Reservoir::Absolute { .. } => (0.0, std::f64::consts::PI),
    };
    Ok(Reservoir::Mismatch {
        delta_r: ctx.opt(&key("delta_r"), &e.delta_r, Kind::Plain)?.unwrap_or(r0),
        delta_theta: ctx.opt(&key("delta_theta"), &e.delta_theta, Kind::Angle)?.unwrap_or(t0),
    })
}

fn build_sweep(
    ctx: &Ctx,
    sec: Option<&SweepSection>,
    preset: Option<SweepSpec>,
    base: ModelParams<f64>,
    solver: SolverOptions<f64>,
    tolerances: Tolerances,
) -> Result<Option<SweepSpec>, ConfigError> {
    let has_axes = sec.is_some_and(|s| !s.axis.is_empty());
    let mut spec = match (preset, has_axes) {
        (Some(p), _) => p,
        (None, true) => SweepSpec {
            base,
            axes: Vec::new(),
            directions: Direction::BOTH.to_vec(),
            measures: MeasureSet {
                covariance: false,
                ..MeasureSet::all()
            },
            solver,
            tolerances,
            frequency_unit: ctx.unit,
        },
        (None, false) => return Ok(None),
    };
    spec.base = base;
    spec.solver = solver;
    spec.tolerances = tolerances;
    spec.frequency_unit = ctx.unit;
    let Some(sec) = sec else { return Ok(Some(spec)) };

    if let Some(d) = &sec.directions {
        let names = match d.get_ref() {
            Directions::One(s) if s == "both" => vec!["ccw".to_string(), "cw".to_string()],
            Directions::One(s) => vec![s.clone()],
            Directions::Many(v) => v.clone(),
        };
        let mut dirs: Vec<Direction> = Vec::new();
        for n in names {
            let dir = n
                .parse()
                .or_else(|e: String| ctx.err("sweep.directions", d.span(), e))?;
            if !dirs.contains(&dir) {
                dirs.push(dir);
            }
        }
        dirs.sort();
        spec.directions = dirs;
    }
    if let Some(ms) = &sec.measures {
        spec.measures = parse_measures(ms.get_ref()).or_else(|e| ctx.err("sweep.measures", ms.span(), e))?;
    }
    if !sec.axis.is_empty() {
        spec.axes = sec.axis.iter().map(|a| axis(ctx, a)).collect::<Result<_, _>>()?;
    }
    spec.validate().map_err(|e| ConfigError::Other(e.to_string()))?;
    Ok(Some(spec))
}

fn axis(ctx: &Ctx, a: &AxisSection) -> Result<Axis, ConfigError> {
    let name: AxisName = a
        .name
        .get_ref()
        .parse()
        .or_else(|e: sqzopto::sweep::SweepError| ctx.err("sweep.axis.name", a.name.span(), e.to_string()))?;
    let kind = axis_kind(name);
    let conv = |key: &str, vs: &S<Vec<Value>>| -> Result<Vec<f64>, ConfigError> {
        vs.get_ref()
            .iter()
            .map(|v| v.convert(kind, ctx.unit).or_else(|m| ctx.err(key, vs.span(), m)))
            .collect()
    };
    match (&a.range, &a.points, &a.values) {
        (Some(r), Some(n), None) => {
            let lohi = conv("sweep.axis.range", r)?;
            if lohi.len() != 2 {
                return ctx.err("sweep.axis.range", r.span(), "expected [low, high]");
            }
            if *n.get_ref() < 2 {
                return ctx.err("sweep.axis.points", n.span(), "a range needs at least 2 points");
            }
            Ok(Axis::linspace(name, lohi[0], lohi[1], *n.get_ref()))
        }
        (None, None, Some(v)) => {
            let vals = conv("sweep.axis.values", v)?;
            if vals.is_empty() {
                return ctx.err("sweep.axis.values", v.span(), "empty value list");
            }
            Ok(Axis { name, values: vals })
        }
        _ => ctx.err("sweep.axis", a.name.span(), "give either range and points, or values"),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn resolve_str(src: &str) -> Result<Resolved, ConfigError> {
        let cfg = RunConfig::parse(src)?;
        resolve(Some((&cfg, src)), &Overrides::default())
    }

    const FULL: &str = r#"
[model]
kappa = "4.9 MHz"
q_m = 1e5
nbar_m = 100
lambda = "0.32 MHz"
delta_c = "1 wm"
r_d = 0.1
theta_d = "1 pi"

[drive]
g = ["0.16 MHz", "0.21 MHz"]

[reservoir.cw]
delta_r = 0.4
delta_theta = "1 pi"
"#;

    #[test]
    fn full_config_matches_preset_set() {
        let r = resolve_str(FULL).unwrap();
        let mut want = figs123_params();
        want.gamma_m = [1.0 / 1e5; 2];
        assert_eq!(r.params, want);
        assert!(r.sweep.is_none());
    }

    #[test]
    fn unknown_key_rejected() {
        let e = resolve_str("[model]\nkapa = \"1 MHz\"\n").unwrap_err();
        assert!(e.to_string().contains("kapa"), "{e}");
    }

    #[test]
    fn missing_unit_names_key_and_line() {
        let e = resolve_str("[model]\nbase = \"figs123\"\nkappa = 0.3\n").unwrap_err();
        let msg = e.to_string();
        assert!(
            msg.contains("line 3") && msg.contains("model.kappa") && msg.contains("missing unit"),
            "{msg}"
        );
    }

    #[test]
    fn missing_required_key() {
        let e = resolve_str("[model]\nkappa = \"1 MHz\"\n").unwrap_err();
        assert!(matches!(e, ConfigError::Missing { .. }), "{e}");
    }

    #[test]
    fn temperature_converts_to_occupancy() {
        let r = resolve_str("[model]\nbase = \"figs123\"\ntemperature = \"77.17 mK\"\n").unwrap();
        assert!((r.params.nbar_m[0] - 100.0).abs() < 0.1, "{}", r.params.nbar_m[0]);
    }

    #[test]
    fn sweep_axes_and_overrides() {
        let src = r#"
[sweep]
preset = "fig2"
directions = "ccw"
measures = ["entanglement"]

[[sweep.axis]]
name = "delta_theta_cw"
values = ["0 pi", "1 pi"]

[output]
workers = 3
timestamp = false
"#;
        let r = resolve_str(src).unwrap();
        let s = r.sweep.unwrap();
        assert_eq!(s.directions, vec![Direction::Ccw]);
        assert_eq!(s.axes[0].values, vec![0.0, PI]);
        assert!(s.measures.entanglement && !s.measures.steering);
        assert_eq!((r.workers, r.timestamp), (Some(3), false));
        assert_eq!(s.base, figs123_params());
    }

    #[test]
    fn bad_axis_unit() {
        let src = "[model]\nbase = \"fig4\"\n[[sweep.axis]]\nname = \"delta_c\"\nrange = [0.5, 1.5]\npoints = 11\n";
        let e = resolve_str(src).unwrap_err();
        assert!(e.to_string().contains("sweep.axis.range"), "{e}");
    }

    #[test]
    fn preset_override_without_file() {
        let ov = Overrides {
            preset: Some("fig4".into()),
            ..Default::default()
        };
        let r = resolve(None, &ov).unwrap();
        assert_eq!(r.sweep.unwrap().n_points(), 4 * 401);
        let ov = Overrides {
            preset: Some("fig5".into()),
            ..Default::default()
        };
        assert!(resolve(None, &ov).is_err());
    }
}
