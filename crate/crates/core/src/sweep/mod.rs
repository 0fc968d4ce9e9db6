//! Parameter grids over one or two axes, evaluated for one or both drive
//! directions, with CCW/CW asymmetry ratios and steering-regime transitions.

mod presets;

pub use presets::{fig4_params, figs123_params, figure_preset, PRESET_NAMES, R_D_LIST, UNIT_MHZ};

use std::fmt;
use std::str::FromStr;

use num_complex::Complex;
use rayon::prelude::*;
use thiserror::Error;

use crate::gaussian::{assemble_cm, measure_report, CovarianceMatrix, MeasureReport, SteeringRegime, STEERING_ZERO};
use crate::model::units::{thermal_occupancy, FrequencyUnit};
use crate::model::{Direction, Drive, ModelParams, Reservoir};
use crate::moments::{drift_system, stability_threshold, steady_moments, DriftInputs};
use crate::steadystate::{operating_point, SolverOptions, SteadyStateError};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SweepError {
    #[error("unknown preset '{0}'")]
    UnknownPreset(String),
    #[error("unknown axis '{0}'")]
    UnknownAxis(String),
    #[error("invalid sweep spec: {0}")]
    InvalidSpec(String),
    #[error("could not start worker pool: {0}")]
    Pool(String),
}

/// Sweepable parameters.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum AxisName {
    /// Optical detuning in units of the mechanical frequency.
    DeltaC,
    RD,
    ThetaD,
    DeltaR(Direction),
    DeltaTheta(Direction),
    /// Mechanical bath temperature in mK, converted to an occupancy per point.
    TemperatureMk,
    NbarM,
    /// Multiplies the optomechanical couplings of the base drive.
    GScale,
}

impl AxisName {
    pub const ALL: [AxisName; 10] = [
        AxisName::DeltaC,
        AxisName::RD,
        AxisName::ThetaD,
        AxisName::DeltaR(Direction::Ccw),
        AxisName::DeltaR(Direction::Cw),
        AxisName::DeltaTheta(Direction::Ccw),
        AxisName::DeltaTheta(Direction::Cw),
        AxisName::TemperatureMk,
        AxisName::NbarM,
        AxisName::GScale,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            AxisName::DeltaC => "delta_c",
            AxisName::RD => "r_d",
            AxisName::ThetaD => "theta_d",
            AxisName::DeltaR(Direction::Ccw) => "delta_r_ccw",
            AxisName::DeltaR(Direction::Cw) => "delta_r_cw",
            AxisName::DeltaTheta(Direction::Ccw) => "delta_theta_ccw",
            AxisName::DeltaTheta(Direction::Cw) => "delta_theta_cw",
            AxisName::TemperatureMk => "temperature_mk",
            AxisName::NbarM => "nbar_m",
            AxisName::GScale => "g_scale",
        }
    }
}

impl fmt::Display for AxisName {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for AxisName {
    type Err = SweepError;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        AxisName::ALL
            .into_iter()
            .find(|a| a.as_str() == s)
            .ok_or_else(|| SweepError::UnknownAxis(s.to_string()))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Axis {
    pub name: AxisName,
    pub values: Vec<f64>,
}

impl Axis {
    /// `n >= 2` evenly spaced points including both ends.
    pub fn linspace(name: AxisName, lo: f64, hi: f64, n: usize) -> Self {
        let values = (0..n)
            .map(|k| {
                if k + 1 == n {
                    hi
                } else {
                    lo + (hi - lo) * k as f64 / (n - 1) as f64
                }
            })
            .collect();
        Axis { name, values }
    }

    pub fn list(name: AxisName, values: &[f64]) -> Self {
        Axis {
            name,
            values: values.to_vec(),
        }
    }
}

/// Which outputs a sweep computes. With everything off, rows carry only the
/// stability status.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct MeasureSet {
    /// Pairwise log-negativities and asymmetry ratios.
    pub entanglement: bool,
    pub steering: bool,
    /// One-vs-two contangles and the minimum residual contangle.
    pub residual: bool,
    /// Effective quantities: Δ_s, N_s, M_s, Π_j.
    pub derived: bool,
    pub covariance: bool,
}

impl MeasureSet {
    pub fn all() -> Self {
        MeasureSet {
            entanglement: true,
            steering: true,
            residual: true,
            derived: true,
            covariance: true,
        }
    }

    pub fn none() -> Self {
        MeasureSet::default()
    }

    fn needs_state(&self) -> bool {
        self.entanglement || self.steering || self.residual || self.covariance
    }

    fn needs_measures(&self) -> bool {
        self.entanglement || self.steering || self.residual
    }
}

/// Decision thresholds used when turning numbers into flags.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Tolerances {
    /// A point is stable when the spectral abscissa is below this.
    pub stability: f64,
    pub steering_zero: f64,
    /// Used by the asymmetry ratio.
    pub entanglement_zero: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Tolerances {
            stability: stability_threshold(),
            steering_zero: STEERING_ZERO,
            entanglement_zero: ENTANGLEMENT_ZERO,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepSpec {
    pub base: ModelParams<f64>,
    pub axes: Vec<Axis>,
    pub directions: Vec<Direction>,
    pub measures: MeasureSet,
    pub solver: SolverOptions<f64>,
    pub tolerances: Tolerances,
    /// Laboratory value of the unit frequency, used by temperature axes.
    pub frequency_unit: FrequencyUnit,
}

impl SweepSpec {
    pub fn validate(&self) -> Result<(), SweepError> {
        let bad = |m: String| Err(SweepError::InvalidSpec(m));
        if self.axes.is_empty() || self.axes.len() > 2 {
            return bad(format!("expected 1 or 2 axes, got {}", self.axes.len()));
        }
        if self.axes.len() == 2 && self.axes[0].name == self.axes[1].name {
            return bad(format!("axis {} given twice", self.axes[0].name));
        }
        for ax in &self.axes {
            if ax.values.is_empty() {
                return bad(format!("axis {} has no points", ax.name));
            }
            if ax.values.iter().any(|v| !v.is_finite()) {
                return bad(format!("axis {} has a non-finite value", ax.name));
            }
        }
        if self.directions.is_empty() {
            return bad("no drive direction selected".into());
        }
        Ok(())
    }

    pub fn n_points(&self) -> usize {
        self.axes.iter().map(|a| a.values.len()).product()
    }
}

/// Applies one axis value to a parameter set.
pub fn apply_axis(
    params: &mut ModelParams<f64>,
    name: AxisName,
    value: f64,
    unit: FrequencyUnit,
) -> Result<(), String> {
    match name {
        AxisName::DeltaC => params.delta_c = value,
        AxisName::RD => params.r_d = value,
        AxisName::ThetaD => params.theta_d = value,
        AxisName::DeltaR(dir) | AxisName::DeltaTheta(dir) => {
            let (r_d, theta_d) = (params.r_d, params.theta_d);
            let res = params.reservoir.get_mut(dir);
            let (mut dr, mut dth) = match *res {
                Reservoir::Mismatch { delta_r, delta_theta } => (delta_r, delta_theta),
                Reservoir::Absolute { r_e, theta_e } => (r_e - r_d, theta_e - theta_d),
            };
            if matches!(name, AxisName::DeltaR(_)) {
                dr = value;
            } else {
                dth = value;
            }
            *res = Reservoir::Mismatch {
                delta_r: dr,
                delta_theta: dth,
            };
        }
        AxisName::TemperatureMk => {
            for j in 0..2 {
                let omega = unit.angular() * params.omega_m[j];
                params.nbar_m[j] = thermal_occupancy(omega, value * 1e-3).map_err(|e| e.to_string())?;
            }
        }
        AxisName::NbarM => params.nbar_m = [value; 2],
        AxisName::GScale => {
            params.drive = match params.drive {
                Drive::Effective { g, beta_s } => Drive::Effective {
                    g: [g[0] * value, g[1] * value],
                    beta_s,
                },
                Drive::Physical { g0, epsilon_d } => Drive::Physical {
                    g0: [g0[0] * value, g0[1] * value],
                    epsilon_d,
                },
            };
        }
    }
    Ok(())
}

#[derive(Debug, Clone, PartialEq)]
pub enum RowStatus {
    Ok,
    /// Drift matrix failed the Hurwitz check; no measures are reported.
    Unstable,
    /// Parameters rejected by validation.
    Invalid(String),
    /// Mean-field, linear-solve or measure failure.
    Failed(String),
}

impl RowStatus {
    pub fn label(&self) -> &'static str {
        match self {
            RowStatus::Ok => "ok",
            RowStatus::Unstable => "unstable",
            RowStatus::Invalid(_) => "invalid",
            RowStatus::Failed(_) => "failed",
        }
    }

    pub fn detail(&self) -> Option<&str> {
        match self {
            RowStatus::Invalid(m) | RowStatus::Failed(m) => Some(m),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DerivedSummary {
    pub delta_s: f64,
    pub omega_s: f64,
    pub n_s: f64,
    pub m_s: Complex<f64>,
    pub pi_factor: [Option<f64>; 2],
}

/// Everything computed at one parameter point for one direction.
#[derive(Debug, Clone, PartialEq)]
pub struct PointResult {
    pub status: RowStatus,
    pub spectral_abscissa: Option<f64>,
    pub derived: Option<DerivedSummary>,
    pub report: Option<MeasureReport<f64>>,
    pub cm: Option<CovarianceMatrix<f64>>,
}

impl PointResult {
    fn bare(status: RowStatus) -> Self {
        PointResult {
            status,
            spectral_abscissa: None,
            derived: None,
            report: None,
            cm: None,
        }
    }
}

/// Runs the full chain at one point: effective quantities, operating point,
/// drift system, stability gate, steady moments, covariance matrix, measures.
pub fn evaluate_point(
    params: &ModelParams<f64>,
    measures: &MeasureSet,
    solver: &SolverOptions<f64>,
    tol: &Tolerances,
) -> PointResult {
    let op = match operating_point(params, solver) {
        Ok(op) => op,
        Err(SteadyStateError::Model(e)) => return PointResult::bare(RowStatus::Invalid(e.to_string())),
        Err(e) => return PointResult::bare(RowStatus::Failed(e.to_string())),
    };
    let derived = measures.derived.then_some(DerivedSummary {
        delta_s: op.delta_s,
        omega_s: op.derived.omega_s,
        n_s: op.derived.n_s,
        m_s: op.derived.m_s,
        pi_factor: op.derived.pi_factor,
    });
    let (system, _) = drift_system(&DriftInputs::new(&op, params));
    let mut out = PointResult {
        status: RowStatus::Ok,
        spectral_abscissa: Some(system.spectral_abscissa),
        derived,
        report: None,
        cm: None,
    };
    if !(system.spectral_abscissa < tol.stability) {
        out.status = RowStatus::Unstable;
        return out;
    }
    if !measures.needs_state() {
        return out;
    }
    let cm = match steady_moments(&system)
        .map_err(|e| e.to_string())
        .and_then(|x| assemble_cm(&x).map_err(|e| e.to_string()))
    {
        Ok(cm) => cm,
        Err(e) => {
            out.status = RowStatus::Failed(e);
            return out;
        }
    };
    if measures.needs_measures() {
        match measure_report(&cm) {
            Ok(mut r) => {
                for s in &mut r.steering {
                    s.regime = SteeringRegime::classify(s.forward, s.backward, tol.steering_zero);
                }
                out.report = Some(r)
            }
            Err(e) => {
                out.status = RowStatus::Failed(e.to_string());
                return out;
            }
        }
    }
    if measures.covariance {
        out.cm = Some(cm);
    }
    out
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepRow {
    /// Grid index in axis-major order (shared by both directions).
    pub point: usize,
    pub axis_values: Vec<f64>,
    pub direction: Direction,
    pub result: PointResult,
    /// `I_j` for `j = 1, 2`, present when both directions were computed and
    /// the CCW negativity is nonzero.
    pub asymmetry: [Option<f64>; 2],
}

impl SweepRow {
    pub fn is_ok(&self) -> bool {
        self.result.status == RowStatus::Ok
    }

    pub fn report(&self) -> Option<&MeasureReport<f64>> {
        self.result.report.as_ref()
    }
}

/// Entanglement values at or below this count as zero for the asymmetry ratio.
pub const ENTANGLEMENT_ZERO: f64 = 1e-12;

/// `(e_ccw - e_cw) / e_ccw`, absent when `e_ccw` is zero.
pub fn asymmetry_ratio(e_ccw: f64, e_cw: f64) -> Option<f64> {
    asymmetry_ratio_with(e_ccw, e_cw, ENTANGLEMENT_ZERO)
}

pub fn asymmetry_ratio_with(e_ccw: f64, e_cw: f64, zero: f64) -> Option<f64> {
    (e_ccw > zero).then(|| (e_ccw - e_cw) / e_ccw)
}

fn grid(spec: &SweepSpec) -> Vec<Vec<f64>> {
    match spec.axes.as_slice() {
        [a] => a.values.iter().map(|&v| vec![v]).collect(),
        [a, b] => a
            .values
            .iter()
            .flat_map(|&u| b.values.iter().map(move |&v| vec![u, v]))
            .collect(),
        _ => Vec::new(),
    }
}

/// Evaluates every grid point for every requested direction. Rows come out
/// in axis-major order (first axis slowest, directions fastest) regardless of
/// `workers`; per-point failures are recorded in the row status.
pub fn run_sweep(spec: &SweepSpec, workers: usize) -> Result<Vec<SweepRow>, SweepError> {
    spec.validate()?;
    let points = grid(spec);
    let jobs: Vec<(usize, Direction)> = (0..points.len())
        .flat_map(|p| spec.directions.iter().map(move |&d| (p, d)))
        .collect();

    let eval = |&(p, dir): &(usize, Direction)| {
        let mut params = spec.base;
        params.direction = dir;
        let mut status = None;
        for (ax, &v) in spec.axes.iter().zip(&points[p]) {
            if let Err(e) = apply_axis(&mut params, ax.name, v, spec.frequency_unit) {
                status = Some(RowStatus::Invalid(e));
            }
        }
        let result = match status {
            Some(s) => PointResult::bare(s),
            None => evaluate_point(&params, &spec.measures, &spec.solver, &spec.tolerances),
        };
        SweepRow {
            point: p,
            axis_values: points[p].clone(),
            direction: dir,
            result,
            asymmetry: [None, None],
        }
    };

    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(workers.max(1))
        .build()
        .map_err(|e| SweepError::Pool(e.to_string()))?;
    let mut rows: Vec<SweepRow> = pool.install(|| jobs.par_iter().map(eval).collect());

    if spec.measures.entanglement {
        fill_asymmetry(&mut rows, spec.tolerances.entanglement_zero);
    }
    Ok(rows)
}

fn fill_asymmetry(rows: &mut [SweepRow], zero: f64) {
    let mut start = 0;
    while start < rows.len() {
        let p = rows[start].point;
        let end = start + rows[start..].iter().take_while(|r| r.point == p).count();
        let find = |d: Direction| {
            rows[start..end]
                .iter()
                .find(|r| r.direction == d)
                .and_then(|r| r.report().map(|m| m.e_n))
        };
        if let (Some(ccw), Some(cw)) = (find(Direction::Ccw), find(Direction::Cw)) {
            let ratios = [
                asymmetry_ratio_with(ccw[0], cw[0], zero),
                asymmetry_ratio_with(ccw[1], cw[1], zero),
            ];
            for r in &mut rows[start..end] {
                r.asymmetry = ratios;
            }
        }
        start = end;
    }
}

/// Regimes along an increasing parameter and the points where they change.
#[derive(Debug, Clone, PartialEq)]
pub struct Transition {
    /// Consecutive duplicates removed.
    pub sequence: Vec<SteeringRegime>,
    /// `(midpoint, from, to)` for each change.
    pub thresholds: Vec<(f64, SteeringRegime, SteeringRegime)>,
}

/// Orders `(parameter, regime)` samples by parameter and collapses them into
/// a regime sequence with midpoint thresholds.
pub fn classify_transition(samples: &[(f64, SteeringRegime)]) -> Transition {
    let mut s = samples.to_vec();
    s.sort_by(|a, b| a.0.total_cmp(&b.0));
    let mut sequence = Vec::new();
    let mut thresholds = Vec::new();
    for (k, &(x, reg)) in s.iter().enumerate() {
        match sequence.last() {
            None => sequence.push(reg),
            Some(&prev) if prev != reg => {
                thresholds.push((0.5 * (s[k - 1].0 + x), prev, reg));
                sequence.push(reg);
            }
            _ => {}
        }
    }
    Transition { sequence, thresholds }
}

/// Strongest steering regime reached anywhere in a set of rows for the given
/// bipartition index (order of [`crate::gaussian::PAIRS`]).
pub fn strongest_regime<'a>(rows: impl IntoIterator<Item = &'a SweepRow>, pair: usize) -> SteeringRegime {
    let rank = |r: SteeringRegime| match r {
        SteeringRegime::NoWay => 0,
        SteeringRegime::OneWay => 1,
        SteeringRegime::TwoWay => 2,
    };
    rows.into_iter()
        .filter_map(|r| r.report().map(|m| m.steering[pair].regime))
        .max_by_key(|&r| rank(r))
        .unwrap_or(SteeringRegime::NoWay)
}
