//! Ready-made sweeps for the figure datasets.

use std::f64::consts::PI;

use super::{Axis, AxisName, MeasureSet, SweepError, SweepSpec, Tolerances};
use crate::model::units::FrequencyUnit;
use crate::model::{Direction, Drive, ModelParams, PerDirection, Reservoir};
use crate::steadystate::SolverOptions;

/// Mechanical frequency the dimensionless units refer to.
pub const UNIT_MHZ: f64 = 16.0;

pub const PRESET_NAMES: [&str; 9] = [
    "fig1b",
    "fig1c",
    "fig1d",
    "fig2",
    "fig2-density",
    "fig2-temperature",
    "fig3",
    "fig4",
    "fig4-regimes",
];

/// `r_d` values used where only "different squeezing strengths" are given.
pub const R_D_LIST: [f64; 4] = [0.05, 0.1, 0.2, 0.3];

/// Resolved-sideband set: κ/2π = 4.9 MHz, Q = 1e5, G/2π = 0.16, 0.21 MHz,
/// λ/2π = 0.32 MHz, n̄ = 100; CCW phase matched, CW mismatched by
/// `(δr, δθ) = (0.4, π)`; Δ_c = ω_m, r_d = 0.1, θ_d = π.
pub fn figs123_params() -> ModelParams<f64> {
    let u = FrequencyUnit::new(UNIT_MHZ);
    ModelParams {
        kappa: u.from_mhz(4.9),
        omega_m: [1.0, 1.0],
        gamma_m: [1e-5, 1e-5],
        nbar_m: [100.0, 100.0],
        lambda_hop: u.from_mhz(0.32),
        delta_c: 1.0,
        r_d: 0.1,
        theta_d: PI,
        reservoir: PerDirection {
            ccw: Reservoir::matched(),
            cw: Reservoir::Mismatch {
                delta_r: 0.4,
                delta_theta: PI,
            },
        },
        drive: Drive::effective(u.from_mhz(0.16), u.from_mhz(0.21)),
        direction: Direction::Ccw,
    }
}

/// Strong-coupling set: κ/2π = 14.4 MHz, Q = 10, G/2π = 1.6, 2.1 MHz,
/// λ/2π = 4.8 MHz, n̄ = 0.9; r_d = 0.2, θ_d = π, Δ_c = 1.2 ω_m.
pub fn fig4_params() -> ModelParams<f64> {
    let u = FrequencyUnit::new(UNIT_MHZ);
    ModelParams {
        kappa: u.from_mhz(14.4),
        gamma_m: [0.1, 0.1],
        nbar_m: [0.9, 0.9],
        lambda_hop: u.from_mhz(4.8),
        delta_c: 1.2,
        r_d: 0.2,
        drive: Drive::effective(u.from_mhz(1.6), u.from_mhz(2.1)),
        ..figs123_params()
    }
}

fn detuning_axis() -> Axis {
    Axis::linspace(AxisName::DeltaC, 0.5, 1.5, 401)
}

fn spec(base: ModelParams<f64>, axes: Vec<Axis>, directions: &[Direction], measures: MeasureSet) -> SweepSpec {
    SweepSpec {
        base,
        axes,
        directions: directions.to_vec(),
        measures,
        solver: SolverOptions::default(),
        tolerances: Tolerances::default(),
        frequency_unit: FrequencyUnit::new(UNIT_MHZ),
    }
}

pub fn figure_preset(name: &str) -> Result<SweepSpec, SweepError> {
    let both = &Direction::BOTH;
    let derived_only = MeasureSet {
        derived: true,
        ..MeasureSet::none()
    };
    let states = MeasureSet {
        covariance: false,
        ..MeasureSet::all()
    };
    let s = match name {
        "fig1b" => spec(
            figs123_params(),
            vec![
                Axis::linspace(AxisName::RD, 0.0, 1.0, 101),
                Axis::linspace(AxisName::ThetaD, 0.0, 2.0 * PI, 101),
            ],
            &[Direction::Ccw],
            derived_only,
        ),
        "fig1c" => spec(
            figs123_params(),
            vec![
                Axis::list(AxisName::DeltaR(Direction::Cw), &[0.0, 0.2, 0.4]),
                Axis::linspace(AxisName::DeltaTheta(Direction::Cw), 0.0, 2.0 * PI, 201),
            ],
            &[Direction::Cw],
            derived_only,
        ),
        "fig1d" => spec(
            figs123_params(),
            vec![Axis::list(AxisName::GScale, &[0.0, 1.0])],
            both,
            MeasureSet::all(),
        ),
        "fig2" => spec(figs123_params(), vec![detuning_axis()], both, states),
        "fig2-density" => spec(
            figs123_params(),
            vec![
                Axis::linspace(AxisName::DeltaR(Direction::Cw), 0.0, 0.5, 101),
                Axis::linspace(AxisName::DeltaTheta(Direction::Cw), 0.0, 2.0 * PI, 101),
            ],
            both,
            MeasureSet {
                entanglement: true,
                ..MeasureSet::none()
            },
        ),
        "fig2-temperature" => spec(
            figs123_params(),
            vec![Axis::linspace(AxisName::TemperatureMk, 10.0, 150.0, 141)],
            both,
            MeasureSet {
                entanglement: true,
                ..MeasureSet::none()
            },
        ),
        "fig3" => spec(
            figs123_params(),
            vec![Axis::list(AxisName::RD, &R_D_LIST), detuning_axis()],
            both,
            states,
        ),
        "fig4" => spec(
            fig4_params(),
            vec![Axis::list(AxisName::RD, &R_D_LIST), detuning_axis()],
            both,
            states,
        ),
        "fig4-regimes" => spec(
            fig4_params(),
            vec![Axis::linspace(AxisName::RD, 0.0, 0.5, 51)],
            both,
            MeasureSet {
                steering: true,
                entanglement: true,
                ..MeasureSet::none()
            },
        ),
        other => return Err(SweepError::UnknownPreset(other.to_string())),
    };
    Ok(s)
}
