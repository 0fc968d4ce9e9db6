//! Steady-state Gaussian states of a squeezed three-mode optomechanical
//! system: one squeezed optical mode coupled to two mechanical modes, driven
//! from either propagation direction of a whispering-gallery resonator.
//!
//! The pipeline runs
//! [`model`] (closed-form effective quantities) →
//! [`steadystate`] (mean fields, effective detuning) →
//! [`moments`] (24-moment drift system, steady state, integration oracle) →
//! [`gaussian`] (covariance matrix, negativity, contangle, steering) →
//! [`sweep`] (parameter grids, presets, asymmetry ratios).
//!
//! The numerical core is generic over [`Real`] (`f32` or `f64`); the aliases
//! below fix it to `f64`, which is what the sweep engine uses.

pub mod gaussian;
pub mod model;
pub mod moments;
pub mod scalar;
pub mod steadystate;
pub mod sweep;

pub use scalar::Real;

pub type Complex64 = num_complex::Complex<f64>;

pub type ModelParams = model::ModelParams<f64>;
pub type DerivedQuantities = model::DerivedQuantities<f64>;
pub type MeanField = steadystate::MeanField<f64>;
pub type OperatingPoint = steadystate::OperatingPoint<f64>;
pub type DriftInputs = moments::DriftInputs<f64>;
pub type DriftSystem = moments::DriftSystem<f64>;
pub type MomentVector = moments::MomentVector<f64>;
pub type CovarianceMatrix = gaussian::CovarianceMatrix<f64>;
pub type MeasureReport = gaussian::MeasureReport<f64>;

pub type ModelParams32 = model::ModelParams<f32>;
pub type CovarianceMatrix32 = gaussian::CovarianceMatrix<f32>;
pub type DriftSystem32 = moments::DriftSystem<f32>;
