//! Self-consistent steady-state mean fields and the effective detuning that
//! enters the linearized dynamics.

use num_complex::Complex;
use thiserror::Error;

use crate::model::{DerivedQuantities, Drive, ModelError, ModelParams, ValidityWarning};
use crate::scalar::{cabs, imag_unit, phase, scale, to_f64, Real};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SteadyStateError {
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error("mean-field iteration did not converge after {iterations} iterations (last residual {residual:e})")]
    NonConvergence { iterations: usize, residual: f64 },
    #[error("degenerate mechanical denominator: lambda^2 = omega_m1 * omega_m2")]
    DegenerateDenominator,
    #[error("too close to the optical pole: |beta_p| = {beta_p:e} vs sqrt(delta_s^2 + kappa^2/4) = {scale:e}")]
    PoleProximity { beta_p: f64, scale: f64 },
    #[error("mean-field solve requires a physical drive (bare couplings and drive amplitude)")]
    NotPhysicalDrive,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SolverOptions<T> {
    pub tol: T,
    pub max_iter: usize,
    /// Weight of the new iterate in the damped update.
    pub mixing: T,
    /// Largest admissible `|beta_p| / sqrt(delta_s^2 + kappa^2/4)`.
    pub pole_guard: T,
}

impl<T: Real> Default for SolverOptions<T> {
    fn default() -> Self {
        SolverOptions {
            tol: T::lit(1e-12),
            max_iter: 10_000,
            mixing: T::lit(0.5),
            pole_guard: T::lit(0.1),
        }
    }
}

/// Auxiliary coefficients that accompany the mean-field solution.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MeanFieldAux<T> {
    pub delta_s: T,
    pub alpha_s: T,
    pub beta_s: T,
    pub beta_p: T,
    pub a1: Complex<T>,
    pub a2: Complex<T>,
    pub b: [T; 2],
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MeanField<T> {
    pub a_s: Complex<T>,
    pub q: [T; 2],
    /// Always exactly zero.
    pub p: [T; 2],
    pub aux: MeanFieldAux<T>,
    pub iterations: usize,
    pub residual: T,
}

/// Everything the linearized moment equations need for one parameter point.
#[derive(Debug, Clone, PartialEq)]
pub struct OperatingPoint<T> {
    pub derived: DerivedQuantities<T>,
    pub delta_s: T,
    pub mean_field: Option<MeanField<T>>,
    pub warnings: Vec<ValidityWarning>,
}

/// `Delta_s = omega_s - beta_s`.
pub fn effective_detuning<T: Real>(omega_s: T, beta_s: T) -> T {
    omega_s - beta_s
}

struct MeanFieldMap<T> {
    kappa: T,
    omega_m: [T; 2],
    lambda: T,
    omega_s: T,
    zeta_s: [T; 2],
    zeta_p: [T; 2],
    f_drive: [T; 2],
    theta_d: T,
    epsilon_d: Complex<T>,
    a1: Complex<T>,
    a2: Complex<T>,
    det: T,
}

impl<T: Real> MeanFieldMap<T> {
    fn new(params: &ModelParams<T>, epsilon_d: Complex<T>) -> Result<Self, SteadyStateError> {
        let d = DerivedQuantities::new(params, [Complex::new(T::zero(), T::zero()); 2]);
        let (sh, ch) = (params.r_d.sinh(), params.r_d.cosh());
        let det = params.omega_m[0] * params.omega_m[1] - params.lambda_hop * params.lambda_hop;
        let scale_m = params.omega_m[0] * params.omega_m[1];
        if det.abs() <= T::default_epsilon() * T::lit(16.0) * scale_m {
            return Err(SteadyStateError::DegenerateDenominator);
        }
        Ok(MeanFieldMap {
            kappa: params.kappa,
            omega_m: params.omega_m,
            lambda: params.lambda_hop,
            omega_s: d.omega_s,
            zeta_s: d.zeta_s,
            zeta_p: d.zeta_p,
            f_drive: d.f_drive,
            theta_d: params.theta_d,
            epsilon_d,
            a1: Complex::new(ch, T::zero()) + scale(phase(-params.theta_d), sh),
            a2: scale(phase(-params.theta_d), ch) + Complex::new(sh, T::zero()),
            det,
        })
    }

    fn shifts(&self, q: [T; 2]) -> (T, T) {
        (
            self.zeta_s[0] * q[0] + self.zeta_s[1] * q[1],
            self.zeta_p[0] * q[0] + self.zeta_p[1] * q[1],
        )
    }

    /// Optical amplitude for given mechanical displacements.
    fn amplitude(&self, q: [T; 2]) -> (Complex<T>, MeanFieldAux<T>) {
        let (beta_s, beta_p) = self.shifts(q);
        let delta_s = effective_detuning(self.omega_s, beta_s);
        let half_k = self.kappa * T::lit(0.5);
        let den = delta_s * delta_s + half_k * half_k - beta_p * beta_p;
        let i = imag_unit::<T>();
        let num = (scale(i, delta_s) - Complex::new(half_k, T::zero())) * self.a1 + scale(i * self.a2, beta_p);
        let a_s = -(num * self.epsilon_d) / Complex::new(den, T::zero());
        let aux = MeanFieldAux {
            delta_s,
            alpha_s: T::zero(),
            beta_s,
            beta_p,
            a1: self.a1,
            a2: self.a2,
            b: [T::zero(); 2],
        };
        (a_s, aux)
    }

    /// Mechanical displacements for a given optical amplitude.
    fn displacement(&self, a_s: Complex<T>, aux: &mut MeanFieldAux<T>) -> [T; 2] {
        let two = T::lit(2.0);
        let alpha = two * (phase(self.theta_d) * a_s * a_s).re;
        let n = a_s.norm_sqr();
        let b = [
            self.zeta_s[0] * n - self.zeta_p[0] / two * alpha + self.f_drive[0],
            self.zeta_s[1] * n - self.zeta_p[1] / two * alpha + self.f_drive[1],
        ];
        aux.alpha_s = alpha;
        aux.b = b;
        [
            (self.omega_m[1] * b[0] - self.lambda * b[1]) / self.det,
            (self.omega_m[0] * b[1] - self.lambda * b[0]) / self.det,
        ]
    }

    fn apply(&self, q: [T; 2]) -> (Complex<T>, [T; 2], MeanFieldAux<T>) {
        let (a_s, mut aux) = self.amplitude(q);
        let q_new = self.displacement(a_s, &mut aux);
        (a_s, q_new, aux)
    }
}

/// Solves the steady-state mean values by damped fixed-point iteration on
/// `(a_s, q_1, q_2)`, starting from the linear (`beta = 0`) optical solution
/// with `q = 0`.
pub fn solve_mean_field<T: Real>(
    params: &ModelParams<T>,
    opts: &SolverOptions<T>,
) -> Result<MeanField<T>, SteadyStateError> {
    let epsilon_d = match params.drive {
        Drive::Physical { epsilon_d, .. } => epsilon_d,
        Drive::Effective { .. } => return Err(SteadyStateError::NotPhysicalDrive),
    };
    let map = MeanFieldMap::new(params, epsilon_d)?;

    let mut q = [T::zero(); 2];
    let (mut a_s, _) = map.amplitude(q);
    let mix = opts.mixing;
    let keep = T::one() - mix;
    let mut residual = T::max_value().unwrap_or(T::lit(f64::MAX));
    for it in 1..=opts.max_iter {
        let (_, q_map, _) = map.apply(q);
        let (a_map, _) = map.amplitude(q_map);
        residual = cabs(a_map - a_s)
            .max((q_map[0] - q[0]).abs())
            .max((q_map[1] - q[1]).abs());
        if !residual.is_finite() {
            break;
        }
        if residual < opts.tol {
            q = q_map;
            let (a_fin, mut aux) = map.amplitude(q);
            map.displacement(a_fin, &mut aux);
            let half_k = params.kappa * T::lit(0.5);
            let pole = (aux.delta_s * aux.delta_s + half_k * half_k).sqrt();
            if aux.beta_p.abs() >= opts.pole_guard * pole {
                return Err(SteadyStateError::PoleProximity {
                    beta_p: to_f64(aux.beta_p),
                    scale: to_f64(pole),
                });
            }
            return Ok(MeanField {
                a_s: a_fin,
                q,
                p: [T::zero(); 2],
                aux,
                iterations: it,
                residual,
            });
        }
        a_s = scale(a_s, keep) + scale(a_map, mix);
        q = [keep * q[0] + mix * q_map[0], keep * q[1] + mix * q_map[1]];
    }
    Err(SteadyStateError::NonConvergence {
        iterations: opts.max_iter,
        residual: to_f64(residual),
    })
}

/// Validates `params` and produces the linearization point: effective
/// quantities plus `Delta_s`.
///
/// In effective-drive mode the optomechanical shift is the configured
/// `beta_s` (zero unless overridden), so `Delta_s = omega_s - beta_s`.
pub fn operating_point<T: Real>(
    params: &ModelParams<T>,
    opts: &SolverOptions<T>,
) -> Result<OperatingPoint<T>, SteadyStateError> {
    let warnings = params.validate()?;
    match params.drive {
        Drive::Effective { g, beta_s } => {
            let derived = DerivedQuantities::new(params, g);
            Ok(OperatingPoint {
                delta_s: effective_detuning(derived.omega_s, beta_s),
                derived,
                mean_field: None,
                warnings,
            })
        }
        Drive::Physical { g0, .. } => {
            let mf = solve_mean_field(params, opts)?;
            let g = [scale(mf.a_s, g0[0]), scale(mf.a_s, g0[1])];
            let derived = DerivedQuantities::new(params, g);
            Ok(OperatingPoint {
                delta_s: mf.aux.delta_s,
                derived,
                mean_field: Some(mf),
                warnings,
            })
        }
    }
}
