//! Physical parameters and the closed-form effective quantities of the
//! squeezed-mode picture.
//!
//! All frequencies and rates are dimensionless, measured in units of the
//! first mechanical frequency. Conversion from laboratory units lives in
//! [`units`].

pub mod units;

use std::fmt;

use num_complex::Complex;
use thiserror::Error;

use crate::scalar::{cabs, phase, scale, to_f64, Real};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ModelError {
    #[error("{name} must be > 0 (got {value})")]
    NonPositive { name: &'static str, value: f64 },
    #[error("{name} must be >= 0 (got {value})")]
    Negative { name: &'static str, value: f64 },
    #[error("{name} is not finite")]
    NonFinite { name: &'static str },
    #[error("pump amplitude out of range: |2 xi_d| = {two_xi} must stay below delta_c = {delta_c}")]
    PumpOutOfRange { two_xi: f64, delta_c: f64 },
}

/// Input port of the coherent drive, which selects the resonator mode
/// (counterclockwise or clockwise) that the mechanics couple to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Direction {
    Ccw,
    Cw,
}

impl Direction {
    /// Canonical output order.
    pub const BOTH: [Direction; 2] = [Direction::Ccw, Direction::Cw];

    pub fn as_str(self) -> &'static str {
        match self {
            Direction::Ccw => "ccw",
            Direction::Cw => "cw",
        }
    }
}

impl fmt::Display for Direction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl std::str::FromStr for Direction {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "ccw" => Ok(Direction::Ccw),
            "cw" => Ok(Direction::Cw),
            other => Err(format!("unknown direction '{other}' (expected cw or ccw)")),
        }
    }
}

/// One value per propagation direction.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PerDirection<V> {
    pub ccw: V,
    pub cw: V,
}

impl<V> PerDirection<V> {
    pub fn get(&self, dir: Direction) -> &V {
        match dir {
            Direction::Ccw => &self.ccw,
            Direction::Cw => &self.cw,
        }
    }

    pub fn get_mut(&mut self, dir: Direction) -> &mut V {
        match dir {
            Direction::Ccw => &mut self.ccw,
            Direction::Cw => &mut self.cw,
        }
    }
}

/// Squeezed-vacuum reservoir injected into one resonator mode.
///
/// `Mismatch` is stated relative to the intracavity squeezing, so that a
/// phase-matched reservoir stays matched while `r_d` or `theta_d` are swept.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Reservoir<T> {
    Absolute { r_e: T, theta_e: T },
    Mismatch { delta_r: T, delta_theta: T },
}

impl<T: Real> Reservoir<T> {
    /// Phase-matched reservoir: `delta_r = 0`, `delta_theta = pi`.
    pub fn matched() -> Self {
        Reservoir::Mismatch {
            delta_r: T::zero(),
            delta_theta: T::pi(),
        }
    }

    /// No injected squeezing (`r_e = 0`, `theta_e = 0`).
    pub fn none() -> Self {
        Reservoir::Absolute {
            r_e: T::zero(),
            theta_e: T::zero(),
        }
    }

    /// Absolute `(r_e, theta_e)` for the given intracavity squeezing.
    pub fn resolve(&self, r_d: T, theta_d: T) -> (T, T) {
        match *self {
            Reservoir::Absolute { r_e, theta_e } => (r_e, theta_e),
            Reservoir::Mismatch { delta_r, delta_theta } => (r_d + delta_r, theta_d + delta_theta),
        }
    }
}

/// How the linearized optomechanical couplings are obtained.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Drive<T> {
    /// Couplings `G_j` given directly. `beta_s` is the optomechanical shift
    /// subtracted from the squeezed-mode frequency (zero by default).
    Effective { g: [Complex<T>; 2], beta_s: T },
    /// Bare couplings `g_j` and coherent drive amplitude; the mean fields are
    /// solved self-consistently in [`crate::steadystate`].
    Physical { g0: [T; 2], epsilon_d: Complex<T> },
}

impl<T: Real> Drive<T> {
    pub fn effective(g1: T, g2: T) -> Self {
        Drive::Effective {
            g: [Complex::new(g1, T::zero()), Complex::new(g2, T::zero())],
            beta_s: T::zero(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ModelParams<T> {
    /// Optical decay rate.
    pub kappa: T,
    pub omega_m: [T; 2],
    pub gamma_m: [T; 2],
    pub nbar_m: [T; 2],
    /// Phonon-hopping strength between the two mechanical modes.
    pub lambda_hop: T,
    /// Optical detuning of the bare cavity.
    pub delta_c: T,
    /// Intracavity squeezing strength.
    pub r_d: T,
    /// Intracavity squeezing reference angle (radians).
    pub theta_d: T,
    pub reservoir: PerDirection<Reservoir<T>>,
    pub drive: Drive<T>,
    pub direction: Direction,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ValidityWarning {
    /// The two mechanical modes differ in frequency, damping or occupancy;
    /// the cavity-mediated phonon hopping is then questionable.
    NonDegenerateMechanics,
}

impl fmt::Display for ValidityWarning {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ValidityWarning::NonDegenerateMechanics => {
                f.write_str("mechanical modes are not degenerate; phonon hopping may be invalid")
            }
        }
    }
}

fn positive<T: Real>(name: &'static str, v: T) -> Result<(), ModelError> {
    finite(name, v)?;
    if v > T::zero() {
        Ok(())
    } else {
        Err(ModelError::NonPositive { name, value: to_f64(v) })
    }
}

fn non_negative<T: Real>(name: &'static str, v: T) -> Result<(), ModelError> {
    finite(name, v)?;
    if v >= T::zero() {
        Ok(())
    } else {
        Err(ModelError::Negative { name, value: to_f64(v) })
    }
}

fn finite<T: Real>(name: &'static str, v: T) -> Result<(), ModelError> {
    if v.is_finite() {
        Ok(())
    } else {
        Err(ModelError::NonFinite { name })
    }
}

impl<T: Real> ModelParams<T> {
    /// Checks the parameter invariants. Returns soft warnings on success.
    pub fn validate(&self) -> Result<Vec<ValidityWarning>, ModelError> {
        positive("kappa", self.kappa)?;
        positive("omega_m[1]", self.omega_m[0])?;
        positive("omega_m[2]", self.omega_m[1])?;
        positive("gamma_m[1]", self.gamma_m[0])?;
        positive("gamma_m[2]", self.gamma_m[1])?;
        non_negative("nbar_m[1]", self.nbar_m[0])?;
        non_negative("nbar_m[2]", self.nbar_m[1])?;
        finite("lambda", self.lambda_hop)?;
        positive("delta_c", self.delta_c)?;
        non_negative("r_d", self.r_d)?;
        finite("theta_d", self.theta_d)?;
        for dir in Direction::BOTH {
            let (r_e, theta_e) = self.reservoir.get(dir).resolve(self.r_d, self.theta_d);
            non_negative("r_e", r_e)?;
            finite("theta_e", theta_e)?;
        }
        match self.drive {
            Drive::Effective { g, beta_s } => {
                for gj in g {
                    finite("G", gj.re)?;
                    finite("G", gj.im)?;
                }
                finite("beta_s", beta_s)?;
            }
            Drive::Physical { g0, epsilon_d } => {
                finite("g0", g0[0])?;
                finite("g0", g0[1])?;
                finite("epsilon_d", epsilon_d.re)?;
                finite("epsilon_d", epsilon_d.im)?;
            }
        }
        let xi = pump_from_squeezing(self.delta_c, self.r_d);
        let two_xi = (xi + xi).abs();
        if two_xi >= self.delta_c {
            return Err(ModelError::PumpOutOfRange {
                two_xi: to_f64(two_xi),
                delta_c: to_f64(self.delta_c),
            });
        }

        let mut warnings = Vec::new();
        if self.omega_m[0] != self.omega_m[1] || self.gamma_m[0] != self.gamma_m[1] || self.nbar_m[0] != self.nbar_m[1]
        {
            warnings.push(ValidityWarning::NonDegenerateMechanics);
        }
        Ok(warnings)
    }

    /// Absolute reservoir parameters for the active drive direction.
    pub fn active_reservoir(&self) -> (T, T) {
        self.reservoir.get(self.direction).resolve(self.r_d, self.theta_d)
    }
}

/// Closed-form effective quantities for one parameter point and direction.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DerivedQuantities<T> {
    pub xi_d: T,
    pub omega_s: T,
    pub zeta_s: [T; 2],
    pub zeta_p: [T; 2],
    pub f_drive: [T; 2],
    pub n_s: T,
    pub m_s: Complex<T>,
    /// Linearized couplings `G_j` before the squeezing transformation.
    pub g_eff: [Complex<T>; 2],
    pub lambda_eff: [Complex<T>; 2],
    /// `|Lambda_j / G_j|`, absent when `G_j = 0`.
    pub pi_factor: [Option<T>; 2],
    pub r_e: T,
    pub theta_e: T,
    pub delta_r: T,
    pub delta_theta: T,
}

impl<T: Real> DerivedQuantities<T> {
    /// Evaluates every closed form for `params` given the linearized
    /// couplings `g_eff` (taken from the drive in effective mode, or
    /// `g0 * a_s` from the mean-field solution in physical mode).
    pub fn new(params: &ModelParams<T>, g_eff: [Complex<T>; 2]) -> Self {
        let r_d = params.r_d;
        let two_r = r_d + r_d;
        let bare = match params.drive {
            Drive::Physical { g0, .. } => g0,
            Drive::Effective { .. } => [T::zero(); 2],
        };
        let sh = r_d.sinh();
        let (r_e, theta_e) = params.active_reservoir();
        let (n_s, m_s) = reservoir_noise(r_d, params.theta_d, r_e, theta_e);
        let mut lambda_eff = [Complex::new(T::zero(), T::zero()); 2];
        let mut pi_factor = [None; 2];
        for j in 0..2 {
            let (l, p) = effective_coupling(g_eff[j], r_d, params.theta_d);
            lambda_eff[j] = l;
            pi_factor[j] = p;
        }
        DerivedQuantities {
            xi_d: pump_from_squeezing(params.delta_c, r_d),
            omega_s: effective_frequency(params.delta_c, r_d),
            zeta_s: [bare[0] * two_r.cosh(), bare[1] * two_r.cosh()],
            zeta_p: [bare[0] * two_r.sinh(), bare[1] * two_r.sinh()],
            f_drive: [bare[0] * sh * sh, bare[1] * sh * sh],
            n_s,
            m_s,
            g_eff,
            lambda_eff,
            pi_factor,
            r_e,
            theta_e,
            delta_r: r_e - r_d,
            delta_theta: theta_e - params.theta_d,
        }
    }
}

/// Two-photon pump amplitude `xi_d = (delta_c / 2) tanh(2 r_d)` that
/// produces squeezing strength `r_d` at detuning `delta_c`.
pub fn pump_from_squeezing<T: Real>(delta_c: T, r_d: T) -> T {
    delta_c * T::lit(0.5) * (r_d + r_d).tanh()
}

/// Inverse of [`pump_from_squeezing`]: `r_d = ln[(delta_c + 2 xi) / (delta_c - 2 xi)] / 4`.
pub fn squeezing_from_pump<T: Real>(delta_c: T, xi_d: T) -> T {
    let two_xi = xi_d + xi_d;
    ((delta_c + two_xi) / (delta_c - two_xi)).ln() * T::lit(0.25)
}

/// Squeezed-mode frequency `(delta_c - 2 xi_d) exp(2 r_d)`, which equals
/// `delta_c / cosh(2 r_d)`.
pub fn effective_frequency<T: Real>(delta_c: T, r_d: T) -> T {
    let xi = pump_from_squeezing(delta_c, r_d);
    (delta_c - xi - xi) * (r_d + r_d).exp()
}

/// Effective thermal noise `N_s` and two-photon correlation `M_s` seen by
/// the squeezed mode when its bare mode is coupled to a squeezed vacuum
/// `(r_e, theta_e)`. The phase mismatch is `theta_e - theta_d`.
pub fn reservoir_noise<T: Real>(r_d: T, theta_d: T, r_e: T, theta_e: T) -> (T, Complex<T>) {
    let dtheta = theta_e - theta_d;
    let (shd, chd) = (r_d.sinh(), r_d.cosh());
    let (she, che) = (r_e.sinh(), r_e.cosh());
    let half = T::lit(0.5);
    let n_s =
        shd * shd * che * che + chd * chd * she * she + half * dtheta.cos() * (r_d + r_d).sinh() * (r_e + r_e).sinh();
    let first = Complex::new(shd * che, T::zero()) + scale(phase(dtheta), chd * she);
    let second = Complex::new(chd * che, T::zero()) + scale(phase(-dtheta), shd * she);
    let m_s = phase(theta_d) * first * second;
    // Rounding can push an exactly-cancelling sum marginally below zero.
    (n_s.max(T::zero()), m_s)
}

/// Squeezing-dressed coupling `Lambda = G cosh(2 r_d) - G* sinh(2 r_d) e^{-i theta_d}`
/// and the enhancement `|Lambda / G|` (absent for `G = 0`).
pub fn effective_coupling<T: Real>(g: Complex<T>, r_d: T, theta_d: T) -> (Complex<T>, Option<T>) {
    let two_r = r_d + r_d;
    let lambda = scale(g, two_r.cosh()) - scale(g.conj() * phase(-theta_d), two_r.sinh());
    let g_abs = cabs(g);
    let pi = if g_abs > T::zero() {
        Some(cabs(lambda) / g_abs)
    } else {
        None
    };
    (lambda, pi)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use std::f64::consts::PI;

    #[test]
    fn pump_examples() {
        assert_eq!(pump_from_squeezing(1.0, 0.0), 0.0);
        assert_relative_eq!(pump_from_squeezing(1.0, 0.1), 0.098_687_660_112_4, epsilon = 1e-12);
        assert_relative_eq!(pump_from_squeezing(2.0, 0.2), 0.379_948_962_255_2, epsilon = 1e-12);
        for &(dc, r) in &[(1.0, 0.1), (2.0, 0.2)] {
            let xi = pump_from_squeezing(dc, r);
            assert_relative_eq!(squeezing_from_pump(dc, xi), r, max_relative = 1e-12);
        }
    }

    #[test]
    fn effective_frequency_examples() {
        assert_eq!(effective_frequency(1.0, 0.0), 1.0);
        for &(dc, r, want) in &[
            (1.0f64, 0.1f64, 0.980_327_997_644_725),
            (1.2, 0.3, 1.012_260_825_146_168),
        ] {
            let ws = effective_frequency(dc, r);
            assert_relative_eq!(ws, dc / (2.0 * r).cosh(), max_relative = 1e-12);
            assert_relative_eq!(ws, want, epsilon = 1e-9);
        }
    }

    #[test]
    fn reservoir_noise_examples() {
        let (n, m) = reservoir_noise(0.3, 1.1, 0.3, 1.1 + PI);
        assert!(n.abs() < 1e-12 && m.norm() < 1e-12);

        let (n, m) = reservoir_noise(0.1, 0.0, 0.0, 0.0);
        assert_relative_eq!(n, 0.1f64.sinh().powi(2), epsilon = 1e-14);
        assert_relative_eq!(n, 0.010_033_377_809_538, epsilon = 1e-12);
        assert_relative_eq!(m.norm(), 0.100_668_001_270_547, epsilon = 1e-12);

        let (n, _) = reservoir_noise(0.2, 0.7, 0.2, 0.7);
        assert_relative_eq!(n, 0.168_717_473_152_422, epsilon = 1e-12);
        // Simplified equal-strength form.
        let r = 0.2f64;
        let dth = 0.4f64;
        let (n, m) = reservoir_noise(r, 0.3, r, 0.3 + dth);
        assert_relative_eq!(n, 0.5 * (2.0 * r).sinh().powi(2) * (1.0 + dth.cos()), epsilon = 1e-13);
        let want = phase(0.3)
            * scale(Complex::new(1.0, 0.0) + phase(dth), 0.5 * (2.0 * r).sinh())
            * (Complex::new(r.cosh().powi(2), 0.0) + scale(phase(-dth), r.sinh().powi(2)));
        assert!((m - want).norm() < 1e-13);
    }

    #[test]
    fn coupling_examples() {
        let g = Complex::new(0.16, 0.0);
        let (l, p) = effective_coupling(g, 0.0, PI);
        assert!((l - g).norm() < 1e-15);
        assert_eq!(p, Some(1.0));

        let (l, p) = effective_coupling(g, 0.1, PI);
        assert_relative_eq!(l.re, 0.16 * 0.2f64.exp(), epsilon = 1e-12);
        assert!(l.im.abs() < 1e-12);
        assert_relative_eq!(l.re, 0.195_424_441_305_627, epsilon = 1e-9);
        assert_relative_eq!(p.unwrap(), 1.221_402_758_160_17, epsilon = 1e-12);

        let (l, p) = effective_coupling(g, 0.1, 0.0);
        assert_relative_eq!(l.re, 0.130_996_920_492_477, epsilon = 1e-9);
        assert_relative_eq!(p.unwrap(), 0.818_730_753_077_982, epsilon = 1e-12);

        let (_, p) = effective_coupling(Complex::new(0.0, 0.0), 0.3, 1.0);
        assert_eq!(p, None);
    }

    fn fig2_like() -> ModelParams<f64> {
        ModelParams {
            kappa: 0.3,
            omega_m: [1.0; 2],
            gamma_m: [1e-5; 2],
            nbar_m: [100.0; 2],
            lambda_hop: 0.02,
            delta_c: 1.0,
            r_d: 0.1,
            theta_d: PI,
            reservoir: PerDirection {
                ccw: Reservoir::matched(),
                cw: Reservoir::none(),
            },
            drive: Drive::effective(0.01, 0.013),
            direction: Direction::Ccw,
        }
    }

    #[test]
    fn validation() {
        let mut p = fig2_like();
        assert!(p.validate().unwrap().is_empty());
        p.omega_m[1] = 1.1;
        assert_eq!(p.validate().unwrap(), vec![ValidityWarning::NonDegenerateMechanics]);
        p.gamma_m[0] = -1.0;
        assert!(matches!(
            p.validate(),
            Err(ModelError::NonPositive { name: "gamma_m[1]", .. })
        ));
        let mut p = fig2_like();
        p.reservoir.cw = Reservoir::Mismatch {
            delta_r: -0.5,
            delta_theta: 0.0,
        };
        assert!(matches!(p.validate(), Err(ModelError::Negative { name: "r_e", .. })));
    }

    #[test]
    fn derived_phase_matched_and_pi() {
        let p = fig2_like();
        let d = DerivedQuantities::new(&p, [Complex::new(0.01, 0.0); 2]);
        assert!(d.n_s < 1e-12 && d.m_s.norm() < 1e-12);
        assert_relative_eq!(d.pi_factor[0].unwrap(), 0.2f64.exp(), epsilon = 1e-12);
        let mut q = p;
        q.r_d = 0.0;
        let d = DerivedQuantities::new(&q, [Complex::new(0.01, 0.003); 2]);
        assert_eq!(d.pi_factor, [Some(1.0), Some(1.0)]);
    }

    #[test]
    fn generic_f32() {
        let ws: f32 = effective_frequency(1.0f32, 0.1f32);
        assert!((ws - 0.980_328).abs() < 1e-6);
    }
}
