//! Laboratory-unit conversions. The only place where `hbar` and `k_B` appear.

use std::f64::consts::PI;

use super::ModelError;

/// Reduced Planck constant, J·s (CODATA 2018, exact).
pub const HBAR: f64 = 1.054_571_817e-34;
/// Boltzmann constant, J/K (exact).
pub const K_B: f64 = 1.380_649e-23;

/// Angular frequency in rad/s for a cyclic frequency given in MHz.
pub fn angular_from_mhz(nu_mhz: f64) -> f64 {
    2.0 * PI * nu_mhz * 1e6
}

/// Frequency scale used to make parameters dimensionless: everything is
/// expressed in units of the first mechanical frequency.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FrequencyUnit {
    /// `omega_{m,1} / 2pi` in MHz.
    pub mhz: f64,
}

impl FrequencyUnit {
    pub fn new(mhz: f64) -> Self {
        FrequencyUnit { mhz }
    }

    /// Converts `omega / 2pi` in MHz into the dimensionless ratio.
    pub fn from_mhz(&self, nu_mhz: f64) -> f64 {
        nu_mhz / self.mhz
    }

    pub fn to_mhz(&self, ratio: f64) -> f64 {
        ratio * self.mhz
    }

    pub fn angular(&self) -> f64 {
        angular_from_mhz(self.mhz)
    }
}

/// Bose-Einstein occupancy `1 / (exp(hbar omega / k_B T) - 1)`.
pub fn thermal_occupancy(omega_rad_s: f64, temperature_k: f64) -> Result<f64, ModelError> {
    if !(omega_rad_s > 0.0) {
        return Err(ModelError::NonPositive {
            name: "omega_m",
            value: omega_rad_s,
        });
    }
    if !(temperature_k > 0.0) {
        return Err(ModelError::NonPositive {
            name: "temperature",
            value: temperature_k,
        });
    }
    let x = HBAR * omega_rad_s / (K_B * temperature_k);
    Ok(1.0 / x.exp_m1())
}

/// Temperature at which a mode of frequency `omega` holds `nbar` quanta.
pub fn temperature_from_occupancy(omega_rad_s: f64, nbar: f64) -> Result<f64, ModelError> {
    if !(omega_rad_s > 0.0) {
        return Err(ModelError::NonPositive {
            name: "omega_m",
            value: omega_rad_s,
        });
    }
    if !(nbar > 0.0) {
        return Err(ModelError::NonPositive {
            name: "nbar",
            value: nbar,
        });
    }
    Ok(HBAR * omega_rad_s / (K_B * (1.0 / nbar).ln_1p()))
}

/// Coherent drive amplitude `sqrt(2 kappa P / (hbar omega_d))` in s^-1.
pub fn drive_amplitude_from_power(kappa_rad_s: f64, omega_d_rad_s: f64, power_w: f64) -> f64 {
    (2.0 * kappa_rad_s * power_w / (HBAR * omega_d_rad_s)).sqrt()
}
