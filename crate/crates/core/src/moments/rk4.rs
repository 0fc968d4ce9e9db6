//! Classical RK4 for the linear moment system. One step of RK4 applied to
//! `dX/dt = A X + b` is the affine map `X -> P X + q` with
//! `P = I + hA S`, `q = h S b`, `S = I + hA/2 + (hA)^2/6 + (hA)^3/24`;
//! `n` steps are taken by binary powering of that map, which is the same
//! propagation in `O(log n)` matrix products. Powers are carried as
//! `P^k - I` so slow decay rates (`1 - |rho| ~ 1e-6`) are not rounded away,
//! and in the real form `[[Re, -Im], [Im, Re]]` so the products go through
//! the optimized real GEMM.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex;

use super::{DriftSystem, MomentError, MomentVector, N_MOMENTS};
use crate::scalar::{cplx, to_f64, Real};

#[derive(Debug, Clone)]
pub struct Rk4Propagator<T: Real> {
    /// `P - I`, real form.
    e: DMatrix<T>,
    q: DVector<T>,
    pub dt: T,
}

impl<T: Real> Rk4Propagator<T> {
    pub fn new(system: &DriftSystem<T>, dt: T) -> Result<Self, MomentError> {
        if !(dt > T::zero()) {
            return Err(MomentError::InvalidIntegration("dt must be positive"));
        }
        let product = dt * system.spectral_radius;
        if !(product < T::lit(2.0)) {
            return Err(MomentError::StepTooLarge {
                product: to_f64(product),
            });
        }
        let c = |x: f64| cplx(T::lit(x), T::zero());
        let ha = system.a.map(|z| z * cplx(dt, T::zero()));
        let id = DMatrix::<Complex<T>>::identity(N_MOMENTS, N_MOMENTS);
        let ha2 = &ha * &ha;
        let ha3 = &ha2 * &ha;
        let s = &id + ha.map(|z| z * c(0.5)) + ha2.map(|z| z * c(1.0 / 6.0)) + ha3.map(|z| z * c(1.0 / 24.0));
        let e = &ha * &s;
        let q = (&s * &system.b).map(|z| z * cplx(dt, T::zero()));
        Ok(Rk4Propagator {
            e: real_matrix(&e),
            q: real_vector(&q),
            dt,
        })
    }

    pub fn step(&self, x: &MomentVector<T>) -> MomentVector<T> {
        let x = real_vector(&x.to_dvector());
        from_real(&(&self.e * &x + x + &self.q))
    }

    /// `n` RK4 steps from `x`. Powers of one map commute, so each selected
    /// power is applied straight to the vector.
    pub fn advance(&self, x: &MomentVector<T>, mut n: u64) -> MomentVector<T> {
        // base = (I + base_e) x + base_q is the map raised to 2^k
        let mut v = real_vector(&x.to_dvector());
        let mut base_e = self.e.clone();
        let mut base_q = self.q.clone();
        while n > 0 {
            if n & 1 == 1 {
                v = &base_e * &v + v + &base_q;
            }
            n >>= 1;
            if n > 0 {
                base_q = &base_e * &base_q + &base_q + &base_q;
                base_e = &base_e * &base_e + &base_e + &base_e;
            }
        }
        from_real(&v)
    }
}

fn real_matrix<T: Real>(m: &DMatrix<Complex<T>>) -> DMatrix<T> {
    let n = m.nrows();
    DMatrix::from_fn(2 * n, 2 * n, |r, c| {
        let z = m[(r % n, c % n)];
        match (r < n, c < n) {
            (true, true) | (false, false) => z.re,
            (true, false) => -z.im,
            (false, true) => z.im,
        }
    })
}

fn real_vector<T: Real>(v: &DVector<Complex<T>>) -> DVector<T> {
    let n = v.len();
    DVector::from_fn(2 * n, |r, _| if r < n { v[r].re } else { v[r - n].im })
}

fn from_real<T: Real>(v: &DVector<T>) -> MomentVector<T> {
    let n = v.len() / 2;
    MomentVector::from_dvector(&DVector::from_fn(n, |r, _| cplx(v[r], v[r + n])))
}

/// Propagates `x0` to `t_final` with steps no longer than `dt` (the step is
/// shortened so that an integer number of steps lands exactly on `t_final`).
pub fn evolve_moments<T: Real>(
    system: &DriftSystem<T>,
    x0: &MomentVector<T>,
    t_final: T,
    dt: T,
) -> Result<MomentVector<T>, MomentError> {
    if !(t_final >= T::zero()) || !t_final.is_finite() {
        return Err(MomentError::InvalidIntegration(
            "t_final must be finite and non-negative",
        ));
    }
    if !(dt > T::zero()) {
        return Err(MomentError::InvalidIntegration("dt must be positive"));
    }
    let steps = to_f64(t_final / dt).ceil();
    if steps > u64::MAX as f64 / 2.0 {
        return Err(MomentError::InvalidIntegration("too many steps"));
    }
    let n = steps as u64;
    if n == 0 {
        return Ok(*x0);
    }
    let h = t_final / T::lit(n as f64);
    Ok(Rk4Propagator::new(system, h)?.advance(x0, n))
}
