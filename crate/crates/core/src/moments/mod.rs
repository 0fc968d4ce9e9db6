//! The 24-moment linear system `dX/dt = A X + b` of the linearized dynamics,
//! its steady state, a stability gate, an independently derived drift oracle
//! and an RK4 integration oracle.
//!
//! Moment ordering (1-based, as used throughout):
//!
//! | k | moment | k | moment | k | moment |
//! |---|--------|---|--------|---|--------|
//! | 1 | ⟨a†a⟩ | 9 | ⟨q1p1⟩ | 17 | ⟨a q2⟩ |
//! | 2 | ⟨aa†⟩ | 10 | ⟨p1q1⟩ | 18 | ⟨a† q2⟩ |
//! | 3 | ⟨q1²⟩ | 11 | ⟨q2p2⟩ | 19 | ⟨a p2⟩ |
//! | 4 | ⟨p1²⟩ | 12 | ⟨p2q2⟩ | 20 | ⟨a† p2⟩ |
//! | 5 | ⟨q2²⟩ | 13 | ⟨a q1⟩ | 21 | ⟨q1q2⟩ |
//! | 6 | ⟨p2²⟩ | 14 | ⟨a† q1⟩ | 22 | ⟨p1p2⟩ |
//! | 7 | ⟨aa⟩ | 15 | ⟨a p1⟩ | 23 | ⟨q1p2⟩ |
//! | 8 | ⟨a†a†⟩ | 16 | ⟨a† p1⟩ | 24 | ⟨q2p1⟩ |
//!
//! The differences `x9 - x10` and `x11 - x12` are the canonical commutators
//! and are conserved by the dynamics, so rows 9/10 and 11/12 of `A` coincide
//! and `A` has a two-dimensional kernel. Stability and the steady solve use
//! the reduced 22-moment system obtained by eliminating `x10` and `x12`.

mod dump;
pub mod oracle;
mod rk4;

pub use dump::{format_matrix, format_vector, write_drift_dump};
pub use oracle::derive_drift_oracle;
pub use rk4::{evolve_moments, Rk4Propagator};

use nalgebra::{DMatrix, DVector};
use num_complex::Complex;
use thiserror::Error;

use crate::model::ModelParams;
use crate::scalar::{cabs, cplx, imag_unit, scale, to_f64, Real};
use crate::steadystate::OperatingPoint;

pub const N_MOMENTS: usize = 24;
const N_REDUCED: usize = 22;
/// Zero-based indices of `x10` and `x12`, eliminated in the reduced system.
const ELIMINATED: [usize; 2] = [9, 11];
/// Zero-based indices of `x9` and `x11`, which absorb the eliminated columns.
const KEPT_PARTNER: [usize; 2] = [8, 10];

#[derive(Debug, Error, Clone, PartialEq)]
pub enum MomentError {
    #[error("drift matrix is not Hurwitz-stable (spectral abscissa {abscissa:e})")]
    Unstable { abscissa: f64 },
    #[error("steady-state linear system is singular (reciprocal pivot ratio {rcond:e})")]
    SingularSystem { rcond: f64 },
    #[error("steady-state residual {residual:e} exceeds bound {bound:e}")]
    InaccurateSolve { residual: f64, bound: f64 },
    #[error("RK4 step too large: dt * spectral radius = {product} >= 2")]
    StepTooLarge { product: f64 },
    #[error("invalid integration request: {0}")]
    InvalidIntegration(&'static str),
}

/// The 24 second moments, stored zero-based; [`MomentVector::x`] is 1-based.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MomentVector<T>(pub [Complex<T>; N_MOMENTS]);

impl<T: Real> MomentVector<T> {
    pub fn zeros() -> Self {
        MomentVector([cplx(T::zero(), T::zero()); N_MOMENTS])
    }

    /// Zero fluctuations apart from the canonical commutators:
    /// `x9 = -x10 = x11 = -x12 = i/2`.
    pub fn commutator_reference() -> Self {
        let mut v = Self::zeros();
        let half_i = scale(imag_unit::<T>(), T::lit(0.5));
        v.0[8] = half_i;
        v.0[9] = -half_i;
        v.0[10] = half_i;
        v.0[11] = -half_i;
        v
    }

    /// 1-based accessor.
    pub fn x(&self, k: usize) -> Complex<T> {
        self.0[k - 1]
    }

    pub fn from_dvector(v: &DVector<Complex<T>>) -> Self {
        let mut out = Self::zeros();
        out.0.copy_from_slice(v.as_slice());
        out
    }

    pub fn to_dvector(&self) -> DVector<Complex<T>> {
        DVector::from_column_slice(&self.0)
    }

    pub fn norm_inf(&self) -> T {
        self.0.iter().fold(T::zero(), |m, z| m.max(cabs(*z)))
    }

    /// Largest violation of the bosonic, canonical and Hermiticity identities
    /// that any physical steady state satisfies.
    pub fn max_identity_defect(&self) -> T {
        let one = cplx(T::one(), T::zero());
        let i = imag_unit::<T>();
        let x = |k| self.x(k);
        let mut d = cabs(x(2) - x(1) - one);
        d = d.max(cabs(x(9) - x(10) - i));
        d = d.max(cabs(x(11) - x(12) - i));
        for (p, q) in [(8, 7), (14, 13), (16, 15), (18, 17), (20, 19)] {
            d = d.max(cabs(x(p) - x(q).conj()));
        }
        d
    }
}

/// Coefficients entering the drift matrix and drive vector.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DriftInputs<T> {
    pub delta_s: T,
    pub kappa: T,
    pub lambda_eff: [Complex<T>; 2],
    pub omega_m: [T; 2],
    pub gamma_m: [T; 2],
    pub nbar_m: [T; 2],
    pub lambda_hop: T,
    pub n_s: T,
    pub m_s: Complex<T>,
}

impl<T: Real> DriftInputs<T> {
    pub fn new(op: &OperatingPoint<T>, params: &ModelParams<T>) -> Self {
        DriftInputs {
            delta_s: op.delta_s,
            kappa: params.kappa,
            lambda_eff: op.derived.lambda_eff,
            omega_m: params.omega_m,
            gamma_m: params.gamma_m,
            nbar_m: params.nbar_m,
            lambda_hop: params.lambda_hop,
            n_s: op.derived.n_s,
            m_s: op.derived.m_s,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct DriftSystem<T: Real> {
    pub a: DMatrix<Complex<T>>,
    pub b: DVector<Complex<T>>,
    /// Drift matrix of the reduced 22-moment system (columns of `x10`, `x12`
    /// folded into `x9`, `x11`; rows 10 and 12 dropped).
    pub reduced: DMatrix<Complex<T>>,
    /// Largest real part over the spectrum of the reduced drift matrix (NaN
    /// if the eigenvalue iteration failed).
    pub spectral_abscissa: T,
    /// Largest eigenvalue modulus of the reduced drift matrix.
    pub spectral_radius: T,
    pub stable: bool,
}

/// Strict stability threshold on the spectral abscissa.
pub fn stability_threshold<T: Real>() -> T {
    T::lit(-1e-12)
}

impl<T: Real> DriftSystem<T> {
    pub fn from_parts(a: DMatrix<Complex<T>>, b: DVector<Complex<T>>) -> Self {
        let reduced = reduce_matrix(&a);
        let (abscissa, radius) = match eigenvalues(&reduced) {
            Some(ev) => ev.iter().fold((T::min_value().unwrap(), T::zero()), |(m, r), z| {
                (m.max(z.re), r.max(cabs(*z)))
            }),
            None => (T::lit(f64::NAN), T::lit(f64::NAN)),
        };
        let stable = abscissa < stability_threshold();
        DriftSystem {
            a,
            b,
            reduced,
            spectral_abscissa: abscissa,
            spectral_radius: radius,
            stable,
        }
    }

    /// Reduced drive vector for commutator values `d = [x9 - x10, x11 - x12]`.
    pub fn reduced_drive(&self, d: [Complex<T>; 2]) -> DVector<Complex<T>> {
        let mut out = DVector::zeros(N_REDUCED);
        for (r, &full_r) in kept_indices().iter().enumerate() {
            let mut v = self.b[full_r];
            for (j, &e) in ELIMINATED.iter().enumerate() {
                v -= self.a[(full_r, e)] * d[j];
            }
            out[r] = v;
        }
        out
    }
}

fn kept_indices() -> [usize; N_REDUCED] {
    let mut out = [0; N_REDUCED];
    let mut n = 0;
    for k in 0..N_MOMENTS {
        if !ELIMINATED.contains(&k) {
            out[n] = k;
            n += 1;
        }
    }
    out
}

fn reduce_matrix<T: Real>(a: &DMatrix<Complex<T>>) -> DMatrix<Complex<T>> {
    let keep = kept_indices();
    DMatrix::from_fn(N_REDUCED, N_REDUCED, |r, c| {
        let (fr, fc) = (keep[r], keep[c]);
        let mut v = a[(fr, fc)];
        for (j, &p) in KEPT_PARTNER.iter().enumerate() {
            if fc == p {
                v += a[(fr, ELIMINATED[j])];
            }
        }
        v
    })
}

/// Eigenvalues of a complex square matrix via the complex Schur form
/// (triangular factor only).
pub fn eigenvalues<T: Real>(m: &DMatrix<Complex<T>>) -> Option<Vec<Complex<T>>> {
    // the iteration has no step limit; non-finite input would never converge
    if !m.iter().all(|z| z.re.is_finite() && z.im.is_finite()) {
        return None;
    }
    m.eigenvalues().map(|v| v.iter().copied().collect())
}

/// Assembles `A` and `b` exactly as the moment equations state
/// them, including `omega_m1` in the `x19`/`x20` terms of rows 17 and 18.
pub fn build_drift<T: Real>(inp: &DriftInputs<T>) -> DriftSystem<T> {
    let (a, b) = drift_as_stated(inp);
    DriftSystem::from_parts(a, b)
}

fn drift_as_stated<T: Real>(inp: &DriftInputs<T>) -> (DMatrix<Complex<T>>, DVector<Complex<T>>) {
    let mut a = DMatrix::<Complex<T>>::zeros(N_MOMENTS, N_MOMENTS);
    let mut b = DVector::<Complex<T>>::zeros(N_MOMENTS);
    let re = |x: T| cplx(x, T::zero());
    let i = imag_unit::<T>();
    let two = T::lit(2.0);
    let half = T::lit(0.5);

    let k = inp.kappa;
    let d = inp.delta_s;
    let [w1, w2] = inp.omega_m;
    let [g1, g2] = inp.gamma_m;
    let lam = re(inp.lambda_hop);
    let [l1, l2] = inp.lambda_eff;
    let (l1c, l2c) = (l1.conj(), l2.conj());
    let om1p = cplx(half * k, d);
    let om1m = cplx(-half * k, d);
    let om2p = cplx(g1 + half * k, d);
    let om2m = cplx(-g1 - half * k, d);
    let om3p = cplx(g2 + half * k, d);
    let om3m = cplx(-g2 - half * k, d);
    let om4 = g1 + g2;

    let mut set = |r: usize, c: usize, v: Complex<T>| a[(r - 1, c - 1)] += v;

    for r in [1, 2] {
        set(r, r, re(-k));
        set(r, 14, i * l1);
        set(r, 13, -i * l1c);
        set(r, 18, i * l2);
        set(r, 17, -i * l2c);
    }

    set(3, 9, re(w1));
    set(3, 10, re(w1));

    set(4, 4, re(-two * g1));
    set(4, 9, re(-w1));
    set(4, 10, re(-w1));
    set(4, 16, scale(l1, two));
    set(4, 15, scale(l1c, two));
    set(4, 24, -lam * two);

    set(5, 11, re(w2));
    set(5, 12, re(w2));

    set(6, 6, re(-two * g2));
    set(6, 11, re(-w2));
    set(6, 12, re(-w2));
    set(6, 20, scale(l2, two));
    set(6, 19, scale(l2c, two));
    set(6, 23, -lam * two);

    set(7, 7, -scale(om1p, two));
    set(7, 13, scale(i * l1, two));
    set(7, 17, scale(i * l2, two));

    set(8, 8, scale(om1m, two));
    set(8, 14, -scale(i * l1c, two));
    set(8, 18, -scale(i * l2c, two));

    for r in [9, 10] {
        set(r, 9, re(-half * g1));
        set(r, 10, re(-half * g1));
        set(r, 4, re(w1));
        set(r, 3, re(-w1));
        set(r, 21, -lam);
        set(r, 14, l1);
        set(r, 13, l1c);
    }
    for r in [11, 12] {
        set(r, 11, re(-half * g2));
        set(r, 12, re(-half * g2));
        set(r, 6, re(w2));
        set(r, 5, re(-w2));
        set(r, 21, -lam);
        set(r, 18, l2);
        set(r, 17, l2c);
    }

    set(13, 13, -om1p);
    set(13, 15, re(w1));
    set(13, 3, i * l1);
    set(13, 21, i * l2);

    set(14, 14, om1m);
    set(14, 16, re(w1));
    set(14, 3, -i * l1c);
    set(14, 21, -i * l2c);

    set(15, 15, -om2p);
    set(15, 13, re(-w1));
    set(15, 7, l1c);
    set(15, 2, l1);
    set(15, 9, i * l1);
    set(15, 24, i * l2);
    set(15, 17, -lam);

    set(16, 16, om2m);
    set(16, 14, re(-w1));
    set(16, 8, l1);
    set(16, 1, l1c);
    set(16, 9, -i * l1c);
    set(16, 24, -i * l2c);
    set(16, 18, -lam);

    set(17, 17, -om1p);
    set(17, 19, re(w1));
    set(17, 21, i * l1);
    set(17, 5, i * l2);

    set(18, 18, om1m);
    set(18, 20, re(w1));
    set(18, 21, -i * l1c);
    set(18, 5, -i * l2c);

    set(19, 19, -om3p);
    set(19, 17, re(-w2));
    set(19, 23, i * l1);
    set(19, 2, l2);
    set(19, 7, l2c);
    set(19, 11, i * l2);
    set(19, 13, -lam);

    set(20, 20, om3m);
    set(20, 18, re(-w2));
    set(20, 23, -i * l1c);
    set(20, 1, l2c);
    set(20, 8, l2);
    set(20, 11, -i * l2c);
    set(20, 14, -lam);

    set(21, 24, re(w1));
    set(21, 23, re(w2));

    set(22, 22, re(-om4));
    set(22, 23, re(-w1));
    set(22, 24, re(-w2));
    set(22, 10, -lam);
    set(22, 11, -lam);
    set(22, 20, l1);
    set(22, 19, l1c);
    set(22, 16, l2);
    set(22, 15, l2c);

    set(23, 23, re(-g2));
    set(23, 22, re(w1));
    set(23, 21, re(-w2));
    set(23, 3, -lam);
    set(23, 14, l2);
    set(23, 13, l2c);

    set(24, 24, re(-g1));
    set(24, 21, re(-w1));
    set(24, 22, re(w2));
    set(24, 5, -lam);
    set(24, 18, l1);
    set(24, 17, l1c);

    b[0] = re(k * inp.n_s);
    b[1] = re(k * (inp.n_s + T::one()));
    b[3] = re(two * g1 * inp.nbar_m[0]);
    b[5] = re(two * g2 * inp.nbar_m[1]);
    b[6] = scale(inp.m_s.conj(), k);
    b[7] = scale(inp.m_s, k);
    (a, b)
}

/// One entry where the stated drift matrix and the derived one differ.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DriftDiscrepancy {
    /// 1-based row and column.
    pub row: usize,
    pub col: usize,
    pub stated: Complex<f64>,
    pub derived: Complex<f64>,
}

/// Entrywise comparison of two drift systems (matrix and drive vector; drive
/// discrepancies are reported with `col = 0`).
pub fn compare_drift<T: Real>(stated: &DriftSystem<T>, derived: &DriftSystem<T>, tol: T) -> Vec<DriftDiscrepancy> {
    compare_parts((&stated.a, &stated.b), (&derived.a, &derived.b), tol)
}

type Parts<'a, T> = (&'a DMatrix<Complex<T>>, &'a DVector<Complex<T>>);

fn compare_parts<T: Real>(stated: Parts<'_, T>, derived: Parts<'_, T>, tol: T) -> Vec<DriftDiscrepancy> {
    let c64 = |z: Complex<T>| Complex::new(to_f64(z.re), to_f64(z.im));
    let mut out = Vec::new();
    for r in 0..N_MOMENTS {
        for c in 0..N_MOMENTS {
            let (p, q) = (stated.0[(r, c)], derived.0[(r, c)]);
            if cabs(p - q) > tol {
                out.push(DriftDiscrepancy {
                    row: r + 1,
                    col: c + 1,
                    stated: c64(p),
                    derived: c64(q),
                });
            }
        }
        let (p, q) = (stated.1[r], derived.1[r]);
        if cabs(p - q) > tol {
            out.push(DriftDiscrepancy {
                row: r + 1,
                col: 0,
                stated: c64(p),
                derived: c64(q),
            });
        }
    }
    out
}

/// Builds the stated system, cross-checks it against the oracle, logs any
/// disagreement and returns the oracle's system when they differ.
pub fn drift_system<T: Real>(inp: &DriftInputs<T>) -> (DriftSystem<T>, Vec<DriftDiscrepancy>) {
    let stated = drift_as_stated(inp);
    let derived = oracle::oracle_parts(inp);
    let scale_a = stated.0.iter().fold(T::one(), |m, z| m.max(cabs(*z)));
    let tol = T::lit(1e-12).max(T::default_epsilon() * T::lit(64.0)) * scale_a;
    let diffs = compare_parts((&stated.0, &stated.1), (&derived.0, &derived.1), tol);
    if diffs.is_empty() {
        (DriftSystem::from_parts(stated.0, stated.1), diffs)
    } else {
        for d in &diffs {
            log::warn!(
                "drift entry ({}, {}) stated {} vs derived {}; using derived",
                d.row,
                d.col,
                d.stated,
                d.derived
            );
        }
        (DriftSystem::from_parts(derived.0, derived.1), diffs)
    }
}

/// Steady state with the physical commutators `x9 - x10 = x11 - x12 = i`.
pub fn steady_moments<T: Real>(system: &DriftSystem<T>) -> Result<MomentVector<T>, MomentError> {
    let i = imag_unit::<T>();
    steady_moments_with(system, [i, i])
}

/// Steady state of the reduced system for prescribed conserved differences
/// `[x9 - x10, x11 - x12]`.
pub fn steady_moments_with<T: Real>(
    system: &DriftSystem<T>,
    commutators: [Complex<T>; 2],
) -> Result<MomentVector<T>, MomentError> {
    if !system.stable {
        return Err(MomentError::Unstable {
            abscissa: to_f64(system.spectral_abscissa),
        });
    }
    let rhs = -system.reduced_drive(commutators);
    let lu = system.reduced.clone().lu();
    let u = lu.u();
    let (mut lo, mut hi) = (T::max_value().unwrap(), T::zero());
    for k in 0..N_REDUCED {
        let p = cabs(u[(k, k)]);
        lo = lo.min(p);
        hi = hi.max(p);
    }
    let rcond = if hi > T::zero() { lo / hi } else { T::zero() };
    if rcond <= T::default_epsilon() * T::lit(N_REDUCED as f64) {
        return Err(MomentError::SingularSystem { rcond: to_f64(rcond) });
    }
    let sol = lu
        .solve(&rhs)
        .ok_or(MomentError::SingularSystem { rcond: to_f64(rcond) })?;

    let mut x = MomentVector::zeros();
    for (r, &k) in kept_indices().iter().enumerate() {
        x.0[k] = sol[r];
    }
    for j in 0..2 {
        x.0[ELIMINATED[j]] = x.0[KEPT_PARTNER[j]] - commutators[j];
    }

    let full = x.to_dvector();
    let res = &system.a * &full + &system.b;
    let res_inf = res.iter().fold(T::zero(), |m, z| m.max(cabs(*z)));
    let b_inf = system.b.iter().fold(T::zero(), |m, z| m.max(cabs(*z)));
    let a_inf = system.a.iter().fold(T::zero(), |m, z| m.max(cabs(*z)));
    let rel = T::lit(1e-10).max(T::default_epsilon() * T::lit(1e4));
    let bound = rel * b_inf.max(a_inf * x.norm_inf() * T::default_epsilon().sqrt());
    if res_inf > bound && res_inf > T::default_epsilon() {
        return Err(MomentError::InaccurateSolve {
            residual: to_f64(res_inf),
            bound: to_f64(bound),
        });
    }
    Ok(x)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    pub(crate) fn sample_inputs() -> DriftInputs<f64> {
        DriftInputs {
            delta_s: 0.98,
            kappa: 0.30625,
            lambda_eff: [Complex::new(0.0102, -0.0011), Complex::new(0.0133, 0.0007)],
            omega_m: [1.0, 1.0],
            gamma_m: [1e-3, 2e-3],
            nbar_m: [10.0, 12.0],
            lambda_hop: 0.02,
            n_s: 0.05,
            m_s: Complex::new(0.1, -0.2),
        }
    }

    fn decoupled(delta_s: f64) -> DriftInputs<f64> {
        DriftInputs {
            delta_s,
            lambda_eff: [Complex::new(0.0, 0.0); 2],
            lambda_hop: 0.0,
            ..sample_inputs()
        }
    }

    #[test]
    fn conserved_rows_coincide() {
        let s = build_drift(&sample_inputs());
        for c in 0..N_MOMENTS {
            assert_eq!(s.a[(8, c)], s.a[(9, c)]);
            assert_eq!(s.a[(10, c)], s.a[(11, c)]);
        }
    }

    #[test]
    fn drive_vector_slots() {
        let inp = sample_inputs();
        let s = build_drift(&inp);
        let k = inp.kappa;
        let want = [
            (0, Complex::new(k * 0.05, 0.0)),
            (1, Complex::new(k * 1.05, 0.0)),
            (3, Complex::new(2e-2, 0.0)),
            (5, Complex::new(4.8e-2, 0.0)),
            (6, inp.m_s.conj() * k),
            (7, inp.m_s * k),
        ];
        for r in 0..N_MOMENTS {
            let expect = want.iter().find(|(i, _)| *i == r).map(|w| w.1).unwrap_or_default();
            assert!((s.b[r] - expect).norm() < 1e-15, "slot {}", r + 1);
        }
        let pm = DriftInputs {
            n_s: 0.0,
            m_s: Complex::new(0.0, 0.0),
            ..inp
        };
        let s = build_drift(&pm);
        let nz: Vec<usize> = (0..N_MOMENTS).filter(|&r| s.b[r].norm() > 0.0).map(|r| r + 1).collect();
        assert_eq!(nz, vec![2, 4, 6]);
    }

    #[test]
    fn decoupled_optical_spectrum() {
        let inp = decoupled(0.9);
        let s = build_drift(&inp);
        let opt = [0usize, 1, 6, 7];
        for &r in &opt {
            for c in 0..N_MOMENTS {
                if !opt.contains(&c) {
                    assert_eq!(s.a[(r, c)], Complex::new(0.0, 0.0));
                    assert_eq!(s.a[(c, r)], Complex::new(0.0, 0.0));
                }
            }
        }
        let block = DMatrix::from_fn(4, 4, |r, c| s.a[(opt[r], opt[c])]);
        let mut ev = eigenvalues(&block).unwrap();
        ev.sort_by(|x, y| x.im.partial_cmp(&y.im).unwrap());
        let k = inp.kappa;
        let want = [
            Complex::new(-k, -1.8),
            Complex::new(-k, 0.0),
            Complex::new(-k, 0.0),
            Complex::new(-k, 1.8),
        ];
        for (z, w) in ev.iter().zip(want) {
            assert!((z - w).norm() < 1e-12, "{z} vs {w}");
        }
        assert!(s.stable);
    }

    #[test]
    fn weak_coupling_is_stable() {
        let s = build_drift(&sample_inputs());
        assert!(s.stable && s.spectral_abscissa < 0.0);
        assert!(s.spectral_radius > 1.9 && s.spectral_radius < 2.1);
    }

    #[test]
    fn decoupled_steady_state_resonant() {
        let s = build_drift(&decoupled(0.0));
        let x = steady_moments(&s).unwrap();
        let inp = decoupled(0.0);
        let c = |z: Complex<f64>, w: Complex<f64>| assert!((z - w).norm() < 1e-9, "{z} vs {w}");
        c(x.x(1), Complex::new(inp.n_s, 0.0));
        c(x.x(2), Complex::new(inp.n_s + 1.0, 0.0));
        c(x.x(7), inp.m_s.conj());
        c(x.x(8), inp.m_s);
        for (k, n) in [(3, 10.0), (4, 10.0), (5, 12.0), (6, 12.0)] {
            c(x.x(k), Complex::new(n, 0.0));
        }
        c(x.x(9), Complex::new(0.0, 0.5));
        c(x.x(10), Complex::new(0.0, -0.5));
        for k in 13..=24 {
            c(x.x(k), Complex::new(0.0, 0.0));
        }
        assert!(x.max_identity_defect() < 1e-9);
    }

    #[test]
    fn detuned_x7_closed_form() {
        let inp = decoupled(0.7);
        let x = steady_moments(&build_drift(&inp)).unwrap();
        let want = inp.m_s.conj() * inp.kappa / Complex::new(inp.kappa, 1.4);
        assert!((x.x(7) - want).norm() < 1e-12);
    }

    #[test]
    fn homogeneous_steady_state_is_zero() {
        let mut s = build_drift(&sample_inputs());
        s.b.fill(Complex::new(0.0, 0.0));
        let zero = Complex::new(0.0, 0.0);
        let x = steady_moments_with(&s, [zero, zero]).unwrap();
        assert_eq!(x.norm_inf(), 0.0);
    }

    #[test]
    fn coupled_steady_state_identities() {
        let x = steady_moments(&build_drift(&sample_inputs())).unwrap();
        assert!(x.max_identity_defect() < 1e-9, "{}", x.max_identity_defect());
        assert!(x.x(1).re > 0.0);
    }

    #[test]
    fn unstable_is_refused() {
        let inp = DriftInputs {
            gamma_m: [0.0, 0.0],
            kappa: 0.3,
            lambda_eff: [Complex::new(0.3, 0.0); 2],
            delta_s: -1.0,
            ..sample_inputs()
        };
        let s = build_drift(&inp);
        assert!(!s.stable);
        assert!(matches!(steady_moments(&s), Err(MomentError::Unstable { .. })));
    }

    #[test]
    fn stated_rows_17_18_carry_first_frequency() {
        let inp = DriftInputs {
            omega_m: [1.0, 1.3],
            ..sample_inputs()
        };
        let diffs = compare_drift(&build_drift(&inp), &derive_drift_oracle(&inp), 1e-12);
        let cells: Vec<(usize, usize)> = diffs.iter().map(|d| (d.row, d.col)).collect();
        assert_eq!(cells, vec![(17, 19), (18, 20)]);
        assert_relative_eq!(diffs[0].derived.re, 1.3);
        let (chosen, logged) = drift_system(&inp);
        assert_eq!(logged.len(), 2);
        assert_eq!(chosen.a[(16, 18)], Complex::new(1.3, 0.0));
    }

    #[test]
    fn f32_pipeline() {
        let inp = sample_inputs();
        let c32 = |z: Complex<f64>| Complex::new(z.re as f32, z.im as f32);
        let i32_ = DriftInputs::<f32> {
            delta_s: inp.delta_s as f32,
            kappa: inp.kappa as f32,
            lambda_eff: [c32(inp.lambda_eff[0]), c32(inp.lambda_eff[1])],
            omega_m: [1.0, 1.0],
            gamma_m: [1e-3, 2e-3],
            nbar_m: [10.0, 12.0],
            lambda_hop: 0.02,
            n_s: 0.05,
            m_s: c32(inp.m_s),
        };
        let x32 = steady_moments(&build_drift(&i32_)).unwrap();
        let x64 = steady_moments(&build_drift(&inp)).unwrap();
        for k in 1..=N_MOMENTS {
            let d = Complex::new(x32.x(k).re as f64, x32.x(k).im as f64) - x64.x(k);
            assert!(d.norm() < 1e-2 * (1.0 + x64.x(k).norm()), "x{k}");
        }
    }
}
