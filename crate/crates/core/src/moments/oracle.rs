//! Drift system derived from the linearized Hamiltonian and dissipators by
//! mechanical operator algebra, independent of the hand-written moment rows.
//!
//! Each moment is an ordered product `O1 O2` of the generators
//! `a, a†, q1, p1, q2, p2`. Its adjoint evolution splits into
//!
//! * a derivation part (Hamiltonian plus the linear action of the Lindblad
//!   terms), applied to each factor in place,
//! * constants `2[c†,O1][O2,c]` from `D[c]` and `2[c,O1][O2,c]` from `G[c]`,
//! * the Brownian terms, which are not derivations and are expanded directly.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex;

use super::{DriftInputs, DriftSystem, N_MOMENTS};
use crate::scalar::{cplx, imag_unit, scale, Real};

const A: usize = 0;
const AD: usize = 1;
const Q1: usize = 2;
const P1: usize = 3;
const Q2: usize = 4;
const P2: usize = 5;
const N_GEN: usize = 6;

/// Generator pair of each moment, zero-based moment index.
const MOMENTS: [(usize, usize); N_MOMENTS] = [
    (AD, A),
    (A, AD),
    (Q1, Q1),
    (P1, P1),
    (Q2, Q2),
    (P2, P2),
    (A, A),
    (AD, AD),
    (Q1, P1),
    (P1, Q1),
    (Q2, P2),
    (P2, Q2),
    (A, Q1),
    (AD, Q1),
    (A, P1),
    (AD, P1),
    (A, Q2),
    (AD, Q2),
    (A, P2),
    (AD, P2),
    (Q1, Q2),
    (P1, P2),
    (Q1, P2),
    (Q2, P1),
];

type Lin<T> = [Complex<T>; N_GEN];

/// `[g, h]` for two generators.
fn comm<T: Real>(g: usize, h: usize) -> Complex<T> {
    let one = cplx(T::one(), T::zero());
    let i = imag_unit::<T>();
    match (g, h) {
        (A, AD) => one,
        (AD, A) => -one,
        (Q1, P1) | (Q2, P2) => i,
        (P1, Q1) | (P2, Q2) => -i,
        _ => cplx(T::zero(), T::zero()),
    }
}

/// Moment index of the ordered pair `(g, h)`. Pairs of commuting generators
/// may appear in either order.
fn pair_index(g: usize, h: usize) -> usize {
    if let Some(k) = MOMENTS.iter().position(|&m| m == (g, h)) {
        return k;
    }
    let k = MOMENTS
        .iter()
        .position(|&m| m == (h, g))
        .expect("every generator pair is covered");
    debug_assert!(g != h);
    k
}

struct Terms<T: Real> {
    /// Quadratic Hamiltonian `sum c * g_i g_j`.
    hamiltonian: Vec<(Complex<T>, usize, usize)>,
    /// `(rate, c)` for `rate * D[c]`, with `c` a generator.
    lindblad: Vec<(Complex<T>, usize)>,
    /// `(rate, c)` for `rate * G[c]`.
    squeezed: Vec<(Complex<T>, usize)>,
    /// `(gamma, nbar, q, p)` per mechanical mode.
    brownian: Vec<(T, T, usize, usize)>,
}

fn adjoint(g: usize) -> usize {
    match g {
        A => AD,
        AD => A,
        other => other,
    }
}

impl<T: Real> Terms<T> {
    fn new(inp: &DriftInputs<T>) -> Self {
        let re = |x: T| cplx(x, T::zero());
        let half = T::lit(0.5);
        let mut h = vec![(re(inp.delta_s), AD, A)];
        for (j, (q, p)) in [(Q1, P1), (Q2, P2)].into_iter().enumerate() {
            let w = re(half * inp.omega_m[j]);
            h.push((w, p, p));
            h.push((w, q, q));
            h.push((-inp.lambda_eff[j], AD, q));
            h.push((-inp.lambda_eff[j].conj(), A, q));
        }
        h.push((re(inp.lambda_hop), Q1, Q2));

        let hk = half * inp.kappa;
        let lindblad = vec![(re(hk * (inp.n_s + T::one())), A), (re(hk * inp.n_s), AD)];
        let squeezed = vec![(-scale(inp.m_s, hk), A), (-scale(inp.m_s.conj(), hk), AD)];
        let brownian = vec![
            (inp.gamma_m[0], inp.nbar_m[0], Q1, P1),
            (inp.gamma_m[1], inp.nbar_m[1], Q2, P2),
        ];
        Terms {
            hamiltonian: h,
            lindblad,
            squeezed,
            brownian,
        }
    }

    /// Derivation part of the adjoint generator acting on a single generator.
    fn linear(&self, g: usize) -> Lin<T> {
        let zero = cplx(T::zero(), T::zero());
        let i = imag_unit::<T>();
        let mut out = [zero; N_GEN];
        // i[H, g] with [x y, g] = x [y, g] + [x, g] y.
        for &(c, x, y) in &self.hamiltonian {
            out[x] += i * c * comm::<T>(y, g);
            out[y] += i * c * comm::<T>(x, g);
        }
        // D†[c] g = c† [g, c] + [c†, g] c.
        for &(rate, c) in &self.lindblad {
            let cd = adjoint(c);
            out[cd] += rate * comm::<T>(g, c);
            out[c] += rate * comm::<T>(cd, g);
        }
        out
    }

    fn system(&self) -> (DMatrix<Complex<T>>, DVector<Complex<T>>) {
        let mut a = DMatrix::<Complex<T>>::zeros(N_MOMENTS, N_MOMENTS);
        let mut b = DVector::<Complex<T>>::zeros(N_MOMENTS);
        let two = T::lit(2.0);
        let half = T::lit(0.5);
        let i = imag_unit::<T>();
        let lin: Vec<Lin<T>> = (0..N_GEN).map(|g| self.linear(g)).collect();

        for (k, &(o1, o2)) in MOMENTS.iter().enumerate() {
            let mut add = |g: usize, h: usize, c: Complex<T>| {
                let idx = pair_index(g, h);
                if MOMENTS[idx] != (g, h) {
                    // Reordered commuting pair.
                    debug_assert!(comm::<T>(g, h) == cplx(T::zero(), T::zero()));
                }
                a[(k, idx)] += c;
            };
            for m in 0..N_GEN {
                add(m, o2, lin[o1][m]);
                add(o1, m, lin[o2][m]);
            }
            // -i gamma/2 [q, {p, .}]  ->  -i gamma/2 (c2 {p, O1} + c1 {p, O2}).
            for &(gamma, _, q, p) in &self.brownian {
                let pre = -(i * scale(cplx(gamma, T::zero()), half));
                let (c1, c2) = (comm::<T>(o1, q), comm::<T>(o2, q));
                for (c, o) in [(c2, o1), (c1, o2)] {
                    add(p, o, pre * c);
                    add(o, p, pre * c);
                }
            }

            let mut konst = cplx(T::zero(), T::zero());
            for &(rate, c) in &self.lindblad {
                konst += scale(rate * comm::<T>(adjoint(c), o1) * comm::<T>(o2, c), two);
            }
            for &(rate, c) in &self.squeezed {
                konst += scale(rate * comm::<T>(c, o1) * comm::<T>(o2, c), two);
            }
            for &(gamma, nbar, q, _) in &self.brownian {
                konst -= scale(comm::<T>(o1, q) * comm::<T>(o2, q), two * gamma * nbar);
            }
            b[k] = konst;
        }
        (a, b)
    }
}

/// Derives `(A', b')` from the linearized Hamiltonian and master equation.
pub fn derive_drift_oracle<T: Real>(inp: &DriftInputs<T>) -> DriftSystem<T> {
    let (a, b) = oracle_parts(inp);
    DriftSystem::from_parts(a, b)
}

pub(crate) fn oracle_parts<T: Real>(inp: &DriftInputs<T>) -> (DMatrix<Complex<T>>, DVector<Complex<T>>) {
    Terms::new(inp).system()
}
