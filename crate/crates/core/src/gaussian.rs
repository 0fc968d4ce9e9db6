//! Covariance matrix of the three-mode Gaussian state and the entanglement
//! and steering measures computed from it.
//!
//! Quadratures are `X = (a† + a)/√2`, `Y = i(a† - a)/√2`, so the vacuum has
//! variance 1/2. Mode order in the 6×6 matrix is `(X, Y, q1, p1, q2, p2)`.
//!
//! Expansion of the symmetrized second moments in terms of `x1..x24`:
//!
//! ```text
//! V_XX   = (x1 + x2 + x7 + x8)/2       V_YY   = (x1 + x2 - x7 - x8)/2
//! V_XY   = i(x8 - x7)/2
//! V_Xq1  = (x14 + x13)/√2              V_Yq1  = i(x14 - x13)/√2
//! V_Xp1  = (x16 + x15)/√2              V_Yp1  = i(x16 - x15)/√2
//! V_Xq2  = (x18 + x17)/√2              V_Yq2  = i(x18 - x17)/√2
//! V_Xp2  = (x20 + x19)/√2              V_Yp2  = i(x20 - x19)/√2
//! V_q1q1 = x3    V_p1p1 = x4    V_q1p1 = (x9 + x10)/2
//! V_q2q2 = x5    V_p2p2 = x6    V_q2p2 = (x11 + x12)/2
//! V_q1q2 = x21   V_p1p2 = x22   V_q1p2 = x23   V_p1q2 = x24
//! ```

use std::fmt;

use nalgebra::{DMatrix, Matrix2, Matrix4, Matrix6};
use num_complex::Complex;
use thiserror::Error;

use crate::moments::{eigenvalues, MomentVector};
use crate::scalar::{cabs, cplx, imag_unit, scale, to_f64, Real};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum GaussianError {
    #[error("covariance entry {entry} has imaginary residue {residue:e}")]
    NonHermitianMoments { entry: &'static str, residue: f64 },
    #[error("reduced covariance matrix {pair} violates the uncertainty bound (min symplectic eigenvalue {nu_min})")]
    NonPhysicalReduced { pair: String, nu_min: f64 },
    #[error("closed-form eta ({closed}) and spectral eta ({spectral}) disagree for {pair}")]
    SpectralMismatch { pair: String, closed: f64, spectral: f64 },
    #[error("symplectic eigenvalue computation failed")]
    EigenFailure,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Mode {
    Optical,
    Mech1,
    Mech2,
}

impl Mode {
    pub const ALL: [Mode; 3] = [Mode::Optical, Mode::Mech1, Mode::Mech2];

    /// First row of the mode's 2×2 block.
    pub fn offset(self) -> usize {
        match self {
            Mode::Optical => 0,
            Mode::Mech1 => 2,
            Mode::Mech2 => 4,
        }
    }

    pub fn label(self) -> &'static str {
        match self {
            Mode::Optical => "a",
            Mode::Mech1 => "q1",
            Mode::Mech2 => "q2",
        }
    }

    fn others(self) -> (Mode, Mode) {
        match self {
            Mode::Optical => (Mode::Mech1, Mode::Mech2),
            Mode::Mech1 => (Mode::Optical, Mode::Mech2),
            Mode::Mech2 => (Mode::Optical, Mode::Mech1),
        }
    }
}

impl fmt::Display for Mode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

/// The three two-mode bipartitions, in report order.
pub const PAIRS: [(Mode, Mode); 3] = [
    (Mode::Optical, Mode::Mech1),
    (Mode::Optical, Mode::Mech2),
    (Mode::Mech1, Mode::Mech2),
];

fn pair_label(mu: Mode, nu: Mode) -> String {
    format!("{mu}|{nu}")
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CovarianceMatrix<T: Real> {
    pub v: Matrix6<T>,
}

impl<T: Real> CovarianceMatrix<T> {
    pub fn new(v: Matrix6<T>) -> Self {
        CovarianceMatrix { v }
    }

    pub fn vacuum() -> Self {
        Self::new(Matrix6::identity() * T::lit(0.5))
    }

    pub fn block(&self, row: Mode, col: Mode) -> Matrix2<T> {
        self.v.fixed_view::<2, 2>(row.offset(), col.offset()).into_owned()
    }

    /// 4×4 matrix `[[A, C], [C^T, B]]` of modes `mu` and `nu`.
    pub fn reduced(&self, mu: Mode, nu: Mode) -> Matrix4<T> {
        let mut m = Matrix4::zeros();
        for (bi, a) in [mu, nu].into_iter().enumerate() {
            for (bj, b) in [mu, nu].into_iter().enumerate() {
                m.fixed_view_mut::<2, 2>(2 * bi, 2 * bj).copy_from(&self.block(a, b));
            }
        }
        m
    }

    /// Smallest symplectic eigenvalue; `>= 1/2` for a physical state.
    pub fn min_symplectic(&self) -> Result<T, GaussianError> {
        symplectic_spectrum(&dyn_of(&self.v)).map(|s| s[0])
    }

    pub fn is_bona_fide(&self, tol: T) -> bool {
        self.min_symplectic().map(|nu| nu >= T::lit(0.5) - tol).unwrap_or(false)
    }

    pub fn max_asymmetry(&self) -> T {
        (self.v - self.v.transpose()).amax()
    }
}

fn dyn_of<T: Real, const R: usize>(m: &nalgebra::SMatrix<T, R, R>) -> DMatrix<T> {
    DMatrix::from_fn(R, R, |r, c| m[(r, c)])
}

/// Builds the covariance matrix from the 24 moments, rejecting imaginary
/// residues above `max(1e-9, 1e4 eps ‖x‖∞)`.
pub fn assemble_cm<T: Real>(x: &MomentVector<T>) -> Result<CovarianceMatrix<T>, GaussianError> {
    let xs = |k: usize| x.x(k);
    let half = T::lit(0.5);
    let rs2 = T::lit(std::f64::consts::FRAC_1_SQRT_2);
    let i = imag_unit::<T>();
    let tol = T::lit(1e-9).max(T::default_epsilon() * T::lit(1e4) * x.norm_inf());

    let mut v = Matrix6::<T>::zeros();
    let mut put = |r: usize, c: usize, z: Complex<T>, entry: &'static str| {
        if z.im.abs() > tol {
            return Err(GaussianError::NonHermitianMoments {
                entry,
                residue: to_f64(z.im.abs()),
            });
        }
        v[(r, c)] = z.re;
        v[(c, r)] = z.re;
        Ok(())
    };

    put(0, 0, scale(xs(1) + xs(2) + xs(7) + xs(8), half), "XX")?;
    put(1, 1, scale(xs(1) + xs(2) - xs(7) - xs(8), half), "YY")?;
    put(0, 1, scale(i * (xs(8) - xs(7)), half), "XY")?;
    let mech: [(usize, usize, usize, &'static str, &'static str); 4] = [
        (2, 14, 13, "Xq1", "Yq1"),
        (3, 16, 15, "Xp1", "Yp1"),
        (4, 18, 17, "Xq2", "Yq2"),
        (5, 20, 19, "Xp2", "Yp2"),
    ];
    for (col, kd, k, lx, ly) in mech {
        put(0, col, scale(xs(kd) + xs(k), rs2), lx)?;
        put(1, col, scale(i * (xs(kd) - xs(k)), rs2), ly)?;
    }
    put(2, 2, xs(3), "q1q1")?;
    put(3, 3, xs(4), "p1p1")?;
    put(2, 3, scale(xs(9) + xs(10), half), "q1p1")?;
    put(4, 4, xs(5), "q2q2")?;
    put(5, 5, xs(6), "p2p2")?;
    put(4, 5, scale(xs(11) + xs(12), half), "q2p2")?;
    put(2, 4, xs(21), "q1q2")?;
    put(3, 5, xs(22), "p1p2")?;
    put(2, 5, xs(23), "q1p2")?;
    put(3, 4, xs(24), "p1q2")?;
    Ok(CovarianceMatrix::new(v))
}

/// Symplectic form for `n` modes in `(x1, p1, x2, p2, ...)` order.
pub fn symplectic_form<T: Real>(n: usize) -> DMatrix<T> {
    let mut om = DMatrix::zeros(2 * n, 2 * n);
    for k in 0..n {
        om[(2 * k, 2 * k + 1)] = T::one();
        om[(2 * k + 1, 2 * k)] = -T::one();
    }
    om
}

/// Symplectic eigenvalues of a `2n × 2n` covariance matrix, ascending: the
/// moduli of the eigenvalues of `iΩV`, which come in `±ν` pairs.
pub fn symplectic_spectrum<T: Real>(v: &DMatrix<T>) -> Result<Vec<T>, GaussianError> {
    let n2 = v.nrows();
    let om = symplectic_form::<T>(n2 / 2);
    let iom_v = (om * v).map(|x| cplx(T::zero(), x));
    let mut moduli: Vec<T> = eigenvalues(&iom_v)
        .ok_or(GaussianError::EigenFailure)?
        .into_iter()
        .map(cabs)
        .collect();
    moduli.sort_by(|a, b| a.partial_cmp(b).unwrap_or(std::cmp::Ordering::Equal));
    Ok(moduli.chunks(2).map(|p| (p[0] + p[1]) * T::lit(0.5)).collect())
}

/// `diag(1, ..., -1, ...)` flipping the momentum of `mode`.
fn flip_momentum<T: Real>(v: &Matrix6<T>, mode: Mode) -> Matrix6<T> {
    let mut out = *v;
    let k = mode.offset() + 1;
    for j in 0..6 {
        if j != k {
            out[(k, j)] = -out[(k, j)];
            out[(j, k)] = -out[(j, k)];
        }
    }
    out
}

fn cross_check_tol<T: Real>() -> T {
    T::lit(1e-9).max(T::default_epsilon() * T::lit(1e5))
}

/// `max(0, -ln 2η)`. Within a few ulp of `2η = 1` the eigen-solver noise
/// is reported as 0 rather than as a ~1e-16 negativity.
fn negativity_from_eta<T: Real>(eta: T) -> T {
    let two_eta = eta + eta;
    if two_eta >= T::one() - T::lit(16.0) * T::default_epsilon() {
        return T::zero();
    }
    -two_eta.ln()
}

/// Smallest partially transposed symplectic eigenvalue of the reduced state
/// of `(mu, nu)`, from the invariants `Σ = det A + det B - 2 det C` and `det V`.
pub fn eta_minus<T: Real>(cm: &CovarianceMatrix<T>, mu: Mode, nu: Mode) -> T {
    let det_a = cm.block(mu, mu).determinant();
    let det_b = cm.block(nu, nu).determinant();
    let det_c = cm.block(mu, nu).determinant();
    let det_v = cm.reduced(mu, nu).determinant();
    let sigma = det_a + det_b - T::lit(2.0) * det_c;
    let disc = (sigma * sigma - T::lit(4.0) * det_v).max(T::zero());
    // (Σ - sqrt(disc))/2 written without the cancellation.
    let eta2 = if sigma > T::zero() {
        T::lit(2.0) * det_v / (sigma + disc.sqrt())
    } else {
        (sigma - disc.sqrt()) * T::lit(0.5)
    };
    eta2.max(T::zero()).sqrt()
}

/// Logarithmic negativity of the `(mu, nu)` reduced state, checked against
/// the symplectic spectrum of the explicitly transposed 4×4 matrix.
pub fn log_negativity<T: Real>(cm: &CovarianceMatrix<T>, mu: Mode, nu: Mode) -> Result<T, GaussianError> {
    assert!(mu != nu, "bipartition needs two distinct modes");
    let red = cm.reduced(mu, nu);
    let nu_min = symplectic_spectrum(&dyn_of(&red))?[0];
    let tol = cross_check_tol::<T>();
    if nu_min < T::lit(0.5) - tol.max(T::lit(1e-8)) {
        return Err(GaussianError::NonPhysicalReduced {
            pair: pair_label(mu, nu),
            nu_min: to_f64(nu_min),
        });
    }
    let eta = eta_minus(cm, mu, nu);
    let mut flipped = red;
    for j in 0..4 {
        if j != 3 {
            flipped[(3, j)] = -flipped[(3, j)];
            flipped[(j, 3)] = -flipped[(j, 3)];
        }
    }
    let spectral = symplectic_spectrum(&dyn_of(&flipped))?[0];
    if (eta - spectral).abs() > tol * (T::one() + spectral) {
        return Err(GaussianError::SpectralMismatch {
            pair: pair_label(mu, nu),
            closed: to_f64(eta),
            spectral: to_f64(spectral),
        });
    }
    Ok(negativity_from_eta(eta))
}

/// Squared logarithmic negativity of the `focus | rest` split of all three
/// modes, from the momentum-flipped 6×6 matrix.
pub fn one_vs_two_contangle<T: Real>(cm: &CovarianceMatrix<T>, focus: Mode) -> Result<T, GaussianError> {
    let flipped = flip_momentum(&cm.v, focus);
    let eta = symplectic_spectrum(&dyn_of(&flipped))?[0];
    let e = negativity_from_eta(eta);
    Ok(e * e)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ResidualContangle<T> {
    /// `max(0, raw_min)`.
    pub min: T,
    pub raw_min: T,
    /// `E_τ^{r|st} - E_τ^{r|s} - E_τ^{r|t}` for focus `r` = a, q1, q2.
    pub per_focus: [T; 3],
    pub monogamy_violation: bool,
}

pub fn residual_contangle_min<T: Real>(cm: &CovarianceMatrix<T>) -> Result<ResidualContangle<T>, GaussianError> {
    let mut per_focus = [T::zero(); 3];
    for (k, &r) in Mode::ALL.iter().enumerate() {
        let (s, t) = r.others();
        let ers = log_negativity(cm, r, s)?;
        let ert = log_negativity(cm, r, t)?;
        per_focus[k] = one_vs_two_contangle(cm, r)? - ers * ers - ert * ert;
    }
    let raw_min = per_focus.iter().copied().fold(per_focus[0], |m, x| m.min(x));
    let violation = raw_min < -T::lit(1e-9);
    if raw_min < T::zero() {
        log::debug!("raw minimum residual contangle {}", to_f64(raw_min));
    }
    Ok(ResidualContangle {
        min: raw_min.max(T::zero()),
        raw_min,
        per_focus,
        monogamy_violation: violation,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum SteeringRegime {
    NoWay,
    OneWay,
    TwoWay,
}

impl SteeringRegime {
    pub fn as_str(self) -> &'static str {
        match self {
            SteeringRegime::NoWay => "no-way",
            SteeringRegime::OneWay => "one-way",
            SteeringRegime::TwoWay => "two-way",
        }
    }

    /// Regime of a steering pair, counting values above `zero` as nonzero.
    pub fn classify<T: Real>(forward: T, backward: T, zero: T) -> Self {
        match (forward > zero, backward > zero) {
            (false, false) => SteeringRegime::NoWay,
            (true, true) => SteeringRegime::TwoWay,
            _ => SteeringRegime::OneWay,
        }
    }
}

impl fmt::Display for SteeringRegime {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Threshold above which a steerability counts as nonzero.
pub const STEERING_ZERO: f64 = 1e-10;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SteeringPair<T> {
    /// `S^{mu -> nu}`.
    pub forward: T,
    /// `S^{nu -> mu}`.
    pub backward: T,
    pub regime: SteeringRegime,
}

/// Gaussian steerability in both directions:
/// `S^{mu -> nu} = max(0, ln(det A_mu / (4 det V)) / 2)`.
pub fn steering_pair<T: Real>(cm: &CovarianceMatrix<T>, mu: Mode, nu: Mode) -> SteeringPair<T> {
    let det_v = cm.reduced(mu, nu).determinant();
    let s = |m: Mode| {
        let det = cm.block(m, m).determinant();
        ((det / (T::lit(4.0) * det_v)).ln() * T::lit(0.5)).max(T::zero())
    };
    let (forward, backward) = (s(mu), s(nu));
    let regime = SteeringRegime::classify(forward, backward, T::lit(STEERING_ZERO));
    SteeringPair {
        forward,
        backward,
        regime,
    }
}

/// All measures of one steady state. Arrays follow [`PAIRS`] order
/// (a|q1, a|q2, q1|q2) or focus order (a, q1, q2).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MeasureReport<T> {
    pub e_n: [T; 3],
    pub e_tau_one_vs_two: [T; 3],
    pub residual: ResidualContangle<T>,
    pub steering: [SteeringPair<T>; 3],
}

pub fn measure_report<T: Real>(cm: &CovarianceMatrix<T>) -> Result<MeasureReport<T>, GaussianError> {
    let mut e_n = [T::zero(); 3];
    let mut steering = [SteeringPair {
        forward: T::zero(),
        backward: T::zero(),
        regime: SteeringRegime::NoWay,
    }; 3];
    for (k, &(mu, nu)) in PAIRS.iter().enumerate() {
        e_n[k] = log_negativity(cm, mu, nu)?;
        steering[k] = steering_pair(cm, mu, nu);
    }
    let mut e_tau = [T::zero(); 3];
    for (k, &r) in Mode::ALL.iter().enumerate() {
        e_tau[k] = one_vs_two_contangle(cm, r)?;
    }
    Ok(MeasureReport {
        e_n,
        e_tau_one_vs_two: e_tau,
        residual: residual_contangle_min(cm)?,
        steering,
    })
}

/// Two-mode squeezed vacuum of squeezing `r` placed on modes `(mu, nu)`,
/// vacuum elsewhere.
pub fn tmsv<T: Real>(r: T, mu: Mode, nu: Mode) -> CovarianceMatrix<T> {
    let two_r = r + r;
    let (c, s) = (two_r.cosh() * T::lit(0.5), two_r.sinh() * T::lit(0.5));
    let mut v = Matrix6::identity() * T::lit(0.5);
    for k in 0..2 {
        v[(mu.offset() + k, mu.offset() + k)] = c;
        v[(nu.offset() + k, nu.offset() + k)] = c;
    }
    let (a, b) = (mu.offset(), nu.offset());
    v[(a, b)] = s;
    v[(b, a)] = s;
    v[(a + 1, b + 1)] = -s;
    v[(b + 1, a + 1)] = -s;
    CovarianceMatrix::new(v)
}

/// Applies a phase-space rotation by `phi` to one mode.
pub fn rotate_mode<T: Real>(cm: &CovarianceMatrix<T>, mode: Mode, phi: T) -> CovarianceMatrix<T> {
    let mut s = Matrix6::<T>::identity();
    let o = mode.offset();
    s[(o, o)] = phi.cos();
    s[(o, o + 1)] = phi.sin();
    s[(o + 1, o)] = -phi.sin();
    s[(o + 1, o + 1)] = phi.cos();
    CovarianceMatrix::new(s * cm.v * s.transpose())
}
