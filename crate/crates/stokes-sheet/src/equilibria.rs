//! Flat-state spectrum, equilibria of the capillarity equation
//! `(f'/omega)' + lambda f = 0`, branch continuation, and numerical stability
//! of the resulting fingers.

use crate::error::{Error, Result};
use crate::evolution::{flat_eigenvalue, psi};
use crate::params::FluidParams;
use crate::profile::InterfaceProfile;
use crate::spectral;
use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

/// Sup-norm target for [`solve_equilibrium`].
pub const EQUILIBRIUM_TOL: f64 = 1e-11;
const MAX_NEWTON: usize = 50;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Classification {
    Stable,
    Unstable,
}

#[derive(Debug, Clone)]
pub struct SpectrumReport {
    /// `lambda_k` for `k = 1..=K`.
    pub analytic: Vec<f64>,
    /// Eigenvalues of the finite-difference linearization, sorted by
    /// decreasing real part.
    pub numeric: Vec<Complex64>,
    pub theta0: f64,
    pub classification: Classification,
}

impl SpectrumReport {
    /// For each `k`, the numeric eigenvalue nearest to `lambda_k`.
    pub fn matched(&self) -> Vec<(usize, f64, Complex64)> {
        self.analytic
            .iter()
            .enumerate()
            .map(|(i, &a)| {
                let z = self
                    .numeric
                    .iter()
                    .copied()
                    .min_by(|x, y| (x - a).norm().total_cmp(&(y - a).norm()))
                    .unwrap_or(Complex64::new(f64::NAN, f64::NAN));
                (i + 1, a, z)
            })
            .collect()
    }

    /// Number of numeric eigenvalues within `rel` (relative) of `lambda_k`.
    pub fn multiplicity(&self, k: usize, rel: f64) -> usize {
        let a = self.analytic[k - 1];
        self.numeric
            .iter()
            .filter(|z| (*z - a).norm() <= rel * a.abs().max(f64::MIN_POSITIVE))
            .count()
    }
}

/// Exponential decay rate of the flat state.
pub fn theta0(params: &FluidParams) -> f64 {
    let (s, t, m) = (params.sigma, params.theta(), params.mu_sum());
    if s - t >= 0.0 {
        (s + t) / (2.0 * m)
    } else {
        (s * t).sqrt() / m
    }
}

pub fn classify(params: &FluidParams) -> Classification {
    if params.sigma + params.theta() < 0.0 {
        Classification::Unstable
    } else {
        Classification::Stable
    }
}

/// Which perturbations the linearization acts on.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Subspace {
    /// All zero-mean grid functions.
    ZeroMean,
    /// Even zero-mean functions (cosines).
    EvenZeroMean,
}

/// Real Fourier basis of the subspace, as `(k, is_cosine)`. The Nyquist mode
/// is left out: its odd derivatives vanish on the grid, so it carries no
/// meaningful curvature and shows up as a spurious eigenvalue.
fn basis(n: usize, space: Subspace) -> Vec<(usize, bool)> {
    let mut b = Vec::with_capacity(n);
    for k in 1..n / 2 {
        b.push((k, true));
        if space == Subspace::ZeroMean {
            b.push((k, false));
        }
    }
    b
}

fn basis_vector(n: usize, (k, cosine): (usize, bool)) -> Vec<f64> {
    spectral::nodes(n)
        .into_iter()
        .map(|x| if cosine { (k as f64 * x).cos() } else { (k as f64 * x).sin() })
        .collect()
}

fn coordinates(v: &[f64], b: &[(usize, bool)]) -> Result<Vec<f64>> {
    let p = InterfaceProfile::new(v.to_vec())?;
    Ok(b.iter()
        .map(|&(k, c)| if c { p.cos_amplitude(k) } else { p.sin_amplitude(k) })
        .collect())
}

/// Central-difference Jacobian of `Psi` at `f` in the real Fourier basis of
/// `space`, with step `1e-6 max(1, |f|_inf)`.
pub fn psi_jacobian(f: &InterfaceProfile, params: &FluidParams, space: Subspace) -> Result<DMatrix<f64>> {
    let n = f.n();
    let b = basis(n, space);
    let h = 1e-6 * f.max_abs().max(1.0);
    let column = |&bc: &(usize, bool)| -> Result<Vec<f64>> {
        let e = basis_vector(n, bc);
        let shifted = |sign: f64| -> Result<Vec<f64>> {
            let g: Vec<f64> = f.samples().iter().zip(&e).map(|(a, d)| a + sign * h * d).collect();
            psi(&InterfaceProfile::new(g)?, params)
        };
        let (p, m) = (shifted(1.0)?, shifted(-1.0)?);
        let d: Vec<f64> = p.iter().zip(&m).map(|(a, c)| (a - c) / (2.0 * h)).collect();
        coordinates(&d, &b)
    };
    #[cfg(feature = "parallel")]
    let cols: Vec<Result<Vec<f64>>> = {
        use rayon::prelude::*;
        b.par_iter().map(column).collect()
    };
    #[cfg(not(feature = "parallel"))]
    let cols: Vec<Result<Vec<f64>>> = b.iter().map(column).collect();
    let m = b.len();
    let mut jac = DMatrix::zeros(m, m);
    for (c, col) in cols.into_iter().enumerate() {
        jac.set_column(c, &DVector::from_vec(col?));
    }
    Ok(jac)
}

fn sorted_eigenvalues(m: DMatrix<f64>) -> Result<Vec<Complex64>> {
    if m.iter().any(|v| !v.is_finite()) {
        return Err(Error::Eigen("non-finite Jacobian".into()));
    }
    let mut ev: Vec<Complex64> = m.complex_eigenvalues().iter().copied().collect();
    if ev.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
        return Err(Error::Eigen("eigensolver returned non-finite values".into()));
    }
    ev.sort_by(|a, b| b.re.total_cmp(&a.re).then(b.im.total_cmp(&a.im)));
    Ok(ev)
}

/// Analytic and numeric spectrum of the linearization at the flat state on
/// an `n`-point grid.
pub fn flat_spectrum(params: &FluidParams, kmax: usize, n: usize) -> Result<SpectrumReport> {
    if kmax == 0 {
        return Err(Error::InvalidParameter("need at least one mode".into()));
    }
    let flat = InterfaceProfile::zeros(n)?;
    let jac = psi_jacobian(&flat, params, Subspace::ZeroMean)?;
    Ok(SpectrumReport {
        analytic: (1..=kmax).map(|k| flat_eigenvalue(k, params)).collect(),
        numeric: sorted_eigenvalues(jac)?,
        theta0: theta0(params),
        classification: classify(params),
    })
}

/// Lanczos approximation of the Gamma function for `x > 0`.
pub fn gamma(x: f64) -> f64 {
    const G: f64 = 7.0;
    const C: [f64; 9] = [
        0.999_999_999_999_809_9,
        676.520_368_121_885_1,
        -1_259.139_216_722_402_8,
        771.323_428_777_653_1,
        -176.615_029_162_140_6,
        12.507_343_278_686_905,
        -0.138_571_095_265_720_12,
        9.984_369_578_019_572e-6,
        1.505_632_735_149_311_6e-7,
    ];
    if x < 0.5 {
        return PI / ((PI * x).sin() * gamma(1.0 - x));
    }
    let x = x - 1.0;
    let mut a = C[0];
    let t = x + G + 0.5;
    for (i, c) in C.iter().enumerate().skip(1) {
        a += c / (x + i as f64);
    }
    (2.0 * PI).sqrt() * t.powf(x + 0.5) * (-t).exp() * a
}

/// `B(3/4, 1/2)^2 / (2 pi^2)`, the left end of the bifurcation interval.
pub fn lambda_star() -> f64 {
    let beta = gamma(0.75) * gamma(0.5) / gamma(1.25);
    beta * beta / (2.0 * PI * PI)
}

/// Cosine coefficients `a_1 .. a_{n/2-1}` of a grid function.
fn cos_coeffs(x: &[f64]) -> Vec<f64> {
    let c = spectral::forward(x);
    (1..x.len() / 2).map(|k| 2.0 * c[k].re).collect()
}

fn cos_synth(n: usize, a: &[f64]) -> Vec<f64> {
    let mut c = vec![Complex64::new(0.0, 0.0); n];
    for (i, &ak) in a.iter().enumerate() {
        let k = i + 1;
        c[k] = Complex64::new(0.5 * ak, 0.0);
        c[n - k] = Complex64::new(0.5 * ak, 0.0);
    }
    spectral::inverse(&c)
}

/// `F(lambda, f) = (f' / omega)' + lambda f` on the grid. Equilibria are
/// solved for in the cosines below the Nyquist mode, and their residual is
/// measured on the same modes.
pub fn capillarity_residual(lambda: f64, f: &[f64]) -> Vec<f64> {
    let fp = spectral::derivative(f, 1);
    let q: Vec<f64> = fp.iter().map(|d| d / (1.0 + d * d).sqrt()).collect();
    let dq = spectral::derivative(&q, 1);
    dq.iter().zip(f).map(|(a, b)| a + lambda * b).collect()
}

fn sup(v: &[f64]) -> f64 {
    v.iter().fold(0.0, |m, x| m.max(x.abs()))
}

/// Residual coefficients and the Jacobian in the cosine basis at `(lambda, a)`.
/// The last column of the returned matrix is the derivative in `lambda`.
fn linearize(lambda: f64, a: &[f64], n: usize) -> (Vec<f64>, DMatrix<f64>, f64) {
    let f = cos_synth(n, a);
    let res = cos_coeffs(&capillarity_residual(lambda, &f));
    let fp = spectral::derivative(&f, 1);
    let w3: Vec<f64> = fp.iter().map(|d| (1.0 + d * d).powf(-1.5)).collect();
    let m = a.len();
    let mut jac = DMatrix::zeros(m, m + 1);
    for k in 1..=m {
        let mut e = vec![0.0; m];
        e[k - 1] = 1.0;
        let g = cos_synth(n, &e);
        let gp = spectral::derivative(&g, 1);
        let t: Vec<f64> = gp.iter().zip(&w3).map(|(x, y)| x * y).collect();
        let dt = spectral::derivative(&t, 1);
        let col: Vec<f64> = dt.iter().zip(&g).map(|(x, y)| x + lambda * y).collect();
        jac.set_column(k - 1, &DVector::from_vec(cos_coeffs(&col)));
    }
    jac.set_column(m, &DVector::from_column_slice(a));
    let size = sup(&cos_synth(n, &res));
    (res, jac, size)
}

fn even_zero_mean(f: &InterfaceProfile) -> Vec<f64> {
    (1..f.n() / 2).map(|k| f.cos_amplitude(k)).collect()
}

/// Newton's method for `F(lambda, f) = 0` among even zero-mean profiles.
pub fn solve_equilibrium(lambda: f64, guess: &InterfaceProfile) -> Result<InterfaceProfile> {
    let n = guess.n();
    let mut a = even_zero_mean(guess);
    let mut residual = f64::INFINITY;
    for _ in 0..=MAX_NEWTON {
        let (r, jac, res) = linearize(lambda, &a, n);
        residual = res;
        if !res.is_finite() {
            break;
        }
        if res <= EQUILIBRIUM_TOL {
            return InterfaceProfile::new(cos_synth(n, &a));
        }
        let m = a.len();
        let ja = jac.columns(0, m).into_owned();
        let Some(step) = ja.lu().solve(&DVector::from_vec(r)) else {
            return Err(Error::Solve("singular capillarity Jacobian".into()));
        };
        for (x, d) in a.iter_mut().zip(step.iter()) {
            *x -= d;
        }
    }
    Err(Error::NoConvergence {
        iterations: MAX_NEWTON,
        residual,
    })
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct BranchPoint {
    pub ell: usize,
    /// Amplitude of `cos(ell xi)` in the profile.
    pub s: f64,
    pub lambda: f64,
    pub profile: InterfaceProfile,
    /// Sup-norm of `F(lambda, f)` restricted to the modes below Nyquist.
    pub residual: f64,
    /// Leading eigenvalue of the linearized evolution, when computed.
    pub stability: Option<f64>,
}

impl BranchPoint {
    pub fn amplitude(&self) -> f64 {
        self.profile.max_abs()
    }

    pub fn max_slope(&self) -> f64 {
        self.profile.max_slope()
    }

    /// Fluid parameters with `theta = -sigma lambda`.
    pub fn params(&self, mu_plus: f64, mu_minus: f64, sigma: f64) -> Result<FluidParams> {
        FluidParams::with_theta(mu_plus, mu_minus, sigma, -sigma * self.lambda)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ContinuationOptions {
    pub n: usize,
    /// Initial step; its sign picks the direction along the branch.
    pub ds: f64,
    /// Largest step magnitude.
    pub ds_max: f64,
    /// Stop once `|s|` reaches this value.
    pub s_max: f64,
    pub slope_cap: f64,
    pub max_points: usize,
    pub tol: f64,
}

impl Default for ContinuationOptions {
    fn default() -> Self {
        ContinuationOptions {
            n: 256,
            ds: 0.005,
            ds_max: 0.05,
            s_max: 10.0,
            slope_cap: 15.0,
            max_points: 5000,
            tol: 1e-11,
        }
    }
}

const MAX_HALVINGS: usize = 6;
const CORRECTOR_ITERS: usize = 12;

fn bordered_newton(
    y: &mut DVector<f64>,
    n: usize,
    border: &DVector<f64>,
    target: f64,
    tol: f64,
) -> Option<(f64, usize)> {
    let m = y.len() - 1;
    for it in 0..CORRECTOR_ITERS {
        let (r, jac, res) = linearize(y[0], &y.as_slice()[1..], n);
        if !res.is_finite() {
            return None;
        }
        let constraint = border.dot(y) - target;
        if res <= tol && constraint.abs() <= 1e-14 * (1.0 + target.abs()) {
            return Some((res, it));
        }
        // unknowns ordered (lambda, a_1, .., a_m)
        let mut big = DMatrix::zeros(m + 1, m + 1);
        big.view_mut((0, 0), (m, 1)).copy_from(&jac.columns(m, 1));
        big.view_mut((0, 1), (m, m)).copy_from(&jac.columns(0, m));
        big.set_row(m, &border.transpose());
        let mut rhs = DVector::zeros(m + 1);
        rhs.rows_mut(0, m).copy_from_slice(&r);
        rhs[m] = constraint;
        let step = big.lu().solve(&rhs)?;
        *y -= step;
    }
    let (_, _, res) = linearize(y[0], &y.as_slice()[1..], n);
    (res <= tol).then_some((res, CORRECTOR_ITERS))
}

fn tangent(y: &DVector<f64>, n: usize, previous: &DVector<f64>) -> Option<DVector<f64>> {
    let m = y.len() - 1;
    let (_, jac, _) = linearize(y[0], &y.as_slice()[1..], n);
    let mut big = DMatrix::zeros(m + 1, m + 1);
    big.view_mut((0, 0), (m, 1)).copy_from(&jac.columns(m, 1));
    big.view_mut((0, 1), (m, m)).copy_from(&jac.columns(0, m));
    big.set_row(m, &previous.transpose());
    let mut rhs = DVector::zeros(m + 1);
    rhs[m] = 1.0;
    let t = big.lu().solve(&rhs)?;
    let norm = t.norm();
    (norm.is_finite() && norm > 0.0).then(|| t / norm)
}

fn make_point(ell: usize, y: &DVector<f64>, n: usize, residual: f64) -> Result<BranchPoint> {
    let a = &y.as_slice()[1..];
    Ok(BranchPoint {
        ell,
        s: a[ell - 1],
        lambda: y[0],
        profile: InterfaceProfile::new(cos_synth(n, a))?,
        residual,
        stability: None,
    })
}

/// Pseudo-arclength continuation of the branch bifurcating from
/// `(lambda, f) = (ell^2, 0)`. The first point is the bifurcation point.
pub fn continue_branch_with(ell: usize, opts: &ContinuationOptions) -> Result<Vec<BranchPoint>> {
    let n = opts.n;
    crate::profile::check_grid_size(n)?;
    if ell == 0 || ell >= n / 2 {
        return Err(Error::InvalidParameter(format!("mode {ell} not representable on {n} points")));
    }
    if !(opts.ds.is_finite() && opts.ds != 0.0 && opts.ds_max >= opts.ds.abs()) {
        return Err(Error::InvalidParameter("need 0 < |ds| <= ds_max".into()));
    }
    let m = n / 2 - 1;
    let mut y = DVector::zeros(m + 1);
    y[0] = (ell * ell) as f64;
    let mut t = DVector::zeros(m + 1);
    t[ell] = opts.ds.signum();
    let mut points = vec![make_point(ell, &y, n, 0.0)?];
    let mut ds = opts.ds.abs();
    let mut halvings = 0;
    while points.len() < opts.max_points {
        let predicted = &y + &t * ds;
        let mut candidate = predicted.clone();
        let target = t.dot(&predicted);
        match bordered_newton(&mut candidate, n, &t, target, opts.tol) {
            Some((res, iters)) => {
                let point = make_point(ell, &candidate, n, res)?;
                if point.max_slope() > opts.slope_cap {
                    break;
                }
                let Some(new_t) = tangent(&candidate, n, &t) else {
                    return Err(Error::Solve("singular continuation tangent".into()));
                };
                let reached = point.s.abs() >= opts.s_max;
                points.push(point);
                y = candidate;
                t = new_t;
                halvings = 0;
                if reached {
                    break;
                }
                if iters <= 3 {
                    ds = (ds * 1.5).min(opts.ds_max);
                }
            }
            None => {
                halvings += 1;
                if halvings > MAX_HALVINGS {
                    return Err(Error::NoConvergence {
                        iterations: CORRECTOR_ITERS,
                        residual: f64::NAN,
                    });
                }
                ds *= 0.5;
            }
        }
    }
    Ok(points)
}

/// [`continue_branch_with`] with the default grid and step growth.
pub fn continue_branch(ell: usize, s_max: f64, ds: f64) -> Result<Vec<BranchPoint>> {
    continue_branch_with(
        ell,
        &ContinuationOptions {
            ds,
            ds_max: ContinuationOptions::default().ds_max.max(ds.abs()),
            s_max,
            ..ContinuationOptions::default()
        },
    )
}

/// The branch point with prescribed `cos(ell xi)` amplitude `s`, found by
/// Newton's method with `s` fixed, starting from the expansion
/// `lambda = ell^2 - 3 ell^4 s^2 / 8`, `f = s cos(ell xi)`.
pub fn branch_point_at(ell: usize, s: f64, n: usize) -> Result<BranchPoint> {
    crate::profile::check_grid_size(n)?;
    if ell == 0 || ell >= n / 2 {
        return Err(Error::InvalidParameter(format!("mode {ell} not representable on {n} points")));
    }
    let m = n / 2 - 1;
    let l2 = (ell * ell) as f64;
    let mut y = DVector::zeros(m + 1);
    y[0] = l2 - 3.0 * l2 * l2 * s * s / 8.0;
    y[ell] = s;
    let mut border = DVector::zeros(m + 1);
    border[ell] = 1.0;
    let (res, _) = bordered_newton(&mut y, n, &border, s, EQUILIBRIUM_TOL).ok_or(Error::NoConvergence {
        iterations: CORRECTOR_ITERS,
        residual: f64::NAN,
    })?;
    make_point(ell, &y, n, res)
}

/// Eigenvalues of the linearized evolution at an equilibrium, sorted by
/// decreasing real part. `params` must satisfy `theta = -sigma lambda`.
pub fn equilibrium_stability(
    point: &BranchPoint,
    params: &FluidParams,
    space: Subspace,
) -> Result<Vec<Complex64>> {
    let expected = -params.sigma * point.lambda;
    if (params.theta() - expected).abs() > 1e-12 * (1.0 + expected.abs()) {
        return Err(Error::InvalidParameter(format!(
            "theta = {} does not match -sigma lambda = {expected}",
            params.theta()
        )));
    }
    sorted_eigenvalues(psi_jacobian(&point.profile, params, space)?)
}

/// Least-squares `c` in `lambda = ell^2 + c s^2` over the points with
/// `s_lo <= |s| <= s_hi`.
pub fn fit_quadratic(points: &[BranchPoint], s_lo: f64, s_hi: f64) -> Option<f64> {
    let (mut num, mut den) = (0.0, 0.0);
    for p in points.iter().filter(|p| (s_lo..=s_hi).contains(&p.s.abs())) {
        let s2 = p.s * p.s;
        num += s2 * (p.lambda - (p.ell * p.ell) as f64);
        den += s2 * s2;
    }
    (den > 0.0).then(|| num / den)
}
