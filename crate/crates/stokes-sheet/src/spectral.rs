//! FFT helpers on the grid xi_j = 2 pi j / n - pi.
//!
//! Coefficients are stored in FFT order and normalised so that
//! `f(xi_j) = sum_k c_k exp(i k xi_j)`; the index `n/2` carries the Nyquist mode.

use num_complex::Complex64;
use rustfft::FftPlanner;
use std::cell::RefCell;
use std::f64::consts::PI;

thread_local! {
    static PLANNER: RefCell<FftPlanner<f64>> = RefCell::new(FftPlanner::new());
}

/// Collocation nodes of an `n`-point grid.
pub fn nodes(n: usize) -> Vec<f64> {
    (0..n).map(|j| node(n, j)).collect()
}

pub fn node(n: usize, j: usize) -> f64 {
    2.0 * PI * j as f64 / n as f64 - PI
}

/// Signed wavenumber of FFT slot `idx`; the Nyquist slot maps to `+n/2`.
pub fn wavenumber(idx: usize, n: usize) -> i64 {
    if idx <= n / 2 {
        idx as i64
    } else {
        idx as i64 - n as i64
    }
}

fn sign_flip(k: i64) -> f64 {
    if k % 2 == 0 {
        1.0
    } else {
        -1.0
    }
}

pub fn forward(x: &[f64]) -> Vec<Complex64> {
    let n = x.len();
    let mut buf: Vec<Complex64> = x.iter().map(|&v| Complex64::new(v, 0.0)).collect();
    PLANNER.with(|p| p.borrow_mut().plan_fft_forward(n).process(&mut buf));
    let inv = 1.0 / n as f64;
    for (idx, c) in buf.iter_mut().enumerate() {
        *c *= inv * sign_flip(wavenumber(idx, n));
    }
    buf
}

pub fn inverse(c: &[Complex64]) -> Vec<f64> {
    let n = c.len();
    let mut buf: Vec<Complex64> = c
        .iter()
        .enumerate()
        .map(|(idx, &v)| v * sign_flip(wavenumber(idx, n)))
        .collect();
    PLANNER.with(|p| p.borrow_mut().plan_fft_inverse(n).process(&mut buf));
    buf.iter().map(|v| v.re).collect()
}

/// Applies a Fourier multiplier; only the real part of the symbol is kept on
/// the Nyquist slot.
pub fn multiplier<F>(x: &[f64], symbol: F) -> Vec<f64>
where
    F: Fn(i64) -> Complex64,
{
    let n = x.len();
    let mut c = forward(x);
    for (idx, v) in c.iter_mut().enumerate() {
        let k = wavenumber(idx, n);
        let s = symbol(k);
        *v *= if idx == n / 2 { Complex64::new(s.re, 0.0) } else { s };
    }
    inverse(&c)
}

/// Spectral derivative of arbitrary order; odd orders zero the Nyquist mode.
pub fn derivative(x: &[f64], order: u32) -> Vec<f64> {
    multiplier(x, |k| Complex64::new(0.0, k as f64).powu(order))
}

/// Periodic Hilbert transform, symbol `-i sign(k)`.
pub fn hilbert(x: &[f64]) -> Vec<f64> {
    multiplier(x, |k| Complex64::new(0.0, -(k.signum() as f64)))
}

/// The multiplier `|k|`, i.e. `(-d^2/dxi^2)^{1/2}`.
pub fn abs_derivative(x: &[f64]) -> Vec<f64> {
    multiplier(x, |k| Complex64::new(k.unsigned_abs() as f64, 0.0))
}

pub fn mean(x: &[f64]) -> f64 {
    x.iter().sum::<f64>() / x.len() as f64
}

/// Band-limited interpolation onto an `m`-point grid (`m >= n`), splitting the
/// Nyquist mode symmetrically.
pub fn resample(x: &[f64], m: usize) -> Vec<f64> {
    let n = x.len();
    if m == n {
        return x.to_vec();
    }
    assert!(m > n, "resample only refines");
    let c = forward(x);
    let mut d = vec![Complex64::new(0.0, 0.0); m];
    for (idx, &v) in c.iter().enumerate() {
        let k = wavenumber(idx, n);
        if idx == n / 2 {
            d[n / 2] += 0.5 * v;
            d[m - n / 2] += 0.5 * v;
        } else if k >= 0 {
            d[k as usize] = v;
        } else {
            d[(m as i64 + k) as usize] = v;
        }
    }
    inverse(&d)
}

/// Pointwise product formed on a 3/2-padded grid and truncated back.
pub fn dealiased_product(a: &[f64], b: &[f64]) -> Vec<f64> {
    let n = a.len();
    let m = 3 * n / 2;
    let ca = forward(a);
    let cb = forward(b);
    let pad = |c: &[Complex64]| {
        let mut d = vec![Complex64::new(0.0, 0.0); m];
        for (idx, &v) in c.iter().enumerate() {
            let k = wavenumber(idx, n);
            if idx == n / 2 {
                continue;
            }
            let slot = if k >= 0 { k as usize } else { (m as i64 + k) as usize };
            d[slot] = v;
        }
        d
    };
    let pa = inverse(&pad(&ca));
    let pb = inverse(&pad(&cb));
    let prod: Vec<f64> = pa.iter().zip(&pb).map(|(x, y)| x * y).collect();
    let cp = forward(&prod);
    let mut out = vec![Complex64::new(0.0, 0.0); n];
    for (idx, slot) in out.iter_mut().enumerate() {
        let k = wavenumber(idx, n);
        if idx == n / 2 {
            continue;
        }
        let src = if k >= 0 { k as usize } else { (m as i64 + k) as usize };
        *slot = cp[src];
    }
    inverse(&out)
}

/// Row `j` of the spectral differentiation matrix, `(D f)_j = f'(xi_j)`.
pub fn differentiation_row(n: usize, j: usize) -> Vec<f64> {
    let h = 2.0 * PI / n as f64;
    (0..n)
        .map(|k| {
            // derivative of the k-th cardinal function at xi_j
            if k == j {
                0.0
            } else {
                let d = (j as f64 - k as f64) * h;
                let sign = if (j + n - k).is_multiple_of(2) { 1.0 } else { -1.0 };
                0.5 * sign / (0.5 * d).tan()
            }
        })
        .collect()
}
