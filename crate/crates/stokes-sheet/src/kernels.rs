//! The x1-periodic Stokes kernels and their scalar building blocks.
//!
//! With `t = tan(x1/2)` and `T = tanh(x2/2)` the kernels are rational in
//! `(t, T)`. They are evaluated through `s = sin(x1/2)`, `c = cos(x1/2)` so
//! nothing overflows at `x1 = pi`; the common denominator is
//! `den = s^2 + T^2 c^2 = c^2 (t^2 + T^2)`.

use crate::error::{Error, Result};
use std::f64::consts::PI;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KernelPoint {
    pub x1: f64,
    pub x2: f64,
}

impl KernelPoint {
    /// Reduces `x1` into `(-pi, pi]`.
    pub fn new(x1: f64, x2: f64) -> Self {
        KernelPoint {
            x1: reduce_angle(x1),
            x2,
        }
    }
}

pub fn reduce_angle(x: f64) -> f64 {
    let two_pi = 2.0 * PI;
    let mut r = (x + PI).rem_euclid(two_pi) - PI;
    if r <= -PI {
        r += two_pi;
    }
    r
}

pub type Mat2 = [[f64; 2]; 2];

/// All seven scalar kernels at one point, `z[0..=6]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ZValues(pub [f64; 7]);

/// `ln cosh(y)` without overflow.
fn ln_cosh(y: f64) -> f64 {
    let a = y.abs();
    a + (-2.0 * a).exp().ln_1p() - std::f64::consts::LN_2
}

pub fn z_all(p: KernelPoint) -> Result<ZValues> {
    let (s, c) = (0.5 * p.x1).sin_cos();
    let tt = (0.5 * p.x2).tanh();
    let sech2 = 1.0 - tt * tt;
    let den = s * s + tt * tt * c * c;
    if den == 0.0 {
        return Err(Error::SingularPoint);
    }
    let z0 = den.max(1e-300).ln() + 2.0 * ln_cosh(0.5 * p.x2);
    let z1 = s * c * sech2 / den;
    let z2 = tt / den;
    let den2 = 2.0 * den * den;
    let z5 = sech2 * (s * s - tt * tt * c * c) / den2;
    let z6 = s * c * tt * sech2 / den2;
    Ok(ZValues([z0, z1, z2, p.x2 * z5, p.x2 * z6, z5, z6]))
}

pub fn z(i: usize, p: KernelPoint) -> Result<f64> {
    if i > 6 {
        return Err(Error::InvalidParameter(format!("kernel index {i} out of range 0..=6")));
    }
    Ok(z_all(p)?.0[i])
}

/// Periodic Stokeslet `U` and pressure kernel `P`; column `k` of `U` with
/// `P[k]` is one Stokes solution.
pub fn stokeslet(p: KernelPoint) -> Result<(Mat2, [f64; 2])> {
    let z = z_all(p)?.0;
    Ok(stokeslet_from(&z, p.x2))
}

pub(crate) fn stokeslet_from(z: &[f64; 7], x2: f64) -> ([[f64; 2]; 2], [f64; 2]) {
    let a = 1.0 / (8.0 * PI);
    let off = -a * x2 * z[1];
    let u = [[a * (z[0] + x2 * z[2]), off], [off, a * (z[0] - x2 * z[2])]];
    let b = -1.0 / (4.0 * PI);
    (u, [b * z[1], b * z[2]])
}

/// Stresslet matrices `W1`, `W2` and pressure matrix `Q`.
pub fn stresslet(p: KernelPoint) -> Result<(Mat2, Mat2, Mat2)> {
    let z = z_all(p)?.0;
    let a = 1.0 / (4.0 * PI);
    let w1 = [
        [a * (2.0 * z[1] - 2.0 * z[4]), a * (z[2] + z[3])],
        [a * (z[2] + z[3]), a * 2.0 * z[4]],
    ];
    let w2 = [
        [a * (z[2] + z[3]), a * 2.0 * z[4]],
        [a * 2.0 * z[4], a * (z[2] - z[3])],
    ];
    let b = 1.0 / (2.0 * PI);
    let q = [[b * z[5], b * 2.0 * z[6]], [b * 2.0 * z[6], -b * z[5]]];
    Ok((w1, w2, q))
}
