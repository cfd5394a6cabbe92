use crate::error::{Error, Result};
use crate::spectral;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

/// A periodic graph interface sampled on the uniform grid.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<f64>", into = "Vec<f64>")]
pub struct InterfaceProfile {
    samples: Vec<f64>,
    coeffs: Vec<Complex64>,
}

/// Pointwise geometric quantities of the graph.
#[derive(Debug, Clone, PartialEq)]
pub struct GeometryBundle {
    pub fprime: Vec<f64>,
    pub omega: Vec<f64>,
    pub nu: Vec<[f64; 2]>,
    pub tau: Vec<[f64; 2]>,
    pub kappa: Vec<f64>,
}

impl TryFrom<Vec<f64>> for InterfaceProfile {
    type Error = Error;

    fn try_from(samples: Vec<f64>) -> Result<Self> {
        InterfaceProfile::new(samples)
    }
}

impl From<InterfaceProfile> for Vec<f64> {
    fn from(p: InterfaceProfile) -> Self {
        p.samples
    }
}

pub fn check_grid_size(n: usize) -> Result<()> {
    if n >= 16 && n.is_power_of_two() {
        Ok(())
    } else {
        Err(Error::InvalidGridSize(n))
    }
}

impl InterfaceProfile {
    pub fn new(samples: Vec<f64>) -> Result<Self> {
        check_grid_size(samples.len())?;
        if samples.iter().any(|v| !v.is_finite()) {
            return Err(Error::NonFinite("profile samples"));
        }
        let coeffs = spectral::forward(&samples);
        Ok(InterfaceProfile { samples, coeffs })
    }

    pub fn zeros(n: usize) -> Result<Self> {
        Self::new(vec![0.0; n])
    }

    pub fn from_fn<F: Fn(f64) -> f64>(n: usize, f: F) -> Result<Self> {
        Self::new(spectral::nodes(n).into_iter().map(f).collect())
    }

    /// `f = mean + sum_k cos[k-1] cos(k xi) + sin[k-1] sin(k xi)`.
    pub fn from_modes(n: usize, mean: f64, cos: &[f64], sin: &[f64]) -> Result<Self> {
        if cos.len().max(sin.len()) >= n / 2 {
            return Err(Error::InvalidParameter(format!(
                "{} Fourier modes do not fit on a grid of {n} points",
                cos.len().max(sin.len())
            )));
        }
        Self::from_fn(n, |x| {
            let mut v = mean;
            for (k, a) in cos.iter().enumerate() {
                v += a * ((k + 1) as f64 * x).cos();
            }
            for (k, b) in sin.iter().enumerate() {
                v += b * ((k + 1) as f64 * x).sin();
            }
            v
        })
    }

    pub fn n(&self) -> usize {
        self.samples.len()
    }

    pub fn samples(&self) -> &[f64] {
        &self.samples
    }

    pub fn coeffs(&self) -> &[Complex64] {
        &self.coeffs
    }

    pub fn into_samples(self) -> Vec<f64> {
        self.samples
    }

    pub fn nodes(&self) -> Vec<f64> {
        spectral::nodes(self.n())
    }

    /// Integral mean, i.e. the mode-0 coefficient.
    pub fn mean(&self) -> f64 {
        self.coeffs[0].re
    }

    /// Amplitude of `cos(k xi)` in the real Fourier expansion.
    pub fn cos_amplitude(&self, k: usize) -> f64 {
        if k == 0 {
            self.mean()
        } else if k == self.n() / 2 {
            self.coeffs[k].re
        } else {
            2.0 * self.coeffs[k].re
        }
    }

    /// Amplitude of `sin(k xi)` in the real Fourier expansion.
    pub fn sin_amplitude(&self, k: usize) -> f64 {
        if k == 0 || k == self.n() / 2 {
            0.0
        } else {
            -2.0 * self.coeffs[k].im
        }
    }

    /// `sqrt(a_k^2 + b_k^2)` for `k = 1..=kmax`.
    pub fn mode_amplitudes(&self, kmax: usize) -> Vec<f64> {
        (1..=kmax)
            .map(|k| {
                if k > self.n() / 2 {
                    0.0
                } else {
                    self.cos_amplitude(k).hypot(self.sin_amplitude(k))
                }
            })
            .collect()
    }

    pub fn derivative(&self, order: usize) -> Result<Vec<f64>> {
        if !(1..=3).contains(&order) {
            return Err(Error::DerivativeOrder(order));
        }
        Ok(spectral::derivative(&self.samples, order as u32))
    }

    pub fn geometry(&self) -> GeometryBundle {
        let fprime = spectral::derivative(&self.samples, 1);
        let f2 = spectral::derivative(&self.samples, 2);
        let omega: Vec<f64> = fprime.iter().map(|d| (1.0 + d * d).sqrt()).collect();
        let nu = fprime.iter().zip(&omega).map(|(d, w)| [-d / w, 1.0 / w]).collect();
        let tau = fprime.iter().zip(&omega).map(|(d, w)| [1.0 / w, d / w]).collect();
        let kappa = f2.iter().zip(&omega).map(|(dd, w)| dd / (w * w * w)).collect();
        GeometryBundle {
            fprime,
            omega,
            nu,
            tau,
            kappa,
        }
    }

    /// `f(. - a) + c`, the horizontal shift applied through Fourier phases.
    pub fn translate(&self, a: f64, c: f64) -> InterfaceProfile {
        let n = self.n();
        let mut coeffs = self.coeffs.clone();
        for (idx, v) in coeffs.iter_mut().enumerate() {
            let k = spectral::wavenumber(idx, n) as f64;
            if idx == n / 2 {
                *v *= (k * a).cos();
            } else {
                *v *= Complex64::from_polar(1.0, -k * a);
            }
        }
        coeffs[0] += c;
        let samples = spectral::inverse(&coeffs);
        InterfaceProfile { samples, coeffs }
    }

    pub fn max_abs(&self) -> f64 {
        self.samples.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    pub fn max_slope(&self) -> f64 {
        spectral::derivative(&self.samples, 1)
            .iter()
            .fold(0.0, |m, v| m.max(v.abs()))
    }

    /// Band-limited interpolation at arbitrary `x`.
    pub fn eval(&self, x: f64) -> f64 {
        let n = self.n();
        let mut v = self.coeffs[0].re;
        for idx in 1..n / 2 {
            v += 2.0 * (self.coeffs[idx] * Complex64::from_polar(1.0, idx as f64 * x)).re;
        }
        v + self.coeffs[n / 2].re * ((n / 2) as f64 * x).cos()
    }

    /// Nodewise reflection `xi -> -xi`.
    pub fn reflect(&self) -> InterfaceProfile {
        let n = self.n();
        let samples = (0..n).map(|j| self.samples[(n - j) % n]).collect();
        InterfaceProfile::new(samples).expect("reflection keeps the grid")
    }
}
