use crate::error::{Error, Result};
use serde::{Deserialize, Serialize};

/// Physical constants of the two fluids. `plus` is the upper phase.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FluidParams {
    pub mu_plus: f64,
    pub mu_minus: f64,
    pub rho_plus: f64,
    pub rho_minus: f64,
    pub sigma: f64,
    pub g: f64,
}

impl FluidParams {
    pub fn new(
        mu_plus: f64,
        mu_minus: f64,
        rho_plus: f64,
        rho_minus: f64,
        sigma: f64,
        g: f64,
    ) -> Result<Self> {
        let p = FluidParams {
            mu_plus,
            mu_minus,
            rho_plus,
            rho_minus,
            sigma,
            g,
        };
        p.validate()?;
        Ok(p)
    }

    /// Builds parameters with a prescribed `theta = -g [rho]`, using `g = |theta|`
    /// (or `g = 0` when `theta = 0`) and unit-scale densities.
    pub fn with_theta(mu_plus: f64, mu_minus: f64, sigma: f64, theta: f64) -> Result<Self> {
        if !theta.is_finite() {
            return Err(Error::InvalidParameter("theta must be finite".into()));
        }
        let (g, jump) = if theta == 0.0 { (0.0, 0.0) } else { (theta.abs(), -theta.signum()) };
        let rho_minus = 1.0 + jump.min(0.0).abs();
        let rho_plus = rho_minus + jump;
        Self::new(mu_plus, mu_minus, rho_plus, rho_minus, sigma, g)
    }

    pub fn validate(&self) -> Result<()> {
        let positive = [
            ("mu_plus", self.mu_plus),
            ("mu_minus", self.mu_minus),
            ("rho_plus", self.rho_plus),
            ("rho_minus", self.rho_minus),
            ("sigma", self.sigma),
        ];
        for (name, v) in positive {
            if !(v.is_finite() && v > 0.0) {
                return Err(Error::InvalidParameter(format!("{name} must be positive, got {v}")));
            }
        }
        if !(self.g.is_finite() && self.g >= 0.0) {
            return Err(Error::InvalidParameter(format!("g must be non-negative, got {}", self.g)));
        }
        Ok(())
    }

    /// `-g (rho_plus - rho_minus)`.
    pub fn theta(&self) -> f64 {
        self.g * (self.rho_minus - self.rho_plus)
    }

    /// Viscosity contrast, in (-1, 1).
    pub fn a_mu(&self) -> f64 {
        (self.mu_plus - self.mu_minus) / (self.mu_plus + self.mu_minus)
    }

    /// Bifurcation parameter `-theta / sigma`.
    pub fn lambda(&self) -> f64 {
        -self.theta() / self.sigma
    }

    pub fn mu_sum(&self) -> f64 {
        self.mu_plus + self.mu_minus
    }

    /// Coefficient of the leading-order dissipation, `sigma / (2 (mu_plus + mu_minus))`.
    pub fn alpha0(&self) -> f64 {
        self.sigma / (2.0 * self.mu_sum())
    }
}

impl Default for FluidParams {
    fn default() -> Self {
        FluidParams {
            mu_plus: 1.0,
            mu_minus: 1.0,
            rho_plus: 1.0,
            rho_minus: 1.0,
            sigma: 1.0,
            g: 0.0,
        }
    }
}
