//! Browser bindings for three operations: the flat-state spectrum, the
//! capillarity-gravity equilibrium branches, and a stepping simulation.
//!
//! Tables cross the boundary as flat `Float64Array`s with a fixed row width.

use stokes_sheet::equilibria::{branch_point_at, continue_branch_with, flat_spectrum, ContinuationOptions};
use stokes_sheet::evolution::{Integrator, Scheme};
use stokes_sheet::{Error, FluidParams, InterfaceProfile, Result};
use wasm_bindgen::prelude::*;

/// Row width of [`spectrum_table`].
pub const SPECTRUM_COLS: usize = 4;
/// Row width of [`branch_table`].
pub const BRANCH_COLS: usize = 4;

const MAX_AMPLITUDE: f64 = 50.0;

/// Rows `k, lambda_analytic, lambda_numeric_re, lambda_numeric_im`.
pub fn spectrum_table(params: &FluidParams, kmax: usize, n: usize) -> Result<Vec<f64>> {
    let rep = flat_spectrum(params, kmax, n)?;
    Ok(rep
        .matched()
        .into_iter()
        .flat_map(|(k, a, z)| [k as f64, a, z.re, z.im])
        .collect())
}

/// Rows `s, lambda, amplitude, slope_max` along the branch from `(ell^2, 0)`.
pub fn branch_table(ell: usize, n: usize, s_max: f64, ds: f64) -> Result<Vec<f64>> {
    let opts = ContinuationOptions {
        n,
        ds,
        ds_max: 10.0 * ds.abs(),
        s_max,
        ..ContinuationOptions::default()
    };
    Ok(continue_branch_with(ell, &opts)?
        .iter()
        .flat_map(|p| [p.s, p.lambda, p.amplitude(), p.max_slope()])
        .collect())
}

/// Time stepper holding the current interface.
#[derive(Debug, Clone)]
pub struct Run {
    integ: Integrator,
    profile: InterfaceProfile,
    t: f64,
}

impl Run {
    pub fn new(params: &FluidParams, n: usize, cos: &[f64], sin: &[f64], dt: f64) -> Result<Self> {
        let profile = InterfaceProfile::from_modes(n, 0.0, cos, sin)?;
        if !(dt.is_finite() && dt > 0.0) {
            return Err(Error::InvalidParameter(format!("dt must be positive, got {dt}")));
        }
        Ok(Run {
            integ: Integrator::new(Scheme::Imex2, dt, params, true),
            profile,
            t: 0.0,
        })
    }

    pub fn advance(&mut self, steps: usize) -> Result<()> {
        for _ in 0..steps {
            let next = self.integ.step(&self.profile)?;
            if next.max_abs() > MAX_AMPLITUDE {
                return Err(Error::InvalidParameter(format!(
                    "amplitude {:.3e} exceeds {MAX_AMPLITUDE} at t = {:.4}",
                    next.max_abs(),
                    self.t
                )));
            }
            self.profile = next;
            self.t += self.integ.dt();
        }
        Ok(())
    }

    pub fn time(&self) -> f64 {
        self.t
    }

    pub fn profile(&self) -> &InterfaceProfile {
        &self.profile
    }
}

fn params(mu_plus: f64, mu_minus: f64, sigma: f64, theta: f64) -> Result<FluidParams> {
    FluidParams::with_theta(mu_plus, mu_minus, sigma, theta)
}

#[wasm_bindgen(js_name = flatSpectrum)]
pub fn flat_spectrum_js(
    mu_plus: f64,
    mu_minus: f64,
    sigma: f64,
    theta: f64,
    kmax: usize,
    n: usize,
) -> std::result::Result<Vec<f64>, JsError> {
    Ok(spectrum_table(&params(mu_plus, mu_minus, sigma, theta)?, kmax, n)?)
}

#[wasm_bindgen(js_name = branch)]
pub fn branch_js(ell: usize, n: usize, s_max: f64, ds: f64) -> std::result::Result<Vec<f64>, JsError> {
    Ok(branch_table(ell, n, s_max, ds)?)
}

/// Samples of the branch equilibrium with `cos(ell xi)` amplitude `s`.
#[wasm_bindgen(js_name = branchProfile)]
pub fn branch_profile_js(ell: usize, s: f64, n: usize) -> std::result::Result<Vec<f64>, JsError> {
    Ok(branch_point_at(ell, s, n)?.profile.into_samples())
}

#[wasm_bindgen(js_name = lambdaStar)]
pub fn lambda_star_js() -> f64 {
    stokes_sheet::equilibria::lambda_star()
}

#[wasm_bindgen]
pub struct Simulation(Run);

#[wasm_bindgen]
impl Simulation {
    #[wasm_bindgen(constructor)]
    #[allow(clippy::too_many_arguments)]
    pub fn new(
        mu_plus: f64,
        mu_minus: f64,
        sigma: f64,
        theta: f64,
        n: usize,
        cos: Vec<f64>,
        sin: Vec<f64>,
        dt: f64,
    ) -> std::result::Result<Simulation, JsError> {
        let p = params(mu_plus, mu_minus, sigma, theta)?;
        Ok(Simulation(Run::new(&p, n, &cos, &sin, dt)?))
    }

    pub fn advance(&mut self, steps: usize) -> std::result::Result<(), JsError> {
        Ok(self.0.advance(steps)?)
    }

    pub fn time(&self) -> f64 {
        self.0.time()
    }

    pub fn profile(&self) -> Vec<f64> {
        self.0.profile().samples().to_vec()
    }

    pub fn nodes(&self) -> Vec<f64> {
        self.0.profile().nodes()
    }

    pub fn amplitude(&self) -> f64 {
        self.0.profile().max_abs()
    }

    pub fn slope(&self) -> f64 {
        self.0.profile().max_slope()
    }
}
