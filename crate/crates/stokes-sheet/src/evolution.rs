//! The evolution operator `Psi(f)` and time integration of `df/dt = Psi(f)`.

use crate::bie::{far_field_constants, DensitySolver, FarFieldConstants, TractionDensity};
use crate::error::{Error, Result};
use crate::params::FluidParams;
use crate::profile::InterfaceProfile;
use crate::spectral;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;
use std::fmt;

/// Largest explicit RK4 step in units of `(2 pi / n) / alpha0`.
pub const RK4_CFL: f64 = 0.8;
/// Number of Fourier amplitudes kept in the diagnostics.
pub const DIAGNOSTIC_MODES: usize = 8;

/// Normal velocity of the interface and the density it came from.
#[derive(Debug, Clone)]
pub struct Velocity {
    pub psi: Vec<f64>,
    pub beta: TractionDensity,
    pub far_field: FarFieldConstants,
}

/// `Psi(f) = 2/(mu+ + mu-) (beta_2 - f' beta_1)`.
pub fn psi(f: &InterfaceProfile, params: &FluidParams) -> Result<Vec<f64>> {
    Ok(velocity(f, params, false)?.psi)
}

/// `Psi(f)` with the density and far-field constants; `dealias` pads the
/// pointwise products in the right side.
pub fn velocity(f: &InterfaceProfile, params: &FluidParams, dealias: bool) -> Result<Velocity> {
    let solver = DensitySolver::new(f, params)?;
    let rhs = crate::layer::rhs_v(f, params, solver.trace_ops(), dealias).components();
    let beta = solver.solve(&rhs)?;
    let fp = spectral::derivative(f.samples(), 1);
    let scale = 2.0 / params.mu_sum();
    let psi = (0..f.n())
        .map(|j| scale * (beta.beta2[j] - fp[j] * beta.beta1[j]))
        .collect();
    let far_field = far_field_constants(f, &beta, params);
    Ok(Velocity {
        psi,
        beta,
        far_field,
    })
}

/// Eigenvalue of the flat-state linearization on `cos(k xi)`.
pub fn flat_eigenvalue(k: usize, params: &FluidParams) -> f64 {
    let k = k as f64;
    -(params.theta() + params.sigma * k * k) / (2.0 * params.mu_sum() * k)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Diagnostics {
    pub mean: f64,
    pub max_amplitude: f64,
    pub max_slope: f64,
    /// `|f_k|` for `k = 1..=DIAGNOSTIC_MODES` (cosine-sine amplitude).
    pub amplitudes: Vec<f64>,
    pub c1: f64,
    pub c3: f64,
}

impl Diagnostics {
    fn compute(f: &InterfaceProfile, far: FarFieldConstants) -> Self {
        let kmax = DIAGNOSTIC_MODES.min(f.n() / 2);
        Diagnostics {
            mean: f.mean(),
            max_amplitude: f.max_abs(),
            max_slope: f.max_slope(),
            amplitudes: f.mode_amplitudes(kmax)[1..].to_vec(),
            c1: far.c1,
            c3: far.c3,
        }
    }
}

#[derive(Debug, Clone)]
pub struct EvolutionState {
    pub t: f64,
    pub profile: InterfaceProfile,
    pub diagnostics: Diagnostics,
}

impl EvolutionState {
    /// Builds a state, solving for the density to fill in the far-field constants.
    pub fn new(t: f64, profile: InterfaceProfile, params: &FluidParams) -> Result<Self> {
        let v = velocity(&profile, params, false)?;
        Ok(Self::from_velocity(t, profile, &v))
    }

    fn from_velocity(t: f64, profile: InterfaceProfile, v: &Velocity) -> Self {
        let diagnostics = Diagnostics::compute(&profile, v.far_field);
        EvolutionState {
            t,
            profile,
            diagnostics,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Scheme {
    Imex1,
    Imex2,
    #[serde(rename = "rk4-explicit")]
    Rk4Explicit,
}

impl fmt::Display for Scheme {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Scheme::Imex1 => "imex1",
            Scheme::Imex2 => "imex2",
            Scheme::Rk4Explicit => "rk4-explicit",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct TimeStepperConfig {
    pub scheme: Scheme,
    /// `None` selects `0.5 (2 pi / n) / alpha0 / max(1, |f0'|_inf)`.
    pub dt: Option<f64>,
    pub t_end: f64,
    /// Record every `stride`-th step.
    pub stride: usize,
    pub dealias: bool,
    pub max_amplitude: f64,
    pub max_slope: f64,
}

impl Default for TimeStepperConfig {
    fn default() -> Self {
        TimeStepperConfig {
            scheme: Scheme::Imex2,
            dt: None,
            t_end: 1.0,
            stride: 1,
            dealias: false,
            max_amplitude: 50.0,
            max_slope: 20.0,
        }
    }
}

impl TimeStepperConfig {
    pub fn default_dt(f0: &InterfaceProfile, params: &FluidParams) -> f64 {
        0.5 * (2.0 * PI / f0.n() as f64) / params.alpha0() / f0.max_slope().max(1.0)
    }

    /// The step actually taken, checked against the explicit stability limit.
    pub fn resolve_dt(&self, f0: &InterfaceProfile, params: &FluidParams) -> Result<f64> {
        let dt = self.dt.unwrap_or_else(|| Self::default_dt(f0, params));
        if !(dt.is_finite() && dt > 0.0) {
            return Err(Error::InvalidParameter(format!("dt must be positive, got {dt}")));
        }
        if !(self.t_end.is_finite() && self.t_end >= 0.0) {
            return Err(Error::InvalidParameter(format!(
                "t_end must be non-negative, got {}",
                self.t_end
            )));
        }
        if self.stride == 0 {
            return Err(Error::InvalidParameter("stride must be at least 1".into()));
        }
        if self.scheme == Scheme::Rk4Explicit {
            let limit = RK4_CFL * (2.0 * PI / f0.n() as f64) / params.alpha0();
            if dt > limit {
                return Err(Error::InvalidParameter(format!(
                    "dt = {dt} exceeds the rk4-explicit limit {limit}"
                )));
            }
        }
        Ok(dt)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum BreakdownReason {
    Amplitude(f64),
    Slope(f64),
    NonFinite,
    Solver,
}

impl fmt::Display for BreakdownReason {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            BreakdownReason::Amplitude(a) => write!(f, "amplitude {a:.6e} above cap"),
            BreakdownReason::Slope(s) => write!(f, "slope {s:.6e} above cap"),
            BreakdownReason::NonFinite => f.write_str("non-finite profile"),
            BreakdownReason::Solver => f.write_str("density solve failed"),
        }
    }
}

#[derive(Debug, Clone)]
pub struct Breakdown {
    /// Time the failed step was aiming for.
    pub t: f64,
    pub reason: BreakdownReason,
    pub message: String,
    pub last_good: EvolutionState,
}

/// Implicit part `alpha0 |k|` of the splitting.
fn implicit_solve(rhs: &[f64], coef: f64, shift: f64) -> Vec<f64> {
    spectral::multiplier(rhs, |k| {
        Complex64::new(1.0 / (shift + coef * k.unsigned_abs() as f64), 0.0)
    })
}

/// Time integrator carrying the multistep history.
#[derive(Debug, Clone)]
pub struct Integrator {
    scheme: Scheme,
    dt: f64,
    params: FluidParams,
    dealias: bool,
    // previous profile and its explicit part, for the two-step scheme
    history: Option<(Vec<f64>, Vec<f64>)>,
}

/// One accepted step: the new profile and the velocity at the old one.
struct StepOutput {
    next: Vec<f64>,
    velocity: Velocity,
}

impl Integrator {
    pub fn new(scheme: Scheme, dt: f64, params: &FluidParams, dealias: bool) -> Self {
        Integrator {
            scheme,
            dt,
            params: *params,
            dealias,
            history: None,
        }
    }

    pub fn dt(&self) -> f64 {
        self.dt
    }

    /// Seeds the two-step scheme with the profile one step back.
    pub fn set_history(&mut self, previous: &InterfaceProfile) -> Result<()> {
        let v = velocity(previous, &self.params, self.dealias)?;
        let n = self.explicit_part(previous.samples(), &v.psi);
        self.history = Some((previous.samples().to_vec(), n));
        Ok(())
    }

    /// Profile one step back, if the scheme keeps one.
    pub fn history(&self) -> Option<&[f64]> {
        self.history.as_ref().map(|h| h.0.as_slice())
    }

    fn explicit_part(&self, f: &[f64], psi: &[f64]) -> Vec<f64> {
        let a0 = self.params.alpha0();
        let lf = spectral::abs_derivative(f);
        psi.iter().zip(lf).map(|(p, l)| p + a0 * l).collect()
    }

    fn rate(&self, f: &[f64]) -> Result<Vec<f64>> {
        let p = InterfaceProfile::new(f.to_vec())?;
        Ok(velocity(&p, &self.params, self.dealias)?.psi)
    }

    fn advance(&mut self, f: &InterfaceProfile) -> Result<StepOutput> {
        let dt = self.dt;
        let a0 = self.params.alpha0();
        let x = f.samples();
        let v = velocity(f, &self.params, self.dealias)?;
        let next = match self.scheme {
            Scheme::Imex1 => {
                let n = self.explicit_part(x, &v.psi);
                let rhs: Vec<f64> = x.iter().zip(&n).map(|(a, b)| a + dt * b).collect();
                implicit_solve(&rhs, dt * a0, 1.0)
            }
            Scheme::Imex2 => {
                let n = self.explicit_part(x, &v.psi);
                let next = match &self.history {
                    None => {
                        let rhs: Vec<f64> = x.iter().zip(&n).map(|(a, b)| a + dt * b).collect();
                        implicit_solve(&rhs, dt * a0, 1.0)
                    }
                    Some((xp, np)) => {
                        let rhs: Vec<f64> = (0..x.len())
                            .map(|j| 2.0 * x[j] - 0.5 * xp[j] + dt * (2.0 * n[j] - np[j]))
                            .collect();
                        implicit_solve(&rhs, dt * a0, 1.5)
                    }
                };
                self.history = Some((x.to_vec(), n));
                next
            }
            Scheme::Rk4Explicit => {
                let k1 = &v.psi;
                let stage = |k: &[f64], c: f64| -> Vec<f64> {
                    x.iter().zip(k).map(|(a, b)| a + c * dt * b).collect()
                };
                let k2 = self.rate(&stage(k1, 0.5))?;
                let k3 = self.rate(&stage(&k2, 0.5))?;
                let k4 = self.rate(&stage(&k3, 1.0))?;
                (0..x.len())
                    .map(|j| x[j] + dt / 6.0 * (k1[j] + 2.0 * k2[j] + 2.0 * k3[j] + k4[j]))
                    .collect()
            }
        };
        Ok(StepOutput { next, velocity: v })
    }

    /// Advances `f` by one step.
    pub fn step(&mut self, f: &InterfaceProfile) -> Result<InterfaceProfile> {
        let out = self.advance(f)?;
        if out.next.iter().any(|v| !v.is_finite()) {
            return Err(Error::NonFinite("profile after step"));
        }
        InterfaceProfile::new(out.next)
    }
}

/// One step from `state` without multistep history (the two-step scheme
/// starts with a first-order step).
pub fn step(
    state: &EvolutionState,
    config: &TimeStepperConfig,
    params: &FluidParams,
) -> Result<EvolutionState> {
    let dt = config.resolve_dt(&state.profile, params)?;
    let mut integ = Integrator::new(config.scheme, dt, params, config.dealias);
    let next = integ.step(&state.profile)?;
    EvolutionState::new(state.t + dt, next, params)
}

#[derive(Debug, Clone)]
pub struct Trajectory {
    pub states: Vec<EvolutionState>,
    pub dt: f64,
    pub breakdown: Option<Breakdown>,
    /// Profile one step before the last recorded state, for resuming the
    /// two-step scheme.
    pub previous: Option<InterfaceProfile>,
}

impl Trajectory {
    pub fn last(&self) -> &EvolutionState {
        self.states.last().expect("trajectory holds the initial state")
    }
}

fn check_caps(f: &InterfaceProfile, config: &TimeStepperConfig) -> Option<BreakdownReason> {
    if f.samples().iter().any(|v| !v.is_finite()) {
        return Some(BreakdownReason::NonFinite);
    }
    let a = f.max_abs();
    if a > config.max_amplitude {
        return Some(BreakdownReason::Amplitude(a));
    }
    let s = f.max_slope();
    if s > config.max_slope {
        return Some(BreakdownReason::Slope(s));
    }
    None
}

/// Integrates from `f0` at `t = 0` to `config.t_end`.
pub fn simulate(
    f0: &InterfaceProfile,
    config: &TimeStepperConfig,
    params: &FluidParams,
) -> Result<Trajectory> {
    simulate_from(f0, None, 0.0, config, params)
}

/// Integrates from `f0` at time `t0`, optionally with the profile one step
/// back so that a two-step run resumes exactly.
pub fn simulate_from(
    f0: &InterfaceProfile,
    previous: Option<&InterfaceProfile>,
    t0: f64,
    config: &TimeStepperConfig,
    params: &FluidParams,
) -> Result<Trajectory> {
    params.validate()?;
    let nominal = config.resolve_dt(f0, params)?;
    let span = config.t_end - t0;
    // shorten the step so that the run lands on t_end
    let steps = if span <= 0.0 {
        0
    } else {
        (span / nominal - 1e-9).ceil() as usize
    };
    let dt = if steps == 0 { nominal } else { span / steps as f64 };
    if let Some(reason) = check_caps(f0, config) {
        return Err(Error::InvalidParameter(format!("initial profile: {reason}")));
    }
    let mut integ = Integrator::new(config.scheme, dt, params, config.dealias);
    if let (Some(p), Scheme::Imex2) = (previous, config.scheme) {
        integ.set_history(p)?;
    }
    let mut states = Vec::new();
    let mut f = f0.clone();
    let mut prev: Option<InterfaceProfile> = previous.cloned();
    let mut breakdown = None;
    let mut pending: Option<EvolutionState> = None;
    for i in 0..steps {
        let t = t0 + i as f64 * dt;
        let out = match integ.advance(&f) {
            Ok(o) => o,
            Err(e) => {
                let last_good = match pending.take() {
                    Some(s) => s,
                    None => EvolutionState::new(t, f.clone(), params)?,
                };
                breakdown = Some(Breakdown {
                    t: t + dt,
                    reason: BreakdownReason::Solver,
                    message: e.to_string(),
                    last_good,
                });
                break;
            }
        };
        let here = EvolutionState::from_velocity(t, f.clone(), &out.velocity);
        if i % config.stride == 0 {
            states.push(here.clone());
        }
        pending = Some(here);
        let reason = if out.next.iter().any(|v| !v.is_finite()) {
            Some(BreakdownReason::NonFinite)
        } else {
            None
        };
        let candidate = match reason {
            None => Some(InterfaceProfile::new(out.next)?),
            Some(_) => None,
        };
        if let Some(reason) = reason.or_else(|| check_caps(candidate.as_ref()?, config)) {
            breakdown = Some(Breakdown {
                t: t + dt,
                reason,
                message: reason.to_string(),
                last_good: pending.take().expect("state recorded above"),
            });
            break;
        }
        let candidate = candidate.expect("finite profile");
        prev = Some(f);
        f = candidate;
    }
    if breakdown.is_none() {
        let t = t0 + steps as f64 * dt;
        match EvolutionState::new(t, f.clone(), params) {
            Ok(s) => states.push(s),
            Err(e) => {
                breakdown = Some(Breakdown {
                    t,
                    reason: BreakdownReason::Solver,
                    message: e.to_string(),
                    last_good: pending.take().unwrap_or(states.last().cloned().ok_or(e)?),
                })
            }
        }
    } else if let Some(b) = &breakdown {
        if states.last().map(|s| s.t) != Some(b.last_good.t) {
            states.push(b.last_good.clone());
        }
    }
    Ok(Trajectory {
        states,
        dt,
        breakdown,
        previous: prev,
    })
}
