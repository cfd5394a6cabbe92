//! Quick oracle suite run by `stokes-sheet validate`.

use serde::Serialize;
use std::f64::consts::PI;
use stokes_sheet::bie::{far_field_constants, solve_density, DensitySolver};
use stokes_sheet::equilibria::{continue_branch, flat_spectrum, lambda_star};
use stokes_sheet::evolution::{simulate, Scheme, TimeStepperConfig};
use stokes_sheet::kernels::{stokeslet, KernelPoint};
use stokes_sheet::layer::{double_layer, double_layer_adjoint, trace_ops};
use stokes_sheet::operators::{assemble_b, OperatorSpec};
use stokes_sheet::{FluidParams, InterfaceProfile, Result};

#[derive(Debug, Clone, Serialize)]
pub struct Check {
    pub name: String,
    pub value: f64,
    pub tol: f64,
    pub pass: bool,
}

impl Check {
    fn new(name: &str, value: f64, tol: f64) -> Self {
        Check {
            name: name.into(),
            value,
            tol,
            pass: value.is_finite() && value <= tol,
        }
    }
}

fn max_diff(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).fold(0.0, |m, (x, y)| m.max((x - y).abs()))
}

fn grid(n: usize, f: impl Fn(f64) -> f64) -> Vec<f64> {
    stokes_sheet::spectral::nodes(n).into_iter().map(f).collect()
}

fn simpson(f: impl Fn(f64) -> f64, a: f64, b: f64, m: usize) -> f64 {
    let h = (b - a) / m as f64;
    let inner: f64 = (1..m).map(|i| f(a + i as f64 * h) * if i % 2 == 1 { 4.0 } else { 2.0 }).sum();
    (f(a) + f(b) + inner) * h / 3.0
}

fn spectrum_check(params: &FluidParams) -> Result<Check> {
    let rep = flat_spectrum(params, 8, 64)?;
    let err = rep.matched().iter().map(|(_, a, z)| (z - a).norm() / a.abs()).fold(0.0, f64::max);
    Ok(Check::new("flat spectrum k <= 8, n = 64 (relative)", err, 1e-6))
}

fn lambda_star_check() -> Check {
    // B(3/4, 1/2) = 4 int_0^sqrt(pi/2) u sqrt(sin u^2) du
    let beta = simpson(|u| 4.0 * u * (u * u).sin().sqrt(), 0.0, (PI / 2.0).sqrt(), 20000);
    Check::new("lambda* against Beta quadrature", (lambda_star() - beta * beta / (2.0 * PI * PI)).abs(), 1e-10)
}

fn hilbert_check() -> Result<Check> {
    let n = 64;
    let h = assemble_b(&OperatorSpec::uniform(0, 0, 0, 0, &vec![0.0; n])?, n)?;
    let mut err: f64 = 0.0;
    for k in 1..=16 {
        let kf = k as f64;
        err = err.max(max_diff(&h.apply(&grid(n, |x| (kf * x).cos())), &grid(n, |x| (kf * x).sin())));
    }
    Ok(Check::new("B0000 equals the Hilbert transform, k <= 16", err, 1e-10))
}

fn double_layer_checks() -> Result<Vec<Check>> {
    let flat = InterfaceProfile::zeros(64)?;
    let d0 = double_layer(&flat, &trace_ops(&flat)).matrix().amax();
    let f = InterfaceProfile::from_fn(128, |x| 0.4 * x.cos())?;
    let ops = trace_ops(&f);
    let d = double_layer(&f, &ops);
    let ds = double_layer_adjoint(&f, &ops);
    let adj = (d.matrix().transpose() - ds.matrix()).amax();
    Ok(vec![
        Check::new("double layer vanishes on the flat interface", d0, 1e-10),
        Check::new("double layer adjoint is the transpose", adj, 1e-8),
    ])
}

fn bie_checks() -> Result<Vec<Check>> {
    let f = InterfaceProfile::from_fn(64, |x| 0.25 + 0.3 * x.cos() - 0.1 * (2.0 * x).sin())?;
    let eq = FluidParams::with_theta(1.5, 1.5, 1.0, 0.4)?;
    let beta = solve_density(&f, &eq)?;
    let v = DensitySolver::new(&f, &eq)?.rhs(&f);
    let exact = max_diff(&beta.beta1, &v.v1).max(max_diff(&beta.beta2, &v.v2));
    let p = FluidParams::with_theta(3.0, 1.0, 1.0, 0.6)?;
    let solver = DensitySolver::new(&f, &p)?;
    let rhs = solver.rhs(&f).components();
    let b = solver.solve(&rhs)?;
    let scale = rhs.iter().flatten().fold(0.0f64, |m, x| m.max(x.abs()));
    let far = far_field_constants(&f, &b, &p);
    Ok(vec![
        Check::new("equal viscosities give the explicit density", exact, 0.0),
        Check::new("density solve residual (relative)", solver.residual(&b, &rhs) / scale, 1e-10),
        Check::new("far field c2 = 0", far.c2.abs(), 0.0),
        Check::new("far field c3 = -theta <f> / 2", (far.c3 + p.theta() * f.mean() / 2.0).abs(), 1e-15),
    ])
}

fn evolution_checks(params: &FluidParams) -> Result<Vec<Check>> {
    let f0 = InterfaceProfile::from_fn(32, |x| 0.1 + 1e-3 * x.cos())?;
    let cfg = TimeStepperConfig {
        scheme: Scheme::Imex2,
        dt: Some(1e-2),
        t_end: 0.5,
        ..TimeStepperConfig::default()
    };
    let traj = simulate(&f0, &cfg, params)?;
    let drift = traj.states.iter().map(|s| (s.diagnostics.mean - 0.1).abs()).fold(0.0, f64::max);
    let last = traj.last();
    let rate = stokes_sheet::evolution::flat_eigenvalue(1, params);
    let ratio = last.profile.cos_amplitude(1) / 1e-3;
    let growth = (ratio / (rate * last.t).exp() - 1.0).abs();
    Ok(vec![
        Check::new("mean conserved over t in [0, 0.5]", drift, 1e-10),
        Check::new("mode-1 amplitude follows the flat rate (relative)", growth, 1e-2),
    ])
}

fn kernel_check() -> Result<Check> {
    let h = 1e-4;
    let mut worst: f64 = 0.0;
    for (x1, x2) in [(1.2, 0.9), (-2.0, -0.7), (0.4, 1.8)] {
        let u = |a: f64, b: f64, i: usize, k: usize| stokeslet(KernelPoint::new(a, b)).map(|s| s.0[i][k]);
        let q = |a: f64, b: f64, k: usize| stokeslet(KernelPoint::new(a, b)).map(|s| s.1[k]);
        for k in 0..2 {
            for i in 0..2 {
                let lap = (u(x1 + h, x2, i, k)? + u(x1 - h, x2, i, k)? + u(x1, x2 + h, i, k)? + u(x1, x2 - h, i, k)?
                    - 4.0 * u(x1, x2, i, k)?)
                    / (h * h);
                let dq = if i == 0 {
                    (q(x1 + h, x2, k)? - q(x1 - h, x2, k)?) / (2.0 * h)
                } else {
                    (q(x1, x2 + h, k)? - q(x1, x2 - h, k)?) / (2.0 * h)
                };
                worst = worst.max((lap - dq).abs());
            }
        }
    }
    Ok(Check::new("stokeslet momentum residual", worst, 1e-5))
}

fn branch_check() -> Result<Check> {
    let pts = continue_branch(1, 0.05, 0.01)?;
    let start = &pts[0];
    let dev = (start.lambda - 1.0).abs() + start.s.abs() + start.amplitude();
    let worst = pts.iter().map(|p| p.residual).fold(dev, f64::max);
    Ok(Check::new("branch starts at (1, 0) with small residuals", worst, 1e-10))
}

pub fn run(params: &FluidParams) -> Result<Vec<Check>> {
    let mut checks = vec![spectrum_check(params)?, lambda_star_check(), hilbert_check()?];
    checks.extend(double_layer_checks()?);
    checks.extend(bie_checks()?);
    checks.extend(evolution_checks(params)?);
    checks.push(kernel_check()?);
    checks.push(branch_check()?);
    Ok(checks)
}
