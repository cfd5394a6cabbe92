//! The boundary integral equation for the traction density and the
//! constants describing the far field.

use crate::error::{Error, Result};
use crate::kernels::KernelPoint;
use crate::layer::{self, DoubleLayerOperator, FieldEvaluator, RhsV, TraceOps};
use crate::params::FluidParams;
use crate::profile::InterfaceProfile;
use crate::spectral;
use nalgebra::{DMatrix, DVector, LU};
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

const RESIDUAL_TOL: f64 = 1e-10;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TractionDensity {
    pub beta1: Vec<f64>,
    pub beta2: Vec<f64>,
}

impl TractionDensity {
    pub fn n(&self) -> usize {
        self.beta1.len()
    }

    pub fn components(&self) -> [Vec<f64>; 2] {
        [self.beta1.clone(), self.beta2.clone()]
    }

    fn from_vector(v: &DVector<f64>) -> Self {
        let n = v.len() / 2;
        TractionDensity {
            beta1: v.rows(0, n).iter().copied().collect(),
            beta2: v.rows(n, n).iter().copied().collect(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FarFieldConstants {
    pub c1: f64,
    pub c2: f64,
    pub c3: f64,
}

/// Factored system `(I + 2 a_mu D(f)) beta = rhs` for one interface.
#[derive(Debug, Clone)]
pub struct DensitySolver {
    n: usize,
    ops: TraceOps,
    dl: DoubleLayerOperator,
    system: DMatrix<f64>,
    lu: LU<f64, nalgebra::Dyn, nalgebra::Dyn>,
    params: FluidParams,
}

impl DensitySolver {
    pub fn new(f: &InterfaceProfile, params: &FluidParams) -> Result<Self> {
        params.validate()?;
        if f.samples().iter().any(|v| !v.is_finite()) {
            return Err(Error::NonFinite("interface profile"));
        }
        let n = f.n();
        let ops = layer::trace_ops(f);
        let dl = layer::double_layer(f, &ops);
        let mut system = dl.matrix() * (2.0 * params.a_mu());
        for i in 0..2 * n {
            system[(i, i)] += 1.0;
        }
        let lu = system.clone().lu();
        Ok(DensitySolver {
            n,
            ops,
            dl,
            system,
            lu,
            params: *params,
        })
    }

    pub fn trace_ops(&self) -> &TraceOps {
        &self.ops
    }

    pub fn double_layer(&self) -> &DoubleLayerOperator {
        &self.dl
    }

    pub fn system(&self) -> &DMatrix<f64> {
        &self.system
    }

    pub fn rhs(&self, f: &InterfaceProfile) -> RhsV {
        layer::rhs_v(f, &self.params, &self.ops, false)
    }

    /// Solves for an arbitrary right side, refining once if needed.
    pub fn solve(&self, rhs: &[Vec<f64>; 2]) -> Result<TractionDensity> {
        let n = self.n;
        for r in rhs {
            if r.len() != n {
                return Err(Error::GridMismatch {
                    expected: n,
                    found: r.len(),
                });
            }
        }
        let b = DVector::from_iterator(2 * n, rhs[0].iter().chain(&rhs[1]).copied());
        let mut x = self
            .lu
            .solve(&b)
            .ok_or_else(|| Error::Solve("singular density system".into()))?;
        let bnorm = b.amax();
        let mut res = (&b - &self.system * &x).amax();
        if res > RESIDUAL_TOL * bnorm {
            let r = &b - &self.system * &x;
            if let Some(dx) = self.lu.solve(&r) {
                x += dx;
                res = (&b - &self.system * &x).amax();
            }
        }
        if !res.is_finite() || x.iter().any(|v| !v.is_finite()) {
            return Err(Error::NonFinite("density"));
        }
        if res > RESIDUAL_TOL * bnorm {
            return Err(Error::Solve(format!(
                "residual {res:.3e} exceeds {RESIDUAL_TOL:.0e} * |rhs| = {:.3e} (condition estimate {:.3e})",
                RESIDUAL_TOL * bnorm,
                self.condition_estimate()
            )));
        }
        Ok(TractionDensity::from_vector(&x))
    }

    /// Infinity-norm residual of a candidate density.
    pub fn residual(&self, beta: &TractionDensity, rhs: &[Vec<f64>; 2]) -> f64 {
        let n = self.n;
        let x = DVector::from_iterator(2 * n, beta.beta1.iter().chain(&beta.beta2).copied());
        let b = DVector::from_iterator(2 * n, rhs[0].iter().chain(&rhs[1]).copied());
        (b - &self.system * x).amax()
    }

    /// Estimate of the 1-norm condition number (Hager's method).
    pub fn condition_estimate(&self) -> f64 {
        let m = 2 * self.n;
        let norm_a = (0..m)
            .map(|c| self.system.column(c).iter().map(|v| v.abs()).sum::<f64>())
            .fold(0.0, f64::max);
        let lu_t = self.system.transpose().lu();
        let mut x = DVector::from_element(m, 1.0 / m as f64);
        let mut est = 0.0;
        for _ in 0..5 {
            let Some(y) = self.lu.solve(&x) else {
                return f64::INFINITY;
            };
            est = y.iter().map(|v| v.abs()).sum::<f64>();
            let xi = y.map(|v| if v >= 0.0 { 1.0 } else { -1.0 });
            let Some(z) = lu_t.solve(&xi) else {
                return f64::INFINITY;
            };
            let j = z.iamax();
            if z[j].abs() <= z.dot(&x) {
                break;
            }
            x = DVector::zeros(m);
            x[j] = 1.0;
        }
        est * norm_a
    }
}

/// Traction density of the interface `f`.
pub fn solve_density(f: &InterfaceProfile, params: &FluidParams) -> Result<TractionDensity> {
    let solver = DensitySolver::new(f, params)?;
    let rhs = solver.rhs(f).components();
    solver.solve(&rhs)
}

pub fn far_field_constants(
    f: &InterfaceProfile,
    beta: &TractionDensity,
    params: &FluidParams,
) -> FarFieldConstants {
    let fp = spectral::derivative(f.samples(), 1);
    let slope: Vec<f64> = fp.iter().map(|d| d / (1.0 + d * d).sqrt()).collect();
    let b: Vec<f64> = (0..fp.len())
        .map(|j| beta.beta1[j] - fp[j] * beta.beta2[j])
        .collect();
    FarFieldConstants {
        c1: -0.5 * params.sigma * spectral::mean(&slope) + params.a_mu() * spectral::mean(&b),
        c2: 0.0,
        c3: -0.5 * params.theta() * f.mean(),
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct VorticityOptions {
    /// Half-height `L` of the truncated strip.
    pub half_height: f64,
    pub nx1: usize,
    pub nx2: usize,
    /// Spectral refinement of the interface quadrature.
    pub refinement: usize,
    /// Finite-difference step for the curl.
    pub step: f64,
}

impl Default for VorticityOptions {
    fn default() -> Self {
        VorticityOptions {
            half_height: 8.0,
            nx1: 64,
            nx2: 64,
            refinement: 4,
            step: 1e-4,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct VorticityReport {
    pub value: f64,
    pub skipped: usize,
}

/// `-mu+ mu- / (2 pi (mu+ + mu-))` times the integral of `curl v` over the
/// strip `|x2 - f(x1)| < L`. The midpoint grid lives in the sheared coordinates
/// `(x1, x2 - f(x1))`, which have unit Jacobian and put the interface on a cell
/// edge, so the rule never straddles the jump of the vorticity.
pub fn vorticity_check(
    f: &InterfaceProfile,
    beta: &TractionDensity,
    params: &FluidParams,
    opts: &VorticityOptions,
) -> Result<VorticityReport> {
    if !opts.nx2.is_multiple_of(2) {
        return Err(Error::InvalidParameter(format!(
            "vertical cell count {} must be even",
            opts.nx2
        )));
    }
    let ev = FieldEvaluator::new(f, &beta.components(), params, opts.refinement)?;
    let quad = ev.quadrature();
    let h1 = 2.0 * PI / opts.nx1 as f64;
    let h2 = 2.0 * opts.half_height / opts.nx2 as f64;
    let eps = opts.step;
    let cells: Vec<(usize, usize)> = (0..opts.nx1)
        .flat_map(|i| (0..opts.nx2).map(move |j| (i, j)))
        .collect();
    let curl_at = |&(i, j): &(usize, usize)| -> Result<Option<f64>> {
        let x1 = -PI + (i as f64 + 0.5) * h1;
        let x2 = f.eval(x1) - opts.half_height + (j as f64 + 0.5) * h2;
        let centre = KernelPoint::new(x1, x2);
        if quad.distance(centre) < quad.collar() + 2.0 * eps {
            return Ok(None);
        }
        let v = |a: f64, b: f64| ev.eval_unchecked(KernelPoint::new(a, b)).map(|r| r.velocity);
        let dv2 = (v(x1 + eps, x2)?[1] - v(x1 - eps, x2)?[1]) / (2.0 * eps);
        let dv1 = (v(x1, x2 + eps)?[0] - v(x1, x2 - eps)?[0]) / (2.0 * eps);
        Ok(Some(dv2 - dv1))
    };
    #[cfg(feature = "parallel")]
    let values: Vec<Result<Option<f64>>> = {
        use rayon::prelude::*;
        cells.par_iter().map(curl_at).collect()
    };
    #[cfg(not(feature = "parallel"))]
    let values: Vec<Result<Option<f64>>> = cells.iter().map(curl_at).collect();
    let mut sum = 0.0;
    let mut skipped = 0;
    for v in values {
        match v? {
            Some(c) => sum += c,
            None => skipped += 1,
        }
    }
    let m = params.mu_sum();
    let value = -params.mu_plus * params.mu_minus / (2.0 * PI * m) * sum * h1 * h2;
    Ok(VorticityReport { value, skipped })
}
