//! Trace operators, the double-layer operator, the boundary data of the
//! single-layer part, and evaluation of velocity and pressure off the interface.

use crate::error::{Error, Result};
use crate::kernels::{self, KernelPoint};
use crate::operators::{assemble_b0, cot_half_table, OperatorMatrix};
use crate::params::FluidParams;
use crate::profile::InterfaceProfile;
use crate::spectral;
use nalgebra::{DMatrix, DVector};
use std::f64::consts::{LN_2, PI};

/// One term `coef * B^{p,q}_{n,m}(f)` of the composite `B_target`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CompositeTerm {
    pub target: usize,
    pub coef: f64,
    pub n: usize,
    pub m: usize,
    pub p: usize,
    pub q: usize,
}

const fn term(target: usize, coef: f64, n: usize, m: usize, p: usize, q: usize) -> CompositeTerm {
    CompositeTerm {
        target,
        coef,
        n,
        m,
        p,
        q,
    }
}

/// The signed sums defining `B_1 .. B_6`.
pub const COMPOSITE_TERMS: [CompositeTerm; 19] = [
    term(1, 1.0, 0, 1, 0, 0),
    term(1, -1.0, 2, 1, 2, 0),
    term(2, 1.0, 1, 1, 0, 0),
    term(2, 1.0, 1, 1, 2, 0),
    term(3, 1.0, 0, 2, 0, 1),
    term(3, 1.0, 0, 2, 2, 1),
    term(3, -1.0, 2, 2, 0, 1),
    term(3, -2.0, 2, 2, 2, 1),
    term(3, -1.0, 2, 2, 4, 1),
    term(3, 1.0, 4, 2, 2, 1),
    term(3, 1.0, 4, 2, 4, 1),
    term(4, 1.0, 1, 2, 0, 1),
    term(4, 1.0, 1, 2, 2, 1),
    term(4, -1.0, 3, 2, 2, 1),
    term(4, -1.0, 3, 2, 4, 1),
    term(5, 2.0, 0, 1, 1, 1),
    term(5, -2.0, 2, 1, 3, 1),
    term(6, 2.0, 1, 1, 1, 1),
    term(6, 2.0, 1, 1, 3, 1),
];

/// The composite trace operators `B_1 .. B_6` and the log operator `B_0`.
#[derive(Debug, Clone)]
pub struct TraceOps {
    /// `b[i]` holds `B_{i+1}`.
    pub b: [OperatorMatrix; 6],
    pub b0: OperatorMatrix,
}

impl TraceOps {
    /// `B_i` for `i` in `1..=6`.
    pub fn get(&self, i: usize) -> &OperatorMatrix {
        &self.b[i - 1]
    }
}

/// Assembles `B_1 .. B_6` in one pass over the node pairs, plus `B_0`.
pub fn trace_ops(f: &InterfaceProfile) -> TraceOps {
    let n = f.n();
    let x = f.samples();
    let fp = spectral::derivative(x, 1);
    let cot = cot_half_table(n);
    let w_sing = 2.0 / n as f64;
    let w_reg = 1.0 / n as f64;
    let terms = &COMPOSITE_TERMS;
    let row = |j: usize| -> [Vec<f64>; 6] {
        let mut out: [Vec<f64>; 6] = Default::default();
        for o in out.iter_mut() {
            *o = vec![0.0; n];
        }
        for k in 0..n {
            let d = (j + n - k) % n;
            if d == 0 {
                let g = fp[j];
                let dd = 1.0 + g * g;
                for t in terms.iter().filter(|t| t.p == 1) {
                    out[t.target - 1][k] += t.coef * w_reg * g.powi((t.n + t.q) as i32) / dd.powi(t.m as i32);
                }
                continue;
            }
            let delta = x[j] - x[k];
            let th = (0.5 * delta).tanh();
            let hd = 0.5 * delta;
            let ct = cot[d];
            let xr = th * ct;
            let dd = 1.0 + xr * xr;
            let odd = d % 2 == 1;
            for t in terms {
                let w = if t.p == 0 {
                    if !odd {
                        continue;
                    }
                    w_sing
                } else {
                    w_reg
                };
                let v = th.powi(t.n as i32) * hd.powi(t.q as i32) * ct.powi((t.n + t.q + 1 - t.p) as i32)
                    / dd.powi(t.m as i32);
                out[t.target - 1][k] += t.coef * w * v;
            }
        }
        out
    };
    #[cfg(feature = "parallel")]
    let rows: Vec<[Vec<f64>; 6]> = {
        use rayon::prelude::*;
        (0..n).into_par_iter().map(row).collect()
    };
    #[cfg(not(feature = "parallel"))]
    let rows: Vec<[Vec<f64>; 6]> = (0..n).map(row).collect();
    let mk = |i: usize| OperatorMatrix::from_matrix(DMatrix::from_fn(n, n, |r, c| rows[r][i][c]));
    TraceOps {
        b: [mk(0), mk(1), mk(2), mk(3), mk(4), mk(5)],
        b0: assemble_b0(f),
    }
}

/// A `2n x 2n` operator on two-component densities `(beta_1, beta_2)`.
#[derive(Debug, Clone, PartialEq)]
pub struct DoubleLayerOperator {
    mat: DMatrix<f64>,
}

impl DoubleLayerOperator {
    pub fn n(&self) -> usize {
        self.mat.nrows() / 2
    }

    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.mat
    }

    pub fn into_matrix(self) -> DMatrix<f64> {
        self.mat
    }

    /// Block `(r, c)` with `r, c` in `{0, 1}`.
    pub fn block(&self, r: usize, c: usize) -> DMatrix<f64> {
        let n = self.n();
        self.mat.view((r * n, c * n), (n, n)).into_owned()
    }

    pub fn apply(&self, beta: &[Vec<f64>; 2]) -> [Vec<f64>; 2] {
        let n = self.n();
        let mut v = DVector::zeros(2 * n);
        v.rows_mut(0, n).copy_from_slice(&beta[0]);
        v.rows_mut(n, n).copy_from_slice(&beta[1]);
        let out = &self.mat * v;
        [out.rows(0, n).iter().copied().collect(), out.rows(n, n).iter().copied().collect()]
    }
}

fn assemble_blocks(n: usize, blocks: [[DMatrix<f64>; 2]; 2]) -> DoubleLayerOperator {
    let mut mat = DMatrix::zeros(2 * n, 2 * n);
    for (r, row) in blocks.iter().enumerate() {
        for (c, b) in row.iter().enumerate() {
            mat.view_mut((r * n, c * n), (n, n)).copy_from(b);
        }
    }
    DoubleLayerOperator { mat }
}

fn scale_columns(m: &DMatrix<f64>, w: &[f64]) -> DMatrix<f64> {
    let mut out = m.clone();
    for (c, wc) in w.iter().enumerate() {
        out.column_mut(c).scale_mut(*wc);
    }
    out
}

fn scale_rows(m: &DMatrix<f64>, w: &[f64]) -> DMatrix<f64> {
    let mut out = m.clone();
    for (r, wr) in w.iter().enumerate() {
        out.row_mut(r).scale_mut(*wr);
    }
    out
}

/// The double-layer operator on the interface.
pub fn double_layer(f: &InterfaceProfile, ops: &TraceOps) -> DoubleLayerOperator {
    let n = f.n();
    let fp = spectral::derivative(f.samples(), 1);
    let [b1, b2, b3, b4, _, _] = &ops.b;
    let (b1, b2, b3, b4) = (b1.matrix(), b2.matrix(), b3.matrix(), b4.matrix());
    let s23 = b2 + b3;
    let d23 = b2 - b3;
    let m11 = (b1 - b4) * 2.0;
    let b11 = &s23 * -0.5 + scale_columns(&m11, &fp) * 0.5;
    let off = b4 * -1.0 + scale_columns(&s23, &fp) * 0.5;
    let b22 = &d23 * -0.5 + scale_columns(b4, &fp);
    assemble_blocks(n, [[b11, off.clone()], [off, b22]])
}

/// The L2-adjoint of [`double_layer`], assembled from its own formula.
pub fn double_layer_adjoint(f: &InterfaceProfile, ops: &TraceOps) -> DoubleLayerOperator {
    let n = f.n();
    let fp = spectral::derivative(f.samples(), 1);
    let [b1, b2, b3, b4, _, _] = &ops.b;
    let (b1, b2, b3, b4) = (b1.matrix(), b2.matrix(), b3.matrix(), b4.matrix());
    let s23 = b2 + b3;
    let d23 = b2 - b3;
    let b11 = &s23 * 0.5 - scale_rows(&(b1 - b4), &fp);
    let off = b4 - scale_rows(&s23, &fp) * 0.5;
    let b22 = &d23 * 0.5 - scale_rows(b4, &fp);
    assemble_blocks(n, [[b11, off.clone()], [off, b22]])
}

/// `phi(f) = (1/omega - 1, f'/omega)`.
pub fn phi(f: &InterfaceProfile) -> [Vec<f64>; 2] {
    let fp = spectral::derivative(f.samples(), 1);
    let mut p1 = Vec::with_capacity(fp.len());
    let mut p2 = Vec::with_capacity(fp.len());
    for d in fp {
        let w = (1.0 + d * d).sqrt();
        p1.push(-d * d / (w * (1.0 + w)));
        p2.push(d / w);
    }
    [p1, p2]
}

/// Interface forcing `G(f) = theta (-f f', f) - sigma phi(f)'`.
pub fn forcing(f: &InterfaceProfile, params: &FluidParams) -> [Vec<f64>; 2] {
    let theta = params.theta();
    let sigma = params.sigma;
    let x = f.samples();
    let fp = spectral::derivative(x, 1);
    let [p1, p2] = phi(f);
    let dp1 = spectral::derivative(&p1, 1);
    let dp2 = spectral::derivative(&p2, 1);
    let g1 = (0..x.len()).map(|j| -theta * x[j] * fp[j] - sigma * dp1[j]).collect();
    let g2 = (0..x.len()).map(|j| theta * x[j] - sigma * dp2[j]).collect();
    [g1, g2]
}

/// Boundary data of the single-layer velocity, the right side of the density equation.
#[derive(Debug, Clone, PartialEq)]
pub struct RhsV {
    pub v1: Vec<f64>,
    pub v2: Vec<f64>,
}

impl RhsV {
    pub fn components(&self) -> [Vec<f64>; 2] {
        [self.v1.clone(), self.v2.clone()]
    }
}

fn product(a: &[f64], b: &[f64], dealias: bool) -> Vec<f64> {
    if dealias {
        spectral::dealiased_product(a, b)
    } else {
        a.iter().zip(b).map(|(x, y)| x * y).collect()
    }
}

fn lin(terms: &[(f64, &[f64])]) -> Vec<f64> {
    let n = terms[0].1.len();
    (0..n).map(|j| terms.iter().map(|(c, v)| c * v[j]).sum()).collect()
}

pub fn rhs_v(f: &InterfaceProfile, params: &FluidParams, ops: &TraceOps, dealias: bool) -> RhsV {
    let x = f.samples();
    let fp = spectral::derivative(x, 1);
    let [p1, p2] = phi(f);
    let sigma = params.sigma;
    let theta = params.theta();
    let b = |i: usize, v: &[f64]| ops.get(i).apply(v);
    let fp_p1 = product(&fp, &p1, dealias);
    let fp_p2 = product(&fp, &p2, dealias);
    let ffp = product(x, &fp, dealias);

    let a = lin(&[(1.0, &p1), (-1.0, &fp_p2)]);
    let (b1a, b4a) = (b(1, &a), b(4, &a));
    let (b2c, b3c) = (b(2, &fp_p1), b(3, &fp_p1));
    let v1 = lin(&[(1.0, &b1a), (-2.0, &b4a), (2.0, &b2c), (1.0, &b3c), (1.0, &b(3, &p2))]);

    let v2 = lin(&[
        (1.0, &b(1, &lin(&[(1.0, &p2), (-1.0, &fp_p1)]))),
        (1.0, &b(3, &a)),
        (2.0, &b(4, &lin(&[(1.0, &fp_p1), (1.0, &p2)]))),
    ]);

    let v3 = lin(&[(1.0, &ops.b0.apply(&ffp)), (1.0, &b(6, &ffp)), (1.0, &b(5, x))]);
    let v4 = lin(&[(1.0, &ops.b0.apply(x)), (-1.0, &b(6, x)), (1.0, &b(5, &ffp))]);

    let mean_term = theta * 2.0 * LN_2 * f.mean();
    RhsV {
        v1: (0..x.len()).map(|j| 0.25 * (-sigma * v1[j] - theta * v3[j])).collect(),
        v2: (0..x.len())
            .map(|j| 0.25 * (-sigma * v2[j] + theta * v4[j] + mean_term))
            .collect(),
    }
}

/// Which fluid a bulk point lies in.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Side {
    Upper,
    Lower,
}

#[derive(Debug, Clone, PartialEq)]
pub struct BulkField {
    pub point: KernelPoint,
    pub velocity: [f64; 2],
    pub pressure: f64,
    pub stress: Option<[[f64; 2]; 2]>,
    pub side: Side,
}

/// Quadrature nodes on the interface, optionally refined by band-limited
/// interpolation so that points closer to the interface stay accurate.
#[derive(Debug, Clone)]
pub struct InterfaceQuadrature {
    xs: Vec<f64>,
    fs: Vec<f64>,
    fps: Vec<f64>,
    base: InterfaceProfile,
    factor: usize,
}

impl InterfaceQuadrature {
    pub fn new(f: &InterfaceProfile, factor: usize) -> Result<Self> {
        if factor == 0 || !factor.is_power_of_two() {
            return Err(Error::InvalidParameter(format!(
                "refinement factor {factor} must be a power of two"
            )));
        }
        let m = f.n() * factor;
        let fs = spectral::resample(f.samples(), m);
        let fps = spectral::derivative(&fs, 1);
        Ok(InterfaceQuadrature {
            xs: spectral::nodes(m),
            fs,
            fps,
            base: f.clone(),
            factor,
        })
    }

    pub fn len(&self) -> usize {
        self.xs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.xs.is_empty()
    }

    /// Width of the band around the interface where accuracy is not warranted.
    pub fn collar(&self) -> f64 {
        2.0 * PI / self.len() as f64
    }

    /// Refines a grid function given on the base grid.
    pub fn refine(&self, v: &[f64]) -> Vec<f64> {
        spectral::resample(v, self.len())
    }

    /// Distance from `x` to the nearest quadrature node on the interface.
    pub fn distance(&self, x: KernelPoint) -> f64 {
        let mut best = f64::INFINITY;
        for (s, fv) in self.xs.iter().zip(&self.fs) {
            let d1 = kernels::reduce_angle(x.x1 - s);
            let d2 = x.x2 - fv;
            best = best.min(d1.hypot(d2));
        }
        best
    }

    pub fn side(&self, x: KernelPoint) -> Side {
        if x.x2 > self.base.eval(x.x1) {
            Side::Upper
        } else {
            Side::Lower
        }
    }

    fn check(&self, x: KernelPoint) -> Result<()> {
        let distance = self.distance(x);
        let collar = self.collar();
        let vertical = (x.x2 - self.base.eval(x.x1)).abs();
        if distance < collar || vertical <= 1e-12 {
            return Err(Error::InsideCollar { distance, collar });
        }
        Ok(())
    }

    /// `(1/2pi) int z_i(x - (s, f(s))) phi(s) ds` for a refined density, without
    /// the collar check.
    pub fn z_unchecked(&self, i: usize, phi: &[f64], x: KernelPoint) -> Result<f64> {
        let h = 2.0 * PI / self.len() as f64;
        let mut acc = 0.0;
        for ((xs, fs), p) in self.xs.iter().zip(&self.fs).zip(phi) {
            let r = KernelPoint::new(x.x1 - xs, x.x2 - fs);
            acc += kernels::z_all(r)?.0[i] * p;
        }
        Ok(acc * h / (2.0 * PI))
    }

    pub fn z(&self, i: usize, phi: &[f64], x: KernelPoint) -> Result<f64> {
        self.check(x)?;
        self.z_unchecked(i, phi, x)
    }

    pub fn factor(&self) -> usize {
        self.factor
    }
}

/// `Z_i(f)[phi](x)` for `i` in `1..=4` with `phi` on the base grid.
pub fn eval_z(i: usize, f: &InterfaceProfile, phi: &[f64], x: KernelPoint) -> Result<f64> {
    if !(1..=4).contains(&i) {
        return Err(Error::InvalidParameter(format!("Z index {i} out of range 1..=4")));
    }
    let quad = InterfaceQuadrature::new(f, 1)?;
    quad.z(i, phi, x)
}

/// Velocity and pressure of the two-phase solution for a given density.
#[derive(Debug, Clone)]
pub struct FieldEvaluator {
    quad: InterfaceQuadrature,
    params: FluidParams,
    // single-layer forcing on refined nodes
    g: [Vec<f64>; 2],
    // double-layer density 2 a_mu beta, its f'-weighted version and derivatives
    d: [Vec<f64>; 2],
    e: [Vec<f64>; 2],
    dd: [Vec<f64>; 2],
    v_shift: f64,
}

impl FieldEvaluator {
    pub fn new(
        f: &InterfaceProfile,
        beta: &[Vec<f64>; 2],
        params: &FluidParams,
        refinement: usize,
    ) -> Result<Self> {
        let n = f.n();
        for b in beta {
            if b.len() != n {
                return Err(Error::GridMismatch {
                    expected: n,
                    found: b.len(),
                });
            }
        }
        let quad = InterfaceQuadrature::new(f, refinement)?;
        let g0 = forcing(f, params);
        let g = [quad.refine(&g0[0]), quad.refine(&g0[1])];
        let scale = 2.0 * params.a_mu();
        let d: [Vec<f64>; 2] = [
            quad.refine(&beta[0].iter().map(|v| scale * v).collect::<Vec<_>>()),
            quad.refine(&beta[1].iter().map(|v| scale * v).collect::<Vec<_>>()),
        ];
        let e = [
            d[0].iter().zip(&quad.fps).map(|(a, b)| a * b).collect(),
            d[1].iter().zip(&quad.fps).map(|(a, b)| a * b).collect(),
        ];
        let dd = [spectral::derivative(&d[0], 1), spectral::derivative(&d[1], 1)];
        let v_shift = params.theta() * 2.0 * LN_2 * f.mean() / 4.0;
        Ok(FieldEvaluator {
            quad,
            params: *params,
            g,
            d,
            e,
            dd,
            v_shift,
        })
    }

    pub fn quadrature(&self) -> &InterfaceQuadrature {
        &self.quad
    }

    pub fn eval(&self, x: KernelPoint) -> Result<BulkField> {
        self.quad.check(x)?;
        self.eval_unchecked(x)
    }

    /// Single-layer and double-layer contributions separately, before the
    /// division by the viscosity: `(v_s, q_s, v_d, q_d)`.
    pub fn parts(&self, x: KernelPoint) -> Result<([f64; 2], f64, [f64; 2], f64)> {
        let q = &self.quad;
        let h = 2.0 * PI / q.len() as f64;
        let mut vs = [0.0; 2];
        let mut qs = 0.0;
        // Z integrals: zsum[i][density]
        let mut zd = [[0.0; 2]; 5];
        let mut ze = [[0.0; 2]; 5];
        let mut z1p = 0.0;
        let mut z2p = 0.0;
        for k in 0..q.len() {
            let r = KernelPoint::new(x.x1 - q.xs[k], x.x2 - q.fs[k]);
            let z = kernels::z_all(r)?.0;
            let (u, p) = kernels::stokeslet_from(&z, r.x2);
            let (g1, g2) = (self.g[0][k], self.g[1][k]);
            vs[0] += u[0][0] * g1 + u[0][1] * g2;
            vs[1] += u[1][0] * g1 + u[1][1] * g2;
            qs += p[0] * g1 + p[1] * g2;
            for i in 1..=4 {
                for c in 0..2 {
                    zd[i][c] += z[i] * self.d[c][k];
                    ze[i][c] += z[i] * self.e[c][k];
                }
            }
            z1p += z[1] * self.dd[1][k];
            z2p += z[2] * self.dd[0][k];
        }
        let w = h / (2.0 * PI);
        for i in 1..=4 {
            for c in 0..2 {
                zd[i][c] *= w;
                ze[i][c] *= w;
            }
        }
        vs[0] *= h;
        vs[1] = vs[1] * h + self.v_shift;
        qs *= h;
        let vd = [
            0.5 * (zd[2][0] + zd[3][0] + 2.0 * zd[4][1])
                - 0.5 * (2.0 * ze[1][0] - 2.0 * ze[4][0] + ze[2][1] + ze[3][1]),
            0.5 * (2.0 * zd[4][0] + zd[2][1] - zd[3][1])
                - 0.5 * (ze[2][0] + ze[3][0] + 2.0 * ze[4][1]),
        ];
        let qd = w * (z1p - z2p);
        Ok((vs, qs, vd, qd))
    }

    pub fn eval_unchecked(&self, x: KernelPoint) -> Result<BulkField> {
        let side = self.quad.side(x);
        let mu = match side {
            Side::Upper => self.params.mu_plus,
            Side::Lower => self.params.mu_minus,
        };
        let (vs, qs, vd, qd) = self.parts(x)?;
        Ok(BulkField {
            point: x,
            velocity: [(vs[0] + vd[0]) / mu, (vs[1] + vd[1]) / mu],
            pressure: qs + qd,
            stress: None,
            side,
        })
    }
}

/// Velocity and pressure at `x` on the base quadrature grid.
pub fn eval_fields(
    f: &InterfaceProfile,
    beta: &[Vec<f64>; 2],
    params: &FluidParams,
    x: KernelPoint,
) -> Result<BulkField> {
    FieldEvaluator::new(f, beta, params, 1)?.eval(x)
}
