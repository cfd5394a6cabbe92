//! Nyström discretisations of the singular operator families on the grid.
//!
//! Cauchy-type kernels (`p = 0`) are integrated with the interlaced rule: for
//! the collocation node `xi_j` only the nodes `xi_k` with `j - k` odd are used,
//! each with weight `2h`. These sit at odd multiples of `h` from `xi_j`, so the
//! singular point is never sampled and the rule is exact for the Hilbert
//! transform of every trigonometric polynomial of degree below `n/2`.
//! Bounded kernels (`p >= 1`) use the plain trapezoid rule with the limiting
//! kernel value on the diagonal.

use crate::error::{Error, Result};
use crate::profile::InterfaceProfile;
use crate::spectral;
use nalgebra::{DMatrix, DVector};
use std::f64::consts::PI;

/// Dense matrix acting on grid functions, quadrature weights included.
#[derive(Debug, Clone, PartialEq)]
pub struct OperatorMatrix {
    mat: DMatrix<f64>,
}

impl OperatorMatrix {
    pub fn from_matrix(mat: DMatrix<f64>) -> Self {
        assert_eq!(mat.nrows(), mat.ncols(), "operator matrices are square");
        OperatorMatrix { mat }
    }

    pub fn zeros(n: usize) -> Self {
        OperatorMatrix {
            mat: DMatrix::zeros(n, n),
        }
    }

    pub fn n(&self) -> usize {
        self.mat.nrows()
    }

    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.mat
    }

    pub fn into_matrix(self) -> DMatrix<f64> {
        self.mat
    }

    pub fn apply(&self, phi: &[f64]) -> Vec<f64> {
        assert_eq!(phi.len(), self.n(), "grid mismatch");
        let v = &self.mat * DVector::from_column_slice(phi);
        v.as_slice().to_vec()
    }

    pub fn transpose(&self) -> Self {
        OperatorMatrix {
            mat: self.mat.transpose(),
        }
    }

    pub fn max_abs(&self) -> f64 {
        self.mat.amax()
    }

}

/// Index set and slot functions of one member of the `B` family.
#[derive(Debug, Clone, PartialEq)]
pub struct OperatorSpec {
    pub n: usize,
    pub m: usize,
    pub p: usize,
    pub q: usize,
    pub a: Vec<Vec<f64>>,
    pub b: Vec<Vec<f64>>,
    pub c: Vec<Vec<f64>>,
}

impl OperatorSpec {
    pub fn new(
        n: usize,
        m: usize,
        p: usize,
        q: usize,
        a: Vec<Vec<f64>>,
        b: Vec<Vec<f64>>,
        c: Vec<Vec<f64>>,
    ) -> Result<Self> {
        if p > n + q + 1 {
            return Err(Error::IndexConstraint { n, q, p });
        }
        for (name, slots, want) in [("a", &a, m), ("b", &b, n), ("c", &c, q)] {
            if slots.len() != want {
                return Err(Error::InvalidParameter(format!(
                    "slot list {name} has {} entries, expected {want}",
                    slots.len()
                )));
            }
        }
        Ok(OperatorSpec { n, m, p, q, a, b, c })
    }

    /// All slots equal to `f`.
    pub fn uniform(n: usize, m: usize, p: usize, q: usize, f: &[f64]) -> Result<Self> {
        let v = f.to_vec();
        Self::new(n, m, p, q, vec![v.clone(); m], vec![v.clone(); n], vec![v; q])
    }

    fn check_grid(&self, grid: usize) -> Result<()> {
        crate::profile::check_grid_size(grid)?;
        for s in self.a.iter().chain(&self.b).chain(&self.c) {
            if s.len() != grid {
                return Err(Error::GridMismatch {
                    expected: grid,
                    found: s.len(),
                });
            }
        }
        Ok(())
    }
}

/// Builds a dense matrix row by row.
pub(crate) fn build_rows<F>(n: usize, ncols: usize, row: F) -> DMatrix<f64>
where
    F: Fn(usize) -> Vec<f64> + Sync + Send,
{
    #[cfg(feature = "parallel")]
    let rows: Vec<Vec<f64>> = {
        use rayon::prelude::*;
        (0..n).into_par_iter().map(&row).collect()
    };
    #[cfg(not(feature = "parallel"))]
    let rows: Vec<Vec<f64>> = (0..n).map(&row).collect();
    DMatrix::from_fn(n, ncols, |i, j| rows[i][j])
}

/// `cot(s/2)` for the grid offset `d = j - k (mod n)`.
pub(crate) fn cot_half_table(n: usize) -> Vec<f64> {
    let h = 2.0 * PI / n as f64;
    (0..n)
        .map(|d| {
            if d == 0 {
                f64::INFINITY
            } else {
                let (s, c) = (0.5 * d as f64 * h).sin_cos();
                c / s
            }
        })
        .collect()
}

/// Periodic Hilbert transform, symbol `-i sign(k)`.
pub fn hilbert(phi: &[f64]) -> Vec<f64> {
    spectral::hilbert(phi)
}

/// Matrix of the Hilbert transform under the interlaced rule.
pub fn hilbert_matrix(n: usize) -> Result<OperatorMatrix> {
    crate::profile::check_grid_size(n)?;
    let cot = cot_half_table(n);
    let w = 2.0 / n as f64;
    Ok(OperatorMatrix::from_matrix(DMatrix::from_fn(n, n, |j, k| {
        let d = (j + n - k) % n;
        if d % 2 == 1 {
            w * cot[d]
        } else {
            0.0
        }
    })))
}

pub fn assemble_b(spec: &OperatorSpec, grid: usize) -> Result<OperatorMatrix> {
    spec.check_grid(grid)?;
    let n = grid;
    let cot = cot_half_table(n);
    let expo = (spec.n + spec.q + 1 - spec.p) as i32;
    let singular = spec.p == 0;
    let weight = if singular { 2.0 / n as f64 } else { 1.0 / n as f64 };
    let da: Vec<Vec<f64>> = spec.a.iter().map(|v| spectral::derivative(v, 1)).collect();
    let db: Vec<Vec<f64>> = spec.b.iter().map(|v| spectral::derivative(v, 1)).collect();
    let dc: Vec<Vec<f64>> = spec.c.iter().map(|v| spectral::derivative(v, 1)).collect();
    let mat = build_rows(n, n, |j| {
        let mut row = vec![0.0; n];
        for (k, slot) in row.iter_mut().enumerate() {
            let d = (j + n - k) % n;
            if d == 0 {
                if spec.p == 1 {
                    let mut v = 1.0;
                    for x in &db {
                        v *= x[j];
                    }
                    for x in &dc {
                        v *= x[j];
                    }
                    for x in &da {
                        v /= 1.0 + x[j] * x[j];
                    }
                    *slot = weight * v;
                }
                continue;
            }
            if singular && d.is_multiple_of(2) {
                continue;
            }
            let ct = cot[d];
            let mut num = ct.powi(expo);
            for x in &spec.b {
                num *= (0.5 * (x[j] - x[k])).tanh();
            }
            for x in &spec.c {
                num *= 0.5 * (x[j] - x[k]);
            }
            let mut den = 1.0;
            for x in &spec.a {
                let r = (0.5 * (x[j] - x[k])).tanh() * ct;
                den *= 1.0 + r * r;
            }
            *slot = weight * num / den;
        }
        row
    });
    Ok(OperatorMatrix::from_matrix(mat))
}

/// A slot function of the `C` family: `slope * xi` plus a periodic part.
#[derive(Debug, Clone, PartialEq)]
pub struct Slot {
    pub slope: f64,
    pub values: Vec<f64>,
}

impl Slot {
    pub fn periodic(values: Vec<f64>) -> Self {
        Slot { slope: 0.0, values }
    }

    pub fn linear(slope: f64, n: usize) -> Self {
        Slot {
            slope,
            values: vec![0.0; n],
        }
    }
}

impl From<Vec<f64>> for Slot {
    fn from(values: Vec<f64>) -> Self {
        Slot::periodic(values)
    }
}

/// Endpoint-corrected trapezoid weights (Gregory type, exact for polynomials
/// of degree `< order`) on `count` equispaced nodes, unit spacing.
pub(crate) fn gregory_weights(count: usize, order: usize) -> Vec<f64> {
    assert!(count >= 2 * order, "too few nodes for the end corrections");
    // Euler-Maclaurin: sum_k g_k k^d = B_{d+1}/(d+1) for odd d, 0 for even d.
    let bernoulli = [1.0 / 6.0, -1.0 / 30.0, 1.0 / 42.0, -1.0 / 30.0, 5.0 / 66.0];
    let vander = DMatrix::from_fn(order, order, |d, k| (k as f64).powi(d as i32));
    let rhs = DVector::from_fn(order, |d, _| {
        if d % 2 == 1 {
            bernoulli[(d - 1) / 2] / (d + 1) as f64
        } else {
            0.0
        }
    });
    let gamma = vander.lu().solve(&rhs).expect("Vandermonde system is regular");
    let mut w = vec![1.0; count];
    w[0] = 0.5;
    w[count - 1] = 0.5;
    for k in 0..order {
        w[k] += gamma[k];
        w[count - 1 - k] += gamma[k];
    }
    w
}

const GREGORY_ORDER: usize = 8;

/// Kernel value and first `s`-derivative at `s = 0` of
/// `prod(delta b_i / s) / prod(1 + (delta a_i / s)^2)`.
fn difference_kernel_origin(
    b1: &[f64],
    b2: &[f64],
    a1: &[f64],
    a2: &[f64],
) -> (f64, f64) {
    // delta b / s = b' - b'' s / 2 + O(s^2)
    let p: f64 = b1.iter().product();
    let mut dp = 0.0;
    for (i, b) in b2.iter().enumerate().take(b1.len()) {
        let mut t = -0.5 * b;
        for (l, v) in b1.iter().enumerate() {
            if l != i {
                t *= v;
            }
        }
        dp += t;
    }
    let q: f64 = a1.iter().map(|v| 1.0 + v * v).product();
    let mut dq = 0.0;
    for i in 0..a1.len() {
        let mut t = -a1[i] * a2[i];
        for (l, v) in a1.iter().enumerate() {
            if l != i {
                t *= 1.0 + v * v;
            }
        }
        dq += t;
    }
    (p / q, (dp * q - p * dq) / (q * q))
}

/// The `C_{n,m}` family, `(1/pi) PV int prod(delta b_i/s) / prod(1+(delta a_i/s)^2) phi(xi-s)/s ds`.
///
/// The kernel is not periodic in `s`, so the interlaced rule loses its
/// spectral accuracy here. Instead the odd singular part is removed by
/// subtraction and the remaining smooth integrand is integrated over
/// `[-pi, pi]` with an endpoint-corrected trapezoid rule.
pub fn assemble_c(a: &[Slot], b: &[Slot], grid: usize) -> Result<OperatorMatrix> {
    crate::profile::check_grid_size(grid)?;
    for s in a.iter().chain(b) {
        if s.values.len() != grid {
            return Err(Error::GridMismatch {
                expected: grid,
                found: s.values.len(),
            });
        }
    }
    let n = grid;
    let half = n / 2;
    let h = 2.0 * PI / n as f64;
    let weights = gregory_weights(n + 1, GREGORY_ORDER);
    let first = |s: &Slot| -> Vec<f64> {
        spectral::derivative(&s.values, 1)
            .into_iter()
            .map(|v| v + s.slope)
            .collect()
    };
    let second = |s: &Slot| spectral::derivative(&s.values, 2);
    let (a1, a2): (Vec<_>, Vec<_>) = (a.iter().map(first).collect(), a.iter().map(second).collect());
    let (b1, b2): (Vec<_>, Vec<_>) = (b.iter().map(first).collect(), b.iter().map(second).collect());
    let kernel = |j: usize, k: usize, s: f64| -> f64 {
        let mut v = 1.0;
        for x in b {
            v *= x.slope + (x.values[j] - x.values[k]) / s;
        }
        for x in a {
            let r = x.slope + (x.values[j] - x.values[k]) / s;
            v /= 1.0 + r * r;
        }
        v
    };
    let mat = build_rows(n, n, |j| {
        let mut row = vec![0.0; n];
        let scale = h / PI;
        for (idx, w) in weights.iter().enumerate() {
            let offset = idx as i64 - half as i64;
            if offset == 0 {
                continue;
            }
            let s = offset as f64 * h;
            let k = (j as i64 - offset).rem_euclid(n as i64) as usize;
            row[k] += scale * w * kernel(j, k, s) / s;
        }
        // Node s = 0: limit of (K(s) phi(xi - s) - K(0) phi(xi)) / s.
        let col = |x: &Vec<Vec<f64>>| x.iter().map(|v| v[j]).collect::<Vec<f64>>();
        let (k0, k1) = difference_kernel_origin(&col(&b1), &col(&b2), &col(&a1), &col(&a2));
        let w0 = scale * weights[half];
        row[j] += w0 * k1;
        let drow = spectral::differentiation_row(n, j);
        for (k, dv) in drow.iter().enumerate() {
            row[k] -= w0 * k0 * dv;
        }
        row
    });
    Ok(OperatorMatrix::from_matrix(mat))
}

/// The bounded-kernel difference `A^{1,q}_{n,m}` (first-order case), used to
/// check the splitting `B^{0,q} = A^{1,q} + C_{n+q,m}`. Integrated with the
/// same endpoint-corrected rule as [`assemble_c`]; its kernel vanishes at `s = 0`.
pub fn assemble_a1(spec: &OperatorSpec, grid: usize) -> Result<OperatorMatrix> {
    spec.check_grid(grid)?;
    let n = grid;
    let half = n / 2;
    let h = 2.0 * PI / n as f64;
    let weights = gregory_weights(n + 1, GREGORY_ORDER);
    let mat = build_rows(n, n, |j| {
        let mut row = vec![0.0; n];
        let scale = h / (2.0 * PI);
        for (idx, w) in weights.iter().enumerate() {
            let offset = idx as i64 - half as i64;
            if offset == 0 {
                continue;
            }
            let s = offset as f64 * h;
            let k = (j as i64 - offset).rem_euclid(n as i64) as usize;
            let ct = 1.0 / (0.5 * s).tan();
            let mut tanh_part = ct;
            let mut diff_part = 2.0 / s;
            for x in &spec.b {
                let dl = x[j] - x[k];
                tanh_part *= (0.5 * dl).tanh() * ct;
                diff_part *= dl / s;
            }
            for x in &spec.c {
                let dl = x[j] - x[k];
                tanh_part *= 0.5 * dl * ct;
                diff_part *= dl / s;
            }
            for x in &spec.a {
                let dl = x[j] - x[k];
                let r = (0.5 * dl).tanh() * ct;
                tanh_part /= 1.0 + r * r;
                let r = dl / s;
                diff_part /= 1.0 + r * r;
            }
            row[k] += scale * w * (tanh_part - diff_part);
        }
        row
    });
    Ok(OperatorMatrix::from_matrix(mat))
}

/// Weights of the classical periodic log quadrature: row `d` integrates
/// `ln(4 sin^2((xi_j - s)/2)) phi(s)` against the node at offset `d`.
pub(crate) fn log_weights(n: usize) -> Vec<f64> {
    let big_n = n / 2;
    let h = 2.0 * PI / n as f64;
    (0..n)
        .map(|d| {
            let t = d as f64 * h;
            let mut acc = 0.0;
            for m in 1..big_n {
                acc += (m as f64 * t).cos() / m as f64;
            }
            -(2.0 * PI / big_n as f64) * acc
                - PI / (big_n * big_n) as f64 * (big_n as f64 * t).cos()
        })
        .collect()
}

/// Log-kernel operator `(1/2pi) int ln((t^2+T^2)/((1+t^2)(1-T^2))) phi(xi - s) ds`.
///
/// The kernel equals `ln(4 sin^2(s/2)) + R(xi, s)` with `R` smooth; the log
/// part is integrated exactly on trigonometric polynomials and `R` by the
/// trapezoid rule, with `R(xi, 0) = ln((1 + f'^2)/4)`.
pub fn assemble_b0(f: &InterfaceProfile) -> OperatorMatrix {
    let n = f.n();
    let x = f.samples();
    let fp = spectral::derivative(x, 1);
    let lw = log_weights(n);
    let h = 2.0 * PI / n as f64;
    let half_angles: Vec<(f64, f64)> = (0..n)
        .map(|d| (0.5 * d as f64 * h).sin_cos())
        .collect();
    let mat = build_rows(n, n, |j| {
        let mut row = vec![0.0; n];
        for (k, slot) in row.iter_mut().enumerate() {
            let d = (j + n - k) % n;
            let r = if d == 0 {
                ((1.0 + fp[j] * fp[j]) / 4.0).ln()
            } else {
                let tt = (0.5 * (x[j] - x[k])).tanh();
                let (s, c) = half_angles[d];
                let ratio = (s * s + tt * tt * c * c) / (4.0 * s * s);
                ratio.ln() - (1.0 - tt * tt).ln()
            };
            *slot = (lw[d] + h * r) / (2.0 * PI);
        }
        row
    });
    OperatorMatrix::from_matrix(mat)
}
