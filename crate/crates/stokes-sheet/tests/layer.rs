mod common;

use common::{max_abs, max_abs_diff, nodes};
use nalgebra::DMatrix;
use std::f64::consts::PI;
use stokes_sheet::bie::solve_density;
use stokes_sheet::kernels::KernelPoint;
use stokes_sheet::layer::{
    double_layer, double_layer_adjoint, eval_fields, eval_z, phi, rhs_v, trace_ops, FieldEvaluator,
    InterfaceQuadrature, Side, COMPOSITE_TERMS,
};
use stokes_sheet::operators::{assemble_b, hilbert_matrix, OperatorSpec};
use stokes_sheet::{FluidParams, InterfaceProfile};

fn cosine(n: usize, amp: f64) -> InterfaceProfile {
    InterfaceProfile::from_fn(n, |x| amp * x.cos()).unwrap()
}

fn params(mu_plus: f64, mu_minus: f64, sigma: f64, theta: f64) -> FluidParams {
    FluidParams::with_theta(mu_plus, mu_minus, sigma, theta).unwrap()
}

/// Point at signed distance `d` from the interface along the upward normal.
fn off_normal(f: &InterfaceProfile, xi: f64, d: f64) -> KernelPoint {
    let fp = f.derivative(1).unwrap();
    let j = nodes(f.n()).iter().position(|x| (x - xi).abs() < 1e-12).unwrap();
    let w = (1.0 + fp[j] * fp[j]).sqrt();
    KernelPoint::new(xi - d * fp[j] / w, f.samples()[j] + d / w)
}

fn richardson(v: [f64; 3]) -> f64 {
    (8.0 * v[2] - 6.0 * v[1] + v[0]) / 3.0
}

#[test]
fn flat_composites() {
    let n = 32;
    let ops = trace_ops(&InterfaceProfile::zeros(n).unwrap());
    let h = hilbert_matrix(n).unwrap();
    assert!((ops.get(1).matrix() - h.matrix()).amax() < 1e-14);
    for i in 2..=6 {
        assert_eq!(ops.get(i).max_abs(), 0.0, "B{i}");
    }
}

#[test]
fn fused_assembly_matches_term_sums() {
    let n = 64;
    let f = cosine(n, 0.3);
    let ops = trace_ops(&f);
    for target in 1..=6 {
        let mut sum = DMatrix::zeros(n, n);
        for t in COMPOSITE_TERMS.iter().filter(|t| t.target == target) {
            let spec = OperatorSpec::uniform(t.n, t.m, t.p, t.q, f.samples()).unwrap();
            sum += assemble_b(&spec, n).unwrap().matrix() * t.coef;
        }
        let err = (ops.get(target).matrix() - &sum).amax();
        assert!(err < 1e-12, "B{target}: {err:e}");
    }
}

#[test]
fn composite_symmetries() {
    let n = 256;
    let ops = trace_ops(&cosine(n, 0.3));
    for i in 1..=4 {
        let m = ops.get(i).matrix();
        assert!((m + m.transpose()).amax() < 1e-8, "B{i} antisymmetric");
    }
    for i in 5..=6 {
        let m = ops.get(i).matrix();
        assert!((m - m.transpose()).amax() < 1e-8, "B{i} symmetric");
    }
}

#[test]
fn trace_ops_linear() {
    let n = 64;
    let ops = trace_ops(&cosine(n, 0.3));
    let a: Vec<f64> = nodes(n).iter().map(|x| (2.0 * x).sin()).collect();
    let b: Vec<f64> = nodes(n).iter().map(|x| x.cos().exp()).collect();
    let ab: Vec<f64> = a.iter().zip(&b).map(|(x, y)| x + y).collect();
    for i in 1..=6 {
        let lhs = ops.get(i).apply(&ab);
        let rhs: Vec<f64> = ops.get(i).apply(&a).iter().zip(ops.get(i).apply(&b)).map(|(x, y)| x + y).collect();
        assert!(max_abs_diff(&lhs, &rhs) < 1e-12);
    }
}

#[test]
fn flat_double_layer_vanishes() {
    let f = InterfaceProfile::zeros(128).unwrap();
    let ops = trace_ops(&f);
    assert!(double_layer(&f, &ops).matrix().amax() <= 1e-10);
    assert!(double_layer_adjoint(&f, &ops).matrix().amax() <= 1e-10);
}

#[test]
fn double_layer_adjoint_identity() {
    let n = 256;
    let f = cosine(n, 0.4);
    let ops = trace_ops(&f);
    let d = double_layer(&f, &ops);
    let ds = double_layer_adjoint(&f, &ops);
    let x = nodes(n);
    let beta = [
        x.iter().map(|t| (t.sin() + 0.3 * (2.0 * t).cos()).exp()).collect::<Vec<_>>(),
        x.iter().map(|t| 1.0 / (2.0 + t.cos())).collect::<Vec<_>>(),
    ];
    let gamma = [
        x.iter().map(|t| (3.0 * t).sin() - 0.2 * t.cos()).collect::<Vec<_>>(),
        x.iter().map(|t| (0.5 * t.cos()).exp()).collect::<Vec<_>>(),
    ];
    let w = 2.0 * PI / n as f64;
    let inner = |a: &[Vec<f64>; 2], b: &[Vec<f64>; 2]| -> f64 {
        w * (0..2).map(|c| a[c].iter().zip(&b[c]).map(|(p, q)| p * q).sum::<f64>()).sum::<f64>()
    };
    let lhs = inner(&d.apply(&beta), &gamma);
    let rhs = inner(&beta, &ds.apply(&gamma));
    assert!((lhs - rhs).abs() <= 1e-8 * lhs.abs().max(rhs.abs()));
    assert!((d.matrix().transpose() - ds.matrix()).amax() < 1e-10);
    assert_eq!(d.block(0, 1), d.block(1, 0));
}

#[test]
fn rhs_flat_and_sigma_scaling() {
    let n = 64;
    let flat = InterfaceProfile::zeros(n).unwrap();
    let p = params(2.0, 1.0, 1.0, 0.7);
    let v = rhs_v(&flat, &p, &trace_ops(&flat), false);
    assert_eq!(max_abs(&v.v1), 0.0);
    assert_eq!(max_abs(&v.v2), 0.0);

    let f = cosine(n, 0.3);
    let ops = trace_ops(&f);
    let v1 = rhs_v(&f, &params(2.0, 1.0, 1.0, 0.0), &ops, false);
    let v2 = rhs_v(&f, &params(2.0, 1.0, 2.0, 0.0), &ops, false);
    for j in 0..n {
        assert_eq!(v2.v1[j], 2.0 * v1.v1[j]);
        assert_eq!(v2.v2[j], 2.0 * v1.v2[j]);
    }
}

#[test]
fn rhs_linearization_at_flat() {
    // Principal part at the flat state: (0, -(sigma |k| + theta / |k|) f / 4) on mode k.
    let n = 64;
    let (sigma, theta) = (1.3, 0.6);
    let p = params(1.0, 1.0, sigma, theta);
    let x = nodes(n);
    let defect = |eps: f64| {
        let f = InterfaceProfile::new(x.iter().map(|t| eps * (2.0 * t).cos()).collect()).unwrap();
        let v = rhs_v(&f, &p, &trace_ops(&f), false);
        let lin: Vec<f64> = x.iter().map(|t| -(sigma * 2.0 + theta / 2.0) * eps * (2.0 * t).cos() / 4.0).collect();
        max_abs(&v.v1).max(max_abs_diff(&v.v2, &lin))
    };
    let (d1, d2) = (defect(1e-3), defect(2e-3));
    assert!(d1 < 1e-5, "{d1:e}");
    let ratio = d2 / d1;
    assert!((3.5..4.5).contains(&ratio), "ratio {ratio}");
}

#[test]
fn rhs_dealiasing_agrees_for_resolved_profiles() {
    let n = 128;
    let f = cosine(n, 0.3);
    let p = params(2.0, 1.0, 1.0, 0.5);
    let ops = trace_ops(&f);
    let a = rhs_v(&f, &p, &ops, false);
    let b = rhs_v(&f, &p, &ops, true);
    assert!(max_abs_diff(&a.v1, &b.v1) < 1e-10);
    assert!(max_abs_diff(&a.v2, &b.v2) < 1e-10);
}

#[test]
fn z_far_field_limits() {
    let n = 64;
    let f = cosine(n, 0.3);
    let x = nodes(n);
    let phi: Vec<f64> = x.iter().map(|t| 1.0 + t.cos()).collect();
    for x1 in [-2.0, 0.3, 1.7] {
        let up = KernelPoint::new(x1, 15.0);
        let down = KernelPoint::new(x1, -15.0);
        assert!((eval_z(2, &f, &phi, up).unwrap() - 1.0).abs() <= 1e-5);
        assert!((eval_z(2, &f, &phi, down).unwrap() + 1.0).abs() <= 1e-5);
        for i in [1, 3, 4] {
            assert!(eval_z(i, &f, &phi, up).unwrap().abs() <= 1e-5, "Z{i}");
            assert!(eval_z(i, &f, &phi, down).unwrap().abs() <= 1e-5, "Z{i}");
        }
    }
}

#[test]
fn z_collar_is_rejected() {
    let f = cosine(64, 0.3);
    let phi = vec![1.0; 64];
    assert!(eval_z(1, &f, &phi, KernelPoint::new(0.0, 0.3 + 0.01)).is_err());
    assert!(eval_z(5, &f, &phi, KernelPoint::new(0.0, 3.0)).is_err());
}

#[test]
fn z1_jump_from_above() {
    let n = 64;
    let f = cosine(n, 0.2);
    let x = nodes(n);
    let phi: Vec<f64> = x.iter().map(|t| t.cos()).collect();
    let quad = InterfaceQuadrature::new(&f, 16).unwrap();
    let phi_q = quad.refine(&phi);
    let b1 = trace_ops(&f).get(1).apply(&phi);
    let fp = f.derivative(1).unwrap();
    for j in [10, 21, 40] {
        let vals = [0.05, 0.025, 0.0125].map(|d| quad.z(1, &phi_q, off_normal(&f, x[j], d)).unwrap());
        let limit = richardson(vals);
        let expected = b1[j] - fp[j] / (1.0 + fp[j] * fp[j]) * phi[j];
        assert!((limit - expected).abs() <= 1e-4, "j={j}: {limit} vs {expected}");
    }
}

fn setup(n: usize) -> (InterfaceProfile, FluidParams, [Vec<f64>; 2]) {
    let f = cosine(n, 0.2);
    let p = params(3.0, 1.0, 1.0, 0.8);
    let beta = solve_density(&f, &p).unwrap().components();
    (f, p, beta)
}

#[test]
fn velocity_trace_matches_density() {
    let n = 64;
    let (f, p, beta) = setup(n);
    let ev = FieldEvaluator::new(&f, &beta, &p, 16).unwrap();
    let x = nodes(n);
    let m = p.mu_sum();
    for j in [5, 16, 37] {
        for sign in [1.0, -1.0] {
            let v = [0.05, 0.025, 0.0125].map(|d| ev.eval(off_normal(&f, x[j], sign * d)).unwrap().velocity);
            for c in 0..2 {
                let limit = richardson([v[0][c], v[1][c], v[2][c]]);
                let expected = 2.0 * beta[c][j] / m;
                assert!((limit - expected).abs() <= 1e-3, "j={j} side {sign} c={c}: {limit} vs {expected}");
            }
        }
    }
}

#[test]
fn double_layer_jump_equals_density() {
    let n = 64;
    let (f, p, beta) = setup(n);
    let ev = FieldEvaluator::new(&f, &beta, &p, 16).unwrap();
    let x = nodes(n);
    for j in [3, 30, 50] {
        let upper = [0.05, 0.025, 0.0125].map(|d| ev.parts(off_normal(&f, x[j], d)).unwrap().2);
        let lower = [0.05, 0.025, 0.0125].map(|d| ev.parts(off_normal(&f, x[j], -d)).unwrap().2);
        for c in 0..2 {
            let jump = richardson([upper[0][c], upper[1][c], upper[2][c]]) - richardson([lower[0][c], lower[1][c], lower[2][c]]);
            let density = 2.0 * p.a_mu() * beta[c][j];
            assert!((jump - density).abs() <= 1e-3, "j={j} c={c}: {jump} vs {density}");
        }
    }
}

#[test]
fn flat_fields_vanish() {
    let n = 32;
    let f = InterfaceProfile::zeros(n).unwrap();
    let p = params(1.0, 1.0, 1.0, 0.5);
    let beta = [vec![0.0; n], vec![0.0; n]];
    for pt in [(0.3, 0.5), (-2.0, -1.0), (3.0, 4.0)] {
        let r = eval_fields(&f, &beta, &p, KernelPoint::new(pt.0, pt.1)).unwrap();
        assert_eq!(r.velocity, [0.0, 0.0]);
        assert_eq!(r.pressure, 0.0);
    }
}

#[test]
fn far_field_pressure() {
    let n = 64;
    let (f, p, beta) = setup(n);
    for x1 in [-1.0, 0.5, 2.5] {
        let up = eval_fields(&f, &beta, &p, KernelPoint::new(x1, 12.0)).unwrap();
        let down = eval_fields(&f, &beta, &p, KernelPoint::new(x1, -12.0)).unwrap();
        assert_eq!(up.side, Side::Upper);
        assert_eq!(down.side, Side::Lower);
        assert!(up.pressure.abs() <= 1e-4, "{}", up.pressure);
        assert!(down.pressure.abs() <= 1e-4, "{}", down.pressure);
    }
}

#[test]
fn bulk_velocity_is_divergence_free() {
    let n = 64;
    let (f, p, beta) = setup(n);
    let ev = FieldEvaluator::new(&f, &beta, &p, 4).unwrap();
    let h = 1e-4;
    for (a, b) in [(0.1, 0.9), (-1.3, -0.6), (2.0, 0.5), (-2.9, 1.5), (1.0, -2.0)] {
        let v = |x1: f64, x2: f64| ev.eval(KernelPoint::new(x1, x2)).unwrap().velocity;
        let div = (v(a + h, b)[0] - v(a - h, b)[0] + v(a, b + h)[1] - v(a, b - h)[1]) / (2.0 * h);
        assert!(div.abs() <= 1e-5, "div at ({a},{b}) = {div:e}");
    }
}

#[test]
fn even_profile_gives_parity_of_density() {
    let n = 64;
    let f = InterfaceProfile::from_fn(n, |x| 0.3 * x.cos() - 0.1 * (2.0 * x).cos()).unwrap();
    let beta = solve_density(&f, &params(3.0, 1.0, 1.0, -0.4)).unwrap();
    for j in 1..n {
        let r = n - j;
        assert!((beta.beta1[j] + beta.beta1[r]).abs() <= 1e-9);
        assert!((beta.beta2[j] - beta.beta2[r]).abs() <= 1e-9);
    }
}

#[test]
fn phi_flat_is_zero() {
    let f = InterfaceProfile::zeros(16).unwrap();
    let [a, b] = phi(&f);
    assert_eq!(max_abs(&a), 0.0);
    assert_eq!(max_abs(&b), 0.0);
}
