mod common;

use common::log_slope;
use proptest::prelude::*;
use std::f64::consts::PI;
use stokes_sheet::kernels::{stokeslet, stresslet, z, z_all, KernelPoint};

fn pt(x1: f64, x2: f64) -> KernelPoint {
    KernelPoint::new(x1, x2)
}

fn zv(i: usize, x1: f64, x2: f64) -> f64 {
    z(i, pt(x1, x2)).unwrap()
}

/// Central-difference gradient of a scalar field.
fn grad(f: &dyn Fn(f64, f64) -> f64, x1: f64, x2: f64, h: f64) -> [f64; 2] {
    [
        (f(x1 + h, x2) - f(x1 - h, x2)) / (2.0 * h),
        (f(x1, x2 + h) - f(x1, x2 - h)) / (2.0 * h),
    ]
}

fn laplacian(f: &dyn Fn(f64, f64) -> f64, x1: f64, x2: f64, h: f64) -> f64 {
    (f(x1 + h, x2) + f(x1 - h, x2) + f(x1, x2 + h) + f(x1, x2 - h) - 4.0 * f(x1, x2)) / (h * h)
}

/// Stokes residual `(|lap v - grad q|, |div v|)` of a velocity/pressure pair.
fn stokes_residual(
    v: &dyn Fn(f64, f64) -> [f64; 2],
    q: &dyn Fn(f64, f64) -> f64,
    x1: f64,
    x2: f64,
    h: f64,
) -> (f64, f64) {
    let v1 = |a: f64, b: f64| v(a, b)[0];
    let v2 = |a: f64, b: f64| v(a, b)[1];
    let gq = grad(q, x1, x2, h);
    let r1 = laplacian(&v1, x1, x2, h) - gq[0];
    let r2 = laplacian(&v2, x1, x2, h) - gq[1];
    let div = grad(&v1, x1, x2, h)[0] + grad(&v2, x1, x2, h)[1];
    (r1.hypot(r2), div.abs())
}

#[test]
fn closed_form_values() {
    assert!((zv(1, PI / 2.0, 0.0) - 1.0).abs() < 1e-15);
    for x2 in [0.3, 1.0, 4.0] {
        assert!((zv(2, 0.0, x2) - 1.0 / (0.5 * x2).tanh()).abs() < 1e-13);
    }
    assert!((zv(2, 0.0, 40.0) - 1.0).abs() < 1e-15);
    for x1 in [-2.0, 0.4, 3.0] {
        assert_eq!(zv(3, x1, 0.0), 0.0);
    }
}

#[test]
fn evaluation_at_x1_equals_pi_is_finite() {
    let v = z_all(pt(PI, 0.0)).unwrap().0;
    assert!(v.iter().all(|x| x.is_finite()));
    let w = z_all(pt(-PI, 0.5)).unwrap().0;
    let u = z_all(pt(PI, 0.5)).unwrap().0;
    assert_eq!(u, w);
}

#[test]
fn origin_and_index_are_rejected() {
    assert!(z_all(pt(0.0, 0.0)).is_err());
    assert!(z_all(pt(2.0 * PI, 0.0)).is_err());
    assert!(stokeslet(pt(0.0, 0.0)).is_err());
    assert!(stresslet(pt(0.0, 0.0)).is_err());
    assert!(z(7, pt(1.0, 1.0)).is_err());
}

#[test]
fn gradient_identities() {
    let h = 1e-5;
    for (x1, x2) in [(1.0, 0.7), (-2.2, 0.4), (0.3, -1.1)] {
        let g0 = grad(&|a, b| zv(0, a, b), x1, x2, h);
        let g1 = grad(&|a, b| zv(1, a, b), x1, x2, h);
        let g2 = grad(&|a, b| zv(2, a, b), x1, x2, h);
        let v = z_all(pt(x1, x2)).unwrap().0;
        let checks = [
            (g0[0], v[1]),
            (g0[1], v[2]),
            (g1[0], -v[5]),
            (g1[1], -2.0 * v[6]),
            (g2[0], -2.0 * v[6]),
            (g2[1], v[5]),
        ];
        for (i, (fd, exact)) in checks.iter().enumerate() {
            assert!((fd - exact).abs() <= 1e-8, "({x1},{x2}) #{i}: {fd} vs {exact}");
        }
    }
}

#[test]
fn stokeslet_structure() {
    for (x1, x2) in [(0.5, 0.3), (-1.0, -2.0), (3.0, 0.01)] {
        let (u, _) = stokeslet(pt(x1, x2)).unwrap();
        assert_eq!(u[0][1], u[1][0]);
    }
    let (u, _) = stokeslet(pt(1.3, 0.0)).unwrap();
    let z0 = zv(0, 1.3, 0.0);
    assert_eq!(u[0][1], 0.0);
    assert!((u[0][0] - z0 / (8.0 * PI)).abs() < 1e-16);
    assert!((u[1][1] - z0 / (8.0 * PI)).abs() < 1e-16);
}

#[test]
fn stokeslet_solves_stokes() {
    let h = 1e-4;
    let (x1, x2) = (1.2, 0.9);
    for k in 0..2 {
        let v = |a: f64, b: f64| {
            let (u, _) = stokeslet(pt(a, b)).unwrap();
            [u[0][k], u[1][k]]
        };
        let q = |a: f64, b: f64| stokeslet(pt(a, b)).unwrap().1[k];
        let (res, div) = stokes_residual(&v, &q, x1, x2, h);
        assert!(res <= 1e-5, "k={k}: {res:e}");
        assert!(div <= 1e-6, "k={k}: {div:e}");
    }
}

#[test]
fn stresslet_structure_and_definition() {
    // W^{i,k}_j = -P^k delta_ij + d_i U^k_j + d_j U^k_i, Q^{i,k} = 2 d_i P^k
    let h = 1e-5;
    let (x1, x2) = (0.8, -0.6);
    let (w1, w2, q) = stresslet(pt(x1, x2)).unwrap();
    assert_eq!(w1[0][1], w1[1][0]);
    assert_eq!(w2[0][1], w2[1][0]);
    assert_eq!(q[0][1], q[1][0]);
    assert!((q[0][0] + q[1][1]).abs() < 1e-15);
    let (_, p) = stokeslet(pt(x1, x2)).unwrap();
    let w = [w1, w2];
    for i in 0..2 {
        for k in 0..2 {
            for j in 0..2 {
                let du_j = grad(&|a, b| stokeslet(pt(a, b)).unwrap().0[j][k], x1, x2, h);
                let du_i = grad(&|a, b| stokeslet(pt(a, b)).unwrap().0[i][k], x1, x2, h);
                let expected = -if i == j { p[k] } else { 0.0 } + du_j[i] + du_i[j];
                assert!((w[j][i][k] - expected).abs() <= 1e-8, "W^({i},{k})_{j}");
            }
            let dp = grad(&|a, b| stokeslet(pt(a, b)).unwrap().1[k], x1, x2, h);
            assert!((q[i][k] - 2.0 * dp[i]).abs() <= 1e-8);
        }
    }
}

#[test]
fn stresslet_solves_stokes() {
    let h = 1e-4;
    let (x1, x2) = (0.8, -0.6);
    for i in 0..2 {
        for k in 0..2 {
            let v = |a: f64, b: f64| {
                let (w1, w2, _) = stresslet(pt(a, b)).unwrap();
                [w1[i][k], w2[i][k]]
            };
            let q = |a: f64, b: f64| stresslet(pt(a, b)).unwrap().2[i][k];
            let (res, div) = stokes_residual(&v, &q, x1, x2, h);
            assert!(res <= 1e-5, "({i},{k}): {res:e}");
            assert!(div <= 1e-5, "({i},{k}): {div:e}");
        }
    }
}

#[test]
fn parity() {
    for x1 in [0.3, 1.1, 2.5] {
        for x2 in [-1.5, -0.2, 0.4, 2.0] {
            assert!((zv(0, x1, x2) - zv(0, -x1, x2)).abs() < 1e-14);
            assert!((zv(2, x1, x2) - zv(2, -x1, x2)).abs() < 1e-14);
            assert!((zv(1, x1, x2) + zv(1, -x1, x2)).abs() < 1e-14);
            assert!((zv(2, x1, x2) + zv(2, x1, -x2)).abs() < 1e-14);
        }
    }
}

#[test]
fn exponential_decay() {
    let heights: Vec<f64> = (0..8).map(|i| 3.0 + i as f64).collect();
    let x1 = 1.0;
    type Field = Box<dyn Fn(f64) -> f64>;
    let fields: [(&str, Field); 4] = [
        ("z1", Box::new(move |x2| zv(1, x1, x2).abs())),
        ("z2", Box::new(move |x2| (zv(2, x1, x2) - 1.0).abs())),
        ("z5", Box::new(move |x2| zv(5, x1, x2).abs())),
        ("z6", Box::new(move |x2| zv(6, x1, x2).abs())),
    ];
    for (name, f) in fields.iter() {
        let y: Vec<f64> = heights.iter().map(|&h| f(h)).collect();
        let slope = log_slope(&heights, &y);
        assert!((slope + 1.0).abs() <= 0.1, "{name}: {slope}");
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(10))]

    #[test]
    fn periodic_in_x1(x1 in -PI..PI, x2 in -3.0f64..3.0, m in -3i32..3) {
        prop_assume!(x1.abs() > 1e-3 || x2.abs() > 1e-3);
        let a = z_all(pt(x1, x2)).unwrap().0;
        let b = z_all(pt(x1 + 2.0 * PI * m as f64, x2)).unwrap().0;
        for i in 0..7 {
            prop_assert!((a[i] - b[i]).abs() <= 1e-13 * (1.0 + a[i].abs()));
        }
    }

    #[test]
    fn kernels_solve_stokes_at_random_points(x1 in -PI..PI, x2 in 0.4f64..2.5, below in any::<bool>()) {
        let x2 = if below { -x2 } else { x2 };
        let h = 1e-4;
        for k in 0..2 {
            let v = |a: f64, b: f64| {
                let (u, _) = stokeslet(pt(a, b)).unwrap();
                [u[0][k], u[1][k]]
            };
            let q = |a: f64, b: f64| stokeslet(pt(a, b)).unwrap().1[k];
            let (res, div) = stokes_residual(&v, &q, x1, x2, h);
            prop_assert!(res <= 1e-5 && div <= 1e-6);
            for i in 0..2 {
                let v = |a: f64, b: f64| {
                    let (w1, w2, _) = stresslet(pt(a, b)).unwrap();
                    [w1[i][k], w2[i][k]]
                };
                let q = |a: f64, b: f64| stresslet(pt(a, b)).unwrap().2[i][k];
                let (res, div) = stokes_residual(&v, &q, x1, x2, h);
                prop_assert!(res <= 1e-5 && div <= 1e-5, "res {res:e} div {div:e}");
            }
        }
    }
}
