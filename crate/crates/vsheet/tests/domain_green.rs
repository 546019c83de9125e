use std::f64::consts::PI;

use proptest::prelude::*;
use vsheet::domain::DomainModel;

const ALL: [DomainModel; 3] = [DomainModel::FreePlane, DomainModel::UnitDisk, DomainModel::HalfPlane];

fn inside(d: DomainModel, u: f64, v: f64) -> [f64; 2] {
    match d {
        DomainModel::UnitDisk => {
            let r = 0.9 * u;
            [r * (2.0 * PI * v).cos(), r * (2.0 * PI * v).sin()]
        }
        DomainModel::HalfPlane => [4.0 * v - 2.0, 0.05 + 2.0 * u],
        DomainModel::FreePlane => [4.0 * u - 2.0, 4.0 * v - 2.0],
    }
}

fn laplacian_x(d: DomainModel, x: [f64; 2], y: [f64; 2]) -> f64 {
    let h = 1e-3;
    let v = |p: [f64; 2]| d.h_regular(p, y).unwrap();
    (v([x[0] + h, x[1]]) + v([x[0] - h, x[1]]) + v([x[0], x[1] + h]) + v([x[0], x[1] - h]) - 4.0 * v(x)) / (h * h)
}

proptest! {
    #[test]
    fn green_is_symmetric(di in 0usize..3, a in 0.0..1.0f64, b in 0.0..1.0f64, c in 0.0..1.0f64, e in 0.0..1.0f64) {
        let d = ALL[di];
        let x = inside(d, a, b);
        let y = inside(d, c, e);
        prop_assume!(((x[0] - y[0]).powi(2) + (x[1] - y[1]).powi(2)).sqrt() > 1e-3);
        let gxy = d.green(x, y).unwrap();
        let gyx = d.green(y, x).unwrap();
        prop_assert!((gxy - gyx).abs() < 1e-12 * (1.0 + gxy.abs()));
    }

    #[test]
    fn regular_part_is_harmonic(di in 0usize..3, a in 0.0..0.8f64, b in 0.0..1.0f64, c in 0.0..1.0f64, e in 0.0..1.0f64) {
        let d = ALL[di];
        let x = inside(d, a, b);
        let y = inside(d, c, e);
        prop_assume!(d.boundary_distance(x) > 0.05);
        prop_assert!(laplacian_x(d, x, y).abs() < 1e-4);
    }

    #[test]
    fn gradients_match_finite_differences(di in 0usize..3, a in 0.0..0.8f64, b in 0.0..1.0f64, c in 0.0..1.0f64, e in 0.0..1.0f64) {
        let d = ALL[di];
        let x = inside(d, a, b);
        let y = inside(d, c, e);
        prop_assume!(((x[0] - y[0]).powi(2) + (x[1] - y[1]).powi(2)).sqrt() > 0.05);
        prop_assume!(d.boundary_distance(x) > 0.05);
        let h = 1e-6;
        let gg = d.grad_green_x(x, y).unwrap();
        let gh = d.grad_h_x(x, y).unwrap();
        for k in 0..2 {
            let mut xp = x;
            let mut xm = x;
            xp[k] += h;
            xm[k] -= h;
            let fd_g = (d.green(xp, y).unwrap() - d.green(xm, y).unwrap()) / (2.0 * h);
            let fd_h = (d.h_regular(xp, y).unwrap() - d.h_regular(xm, y).unwrap()) / (2.0 * h);
            prop_assert!((fd_g - gg[k]).abs() < 1e-6 * (1.0 + gg[k].abs()));
            prop_assert!((fd_h - gh[k]).abs() < 1e-6 * (1.0 + gh[k].abs()));
        }
        let gr = d.grad_robin(x).unwrap();
        for k in 0..2 {
            let mut xp = x;
            let mut xm = x;
            xp[k] += h;
            xm[k] -= h;
            let fd = (d.robin(xp).unwrap() - d.robin(xm).unwrap()) / (2.0 * h);
            prop_assert!((fd - gr[k]).abs() < 1e-6 * (1.0 + gr[k].abs()));
        }
    }
}

#[test]
fn green_vanishes_on_the_boundary() {
    let x = [0.3, 0.0];
    let g = DomainModel::UnitDisk.green(x, [1.0 - 1e-4, 0.0]).unwrap();
    assert!(g.abs() < 1e-3, "disk {g}");
    for phi in [0.5f64, 2.0, 4.0] {
        let y = [(1.0 - 1e-6) * phi.cos(), (1.0 - 1e-6) * phi.sin()];
        assert!(DomainModel::UnitDisk.green([0.1, -0.4], y).unwrap().abs() < 1e-5);
    }
    let g = DomainModel::HalfPlane.green([0.2, 0.7], [-0.5, 1e-6]).unwrap();
    assert!(g.abs() < 1e-5, "halfplane {g}");
}

#[test]
fn disk_green_from_center() {
    let g = DomainModel::UnitDisk.green([0.0, 0.0], [0.5, 0.0]).unwrap();
    assert!((g - 2f64.ln() / (2.0 * PI)).abs() < 1e-14);
}

#[test]
fn disk_robin_closed_form() {
    // Image charge at x/|x|^2 gives H(x, x) = (1/2pi) ln(1/(1 - |x|^2)).
    for x in [[0.3, 0.4], [-0.7, 0.1], [0.0, -0.95]] {
        let r2: f64 = x[0] * x[0] + x[1] * x[1];
        let want = -(1.0 - r2).ln() / (2.0 * PI);
        assert!((DomainModel::UnitDisk.robin(x).unwrap() - want).abs() < 1e-13);
    }
    assert_eq!(DomainModel::UnitDisk.grad_robin([0.0, 0.0]).unwrap(), [0.0, 0.0]);
}

#[test]
fn half_plane_robin_gradient() {
    for d in [0.3, 0.7, 2.0] {
        let g = DomainModel::HalfPlane.grad_robin([0.4, d]).unwrap();
        assert!(g[0].abs() < 1e-15);
        assert!((g[1] + 1.0 / (2.0 * PI * d)).abs() < 1e-13);
    }
    let h = 1e-6;
    let d = 0.7;
    let r = |y: f64| DomainModel::HalfPlane.robin([0.0, y]).unwrap();
    let fd = (r(d + h) - r(d - h)) / (2.0 * h);
    let exact = -1.0 / (2.0 * PI * d);
    assert!(((fd - exact) / exact).abs() < 1e-6);
}

#[test]
fn free_plane_has_no_regular_part() {
    let d = DomainModel::FreePlane;
    assert_eq!(d.h_regular([1.0, 2.0], [-3.0, 0.5]).unwrap(), 0.0);
    assert_eq!(d.grad_h_x([1.0, 2.0], [-3.0, 0.5]).unwrap(), [0.0, 0.0]);
}

#[test]
fn points_outside_are_rejected() {
    assert!(DomainModel::UnitDisk.green([1.0, 0.0], [0.0, 0.0]).is_err());
    assert!(DomainModel::HalfPlane.robin([0.0, -0.1]).is_err());
    assert!(DomainModel::FreePlane.green([f64::NAN, 0.0], [0.0, 0.0]).is_err());
}
