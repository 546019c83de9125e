#![allow(clippy::needless_range_loop)]

use std::f64::consts::PI;

use proptest::prelude::*;
use vsheet::domain::DomainModel;
use vsheet::kirchhoff_routh::VortexConfig;
use vsheet::sheet::SheetState;
use vsheet::spectral::PeriodicSamples;

fn single(eps: f64, n: usize, f: impl Fn(f64) -> f64) -> SheetState {
    let c = VortexConfig::new(vec![[0.1, -0.2]], vec![1.0]);
    let mut s = SheetState::circles(DomainModel::FreePlane, &c, eps, 0.0, n).unwrap();
    s.f[0] = PeriodicSamples::from_fn(n, f);
    s
}

/// Curvature from the point samples alone, by 8th-order periodic central differences.
fn fd_curvature(points: &[[f64; 2]]) -> Vec<f64> {
    let n = points.len();
    let h = 2.0 * PI / n as f64;
    let d1 = [4.0 / 5.0, -1.0 / 5.0, 4.0 / 105.0, -1.0 / 280.0];
    let d2 = [8.0 / 5.0, -1.0 / 5.0, 8.0 / 315.0, -1.0 / 560.0];
    let c2 = -205.0 / 72.0;
    (0..n)
        .map(|k| {
            let at = |o: isize, a: usize| points[(k as isize + o).rem_euclid(n as isize) as usize][a];
            let mut p = [0.0; 2];
            let mut pp = [0.0; 2];
            for a in 0..2 {
                pp[a] = c2 * at(0, a);
                for (m, (w1, w2)) in d1.iter().zip(&d2).enumerate() {
                    let o = m as isize + 1;
                    p[a] += w1 * (at(o, a) - at(-o, a));
                    pp[a] += w2 * (at(o, a) + at(-o, a));
                }
                p[a] /= h;
                pp[a] /= h * h;
            }
            (p[0] * pp[1] - p[1] * pp[0]) / (p[0] * p[0] + p[1] * p[1]).powf(1.5)
        })
        .collect()
}

#[test]
fn curvature_matches_finite_differences() {
    let eps = 0.1;
    let s = single(eps, 256, |t| 0.5 * (2.0 * t).cos() - 0.2 * (3.0 * t).sin());
    let geo = s.curve_geometry(0).unwrap();
    let fd = fd_curvature(&geo.points);
    for k in 0..256 {
        assert!(
            (fd[k] - geo.curvature[k]).abs() * eps < 1e-6,
            "k={k}: {} vs {}",
            fd[k],
            geo.curvature[k]
        );
    }
}

#[test]
fn convexity_agrees_with_fd_sign() {
    let s = single(0.2, 256, |t| 3.0 * (2.0 * t).cos());
    let geo = s.curve_geometry(0).unwrap();
    let fd = fd_curvature(&geo.points);
    for k in 0..256 {
        if fd[k].abs() > 1e-3 {
            assert_eq!(fd[k] > 0.0, geo.curvature[k] > 0.0, "k={k}");
        }
    }
    let fd_convex = fd.iter().all(|&c| c > 0.0);
    assert_eq!(s.convexity_check(0).unwrap(), fd_convex);
    assert!(!fd_convex);
    assert!(single(0.05, 64, |t| 0.3 * (2.0 * t).cos()).convexity_check(0).unwrap());
}

#[test]
fn tangent_and_speed_from_points() {
    let s = single(0.1, 128, |t| 0.4 * (2.0 * t).sin());
    let geo = s.curve_geometry(0).unwrap();
    let h = 2.0 * PI / 128.0;
    let arclength: f64 = geo.speed.iter().sum::<f64>() * h;
    let fine = s.refine(8192).unwrap().points(0);
    let polygon: f64 = (0..8192)
        .map(|k| {
            let (p, q) = (fine[k], fine[(k + 1) % 8192]);
            (p[0] - q[0]).hypot(p[1] - q[1])
        })
        .sum();
    assert!((arclength - polygon).abs() < 1e-7 * arclength);
    for k in 0..128 {
        let t = geo.tangents[k];
        assert!((t[0].hypot(t[1]) - 1.0).abs() < 1e-14);
    }
}

#[test]
fn constrained_states_carry_exact_circulation() {
    let c = VortexConfig::new(vec![[0.3, 0.0], [-0.3, 0.1]], vec![1.5, -0.5]);
    let mut s = SheetState::circles(DomainModel::UnitDisk, &c, 0.05, 0.2, 64).unwrap();
    for i in 0..2 {
        let k = s.strengths[i];
        s.f[i] = PeriodicSamples::from_fn(64, |t| 0.3 * t.cos() + 0.2 * (2.0 * t).sin());
        s.g[i] = PeriodicSamples::from_fn(64, |t| -0.3 * k * t.cos() + 0.7 * (5.0 * t).cos());
    }
    s.validate().unwrap();
    for i in 0..2 {
        assert!((s.circulation(i) - s.strengths[i]).abs() < 1e-12);
    }
}

#[test]
fn geometry_violations_rejected() {
    let c = VortexConfig::new(vec![[0.0, 0.0]], vec![1.0]);
    let mut s = SheetState::circles(DomainModel::UnitDisk, &c, 0.6, 0.0, 64).unwrap();
    assert!(s.validate().is_err());
    s.epsilon = 0.2;
    s.validate().unwrap();
    s.f[0] = PeriodicSamples::from_fn(64, |t| -3.0 * (2.0 * t).cos());
    assert!(s.check_geometry().is_err());
    let c = VortexConfig::new(vec![[0.0, 0.0], [0.15, 0.0]], vec![1.0, 1.0]);
    assert!(SheetState::circles(DomainModel::FreePlane, &c, 0.1, 0.0, 32)
        .unwrap()
        .check_geometry()
        .is_err());
}

proptest! {
    #[test]
    fn state_file_round_trip_is_exact(
        a in proptest::collection::vec(-0.5..0.5f64, 6),
        eps in 0.01..0.2f64,
        tau in -0.2..0.2f64,
    ) {
        let c = VortexConfig::new(vec![[0.2, 0.1]], vec![-1.3]);
        let mut s = SheetState::circles(DomainModel::UnitDisk, &c, eps, tau, 32).unwrap();
        let k = -1.3;
        s.f[0] = PeriodicSamples::from_fn(32, |t| a[0] * t.cos() + a[1] * t.sin() + a[2] * (2.0 * t).cos() + a[3] * (7.0 * t).sin());
        s.g[0] = PeriodicSamples::from_fn(32, |t| -k * a[0] * t.cos() - k * a[1] * t.sin() + a[4] * (3.0 * t).cos() + a[5] * (4.0 * t).sin());
        let back = SheetState::from_json(&s.to_json()).unwrap();
        prop_assert_eq!(back.epsilon, eps);
        prop_assert_eq!(back.tau, tau);
        prop_assert!(back.f[0].sub(&s.f[0]).sup_norm() < 1e-15);
        prop_assert!(back.g[0].sub(&s.g[0]).sup_norm() < 1e-15);
        let direct: SheetState = serde_json::from_str(&serde_json::to_string(&s).unwrap()).unwrap();
        prop_assert!(direct.f[0].sub(&s.f[0]).sup_norm() < 1e-15);
    }
}
