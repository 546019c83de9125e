use vsheet::domain::DomainModel;
use vsheet::kirchhoff_routh::{find_critical, CriticalOptions, VortexConfig};
use vsheet::sheet::SheetState;
use vsheet::solver::{solve_at, SolveOptions};
use vsheet::spectral::PeriodicSamples;
use vsheet::vec2;
use vsheet::verify;

#[test]
fn free_circle_has_zero_normal_and_constant_slip() {
    let c = VortexConfig::new(vec![[0.3, -0.7]], vec![1.3]);
    let s = SheetState::circles(DomainModel::FreePlane, &c, 0.1, 0.0, 64).unwrap();
    let r = &verify::residual_samples(&s).unwrap()[0];
    assert!(r.normal.iter().all(|v| v.abs() < 1e-13));
    let v = verify::br_velocity(&s, 0, &(0..64).collect::<Vec<_>>()).unwrap();
    let geo = s.curve_geometry(0).unwrap();
    let slip: Vec<f64> = (0..64).map(|k| vec2::dot(v[k], geo.tangents[k])).collect();
    assert!(slip.iter().all(|&t| (t - slip[0]).abs() < 1e-12));
}

#[test]
fn unconverged_state_is_detected() {
    let c = VortexConfig::new(vec![[0.0, 0.0]], vec![1.0]);
    let mut s = SheetState::circles(DomainModel::UnitDisk, &c, 0.05, 0.0, 128).unwrap();
    s.f[0] = PeriodicSamples::from_fn(128, |t| 0.1 * (2.0 * t).cos());
    let rep = verify::direct_residual(&s).unwrap();
    assert!(rep.max_residual() > 1e-4, "{:e}", rep.max_residual());
    assert!(rep.max_residual() > 10.0 * rep.max_error());
}

#[test]
fn solved_state_passes_oracle() {
    let c = VortexConfig::new(vec![[0.0, 0.0]], vec![1.0]);
    let t = solve_at(DomainModel::UnitDisk, &c, 0.05, 0.1, &SolveOptions::default()).unwrap();
    assert!(t.converged);
    let rep = verify::direct_residual(&t.final_state).unwrap();
    assert!(rep.max_residual() < 1e-8);
    assert!(rep.max_error() < 1e-8);
}

#[test]
fn oracle_gap_shrinks_with_resolution() {
    let seed = VortexConfig::new(vec![[0.5, 0.0], [-0.5, 0.0]], vec![1.0, -1.0]);
    let x0 = find_critical(DomainModel::UnitDisk, &seed, &CriticalOptions::default())
        .unwrap()
        .point;
    let opts = SolveOptions {
        n: 32,
        ..SolveOptions::default()
    };
    let t = solve_at(DomainModel::UnitDisk, &x0, 0.1, 0.05, &opts).unwrap();
    assert!(t.converged, "{}", t.message);
    let gap = |n: usize| {
        let coarse = t.final_state.refine(n).unwrap();
        let fine = t.final_state.refine(2 * n).unwrap();
        let mut worst = 0.0f64;
        for i in 0..2 {
            let a = verify::br_velocity(&coarse, i, &(0..n).collect::<Vec<_>>()).unwrap();
            let b = verify::br_velocity(&fine, i, &(0..n).map(|k| 2 * k).collect::<Vec<_>>()).unwrap();
            for k in 0..n {
                worst = worst.max(vec2::norm(vec2::sub(a[k], b[k])));
            }
        }
        worst
    };
    let (g1, g2) = (gap(32), gap(64));
    assert!(g2 * 10.0 <= g1, "{g1:e} -> {g2:e}");
}

#[test]
fn limit_fit_needs_three_states() {
    let c = VortexConfig::new(vec![[0.0, 0.0]], vec![1.0]);
    let s = SheetState::circles(DomainModel::UnitDisk, &c, 0.05, 0.0, 32).unwrap();
    assert!(verify::point_vortex_limit_check(&[s.clone(), s], &c).is_err());
}

#[test]
fn near_nyquist_identity_error_is_reported() {
    let rep = verify::kernel_identity_check(64, 31).unwrap();
    assert!(rep.max_error().is_finite());
    assert!(verify::kernel_identity_check(256, 32).unwrap().max_error() < 1e-8);
}
