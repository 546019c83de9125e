//! Helpers shared by several integration test targets.
#![allow(dead_code)]

use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};
use vsheet::domain::DomainModel;
use vsheet::functional;
use vsheet::kirchhoff_routh::VortexConfig;
use vsheet::linear_model::{apply_l0, build_blocks, project_x};
use vsheet::sheet::SheetState;
use vsheet::spectral::{FourierCoeffs, PeriodicSamples};

/// A random element of the constrained space for strength `kappa`.
pub fn random_x(rng: &mut StdRng, kappa: f64, n: usize, modes: usize) -> (FourierCoeffs, FourierCoeffs) {
    let mut h1 = FourierCoeffs::zeros(n);
    let mut h2 = FourierCoeffs::zeros(n);
    for j in 1..=modes.min(n / 2 - 1) {
        h1.a[j] = rng.random_range(-1.0..1.0);
        h1.b[j] = rng.random_range(-1.0..1.0);
        h2.a[j] = rng.random_range(-1.0..1.0);
        h2.b[j] = rng.random_range(-1.0..1.0);
    }
    project_x(kappa, &mut h1, &mut h2);
    (h1, h2)
}

/// Worst gap between `apply_l0` and a central finite difference of the
/// limit functionals, over `count` random single-mode directions.
pub fn l0_fd_error(kappa: f64, n: usize, count: usize, seed: u64) -> f64 {
    let mut rng = StdRng::seed_from_u64(seed);
    let op = build_blocks(kappa, n).unwrap();
    let centers = [[0.0, 0.0]];
    let strengths = [kappa];
    let d = DomainModel::UnitDisk;
    let delta = 1e-3;
    let mut worst = 0.0f64;
    for _ in 0..count {
        let j = rng.random_range(1..n / 2);
        let mut h1 = FourierCoeffs::zeros(n);
        let mut h2 = FourierCoeffs::zeros(n);
        h1.a[j] = rng.random_range(-1.0..1.0);
        h1.b[j] = rng.random_range(-1.0..1.0);
        h2.a[j] = rng.random_range(-1.0..1.0);
        h2.b[j] = rng.random_range(-1.0..1.0);
        let (f, g) = (h1.to_samples(n), h2.to_samples(n));
        let eval = |s: f64| {
            (
                functional::eval_f1_limit(d, &centers, &strengths, &f.scale(s), &g.scale(s), 0).unwrap(),
                functional::eval_f2_limit(d, &centers, &strengths, &f.scale(s), &g.scale(s), 0).unwrap(),
            )
        };
        let (p1, p2) = eval(delta);
        let (m1, m2) = eval(-delta);
        let fd1 = p1.sub(&m1).scale(0.5 / delta);
        let fd2 = p2.sub(&m2).scale(0.5 / delta);
        let (o1, o2) = apply_l0(&op, &h1, &h2).unwrap();
        worst = worst
            .max(fd1.sub(&o1.to_samples(n)).sup_norm())
            .max(fd2.sub(&o2.to_samples(n)).sup_norm());
    }
    worst
}

/// Same low-mode perturbation on every sheet, inside the constrained space.
pub fn perturbed(domain: DomainModel, config: &VortexConfig, eps: f64, tau: f64, n: usize, amp: f64) -> SheetState {
    let mut s = SheetState::circles(domain, config, eps, tau, n).unwrap();
    for i in 0..s.m() {
        let k = s.strengths[i];
        let ph = i as f64 * 0.7;
        s.f[i] = PeriodicSamples::from_fn(n, |t| {
            amp * (0.5 * (t + ph).cos() + 0.7 * (2.0 * t).cos() - 0.4 * (3.0 * t + ph).sin())
        });
        s.g[i] = PeriodicSamples::from_fn(n, |t| {
            amp * (-0.5 * k * (t + ph).cos() + 0.6 * (2.0 * t).sin() + 0.3 * (4.0 * t).cos())
        });
    }
    s.validate().unwrap();
    s
}
