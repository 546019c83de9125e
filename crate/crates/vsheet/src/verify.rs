//! Independent residual oracles.
//!
//! Nothing here touches the kernel splitting of [`crate::functional`]: the
//! Birkhoff-Rott velocity is summed directly from its definition, with the
//! singular self-interaction handled by the alternating-point trapezoid rule
//! (only nodes at odd offsets from the target, doubled weight).

use std::f64::consts::PI;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::kirchhoff_routh::VortexConfig;
use crate::sheet::SheetState;
use crate::spectral::{self, PeriodicSamples};
use crate::vec2::{self, Point};

/// Birkhoff-Rott velocity on sheet `i` at the grid nodes `targets`:
///
/// `BR(z) = Σ_j ∫ [ (1/2π) (z − w)⊥/|z − w|² + ∇ₓ⊥H(z, w) ] dω_j(w)`.
pub fn br_velocity(state: &SheetState, i: usize, targets: &[usize]) -> Result<Vec<Point>> {
    let n = state.n();
    if !n.is_multiple_of(2) {
        return Err(Error::Input("alternating-point rule needs an even grid".into()));
    }
    if state.epsilon <= 0.0 {
        return Err(Error::Input("oracle requires epsilon > 0".into()));
    }
    if i >= state.m() || targets.iter().any(|&k| k >= n) {
        return Err(Error::Input("sheet or target index out of range".into()));
    }
    state.check_geometry()?;
    let pts: Vec<Vec<Point>> = (0..state.m()).map(|j| state.points(j)).collect();
    // dω_j = (κ_j + εg_j(α)) dα / (2π)
    let weights: Vec<Vec<f64>> = (0..state.m())
        .map(|j| {
            let (_, g) = state.effective_shape(j);
            g.values()
                .iter()
                .map(|&v| (state.strengths[j] + state.epsilon * v) / n as f64)
                .collect()
        })
        .collect();
    let d = state.domain;
    Ok(targets
        .par_iter()
        .map(|&k| {
            let z = pts[i][k];
            let mut v = [0.0, 0.0];
            for j in 0..state.m() {
                for l in 0..n {
                    let w = weights[j][l];
                    if j != i {
                        let dz = vec2::sub(z, pts[j][l]);
                        v = vec2::add(v, vec2::scale(w / (2.0 * PI * vec2::norm2(dz)), vec2::perp(dz)));
                    } else if (k + n - l) % 2 == 1 {
                        let dz = vec2::sub(z, pts[j][l]);
                        v = vec2::add(v, vec2::scale(2.0 * w / (2.0 * PI * vec2::norm2(dz)), vec2::perp(dz)));
                    }
                    let gh = d.grad_h_raw(z, pts[j][l]);
                    v = vec2::add(v, vec2::scale(w, vec2::perp(gh)));
                }
            }
            v
        })
        .collect())
}

/// Pointwise oracle residuals of one sheet: `BR·n` and
/// `(I − P₀)[(BR·s) γ]` with `γ` the density per unit arclength.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SheetResidual {
    pub normal: Vec<f64>,
    pub tangential: Vec<f64>,
}

pub fn residual_samples(state: &SheetState) -> Result<Vec<SheetResidual>> {
    let n = state.n();
    let all: Vec<usize> = (0..n).collect();
    (0..state.m())
        .map(|i| {
            let v = br_velocity(state, i, &all)?;
            let geo = state.curve_geometry(i)?;
            let (_, g) = state.effective_shape(i);
            let normal = (0..n).map(|k| vec2::dot(v[k], geo.normals[k])).collect();
            let slip: Vec<f64> = (0..n)
                .map(|k| {
                    let gamma = (state.strengths[i] + state.epsilon * g.values()[k]) / (2.0 * PI * geo.speed[k]);
                    vec2::dot(v[k], geo.tangents[k]) * gamma
                })
                .collect();
            let tangential = spectral::project_zero_mean(&PeriodicSamples::new(slip)?).into_values();
            Ok(SheetResidual { normal, tangential })
        })
        .collect()
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SheetReport {
    pub normal: f64,
    pub tangential: f64,
    pub normal_error: f64,
    pub tangential_error: f64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ResidualReport {
    pub n: usize,
    pub sheets: Vec<SheetReport>,
}

impl ResidualReport {
    /// Largest residual over sheets and both equations.
    pub fn max_residual(&self) -> f64 {
        self.sheets.iter().fold(0.0, |m, s| m.max(s.normal).max(s.tangential))
    }

    /// Largest N-versus-2N discrepancy.
    pub fn max_error(&self) -> f64 {
        self.sheets
            .iter()
            .fold(0.0, |m, s| m.max(s.normal_error).max(s.tangential_error))
    }
}

fn sup(v: &[f64]) -> f64 {
    v.iter().fold(0.0, |m, x| m.max(x.abs()))
}

/// Sup-norm oracle residuals on the state's grid, with the error estimated by
/// re-evaluating on the spectrally refined 2N grid.
pub fn direct_residual(state: &SheetState) -> Result<ResidualReport> {
    let coarse = residual_samples(state)?;
    let fine = residual_samples(&state.refine(2 * state.n())?)?;
    let sheets = coarse
        .iter()
        .zip(&fine)
        .map(|(c, f)| {
            let gap = |a: &[f64], b: &[f64]| (0..a.len()).fold(0.0f64, |m, k| m.max((a[k] - b[2 * k]).abs()));
            SheetReport {
                normal: sup(&c.normal),
                tangential: sup(&c.tangential),
                normal_error: gap(&c.normal, &f.normal),
                tangential_error: gap(&c.tangential, &f.tangential),
            }
        })
        .collect();
    Ok(ResidualReport { n: state.n(), sheets })
}

/// Worst errors of the four Hilbert / half-Laplacian identities
/// `⨍ cos(jα) sin(θ−α)/A = ½ sin(jθ)`, `⨍ sin(jα) sin(θ−α)/A = −½ cos(jθ)`,
/// `⨍ (cos jθ − cos jα)/A = (j/2) cos jθ`, `⨍ (sin jθ − sin jα)/A = (j/2) sin jθ`,
/// for `j = 0..=j_max`; at `j = 0` every integral is zero.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct KernelIdentityReport {
    /// Direct quadrature against the closed forms.
    pub quadrature_error: f64,
    /// Spectral multipliers against the closed forms.
    pub spectral_error: f64,
}

impl KernelIdentityReport {
    pub fn max_error(&self) -> f64 {
        self.quadrature_error.max(self.spectral_error)
    }
}

pub fn kernel_identity_check(n: usize, j_max: usize) -> Result<KernelIdentityReport> {
    spectral::check_grid(n)?;
    let nf = n as f64;
    let a_of = |o: usize| 4.0 * (PI * o as f64 / nf).sin().powi(2);
    let s_of = |o: usize| (2.0 * PI * o as f64 / nf).sin();
    let mut quad = 0.0f64;
    let mut spec = 0.0f64;
    for j in 0..=j_max {
        let jf = j as f64;
        let cj = PeriodicSamples::from_fn(n, |t| (jf * t).cos());
        let sj = PeriodicSamples::from_fn(n, |t| (jf * t).sin());
        let transformed = [
            spectral::hilbert(&cj),
            spectral::hilbert(&sj),
            spectral::half_laplacian(&cj),
            spectral::half_laplacian(&sj),
        ];
        for k in 0..n {
            let th = spectral::theta(n, k);
            let (mut i44, mut i45, mut i46, mut i47) = (0.0, 0.0, 0.0, 0.0);
            for o in 0..n {
                let alpha = th - 2.0 * PI * o as f64 / nf;
                if o % 2 == 1 {
                    let kern = s_of(o) / a_of(o);
                    i44 += 2.0 * (jf * alpha).cos() * kern;
                    i45 += 2.0 * (jf * alpha).sin() * kern;
                }
                // (2u(θ) − u(θ+s) − u(θ−s)) / (2A(s)), diagonal −u''(θ)/2
                let sym = if o == 0 {
                    jf * jf / 2.0
                } else {
                    (1.0 - (jf * 2.0 * PI * o as f64 / nf).cos()) / a_of(o)
                };
                i46 += sym * (jf * th).cos();
                i47 += sym * (jf * th).sin();
            }
            let exact = [
                0.5 * (jf * th).sin(),
                if j == 0 { 0.0 } else { -0.5 * (jf * th).cos() },
                0.5 * jf * (jf * th).cos(),
                0.5 * jf * (jf * th).sin(),
            ];
            let got = [i44 / nf, i45 / nf, i46 / nf, i47 / nf];
            for (e, g) in exact.iter().zip(got) {
                quad = quad.max((e - g).abs());
            }
            for (e, t) in exact.iter().zip(&transformed) {
                spec = spec.max((e - 0.5 * t.values()[k]).abs());
            }
        }
    }
    Ok(KernelIdentityReport {
        quadrature_error: quad,
        spectral_error: spec,
    })
}

/// First moment `∫ z dω_i` of sheet `i`.
pub fn first_moment(state: &SheetState, i: usize) -> Point {
    let pts = state.points(i);
    let (_, g) = state.effective_shape(i);
    let n = state.n() as f64;
    pts.iter().zip(g.values()).fold([0.0, 0.0], |acc, (&p, &gv)| {
        vec2::add(acc, vec2::scale((state.strengths[i] + state.epsilon * gv) / n, p))
    })
}

/// Least-squares slope of `ln y` against `ln x`.
pub fn loglog_slope(xs: &[f64], ys: &[f64]) -> f64 {
    let lx: Vec<f64> = xs.iter().map(|x| x.ln()).collect();
    let ly: Vec<f64> = ys.iter().map(|y| y.ln()).collect();
    let n = lx.len() as f64;
    let mx = lx.iter().sum::<f64>() / n;
    let my = ly.iter().sum::<f64>() / n;
    let sxy: f64 = lx.iter().zip(&ly).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = lx.iter().map(|x| (x - mx).powi(2)).sum();
    sxy / sxx
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct LimitFit {
    pub epsilons: Vec<f64>,
    /// Largest `|x_{ε,i} − x_{0,i}|` over sheets.
    pub center_offset: Vec<f64>,
    /// Largest `‖f_i‖_∞` over sheets.
    pub shape_norm: Vec<f64>,
    /// Largest `|∫ z dω_i − κ_i x_{0,i}|` over sheets.
    pub moment_error: Vec<f64>,
    /// Largest `|circulation − κ_i|` over all states.
    pub circulation_error: f64,
    pub center_slope: f64,
    pub shape_slope: f64,
    pub moment_slope: f64,
}

/// Fit the approach of solved states to the point-vortex configuration `x0`.
pub fn point_vortex_limit_check(states: &[SheetState], x0: &VortexConfig) -> Result<LimitFit> {
    if states.len() < 3 {
        return Err(Error::Input("at least three solved states are needed for a fit".into()));
    }
    let mut fit = LimitFit {
        epsilons: Vec::new(),
        center_offset: Vec::new(),
        shape_norm: Vec::new(),
        moment_error: Vec::new(),
        circulation_error: 0.0,
        center_slope: 0.0,
        shape_slope: 0.0,
        moment_slope: 0.0,
    };
    for s in states {
        if s.m() != x0.len() {
            return Err(Error::Input("state and configuration differ in vortex count".into()));
        }
        let (mut off, mut shape, mut mom) = (0.0f64, 0.0f64, 0.0f64);
        for i in 0..s.m() {
            off = off.max(vec2::norm(vec2::sub(s.centers[i], x0.centers[i])));
            shape = shape.max(s.f[i].sup_norm());
            let target = vec2::scale(x0.strengths[i], x0.centers[i]);
            mom = mom.max(vec2::norm(vec2::sub(first_moment(s, i), target)));
            fit.circulation_error = fit.circulation_error.max((s.circulation(i) - s.strengths[i]).abs());
        }
        fit.epsilons.push(s.epsilon);
        fit.center_offset.push(off);
        fit.shape_norm.push(shape);
        fit.moment_error.push(mom);
    }
    fit.center_slope = loglog_slope(&fit.epsilons, &fit.center_offset);
    fit.shape_slope = loglog_slope(&fit.epsilons, &fit.shape_norm);
    fit.moment_slope = loglog_slope(&fit.epsilons, &fit.moment_error);
    Ok(fit)
}
