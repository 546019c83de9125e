//! Stationarity residuals `F1` (normal) and `F2` (projected tangential) of
//! every sheet, evaluated with the singular self-interaction split into an
//! exact Hilbert / half-Laplacian part plus a smooth remainder.
//!
//! With `BR` the Birkhoff-Rott velocity at `z_i(θ)`, `t = z_i'/ε`, `R = 1 + εf`
//! and `g̃ = κ + εg`,
//!
//! ```text
//! F1 = 2π BR·t⊥ / R,   F2 = (I − P₀)[ 2π (BR·t) g̃ / |t|² ].
//! ```
//!
//! Writing `A = 4 sin²((θ−α)/2)` and `A + εB = |Re − R̃ẽ|²`, the self terms use
//! `1/(A + εB) = 1/(|t|²A) + εβ`. The `1/A` part is applied spectrally and
//! every remaining trapezoid integrand is smooth once its diagonal entry is
//! replaced by the analytic limit:
//!
//! ```text
//! β = [R(f − f̃) + ε(f'² − (f − f̃)²/A)] / (|t|²(A + εB))
//! sin(θ−α)·β      → f'(R + εf'')/|t|⁴
//! (f − f̃)·β       → f'²(R + εf'')/|t|⁴
//! A/(A + εB)      → 1/|t|²
//! B/(A + εB)      → (2f + ε(f² + f'²))/|t|²
//! ```
//!
//! All formulas stay finite at `ε = 0` and for slightly negative `ε`.

use std::f64::consts::PI;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::domain::DomainModel;
use crate::error::{Error, Result};
use crate::sheet::{Radial, SheetState};
use crate::spectral::{self, PeriodicSamples};
use crate::vec2::{self, Point};

/// Most negative ε accepted (two-sided difference quotients at ε = 0).
pub const EPSILON_FLOOR: f64 = -0.05;

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct FunctionalValue {
    pub f1: Vec<PeriodicSamples>,
    pub f2: Vec<PeriodicSamples>,
    /// Per sheet `(⨍F1 cos, ⨍F1 sin, ⨍F2 cos, ⨍F2 sin)`.
    pub mode1: Vec<[f64; 4]>,
    pub sup_norm: f64,
}

/// Both residuals of every sheet.
pub fn evaluate(state: &SheetState) -> Result<FunctionalValue> {
    check_state(state)?;
    let pairs: Vec<(PeriodicSamples, PeriodicSamples)> = if state.epsilon == 0.0 {
        (0..state.m()).map(|i| limit_pair(state, i)).collect::<Result<_>>()?
    } else {
        let radials: Vec<Radial> = (0..state.m()).map(|i| state.radial(i)).collect();
        (0..state.m()).map(|i| sheet_pair(state, &radials, i)).collect()
    };
    Ok(assemble(pairs))
}

pub fn eval_f1(state: &SheetState, i: usize) -> Result<PeriodicSamples> {
    Ok(single(state, i)?.0)
}

pub fn eval_f2(state: &SheetState, i: usize) -> Result<PeriodicSamples> {
    Ok(single(state, i)?.1)
}

fn single(state: &SheetState, i: usize) -> Result<(PeriodicSamples, PeriodicSamples)> {
    check_state(state)?;
    if i >= state.m() {
        return Err(Error::Input(format!("sheet index {i} out of range")));
    }
    if state.epsilon == 0.0 {
        return limit_pair(state, i);
    }
    let radials: Vec<Radial> = (0..state.m()).map(|j| state.radial(j)).collect();
    Ok(sheet_pair(state, &radials, i))
}

fn assemble(pairs: Vec<(PeriodicSamples, PeriodicSamples)>) -> FunctionalValue {
    let mut fv = FunctionalValue {
        f1: Vec::with_capacity(pairs.len()),
        f2: Vec::with_capacity(pairs.len()),
        mode1: Vec::with_capacity(pairs.len()),
        sup_norm: 0.0,
    };
    for (f1, f2) in pairs {
        fv.sup_norm = fv.sup_norm.max(f1.sup_norm()).max(f2.sup_norm());
        fv.mode1.push(mode1_of(&f1, &f2));
        fv.f1.push(f1);
        fv.f2.push(f2);
    }
    fv
}

fn check_state(state: &SheetState) -> Result<()> {
    if state.epsilon < EPSILON_FLOOR {
        return Err(Error::Input(format!("epsilon {} below {EPSILON_FLOOR}", state.epsilon)));
    }
    state.check_geometry()
}

fn mode1_of(f1: &PeriodicSamples, f2: &PeriodicSamples) -> [f64; 4] {
    let (c1, s1) = spectral::low_modes(f1);
    let (c2, s2) = spectral::low_modes(f2);
    [c1 / 2.0, s1 / 2.0, c2 / 2.0, s2 / 2.0]
}

/// `(⨍F1 cos θ, ⨍F1 sin θ, ⨍F2 cos θ, ⨍F2 sin θ)` for sheet `i`.
pub fn mode1_extract(fv: &FunctionalValue, i: usize) -> [f64; 4] {
    fv.mode1[i]
}

fn limit_pair(state: &SheetState, i: usize) -> Result<(PeriodicSamples, PeriodicSamples)> {
    let (f, g) = state.effective_shape(i);
    Ok((
        eval_f1_limit(state.domain, &state.centers, &state.strengths, &f, &g, i)?,
        eval_f2_limit(state.domain, &state.centers, &state.strengths, &f, &g, i)?,
    ))
}

/// `P_i = Σ_{j≠i} κ_j ∇ₓG(x_i, x_j) − κ_i ∇ₓH(x_i, x_i)`, so that
/// `∂_{x_i}W = −2κ_i P_i`.
fn point_force(d: DomainModel, centers: &[Point], strengths: &[f64], i: usize) -> Result<Point> {
    if centers.len() != strengths.len() || i >= centers.len() {
        return Err(Error::Input("inconsistent vortex data".into()));
    }
    let mut p = vec2::scale(-strengths[i], d.grad_h_x(centers[i], centers[i])?);
    for j in 0..centers.len() {
        if j != i {
            p = vec2::add(p, vec2::scale(strengths[j], d.grad_green_x(centers[i], centers[j])?));
        }
    }
    Ok(p)
}

/// `F1` at `ε = 0`: `½ H[g] + (κ/2) f' − 2π P_i·(−sin θ, cos θ)`.
pub fn eval_f1_limit(
    d: DomainModel,
    centers: &[Point],
    strengths: &[f64],
    f: &PeriodicSamples,
    g: &PeriodicSamples,
    i: usize,
) -> Result<PeriodicSamples> {
    let p = point_force(d, centers, strengths, i)?;
    let k = strengths[i];
    let n = f.len();
    let fp = spectral::derivative(f);
    let hg = spectral::hilbert(g);
    Ok(
        PeriodicSamples::from_fn(n, |t| 2.0 * PI * (p[0] * t.sin() - p[1] * t.cos()))
            .add(&hg.scale(0.5))
            .add(&fp.scale(0.5 * k)),
    )
}

/// `F2` at `ε = 0`: `(I − P₀)[κ² f − (κ²/2)|D| f − (κ/2) g + 2πκ P_i·(cos θ, sin θ)]`.
pub fn eval_f2_limit(
    d: DomainModel,
    centers: &[Point],
    strengths: &[f64],
    f: &PeriodicSamples,
    g: &PeriodicSamples,
    i: usize,
) -> Result<PeriodicSamples> {
    let p = point_force(d, centers, strengths, i)?;
    let k = strengths[i];
    let n = f.len();
    let hf = spectral::half_laplacian(f);
    let raw = PeriodicSamples::from_fn(n, |t| 2.0 * PI * k * (p[0] * t.cos() + p[1] * t.sin()))
        .add(&f.scale(k * k))
        .sub(&hf.scale(0.5 * k * k))
        .sub(&g.scale(0.5 * k));
    Ok(spectral::project_zero_mean(&raw))
}

/// Per-row quadrature sums for one target point.
#[derive(Default, Clone, Copy)]
struct RowSums {
    rho: f64,
    half_a: f64,
    sigma: f64,
    b_ratio: f64,
    cross_n: f64,
    cross_t: f64,
    h_n: f64,
    h_t: f64,
}

fn sheet_pair(state: &SheetState, radials: &[Radial], i: usize) -> (PeriodicSamples, PeriodicSamples) {
    let n = state.n();
    let eps = state.epsilon;
    let kappa = state.strengths[i];
    let ri = &radials[i];
    let d = state.domain;

    let offs_sin: Vec<f64> = (0..n).map(|o| (2.0 * PI * o as f64 / n as f64).sin()).collect();
    let offs_a: Vec<f64> = (0..n).map(|o| 4.0 * (PI * o as f64 / n as f64).sin().powi(2)).collect();

    let point = |j: usize, l: usize| -> Point {
        let r = &radials[j];
        let rr = 1.0 + eps * r.f[l];
        [
            state.centers[j][0] + eps * rr * r.cos[l],
            state.centers[j][1] + eps * rr * r.sin[l],
        ]
    };
    let pts: Vec<Vec<Point>> = (0..state.m()).map(|j| (0..n).map(|l| point(j, l)).collect()).collect();
    let dens: Vec<Vec<f64>> = (0..state.m())
        .map(|j| radials[j].g.iter().map(|&gl| state.strengths[j] + eps * gl).collect())
        .collect();

    let rows: Vec<RowSums> = (0..n)
        .into_par_iter()
        .map(|k| {
            let fk = ri.f[k];
            let fpk = ri.fp[k];
            let rk = 1.0 + eps * fk;
            let t2 = rk * rk + eps * eps * fpk * fpk;
            let tk = [
                eps * fpk * ri.cos[k] - rk * ri.sin[k],
                eps * fpk * ri.sin[k] + rk * ri.cos[k],
            ];
            let mut s = RowSums::default();
            for l in 0..n {
                let rl = 1.0 + eps * ri.f[l];
                let rg = rl * dens[i][l];
                if l == k {
                    let w = (rk + eps * ri.fpp[k]) / (t2 * t2);
                    s.rho += fpk * w * rg;
                    s.sigma += fpk * fpk * w * dens[i][l];
                    s.half_a += 0.5 / t2 * rg;
                    s.b_ratio += (2.0 * fk + eps * (fk * fk + fpk * fpk)) / t2 * rg;
                    continue;
                }
                let o = (k + n - l) % n;
                let a = offs_a[o];
                let df = fk - ri.f[l];
                let q = df * df / a;
                let denom = eps * eps * q + rk * rl;
                let beta = (rk * df + eps * (fpk * fpk - q)) / (t2 * a * denom);
                s.rho += offs_sin[o] * beta * rg;
                s.sigma += df * beta * dens[i][l];
                s.half_a += 0.5 / denom * rg;
                s.b_ratio += (eps * q + fk + ri.f[l] + eps * fk * ri.f[l]) / denom * rg;
            }
            let zk = pts[i][k];
            for j in 0..state.m() {
                for l in 0..n {
                    let gl = dens[j][l];
                    if j != i {
                        let dz = vec2::sub(zk, pts[j][l]);
                        let r2 = vec2::norm2(dz);
                        s.cross_n += vec2::dot(dz, tk) / r2 * gl;
                        s.cross_t += vec2::dot(vec2::perp(dz), tk) / r2 * gl;
                    }
                    if d != DomainModel::FreePlane {
                        let gh = d.grad_h_raw(zk, pts[j][l]);
                        s.h_n += vec2::dot(gh, tk) * gl;
                        s.h_t += vec2::dot(vec2::perp(gh), tk) * gl;
                    }
                }
            }
            s
        })
        .collect();

    let nf = n as f64;
    let f = PeriodicSamples::new(ri.f.clone()).expect("grid validated");
    let g = PeriodicSamples::new(ri.g.clone()).expect("grid validated");
    let fg = f.mul(&g);
    let q = f.scale(kappa).add(&g).add(&fg.scale(eps));
    let hq = spectral::hilbert(&q);
    let lap = spectral::half_laplacian(&f)
        .scale(kappa)
        .add(&spectral::half_laplacian(&fg).scale(eps))
        .sub(&f.mul(&spectral::half_laplacian(&g)).scale(eps));
    let mean_fg = spectral::mean(&fg);

    let mut f1 = Vec::with_capacity(n);
    let mut f2 = Vec::with_capacity(n);
    for (k, s) in rows.iter().enumerate() {
        let fk = ri.f[k];
        let fpk = ri.fp[k];
        let gk = ri.g[k];
        let rk = 1.0 + eps * fk;
        let t2 = rk * rk + eps * eps * fpk * fpk;
        let gt = kappa + eps * gk;

        let f11 = hq.values()[k] / (2.0 * t2) + s.rho / nf;
        let f12 = fpk / rk * s.half_a / nf;
        let tt = lap.values()[k] / (2.0 * t2) + eps * s.sigma / nf;
        let f13 = eps * fpk * tt / rk;
        let f1415 = s.cross_n / (nf * rk);
        let f16 = 2.0 * PI * s.h_n / (nf * rk);
        f1.push(f11 + f12 + f13 + f1415 + f16);

        let f21 = gt * fpk * eps * f11 / t2;
        let f22 = -0.5 * kappa * (gk - kappa * fk + eps * (fk * gk - kappa * (fk * fk + fpk * fpk))) / t2
            - gt * rk / (2.0 * t2) * (eps * mean_fg - s.b_ratio / nf);
        let f23 = -gt * rk * tt / t2;
        let f2425 = gt / t2 * s.cross_t / nf;
        let f26 = 2.0 * PI * gt / t2 * s.h_t / nf;
        f2.push(f21 + f22 + f23 + f2425 + f26);
    }
    let f1 = PeriodicSamples::new(f1).expect("finite residual");
    let f2 = spectral::project_zero_mean(&PeriodicSamples::new(f2).expect("finite residual"));
    (f1, f2)
}
