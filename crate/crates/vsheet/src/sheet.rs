//! The unknown sheet configuration and its curve geometry.
//!
//! Sheet `i` is `z_i(θ) = x_i + εR_i(θ)(cos θ, sin θ)` with
//! `R_i = 1 + εf_i`, carrying density `(κ_i + εg_i)/(2π|z_i'|)` per unit
//! arclength. The pair `(f_i, g_i)` is kept zero-mean and subject to the
//! mode-1 constraint `low_modes(g_i) = −κ_i low_modes(f_i)`; the fixed kernel
//! direction `(f0_i, g0_i) = (cos θ, κ_i cos θ)` enters with weight `τ`.

use std::f64::consts::PI;
use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::domain::DomainModel;
use crate::error::{Error, Result};
use crate::kirchhoff_routh::VortexConfig;
use crate::spectral::{self, check_grid, FourierCoeffs, PeriodicSamples};
use crate::vec2::{self, Point};

/// Tolerance for the zero-mean and mode-1 membership checks.
pub const MEMBERSHIP_TOL: f64 = 1e-10;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(into = "StateFile", try_from = "StateFile")]
pub struct SheetState {
    pub epsilon: f64,
    pub tau: f64,
    pub domain: DomainModel,
    pub centers: Vec<Point>,
    pub strengths: Vec<f64>,
    pub f: Vec<PeriodicSamples>,
    pub g: Vec<PeriodicSamples>,
    pub f0: Vec<PeriodicSamples>,
    pub g0: Vec<PeriodicSamples>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CurveGeometry {
    pub theta: Vec<f64>,
    pub points: Vec<Point>,
    pub tangents: Vec<Point>,
    pub normals: Vec<Point>,
    pub speed: Vec<f64>,
    pub curvature: Vec<f64>,
}

/// Per-sheet radial geometry of the effective shape, shared by the
/// functional and oracle modules.
#[derive(Debug, Clone)]
pub(crate) struct Radial {
    pub f: Vec<f64>,
    pub fp: Vec<f64>,
    pub fpp: Vec<f64>,
    pub g: Vec<f64>,
    pub cos: Vec<f64>,
    pub sin: Vec<f64>,
}

impl SheetState {
    /// Circular sheets (`f = g = 0`) around the given centers.
    pub fn circles(domain: DomainModel, config: &VortexConfig, epsilon: f64, tau: f64, n: usize) -> Result<Self> {
        check_grid(n)?;
        config.validate(domain)?;
        let m = config.len();
        let cos = PeriodicSamples::from_fn(n, f64::cos);
        Ok(Self {
            epsilon,
            tau,
            domain,
            centers: config.centers.clone(),
            strengths: config.strengths.clone(),
            f: vec![PeriodicSamples::zeros(n); m],
            g: vec![PeriodicSamples::zeros(n); m],
            f0: vec![cos.clone(); m],
            g0: config.strengths.iter().map(|&k| cos.scale(k)).collect(),
        })
    }

    pub fn n(&self) -> usize {
        self.f.first().map_or(0, PeriodicSamples::len)
    }

    pub fn m(&self) -> usize {
        self.centers.len()
    }

    pub fn config(&self) -> VortexConfig {
        VortexConfig::new(self.centers.clone(), self.strengths.clone())
    }

    /// `(f_i + τ f0_i, g_i + τ g0_i)`.
    pub fn effective_shape(&self, i: usize) -> (PeriodicSamples, PeriodicSamples) {
        (
            self.f[i].add(&self.f0[i].scale(self.tau)),
            self.g[i].add(&self.g0[i].scale(self.tau)),
        )
    }

    /// Points of sheet `i` on the grid.
    pub fn points(&self, i: usize) -> Vec<Point> {
        let (f, _) = self.effective_shape(i);
        let n = self.n();
        let eps = self.epsilon;
        (0..n)
            .map(|k| {
                let r = 1.0 + eps * f.values()[k];
                vec2::add(self.centers[i], vec2::scale(eps * r, vec2::unit(spectral::theta(n, k))))
            })
            .collect()
    }

    pub(crate) fn radial(&self, i: usize) -> Radial {
        let (f, g) = self.effective_shape(i);
        let fp = spectral::derivative(&f);
        let fpp = spectral::derivative(&fp);
        let n = self.n();
        Radial {
            cos: (0..n).map(|k| spectral::theta(n, k).cos()).collect(),
            sin: (0..n).map(|k| spectral::theta(n, k).sin()).collect(),
            f: f.into_values(),
            fp: fp.into_values(),
            fpp: fpp.into_values(),
            g: g.into_values(),
        }
    }

    /// Check structural consistency, membership of `(f_i, g_i)` in the
    /// constrained space, and geometric validity.
    pub fn validate(&self) -> Result<()> {
        let m = self.m();
        let n = self.n();
        check_grid(n)?;
        if !self.epsilon.is_finite() || !self.tau.is_finite() {
            return Err(Error::Input("epsilon and tau must be finite".into()));
        }
        for v in [&self.f, &self.g, &self.f0, &self.g0] {
            if v.len() != m || v.iter().any(|s| s.len() != n) {
                return Err(Error::Input("per-sheet sample arrays have inconsistent sizes".into()));
            }
        }
        self.config().validate(self.domain)?;
        for i in 0..m {
            let k = self.strengths[i];
            if spectral::mean(&self.f[i]).abs() > MEMBERSHIP_TOL || spectral::mean(&self.g[i]).abs() > MEMBERSHIP_TOL {
                return Err(Error::State(format!("sheet {i}: f or g has nonzero mean")));
            }
            let (a, b) = spectral::low_modes(&self.f[i]);
            let (c, d) = spectral::low_modes(&self.g[i]);
            if (c + k * a).abs() > MEMBERSHIP_TOL || (d + k * b).abs() > MEMBERSHIP_TOL {
                return Err(Error::State(format!("sheet {i}: mode-1 constraint violated")));
            }
        }
        self.check_geometry()
    }

    /// Geometric validity only: `R > 1/2`, sheets separated by more than
    /// `|ε|`, and every point farther than `|ε|` from the boundary.
    pub fn check_geometry(&self) -> Result<()> {
        let eps = self.epsilon.abs();
        let pts: Vec<Vec<Point>> = (0..self.m()).map(|i| self.points(i)).collect();
        for i in 0..self.m() {
            let (f, _) = self.effective_shape(i);
            if f.values().iter().any(|&v| 1.0 + self.epsilon * v <= 0.5) {
                return Err(Error::State(format!("sheet {i}: radius function drops below 1/2")));
            }
            if pts[i]
                .iter()
                .any(|&p| self.domain.boundary_distance(p) <= eps.max(crate::domain::BOUNDARY_MARGIN))
            {
                return Err(Error::State(format!("sheet {i}: too close to the boundary")));
            }
            for j in i + 1..self.m() {
                for &p in &pts[i] {
                    for &q in &pts[j] {
                        if vec2::norm(vec2::sub(p, q)) <= eps {
                            return Err(Error::State(format!("sheets {i} and {j} are not separated")));
                        }
                    }
                }
            }
        }
        Ok(())
    }

    pub fn curve_geometry(&self, i: usize) -> Result<CurveGeometry> {
        if self.epsilon <= 0.0 {
            return Err(Error::State("curve geometry requires epsilon > 0".into()));
        }
        let eps = self.epsilon;
        let r = self.radial(i);
        let pts = self.points(i);
        let n = self.n();
        let mut geo = CurveGeometry {
            theta: (0..n).map(|k| spectral::theta(n, k)).collect(),
            points: pts,
            tangents: Vec::with_capacity(n),
            normals: Vec::with_capacity(n),
            speed: Vec::with_capacity(n),
            curvature: Vec::with_capacity(n),
        };
        for k in 0..n {
            let rr = 1.0 + eps * r.f[k];
            let r1 = eps * r.fp[k];
            let r2 = eps * r.fpp[k];
            let q = (rr * rr + r1 * r1).sqrt();
            if q <= 0.0 || !q.is_finite() {
                return Err(Error::State(format!("sheet {i}: degenerate speed")));
            }
            let e = [r.cos[k], r.sin[k]];
            let ep = [-r.sin[k], r.cos[k]];
            let t = vec2::scale(1.0 / q, vec2::add(vec2::scale(r1, e), vec2::scale(rr, ep)));
            geo.tangents.push(t);
            geo.normals.push(vec2::perp(t));
            geo.speed.push(eps * q);
            geo.curvature
                .push((rr * rr + 2.0 * r1 * r1 - rr * r2) / (q * q * q) / eps);
        }
        Ok(geo)
    }

    /// `∫ γ_i |z_i'| dα = κ_i + ε·mean(g_i)`.
    pub fn circulation(&self, i: usize) -> f64 {
        let (_, g) = self.effective_shape(i);
        self.strengths[i] + self.epsilon * spectral::mean(&g)
    }

    /// Strictly positive curvature at every grid point.
    pub fn convexity_check(&self, i: usize) -> Result<bool> {
        Ok(self.curve_geometry(i)?.curvature.iter().all(|&c| c > 0.0))
    }

    /// Resample every periodic field on a finer grid.
    pub fn refine(&self, n_fine: usize) -> Result<Self> {
        check_grid(n_fine)?;
        let pad = |v: &Vec<PeriodicSamples>| v.iter().map(|s| s.zero_pad(n_fine)).collect();
        Ok(Self {
            f: pad(&self.f),
            g: pad(&self.g),
            f0: pad(&self.f0),
            g0: pad(&self.g0),
            ..self.clone()
        })
    }

    /// CSV with columns `sheet,theta,x,y,gamma_speed,curvature`, where
    /// `gamma_speed = γ|z'| = (κ + εg)/(2π)`.
    pub fn curve_csv(&self) -> Result<String> {
        let mut out = String::from("sheet,theta,x,y,gamma_speed,curvature\n");
        for i in 0..self.m() {
            let geo = self.curve_geometry(i)?;
            let (_, g) = self.effective_shape(i);
            for k in 0..self.n() {
                let density = (self.strengths[i] + self.epsilon * g.values()[k]) / (2.0 * PI);
                let p = geo.points[k];
                writeln!(
                    out,
                    "{i},{},{},{},{},{}",
                    geo.theta[k], p[0], p[1], density, geo.curvature[k]
                )
                .expect("writing to a String cannot fail");
            }
        }
        Ok(out)
    }

    pub fn to_file(&self) -> StateFile {
        StateFile {
            epsilon: self.epsilon,
            tau: self.tau,
            domain: self.domain,
            n: self.n(),
            sheets: (0..self.m())
                .map(|i| SheetFile {
                    center: self.centers[i],
                    strength: self.strengths[i],
                    f: self.f[i].coeffs(),
                    g: self.g[i].coeffs(),
                })
                .collect(),
        }
    }

    pub fn from_file(file: &StateFile) -> Result<Self> {
        check_grid(file.n)?;
        let config = VortexConfig::new(
            file.sheets.iter().map(|s| s.center).collect(),
            file.sheets.iter().map(|s| s.strength).collect(),
        );
        let mut state = Self::circles(file.domain, &config, file.epsilon, file.tau, file.n)?;
        for (i, s) in file.sheets.iter().enumerate() {
            for c in [&s.f, &s.g] {
                if c.a.len() != c.b.len() || c.a.is_empty() {
                    return Err(Error::Input(format!("sheet {i}: malformed coefficient arrays")));
                }
            }
            state.f[i] = s.f.to_samples(file.n);
            state.g[i] = s.g.to_samples(file.n);
        }
        state.validate()?;
        Ok(state)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(&self.to_file()).expect("state serialization cannot fail")
    }

    pub fn from_json(s: &str) -> Result<Self> {
        let file: StateFile = serde_json::from_str(s).map_err(|e| Error::Input(format!("bad state file: {e}")))?;
        Self::from_file(&file)
    }
}

impl From<SheetState> for StateFile {
    fn from(s: SheetState) -> Self {
        s.to_file()
    }
}

impl TryFrom<StateFile> for SheetState {
    type Error = Error;

    fn try_from(f: StateFile) -> Result<Self> {
        SheetState::from_file(&f)
    }
}

/// Serialized form of a [`SheetState`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StateFile {
    pub epsilon: f64,
    pub tau: f64,
    pub domain: DomainModel,
    pub n: usize,
    pub sheets: Vec<SheetFile>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SheetFile {
    pub center: Point,
    pub strength: f64,
    pub f: FourierCoeffs,
    pub g: FourierCoeffs,
}
