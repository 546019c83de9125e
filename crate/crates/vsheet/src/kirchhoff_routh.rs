//! The Kirchhoff-Routh function
//! `W(x) = −Σ_{i≠j} κ_iκ_j G(x_i, x_j) + Σ_i κ_i² H(x_i, x_i)`
//! (ordered pairs), its derivatives, and a damped Newton search for
//! critical points.
//!
//! Continuous symmetries of the domain (rotation of the disk, horizontal
//! translation of the half-plane, rigid motions of the plane) make every
//! critical point degenerate along their orbits. Newton steps and the
//! nondegeneracy verdict therefore work on the orthogonal complement of the
//! symmetry generators at the current point.

use log::debug;
use nalgebra::{DMatrix, DVector, SymmetricEigen};
use serde::{Deserialize, Serialize};

use crate::domain::DomainModel;
use crate::error::{Error, Result};
use crate::vec2::{self, Point};

/// Minimum separation accepted by [`VortexConfig::validate`].
pub const MIN_SEPARATION: f64 = 1e-6;
/// Finite-difference step for [`hess_w`].
pub const HESSIAN_STEP: f64 = 1e-5;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VortexConfig {
    pub centers: Vec<Point>,
    pub strengths: Vec<f64>,
}

impl VortexConfig {
    pub fn new(centers: Vec<Point>, strengths: Vec<f64>) -> Self {
        Self { centers, strengths }
    }

    pub fn len(&self) -> usize {
        self.centers.len()
    }

    pub fn is_empty(&self) -> bool {
        self.centers.is_empty()
    }

    pub fn validate(&self, d: DomainModel) -> Result<()> {
        if self.centers.is_empty() {
            return Err(Error::Input("at least one vortex is required".into()));
        }
        if self.centers.len() != self.strengths.len() {
            return Err(Error::Input("centers and strengths differ in length".into()));
        }
        if let Some(k) = self.strengths.iter().find(|k| **k == 0.0 || !k.is_finite()) {
            return Err(Error::Input(format!("invalid vortex strength {k}")));
        }
        for &x in &self.centers {
            d.check_point(x)?;
        }
        if min_separation(&self.centers) <= MIN_SEPARATION {
            return Err(Error::Input("vortex centers are not distinct".into()));
        }
        Ok(())
    }

    /// Centers flattened as `(x₁₁, x₁₂, x₂₁, …)`.
    pub fn flat(&self) -> DVector<f64> {
        DVector::from_iterator(2 * self.len(), self.centers.iter().flat_map(|c| [c[0], c[1]]))
    }

    pub fn with_flat(&self, v: &DVector<f64>) -> Self {
        Self {
            centers: (0..self.len()).map(|i| [v[2 * i], v[2 * i + 1]]).collect(),
            strengths: self.strengths.clone(),
        }
    }
}

fn min_separation(centers: &[Point]) -> f64 {
    let mut best = f64::INFINITY;
    for i in 0..centers.len() {
        for j in i + 1..centers.len() {
            best = best.min(vec2::norm(vec2::sub(centers[i], centers[j])));
        }
    }
    best
}

pub fn eval_w(d: DomainModel, c: &VortexConfig) -> Result<f64> {
    c.validate(d)?;
    let m = c.len();
    let mut w = 0.0;
    for i in 0..m {
        for j in 0..m {
            if i != j {
                w -= c.strengths[i] * c.strengths[j] * d.green(c.centers[i], c.centers[j])?;
            }
        }
        w += c.strengths[i] * c.strengths[i] * d.robin(c.centers[i])?;
    }
    Ok(w)
}

/// `∂_{x_i}W = −2κ_i Σ_{j≠i} κ_j ∇ₓG(x_i, x_j) + 2κ_i² ∇ₓH(x_i, x_i)`.
pub fn grad_w(d: DomainModel, c: &VortexConfig) -> Result<DVector<f64>> {
    c.validate(d)?;
    let m = c.len();
    let mut g = DVector::zeros(2 * m);
    for i in 0..m {
        let ki = c.strengths[i];
        let mut gi = vec2::scale(ki * ki, d.grad_robin(c.centers[i])?);
        for j in 0..m {
            if j != i {
                let gg = d.grad_green_x(c.centers[i], c.centers[j])?;
                gi = vec2::add(gi, vec2::scale(-2.0 * ki * c.strengths[j], gg));
            }
        }
        g[2 * i] = gi[0];
        g[2 * i + 1] = gi[1];
    }
    Ok(g)
}

/// Central differences of [`grad_w`], before symmetrization.
pub fn hess_w_unsymmetrized(d: DomainModel, c: &VortexConfig) -> Result<DMatrix<f64>> {
    c.validate(d)?;
    let n = 2 * c.len();
    let x = c.flat();
    let mut h = DMatrix::zeros(n, n);
    for k in 0..n {
        let mut xp = x.clone();
        let mut xm = x.clone();
        xp[k] += HESSIAN_STEP;
        xm[k] -= HESSIAN_STEP;
        let col = (grad_w(d, &c.with_flat(&xp))? - grad_w(d, &c.with_flat(&xm))?) / (2.0 * HESSIAN_STEP);
        h.set_column(k, &col);
    }
    Ok(h)
}

pub fn hess_w(d: DomainModel, c: &VortexConfig) -> Result<DMatrix<f64>> {
    let h = hess_w_unsymmetrized(d, c)?;
    Ok((&h + h.transpose()) * 0.5)
}

/// Orthonormal basis of the infinitesimal symmetries of `W` at `c`.
pub fn symmetry_generators(d: DomainModel, c: &VortexConfig) -> Vec<DVector<f64>> {
    let m = c.len();
    let rotation = DVector::from_iterator(
        2 * m,
        c.centers.iter().flat_map(|x| {
            let r = vec2::perp(*x);
            [r[0], r[1]]
        }),
    );
    let shift = |axis: usize| DVector::from_fn(2 * m, |k, _| if k % 2 == axis { 1.0 } else { 0.0 });
    let raw = match d {
        DomainModel::FreePlane => vec![shift(0), shift(1), rotation],
        DomainModel::UnitDisk => vec![rotation],
        DomainModel::HalfPlane => vec![shift(0)],
    };
    let mut basis: Vec<DVector<f64>> = Vec::new();
    for mut v in raw {
        for b in &basis {
            let p = b.dot(&v);
            v -= b * p;
        }
        let n = v.norm();
        if n > 1e-10 * (2 * m) as f64 {
            basis.push(v / n);
        }
    }
    basis
}

/// Orthonormal basis (as columns) of the complement of the symmetry orbit.
pub fn symmetry_complement(d: DomainModel, c: &VortexConfig) -> DMatrix<f64> {
    let n = 2 * c.len();
    let mut proj = DMatrix::<f64>::identity(n, n);
    for g in symmetry_generators(d, c) {
        proj -= &g * g.transpose();
    }
    let eig = SymmetricEigen::new(proj);
    let cols: Vec<DVector<f64>> = (0..n)
        .filter(|&k| eig.eigenvalues[k] > 0.5)
        .map(|k| eig.eigenvectors.column(k).into_owned())
        .collect();
    if cols.is_empty() {
        DMatrix::zeros(n, 0)
    } else {
        DMatrix::from_columns(&cols)
    }
}

/// Sorted eigenvalues of a symmetric matrix.
pub fn spectrum(h: &DMatrix<f64>) -> Vec<f64> {
    if h.nrows() == 0 {
        return Vec::new();
    }
    let mut ev: Vec<f64> = SymmetricEigen::new(h.clone()).eigenvalues.iter().copied().collect();
    ev.sort_by(|a, b| a.total_cmp(b));
    ev
}

/// `min |λ| > 1e-6 · max |λ|`; vacuously true for an empty spectrum.
pub fn is_nondegenerate(spec: &[f64]) -> bool {
    let max = spec.iter().fold(0.0f64, |m, l| m.max(l.abs()));
    let min = spec.iter().fold(f64::INFINITY, |m, l| m.min(l.abs()));
    spec.is_empty() || (max > 0.0 && min > 1e-6 * max)
}

/// `Q (QᵀHQ)⁻¹ Qᵀ` with `Q` the symmetry complement; `None` if the reduced
/// Hessian is singular.
pub fn reduced_inverse(h: &DMatrix<f64>, q: &DMatrix<f64>) -> Option<DMatrix<f64>> {
    if q.ncols() == 0 {
        return Some(DMatrix::zeros(h.nrows(), h.nrows()));
    }
    let hr = q.transpose() * h * q;
    if !is_nondegenerate(&spectrum(&hr)) {
        return None;
    }
    let inv = hr.try_inverse()?;
    Some(q * inv * q.transpose())
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CriticalOptions {
    pub max_iterations: usize,
    pub gradient_tolerance: f64,
    /// Armijo sufficient-decrease constant on `‖∇W‖²`.
    pub armijo: f64,
    pub max_halvings: usize,
    /// Closest approach allowed between two centers during the search.
    pub collision_distance: f64,
    /// Iterates beyond this radius count as diverged.
    pub max_radius: f64,
}

impl Default for CriticalOptions {
    fn default() -> Self {
        Self {
            max_iterations: 100,
            gradient_tolerance: 1e-10,
            armijo: 1e-4,
            max_halvings: 40,
            collision_distance: 1e-4,
            max_radius: 100.0,
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CriticalPointReport {
    pub point: VortexConfig,
    pub gradient_norm: f64,
    /// Eigenvalues of the full Hessian, ascending.
    pub hessian_spectrum: Vec<f64>,
    /// Eigenvalues of the Hessian restricted to the symmetry complement.
    pub reduced_spectrum: Vec<f64>,
    pub symmetry_dimension: usize,
    pub converged: bool,
    pub nondegenerate: bool,
    pub iterations: usize,
    pub message: String,
}

fn admissible(d: DomainModel, c: &VortexConfig, opts: &CriticalOptions) -> bool {
    c.centers.iter().all(|&x| d.contains(x)) && min_separation(&c.centers) > opts.collision_distance
}

/// Damped Newton on `∇W` from `seed`.
pub fn find_critical(d: DomainModel, seed: &VortexConfig, opts: &CriticalOptions) -> Result<CriticalPointReport> {
    seed.validate(d)?;
    let mut c = seed.clone();
    let mut g = grad_w(d, &c)?;
    let mut iterations = 0;
    let mut message = String::from("iteration limit reached");
    let mut converged = false;
    while iterations < opts.max_iterations {
        if g.norm() < opts.gradient_tolerance {
            converged = true;
            message = "converged".into();
            break;
        }
        iterations += 1;
        let h = hess_w(d, &c)?;
        let q = symmetry_complement(d, &c);
        let step = match reduced_inverse(&h, &q) {
            Some(hinv) => -(hinv * &g),
            None => {
                debug!("singular reduced Hessian, gradient step");
                -g.clone()
            }
        };
        let phi = g.norm_squared();
        let x = c.flat();
        let mut lambda = 1.0;
        let mut accepted = None;
        for _ in 0..=opts.max_halvings {
            let trial = c.with_flat(&(&x + &step * lambda));
            if admissible(d, &trial, opts) {
                let gt = grad_w(d, &trial)?;
                if gt.norm_squared() <= (1.0 - 2.0 * opts.armijo * lambda) * phi {
                    accepted = Some((trial, gt));
                    break;
                }
            }
            lambda *= 0.5;
        }
        let Some((next, gn)) = accepted else {
            message = "line search failed".into();
            break;
        };
        c = next;
        g = gn;
        debug!("critical search it={iterations} |grad|={:.3e} step={lambda}", g.norm());
        if c.centers.iter().any(|&x| vec2::norm(x) > opts.max_radius) {
            message = "iterate diverged".into();
            break;
        }
    }
    if !converged && g.norm() < opts.gradient_tolerance && message == "iteration limit reached" {
        converged = true;
        message = "converged".into();
    }
    let h = hess_w(d, &c)?;
    let q = symmetry_complement(d, &c);
    let reduced = spectrum(&(q.transpose() * &h * &q));
    let nondegenerate = converged && is_nondegenerate(&reduced);
    Ok(CriticalPointReport {
        gradient_norm: g.norm(),
        hessian_spectrum: spectrum(&h),
        symmetry_dimension: 2 * c.len() - q.ncols(),
        reduced_spectrum: reduced,
        point: c,
        converged,
        nondegenerate,
        iterations,
        message,
    })
}
