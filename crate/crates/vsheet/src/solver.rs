//! Continuation solver for the sheet equations at fixed `(ε, τ)`.
//!
//! Each outer iteration first moves the centers so that the residual becomes
//! compatible at mode 1 (the defect is `−π∇W` at `ε = 0`, so the frozen
//! Jacobian is `−π hess W(x₀)`), then updates `(f, g)` by
//! `(f, g) −= L₀⁻¹ project_Y(F)`. If ten such steps do not reach the
//! tolerance, a Newton iteration with a finite-difference Jacobian takes
//! over.

use log::{debug, info, warn};
use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::domain::DomainModel;
use crate::error::{Error, Result};
use crate::functional::{self, FunctionalValue};
use crate::kirchhoff_routh::{self, VortexConfig};
use crate::linear_model::{self, BlockOperator};
use crate::sheet::SheetState;
use crate::spectral::{FourierCoeffs, PeriodicSamples};
use crate::vec2::Point;

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SolveOptions {
    pub max_outer: usize,
    /// Sup-norm tolerance on `(F1, F2)`.
    pub tol_residual: f64,
    /// Tolerance on the mode-1 compatibility defect.
    pub tol_center: f64,
    /// Explicit continuation schedule ending at the target `ε`; empty selects
    /// `ε/8, ε/4, ε/2, ε`.
    pub continuation_steps: Vec<f64>,
    pub tau: f64,
    pub n: usize,
    pub max_center_steps: usize,
    /// Quasi-Newton steps per stage before the Newton fallback.
    pub quasi_newton_budget: usize,
    pub max_newton_steps: usize,
}

impl Default for SolveOptions {
    fn default() -> Self {
        Self {
            max_outer: 50,
            tol_residual: 1e-10,
            tol_center: 1e-10,
            continuation_steps: Vec::new(),
            tau: 0.0,
            n: 128,
            max_center_steps: 20,
            quasi_newton_budget: 10,
            max_newton_steps: 20,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum StepKind {
    QuasiNewton,
    Newton,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct IterationRecord {
    pub epsilon: f64,
    pub kind: StepKind,
    pub residual: f64,
    pub defect: f64,
    pub centers: Vec<Point>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct StageRecord {
    pub epsilon: f64,
    pub converged: bool,
    pub residual: f64,
    pub defect: f64,
    pub iterations: usize,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SolveTrace {
    pub iterations: Vec<IterationRecord>,
    pub stages: Vec<StageRecord>,
    /// Last converged state, or the starting state if no stage converged.
    pub final_state: SheetState,
    pub converged: bool,
    pub message: String,
}

impl SolveTrace {
    pub fn last_residual(&self) -> f64 {
        self.stages.last().map_or(f64::INFINITY, |s| s.residual)
    }
}

/// Frozen data shared by all stages of one solve.
pub struct Frozen {
    /// `(−π hess W)⁺` restricted to the symmetry complement, so a center
    /// step is `δx = −jinv · defect`.
    pub jinv: DMatrix<f64>,
    pub blocks: Vec<BlockOperator>,
}

impl Frozen {
    pub fn new(domain: DomainModel, x0: &VortexConfig, n: usize) -> Result<Self> {
        let h = kirchhoff_routh::hess_w(domain, x0)?;
        let q = kirchhoff_routh::symmetry_complement(domain, x0);
        let hinv = kirchhoff_routh::reduced_inverse(&h, &q)
            .ok_or_else(|| Error::Numerical("Hessian of W is singular at the anchor configuration".into()))?;
        Ok(Self {
            jinv: hinv * (-1.0 / std::f64::consts::PI),
            blocks: x0
                .strengths
                .iter()
                .map(|&k| linear_model::build_blocks(k, n))
                .collect::<Result<_>>()?,
        })
    }
}

fn defect_vector(state: &SheetState, fv: &FunctionalValue) -> DVector<f64> {
    DVector::from_iterator(
        2 * state.m(),
        (0..state.m()).flat_map(|i| linear_model::compat_defect(fv.mode1[i], state.strengths[i])),
    )
}

fn with_centers(state: &SheetState, x: &DVector<f64>) -> SheetState {
    let mut s = state.clone();
    for i in 0..s.m() {
        s.centers[i] = [x[2 * i], x[2 * i + 1]];
    }
    s
}

/// Center update on the compatibility defect with the frozen Jacobian.
/// Returns the defect norm before and after.
pub fn adjust_centers(state: &mut SheetState, frozen: &Frozen, opts: &SolveOptions) -> Result<(f64, f64)> {
    let fv = functional::evaluate(state)?;
    let mut d = defect_vector(state, &fv);
    let before = d.norm();
    for _ in 0..opts.max_center_steps {
        if d.norm() < opts.tol_center {
            break;
        }
        let x = state.config().flat();
        let step = -(&frozen.jinv * &d);
        let mut lambda = 1.0;
        let mut accepted = None;
        for _ in 0..40 {
            let trial = with_centers(state, &(&x + &step * lambda));
            if trial.config().validate(state.domain).is_ok() && trial.check_geometry().is_ok() {
                let fv = functional::evaluate(&trial)?;
                let dt = defect_vector(&trial, &fv);
                if dt.norm() < d.norm() {
                    accepted = Some((trial, dt));
                    break;
                }
            }
            lambda *= 0.5;
        }
        match accepted {
            Some((trial, dt)) => {
                *state = trial;
                d = dt;
            }
            None => break,
        }
    }
    Ok((before, d.norm()))
}

/// `L₀⁻¹ project_Y(F)` for every sheet, as sample corrections `(δf, δg)`.
fn quasi_newton_update(
    state: &SheetState,
    fv: &FunctionalValue,
    frozen: &Frozen,
) -> Result<Vec<(PeriodicSamples, PeriodicSamples)>> {
    let n = state.n();
    (0..state.m())
        .map(|i| {
            let mut r1 = fv.f1[i].coeffs();
            let mut r2 = fv.f2[i].coeffs();
            r1.strip_mean_and_nyquist();
            r2.strip_mean_and_nyquist();
            let op = &frozen.blocks[i];
            let (p1, p2, _) = linear_model::project_y(op, &r1, &r2);
            let (h1, h2) = linear_model::apply_l0_inverse(op, &p1, &p2)?;
            Ok((h1.to_samples(n), h2.to_samples(n)))
        })
        .collect()
}

/// One quasi-Newton update with damping factor `lambda`. Returns the new
/// state and its residual sup-norm.
pub fn quasi_newton_step(state: &SheetState, frozen: &Frozen, lambda: f64) -> Result<(SheetState, f64)> {
    let fv = functional::evaluate(state)?;
    let upd = quasi_newton_update(state, &fv, frozen)?;
    let mut next = state.clone();
    for (i, (df, dg)) in upd.into_iter().enumerate() {
        next.f[i] = next.f[i].sub(&df.scale(lambda));
        next.g[i] = next.g[i].sub(&dg.scale(lambda));
    }
    let res = functional::evaluate(&next)?.sup_norm;
    Ok((next, res))
}

/// Reduced unknowns: centers, then per sheet the `f` modes `1..N/2` and the
/// `g` modes `2..N/2` (mode 1 of `g` follows from the constraint).
fn pack(state: &SheetState) -> DVector<f64> {
    let h = state.n() / 2;
    let mut v = Vec::new();
    for c in &state.centers {
        v.extend_from_slice(c);
    }
    for i in 0..state.m() {
        let fc = state.f[i].coeffs();
        let gc = state.g[i].coeffs();
        for j in 1..h {
            v.push(fc.a[j]);
            v.push(fc.b[j]);
        }
        for j in 2..h {
            v.push(gc.a[j]);
            v.push(gc.b[j]);
        }
    }
    DVector::from_vec(v)
}

fn unpack(template: &SheetState, v: &DVector<f64>) -> SheetState {
    let n = template.n();
    let h = n / 2;
    let mut s = template.clone();
    let mut p = 0;
    for c in s.centers.iter_mut() {
        *c = [v[p], v[p + 1]];
        p += 2;
    }
    for i in 0..s.m() {
        let k = s.strengths[i];
        let mut fc = FourierCoeffs::zeros(n);
        let mut gc = FourierCoeffs::zeros(n);
        for j in 1..h {
            fc.a[j] = v[p];
            fc.b[j] = v[p + 1];
            p += 2;
        }
        for j in 2..h {
            gc.a[j] = v[p];
            gc.b[j] = v[p + 1];
            p += 2;
        }
        gc.a[1] = -k * fc.a[1];
        gc.b[1] = -k * fc.b[1];
        s.f[i] = fc.to_samples(n);
        s.g[i] = gc.to_samples(n);
    }
    s
}

/// Residual coefficients `F1, F2` at modes `1..N/2`, sheet by sheet.
fn residual_vector(fv: &FunctionalValue, n: usize) -> DVector<f64> {
    let h = n / 2;
    let mut v = Vec::new();
    for (f1, f2) in fv.f1.iter().zip(&fv.f2) {
        for c in [f1.coeffs(), f2.coeffs()] {
            for j in 1..h {
                v.push(c.a[j]);
                v.push(c.b[j]);
            }
        }
    }
    DVector::from_vec(v)
}

fn residual_at(template: &SheetState, u: &DVector<f64>) -> Result<DVector<f64>> {
    let s = unpack(template, u);
    Ok(residual_vector(&functional::evaluate(&s)?, s.n()))
}

/// Newton step with a forward-difference Jacobian in the reduced unknowns,
/// solved in the least-squares sense. Returns the new state.
pub fn newton_step(state: &SheetState) -> Result<SheetState> {
    let u = pack(state);
    let r0 = residual_at(state, &u)?;
    let mut jac = DMatrix::zeros(r0.len(), u.len());
    for k in 0..u.len() {
        let h = 1e-7 * (1.0 + u[k].abs());
        let mut up = u.clone();
        up[k] += h;
        let col = (residual_at(state, &up)? - &r0) / h;
        jac.set_column(k, &col);
    }
    let svd = jac.svd(true, true);
    let cutoff = 1e-10 * svd.singular_values.max();
    let du = svd
        .solve(&r0, cutoff)
        .map_err(|e| Error::Numerical(format!("Newton solve failed: {e}")))?;
    let phi0 = r0.norm();
    let mut lambda = 1.0;
    for _ in 0..20 {
        let trial = unpack(state, &(&u - &du * lambda));
        if trial.check_geometry().is_ok() && trial.config().validate(state.domain).is_ok() {
            let r = residual_vector(&functional::evaluate(&trial)?, trial.n());
            if r.norm() < phi0 {
                return Ok(trial);
            }
        }
        lambda *= 0.5;
    }
    Err(Error::Numerical("Newton line search failed".into()))
}

fn status(state: &SheetState) -> Result<(f64, f64)> {
    let fv = functional::evaluate(state)?;
    let d = defect_vector(state, &fv);
    Ok((fv.sup_norm, d.amax()))
}

/// Solve at the state's current `ε`, warm-started from `state`.
pub fn solve_stage(
    state: &mut SheetState,
    frozen: &Frozen,
    opts: &SolveOptions,
    log: &mut Vec<IterationRecord>,
) -> Result<StageRecord> {
    let eps = state.epsilon;
    let mut lambda = 1.0;
    let mut rises = 0;
    let mut halvings = 0;
    let mut qn_steps = 0;
    let mut outer = 0;
    let record = |state: &SheetState, kind, res, def, log: &mut Vec<IterationRecord>| {
        log.push(IterationRecord {
            epsilon: eps,
            kind,
            residual: res,
            defect: def,
            centers: state.centers.clone(),
        });
    };
    while outer < opts.max_outer {
        outer += 1;
        adjust_centers(state, frozen, opts)?;
        let (res, def) = status(state)?;
        record(state, StepKind::QuasiNewton, res, def, log);
        debug!("eps={eps:.4} outer={outer} residual={res:.3e} defect={def:.3e}");
        if res < opts.tol_residual && def < opts.tol_center {
            return Ok(StageRecord {
                epsilon: eps,
                converged: true,
                residual: res,
                defect: def,
                iterations: outer,
            });
        }
        if qn_steps >= opts.quasi_newton_budget {
            break;
        }
        let (next, new_res) = quasi_newton_step(state, frozen, lambda)?;
        qn_steps += 1;
        if new_res > res {
            rises += 1;
            if rises >= 2 {
                lambda *= 0.5;
                halvings += 1;
                rises = 0;
                if halvings > 10 {
                    return Err(Error::Numerical(format!("quasi-Newton diverged at eps={eps}")));
                }
            }
        } else {
            rises = 0;
        }
        *state = next;
    }
    info!("eps={eps:.4}: switching to finite-difference Newton");
    for _ in 0..opts.max_newton_steps {
        if outer >= opts.max_outer {
            break;
        }
        outer += 1;
        *state = newton_step(state)?;
        let (res, def) = status(state)?;
        record(state, StepKind::Newton, res, def, log);
        debug!("eps={eps:.4} newton residual={res:.3e} defect={def:.3e}");
        if res < opts.tol_residual && def < opts.tol_center {
            return Ok(StageRecord {
                epsilon: eps,
                converged: true,
                residual: res,
                defect: def,
                iterations: outer,
            });
        }
    }
    let (res, def) = status(state)?;
    Ok(StageRecord {
        epsilon: eps,
        converged: false,
        residual: res,
        defect: def,
        iterations: outer,
    })
}

/// Continuation schedule for `epsilon` under `opts`.
pub fn schedule(epsilon: f64, opts: &SolveOptions) -> Result<Vec<f64>> {
    if epsilon.partial_cmp(&0.0) != Some(std::cmp::Ordering::Greater) || !epsilon.is_finite() {
        return Err(Error::Input(format!("target epsilon must be positive, got {epsilon}")));
    }
    if opts.continuation_steps.is_empty() {
        return Ok(vec![epsilon / 8.0, epsilon / 4.0, epsilon / 2.0, epsilon]);
    }
    let s = &opts.continuation_steps;
    let increasing = s.windows(2).all(|w| w[0] < w[1]);
    if s[0] <= 0.0 || !increasing || (s[s.len() - 1] - epsilon).abs() > 1e-15 * epsilon {
        return Err(Error::Input(
            "continuation steps must be positive, increasing, and end at the target".into(),
        ));
    }
    Ok(s.clone())
}

/// Solve at `(epsilon, tau)` by continuation from the circles around `x0`.
pub fn solve_at(
    domain: DomainModel,
    x0: &VortexConfig,
    epsilon: f64,
    tau: f64,
    opts: &SolveOptions,
) -> Result<SolveTrace> {
    x0.validate(domain)?;
    if !(opts.tol_residual > 0.0 && opts.tol_center > 0.0) {
        return Err(Error::Input("tolerances must be positive".into()));
    }
    let steps = schedule(epsilon, opts)?;
    let frozen = Frozen::new(domain, x0, opts.n)?;
    let mut state = SheetState::circles(domain, x0, steps[0], tau, opts.n)?;
    let mut trace = SolveTrace {
        iterations: Vec::new(),
        stages: Vec::new(),
        final_state: state.clone(),
        converged: false,
        message: String::new(),
    };
    for &eps in &steps {
        state.epsilon = eps;
        let outcome = state
            .check_geometry()
            .and_then(|_| solve_stage(&mut state, &frozen, opts, &mut trace.iterations));
        match outcome {
            Ok(stage) if stage.converged => {
                info!("eps={eps:.4} tau={tau}: converged, residual {:.3e}", stage.residual);
                trace.stages.push(stage);
                trace.final_state = state.clone();
            }
            Ok(stage) => {
                warn!(
                    "eps={eps:.4} tau={tau}: no convergence, residual {:.3e}",
                    stage.residual
                );
                trace.message = format!("stage eps={eps} did not converge (residual {:e})", stage.residual);
                trace.stages.push(stage);
                return Ok(trace);
            }
            Err(e) => {
                warn!("eps={eps:.4} tau={tau}: {e}");
                trace.message = format!("stage eps={eps} failed: {e}");
                return Ok(trace);
            }
        }
    }
    trace.converged = true;
    trace.message = "converged".into();
    Ok(trace)
}
