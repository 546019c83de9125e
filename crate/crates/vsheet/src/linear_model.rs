//! The exact `ε = 0` linearization of one sheet's residual in `(f, g)`.
//!
//! For `h1 = Σ a_j cos jθ + b_j sin jθ` and `h2 = Σ c_j cos jθ + d_j sin jθ`
//! the limit functionals give
//!
//! ```text
//! F1 = Σ â_j sin jθ + b̂_j cos jθ,   (â_j, ĉ_j) = M_j (a_j, c_j)
//! F2 = Σ ĉ_j cos jθ + d̂_j sin jθ,   (b̂_j, d̂_j) = N_j (b_j, d_j)
//! M_j = [−κj/2, 1/2; (2−j)κ²/2, −κ/2],   N_j = [κj/2, −1/2; (2−j)κ²/2, −κ/2].
//! ```
//!
//! Both blocks are singular at `j = 1`. The constrained space `X` fixes
//! `c_1 = −κa_1`, `d_1 = −κb_1`; its image `Y` satisfies `r_1 = −κp_1` and
//! `s_1 = κq_1`, where `(p, q)` are the sin/cos coefficients of `F1` and
//! `(r, s)` the cos/sin coefficients of `F2`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::spectral::{check_grid, FourierCoeffs};

/// Largest mode-1 incompatibility accepted by [`apply_l0_inverse`].
pub const COMPAT_TOL: f64 = 1e-8;

pub type Block = [[f64; 2]; 2];

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct BlockOperator {
    pub kappa: f64,
    pub n: usize,
    /// `m[j]` for `j = 0..=N/2`; entry 0 is unused.
    pub m: Vec<Block>,
    pub n_blocks: Vec<Block>,
    /// Inverses for `j ≥ 2`.
    pub m_inv: Vec<Option<Block>>,
    pub n_inv: Vec<Option<Block>>,
}

pub fn det(b: &Block) -> f64 {
    b[0][0] * b[1][1] - b[0][1] * b[1][0]
}

pub fn mat_vec(b: &Block, v: [f64; 2]) -> [f64; 2] {
    [b[0][0] * v[0] + b[0][1] * v[1], b[1][0] * v[0] + b[1][1] * v[1]]
}

pub fn mat_mul(a: &Block, b: &Block) -> Block {
    let mut c = [[0.0; 2]; 2];
    for (i, row) in c.iter_mut().enumerate() {
        for (j, v) in row.iter_mut().enumerate() {
            *v = a[i][0] * b[0][j] + a[i][1] * b[1][j];
        }
    }
    c
}

pub fn m_block(kappa: f64, j: usize) -> Block {
    let jf = j as f64;
    [
        [-kappa * jf / 2.0, 0.5],
        [(2.0 - jf) * kappa * kappa / 2.0, -kappa / 2.0],
    ]
}

pub fn n_block(kappa: f64, j: usize) -> Block {
    let jf = j as f64;
    [
        [kappa * jf / 2.0, -0.5],
        [(2.0 - jf) * kappa * kappa / 2.0, -kappa / 2.0],
    ]
}

/// Closed-form `M_j⁻¹`, `j ≥ 2`.
pub fn m_inverse(kappa: f64, j: usize) -> Block {
    let d = j as f64 - 1.0;
    let jf = j as f64;
    [
        [-1.0 / (kappa * d), -1.0 / (kappa * kappa * d)],
        [(jf - 2.0) / d, -jf / (kappa * d)],
    ]
}

/// Closed-form `N_j⁻¹`, `j ≥ 2`.
pub fn n_inverse(kappa: f64, j: usize) -> Block {
    let d = j as f64 - 1.0;
    let jf = j as f64;
    [
        [1.0 / (kappa * d), -1.0 / (kappa * kappa * d)],
        [(2.0 - jf) / d, -jf / (kappa * d)],
    ]
}

pub fn build_blocks(kappa: f64, n: usize) -> Result<BlockOperator> {
    if kappa == 0.0 || !kappa.is_finite() {
        return Err(Error::Input(format!("invalid strength {kappa}")));
    }
    check_grid(n)?;
    let h = n / 2;
    Ok(BlockOperator {
        kappa,
        n,
        m: (0..=h).map(|j| m_block(kappa, j)).collect(),
        n_blocks: (0..=h).map(|j| n_block(kappa, j)).collect(),
        m_inv: (0..=h).map(|j| (j >= 2).then(|| m_inverse(kappa, j))).collect(),
        n_inv: (0..=h).map(|j| (j >= 2).then(|| n_inverse(kappa, j))).collect(),
    })
}

/// Mode-`j` coefficients of a residual pair in block order:
/// `((p_j, r_j), (q_j, s_j))` with `p, q` the sin/cos coefficients of the
/// first component and `r, s` the cos/sin coefficients of the second.
pub fn to_block_pairs(r1: &FourierCoeffs, r2: &FourierCoeffs, j: usize) -> ([f64; 2], [f64; 2]) {
    ([r1.b[j], r2.a[j]], [r1.a[j], r2.b[j]])
}

/// Inverse of [`to_block_pairs`].
pub fn from_block_pairs(r1: &mut FourierCoeffs, r2: &mut FourierCoeffs, j: usize, pr: [f64; 2], qs: [f64; 2]) {
    r1.b[j] = pr[0];
    r2.a[j] = pr[1];
    r1.a[j] = qs[0];
    r2.b[j] = qs[1];
}

fn check_sizes(op: &BlockOperator, x: &FourierCoeffs, y: &FourierCoeffs) -> Result<()> {
    let want = op.n / 2 + 1;
    if [x.a.len(), x.b.len(), y.a.len(), y.b.len()].iter().any(|&l| l != want) {
        return Err(Error::Input(
            "coefficient length does not match the operator grid".into(),
        ));
    }
    Ok(())
}

/// `L₀(h1, h2)`. Mean and Nyquist entries of the output are zero.
pub fn apply_l0(op: &BlockOperator, h1: &FourierCoeffs, h2: &FourierCoeffs) -> Result<(FourierCoeffs, FourierCoeffs)> {
    check_sizes(op, h1, h2)?;
    let mut o1 = FourierCoeffs::zeros(op.n);
    let mut o2 = FourierCoeffs::zeros(op.n);
    for j in 1..op.n / 2 {
        let ac = mat_vec(&op.m[j], [h1.a[j], h2.a[j]]);
        let bd = mat_vec(&op.n_blocks[j], [h1.b[j], h2.b[j]]);
        from_block_pairs(&mut o1, &mut o2, j, ac, bd);
    }
    Ok((o1, o2))
}

/// Mode-1 incompatibility `(κ⨍F1 sin + ⨍F2 cos, ⨍F2 sin − κ⨍F1 cos)` from
/// the four mode-1 mean integrals `(⨍F1 cos, ⨍F1 sin, ⨍F2 cos, ⨍F2 sin)`.
pub fn compat_defect(mode1: [f64; 4], kappa: f64) -> [f64; 2] {
    [kappa * mode1[1] + mode1[2], mode1[3] - kappa * mode1[0]]
}

fn defect_of(kappa: f64, r1: &FourierCoeffs, r2: &FourierCoeffs) -> [f64; 2] {
    compat_defect([r1.a[1] / 2.0, r1.b[1] / 2.0, r2.a[1] / 2.0, r2.b[1] / 2.0], kappa)
}

/// `L₀⁻¹` on `Y`; the output lies in `X`.
pub fn apply_l0_inverse(
    op: &BlockOperator,
    r1: &FourierCoeffs,
    r2: &FourierCoeffs,
) -> Result<(FourierCoeffs, FourierCoeffs)> {
    check_sizes(op, r1, r2)?;
    let k = op.kappa;
    let dft = defect_of(k, r1, r2);
    if dft[0].abs().max(dft[1].abs()) > COMPAT_TOL {
        return Err(Error::Consistency(format!(
            "residual violates the mode-1 compatibility by ({:e}, {:e})",
            dft[0], dft[1]
        )));
    }
    let mut h1 = FourierCoeffs::zeros(op.n);
    let mut h2 = FourierCoeffs::zeros(op.n);
    let (p1, q1) = (r1.b[1], r1.a[1]);
    h1.a[1] = -p1 / k;
    h1.b[1] = q1 / k;
    h2.a[1] = p1;
    h2.b[1] = -q1;
    for j in 2..op.n / 2 {
        let (pr, qs) = to_block_pairs(r1, r2, j);
        let ac = mat_vec(op.m_inv[j].as_ref().expect("j >= 2"), pr);
        let bd = mat_vec(op.n_inv[j].as_ref().expect("j >= 2"), qs);
        h1.a[j] = ac[0];
        h2.a[j] = ac[1];
        h1.b[j] = bd[0];
        h2.b[j] = bd[1];
    }
    Ok((h1, h2))
}

/// Least-squares projection of the mode-1 coefficients onto `Y`, returning
/// the projected pair and the defect before projection.
pub fn project_y(
    op: &BlockOperator,
    r1: &FourierCoeffs,
    r2: &FourierCoeffs,
) -> (FourierCoeffs, FourierCoeffs, [f64; 2]) {
    let k = op.kappa;
    let dft = defect_of(k, r1, r2);
    let mut p1 = r1.clone();
    let mut p2 = r2.clone();
    // κp + r = 0 along (κ, 1); s − κq = 0 along (−κ, 1); coefficients are twice the mean integrals.
    let w = 2.0 / (1.0 + k * k);
    p1.b[1] -= w * dft[0] * k;
    p2.a[1] -= w * dft[0];
    p1.a[1] += w * dft[1] * k;
    p2.b[1] -= w * dft[1];
    (p1, p2, dft)
}

/// Least-squares projection of a coefficient pair onto `X`: zero mean and
/// Nyquist, `c_1 = −κa_1`, `d_1 = −κb_1`.
pub fn project_x(kappa: f64, h1: &mut FourierCoeffs, h2: &mut FourierCoeffs) {
    h1.strip_mean_and_nyquist();
    h2.strip_mean_and_nyquist();
    let w = 1.0 / (1.0 + kappa * kappa);
    let a = (h1.a[1] - kappa * h2.a[1]) * w;
    let b = (h1.b[1] - kappa * h2.b[1]) * w;
    h1.a[1] = a;
    h2.a[1] = -kappa * a;
    h1.b[1] = b;
    h2.b[1] = -kappa * b;
}
