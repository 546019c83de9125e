//! Periodic spectral toolbox on the uniform grid θ_k = 2πk/N.
//!
//! Coefficients use the real convention
//! `s(θ) = a_0 + Σ_{j=1}^{N/2} a_j cos(jθ) + b_j sin(jθ)`, so `a_0` is the
//! mean and `low_modes` returns `(a_1, b_1)` directly. The Nyquist mode
//! `j = N/2` has no sine partner on the grid and is zeroed by every
//! multiplier below.

use std::f64::consts::PI;

use rustfft::num_complex::Complex64;
use rustfft::FftPlanner;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Smallest grid accepted by [`PeriodicSamples::new`].
pub const MIN_GRID: usize = 16;

/// Samples of a 2π-periodic function at θ_k = 2πk/N.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PeriodicSamples {
    values: Vec<f64>,
}

/// Real cosine/sine coefficients, `a.len() == b.len() == N/2 + 1`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FourierCoeffs {
    pub a: Vec<f64>,
    pub b: Vec<f64>,
}

/// Grid node θ_k.
pub fn theta(n: usize, k: usize) -> f64 {
    2.0 * PI * k as f64 / n as f64
}

/// Validate a grid size: even and at least [`MIN_GRID`].
pub fn check_grid(n: usize) -> Result<()> {
    if n < MIN_GRID || !n.is_multiple_of(2) {
        return Err(Error::Input(format!(
            "grid size must be even and >= {MIN_GRID}, got {n}"
        )));
    }
    Ok(())
}

impl PeriodicSamples {
    pub fn new(values: Vec<f64>) -> Result<Self> {
        check_grid(values.len())?;
        if values.iter().any(|v| !v.is_finite()) {
            return Err(Error::Input("non-finite periodic sample".into()));
        }
        Ok(Self { values })
    }

    pub fn zeros(n: usize) -> Self {
        Self { values: vec![0.0; n] }
    }

    /// Sample `f` on the N-point grid.
    pub fn from_fn(n: usize, f: impl Fn(f64) -> f64) -> Self {
        Self {
            values: (0..n).map(|k| f(theta(n, k))).collect(),
        }
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn into_values(self) -> Vec<f64> {
        self.values
    }

    pub fn map(&self, f: impl Fn(f64) -> f64) -> Self {
        Self {
            values: self.values.iter().map(|&v| f(v)).collect(),
        }
    }

    pub fn zip_with(&self, other: &Self, f: impl Fn(f64, f64) -> f64) -> Self {
        assert_eq!(self.len(), other.len(), "grid size mismatch");
        Self {
            values: self.values.iter().zip(&other.values).map(|(&x, &y)| f(x, y)).collect(),
        }
    }

    pub fn add(&self, other: &Self) -> Self {
        self.zip_with(other, |x, y| x + y)
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.zip_with(other, |x, y| x - y)
    }

    pub fn mul(&self, other: &Self) -> Self {
        self.zip_with(other, |x, y| x * y)
    }

    pub fn scale(&self, c: f64) -> Self {
        self.map(|v| c * v)
    }

    pub fn sup_norm(&self) -> f64 {
        self.values.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    /// Cyclic shift by `k` grid points: `out(θ) = self(θ − θ_k)`.
    pub fn shift(&self, k: usize) -> Self {
        let n = self.len();
        Self {
            values: (0..n).map(|i| self.values[(i + n - k % n) % n]).collect(),
        }
    }

    pub fn coeffs(&self) -> FourierCoeffs {
        let n = self.len();
        let spec = fft(&self.values);
        let h = n / 2;
        let mut a = vec![0.0; h + 1];
        let mut b = vec![0.0; h + 1];
        let nf = n as f64;
        a[0] = spec[0].re / nf;
        for j in 1..h {
            a[j] = 2.0 * spec[j].re / nf;
            b[j] = -2.0 * spec[j].im / nf;
        }
        a[h] = spec[h].re / nf;
        FourierCoeffs { a, b }
    }

    /// Spectral interpolation onto a finer even grid.
    pub fn zero_pad(&self, n_fine: usize) -> Self {
        self.coeffs().to_samples(n_fine)
    }
}

impl FourierCoeffs {
    pub fn zeros(n: usize) -> Self {
        Self {
            a: vec![0.0; n / 2 + 1],
            b: vec![0.0; n / 2 + 1],
        }
    }

    /// Largest mode index stored.
    pub fn max_mode(&self) -> usize {
        self.a.len() - 1
    }

    /// Evaluate on an N-point grid. Modes above N/2 are dropped.
    pub fn to_samples(&self, n: usize) -> PeriodicSamples {
        let h = n / 2;
        let jmax = self.max_mode();
        let mut spec = vec![Complex64::new(0.0, 0.0); n];
        spec[0] = Complex64::new(self.a[0] * n as f64, 0.0);
        for j in 1..=jmax.min(h) {
            let (aj, bj) = (self.a[j], self.b[j]);
            if j == h {
                // sin(hθ) vanishes on the grid; only the cosine survives.
                spec[h] = Complex64::new(aj * n as f64, 0.0);
                continue;
            }
            let c = Complex64::new(aj, -bj) * (n as f64 / 2.0);
            spec[j] = c;
            spec[n - j] = c.conj();
        }
        PeriodicSamples {
            values: ifft_real(spec),
        }
    }

    /// Zero the mean and Nyquist entries.
    pub fn strip_mean_and_nyquist(&mut self) {
        self.a[0] = 0.0;
        self.b[0] = 0.0;
        let h = self.max_mode();
        self.a[h] = 0.0;
        self.b[h] = 0.0;
    }
}

fn fft(values: &[f64]) -> Vec<Complex64> {
    let mut buf: Vec<Complex64> = values.iter().map(|&v| Complex64::new(v, 0.0)).collect();
    FftPlanner::new().plan_fft_forward(buf.len()).process(&mut buf);
    buf
}

fn ifft_real(mut spec: Vec<Complex64>) -> Vec<f64> {
    let n = spec.len();
    FftPlanner::new().plan_fft_inverse(n).process(&mut spec);
    spec.iter().map(|c| c.re / n as f64).collect()
}

/// Apply the Fourier multiplier `m(j)` for signed wavenumbers `j`; the
/// Nyquist entry is zeroed.
fn multiplier(s: &PeriodicSamples, m: impl Fn(f64) -> Complex64) -> PeriodicSamples {
    let n = s.len();
    let mut spec = fft(&s.values);
    for (k, c) in spec.iter_mut().enumerate() {
        let j = if k <= n / 2 { k as f64 } else { k as f64 - n as f64 };
        *c = if k == n / 2 {
            Complex64::new(0.0, 0.0)
        } else {
            *c * m(j)
        };
    }
    PeriodicSamples {
        values: ifft_real(spec),
    }
}

/// Hilbert transform on the torus: cos(jθ) ↦ sin(jθ), sin(jθ) ↦ −cos(jθ).
pub fn hilbert(s: &PeriodicSamples) -> PeriodicSamples {
    multiplier(s, |j| Complex64::new(0.0, -j.signum()))
}

/// Fourier multiplier |j|.
pub fn half_laplacian(s: &PeriodicSamples) -> PeriodicSamples {
    multiplier(s, |j| Complex64::new(j.abs(), 0.0))
}

pub fn derivative(s: &PeriodicSamples) -> PeriodicSamples {
    multiplier(s, |j| Complex64::new(0.0, j))
}

/// Trapezoid average, equal to `a_0`.
pub fn mean(s: &PeriodicSamples) -> f64 {
    s.values.iter().sum::<f64>() / s.len() as f64
}

/// `(I − P₀) s`.
pub fn project_zero_mean(s: &PeriodicSamples) -> PeriodicSamples {
    let m = mean(s);
    s.map(|v| v - m)
}

/// The cos θ and sin θ coefficients `(a_1, b_1)`.
pub fn low_modes(s: &PeriodicSamples) -> (f64, f64) {
    let n = s.len() as f64;
    let (mut c, mut d) = (0.0, 0.0);
    for (k, v) in s.values.iter().enumerate() {
        let t = theta(s.len(), k);
        c += v * t.cos();
        d += v * t.sin();
    }
    (2.0 * c / n, 2.0 * d / n)
}
