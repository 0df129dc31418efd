//! Boundary functions on the reference circle/sphere.
//!
//! Coefficients are stored per mode `k` and intra-mode index `i < d_k(N)`.
//! For `N = 2` the basis is the plain real Fourier basis
//!
//! ```text
//! f(θ) = a_0 + Σ_{k≥1} a_k cos kθ + b_k sin kθ,    coeffs[k] = [a_k, b_k]
//! ```
//!
//! so that `cos 2θ` has coefficient exactly `1` on `(2, cos)`. The
//! `L²(S¹)`-orthonormal coefficients (`Y_0 = 1/√(2π)`, `Y_k = cos kθ/√π`, ...)
//! are available through [`BoundaryFunction::orthonormal_coeffs`]. Diagonal
//! multipliers act identically in both normalizations. For `N ≥ 3` the
//! coefficients are abstract spherical-harmonic coefficients and only the
//! mode-wise operations are supported.

use std::f64::consts::PI;

use rustfft::num_complex::Complex64;
use rustfft::FftPlanner;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Dimension `d_k` of the space of degree-`k` spherical harmonics on `S^{N-1}`.
pub fn multiplicity(dim: u32, k: u32) -> usize {
    fn binom(n: u64, r: u64) -> u64 {
        if r > n {
            return 0;
        }
        let r = r.min(n - r);
        (0..r).fold(1u64, |acc, j| acc * (n - j) / (j + 1))
    }
    let (n, k) = (dim as u64, k as u64);
    let lower = if k >= 2 { binom(n + k - 3, k - 2) } else { 0 };
    (binom(n + k - 1, k) - lower) as usize
}

/// Whether the cos/sin index is meant for a mode.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Parity {
    Cos,
    Sin,
}

impl Parity {
    pub fn index(self) -> usize {
        match self {
            Parity::Cos => 0,
            Parity::Sin => 1,
        }
    }
}

/// A scalar function on the reference circle (N = 2) or sphere (N ≥ 3).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoundaryFunction {
    dim: u32,
    coeffs: Vec<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    samples: Option<Vec<f64>>,
}

impl BoundaryFunction {
    /// The zero function with modes `0..=cutoff`.
    pub fn zeros(dim: u32, cutoff: usize) -> Self {
        assert!(dim >= 2, "dimension must be at least 2");
        let coeffs = (0..=cutoff as u32)
            .map(|k| vec![0.0; multiplicity(dim, k)])
            .collect();
        Self {
            dim,
            coeffs,
            samples: None,
        }
    }

    /// `N = 2` function from cosine and sine coefficient lists (`b[0]` ignored).
    pub fn from_cos_sin(a: &[f64], b: &[f64]) -> Self {
        let cutoff = a.len().max(b.len()).saturating_sub(1);
        let mut out = Self::zeros(2, cutoff);
        for (k, &v) in a.iter().enumerate() {
            out.coeffs[k][0] = v;
        }
        for (k, &v) in b.iter().enumerate().skip(1) {
            out.coeffs[k][1] = v;
        }
        out
    }

    pub fn constant(value: f64) -> Self {
        let mut out = Self::zeros(2, 0);
        out.coeffs[0][0] = value;
        out
    }

    /// `amplitude · cos kθ` (or `sin kθ`) on the circle.
    pub fn mode(k: usize, parity: Parity, amplitude: f64) -> Self {
        let mut out = Self::zeros(2, k);
        match (k, parity) {
            (0, Parity::Cos) => out.coeffs[0][0] = amplitude,
            (0, Parity::Sin) => {}
            (_, p) => out.coeffs[k][p.index()] = amplitude,
        }
        out
    }

    pub fn cos_mode(k: usize, amplitude: f64) -> Self {
        Self::mode(k, Parity::Cos, amplitude)
    }

    pub fn sin_mode(k: usize, amplitude: f64) -> Self {
        Self::mode(k, Parity::Sin, amplitude)
    }

    pub fn dim(&self) -> u32 {
        self.dim
    }

    /// Highest stored mode index `K`.
    pub fn cutoff(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn coeffs(&self) -> &[Vec<f64>] {
        &self.coeffs
    }

    /// Coefficients of mode `k` (empty beyond the cutoff).
    pub fn mode_coeffs(&self, k: usize) -> &[f64] {
        self.coeffs.get(k).map(Vec::as_slice).unwrap_or(&[])
    }

    /// Coefficient `(k, i)`; zero beyond the cutoff.
    pub fn coeff(&self, k: usize, i: usize) -> f64 {
        self.mode_coeffs(k).get(i).copied().unwrap_or(0.0)
    }

    pub fn set_coeff(&mut self, k: usize, i: usize, value: f64) {
        if k > self.cutoff() {
            self.extend_to(k);
        }
        self.coeffs[k][i] = value;
        self.samples = None;
    }

    pub fn samples(&self) -> Option<&[f64]> {
        self.samples.as_deref()
    }

    /// Mean over the reference sphere (the `k = 0` coefficient).
    pub fn mean(&self) -> f64 {
        self.coeffs[0][0]
    }

    pub fn is_zero_mean(&self) -> bool {
        self.coeffs[0][0] == 0.0
    }

    fn extend_to(&mut self, cutoff: usize) {
        let dim = self.dim;
        while self.coeffs.len() <= cutoff {
            let k = self.coeffs.len() as u32;
            self.coeffs.push(vec![0.0; multiplicity(dim, k)]);
        }
    }

    /// Drops every mode above `cutoff`.
    pub fn truncated(&self, cutoff: usize) -> Self {
        let mut out = self.clone();
        out.coeffs.truncate(cutoff + 1);
        out.samples = None;
        out
    }

    pub fn scaled(&self, factor: f64) -> Self {
        let mut out = self.map_modes(|_, c| factor * c);
        if let Some(s) = &self.samples {
            out.samples = Some(s.iter().map(|v| factor * v).collect());
        }
        out
    }

    /// Applies `op(k, coefficient)` to every coefficient.
    pub fn map_modes(&self, mut op: impl FnMut(usize, f64) -> f64) -> Self {
        let coeffs = self
            .coeffs
            .iter()
            .enumerate()
            .map(|(k, mode)| mode.iter().map(|&c| op(k, c)).collect())
            .collect();
        Self {
            dim: self.dim,
            coeffs,
            samples: None,
        }
    }

    /// `self + factor · other`.
    pub fn add_scaled(&self, other: &Self, factor: f64) -> Self {
        assert_eq!(self.dim, other.dim, "dimension mismatch");
        let mut out = self.clone();
        out.samples = None;
        out.extend_to(other.cutoff());
        for (k, mode) in other.coeffs.iter().enumerate() {
            for (i, &c) in mode.iter().enumerate() {
                out.coeffs[k][i] += factor * c;
            }
        }
        out
    }

    /// Largest coefficient magnitude over modes `k ≥ from`.
    pub fn tail_max(&self, from: usize) -> f64 {
        self.coeffs
            .iter()
            .skip(from)
            .flat_map(|m| m.iter())
            .fold(0.0, |acc: f64, c| acc.max(c.abs()))
    }

    /// Coefficients in the `L²`-orthonormal basis (`N = 2`).
    pub fn orthonormal_coeffs(&self) -> Vec<Vec<f64>> {
        self.require_circle();
        let (s0, sk) = ((2.0 * PI).sqrt(), PI.sqrt());
        self.coeffs
            .iter()
            .enumerate()
            .map(|(k, m)| {
                let s = if k == 0 { s0 } else { sk };
                m.iter().map(|c| s * c).collect()
            })
            .collect()
    }

    fn require_circle(&self) {
        assert_eq!(self.dim, 2, "sampled operations require N = 2");
    }

    /// Value at angle `theta` (`N = 2`).
    pub fn eval(&self, theta: f64) -> f64 {
        self.require_circle();
        let mut acc = self.coeffs[0][0];
        for (k, m) in self.coeffs.iter().enumerate().skip(1) {
            let (s, c) = (k as f64 * theta).sin_cos();
            acc += m[0] * c + m[1] * s;
        }
        acc
    }

    /// Angular derivative `d/dθ` (`N = 2`).
    pub fn derivative(&self) -> Self {
        self.require_circle();
        let mut out = Self::zeros(2, self.cutoff());
        for (k, m) in self.coeffs.iter().enumerate().skip(1) {
            let kf = k as f64;
            out.coeffs[k][0] = kf * m[1];
            out.coeffs[k][1] = -kf * m[0];
        }
        out
    }

    /// Values at the equispaced nodes `θ_j = 2πj/m`.
    pub fn synthesize(&self, m: usize) -> Vec<f64> {
        self.require_circle();
        (0..m).map(|j| self.eval(node_angle(j, m))).collect()
    }

    /// Sup norm over `m` equispaced nodes.
    pub fn sup_norm(&self, m: usize) -> f64 {
        self.synthesize(m)
            .into_iter()
            .fold(0.0, |acc: f64, v| acc.max(v.abs()))
    }

    /// `L²(S¹)` norm from the coefficients.
    pub fn l2_norm(&self) -> f64 {
        self.orthonormal_coeffs()
            .iter()
            .flatten()
            .map(|c| c * c)
            .sum::<f64>()
            .sqrt()
    }
}

/// `θ_j = 2πj/m`.
pub fn node_angle(j: usize, m: usize) -> f64 {
    2.0 * PI * j as f64 / m as f64
}

/// Discrete Fourier analysis of equispaced samples on the circle.
///
/// Keeps every mode up to `M/2`; the Nyquist mode carries only a cosine term.
pub fn analyze(samples: &[f64]) -> Result<BoundaryFunction> {
    let m = samples.len();
    if m < 2 || m % 2 != 0 {
        return Err(Error::InvalidInput(format!(
            "sample count must be even and at least 2, got {m}"
        )));
    }
    if let Some(j) = samples.iter().position(|v| !v.is_finite()) {
        return Err(Error::InvalidInput(format!("sample {j} is not finite")));
    }
    let spectrum = fft(samples.iter().map(|&v| Complex64::new(v, 0.0)).collect());
    let half = m / 2;
    let scale = 1.0 / m as f64;
    let mut out = BoundaryFunction::zeros(2, half);
    out.coeffs[0][0] = spectrum[0].re * scale;
    for k in 1..half {
        out.coeffs[k][0] = 2.0 * spectrum[k].re * scale;
        out.coeffs[k][1] = -2.0 * spectrum[k].im * scale;
    }
    out.coeffs[half][0] = spectrum[half].re * scale;
    out.samples = Some(samples.to_vec());
    Ok(out)
}

/// [`analyze`] followed by truncation to `cutoff`.
pub fn analyze_truncated(samples: &[f64], cutoff: usize) -> Result<BoundaryFunction> {
    Ok(analyze(samples)?.truncated(cutoff))
}

/// `Π₀φ = φ − mean(φ)`: clears the `k = 0` coefficient and nothing else.
pub fn project_zero_mean(phi: &BoundaryFunction) -> BoundaryFunction {
    let mut out = phi.clone();
    let mean = out.coeffs[0][0];
    out.coeffs[0][0] = 0.0;
    if let Some(s) = out.samples.as_mut() {
        s.iter_mut().for_each(|v| *v -= mean);
    }
    out
}

/// Node count and mode cutoff of a sampled computation.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct Discretization {
    /// Nodes per boundary curve (even, ≥ 64).
    pub m: usize,
    /// Fourier cutoff `K ≤ M/4`.
    pub cutoff: usize,
    /// Target quadrature accuracy.
    pub quad_tol: f64,
}

impl Default for Discretization {
    fn default() -> Self {
        Self {
            m: 256,
            cutoff: 64,
            quad_tol: 1e-10,
        }
    }
}

impl Discretization {
    pub fn new(m: usize, cutoff: usize) -> Result<Self> {
        let disc = Self {
            m,
            cutoff,
            ..Self::default()
        };
        disc.validate()?;
        Ok(disc)
    }

    pub fn validate(&self) -> Result<()> {
        if self.m < 64 || self.m % 2 != 0 {
            return Err(Error::InvalidInput(format!(
                "node count M must be even and at least 64, got {}",
                self.m
            )));
        }
        if self.cutoff == 0 || 4 * self.cutoff > self.m {
            return Err(Error::InvalidInput(format!(
                "cutoff K must satisfy 1 <= K <= M/4, got K={} for M={}",
                self.cutoff, self.m
            )));
        }
        if !(self.quad_tol > 0.0) {
            return Err(Error::InvalidInput("quad_tol must be positive".into()));
        }
        Ok(())
    }
}

pub(crate) fn fft(mut data: Vec<Complex64>) -> Vec<Complex64> {
    FftPlanner::new().plan_fft_forward(data.len()).process(&mut data);
    data
}

pub(crate) fn ifft(mut data: Vec<Complex64>) -> Vec<Complex64> {
    let n = data.len() as f64;
    FftPlanner::new().plan_fft_inverse(data.len()).process(&mut data);
    data.iter_mut().for_each(|v| *v /= n);
    data
}

/// Spectral `d/dθ` of periodic samples at equispaced nodes. The Nyquist mode is
/// dropped.
pub(crate) fn periodic_derivative(values: &[Complex64]) -> Vec<Complex64> {
    let m = values.len();
    let mut spec = fft(values.to_vec());
    for (k, v) in spec.iter_mut().enumerate() {
        let wave = if k < m / 2 {
            k as f64
        } else if k == m / 2 {
            0.0
        } else {
            k as f64 - m as f64
        };
        *v *= Complex64::new(0.0, wave);
    }
    ifft(spec)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn multiplicities() {
        assert_eq!(multiplicity(2, 0), 1);
        assert_eq!(multiplicity(2, 5), 2);
        assert_eq!(multiplicity(3, 0), 1);
        assert_eq!(multiplicity(3, 4), 9);
        assert_eq!(multiplicity(4, 2), 9);
        assert_eq!(multiplicity(5, 1), 5);
    }

    #[test]
    fn analyze_cos2() {
        let samples: Vec<f64> = (0..64).map(|j| (2.0 * node_angle(j, 64)).cos()).collect();
        let f = analyze(&samples).unwrap();
        for (k, m) in f.coeffs().iter().enumerate() {
            for (i, &c) in m.iter().enumerate() {
                let expected = if (k, i) == (2, 0) { 1.0 } else { 0.0 };
                assert!((c - expected).abs() <= 1e-14, "k={k} i={i} c={c}");
            }
        }
    }

    #[test]
    fn analyze_constant() {
        let f = analyze(&[3.0; 64]).unwrap();
        assert!((f.mean() - 3.0).abs() < 1e-15);
        assert!(f.tail_max(1) < 1e-15);
    }

    #[test]
    fn analyze_rejects_bad_input() {
        let mut s = vec![0.0; 64];
        s[7] = f64::NAN;
        assert!(matches!(analyze(&s), Err(Error::InvalidInput(_))));
        assert!(analyze(&[1.0; 63]).is_err());
    }

    #[test]
    fn projection_examples() {
        let c = project_zero_mean(&BoundaryFunction::constant(5.0));
        assert_eq!(c.tail_max(0), 0.0);

        let cos3 = BoundaryFunction::cos_mode(3, 1.0);
        assert_eq!(project_zero_mean(&cos3), cos3);

        let f = BoundaryFunction::from_cos_sin(&[2.0, 1.0], &[]);
        assert_eq!(project_zero_mean(&f), BoundaryFunction::cos_mode(1, 1.0));
    }

    #[test]
    fn projection_updates_samples() {
        let samples: Vec<f64> = (0..64).map(|j| 2.0 + node_angle(j, 64).sin()).collect();
        let p = project_zero_mean(&analyze(&samples).unwrap());
        let s = p.samples().unwrap();
        assert!(s.iter().sum::<f64>().abs() < 1e-12);
    }

    #[test]
    fn derivative_of_sin() {
        let d = BoundaryFunction::sin_mode(3, 2.0).derivative();
        assert_eq!(d.coeff(3, 0), 6.0);
        assert_eq!(d.coeff(3, 1), 0.0);
    }

    #[test]
    fn spectral_derivative_matches() {
        let m = 64;
        let vals: Vec<Complex64> = (0..m)
            .map(|j| Complex64::new((3.0 * node_angle(j, m)).sin(), 0.0))
            .collect();
        let d = periodic_derivative(&vals);
        for (j, v) in d.iter().enumerate() {
            let exact = 3.0 * (3.0 * node_angle(j, m)).cos();
            assert!((v.re - exact).abs() < 1e-12 && v.im.abs() < 1e-12);
        }
    }

    #[test]
    fn discretization_bounds() {
        assert!(Discretization::default().validate().is_ok());
        assert!(Discretization::new(63, 8).is_err());
        assert!(Discretization::new(62, 8).is_err());
        assert!(Discretization::new(128, 33).is_err());
        assert!(Discretization::new(128, 32).is_ok());
    }
}
