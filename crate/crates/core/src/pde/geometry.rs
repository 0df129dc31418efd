//! Perturbed annuli described as radial graphs, and their quadrature nodes.

use std::f64::consts::PI;

use rustfft::num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::spectral::{analyze, node_angle, BoundaryFunction};

/// Inward V-shaped notch on the inner circle:
/// `a(θ) = t·(min(R|θ−θ₀|, ε) − ε)`.
///
/// Lipschitz with slope `t` relative to arclength, depth `t·ε` at the tip,
/// corners at `θ₀` and `θ₀ ± ε/R`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TentNotch {
    pub depth: f64,
    pub center: f64,
    pub inner_radius: f64,
    #[serde(default = "one")]
    pub amplitude: f64,
}

fn one() -> f64 {
    1.0
}

impl TentNotch {
    pub fn new(depth: f64, center: f64, inner_radius: f64) -> Result<Self> {
        if !(depth > 0.0 && depth < inner_radius / 2.0) {
            return Err(Error::InvalidInput(format!(
                "notch depth must lie in (0, R/2), got {depth} for R={inner_radius}"
            )));
        }
        Ok(Self {
            depth,
            center,
            inner_radius,
            amplitude: 1.0,
        })
    }

    pub fn scaled(&self, t: f64) -> Self {
        Self {
            amplitude: self.amplitude * t,
            ..*self
        }
    }

    /// Angular half-width `ε/R` of the notch.
    pub fn half_width(&self) -> f64 {
        self.depth / self.inner_radius
    }

    fn offset(&self, theta: f64) -> f64 {
        wrap_angle(theta - self.center)
    }

    pub fn value(&self, theta: f64) -> f64 {
        let d = self.offset(theta).abs();
        self.amplitude * ((self.inner_radius * d).min(self.depth) - self.depth)
    }

    pub fn slope(&self, theta: f64) -> f64 {
        let d = self.offset(theta);
        if self.inner_radius * d.abs() < self.depth {
            self.amplitude * self.inner_radius * d.signum()
        } else {
            0.0
        }
    }

    pub fn corners(&self) -> Vec<f64> {
        let w = self.half_width();
        vec![self.center - w, self.center, self.center + w]
    }
}

/// Map to `(−π, π]`.
pub fn wrap_angle(theta: f64) -> f64 {
    let t = theta.rem_euclid(2.0 * PI);
    if t > PI {
        t - 2.0 * PI
    } else {
        t
    }
}

/// Radial displacement `a(θ)` of the inner circle, i.e. the normal trace `f·n`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum InnerProfile {
    /// Smooth, band-limited displacement.
    Fourier { coeffs: BoundaryFunction },
    /// Lipschitz notch with declared corners.
    Tent { notch: TentNotch },
}

impl From<BoundaryFunction> for InnerProfile {
    fn from(coeffs: BoundaryFunction) -> Self {
        InnerProfile::Fourier { coeffs }
    }
}

impl From<TentNotch> for InnerProfile {
    fn from(notch: TentNotch) -> Self {
        InnerProfile::Tent { notch }
    }
}

impl InnerProfile {
    pub fn zero() -> Self {
        BoundaryFunction::zeros(2, 0).into()
    }

    pub fn value(&self, theta: f64) -> f64 {
        match self {
            InnerProfile::Fourier { coeffs } => coeffs.eval(theta),
            InnerProfile::Tent { notch } => notch.value(theta),
        }
    }

    /// `(a, a', a'')` at `theta`; one-sided at corners.
    pub fn jet(&self, theta: f64) -> (f64, f64, f64) {
        match self {
            InnerProfile::Fourier { coeffs } => {
                let d1 = coeffs.derivative();
                let d2 = d1.derivative();
                (coeffs.eval(theta), d1.eval(theta), d2.eval(theta))
            }
            InnerProfile::Tent { notch } => (notch.value(theta), notch.slope(theta), 0.0),
        }
    }

    /// Corner angles; empty for smooth profiles.
    pub fn corners(&self) -> Vec<f64> {
        match self {
            InnerProfile::Fourier { .. } => Vec::new(),
            InnerProfile::Tent { notch } if notch.amplitude != 0.0 => notch.corners(),
            InnerProfile::Tent { .. } => Vec::new(),
        }
    }

    pub fn scaled(&self, t: f64) -> Self {
        match self {
            InnerProfile::Fourier { coeffs } => coeffs.scaled(t).into(),
            InnerProfile::Tent { notch } => notch.scaled(t).into(),
        }
    }

    /// Fourier coefficients of `a`: exact for smooth profiles, from `m`
    /// equispaced samples otherwise.
    pub fn fourier(&self, m: usize) -> Result<BoundaryFunction> {
        match self {
            InnerProfile::Fourier { coeffs } => Ok(coeffs.clone()),
            InnerProfile::Tent { .. } => {
                let samples: Vec<f64> = (0..m).map(|j| self.value(node_angle(j, m))).collect();
                analyze(&samples)
            }
        }
    }

    /// `max_j |a(θ_j) − a(2φ − θ_j)|` over `m` equispaced nodes.
    pub fn reflection_defect(&self, axis: f64, m: usize) -> f64 {
        (0..m)
            .map(|j| {
                let th = node_angle(j, m);
                (self.value(th) - self.value(2.0 * axis - th)).abs()
            })
            .fold(0.0, f64::max)
    }
}

/// Inner curve `ρ = R + a(θ)` and outer curve `ρ = 1 + g(θ)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DomainPair {
    pub inner_radius: f64,
    pub inner: InnerProfile,
    pub outer: BoundaryFunction,
}

impl DomainPair {
    pub fn new(inner_radius: f64, inner: InnerProfile, outer: BoundaryFunction) -> Result<Self> {
        let d = Self {
            inner_radius,
            inner,
            outer,
        };
        d.validate()?;
        Ok(d)
    }

    /// Concentric circles of radii `R` and `1`.
    pub fn annulus(inner_radius: f64) -> Self {
        Self {
            inner_radius,
            inner: InnerProfile::zero(),
            outer: BoundaryFunction::zeros(2, 0),
        }
    }

    pub fn inner_rho(&self, theta: f64) -> f64 {
        self.inner_radius + self.inner.value(theta)
    }

    pub fn outer_rho(&self, theta: f64) -> f64 {
        1.0 + self.outer.eval(theta)
    }

    /// Curves must be nested and simple; `g` must have zero mean.
    pub fn validate(&self) -> Result<()> {
        if !(self.inner_radius > 0.0 && self.inner_radius < 1.0) {
            return Err(Error::Geometry(format!(
                "inner radius {} outside (0, 1)",
                self.inner_radius
            )));
        }
        if self.outer.dim() != 2 {
            return Err(Error::Unsupported(
                "sampled geometry requires N = 2".into(),
            ));
        }
        if self.outer.mean().abs() > 1e-12 {
            return Err(Error::Geometry(format!(
                "outer perturbation must have zero mean, got {:e}",
                self.outer.mean()
            )));
        }
        let samples = 4096;
        let mut angles: Vec<f64> = (0..samples).map(|j| node_angle(j, samples)).collect();
        angles.extend(self.inner.corners());
        let (mut in_min, mut in_max) = (f64::INFINITY, f64::NEG_INFINITY);
        let mut out_min = f64::INFINITY;
        for &th in &angles {
            let ri = self.inner_rho(th);
            let ro = self.outer_rho(th);
            if !ri.is_finite() || !ro.is_finite() {
                return Err(Error::Geometry("non-finite radius".into()));
            }
            in_min = in_min.min(ri);
            in_max = in_max.max(ri);
            out_min = out_min.min(ro);
        }
        if in_min <= 0.0 {
            return Err(Error::Geometry(format!(
                "inner curve reaches the origin (min radius {in_min})"
            )));
        }
        if in_max >= out_min {
            return Err(Error::Geometry(format!(
                "curves intersect: max inner radius {in_max} >= min outer radius {out_min}"
            )));
        }
        Ok(())
    }
}

/// Quadrature nodes on a closed, counter-clockwise parameterized curve.
#[derive(Debug, Clone)]
pub(crate) struct CurveNodes {
    pub theta: Vec<f64>,
    /// Quadrature weight in the angle variable.
    pub weight: Vec<f64>,
    pub z: Vec<Complex64>,
    /// `dz/dθ`.
    pub dz: Vec<Complex64>,
    /// `d²z/dθ²`.
    pub d2z: Vec<Complex64>,
}

impl CurveNodes {
    /// Radial graph with jet `θ ↦ (ρ, ρ', ρ'')` at the given nodes.
    pub fn radial(theta: Vec<f64>, weight: Vec<f64>, jet: impl Fn(f64) -> (f64, f64, f64)) -> Self {
        let n = theta.len();
        let (mut z, mut dz, mut d2z) = (Vec::with_capacity(n), Vec::with_capacity(n), Vec::with_capacity(n));
        for &th in &theta {
            let (r, r1, r2) = jet(th);
            let e = Complex64::from_polar(1.0, th);
            z.push(e * r);
            dz.push(e * Complex64::new(r1, r));
            d2z.push(e * Complex64::new(r2 - r, 2.0 * r1));
        }
        Self {
            theta,
            weight,
            z,
            dz,
            d2z,
        }
    }

    pub fn len(&self) -> usize {
        self.theta.len()
    }

    /// Outward unit normal (right of the direction of travel).
    pub fn normal(&self, i: usize) -> Complex64 {
        let t = self.dz[i];
        Complex64::new(t.im, -t.re) / t.norm()
    }

    /// Arclength weight `|z'|·w`.
    pub fn ds(&self, i: usize) -> f64 {
        self.dz[i].norm() * self.weight[i]
    }

    /// `Im(z''/z')`, curvature times speed.
    pub fn turning(&self, i: usize) -> f64 {
        (self.d2z[i] / self.dz[i]).im
    }
}

/// `m` equispaced nodes with trapezoidal weights.
pub(crate) fn uniform_nodes(m: usize) -> (Vec<f64>, Vec<f64>) {
    let theta = (0..m).map(|j| node_angle(j, m)).collect();
    (theta, vec![2.0 * PI / m as f64; m])
}

const GRADING_ORDER: i32 = 6;

/// Nodes graded toward each corner: every arc between consecutive corners gets
/// `θ = c + L·v(s)` with `v(s) = sᵖ/(sᵖ + (1−s)ᵖ)`, `s = j/n`, `0 < j < n`.
pub(crate) fn graded_nodes(corners: &[f64], total: usize, min_per_arc: usize) -> (Vec<f64>, Vec<f64>) {
    let mut c: Vec<f64> = corners.iter().map(|t| t.rem_euclid(2.0 * PI)).collect();
    c.sort_by(f64::total_cmp);
    c.dedup_by(|a, b| (*a - *b).abs() < 1e-14);
    let p = GRADING_ORDER;
    let (mut theta, mut weight) = (Vec::new(), Vec::new());
    for a in 0..c.len() {
        let start = c[a];
        let end = if a + 1 < c.len() { c[a + 1] } else { c[0] + 2.0 * PI };
        let len = end - start;
        let n = ((total as f64 * len / (2.0 * PI)).round() as usize).max(min_per_arc);
        for j in 1..n {
            let s = j as f64 / n as f64;
            let (sp, tp) = (s.powi(p), (1.0 - s).powi(p));
            let v = sp / (sp + tp);
            let dv = p as f64 * s.powi(p - 1) * (1.0 - s).powi(p - 1) / (sp + tp).powi(2);
            theta.push(start + len * v);
            weight.push(len * dv / n as f64);
        }
    }
    (theta, weight)
}

impl DomainPair {
    pub(crate) fn outer_nodes(&self, m: usize) -> CurveNodes {
        let d1 = self.outer.derivative();
        let d2 = d1.derivative();
        let (theta, weight) = uniform_nodes(m);
        CurveNodes::radial(theta, weight, |th| {
            (1.0 + self.outer.eval(th), d1.eval(th), d2.eval(th))
        })
    }

    pub(crate) fn inner_nodes(&self, m: usize) -> CurveNodes {
        let corners = self.inner.corners();
        let (theta, weight) = if corners.is_empty() {
            uniform_nodes(m)
        } else {
            graded_nodes(&corners, m, 64)
        };
        let r = self.inner_radius;
        match &self.inner {
            InnerProfile::Fourier { coeffs } => {
                let d1 = coeffs.derivative();
                let d2 = d1.derivative();
                CurveNodes::radial(theta, weight, |th| {
                    (r + coeffs.eval(th), d1.eval(th), d2.eval(th))
                })
            }
            InnerProfile::Tent { notch } => CurveNodes::radial(theta, weight, |th| {
                (r + notch.value(th), notch.slope(th), 0.0)
            }),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn tent_shape() {
        let t = TentNotch::new(0.05, PI / 2.0, 0.5).unwrap();
        assert!((t.value(PI / 2.0) + 0.05).abs() < 1e-15);
        assert_eq!(t.value(PI / 2.0 + 0.2), 0.0);
        assert!((t.value(PI / 2.0 + 0.05) + 0.025).abs() < 1e-15);
        assert_eq!(t.slope(PI / 2.0 + 0.05), 0.5);
        assert_eq!(t.corners().len(), 3);
        assert!(TentNotch::new(0.3, 0.0, 0.5).is_err());
    }

    #[test]
    fn graded_weights_integrate_polynomials() {
        let (theta, w) = graded_nodes(&[0.3, 1.0, 4.0], 256, 64);
        let total: f64 = w.iter().sum();
        assert!((total - 2.0 * PI).abs() < 1e-9, "{total}");
        let integral: f64 = theta.iter().zip(&w).map(|(t, w)| t.cos() * w).sum();
        assert!(integral.abs() < 1e-10, "{integral}");
    }

    #[test]
    fn intersecting_curves_rejected() {
        let d = DomainPair::new(0.5, BoundaryFunction::cos_mode(1, 0.3).into(), BoundaryFunction::cos_mode(1, -0.3));
        assert!(matches!(d, Err(Error::Geometry(_))));
        let d = DomainPair::new(0.5, BoundaryFunction::constant(-0.6).into(), BoundaryFunction::zeros(2, 0));
        assert!(matches!(d, Err(Error::Geometry(_))));
    }

    #[test]
    fn nonzero_mean_outer_rejected() {
        let d = DomainPair::new(0.5, InnerProfile::zero(), BoundaryFunction::constant(0.01));
        assert!(d.is_err());
    }

    #[test]
    fn circle_nodes() {
        let d = DomainPair::annulus(0.5);
        let c = d.outer_nodes(64);
        for i in 0..c.len() {
            assert!((c.normal(i) - c.z[i]).norm() < 1e-15);
            assert!((c.turning(i) - 1.0).abs() < 1e-15);
        }
    }
}
