//! Nyström discretizations of the two state problems.
//!
//! Both solvers represent the state through complex Cauchy integrals so that
//! gradients on the outer curve reduce to Cauchy integrals of tangential
//! derivatives of the density (no hypersingular kernels).

use std::f64::consts::PI;

use nalgebra::{DMatrix, DVector};
use rustfft::num_complex::Complex64;

use super::geometry::{CurveNodes, DomainPair};
use super::linalg::solve_guarded;
use super::BoundaryField;
use crate::analytic::{ProblemKind, ProblemSpec};
use crate::error::{Error, Result};
use crate::spectral::{analyze, periodic_derivative, Discretization};

const I: Complex64 = Complex64 { re: 0.0, im: 1.0 };

/// Double-layer kernel `Im(z_j'/(z_j − z)) w_j / 2π`, with the smooth diagonal
/// limit when the target is node `i` of the same curve.
fn double_layer(target: Complex64, src: &CurveNodes, j: usize, self_node: bool) -> f64 {
    if self_node {
        src.turning(j) * src.weight[j] / (4.0 * PI)
    } else {
        (src.dz[j] / (src.z[j] - target)).im * src.weight[j] / (2.0 * PI)
    }
}

/// Interior limit on a smooth periodic curve of `F'(z)` for
/// `F(z) = (2πi)⁻¹ ∮ μ dζ/(ζ − z)`.
fn cauchy_derivative_on_curve(curve: &CurveNodes, mu: &[f64]) -> Vec<Complex64> {
    let m = curve.len();
    let mu_c: Vec<Complex64> = mu.iter().map(|&v| Complex64::new(v, 0.0)).collect();
    let mu_t = periodic_derivative(&mu_c);
    let h: Vec<Complex64> = (0..m).map(|j| mu_t[j] / curve.dz[j]).collect();
    let h_t = periodic_derivative(&h);
    (0..m)
        .map(|i| {
            let mut s = h_t[i] * curve.weight[i];
            for j in 0..m {
                if j != i {
                    s += (h[j] - h[i]) * curve.dz[j] * curve.weight[j] / (curve.z[j] - curve.z[i]);
                }
            }
            h[i] + s / (2.0 * PI * I)
        })
        .collect()
}

/// `(2πi)⁻¹ ∮ μ dζ/(ζ − z)²` for `z` off the curve.
fn cauchy_derivative_off(curve: &CurveNodes, mu: &[f64], z: Complex64) -> Complex64 {
    let mut s = Complex64::new(0.0, 0.0);
    for j in 0..curve.len() {
        let d = curve.z[j] - z;
        s += mu[j] * curve.dz[j] * curve.weight[j] / (d * d);
    }
    s / (2.0 * PI * I)
}

/// Largest Fourier coefficient magnitude above `3M/8`, a resolution indicator.
fn spectral_tail(values: &[f64]) -> Result<f64> {
    let f = analyze(values)?;
    Ok(f.tail_max(3 * values.len() / 8))
}

fn finish(
    outer: &CurveNodes,
    dn: Vec<f64>,
    mu_outer: &[f64],
    cond: f64,
    extra_error: f64,
) -> Result<BoundaryField> {
    let scale = dn.iter().fold(0.0f64, |a, v| a.max(v.abs()));
    // roundoff of the solve plus amplification by spectral differentiation
    let m = dn.len() as f64;
    let est = spectral_tail(&dn)?
        + spectral_tail(mu_outer)?
        + (cond + m) * m * f64::EPSILON * scale
        + extra_error;
    let ds = (0..outer.len()).map(|i| outer.ds(i)).collect();
    BoundaryField::from_samples(outer.theta.clone(), dn, ds, est, cond)
}

fn check_inputs(domain: &DomainPair, disc: &Discretization) -> Result<()> {
    disc.validate()?;
    domain.validate()
}

/// Heuristic error floor on graded corner meshes, which are not covered by the
/// spectral indicators.
fn corner_floor(domain: &DomainPair, m: usize) -> f64 {
    if domain.inner.corners().is_empty() {
        0.0
    } else {
        (64.0 / m as f64).powi(4) * 1e-6
    }
}

/// Harmonic `u` with `u = 1` on the inner curve and `u = 0` on the outer one.
///
/// `u = D_out[μ] − D_in[ν] + (∮ν ds)·log|z|`; the logarithm removes the null
/// space of the double-layer system on a doubly connected domain.
pub fn solve_bernoulli_state(domain: &DomainPair, disc: &Discretization) -> Result<BoundaryField> {
    check_inputs(domain, disc)?;
    let outer = domain.outer_nodes(disc.m);
    let inner = domain.inner_nodes(disc.m);
    let (no, ni) = (outer.len(), inner.len());
    let n = no + ni;
    let mut a = DMatrix::<f64>::zeros(n, n);
    let mut rhs = DVector::<f64>::zeros(n);
    let targets: Vec<Complex64> = outer.z.iter().chain(&inner.z).copied().collect();
    for (row, &z) in targets.iter().enumerate() {
        let on_outer = row < no;
        let log_r = z.norm().ln();
        for j in 0..no {
            let same = on_outer && row == j;
            a[(row, j)] = double_layer(z, &outer, j, same) + if same { 0.5 } else { 0.0 };
        }
        for j in 0..ni {
            let same = !on_outer && row - no == j;
            a[(row, no + j)] = -double_layer(z, &inner, j, same)
                + log_r * inner.ds(j)
                + if same { 0.5 } else { 0.0 };
        }
        if !on_outer {
            rhs[row] = 1.0;
        }
    }
    let (sol, cond) = solve_guarded(a, &rhs)?;
    let mu: Vec<f64> = sol.rows(0, no).iter().copied().collect();
    let nu: Vec<f64> = sol.rows(no, ni).iter().copied().collect();
    let charge: f64 = (0..ni).map(|j| nu[j] * inner.ds(j)).sum();
    let grad_outer = cauchy_derivative_on_curve(&outer, &mu);
    let dn = (0..no)
        .map(|i| {
            let z = outer.z[i];
            let g = grad_outer[i] - cauchy_derivative_off(&inner, &nu, z) + charge / z;
            (g * outer.normal(i)).re
        })
        .collect();
    finish(&outer, dn, &mu, cond, corner_floor(domain, disc.m))
}

/// `u` with `−div(σ∇u) = 1`, `σ = σ_c` inside the inner curve and `1`
/// outside, `u = 0` on the outer curve.
///
/// The particular part `P = −|x|²/4 + (1/σ_c − 1)·N_D`, with `N_D` the
/// Newtonian potential of the inner region, is continuous with continuous
/// gradient. The harmonic remainder `S_in[φ] + Re F_out[μ]` carries the flux
/// transmission and the Dirichlet data.
pub fn solve_two_phase_state(
    domain: &DomainPair,
    spec: &ProblemSpec,
    disc: &Discretization,
) -> Result<BoundaryField> {
    check_inputs(domain, disc)?;
    spec.validate()?;
    let sigma = match spec.kind {
        ProblemKind::TwoPhase { sigma_c } => sigma_c,
        ProblemKind::Bernoulli => {
            return Err(Error::InvalidInput("two-phase solve needs a two-phase spec".into()))
        }
    };
    if spec.dim != 2 {
        return Err(Error::Unsupported("boundary-integral solves require N = 2".into()));
    }
    if (spec.inner_radius - domain.inner_radius).abs() > 1e-15 {
        return Err(Error::InvalidInput("spec and domain disagree on R".into()));
    }
    let outer = domain.outer_nodes(disc.m);
    let inner = domain.inner_nodes(disc.m);
    let (no, ni) = (outer.len(), inner.len());
    let n = ni + no;
    let contrast = 1.0 / sigma - 1.0;

    let newton_value = |z: Complex64| -> f64 {
        (0..ni)
            .map(|j| {
                let w = inner.z[j];
                let proj = ((w - z) * inner.normal(j).conj()).re;
                proj * (1.0 / (8.0 * PI) - (z - w).norm().ln() / (4.0 * PI)) * inner.ds(j)
            })
            .sum()
    };
    // ∂x − i∂y of N_D; `self_node` marks a target sitting on inner node `i`.
    let newton_grad = |z: Complex64, self_node: Option<usize>| -> Complex64 {
        let mut s = Complex64::new(0.0, 0.0);
        for j in 0..ni {
            let w = inner.z[j];
            s += if self_node == Some(j) {
                -inner.dz[j].conj() * inner.weight[j]
            } else {
                (w.conj() - z.conj()) / (z - w) * inner.dz[j] * inner.weight[j]
            };
        }
        -s / (4.0 * PI * I)
    };
    let particular_grad = |z: Complex64, self_node: Option<usize>| -> Complex64 {
        -z.conj() / 2.0 + contrast * newton_grad(z, self_node)
    };

    let mut a = DMatrix::<f64>::zeros(n, n);
    let mut rhs = DVector::<f64>::zeros(n);
    for i in 0..ni {
        let z = inner.z[i];
        let nrm = inner.normal(i);
        for j in 0..ni {
            let k_adj = if i == j {
                -inner.turning(i) * inner.weight[i] / (4.0 * PI)
            } else {
                -(nrm / (z - inner.z[j])).re * inner.ds(j) / (2.0 * PI)
            };
            a[(i, j)] = (sigma - 1.0) * k_adj + if i == j { 0.5 * (1.0 + sigma) } else { 0.0 };
        }
        for j in 0..no {
            let d = outer.z[j] - z;
            let kern = outer.dz[j] * outer.weight[j] / (2.0 * PI * I * d * d);
            a[(i, ni + j)] = (sigma - 1.0) * (nrm * kern).re;
        }
        rhs[i] = -(sigma - 1.0) * (particular_grad(z, Some(i)) * nrm).re;
    }
    for i in 0..no {
        let z = outer.z[i];
        let row = ni + i;
        for j in 0..ni {
            a[(row, j)] = -(z - inner.z[j]).norm().ln() * inner.ds(j) / (2.0 * PI);
        }
        for j in 0..no {
            a[(row, ni + j)] = double_layer(z, &outer, j, i == j) + if i == j { 0.5 } else { 0.0 };
        }
        rhs[row] = z.norm_sqr() / 4.0 - contrast * newton_value(z);
    }
    let (sol, cond) = solve_guarded(a, &rhs)?;
    let phi: Vec<f64> = sol.rows(0, ni).iter().copied().collect();
    let mu: Vec<f64> = sol.rows(ni, no).iter().copied().collect();
    let grad_outer = cauchy_derivative_on_curve(&outer, &mu);
    let dn = (0..no)
        .map(|i| {
            let z = outer.z[i];
            let single: Complex64 = (0..ni)
                .map(|j| phi[j] * inner.ds(j) / (z - inner.z[j]))
                .sum::<Complex64>()
                / (-2.0 * PI);
            let g = particular_grad(z, None) + single + grad_outer[i];
            (g * outer.normal(i)).re
        })
        .collect();
    finish(&outer, dn, &mu, cond, corner_floor(domain, disc.m))
}

/// Dispatch on the problem kind.
pub fn solve_state(domain: &DomainPair, spec: &ProblemSpec, disc: &Discretization) -> Result<BoundaryField> {
    match spec.kind {
        ProblemKind::Bernoulli => {
            if spec.dim != 2 {
                return Err(Error::Unsupported("boundary-integral solves require N = 2".into()));
            }
            if (spec.inner_radius - domain.inner_radius).abs() > 1e-15 {
                return Err(Error::InvalidInput("spec and domain disagree on R".into()));
            }
            solve_bernoulli_state(domain, disc)
        }
        ProblemKind::TwoPhase { .. } => solve_two_phase_state(domain, spec, disc),
    }
}
