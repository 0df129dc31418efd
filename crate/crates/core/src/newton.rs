//! Frozen-Jacobian Newton iteration for the free boundary `g(f)`.
//!
//! The update is `gⁿ⁺¹ = gⁿ − λ·L⁻¹ Π₀Ψ(f, gⁿ)` with `L` the diagonal
//! linearization in `g` at the trivial configuration.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::analytic::{self, ProblemKind, ProblemSpec, DEFAULT_SINGULAR_TOL};
use crate::error::{Error, Result};
use crate::pde::{eval_psi, solve_state, DomainPair, InnerProfile};
use crate::spectral::{node_angle, BoundaryFunction, Discretization};

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum InitialGuess {
    #[default]
    FirstOrder,
    Zero,
    Given {
        g: BoundaryFunction,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct SolveParams {
    pub max_iter: usize,
    /// Sup-norm of `Π₀Ψ` at the nodes.
    pub residual_tol: f64,
    pub damping: f64,
    /// Mode cutoff `K` of the update.
    pub cutoff: usize,
    pub singular_guard_tol: f64,
    pub initial: InitialGuess,
}

impl Default for SolveParams {
    fn default() -> Self {
        Self {
            max_iter: 50,
            residual_tol: 1e-9,
            damping: 1.0,
            cutoff: 64,
            singular_guard_tol: DEFAULT_SINGULAR_TOL,
            initial: InitialGuess::FirstOrder,
        }
    }
}

impl SolveParams {
    pub fn validate(&self, disc: &Discretization) -> Result<()> {
        if self.max_iter == 0 {
            return Err(Error::InvalidInput("max_iter must be positive".into()));
        }
        if !(self.residual_tol > 0.0) || !(self.singular_guard_tol > 0.0) {
            return Err(Error::InvalidInput("tolerances must be positive".into()));
        }
        if !(self.damping > 0.0 && self.damping <= 1.0) {
            return Err(Error::InvalidInput(format!(
                "damping must lie in (0, 1], got {}",
                self.damping
            )));
        }
        if self.cutoff == 0 || 4 * self.cutoff > disc.m {
            return Err(Error::InvalidInput(format!(
                "cutoff K={} must satisfy 1 <= K <= M/4 (M={})",
                self.cutoff, disc.m
            )));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SolveReport {
    pub g_final: BoundaryFunction,
    pub c_final: f64,
    /// Sup-norm of `Π₀Ψ` at the nodes, one entry per state solve.
    pub residual_history: Vec<f64>,
    /// `ℓ²` norm of the residual coefficients up to `K`.
    pub coeff_residual_history: Vec<f64>,
    /// Number of state solves.
    pub iterations: usize,
    pub converged: bool,
    /// `max_k |m_g(k)| / min_k |m_g(k)|` over `1 ≤ k ≤ K`.
    pub multiplier_condition: f64,
    /// Pulled-back normal derivative at the last iterate.
    pub dn_values: Vec<f64>,
    pub est_error: f64,
}

impl SolveReport {
    /// Largest normal-derivative sample; negative when the Hopf sign holds.
    pub fn max_dn(&self) -> f64 {
        self.dn_values.iter().copied().fold(f64::NEG_INFINITY, f64::max)
    }
}

fn outer_multipliers(spec: &ProblemSpec, cutoff: usize) -> Result<Vec<f64>> {
    (1..=cutoff as u32)
        .map(|k| Ok(analytic::multipliers(k, spec)?.m_g))
        .collect()
}

fn zero_mean_truncated(g: &BoundaryFunction, cutoff: usize) -> BoundaryFunction {
    let mut out = g.truncated(cutoff);
    out.set_coeff(0, 0, 0.0);
    out
}

fn initial_guess(f: &InnerProfile, spec: &ProblemSpec, params: &SolveParams, disc: &Discretization) -> Result<BoundaryFunction> {
    let g = match &params.initial {
        InitialGuess::Zero => BoundaryFunction::zeros(2, params.cutoff),
        InitialGuess::FirstOrder => {
            let coeffs = f.fourier(disc.m)?.truncated(params.cutoff);
            analytic::first_order_g(&coeffs, spec, params.singular_guard_tol)?
        }
        InitialGuess::Given { g } => {
            if g.dim() != 2 {
                return Err(Error::InvalidInput("initial guess must be a circle function".into()));
            }
            if !g.is_zero_mean() {
                return Err(Error::InvalidInput("initial guess must have zero mean".into()));
            }
            g.clone()
        }
    };
    Ok(zero_mean_truncated(&g, params.cutoff))
}

/// Find `g` with `Π₀Ψ(f, g) = 0`.
///
/// Non-convergence within `max_iter` is reported through `converged = false`;
/// an iterate that leaves the admissible geometry aborts with the last valid
/// iterate attached.
pub fn solve_free_boundary(
    f: &InnerProfile,
    spec: &ProblemSpec,
    params: &SolveParams,
    disc: &Discretization,
) -> Result<SolveReport> {
    spec.validate()?;
    disc.validate()?;
    params.validate(disc)?;
    if spec.dim != 2 {
        return Err(Error::Unsupported("free-boundary solves require N = 2".into()));
    }
    if let ProblemKind::TwoPhase { .. } = spec.kind {
        analytic::check_resonance(spec, params.cutoff as u32, params.singular_guard_tol)?;
    }
    let m_g = outer_multipliers(spec, params.cutoff)?;
    let (lo, hi) = m_g.iter().fold((f64::INFINITY, 0.0f64), |(lo, hi), v| {
        (lo.min(v.abs()), hi.max(v.abs()))
    });
    let multiplier_condition = hi / lo;

    let mut g = initial_guess(f, spec, params, disc)?;
    let mut residual_history = Vec::new();
    let mut coeff_residual_history = Vec::new();
    let mut last_valid = g.clone();
    loop {
        let iteration = residual_history.len();
        let domain = match DomainPair::new(spec.inner_radius, f.clone(), g.clone()) {
            Ok(d) => d,
            Err(Error::Geometry(reason)) => {
                return Err(Error::IterateLeftDomain {
                    iteration,
                    reason,
                    last_valid: Box::new(last_valid),
                })
            }
            Err(e) => return Err(e),
        };
        let field = solve_state(&domain, spec, disc)?;
        let eval = eval_psi(&field);
        let residual = field
            .dn_values
            .iter()
            .map(|v| (v - field.c).abs())
            .fold(0.0, f64::max);
        let truncated = eval.psi.truncated(params.cutoff);
        let coeff_residual = truncated.l2_norm();
        residual_history.push(residual);
        coeff_residual_history.push(coeff_residual);
        log::debug!("iteration {iteration}: residual {residual:e}");
        let converged = residual <= params.residual_tol;
        let exhausted = residual_history.len() >= params.max_iter || !residual.is_finite();
        if converged || exhausted {
            return Ok(SolveReport {
                g_final: g,
                c_final: field.c,
                iterations: residual_history.len(),
                residual_history,
                coeff_residual_history,
                converged,
                multiplier_condition,
                dn_values: field.dn_values,
                est_error: field.est_error,
            });
        }
        last_valid = g.clone();
        let step = truncated.map_modes(|k, c| if k == 0 { 0.0 } else { c / m_g[k - 1] });
        g = zero_mean_truncated(&g.add_scaled(&step, -params.damping), params.cutoff);
    }
}

/// One row of [`asymptotic_check`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AsymptoticRow {
    pub t: f64,
    /// `‖g(tf) − t·g₁‖∞ / t` at the nodes.
    pub ratio: f64,
    pub leading: f64,
    pub converged: bool,
    pub iterations: usize,
    pub max_dn: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AsymptoticTable {
    pub g1: BoundaryFunction,
    pub rows: Vec<AsymptoticRow>,
}

impl AsymptoticTable {
    /// Strictly decreasing ratios over decreasing `t`.
    pub fn monotone(&self) -> bool {
        self.rows.windows(2).all(|w| w[1].ratio < w[0].ratio)
    }

    /// `ratio(t_last)/ratio(t_first)`.
    pub fn reduction(&self) -> f64 {
        match (self.rows.first(), self.rows.last()) {
            (Some(a), Some(b)) if a.ratio > 0.0 => b.ratio / a.ratio,
            _ => 0.0,
        }
    }
}

/// Remainder of the first-order prediction `g ≈ t·g₁` along `t·f`.
pub fn asymptotic_check(
    f: &InnerProfile,
    spec: &ProblemSpec,
    t_list: &[f64],
    params: &SolveParams,
    disc: &Discretization,
) -> Result<AsymptoticTable> {
    if t_list.is_empty() || t_list.iter().any(|t| !(*t > 0.0)) || t_list.windows(2).any(|w| w[1] >= w[0]) {
        return Err(Error::InvalidInput("t values must be positive and decreasing".into()));
    }
    params.validate(disc)?;
    let coeffs = f.fourier(disc.m)?.truncated(params.cutoff);
    let g1 = analytic::first_order_g(&coeffs, spec, params.singular_guard_tol)?;
    let rows = t_list
        .par_iter()
        .map(|&t| -> Result<AsymptoticRow> {
            let report = solve_free_boundary(&f.scaled(t), spec, params, disc)?;
            let diff = report.g_final.add_scaled(&g1, -t);
            let leading = report.g_final.coeffs().get(1).map_or(0.0, |m| m[0]);
            Ok(AsymptoticRow {
                t,
                ratio: diff.sup_norm(disc.m) / t,
                leading,
                converged: report.converged,
                iterations: report.iterations,
                max_dn: report.max_dn(),
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(AsymptoticTable { g1, rows })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SymmetryReport {
    pub axis: f64,
    /// `max_j |g(θ_j) − g(2φ − θ_j)|`.
    pub asymmetry: f64,
    pub pass: bool,
    pub solve: SolveReport,
}

/// `‖g − g∘γ‖∞` for the reflection `γ: θ ↦ 2φ − θ` of a symmetric `f`.
pub fn symmetry_check(
    f: &InnerProfile,
    axis: f64,
    spec: &ProblemSpec,
    params: &SolveParams,
    disc: &Discretization,
) -> Result<SymmetryReport> {
    let defect = f.reflection_defect(axis, 4096);
    if defect > 1e-12 {
        return Err(Error::InvalidInput(format!(
            "inner perturbation is not symmetric about {axis} (defect {defect:e})"
        )));
    }
    let solve = solve_free_boundary(f, spec, params, disc)?;
    let asymmetry = (0..disc.m)
        .map(|j| {
            let th = node_angle(j, disc.m);
            (solve.g_final.eval(th) - solve.g_final.eval(2.0 * axis - th)).abs()
        })
        .fold(0.0, f64::max);
    Ok(SymmetryReport {
        axis,
        asymmetry,
        pass: solve.converged && asymmetry <= 10.0 * params.residual_tol,
        solve,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct UniquenessReport {
    pub reference: SolveReport,
    /// `(scale of the restart guess, sup distance to the reference g)`.
    pub restarts: Vec<(f64, f64)>,
    pub max_distance: f64,
    pub all_converged: bool,
}

/// Restart the iteration from `λ·g_final` for each `λ` and measure how far the
/// converged solutions land from the reference.
pub fn uniqueness_check(
    f: &InnerProfile,
    spec: &ProblemSpec,
    params: &SolveParams,
    disc: &Discretization,
    scales: &[f64],
) -> Result<UniquenessReport> {
    let reference = solve_free_boundary(f, spec, params, disc)?;
    let runs = scales
        .par_iter()
        .map(|&s| -> Result<(f64, f64, bool)> {
            let p = SolveParams {
                initial: InitialGuess::Given {
                    g: reference.g_final.scaled(s),
                },
                ..params.clone()
            };
            let r = solve_free_boundary(f, spec, &p, disc)?;
            let d = r.g_final.add_scaled(&reference.g_final, -1.0).sup_norm(disc.m);
            Ok((s, d, r.converged))
        })
        .collect::<Result<Vec<_>>>()?;
    let max_distance = runs.iter().map(|r| r.1).fold(0.0, f64::max);
    Ok(UniquenessReport {
        all_converged: reference.converged && runs.iter().all(|r| r.2),
        restarts: runs.iter().map(|r| (r.0, r.1)).collect(),
        max_distance,
        reference,
    })
}
