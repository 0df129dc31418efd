//! Finite-difference estimates of the multipliers of the linearized residual.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::geometry::{DomainPair, InnerProfile};
use super::solver::solve_state;
use crate::analytic::ProblemSpec;
use crate::error::{Error, Result};
use crate::spectral::{BoundaryFunction, Discretization, Parity};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Side {
    Inner,
    Outer,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct ModeSel {
    pub k: usize,
    pub parity: Parity,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum DifferenceScheme {
    Forward,
    #[default]
    Central,
}

impl DifferenceScheme {
    /// Leading power of `t` in the truncation error.
    pub fn order(self) -> i32 {
        match self {
            DifferenceScheme::Forward => 1,
            DifferenceScheme::Central => 2,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DerivativeEstimate {
    pub mode: ModeSel,
    pub side: Side,
    pub scheme: DifferenceScheme,
    /// Extrapolated limit `t → 0`.
    pub limit: f64,
    /// `+∞` when successive quotients agree to solver noise.
    pub observed_order: f64,
    /// `(t, difference quotient)`.
    pub table: Vec<(f64, f64)>,
}

/// Polynomial extrapolation to `t = 0` in the variable `tᵖ` (Neville).
pub fn extrapolate(ts: &[f64], values: &[f64], power: i32) -> f64 {
    let h: Vec<f64> = ts.iter().map(|t| t.powi(power)).collect();
    let mut p = values.to_vec();
    let n = p.len();
    for level in 1..n {
        for i in 0..n - level {
            let (hi, hj) = (h[i], h[i + level]);
            p[i] = (hj * p[i] - hi * p[i + 1]) / (hj - hi);
        }
    }
    p[0]
}

fn perturbed(spec: &ProblemSpec, side: Side, mode: ModeSel, t: f64) -> DomainPair {
    let e = BoundaryFunction::mode(mode.k, mode.parity, t);
    let mut d = DomainPair::annulus(spec.inner_radius);
    match side {
        Side::Inner => d.inner = InnerProfile::from(e),
        Side::Outer => d.outer = e,
    }
    d
}

fn projected(spec: &ProblemSpec, side: Side, mode: ModeSel, t: f64, disc: &Discretization) -> Result<f64> {
    let field = solve_state(&perturbed(spec, side, mode, t), spec, disc)?;
    let k = mode.k;
    Ok(if k < field.psi.coeffs().len() {
        field.psi.coeff(k, if k == 0 { 0 } else { mode.parity.index() })
    } else {
        0.0
    })
}

/// Difference quotients of `Ψ` along `t·e_k` projected on mode `k`, their
/// extrapolated limit and the observed order in `t`.
pub fn directional_derivative_psi(
    mode: ModeSel,
    side: Side,
    spec: &ProblemSpec,
    t_list: &[f64],
    disc: &Discretization,
    scheme: DifferenceScheme,
) -> Result<DerivativeEstimate> {
    spec.validate()?;
    disc.validate()?;
    if t_list.len() < 2 {
        return Err(Error::InvalidInput("need at least two step sizes".into()));
    }
    if t_list.iter().any(|t| !(t.is_finite() && *t > 0.0)) || t_list.windows(2).any(|w| w[1] >= w[0]) {
        return Err(Error::InvalidInput("step sizes must be positive and decreasing".into()));
    }
    if side == Side::Outer && mode.k == 0 {
        return Err(Error::InvalidInput("outer perturbations must have zero mean".into()));
    }
    if mode.k > disc.cutoff {
        return Err(Error::InvalidInput(format!("mode {} above cutoff {}", mode.k, disc.cutoff)));
    }
    let base = match scheme {
        DifferenceScheme::Forward => projected(spec, side, mode, 0.0, disc)?,
        DifferenceScheme::Central => 0.0,
    };
    let quotients: Vec<f64> = t_list
        .par_iter()
        .map(|&t| -> Result<f64> {
            let plus = projected(spec, side, mode, t, disc)?;
            Ok(match scheme {
                DifferenceScheme::Forward => (plus - base) / t,
                DifferenceScheme::Central => (plus - projected(spec, side, mode, -t, disc)?) / (2.0 * t),
            })
        })
        .collect::<Result<_>>()?;
    let table: Vec<(f64, f64)> = t_list.iter().copied().zip(quotients.iter().copied()).collect();
    let observed_order = observed_order(&table);
    if observed_order < 0.5 {
        return Err(Error::NonConvergent {
            order: observed_order,
            values: table,
        });
    }
    let limit = extrapolate(t_list, &quotients, scheme.order());
    Ok(DerivativeEstimate {
        mode,
        side,
        scheme,
        limit,
        observed_order,
        table,
    })
}

/// Order from the last three quotients; with two, the nominal order is
/// assumed unless they disagree beyond noise.
fn observed_order(table: &[(f64, f64)]) -> f64 {
    let n = table.len();
    let scale = table.iter().fold(1e-300f64, |a, (_, q)| a.max(q.abs()));
    let noise = 1e-9 * scale.max(1.0);
    if n < 3 {
        let d = (table[1].1 - table[0].1).abs();
        return if d <= noise { f64::INFINITY } else { 1.0 };
    }
    let (t0, q0) = table[n - 3];
    let (t1, q1) = table[n - 2];
    let (_, q2) = table[n - 1];
    let (d1, d2) = ((q0 - q1).abs(), (q1 - q2).abs());
    if d1 <= noise && d2 <= noise {
        return f64::INFINITY;
    }
    if d2 <= noise {
        return f64::INFINITY;
    }
    (d1 / d2).ln() / (t0 / t1).ln()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn neville_removes_quadratic_error() {
        let ts = [0.1, 0.05, 0.025];
        let v: Vec<f64> = ts.iter().map(|&t: &f64| 3.0 + 2.0 * t * t + 5.0 * t.powi(4)).collect();
        assert!((extrapolate(&ts, &v, 2) - 3.0).abs() < 1e-13);
    }

    #[test]
    fn order_detection() {
        let table: Vec<(f64, f64)> = [0.1, 0.05, 0.025].iter().map(|&t| (t, 1.0 + t * t)).collect();
        assert!((observed_order(&table) - 2.0).abs() < 1e-9);
        let flat: Vec<(f64, f64)> = [0.1, 0.05, 0.025].iter().map(|&t| (t, 1.0)).collect();
        assert!(observed_order(&flat).is_infinite());
        let bad = vec![(0.1, 1.0), (0.05, 2.0), (0.025, 4.0)];
        assert!(observed_order(&bad) < 0.5);
    }
}
