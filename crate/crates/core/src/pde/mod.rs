//! State solves on perturbed annuli and the overdetermined residual `Ψ`.

mod geometry;
mod linalg;
mod linearization;
mod solver;

use serde::{Deserialize, Serialize};

pub use geometry::{wrap_angle, DomainPair, InnerProfile, TentNotch};
pub use linalg::MAX_CONDITION;
pub use linearization::{
    directional_derivative_psi, extrapolate, DerivativeEstimate, DifferenceScheme, ModeSel, Side,
};
pub use solver::{solve_bernoulli_state, solve_state, solve_two_phase_state};

use crate::error::Result;
use crate::spectral::{analyze, project_zero_mean, BoundaryFunction};

/// Normal derivative of the state on the outer curve, pulled back to the
/// equispaced nodes of the unit circle.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoundaryField {
    pub nodes: Vec<f64>,
    pub dn_values: Vec<f64>,
    /// Plain nodal mean of `dn_values`.
    pub c: f64,
    /// Zero-mean part of `dn_values`.
    pub psi: BoundaryFunction,
    pub est_error: f64,
    pub condition_estimate: f64,
    /// Arclength quadrature weights of the outer curve at the nodes.
    pub arc_weights: Vec<f64>,
}

impl BoundaryField {
    pub(crate) fn from_samples(
        nodes: Vec<f64>,
        dn_values: Vec<f64>,
        arc_weights: Vec<f64>,
        est_error: f64,
        condition_estimate: f64,
    ) -> Result<Self> {
        let full = analyze(&dn_values)?;
        Ok(Self {
            nodes,
            c: full.mean(),
            psi: project_zero_mean(&full),
            dn_values,
            est_error,
            condition_estimate,
            arc_weights,
        })
    }

    /// `∮ ∂ₙu ds` over the outer curve.
    pub fn outer_flux(&self) -> f64 {
        self.dn_values
            .iter()
            .zip(&self.arc_weights)
            .map(|(d, w)| d * w)
            .sum()
    }

    /// Indices of nodes where `∂ₙu ≥ 0`.
    pub fn hopf_violations(&self) -> Vec<usize> {
        self.dn_values
            .iter()
            .enumerate()
            .filter(|(_, &v)| v >= 0.0)
            .map(|(j, _)| j)
            .collect()
    }
}

/// Result of [`eval_psi`].
#[derive(Debug, Clone, PartialEq)]
pub struct PsiEval {
    pub psi: BoundaryFunction,
    pub c: f64,
    pub hopf_violation: bool,
}

/// Zero-mean coefficients of the pulled-back normal derivative and the removed
/// mean. Logs a warning when the Hopf sign fails somewhere.
pub fn eval_psi(field: &BoundaryField) -> PsiEval {
    let violations = field.hopf_violations();
    if !violations.is_empty() {
        log::warn!(
            "normal derivative is non-negative at {} node(s), first at theta = {}",
            violations.len(),
            field.nodes[violations[0]]
        );
    }
    PsiEval {
        psi: field.psi.clone(),
        c: field.c,
        hopf_violation: !violations.is_empty(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn psi_of_field_has_zero_mean() {
        let nodes: Vec<f64> = (0..64).map(|j| crate::spectral::node_angle(j, 64)).collect();
        let dn: Vec<f64> = nodes.iter().map(|t| -1.0 + 0.1 * t.cos()).collect();
        let f = BoundaryField::from_samples(nodes, dn, vec![0.1; 64], 0.0, 1.0).unwrap();
        let e = eval_psi(&f);
        assert_eq!(e.psi.mean(), 0.0);
        assert!((e.c + 1.0).abs() < 1e-15);
        assert!(!e.hopf_violation);
    }

    #[test]
    fn hopf_violation_flagged() {
        let nodes: Vec<f64> = (0..64).map(|j| crate::spectral::node_angle(j, 64)).collect();
        let dn: Vec<f64> = nodes.iter().map(|t| -0.1 + 0.5 * t.cos()).collect();
        let f = BoundaryField::from_samples(nodes, dn, vec![0.1; 64], 0.0, 1.0).unwrap();
        assert!(eval_psi(&f).hopf_violation);
    }
}
