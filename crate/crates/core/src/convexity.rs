//! Curvature of radial graphs and the convex-outer / nonconvex-inner notch
//! experiment.

use serde::{Deserialize, Serialize};

use crate::analytic::ProblemSpec;
use crate::error::Result;
use crate::newton::{solve_free_boundary, SolveParams, SolveReport};
use crate::pde::{InnerProfile, TentNotch};
use crate::spectral::{node_angle, BoundaryFunction, Discretization};

/// Signed curvature of `ρ(θ)`: `(ρ² + 2ρ'² − ρρ'')/(ρ² + ρ'²)^{3/2}`.
pub fn radial_curvature(rho: f64, d1: f64, d2: f64) -> f64 {
    (rho * rho + 2.0 * d1 * d1 - rho * d2) / (rho * rho + d1 * d1).powf(1.5)
}

/// Curvature of `ρ = 1 + g` at `m` equispaced nodes.
pub fn outer_curvature(g: &BoundaryFunction, m: usize) -> Vec<f64> {
    let d1 = g.derivative();
    let d2 = d1.derivative();
    (0..m)
        .map(|j| {
            let th = node_angle(j, m);
            radial_curvature(1.0 + g.eval(th), d1.eval(th), d2.eval(th))
        })
        .collect()
}

/// Whether the region `ρ < R + a(θ)` is convex.
///
/// An inward notch with positive amplitude has a reentrant corner at its tip,
/// so it is never convex. Smooth profiles are tested through their sampled
/// curvature.
pub fn inner_region_convex(inner_radius: f64, profile: &InnerProfile, m: usize) -> bool {
    match profile {
        InnerProfile::Tent { notch } => notch.amplitude <= 0.0,
        InnerProfile::Fourier { coeffs } => {
            let d1 = coeffs.derivative();
            let d2 = d1.derivative();
            (0..m).all(|j| {
                let th = node_angle(j, m);
                radial_curvature(inner_radius + coeffs.eval(th), d1.eval(th), d2.eval(th)) >= 0.0
            })
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CurvatureReport {
    pub nodes: Vec<f64>,
    pub outer_curvature: Vec<f64>,
    pub min_curvature: f64,
    pub outer_convex: bool,
    pub inner_convex: bool,
}

impl CurvatureReport {
    pub fn new(inner_radius: f64, inner: &InnerProfile, g: &BoundaryFunction, m: usize) -> Self {
        let curvature = outer_curvature(g, m);
        let min_curvature = curvature.iter().copied().fold(f64::INFINITY, f64::min);
        Self {
            nodes: (0..m).map(|j| node_angle(j, m)).collect(),
            min_curvature,
            outer_convex: min_curvature >= 0.0,
            inner_convex: inner_region_convex(inner_radius, inner, m),
            outer_curvature: curvature,
        }
    }

    /// Outer curve strictly convex while the inner region is not.
    pub fn is_counterexample(&self) -> bool {
        self.min_curvature > 0.0 && !self.inner_convex
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NotchRun {
    pub t: f64,
    pub solve: SolveReport,
    pub curvature: CurvatureReport,
}

impl NotchRun {
    pub fn success(&self) -> bool {
        self.solve.converged && self.curvature.is_counterexample()
    }
}

/// Free boundary for the notch scaled by `t` and the curvature of the result.
pub fn run_notch(
    notch: &TentNotch,
    t: f64,
    spec: &ProblemSpec,
    params: &SolveParams,
    disc: &Discretization,
) -> Result<NotchRun> {
    let inner = InnerProfile::from(notch.scaled(t));
    let solve = solve_free_boundary(&inner, spec, params, disc)?;
    let curvature = CurvatureReport::new(spec.inner_radius, &inner, &solve.g_final, disc.m);
    Ok(NotchRun { t, solve, curvature })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Threshold {
    /// Largest tested `t` with a successful run.
    pub t: f64,
    /// Smallest tested failing `t`, if any.
    pub failing_t: Option<f64>,
    pub run: NotchRun,
    /// `(t, success)` in evaluation order.
    pub probes: Vec<(f64, bool)>,
}

/// Bisect on `(0, t_max]` for the largest notch scale that still yields a
/// convex outer curve with a converged solve. Solver failures count as
/// unsuccessful probes.
pub fn bisect_threshold(
    notch: &TentNotch,
    t_max: f64,
    steps: usize,
    spec: &ProblemSpec,
    params: &SolveParams,
    disc: &Discretization,
) -> Result<Option<Threshold>> {
    let mut probes = Vec::new();
    let mut probe = |t: f64| -> Option<NotchRun> {
        let run = run_notch(notch, t, spec, params, disc);
        let ok = matches!(&run, Ok(r) if r.success());
        if let Err(e) = &run {
            log::info!("notch scale {t}: {e}");
        }
        probes.push((t, ok));
        run.ok().filter(|r| r.success())
    };
    if let Some(run) = probe(t_max) {
        return Ok(Some(Threshold {
            t: t_max,
            failing_t: None,
            run,
            probes,
        }));
    }
    let (mut lo, mut hi) = (0.0, t_max);
    let mut best = None;
    for _ in 0..steps {
        let mid = 0.5 * (lo + hi);
        match probe(mid) {
            Some(run) => {
                lo = mid;
                best = Some(run);
            }
            None => hi = mid,
        }
    }
    Ok(best.map(|run| Threshold {
        t: lo,
        failing_t: Some(hi),
        run,
        probes,
    }))
}
