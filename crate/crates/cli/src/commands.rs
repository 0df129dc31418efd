use rayon::prelude::*;
use serde::Serialize;
use serde_json::json;

use overdet_core::analytic::{self, bernoulli_inner_multiplier_outer_flux, nearest_resonance, sigma_singular};
use overdet_core::convexity::{bisect_threshold, run_notch};
use overdet_core::newton::{asymptotic_check, solve_free_boundary, symmetry_check, SolveReport};
use overdet_core::pde::{directional_derivative_psi, ModeSel, Side};
use overdet_core::spectral::Parity;
use overdet_core::{Error, MultiplierTable, ProblemKind, ProblemSpec};

use crate::config::{ExperimentConfig, InnerReference, ModeSpec};
use crate::output::{num, OutputDir, Provenance};
use crate::CliError;

pub struct Outcome {
    pub success: bool,
    pub summary: Vec<String>,
}

pub struct Ctx<'a> {
    pub command: &'a str,
    pub config: &'a ExperimentConfig,
    pub out: &'a mut OutputDir,
    pub seed: Option<u64>,
}

impl Ctx<'_> {
    fn json<T: Serialize>(&mut self, name: &str, body: &T) -> Result<(), CliError> {
        let prov = Provenance::new(self.command, self.seed, self.config);
        self.out.json(name, &prov, body).map_err(CliError::Io)
    }

    fn csv(&mut self, name: &str, header: &[&str], rows: &[Vec<String>]) -> Result<(), CliError> {
        self.out.csv(name, header, rows).map_err(CliError::Io)
    }
}

fn numerical(e: Error) -> CliError {
    CliError::Numerical(e.to_string())
}

/// Sampled solves only exist in the plane.
pub fn require_planar(config: &ExperimentConfig) -> Result<(), CliError> {
    if config.problem.dim != 2 {
        return Err(CliError::Config(format!(
            "this command solves boundary-value problems and requires dim = 2, got {}",
            config.problem.dim
        )));
    }
    Ok(())
}

fn parity_name(p: Parity) -> &'static str {
    match p {
        Parity::Cos => "cos",
        Parity::Sin => "sin",
    }
}

fn side_name(s: Side) -> &'static str {
    match s {
        Side::Inner => "inner",
        Side::Outer => "outer",
    }
}

pub fn multipliers(ctx: &mut Ctx) -> Result<Outcome, CliError> {
    let spec = ctx.config.problem;
    let table = MultiplierTable::build(&spec, ctx.config.solve.cutoff as u32).map_err(numerical)?;
    let two_phase = matches!(spec.kind, ProblemKind::TwoPhase { .. });
    let header: &[&str] = if two_phase {
        &["k", "m_f", "m_g", "F", "s_k"]
    } else {
        &["k", "m_f", "m_g"]
    };
    let rows: Vec<Vec<String>> = table
        .entries
        .iter()
        .map(|e| {
            let mut row = vec![e.k.to_string(), num(e.m_f), num(e.m_g)];
            if let (Some(f), Some(s)) = (e.f_denominator, e.s_k) {
                row.push(num(f));
                row.push(num(s));
            }
            row
        })
        .collect();
    ctx.csv("multipliers.csv", header, &rows)?;
    Ok(Outcome {
        success: true,
        summary: vec![format!(
            "{} modes; outer multiplier condition {:.6e}",
            rows.len(),
            table.condition()
        )],
    })
}

fn reference_multiplier(spec: &ProblemSpec, mode: &ModeSpec, inner_ref: InnerReference) -> Result<f64, Error> {
    let k = mode.k as u32;
    match mode.side {
        Side::Outer => Ok(analytic::multipliers(k, spec)?.m_g),
        Side::Inner if k == 0 => Ok(0.0),
        Side::Inner => match (spec.kind, inner_ref) {
            (ProblemKind::Bernoulli, InnerReference::OuterFlux) => bernoulli_inner_multiplier_outer_flux(k, spec),
            _ => Ok(analytic::multipliers(k, spec)?.m_f),
        },
    }
}

struct VerifyRow {
    mode: ModeSpec,
    estimate: f64,
    reference: f64,
    rel_err: f64,
    order: f64,
    pass: bool,
    table: Vec<(f64, f64)>,
    note: String,
}

pub fn verify_linearization(ctx: &mut Ctx) -> Result<Outcome, CliError> {
    require_planar(ctx.config)?;
    let cfg = ctx.config;
    let spec = cfg.problem;
    let v = &cfg.verify;
    let rows: Vec<VerifyRow> = v
        .effective_modes()
        .par_iter()
        .map(|m| -> Result<VerifyRow, CliError> {
            let reference = reference_multiplier(&spec, m, v.inner_reference).map_err(numerical)?;
            let sel = ModeSel { k: m.k, parity: m.parity };
            match directional_derivative_psi(sel, m.side, &spec, &v.t_list, &cfg.discretization, v.scheme) {
                Ok(est) => {
                    let rel_err = if reference == 0.0 {
                        est.limit.abs()
                    } else {
                        ((est.limit - reference) / reference).abs()
                    };
                    Ok(VerifyRow {
                        mode: *m,
                        estimate: est.limit,
                        reference,
                        rel_err,
                        order: est.observed_order,
                        pass: rel_err <= v.tolerance,
                        table: est.table,
                        note: String::new(),
                    })
                }
                Err(Error::NonConvergent { order, values }) => Ok(VerifyRow {
                    mode: *m,
                    estimate: f64::NAN,
                    reference,
                    rel_err: f64::NAN,
                    order,
                    pass: false,
                    table: values,
                    note: "non-convergent difference quotients".into(),
                }),
                Err(e) => Err(numerical(e)),
            }
        })
        .collect::<Result<_, _>>()?;
    let csv_rows: Vec<Vec<String>> = rows
        .iter()
        .map(|r| {
            vec![
                side_name(r.mode.side).into(),
                r.mode.k.to_string(),
                parity_name(r.mode.parity).into(),
                num(r.estimate),
                num(r.reference),
                num(r.rel_err),
                num(r.order),
                r.pass.to_string(),
                r.note.clone(),
            ]
        })
        .collect();
    ctx.csv(
        "linearization.csv",
        &["side", "k", "parity", "estimate", "reference", "rel_err", "observed_order", "pass", "note"],
        &csv_rows,
    )?;
    let conv_rows: Vec<Vec<String>> = rows
        .iter()
        .flat_map(|r| {
            r.table.iter().map(move |(t, q)| {
                vec![
                    side_name(r.mode.side).into(),
                    r.mode.k.to_string(),
                    parity_name(r.mode.parity).into(),
                    num(*t),
                    num(*q),
                ]
            })
        })
        .collect();
    ctx.csv("linearization_convergence.csv", &["side", "k", "parity", "t", "quotient"], &conv_rows)?;
    let failed = rows.iter().filter(|r| !r.pass).count();
    let mut summary = vec![format!(
        "{} of {} modes within relative tolerance {:e}",
        rows.len() - failed,
        rows.len(),
        v.tolerance
    )];
    for r in rows.iter().filter(|r| !r.pass) {
        summary.push(format!(
            "FAIL {} k={} {}: estimate {} reference {} rel_err {:e}",
            side_name(r.mode.side),
            r.mode.k,
            parity_name(r.mode.parity),
            r.estimate,
            r.reference,
            r.rel_err
        ));
    }
    Ok(Outcome {
        success: failed == 0,
        summary,
    })
}

fn history_rows(report: &SolveReport) -> Vec<Vec<String>> {
    report
        .residual_history
        .iter()
        .zip(&report.coeff_residual_history)
        .enumerate()
        .map(|(i, (r, c))| vec![i.to_string(), num(*r), num(*c)])
        .collect()
}

fn coefficient_rows(report: &SolveReport) -> Vec<Vec<String>> {
    report
        .g_final
        .coeffs()
        .iter()
        .enumerate()
        .map(|(k, m)| vec![k.to_string(), num(m[0]), num(m.get(1).copied().unwrap_or(0.0))])
        .collect()
}

pub fn solve(ctx: &mut Ctx) -> Result<Outcome, CliError> {
    require_planar(ctx.config)?;
    let cfg = ctx.config;
    let f = cfg.inner_profile().map_err(CliError::Config)?;
    let report = solve_free_boundary(&f, &cfg.problem, &cfg.solve, &cfg.discretization).map_err(numerical)?;
    ctx.json("solve.json", &json!({ "report": &report }))?;
    ctx.csv("residual_history.csv", &["iteration", "residual", "coeff_residual"], &history_rows(&report))?;
    ctx.csv("g_final.csv", &["k", "cos", "sin"], &coefficient_rows(&report))?;
    let mut summary = vec![format!(
        "converged {} after {} iterations; residual {:e}; c = {}",
        report.converged,
        report.iterations,
        report.residual_history.last().copied().unwrap_or(f64::NAN),
        report.c_final
    )];
    if report.max_dn() >= 0.0 {
        summary.push("warning: normal derivative is not strictly negative".into());
    }
    Ok(Outcome {
        success: report.converged,
        summary,
    })
}

pub fn asymptotics(ctx: &mut Ctx) -> Result<Outcome, CliError> {
    require_planar(ctx.config)?;
    let cfg = ctx.config;
    let f = cfg.inner_profile().map_err(CliError::Config)?;
    let table = asymptotic_check(&f, &cfg.problem, &cfg.asymptotics.t_list, &cfg.solve, &cfg.discretization)
        .map_err(numerical)?;
    let rows: Vec<Vec<String>> = table
        .rows
        .iter()
        .map(|r| {
            vec![
                num(r.t),
                num(r.ratio),
                num(r.leading),
                r.converged.to_string(),
                r.iterations.to_string(),
            ]
        })
        .collect();
    ctx.csv("asymptotics.csv", &["t", "ratio", "leading", "converged", "iterations"], &rows)?;
    ctx.json(
        "asymptotics.json",
        &json!({
            "g1": &table.g1,
            "rows": &table.rows,
            "monotone": table.monotone(),
            "reduction": table.reduction(),
        }),
    )?;
    let all_converged = table.rows.iter().all(|r| r.converged);
    Ok(Outcome {
        success: all_converged,
        summary: vec![format!(
            "monotone {}; ratio(last)/ratio(first) = {:.6}; all converged {all_converged}",
            table.monotone(),
            table.reduction()
        )],
    })
}

pub fn symmetry(ctx: &mut Ctx) -> Result<Outcome, CliError> {
    require_planar(ctx.config)?;
    let cfg = ctx.config;
    let f = cfg.inner_profile().map_err(CliError::Config)?;
    let report = match symmetry_check(&f, cfg.symmetry.axis, &cfg.problem, &cfg.solve, &cfg.discretization) {
        Ok(r) => r,
        Err(Error::InvalidInput(msg)) => return Err(CliError::Config(msg)),
        Err(e) => return Err(numerical(e)),
    };
    ctx.json("symmetry.json", &report)?;
    ctx.csv("residual_history.csv", &["iteration", "residual", "coeff_residual"], &history_rows(&report.solve))?;
    Ok(Outcome {
        success: report.pass,
        summary: vec![format!(
            "asymmetry {:e} (limit {:e}); converged {}",
            report.asymmetry,
            10.0 * cfg.solve.residual_tol,
            report.solve.converged
        )],
    })
}

#[derive(Serialize)]
struct SweepRow {
    sigma_c: f64,
    nearest_k: Option<u32>,
    s_k: Option<f64>,
    distance: Option<f64>,
    singular: bool,
    multiplier_condition: Option<f64>,
}

pub fn sigma_table(ctx: &mut Ctx) -> Result<Outcome, CliError> {
    let cfg = ctx.config;
    let dim = cfg.problem.dim;
    let cutoff = cfg.solve.cutoff as u32;
    let mut radii = vec![cfg.problem.inner_radius];
    radii.extend(cfg.sigma_table.inner_radii.iter().copied());
    let rows: Vec<Vec<String>> = radii
        .iter()
        .flat_map(|&r| (1..=cutoff).map(move |k| vec![num(r), k.to_string(), num(sigma_singular(k, dim, r))]))
        .collect();
    ctx.csv("sigma_table.csv", &["inner_radius", "k", "s_k"], &rows)?;
    let r = cfg.problem.inner_radius;
    let guard = cfg.solve.singular_guard_tol;
    let sweep: Vec<SweepRow> = cfg
        .sigma_table
        .sigma_values
        .par_iter()
        .map(|&sigma| {
            let near = nearest_resonance(sigma, dim, r, cutoff);
            let condition = ProblemSpec::two_phase(dim, r, sigma)
                .and_then(|spec| MultiplierTable::build(&spec, cutoff))
                .ok()
                .map(|t| t.condition());
            SweepRow {
                sigma_c: sigma,
                nearest_k: near.map(|n| n.k),
                s_k: near.map(|n| n.s_k),
                distance: near.map(|n| n.distance),
                singular: analytic::is_singular(sigma, dim, r, cutoff, guard),
                multiplier_condition: condition,
            }
        })
        .collect();
    let opt = |v: Option<f64>| v.map(num).unwrap_or_default();
    let sweep_rows: Vec<Vec<String>> = sweep
        .iter()
        .map(|s| {
            vec![
                num(s.sigma_c),
                s.nearest_k.map(|k| k.to_string()).unwrap_or_default(),
                opt(s.s_k),
                opt(s.distance),
                s.singular.to_string(),
                opt(s.multiplier_condition),
            ]
        })
        .collect();
    if !sweep.is_empty() {
        ctx.csv(
            "sigma_sweep.csv",
            &["sigma_c", "nearest_k", "s_k", "distance", "singular", "multiplier_condition"],
            &sweep_rows,
        )?;
    }
    let singular = sweep.iter().filter(|s| s.singular).count();
    Ok(Outcome {
        success: true,
        summary: vec![format!(
            "{} resonance values for {} radii; {singular} of {} swept conductivities within {guard:e} of a resonance",
            rows.len(),
            radii.len(),
            sweep.len()
        )],
    })
}

pub fn counterexample(ctx: &mut Ctx) -> Result<Outcome, CliError> {
    require_planar(ctx.config)?;
    let cfg = ctx.config;
    let notch = cfg.notch().map_err(CliError::Config)?;
    let ce = &cfg.counterexample;
    if ce.t_max * notch.depth >= cfg.problem.inner_radius {
        return Err(CliError::Config("counterexample.t_max * depth must stay below R".into()));
    }
    let control = run_notch(&notch, 0.0, &cfg.problem, &cfg.solve, &cfg.discretization).map_err(numerical)?;
    let control_err = control
        .curvature
        .outer_curvature
        .iter()
        .map(|k| (k - 1.0).abs())
        .fold(0.0, f64::max);
    let threshold = bisect_threshold(&notch, ce.t_max, ce.steps, &cfg.problem, &cfg.solve, &cfg.discretization)
        .map_err(numerical)?;
    let success = control_err <= 1e-12 && threshold.as_ref().is_some_and(|t| t.run.success());
    let summary_line = match &threshold {
        Some(th) => format!(
            "threshold t = {} (first failing t: {}); inner convex {}; outer min curvature {:.6}; control curvature error {control_err:e}",
            th.t,
            th.failing_t.map(num).unwrap_or_else(|| "none in range".into()),
            th.run.curvature.inner_convex,
            th.run.curvature.min_curvature
        ),
        None => format!("no notch scale in (0, {}] gave a converged convex outer curve", ce.t_max),
    };
    if let Some(th) = &threshold {
        let rows: Vec<Vec<String>> = th
            .run
            .curvature
            .nodes
            .iter()
            .zip(&th.run.curvature.outer_curvature)
            .map(|(t, k)| vec![num(*t), num(*k)])
            .collect();
        ctx.csv("curvature.csv", &["theta", "curvature"], &rows)?;
        let probes: Vec<Vec<String>> = th.probes.iter().map(|(t, ok)| vec![num(*t), ok.to_string()]).collect();
        ctx.csv("probes.csv", &["t", "success"], &probes)?;
    }
    ctx.json(
        "counterexample.json",
        &json!({
            "success": success,
            "control": {
                "max_curvature_error": control_err,
                "converged": control.solve.converged,
            },
            "threshold": threshold,
        }),
    )?;
    Ok(Outcome {
        success,
        summary: vec![summary_line],
    })
}
