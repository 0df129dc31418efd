//! Experiment configuration: one JSON document per run.

use std::path::Path;

use serde::{Deserialize, Serialize};

use overdet_core::newton::SolveParams;
use overdet_core::pde::{DifferenceScheme, Side};
use overdet_core::spectral::Parity;
use overdet_core::{BoundaryFunction, Discretization, InnerProfile, ProblemSpec, TentNotch};

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    #[serde(default = "schema_version")]
    pub schema_version: u32,
    pub problem: ProblemSpec,
    #[serde(default)]
    pub discretization: Discretization,
    #[serde(default)]
    pub solve: SolveParams,
    #[serde(default)]
    pub perturbation: Perturbation,
    #[serde(default)]
    pub verify: VerifyConfig,
    #[serde(default)]
    pub asymptotics: AsymptoticsConfig,
    #[serde(default)]
    pub symmetry: SymmetryConfig,
    #[serde(default)]
    pub sigma_table: SigmaTableConfig,
    #[serde(default)]
    pub counterexample: CounterexampleConfig,
}

fn schema_version() -> u32 {
    SCHEMA_VERSION
}

/// Inner perturbation `a(θ)`.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case", deny_unknown_fields)]
pub enum Perturbation {
    #[default]
    None,
    FourierMode {
        k: usize,
        amplitude: f64,
        #[serde(default = "cos")]
        parity: Parity,
    },
    TentNotch {
        depth: f64,
        center: f64,
        /// Optional; must equal `depth / R` when given.
        #[serde(default)]
        half_width: Option<f64>,
        #[serde(default = "one")]
        scale: f64,
    },
    Coefficients {
        #[serde(default)]
        cos: Vec<f64>,
        #[serde(default)]
        sin: Vec<f64>,
    },
}

fn cos() -> Parity {
    Parity::Cos
}

fn one() -> f64 {
    1.0
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModeSpec {
    pub side: Side,
    pub k: usize,
    #[serde(default = "cos")]
    pub parity: Parity,
}

/// Which closed form the Bernoulli inner side is compared with.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum InnerReference {
    /// Datum scaled by the inner flux.
    #[default]
    Library,
    /// Datum scaled by the outer flux.
    OuterFlux,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct VerifyConfig {
    /// Empty means modes `1..=8` on both sides.
    pub modes: Vec<ModeSpec>,
    pub t_list: Vec<f64>,
    pub tolerance: f64,
    pub scheme: DifferenceScheme,
    pub inner_reference: InnerReference,
}

impl Default for VerifyConfig {
    fn default() -> Self {
        Self {
            modes: Vec::new(),
            t_list: vec![1e-2, 5e-3, 2.5e-3],
            tolerance: 1e-4,
            scheme: DifferenceScheme::Central,
            inner_reference: InnerReference::Library,
        }
    }
}

impl VerifyConfig {
    pub fn effective_modes(&self) -> Vec<ModeSpec> {
        if !self.modes.is_empty() {
            return self.modes.clone();
        }
        [Side::Inner, Side::Outer]
            .into_iter()
            .flat_map(|side| {
                (1..=8).map(move |k| ModeSpec {
                    side,
                    k,
                    parity: Parity::Cos,
                })
            })
            .collect()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct AsymptoticsConfig {
    pub t_list: Vec<f64>,
}

impl Default for AsymptoticsConfig {
    fn default() -> Self {
        Self {
            t_list: vec![0.04, 0.02, 0.01],
        }
    }
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SymmetryConfig {
    /// Reflection `θ ↦ 2·axis − θ`.
    pub axis: f64,
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SigmaTableConfig {
    /// Extra inner radii to tabulate besides the problem's.
    pub inner_radii: Vec<f64>,
    /// Conductivities to classify against the resonance set.
    pub sigma_values: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct CounterexampleConfig {
    /// Upper end of the bisection interval for the notch scale.
    pub t_max: f64,
    pub steps: usize,
}

impl Default for CounterexampleConfig {
    fn default() -> Self {
        Self { t_max: 1.0, steps: 6 }
    }
}

fn decreasing_positive(name: &str, ts: &[f64]) -> Result<(), String> {
    if ts.is_empty() {
        return Err(format!("{name} must not be empty"));
    }
    if ts.iter().any(|t| !(t.is_finite() && *t > 0.0)) || ts.windows(2).any(|w| w[1] >= w[0]) {
        return Err(format!("{name} must be positive and strictly decreasing"));
    }
    Ok(())
}

impl ExperimentConfig {
    pub fn load(path: &Path) -> Result<Self, String> {
        let text = std::fs::read_to_string(path).map_err(|e| format!("cannot read {}: {e}", path.display()))?;
        Self::parse(&text)
    }

    /// Parse and fully validate. Errors carry line and column from the parser.
    pub fn parse(text: &str) -> Result<Self, String> {
        let cfg: Self = serde_json::from_str(text).map_err(|e| format!("config parse error: {e}"))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<(), String> {
        if self.schema_version != SCHEMA_VERSION {
            return Err(format!(
                "unsupported schema_version {} (expected {SCHEMA_VERSION})",
                self.schema_version
            ));
        }
        self.problem.validate().map_err(|e| format!("problem: {e}"))?;
        self.discretization.validate().map_err(|e| format!("discretization: {e}"))?;
        self.solve
            .validate(&self.discretization)
            .map_err(|e| format!("solve: {e}"))?;
        self.inner_profile()?;
        decreasing_positive("verify.t_list", &self.verify.t_list)?;
        if self.verify.t_list.len() < 2 {
            return Err("verify.t_list needs at least two entries".into());
        }
        if !(self.verify.tolerance > 0.0) {
            return Err("verify.tolerance must be positive".into());
        }
        for m in &self.verify.modes {
            if m.k > self.discretization.cutoff {
                return Err(format!("verify mode k={} exceeds the cutoff", m.k));
            }
            if m.side == Side::Outer && m.k == 0 {
                return Err("verify: outer mode k=0 violates the zero-mean constraint".into());
            }
        }
        decreasing_positive("asymptotics.t_list", &self.asymptotics.t_list)?;
        if !self.symmetry.axis.is_finite() {
            return Err("symmetry.axis must be finite".into());
        }
        for r in &self.sigma_table.inner_radii {
            if !(*r > 0.0 && *r < 1.0) {
                return Err(format!("sigma_table.inner_radii: {r} outside (0, 1)"));
            }
        }
        if self.sigma_table.sigma_values.iter().any(|s| !(s.is_finite() && *s > 0.0)) {
            return Err("sigma_table.sigma_values must be positive".into());
        }
        if !(self.counterexample.t_max.is_finite() && self.counterexample.t_max > 0.0) {
            return Err("counterexample.t_max must be positive".into());
        }
        Ok(())
    }

    pub fn inner_profile(&self) -> Result<InnerProfile, String> {
        let r = self.problem.inner_radius;
        match &self.perturbation {
            Perturbation::None => Ok(InnerProfile::zero()),
            Perturbation::FourierMode { k, amplitude, parity } => {
                if !amplitude.is_finite() {
                    return Err("perturbation.amplitude must be finite".into());
                }
                if *k > self.discretization.cutoff {
                    return Err(format!("perturbation mode {k} exceeds the cutoff"));
                }
                Ok(BoundaryFunction::mode(*k, *parity, *amplitude).into())
            }
            Perturbation::TentNotch {
                depth,
                center,
                half_width,
                scale,
            } => {
                let notch = TentNotch::new(*depth, *center, r).map_err(|e| format!("perturbation: {e}"))?;
                if let Some(w) = half_width {
                    if (w - notch.half_width()).abs() > 1e-12 * notch.half_width() {
                        return Err(format!(
                            "perturbation.half_width {w} inconsistent with depth/R = {}",
                            notch.half_width()
                        ));
                    }
                }
                if !(scale.is_finite() && *scale >= 0.0 && scale * depth < r) {
                    return Err(format!("perturbation.scale {scale} must satisfy 0 <= scale*depth < R"));
                }
                Ok(notch.scaled(*scale).into())
            }
            Perturbation::Coefficients { cos, sin } => {
                if cos.iter().chain(sin).any(|c| !c.is_finite()) {
                    return Err("perturbation coefficients must be finite".into());
                }
                Ok(BoundaryFunction::from_cos_sin(cos, sin).into())
            }
        }
    }

    /// The bare notch (scale 1) for the counterexample command.
    pub fn notch(&self) -> Result<TentNotch, String> {
        match &self.perturbation {
            Perturbation::TentNotch { depth, center, .. } => {
                TentNotch::new(*depth, *center, self.problem.inner_radius).map_err(|e| e.to_string())
            }
            _ => Err("counterexample requires a tent_notch perturbation".into()),
        }
    }
}
