//! Closed-form quantities at the concentric configuration.
//!
//! Everything here is dimension-generic (`N ≥ 2`) and evaluated mode-wise.
//! At `N = 2` the factor `(2−N)/(R^{2−N}−1)` is replaced by its limit
//! `1/log R`; the `*_real_dim` variants accept a real dimension so the limit
//! can be checked directly.
//!
//! Bernoulli inner multiplier: the Dirichlet datum of the linearized state on
//! the inner sphere is `−∂ᵣu(R)·(f·n)` with `∂ᵣu(R) = ∂ₙu|_{r=1}·R^{1−N}`. The
//! multiplier [`multipliers_bernoulli`] uses that value. Scaling the datum by the
//! outer-boundary flux `∂ₙu|_{r=1}·R^{2−N}` instead yields
//! [`bernoulli_inner_multiplier_outer_flux`], which differs by a factor `R` and
//! violates translation invariance (`m_f(1) + m_g(1) = 0`); it is kept for
//! comparison only.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::spectral::BoundaryFunction;

/// Default absolute tolerance for proximity to the resonance set.
pub const DEFAULT_SINGULAR_TOL: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ProblemKind {
    Bernoulli,
    TwoPhase { sigma_c: f64 },
}

/// Which overdetermined problem, in which dimension, with which inner radius.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ProblemSpec {
    #[serde(flatten)]
    pub kind: ProblemKind,
    pub dim: u32,
    pub inner_radius: f64,
}

impl ProblemSpec {
    pub fn bernoulli(dim: u32, inner_radius: f64) -> Result<Self> {
        let spec = Self {
            kind: ProblemKind::Bernoulli,
            dim,
            inner_radius,
        };
        spec.validate()?;
        Ok(spec)
    }

    pub fn two_phase(dim: u32, inner_radius: f64, sigma_c: f64) -> Result<Self> {
        let spec = Self {
            kind: ProblemKind::TwoPhase { sigma_c },
            dim,
            inner_radius,
        };
        spec.validate()?;
        Ok(spec)
    }

    pub fn validate(&self) -> Result<()> {
        if self.dim < 2 {
            return Err(Error::InvalidInput(format!(
                "dimension must be at least 2, got {}",
                self.dim
            )));
        }
        if !(self.inner_radius > 0.0 && self.inner_radius < 1.0) {
            return Err(Error::InvalidInput(format!(
                "inner radius must lie in (0, 1), got {}",
                self.inner_radius
            )));
        }
        if let ProblemKind::TwoPhase { sigma_c } = self.kind {
            if !(sigma_c > 0.0 && sigma_c.is_finite()) || sigma_c == 1.0 {
                return Err(Error::InvalidInput(format!(
                    "sigma_c must be positive and different from 1, got {sigma_c}"
                )));
            }
        }
        Ok(())
    }

    pub fn sigma_c(&self) -> Option<f64> {
        match self.kind {
            ProblemKind::TwoPhase { sigma_c } => Some(sigma_c),
            ProblemKind::Bernoulli => None,
        }
    }

    fn require_bernoulli(&self) -> Result<()> {
        match self.kind {
            ProblemKind::Bernoulli => Ok(()),
            _ => Err(Error::InvalidInput("expected a Bernoulli problem".into())),
        }
    }

    fn require_two_phase(&self) -> Result<f64> {
        self.sigma_c()
            .ok_or_else(|| Error::InvalidInput("expected a two-phase problem".into()))
    }
}

/// `(2−N)/(R^{2−N}−1)`, or `1/log R` at `N = 2`.
pub fn flux_factor(dim: f64, r: f64) -> f64 {
    if dim == 2.0 {
        1.0 / r.ln()
    } else {
        (2.0 - dim) / ((2.0 - dim) * r.ln()).exp_m1()
    }
}

/// Radial Bernoulli state `u(r)`: `u(R) = 1`, `u(1) = 0`, harmonic.
pub fn radial_state(r: f64, spec: &ProblemSpec) -> Result<f64> {
    spec.require_bernoulli()?;
    let big_r = spec.inner_radius;
    if !(big_r..=1.0).contains(&r) {
        return Err(Error::Domain {
            value: r,
            lo: big_r,
            hi: 1.0,
        });
    }
    Ok(if spec.dim == 2 {
        r.ln() / big_r.ln()
    } else {
        let e = 2.0 - spec.dim as f64;
        (r.powf(e) - 1.0) / (big_r.powf(e) - 1.0)
    })
}

/// `(∂ₙu, ∂ₙₙu)` of the radial Bernoulli state on the unit sphere.
pub fn boundary_derivatives(spec: &ProblemSpec) -> Result<(f64, f64)> {
    spec.require_bernoulli()?;
    let dn = flux_factor(spec.dim as f64, spec.inner_radius);
    Ok((dn, (1.0 - spec.dim as f64) * dn))
}

/// Radial profile coefficients of the linearized Bernoulli state
/// `u'_± = (A^± r^{2−N−k} + B^± r^k) α^± Y_k`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LinearizationCoeffs {
    pub a_minus: f64,
    pub b_minus: f64,
    pub a_plus: f64,
    pub b_plus: f64,
}

impl LinearizationCoeffs {
    /// `∂ᵣ` at `r = 1` of the outer-driven profile.
    pub fn outer_flux_plus(&self, dim: f64, k: f64) -> f64 {
        self.a_plus * (2.0 - dim - k) + self.b_plus * k
    }

    /// `∂ᵣ` at `r = 1` of the inner-driven profile.
    pub fn outer_flux_minus(&self, dim: f64, k: f64) -> f64 {
        self.a_minus * (2.0 - dim - k) + self.b_minus * k
    }
}

pub fn linearization_coeffs_real_dim(dim: f64, r: f64, k: u32) -> LinearizationCoeffs {
    let kf = k as f64;
    let dn = flux_factor(dim, r);
    let rho = r.powf(2.0 - dim - 2.0 * kf);
    // A⁺R^{2−N−2k} + B⁺ = 0,  A⁺ + B⁺ = −∂ₙu
    let a_plus = dn / (rho - 1.0);
    let b_plus = -a_plus * rho;
    // A⁻ + B⁻ = 0,  A⁻R^{2−N−k} + B⁻R^k = −∂ᵣu(R) = −∂ₙu·R^{1−N}
    let a_minus = -dn * r.powf(1.0 - dim) / (r.powf(2.0 - dim - kf) - r.powf(kf));
    LinearizationCoeffs {
        a_minus,
        b_minus: -a_minus,
        a_plus,
        b_plus,
    }
}

pub fn linearization_coeffs_bernoulli(k: u32, spec: &ProblemSpec) -> Result<LinearizationCoeffs> {
    spec.require_bernoulli()?;
    require_mode(k)?;
    Ok(linearization_coeffs_real_dim(
        spec.dim as f64,
        spec.inner_radius,
        k,
    ))
}

/// Mode-`k` multipliers of `∂_fΨ(0,0)` and `∂_gΨ(0,0)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Multipliers {
    pub m_f: f64,
    pub m_g: f64,
}

/// `β_k`, the outer multiplier of the Bernoulli problem.
pub fn beta_real_dim(dim: f64, r: f64, k: u32) -> f64 {
    let kf = k as f64;
    let (rk, rs) = (r.powf(kf), r.powf(2.0 - dim - kf));
    flux_factor(dim, r) * ((1.0 - kf) * rk + (1.0 - dim - kf) * rs) / (rs - rk)
}

pub fn bernoulli_multipliers_real_dim(dim: f64, r: f64, k: u32) -> Multipliers {
    let kf = k as f64;
    let (rk, rs) = (r.powf(kf), r.powf(2.0 - dim - kf));
    let m_f = flux_factor(dim, r) * r.powf(1.0 - dim) * (dim - 2.0 + 2.0 * kf) / (rs - rk);
    Multipliers {
        m_f,
        m_g: beta_real_dim(dim, r, k),
    }
}

pub fn multipliers_bernoulli(k: u32, spec: &ProblemSpec) -> Result<Multipliers> {
    spec.require_bernoulli()?;
    require_mode(k)?;
    Ok(bernoulli_multipliers_real_dim(
        spec.dim as f64,
        spec.inner_radius,
        k,
    ))
}

/// Inner multiplier with the Dirichlet datum scaled by the outer flux
/// `∂ₙu|_{r=1}·R^{2−N}` rather than the inner flux. Equals
/// `R · multipliers_bernoulli(k).m_f`.
pub fn bernoulli_inner_multiplier_outer_flux(k: u32, spec: &ProblemSpec) -> Result<f64> {
    spec.require_bernoulli()?;
    require_mode(k)?;
    let (dim, r, kf) = (spec.dim as f64, spec.inner_radius, k as f64);
    Ok(flux_factor(dim, r) * r.powf(2.0 - dim) * (dim - 2.0 + 2.0 * kf)
        / (r.powf(2.0 - dim - kf) - r.powf(kf)))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TwoPhaseMultipliers {
    pub m_f: f64,
    pub m_g: f64,
    /// The common denominator `F(k)`.
    pub f_denominator: f64,
}

pub fn two_phase_multipliers_real_dim(
    dim: f64,
    r: f64,
    sigma_c: f64,
    k: u32,
) -> Result<TwoPhaseMultipliers> {
    let kf = k as f64;
    let rho = r.powf(2.0 - dim - 2.0 * kf);
    let first = dim * (dim - 2.0 + kf + kf * sigma_c) * rho;
    let second = kf * dim * (1.0 - sigma_c);
    let f_den = first + second;
    if f_den.abs() <= 1e-14 * (first.abs() + second.abs()) {
        return Err(Error::DegenerateDenominator { k, value: f_den });
    }
    let m_f = (2.0 - dim - 2.0 * kf) * (sigma_c - 1.0) * kf * r.powf(1.0 - kf) / f_den;
    let m_g = ((dim + kf - 1.0) * (sigma_c - 1.0) * kf
        + (dim - 2.0 + kf + kf * sigma_c) * (kf - 1.0) * rho)
        / f_den;
    Ok(TwoPhaseMultipliers {
        m_f,
        m_g,
        f_denominator: f_den,
    })
}

pub fn multipliers_two_phase(k: u32, spec: &ProblemSpec) -> Result<TwoPhaseMultipliers> {
    let sigma_c = spec.require_two_phase()?;
    require_mode(k)?;
    two_phase_multipliers_real_dim(spec.dim as f64, spec.inner_radius, sigma_c, k)
}

/// `(m_f, m_g)` for whichever problem `spec` describes.
pub fn multipliers(k: u32, spec: &ProblemSpec) -> Result<Multipliers> {
    match spec.kind {
        ProblemKind::Bernoulli => multipliers_bernoulli(k, spec),
        ProblemKind::TwoPhase { .. } => {
            let t = multipliers_two_phase(k, spec)?;
            Ok(Multipliers {
                m_f: t.m_f,
                m_g: t.m_g,
            })
        }
    }
}

/// Conductivity `s(k)` at which the two-phase outer multiplier vanishes.
pub fn sigma_singular(k: u32, dim: u32, r: f64) -> f64 {
    let (kf, n) = (k as f64, dim as f64);
    let rho = r.powf(2.0 - n - 2.0 * kf);
    (kf * (n + kf - 1.0) - (n + kf - 2.0) * (kf - 1.0) * rho)
        / (kf * (n + kf - 1.0) + kf * (kf - 1.0) * rho)
}

/// Closest positive `s(k)`, `k ≤ cutoff`, to `sigma_c`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct NearestResonance {
    pub k: u32,
    pub s_k: f64,
    pub distance: f64,
}

pub fn nearest_resonance(sigma_c: f64, dim: u32, r: f64, cutoff: u32) -> Option<NearestResonance> {
    (1..=cutoff)
        .map(|k| (k, sigma_singular(k, dim, r)))
        .filter(|&(_, s)| s > 0.0)
        .map(|(k, s_k)| NearestResonance {
            k,
            s_k,
            distance: (sigma_c - s_k).abs(),
        })
        .min_by(|a, b| a.distance.total_cmp(&b.distance))
}

/// Whether `sigma_c` is within `tol` of a positive `s(k)` with `k ≤ cutoff`.
pub fn is_singular(sigma_c: f64, dim: u32, r: f64, cutoff: u32, tol: f64) -> bool {
    nearest_resonance(sigma_c, dim, r, cutoff).is_some_and(|n| n.distance < tol)
}

/// Fails with [`Error::Resonance`] when `spec` is a two-phase problem within
/// `tol` of the resonance set up to `cutoff`.
pub fn check_resonance(spec: &ProblemSpec, cutoff: u32, tol: f64) -> Result<()> {
    if let Some(sigma_c) = spec.sigma_c() {
        if let Some(n) = nearest_resonance(sigma_c, spec.dim, spec.inner_radius, cutoff) {
            if n.distance < tol {
                return Err(Error::Resonance {
                    k: n.k,
                    sigma_c,
                    s_k: n.s_k,
                    distance: n.distance,
                });
            }
        }
    }
    Ok(())
}

/// First-order coefficient of `g(f)` per unit inner coefficient, written in the
/// closed asymptotic form (not as a multiplier ratio).
pub fn first_order_coefficient(k: u32, spec: &ProblemSpec) -> Result<f64> {
    require_mode(k)?;
    let (n, r, kf) = (spec.dim as f64, spec.inner_radius, k as f64);
    Ok(match spec.kind {
        ProblemKind::Bernoulli => {
            (2.0 - n - 2.0 * kf) * r.powf(1.0 - n)
                / ((1.0 - kf) * r.powf(kf) + (1.0 - n - kf) * r.powf(2.0 - n - kf))
        }
        ProblemKind::TwoPhase { sigma_c } => {
            let rho = r.powf(2.0 - n - 2.0 * kf);
            (n + 2.0 * kf - 2.0) * (sigma_c - 1.0) * kf * r.powf(1.0 - kf)
                / ((n + kf - 1.0) * (sigma_c - 1.0) * kf
                    + (n - 2.0 + kf + kf * sigma_c) * (kf - 1.0) * rho)
        }
    })
}

/// First-order prediction `g₁` of the free boundary: mode-wise
/// `−m_f(k)/m_g(k)·α_k`, with the mean of `f·n` discarded.
pub fn first_order_g(f: &BoundaryFunction, spec: &ProblemSpec, tol: f64) -> Result<BoundaryFunction> {
    spec.validate()?;
    if f.dim() != spec.dim {
        return Err(Error::InvalidInput(format!(
            "perturbation has dimension {}, problem has {}",
            f.dim(),
            spec.dim
        )));
    }
    check_resonance(spec, f.cutoff() as u32, tol)?;
    let ratios = (1..=f.cutoff() as u32)
        .map(|k| multipliers(k, spec).map(|m| -m.m_f / m.m_g))
        .collect::<Result<Vec<_>>>()?;
    Ok(f.map_modes(|k, c| if k == 0 { 0.0 } else { ratios[k - 1] * c }))
}

/// Radial two-phase state on concentric balls: `−div(σ∇u) = 1`, `u(1) = 0`.
pub fn trivial_two_phase_radial(r: f64, spec: &ProblemSpec) -> Result<f64> {
    let sigma_c = spec.require_two_phase()?;
    if !(0.0..=1.0).contains(&r) {
        return Err(Error::Domain {
            value: r,
            lo: 0.0,
            hi: 1.0,
        });
    }
    let (n, big_r) = (spec.dim as f64, spec.inner_radius);
    Ok(if r >= big_r {
        (1.0 - r * r) / (2.0 * n)
    } else {
        (1.0 - big_r * big_r) / (2.0 * n) + (big_r * big_r - r * r) / (2.0 * n * sigma_c)
    })
}

/// `∂ᵣu` of [`trivial_two_phase_radial`]; one-sided (outer phase) at `r = R`.
pub fn trivial_two_phase_radial_derivative(r: f64, spec: &ProblemSpec) -> Result<f64> {
    let sigma_c = spec.require_two_phase()?;
    if !(0.0..=1.0).contains(&r) {
        return Err(Error::Domain {
            value: r,
            lo: 0.0,
            hi: 1.0,
        });
    }
    let n = spec.dim as f64;
    Ok(if r >= spec.inner_radius {
        -r / n
    } else {
        -r / (n * sigma_c)
    })
}

fn require_mode(k: u32) -> Result<()> {
    if k == 0 {
        return Err(Error::InvalidInput("mode index must be at least 1".into()));
    }
    Ok(())
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct MultiplierRow {
    pub k: u32,
    pub m_f: f64,
    pub m_g: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub f_denominator: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub s_k: Option<f64>,
}

/// Multipliers for modes `1..=K`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MultiplierTable {
    pub problem: ProblemSpec,
    pub entries: Vec<MultiplierRow>,
}

impl MultiplierTable {
    pub fn build(problem: &ProblemSpec, cutoff: u32) -> Result<Self> {
        problem.validate()?;
        let entries = (1..=cutoff)
            .map(|k| match problem.kind {
                ProblemKind::Bernoulli => multipliers_bernoulli(k, problem).map(|m| MultiplierRow {
                    k,
                    m_f: m.m_f,
                    m_g: m.m_g,
                    f_denominator: None,
                    s_k: None,
                }),
                ProblemKind::TwoPhase { .. } => multipliers_two_phase(k, problem).map(|m| MultiplierRow {
                    k,
                    m_f: m.m_f,
                    m_g: m.m_g,
                    f_denominator: Some(m.f_denominator),
                    s_k: Some(sigma_singular(k, problem.dim, problem.inner_radius)),
                }),
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(Self {
            problem: *problem,
            entries,
        })
    }

    /// `max |m_g| / min |m_g|` over the table.
    pub fn condition(&self) -> f64 {
        let (lo, hi) = self.entries.iter().fold((f64::INFINITY, 0.0f64), |(lo, hi), e| {
            (lo.min(e.m_g.abs()), hi.max(e.m_g.abs()))
        });
        hi / lo
    }

    /// Every outer multiplier is nonzero.
    pub fn injective(&self) -> bool {
        self.entries.iter().all(|e| e.m_g != 0.0)
    }
}
