//! Fixtures shared by the benchmarks.

use overdet_core::pde::DomainPair;
use overdet_core::{BoundaryFunction, Discretization, InnerProfile, ProblemSpec, TentNotch};

pub const INNER_RADIUS: f64 = 0.5;

pub fn bernoulli() -> ProblemSpec {
    ProblemSpec::bernoulli(2, INNER_RADIUS).expect("valid spec")
}

pub fn two_phase() -> ProblemSpec {
    ProblemSpec::two_phase(2, INNER_RADIUS, 2.0).expect("valid spec")
}

pub fn discretization(m: usize) -> Discretization {
    Discretization::new(m, m / 4).expect("valid discretization")
}

/// Annulus with a small mode-2 wobble on both curves.
pub fn wobbly_domain() -> DomainPair {
    DomainPair::new(
        INNER_RADIUS,
        BoundaryFunction::cos_mode(2, 0.02).into(),
        BoundaryFunction::sin_mode(3, 0.01),
    )
    .expect("valid domain")
}

pub fn notch(t: f64) -> InnerProfile {
    TentNotch::new(0.05, std::f64::consts::FRAC_PI_2, INNER_RADIUS)
        .expect("valid notch")
        .scaled(t)
        .into()
}
