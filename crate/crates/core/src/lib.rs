//! Numerical laboratory for overdetermined free-boundary problems on perturbed
//! annuli.
//!
//! Given a (possibly only Lipschitz) perturbation `f` of the inner circle of
//! radius `R`, the solver finds a smooth zero-mean perturbation `g` of the unit
//! circle such that the state `u` on the perturbed pair has constant normal
//! derivative on the outer curve. Two problems are supported:
//!
//! * Bernoulli: `Δu = 0` between the curves, `u = 1` inside, `u = 0` outside.
//! * Two-phase: `-div(σ∇u) = 1` with `σ = σ_c` inside the inner curve.
//!
//! The crate is layered bottom-up:
//!
//! * [`spectral`] — boundary functions in the real Fourier basis, analysis,
//!   synthesis and the zero-mean projection.
//! * [`analytic`] — radial states, Fourier multipliers of the linearized
//!   overdetermined map, the resonance set and first-order predictors.
//! * [`pde`] — Nyström boundary-integral solvers for both state problems and
//!   evaluation of the overdetermined residual.
//! * [`newton`] — frozen-Jacobian Newton iteration for `g(f)` and the
//!   asymptotic, symmetry and uniqueness checks built on it.
//! * [`convexity`] — curvature of radial graphs and the notch experiment.

pub mod analytic;
pub mod convexity;
pub mod error;
pub mod newton;
pub mod pde;
pub mod spectral;

pub use analytic::{MultiplierTable, ProblemKind, ProblemSpec};
pub use error::{Error, Result};
pub use newton::{InitialGuess, SolveParams, SolveReport};
pub use pde::{BoundaryField, DomainPair, InnerProfile, TentNotch};
pub use spectral::{BoundaryFunction, Discretization};
