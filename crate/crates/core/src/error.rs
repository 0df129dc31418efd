use thiserror::Error;

use crate::spectral::BoundaryFunction;

/// Errors produced by the solver stack.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("value {value} lies outside [{lo}, {hi}]")]
    Domain { value: f64, lo: f64, hi: f64 },

    #[error("degenerate denominator at mode k={k}: F = {value:e}")]
    DegenerateDenominator { k: u32, value: f64 },

    #[error("sigma_c = {sigma_c} resonates with s({k}) = {s_k} (distance {distance:e})")]
    Resonance {
        k: u32,
        sigma_c: f64,
        s_k: f64,
        distance: f64,
    },

    #[error("invalid geometry: {0}")]
    Geometry(String),

    #[error("ill-conditioned discretization: condition estimate {0:e}")]
    IllConditioned(f64),

    #[error("geometry became invalid at iteration {iteration}: {reason}")]
    IterateLeftDomain {
        iteration: usize,
        reason: String,
        last_valid: Box<BoundaryFunction>,
    },

    #[error("difference quotients do not converge (observed order {order:.3})")]
    NonConvergent { order: f64, values: Vec<(f64, f64)> },

    #[error("unsupported: {0}")]
    Unsupported(String),
}

pub type Result<T> = std::result::Result<T, Error>;
