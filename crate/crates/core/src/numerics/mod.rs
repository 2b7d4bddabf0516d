//! One-dimensional quadrature, bracketed root finding and power-law fits.
//!
//! Everything here is a pure function of its arguments.

mod fit;
mod quadrature;
mod roots;

pub use fit::{fit_loglog_slope, fit_power_coefficient};
pub use quadrature::{integrate, integrate_sqrt_singular, integrate_vec, QuadratureSpec};
pub use roots::{expand_bracket_up, find_root, RootBracket};

use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum NumericsError {
    #[error("invalid quadrature spec: {0}")]
    InvalidSpec(String),
    #[error("invalid interval [{a}, {b}]")]
    InvalidInterval { a: f64, b: f64 },
    #[error("integrand or target function is not finite at x = {abscissa}")]
    NonFinite { abscissa: f64 },
    #[error("quadrature did not converge after {subdivisions} panels (estimate {estimate}, error {error_estimate})")]
    QuadratureNotConverged {
        estimate: f64,
        error_estimate: f64,
        subdivisions: usize,
    },
    #[error("invalid bracket [{lo}, {hi}]")]
    InvalidBracket { lo: f64, hi: f64 },
    #[error("no sign change on [{lo}, {hi}]: f(lo) = {f_lo}, f(hi) = {f_hi}")]
    SameSign { lo: f64, hi: f64, f_lo: f64, f_hi: f64 },
    #[error("root finder budget exhausted, best bracket [{lo}, {hi}]")]
    RootBudgetExhausted { lo: f64, hi: f64 },
    #[error("no sign change found growing the bracket from {lo} (last upper end {last})")]
    BracketExpansionFailed { lo: f64, last: f64 },
    #[error("need at least 2 samples, got {0}")]
    TooFewSamples(usize),
    #[error("sample ({x}, {y}) is not strictly positive")]
    NonPositiveSample { x: f64, y: f64 },
    #[error("all abscissae coincide")]
    DegenerateAbscissae,
}
