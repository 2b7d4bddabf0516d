//! Problem parameters and solver tolerances.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numerics::QuadratureSpec;

/// Exponent of the local logistic problem `−w″ + w^p = γw`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LocalParams {
    p: f64,
}

impl LocalParams {
    pub fn new(p: f64) -> Result<Self> {
        if !(p > 1.0) || !p.is_finite() {
            return Err(Error::InvalidParams(format!("p must satisfy p > 1, got {p}")));
        }
        Ok(Self { p })
    }

    pub fn p(&self) -> f64 {
        self.p
    }

    /// `γ^{1/(p−1)}`, the positive fixed point of `w ↦ (w^p/γ)`.
    pub fn plateau(&self, gamma: f64) -> f64 {
        gamma.powf(1.0 / (self.p - 1.0))
    }
}

/// `(p, q)` for the nonlocal problem
/// `−(‖u′‖₂² + ‖u‖_{p+1}^{p+1})^q u″ + u^p = λu`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ProblemParams {
    p: f64,
    q: f64,
}

impl ProblemParams {
    pub fn new(p: f64, q: f64) -> Result<Self> {
        LocalParams::new(p)?;
        let q_max = (p - 1.0) / (p + 1.0);
        if !(q > 0.0 && q < q_max) {
            return Err(Error::InvalidParams(format!(
                "q must satisfy 0 < q < (p-1)/(p+1) = {q_max}, got q = {q}"
            )));
        }
        let params = Self { p, q };
        debug_assert!(params.h_equation_exponent() > p - 1.0);
        Ok(params)
    }

    /// The case `q = (p−1)/(2p)`, where the scaling equation is quadratic.
    pub fn quadratic_case(p: f64) -> Result<Self> {
        Self::new(p, (p - 1.0) / (2.0 * p))
    }

    pub fn p(&self) -> f64 {
        self.p
    }

    pub fn q(&self) -> f64 {
        self.q
    }

    pub fn local(&self) -> LocalParams {
        LocalParams { p: self.p }
    }

    /// `(p−1−2q)/q`, the power of `h` on the left of the scaling equation.
    pub fn h_equation_exponent(&self) -> f64 {
        (self.p - 1.0 - 2.0 * self.q) / self.q
    }

    /// `(p−1−2q)/(q(p−1))`; strictly greater than 1 for admissible `q`.
    pub fn y_equation_exponent(&self) -> f64 {
        self.h_equation_exponent() / (self.p - 1.0)
    }

    /// `2/(p+1)`.
    pub fn y_shift(&self) -> f64 {
        2.0 / (self.p + 1.0)
    }

    pub fn is_quadratic_case(&self) -> bool {
        (self.q - (self.p - 1.0) / (2.0 * self.p)).abs() <= 1e-14 * self.q
    }
}

/// Tolerances shared by every solver in the crate.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Tolerances {
    pub quadrature: QuadratureSpec,
    /// Relative bracket width at which root finding stops.
    pub x_tol: f64,
    /// Residual at which root finding stops. All targets are expressed as
    /// log-ratios, so this is effectively relative.
    pub f_tol: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Self {
            quadrature: QuadratureSpec::default(),
            x_tol: 1e-12,
            f_tol: 1e-10,
        }
    }
}

/// Environment variable overriding the default relative tolerance.
pub const TOLERANCE_ENV: &str = "BIFURQ_TOL";

impl Tolerances {
    /// Defaults with the relative quadrature tolerance replaced by `rel_tol`;
    /// the other targets are tied to it.
    pub fn with_rel_tol(rel_tol: f64) -> Result<Self> {
        if !(rel_tol > 0.0 && rel_tol < 1.0) {
            return Err(Error::InvalidParams(format!(
                "relative tolerance must lie in (0, 1), got {rel_tol}"
            )));
        }
        let base = Self::default();
        Ok(Self {
            quadrature: QuadratureSpec {
                rel_tol,
                abs_tol: rel_tol * 1e-2,
                ..base.quadrature
            },
            x_tol: (rel_tol * 1e-2).min(base.x_tol),
            f_tol: rel_tol,
        })
    }

    /// Defaults, overridden by `BIFURQ_TOL` when set.
    pub fn from_env() -> Result<Self> {
        match std::env::var(TOLERANCE_ENV) {
            Ok(raw) => {
                let v: f64 = raw.trim().parse().map_err(|_| {
                    Error::InvalidParams(format!("{TOLERANCE_ENV}={raw:?} is not a number"))
                })?;
                Self::with_rel_tol(v)
            }
            Err(_) => Ok(Self::default()),
        }
    }
}
