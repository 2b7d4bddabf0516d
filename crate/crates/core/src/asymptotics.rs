//! Large-norm expansions of the local and nonlocal curves.
//!
//! Every prediction is returned as an [`Expansion`] so callers can subtract
//! the leading term before fitting the order of the next one.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numerics::{integrate, QuadratureSpec};
use crate::params::{LocalParams, ProblemParams};

/// Negative radicands above this are treated as roundoff at `s = 1`.
const RADICAND_FLOOR: f64 = -1e-14;

/// `C₁ = (p+3)∫₀¹ √((p−1)/(p+1) − s² + (2/(p+1))s^{p+1}) ds`.
pub fn compute_c1(p: f64) -> Result<f64> {
    compute_c1_with(p, &QuadratureSpec::new(1e-13, 1e-15, 2000)?)
}

pub fn compute_c1_with(p: f64, spec: &QuadratureSpec) -> Result<f64> {
    LocalParams::new(p)?;
    let a = (p - 1.0) / (p + 1.0);
    let b = 2.0 / (p + 1.0);
    let mut bad = None;
    let integral = integrate(
        |s| {
            let r = a - s * s + b * s.powf(p + 1.0);
            if r >= 0.0 {
                r.sqrt()
            } else {
                if r < RADICAND_FLOOR {
                    bad.get_or_insert((s, r));
                }
                0.0
            }
        },
        0.0,
        1.0,
        spec,
    )?;
    if let Some((s, r)) = bad {
        return Err(Error::Domain(format!("C1 radicand is {r:e} at s = {s}")));
    }
    Ok((p + 3.0) * integral)
}

/// A truncated expansion, term by term.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Expansion {
    pub leading: f64,
    pub correction: f64,
    pub constant: f64,
}

impl Expansion {
    pub fn total(&self) -> f64 {
        self.leading + self.correction + self.constant
    }
}

/// Constants of the expansions for one `(p, q)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AsymptoticModel {
    pub params: ProblemParams,
    pub c1: f64,
    /// Growth exponent of `h_ξ ~ ξ^k`.
    pub k: f64,
    /// Coefficient of the first correction to `h_ξ`.
    pub b: f64,
    /// `(p−1−q(p+1))/2`, the relative order of the correction to `λ(α)`.
    pub lambda_exponent: f64,
}

impl AsymptoticModel {
    pub fn new(params: ProblemParams) -> Result<Self> {
        let (p, q) = (params.p(), params.q());
        let c1 = compute_c1(p)?;
        let k = q * (p + 1.0) / (p - 1.0 - q * (p + 1.0));
        Ok(Self {
            params,
            c1,
            k,
            b: k * c1 / (p + 3.0),
            lambda_exponent: (p - 1.0 - q * (p + 1.0)) / 2.0,
        })
    }

    fn p(&self) -> f64 {
        self.params.p()
    }

    /// `γ(ξ) ≈ ξ^{p−1} + C₁ξ^{(p−1)/2} + C₁²/(p−1)`.
    pub fn gamma_asym(&self, xi: f64) -> Expansion {
        gamma_asym(xi, self.p(), self.c1)
    }

    /// `λ(α) ≈ α^{p−1}(1 + C₁α^{−lambda_exponent})`.
    pub fn lambda_asym(&self, alpha: f64) -> Expansion {
        let lead = alpha.powf(self.p() - 1.0);
        Expansion {
            leading: lead,
            correction: self.c1 * alpha.powf(self.p() - 1.0 - self.lambda_exponent),
            constant: 0.0,
        }
    }

    /// `h_ξ ≈ ξ^k + Bξ^{k−(p−1)/2}`.
    pub fn h_asym(&self, xi: f64) -> Expansion {
        Expansion {
            leading: xi.powf(self.k),
            correction: self.b * xi.powf(self.k - (self.p() - 1.0) / 2.0),
            constant: 0.0,
        }
    }

    /// `ξ(α) ≈ α^{1/(k+1)}(1 − B α^{−(p−1)/(2(k+1))}/(k+1))`.
    pub fn xi_of_alpha_asym(&self, alpha: f64) -> Expansion {
        let k1 = self.k + 1.0;
        let lead = alpha.powf(1.0 / k1);
        Expansion {
            leading: lead,
            correction: -self.b / k1 * lead * alpha.powf(-(self.p() - 1.0) / (2.0 * k1)),
            constant: 0.0,
        }
    }

    /// `(‖w_ξ‖_{p+1}^{p+1}, ‖w_ξ′‖₂²)`, see [`norm_asym`].
    pub fn norm_asym(&self, xi: f64) -> (Expansion, Expansion) {
        norm_asym(xi, self.p(), self.c1)
    }

    /// Coefficient of `α^{p−1−lambda_exponent}` in `λ(α)` assembled from the
    /// expansions of `h_ξ`, `γ(ξ)` and `ξ(α)`; equals `C₁`.
    pub fn composed_lambda_coefficient(&self) -> f64 {
        let pm1 = self.p() - 1.0;
        pm1 * self.b * -1.0 + (pm1 * self.b + self.c1)
    }
}

/// Three-term local expansion of `γ(ξ)`.
pub fn gamma_asym(xi: f64, p: f64, c1: f64) -> Expansion {
    Expansion {
        leading: xi.powf(p - 1.0),
        correction: c1 * xi.powf((p - 1.0) / 2.0),
        constant: c1 * c1 / (p - 1.0),
    }
}

/// Norm expansions:
/// `‖w_ξ‖_{p+1}^{p+1} ≈ ξ^{p+1} + (p+1)C₁ξ^{(p+3)/2}/(p+3)` and
/// `‖w_ξ′‖₂² ≈ 2C₁ξ^{(p+3)/2}/(p+3) + C₁²ξ²/(p−1)`.
///
/// The gradient has no `ξ^{p+1}` term; its `leading` field holds the
/// `ξ^{(p+3)/2}` term and `correction` the `ξ²` term.
pub fn norm_asym(xi: f64, p: f64, c1: f64) -> (Expansion, Expansion) {
    let mid = xi.powf((p + 3.0) / 2.0) / (p + 3.0);
    (
        Expansion {
            leading: xi.powf(p + 1.0),
            correction: (p + 1.0) * c1 * mid,
            constant: 0.0,
        },
        Expansion {
            leading: 2.0 * c1 * mid,
            correction: c1 * c1 / (p - 1.0) * xi * xi,
            constant: 0.0,
        },
    )
}
