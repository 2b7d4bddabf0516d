//! The scaling reduction of the nonlocal problem
//!
//! ```text
//! −(‖u′‖₂² + ‖u‖_{p+1}^{p+1})^q u″ + u^p = λu,   u(0) = u(1) = 0,
//! ```
//!
//! to the local one. With `u = h·w_ξ` and `λ = h^{p−1}γ(ξ)`, `u` solves the
//! nonlocal problem iff
//!
//! ```text
//! h^{(p−1−2q)/q} = ‖w_ξ′‖₂² + h^{p−1}‖w_ξ‖_{p+1}^{p+1}.
//! ```
//!
//! In `y = h^{p−1} − 2/(p+1)` this has exactly one positive root once
//! `D(ξ) = ‖w_ξ′‖₂² + (2/(p+1))‖w_ξ‖_{p+1}^{p+1}` exceeds `(2/(p+1))^e`,
//! `e = (p−1−2q)/(q(p−1))`.

use std::cell::Cell;
use std::collections::HashMap;
use std::sync::{Mutex, OnceLock};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::local::{LocalProblem, LocalSolution, PlateauGap};
use crate::numerics::{expand_bracket_up, find_root, RootBracket};
use crate::params::{ProblemParams, Tolerances};

/// Largest accepted `|β/h^{p−1} − 1|` at a produced point.
pub const BETA_TOLERANCE: f64 = 1e-8;

/// Bracket width (relative) for the scalar `y`-equation. Far below the
/// general root tolerance since `h` feeds every derived quantity.
const Y_TOL: f64 = 1e-15;

/// One point `(α, λ(α))` of the nonlocal curve and how it was built.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NonlocalPoint {
    pub params: ProblemParams,
    pub local: LocalSolution,
    pub h: f64,
    /// `‖u‖₂ = h·ξ`.
    pub alpha: f64,
    /// `h^{p−1}·γ(ξ)`.
    pub lambda: f64,
    /// `(‖u′‖₂² + ‖u‖_{p+1}^{p+1})^q`, recomputed from `h` and the norms.
    pub beta: f64,
}

impl NonlocalPoint {
    pub fn xi(&self) -> f64 {
        self.local.xi
    }

    /// `|β − h^{p−1}| / h^{p−1}`.
    pub fn beta_residual(&self) -> f64 {
        (self.beta / self.h.powf(self.params.p() - 1.0) - 1.0).abs()
    }

    /// Residual of the nonlocal equation for `u = h·w` on the samples
    /// `(x, w(x))`, with `w″` taken from the local equation:
    /// `max |−β h w″ + h^p w^p − λ h w| / (λ h ρ)`.
    pub fn strong_residual(&self, profile: &[(f64, f64)]) -> f64 {
        let p = self.params.p();
        let (h, gamma) = (self.h, self.local.gamma);
        let scale = self.lambda * h * self.local.rho;
        profile
            .iter()
            .map(|&(_, w)| {
                let wpp = w.powf(p) - gamma * w;
                let r = -self.beta * h * wpp + h.powf(p) * w.powf(p) - self.lambda * h * w;
                r.abs() / scale
            })
            .fold(0.0, f64::max)
    }
}

/// Where the reduction starts to apply: `D(ξ₀) = (2/(p+1))^e` and
/// `α₀ = h_{ξ₀}ξ₀` with `h_{ξ₀} = (2/(p+1))^{1/(p−1)}`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Threshold {
    pub xi0: f64,
    pub alpha0: f64,
    pub h0: f64,
    pub gap0: PlateauGap,
}

/// `h` from the norms `G = ‖w′‖₂²` and `N = ‖w‖_{p+1}^{p+1}` of some `w_ξ`.
///
/// Fails with [`Error::BelowThreshold`] when `D = G + 2N/(p+1)` does not
/// exceed `(2/(p+1))^e`.
pub fn solve_h_from_norms(params: &ProblemParams, grad_sq: f64, norm_p1: f64) -> Result<f64> {
    let (p, e, c) = (params.p(), params.y_equation_exponent(), params.y_shift());
    if !(grad_sq >= 0.0 && norm_p1 >= 0.0) || !(grad_sq + norm_p1 > 0.0) {
        return Err(Error::Domain(format!(
            "norms must be non-negative and not both zero, got G = {grad_sq}, N = {norm_p1}"
        )));
    }
    let d = grad_sq + c * norm_p1;
    let rhs = c.powf(e);
    if d <= rhs {
        return Err(Error::BelowThreshold { what: "D", value: d, threshold: rhs });
    }
    // both sides are positive; compare logs to keep large ξ in range
    let psi = |y: f64| e * (y + c).ln() - (norm_p1 * y + d).ln();
    let bracket = expand_bracket_up(psi, 0.0, 2.0, 2100)?;
    let y = find_root(psi, bracket, Y_TOL, 0.0)?;
    Ok((y + c).powf(1.0 / (p - 1.0)))
}

/// Positive root of `Y² = N·Y + G` in `Y = h^{p−1}`: the equation for `h`
/// when `q = (p−1)/(2p)`.
pub fn solve_h_closed_from_norms(p: f64, grad_sq: f64, norm_p1: f64) -> f64 {
    let y = 0.5 * (norm_p1 + (norm_p1 * norm_p1 + 4.0 * grad_sq).sqrt());
    y.powf(1.0 / (p - 1.0))
}

/// Nonlocal curve solver for fixed `(p, q)`.
///
/// Local solutions are memoized per `ξ`; the cache is shared and locked, so
/// one instance can serve a parallel sweep.
#[derive(Debug)]
pub struct NonlocalProblem {
    params: ProblemParams,
    local: LocalProblem,
    threshold: OnceLock<Threshold>,
    cache: Mutex<HashMap<u64, LocalSolution>>,
}

impl NonlocalProblem {
    pub fn new(params: ProblemParams, tol: Tolerances) -> Self {
        Self {
            params,
            local: LocalProblem::new(params.local(), tol),
            threshold: OnceLock::new(),
            cache: Mutex::new(HashMap::new()),
        }
    }

    pub fn with_pq(p: f64, q: f64) -> Result<Self> {
        Ok(Self::new(ProblemParams::new(p, q)?, Tolerances::default()))
    }

    pub fn params(&self) -> ProblemParams {
        self.params
    }

    pub fn local(&self) -> &LocalProblem {
        &self.local
    }

    fn y_threshold(&self) -> f64 {
        self.params.y_shift().powf(self.params.y_equation_exponent())
    }

    fn h0(&self) -> f64 {
        self.params.y_shift().powf(1.0 / (self.params.p() - 1.0))
    }

    /// The local solution with `‖w‖₂ = xi`, memoized.
    pub fn local_at_xi(&self, xi: f64) -> Result<LocalSolution> {
        let key = xi.to_bits();
        if let Some(sol) = self.cache.lock().unwrap_or_else(|e| e.into_inner()).get(&key) {
            return Ok(*sol);
        }
        let sol = self.local.solve_gamma_for_xi(xi)?;
        self.cache.lock().unwrap_or_else(|e| e.into_inner()).insert(key, sol);
        Ok(sol)
    }

    /// `(ξ₀, α₀)`, computed once per instance.
    pub fn xi_threshold(&self) -> Result<Threshold> {
        if let Some(t) = self.threshold.get() {
            return Ok(*t);
        }
        let gap0 = self.local.solve_gap_for_d(self.y_threshold())?;
        let xi0 = self.local.solution_at_gap(gap0)?.xi;
        let h0 = self.h0();
        let t = Threshold { xi0, alpha0: h0 * xi0, h0, gap0 };
        Ok(*self.threshold.get_or_init(|| t))
    }

    fn below_xi(&self, xi: f64) -> Error {
        match self.xi_threshold() {
            Ok(t) => Error::BelowThreshold { what: "xi", value: xi, threshold: t.xi0 },
            Err(e) => e,
        }
    }

    /// `h_ξ` by root finding in `y`.
    pub fn solve_h(&self, xi: f64) -> Result<f64> {
        let sol = self.local_at_xi(xi)?;
        self.h_for(&sol).map_err(|e| match e {
            Error::BelowThreshold { .. } => self.below_xi(xi),
            e => e,
        })
    }

    /// `h_ξ` in closed form; only defined for `q = (p−1)/(2p)`.
    pub fn solve_h_closed(&self, xi: f64) -> Result<f64> {
        if !self.params.is_quadratic_case() {
            return Err(Error::InvalidParams(format!(
                "closed-form h needs q = (p-1)/(2p) = {}, got q = {}",
                (self.params.p() - 1.0) / (2.0 * self.params.p()),
                self.params.q()
            )));
        }
        let sol = self.local_at_xi(xi)?;
        Ok(solve_h_closed_from_norms(self.params.p(), sol.grad_sq, sol.norm_p1))
    }

    fn h_for(&self, sol: &LocalSolution) -> Result<f64> {
        solve_h_from_norms(&self.params, sol.grad_sq, sol.norm_p1)
    }

    fn assemble(&self, local: LocalSolution, h: f64) -> Result<NonlocalPoint> {
        let p = self.params.p();
        let kirchhoff = h * h * local.grad_sq + h.powf(p + 1.0) * local.norm_p1;
        let point = NonlocalPoint {
            params: self.params,
            local,
            h,
            alpha: h * local.xi,
            lambda: h.powf(p - 1.0) * local.gamma,
            beta: kirchhoff.powf(self.params.q()),
        };
        let deviation = point.beta_residual();
        if !(deviation <= BETA_TOLERANCE) {
            return Err(Error::Consistency { check: "beta = h^(p-1)", deviation });
        }
        Ok(point)
    }

    /// The curve point over `‖w‖₂ = xi`.
    pub fn point_from_xi(&self, xi: f64) -> Result<NonlocalPoint> {
        let local = self.local_at_xi(xi)?;
        let h = self.solve_h(xi)?;
        self.assemble(local, h)
    }

    /// `ln α` along the branch, continued by `h₀` below the threshold so
    /// the bracket's lower end is always admissible.
    fn log_alpha_at_gap(&self, gap: PlateauGap) -> Result<f64> {
        let sol = self.local.solution_at_gap(gap)?;
        let h = match self.h_for(&sol) {
            Ok(h) => h,
            Err(Error::BelowThreshold { .. }) => self.h0(),
            Err(e) => return Err(e),
        };
        Ok((h * sol.xi).ln())
    }

    /// Log-gap bracket for `α_ξ = alpha`.
    fn alpha_bracket(&self, alpha: f64) -> Result<RootBracket> {
        let t = self.xi_threshold()?;
        if !(alpha > t.alpha0) {
            return Err(Error::BelowThreshold { what: "alpha", value: alpha, threshold: t.alpha0 });
        }
        let target = alpha.ln();
        let lo = t.gap0.log() * (1.0 + 1e-9);
        let fail = Cell::new(None);
        let f = |log_gap: f64| match self.log_alpha_at_gap(PlateauGap::from_log(log_gap)) {
            Ok(v) => v - target,
            Err(e) => {
                fail.set(Some(e));
                f64::NAN
            }
        };
        let bracket = expand_bracket_up(f, lo, 2.0, 200);
        if let Some(e) = fail.take() {
            return Err(e);
        }
        Ok(bracket?)
    }

    /// The unique curve point with `‖u‖₂ = alpha`.
    pub fn point_from_alpha(&self, alpha: f64) -> Result<NonlocalPoint> {
        let bracket = self.alpha_bracket(alpha)?;
        let target = alpha.ln();
        let fail = Cell::new(None);
        let f = |log_gap: f64| match self.log_alpha_at_gap(PlateauGap::from_log(log_gap)) {
            Ok(v) => v - target,
            Err(e) => {
                fail.set(Some(e));
                f64::NAN
            }
        };
        let root = find_root(f, bracket, 1e-14, 0.0);
        if let Some(e) = fail.take() {
            return Err(e);
        }
        let local = self.local.solution_at_gap(PlateauGap::from_log(root?))?;
        let h = self.h_for(&local)?;
        self.assemble(local, h)
    }

    /// Sign changes of `α_ξ − alpha` over `samples` equally spaced log-gaps
    /// across the bracket used by [`NonlocalProblem::point_from_alpha`].
    pub fn alpha_crossings(&self, alpha: f64, samples: usize) -> Result<usize> {
        let bracket = self.alpha_bracket(alpha)?;
        let target = alpha.ln();
        let n = samples.max(2);
        let mut prev: Option<f64> = None;
        let mut changes = 0;
        for i in 0..n {
            let l = bracket.lo + bracket.width() * i as f64 / (n - 1) as f64;
            let v = self.log_alpha_at_gap(PlateauGap::from_log(l))? - target;
            if let Some(pv) = prev {
                if pv.signum() != v.signum() {
                    changes += 1;
                }
            }
            prev = Some(v);
        }
        Ok(changes)
    }
}
