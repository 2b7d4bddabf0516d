//! The local logistic eigenvalue problem
//!
//! ```text
//! −w″ + w^p = γw on (0, 1),   w > 0,   w(0) = w(1) = 0,
//! ```
//!
//! solved by the time-map method. Solutions are symmetric about `x = 1/2`
//! with maximum `ρ = w(1/2)`; each γ > π² has exactly one, and the branch is
//! parametrised internally by the [`PlateauGap`] of `ρ` below `γ^{1/(p−1)}`.

mod kernel;

use std::cell::Cell;
use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numerics::{expand_bracket_up, find_root, integrate_sqrt_singular, NumericsError, RootBracket};
use crate::params::{LocalParams, Tolerances};

pub use kernel::{PlateauGap, ScaledIntegrals};
use kernel::Kernel;

/// Largest `‖w‖₂` the solver accepts.
pub const MAX_XI: f64 = 1e8;

/// Smallest log-gap tried when bracketing from the bifurcation point.
const MIN_LOG_GAP: f64 = 1e-12;

/// `F(w) = (γ/2)w² − w^{p+1}/(p+1)`; along a solution
/// `w′²/2 + F(w) = F(ρ)`.
pub fn potential(w: f64, gamma: f64, p: f64) -> f64 {
    0.5 * gamma * w * w - w.powf(p + 1.0) / (p + 1.0)
}

/// One solution of the local problem together with the norms the nonlocal
/// reduction needs.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LocalSolution {
    pub p: f64,
    pub gamma: f64,
    /// `‖w‖_∞ = w(1/2)`.
    pub rho: f64,
    /// `‖w‖₂`.
    pub xi: f64,
    /// `‖w‖_{p+1}^{p+1}`.
    pub norm_p1: f64,
    /// `‖w′‖₂²`.
    pub grad_sq: f64,
    /// `τ/√(2γ)`; equals 1/2 on the solution branch.
    pub half_width: f64,
    pub gap: PlateauGap,
}

impl LocalSolution {
    /// `D = ‖w′‖₂² + (2/(p+1))‖w‖_{p+1}^{p+1}`.
    pub fn d(&self) -> f64 {
        self.grad_sq + 2.0 / (self.p + 1.0) * self.norm_p1
    }

    /// `γ − ρ^{p−1}`, computed from the gap so that it survives when `ρ`
    /// rounds to the plateau value.
    pub fn sup_norm_defect(&self) -> f64 {
        let ln_sigma = (-self.gap.gap()).ln_1p();
        -self.gamma * ((self.p - 1.0) * ln_sigma).exp_m1()
    }

    /// `ln(γ − ρ^{p−1})`, finite even where the defect underflows.
    pub fn log_sup_norm_defect(&self) -> f64 {
        let eps = self.gap.gap();
        if eps > 1e-8 {
            self.sup_norm_defect().ln()
        } else {
            // γ(1 − (1−ε)^{p−1}) = γ(p−1)ε(1 + O(ε))
            self.gamma.ln() + (self.p - 1.0).ln() - self.gap.log()
        }
    }

    /// `|‖w′‖₂² + ‖w‖_{p+1}^{p+1} − γξ²| / γξ²`.
    pub fn energy_identity_residual(&self) -> f64 {
        let rhs = self.gamma * self.xi * self.xi;
        ((self.grad_sq + self.norm_p1 - rhs) / rhs).abs()
    }

    /// `|T(ρ, γ) − 1/2|`.
    pub fn time_map_residual(&self) -> f64 {
        (self.half_width - 0.5).abs()
    }
}

/// Solver for one exponent `p`.
#[derive(Debug, Clone)]
pub struct LocalProblem {
    params: LocalParams,
    tol: Tolerances,
    kernel: Kernel,
}

impl LocalProblem {
    pub fn new(params: LocalParams, tol: Tolerances) -> Self {
        Self {
            params,
            tol,
            kernel: Kernel::new(params.p()),
        }
    }

    pub fn with_p(p: f64) -> Result<Self> {
        Ok(Self::new(LocalParams::new(p)?, Tolerances::default()))
    }

    pub fn params(&self) -> LocalParams {
        self.params
    }

    pub fn p(&self) -> f64 {
        self.params.p()
    }

    pub fn tolerances(&self) -> &Tolerances {
        &self.tol
    }

    pub fn potential(&self, w: f64, gamma: f64) -> f64 {
        potential(w, gamma, self.p())
    }

    /// `T(ρ, γ) = ∫₀^ρ dw/√(2(F(ρ) − F(w)))`, evaluated directly in `w`.
    ///
    /// Only usable while `ρ` is resolvably below `γ^{1/(p−1)}`; the solver
    /// itself works with [`LocalProblem::time_map_at_gap`].
    pub fn time_map(&self, rho: f64, gamma: f64) -> Result<f64> {
        let p = self.p();
        let plateau = self.params.plateau(gamma);
        if !(gamma > 0.0) {
            return Err(Error::Domain(format!("time map needs γ > 0, got {gamma}")));
        }
        if !(rho > 0.0 && rho < plateau) {
            return Err(Error::Domain(format!(
                "time map needs 0 < ρ < γ^(1/(p-1)) = {plateau}, got ρ = {rho}"
            )));
        }
        let rho_p = rho.powf(p);
        let bad = Cell::new(None);
        // F(ρ) − F(w) = (ρ − w)·[γ(ρ + w)/2 − (ρ^{p+1} − w^{p+1})/((p+1)(ρ − w))]
        let g = |w: f64| {
            let delta = rho - w;
            if delta <= 0.0 {
                return 0.0;
            }
            let r = delta / rho;
            let ratio = -((p + 1.0) * (-r).ln_1p()).exp_m1() / r;
            let bracket = 0.5 * gamma * (rho + w) - rho_p * ratio / (p + 1.0);
            let diff = delta * bracket;
            if !(diff > 0.0) {
                bad.set(Some(w));
                return 0.0;
            }
            1.0 / (2.0 * diff).sqrt()
        };
        let value = integrate_sqrt_singular(g, 0.0, rho, &self.tol.quadrature)?;
        if let Some(w) = bad.get() {
            return Err(Error::Domain(format!(
                "F(ρ) − F(w) ≤ 0 at w = {w}; ρ = {rho} is not admissible for γ = {gamma}"
            )));
        }
        Ok(value)
    }

    /// `T = τ(σ)/√(2γ)` for the maximum described by `gap`.
    pub fn time_map_at_gap(&self, gap: PlateauGap, gamma: f64) -> Result<f64> {
        let tau = self.kernel.tau(gap, &self.tol.quadrature)?;
        Ok(tau / (2.0 * gamma).sqrt())
    }

    fn scaled(&self, gap: PlateauGap) -> Result<ScaledIntegrals> {
        self.kernel.integrals(gap, &self.tol.quadrature)
    }

    /// The solution on the branch `T = 1/2` whose maximum has log-gap `gap`.
    pub fn solution_at_gap(&self, gap: PlateauGap) -> Result<LocalSolution> {
        let s = self.scaled(gap)?;
        let gamma = 2.0 * s.tau * s.tau;
        Ok(self.assemble(s, gamma))
    }

    /// Norms for an arbitrary `(σ, γ)`; on the branch `kappa = 2T = 1`.
    fn assemble(&self, s: ScaledIntegrals, gamma: f64) -> LocalSolution {
        let p = self.p();
        let plateau = self.params.plateau(gamma);
        let half_width = s.tau / (2.0 * gamma).sqrt();
        let kappa = 2.0 * half_width;
        let w2 = plateau * plateau;
        LocalSolution {
            p,
            gamma,
            rho: plateau * s.gap.ratio(),
            xi: (kappa * w2 * s.m2).sqrt(),
            norm_p1: kappa * plateau.powf(p + 1.0) * s.mp,
            grad_sq: w2 * s.g / kappa,
            half_width,
            gap: s.gap,
        }
    }

    fn root<F: FnMut(f64) -> f64>(&self, f: F, bracket: RootBracket) -> Result<f64> {
        Ok(find_root(f, bracket, self.tol.x_tol, self.tol.f_tol)?)
    }

    /// Brackets a root of an increasing function of the log-gap.
    fn bracket_log_gap<F: FnMut(f64) -> f64>(&self, mut f: F) -> Result<RootBracket> {
        let mut lo = MIN_LOG_GAP;
        let mut f_lo = f(lo);
        while f_lo >= 0.0 {
            if lo < 1e-280 {
                return Err(NumericsError::SameSign { lo, hi: 1.0, f_lo, f_hi: f(1.0) }.into());
            }
            lo *= 1e-8;
            f_lo = f(lo);
        }
        if f_lo.is_nan() {
            return Err(NumericsError::NonFinite { abscissa: lo }.into());
        }
        let f_one = f(1.0);
        if f_one >= 0.0 {
            return Ok(RootBracket::new(lo, 1.0)?);
        }
        Ok(expand_bracket_up(f, 1.0, 4.0, 200)?)
    }

    /// Log-gap of the solution with eigenvalue `gamma`.
    pub fn solve_gap(&self, gamma: f64) -> Result<PlateauGap> {
        if !(gamma > PI * PI) || !gamma.is_finite() {
            return Err(Error::Domain(format!(
                "no positive solution for γ = {gamma} ≤ π²"
            )));
        }
        let target = (0.5 * gamma).sqrt().ln();
        let fail = Cell::new(None);
        let mut f = |log_gap: f64| match self.kernel.tau(PlateauGap::from_log(log_gap), &self.tol.quadrature) {
            Ok(tau) => tau.ln() - target,
            Err(e) => {
                fail.set(Some(e));
                f64::NAN
            }
        };
        let bracket = self.bracket_log_gap(&mut f);
        let root = bracket.and_then(|b| self.root(&mut f, b));
        match (root, fail.take()) {
            (_, Some(e)) => Err(e.into()),
            (r, None) => r.map(PlateauGap::from_log),
        }
    }

    /// The unique `ρ` with `T(ρ, γ) = 1/2`.
    pub fn solve_rho(&self, gamma: f64) -> Result<f64> {
        let gap = self.solve_gap(gamma)?;
        Ok(self.params.plateau(gamma) * gap.ratio())
    }

    /// The solution for eigenvalue `gamma` (with `γ` exact, not `2τ²`).
    pub fn solve_gamma(&self, gamma: f64) -> Result<LocalSolution> {
        let gap = self.solve_gap(gamma)?;
        Ok(self.assemble(self.scaled(gap)?, gamma))
    }

    /// Norms of the solution through `(ρ, γ)`:
    /// `ξ² = 2∫₀^ρ w² dw/√(2(F(ρ)−F(w)))`, `‖w‖_{p+1}^{p+1}` likewise and
    /// `‖w′‖₂² = 2∫₀^ρ √(2(F(ρ)−F(w))) dw`.
    ///
    /// When `ρ` is too close to `γ^{1/(p−1)}` for its gap to be read off, the
    /// gap is recovered from `γ` and checked against `ρ`.
    pub fn compute_norms(&self, rho: f64, gamma: f64) -> Result<LocalSolution> {
        let plateau = self.params.plateau(gamma);
        let sigma = rho / plateau;
        if !(sigma > 0.0 && sigma <= 1.0) || !(gamma > 0.0) {
            return Err(Error::Domain(format!(
                "need 0 < ρ < γ^(1/(p-1)) = {plateau}, got ρ = {rho}"
            )));
        }
        let gap = if 1.0 - sigma > 1e-9 {
            PlateauGap::from_ratio(sigma)
        } else {
            let gap = self.solve_gap(gamma)?;
            let expected = plateau * gap.ratio();
            if ((rho - expected) / expected).abs() > 1e-12 {
                return Err(Error::Domain(format!(
                    "ρ = {rho} is not the solution for γ = {gamma} (expected {expected})"
                )));
            }
            gap
        };
        Ok(self.assemble(self.scaled(gap)?, gamma))
    }

    /// The solution with `‖w‖₂ = xi`.
    pub fn solve_gamma_for_xi(&self, xi: f64) -> Result<LocalSolution> {
        if !(xi > 0.0) {
            return Err(Error::Domain(format!("ξ must be positive, got {xi}")));
        }
        if xi > MAX_XI {
            return Err(Error::Domain(format!("ξ = {xi} exceeds the supported maximum {MAX_XI}")));
        }
        let target = xi.ln();
        let p = self.p();
        let fail = Cell::new(None);
        let mut f = |log_gap: f64| match self.scaled(PlateauGap::from_log(log_gap)) {
            Ok(s) => (2.0 * s.tau * s.tau).ln() / (p - 1.0) + 0.5 * s.m2.ln() - target,
            Err(e) => {
                fail.set(Some(e));
                f64::NAN
            }
        };
        let bracket = self.bracket_log_gap(&mut f);
        let root = bracket.and_then(|b| self.root(&mut f, b));
        if let Some(e) = fail.take() {
            return Err(e);
        }
        self.solution_at_gap(PlateauGap::from_log(root?))
    }

    /// `D(ξ) = ‖w_ξ′‖₂² + (2/(p+1))‖w_ξ‖_{p+1}^{p+1}`.
    pub fn d_of_xi(&self, xi: f64) -> Result<f64> {
        Ok(self.solve_gamma_for_xi(xi)?.d())
    }

    /// Log-gap where `D` reaches `target`.
    pub(crate) fn solve_gap_for_d(&self, target: f64) -> Result<PlateauGap> {
        let p = self.p();
        let ln_target = target.ln();
        let fail = Cell::new(None);
        let mut f = |log_gap: f64| match self.solution_at_gap(PlateauGap::from_log(log_gap)) {
            Ok(s) => s.d().ln() - ln_target,
            Err(e) => {
                fail.set(Some(e));
                f64::NAN
            }
        };
        let _ = p;
        let bracket = self.bracket_log_gap(&mut f);
        let root = bracket.and_then(|b| self.root(&mut f, b));
        if let Some(e) = fail.take() {
            return Err(e);
        }
        Ok(PlateauGap::from_log(root?))
    }

    /// `n` samples `(x, w(x))` on `[0, 1/2]` for the solution through
    /// `(ρ, γ)`, mirrored onto `[1/2, 1]` (so `2n − 1` rows in total).
    pub fn reconstruct_profile(&self, rho: f64, gamma: f64, n: usize) -> Result<Vec<(f64, f64)>> {
        let gap = self.solve_gap(gamma)?;
        let expected = self.params.plateau(gamma) * gap.ratio();
        if ((rho - expected) / expected).abs() > 1e-8 {
            return Err(Error::Domain(format!(
                "ρ = {rho} is not the solution for γ = {gamma} (expected {expected})"
            )));
        }
        let sol = self.assemble(self.scaled(gap)?, gamma);
        self.profile(&sol, n)
    }

    /// Profile samples of a solution on the branch, see
    /// [`LocalProblem::reconstruct_profile`].
    pub fn profile(&self, sol: &LocalSolution, n: usize) -> Result<Vec<(f64, f64)>> {
        if n < 2 {
            return Err(Error::Domain(format!("profile needs n ≥ 2 samples, got {n}")));
        }
        let gap = sol.gap;
        let sigma = gap.ratio();
        let t_max = sigma.sqrt();
        let plateau = sol.rho / sigma;
        let spec = &self.tol.quadrature;
        let tau = self.kernel.tau(gap, spec)?;
        let intervals = 2 * (n - 1);

        let mut half = Vec::with_capacity(n);
        half.push((0.0, 0.0));
        for i in 1..n - 1 {
            let x = i as f64 / intervals as f64;
            // Θ(t) = τ(1 − 2x) locates s = σ − t²
            let target = tau * (1.0 - 2.0 * x);
            let fail = Cell::new(None);
            let mut f = |log_t: f64| match self.kernel.elapsed(gap, log_t.exp(), spec) {
                Ok(v) => v - target,
                Err(e) => {
                    fail.set(Some(e));
                    f64::NAN
                }
            };
            let lo = -690.0;
            let t = if f(lo) >= 0.0 {
                0.0
            } else {
                let b = RootBracket::new(lo, t_max.ln())?;
                let log_t = find_root(&mut f, b, 1e-15, 0.0);
                if let Some(e) = fail.take() {
                    return Err(e);
                }
                log_t?.exp()
            };
            half.push((x, plateau * (sigma - t * t).max(0.0)));
        }
        half.push((0.5, sol.rho));

        let mut full = half.clone();
        for j in n..=intervals {
            let mirror = half[intervals - j].1;
            full.push((j as f64 / intervals as f64, mirror));
        }
        Ok(full)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cubic() -> LocalProblem {
        LocalProblem::with_p(3.0).unwrap()
    }

    #[test]
    fn potential_values() {
        assert_eq!(potential(0.0, 5.0, 3.0), 0.0);
        assert!((potential(1.0, 2.0, 3.0) - 0.75).abs() < 1e-15);
        for (gamma, p) in [(20.0f64, 3.0f64), (50.0, 2.0), (13.0, 4.5)] {
            let zero = (gamma * (p + 1.0) / 2.0).powf(1.0 / (p - 1.0));
            assert!(potential(zero, gamma, p).abs() < 1e-10 * gamma * zero * zero);
        }
    }

    #[test]
    fn time_map_linear_limit() {
        let lp = cubic();
        let t = lp.time_map(1e-6, PI * PI).unwrap();
        assert!((t - 0.5).abs() < 1e-6);
        let t = lp.time_map(1e-6, 4.0 * PI * PI).unwrap();
        assert!((t - 0.25).abs() < 1e-6);
    }

    #[test]
    fn time_map_domain_errors() {
        let lp = cubic();
        assert!(matches!(lp.time_map(5.0, 20.0), Err(Error::Domain(_))));
        assert!(matches!(lp.time_map(-1.0, 20.0), Err(Error::Domain(_))));
        assert!(matches!(lp.time_map(0.0, 20.0), Err(Error::Domain(_))));
    }

    #[test]
    fn direct_and_gap_time_maps_agree() {
        for p in [2.0, 3.0, 4.5] {
            let lp = LocalProblem::with_p(p).unwrap();
            for gamma in [12.0, 20.0, 60.0, 200.0] {
                let plateau = lp.params().plateau(gamma);
                for sigma in [0.01, 0.3, 0.9, 0.999] {
                    let direct = lp.time_map(sigma * plateau, gamma).unwrap();
                    let scaled = lp.time_map_at_gap(PlateauGap::from_ratio(sigma), gamma).unwrap();
                    assert!(((direct - scaled) / scaled).abs() < 1e-9, "p={p} γ={gamma} σ={sigma}");
                }
            }
        }
    }

    #[test]
    fn solve_rho_brackets() {
        let lp = cubic();
        assert!(lp.solve_rho(PI * PI).is_err());
        assert!(lp.solve_rho(5.0).is_err());
        let rho = lp.solve_rho(PI * PI * (1.0 + 1e-6)).unwrap();
        assert!(rho > 0.0 && rho <= 1e-2);
        let rho = lp.solve_rho(100.0).unwrap();
        assert!(rho < 10.0 && rho > 9.0);
        let t = lp.time_map(rho, 100.0).unwrap();
        assert!((t - 0.5).abs() < 1e-8);
    }

    #[test]
    fn norms_linear_limit() {
        let lp = cubic();
        let sol = lp.compute_norms(1e-4, PI * PI).unwrap();
        let ratio = sol.xi * sol.xi / (sol.rho * sol.rho);
        assert!((ratio - 0.5).abs() < 0.5e-3);
    }

    #[test]
    fn energy_identity_on_grid() {
        for p in [2.0, 3.0, 5.0] {
            let lp = LocalProblem::with_p(p).unwrap();
            for gamma in [10.0, 15.0, 50.0, 200.0, 1e4, 1e6] {
                let sol = lp.solve_gamma(gamma).unwrap();
                assert!(sol.energy_identity_residual() < 1e-8, "p={p} γ={gamma}");
                assert!(sol.time_map_residual() < 1e-8);
                assert!(sol.rho <= lp.params().plateau(gamma));
                assert!(sol.sup_norm_defect() >= 0.0);
                assert!(sol.log_sup_norm_defect().is_finite());
                assert!(sol.xi > 0.0 && sol.xi < sol.rho);
            }
        }
    }

    #[test]
    fn compute_norms_matches_branch_solution() {
        let lp = cubic();
        for gamma in [15.0, 50.0, 1e4] {
            let sol = lp.solve_gamma(gamma).unwrap();
            let again = lp.compute_norms(sol.rho, gamma).unwrap();
            assert!(((again.xi - sol.xi) / sol.xi).abs() < 1e-9);
            assert!(((again.grad_sq - sol.grad_sq) / sol.grad_sq).abs() < 1e-8);
        }
    }

    #[test]
    fn gamma_for_xi_round_trip() {
        let lp = cubic();
        for gamma in [15.0, 50.0, 200.0] {
            let sol = lp.solve_gamma(gamma).unwrap();
            let back = lp.solve_gamma_for_xi(sol.xi).unwrap();
            assert!(((back.gamma - gamma) / gamma).abs() < 1e-8);
        }
    }

    #[test]
    fn bifurcation_point() {
        let sol = cubic().solve_gamma_for_xi(1e-3).unwrap();
        assert!((sol.gamma - PI * PI).abs() < 1e-3);
        assert!(((sol.xi - 1e-3) / 1e-3).abs() < 1e-9);
    }

    #[test]
    fn xi_guard() {
        let lp = cubic();
        assert!(lp.solve_gamma_for_xi(0.0).is_err());
        assert!(lp.solve_gamma_for_xi(-1.0).is_err());
        assert!(lp.solve_gamma_for_xi(2e8).is_err());
    }

    #[test]
    fn gamma_near_three_term_expansion() {
        let sol = cubic().solve_gamma_for_xi(100.0).unwrap();
        let c1 = 2.0 * 2f64.sqrt();
        let predicted = 1e4 + c1 * 100.0 + c1 * c1 / 2.0;
        assert!(((sol.gamma - predicted) / predicted).abs() < 1e-4);
    }

    #[test]
    fn d_monotone_and_window() {
        let lp = cubic();
        let ds: Vec<f64> = [1.0, 2.0, 4.0, 8.0, 16.0].iter().map(|&x| lp.d_of_xi(x).unwrap()).collect();
        assert!(ds.windows(2).all(|w| w[0] < w[1]));
        assert!(lp.d_of_xi(1e-6).unwrap() < 1e-9);
        let d = lp.d_of_xi(100.0).unwrap();
        assert!(d > 0.4e8 && d < 0.7e8);
    }

    #[test]
    fn profile_shape() {
        let lp = cubic();
        let sol = lp.solve_gamma(20.0).unwrap();
        let prof = lp.profile(&sol, 11).unwrap();
        assert_eq!(prof.len(), 21);
        assert_eq!(prof[0], (0.0, 0.0));
        assert_eq!(prof[10], (0.5, sol.rho));
        assert_eq!(prof[20].0, 1.0);
        assert_eq!(prof[20].1, 0.0);
        for j in 0..21 {
            assert_eq!(prof[j].1, prof[20 - j].1);
        }
        assert!(prof[..11].windows(2).all(|w| w[0].1 < w[1].1));
    }

    #[test]
    fn profile_linear_limit() {
        let lp = cubic();
        let rho = 1e-4;
        let gamma = PI * PI;
        // (ρ, π²) is only asymptotically on the branch; use the branch point
        // with that maximum instead
        let sigma = rho / lp.params().plateau(gamma);
        let sol = lp.solution_at_gap(PlateauGap::from_ratio(sigma)).unwrap();
        let prof = lp.profile(&sol, 21).unwrap();
        for (x, w) in prof {
            let lin = sol.rho * (PI * x).sin();
            assert!((w - lin).abs() <= 1e-3 * sol.rho, "x={x}: {w} vs {lin}");
        }
    }

    #[test]
    fn profile_rejects_bad_input() {
        let lp = cubic();
        assert!(lp.reconstruct_profile(1.0, 20.0, 5).is_err());
        let rho = lp.solve_rho(20.0).unwrap();
        assert!(lp.reconstruct_profile(rho, 20.0, 1).is_err());
        assert!(lp.reconstruct_profile(rho, 20.0, 3).is_ok());
    }
}
