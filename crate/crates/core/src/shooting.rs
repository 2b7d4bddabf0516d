//! Initial-value shooting for the local problem, used only to cross-check
//! the time-map solver.
//!
//! Integrates `w″ = w^p − γw`, `w(0) = 0`, `w′(0) = s` with fixed-step RK4
//! on `[0, 1/2]` and bisects on `s` until `w′(1/2) = 0`. Resolution is
//! limited by how close `s` sits to the plateau slope, so this is meant for
//! moderate `γ` only.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::local::potential;

/// Default number of RK4 steps on `[0, 1/2]`.
pub const DEFAULT_STEPS: usize = 20_000;

/// Shooting solution with its grid on `[0, 1/2]`.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ShootingSolution {
    pub p: f64,
    pub gamma: f64,
    /// `w′(0)`.
    pub slope: f64,
    pub rho: f64,
    pub xi: f64,
    pub norm_p1: f64,
    pub grad_sq: f64,
    w: Vec<f64>,
    dw: Vec<f64>,
}

fn rhs(p: f64, gamma: f64, w: f64) -> f64 {
    w.max(0.0).powf(p) - gamma * w
}

/// `(w, w′)` on the uniform grid of `steps` RK4 steps over `[0, 1/2]`.
fn integrate(p: f64, gamma: f64, slope: f64, steps: usize) -> (Vec<f64>, Vec<f64>) {
    let h = 0.5 / steps as f64;
    let mut w = Vec::with_capacity(steps + 1);
    let mut dw = Vec::with_capacity(steps + 1);
    let (mut y, mut v) = (0.0f64, slope);
    w.push(y);
    dw.push(v);
    for _ in 0..steps {
        let k1y = v;
        let k1v = rhs(p, gamma, y);
        let k2y = v + 0.5 * h * k1v;
        let k2v = rhs(p, gamma, y + 0.5 * h * k1y);
        let k3y = v + 0.5 * h * k2v;
        let k3v = rhs(p, gamma, y + 0.5 * h * k2y);
        let k4y = v + h * k3v;
        let k4v = rhs(p, gamma, y + h * k3y);
        y += h / 6.0 * (k1y + 2.0 * k2y + 2.0 * k3y + k4y);
        v += h / 6.0 * (k1v + 2.0 * k2v + 2.0 * k3v + k4v);
        w.push(y);
        dw.push(v);
    }
    (w, dw)
}

/// Composite Simpson on a uniform grid with an even number of intervals.
fn simpson(values: impl Iterator<Item = f64>, h: f64, n: usize) -> f64 {
    let mut acc = 0.0;
    for (i, v) in values.enumerate() {
        let weight = if i == 0 || i == n {
            1.0
        } else if i % 2 == 1 {
            4.0
        } else {
            2.0
        };
        acc += weight * v;
    }
    acc * h / 3.0
}

/// Solves the local problem for `gamma` by shooting.
pub fn shoot(p: f64, gamma: f64, steps: usize) -> Result<ShootingSolution> {
    if !(p > 1.0) {
        return Err(Error::InvalidParams(format!("p must exceed 1, got {p}")));
    }
    let pi2 = std::f64::consts::PI.powi(2);
    if !(gamma > pi2) {
        return Err(Error::Domain(format!("no positive solution for γ = {gamma} ≤ π²")));
    }
    if steps < 2 || steps % 2 == 1 {
        return Err(Error::InvalidParams(format!("steps must be even and ≥ 2, got {steps}")));
    }
    let plateau = gamma.powf(1.0 / (p - 1.0));
    // w′(0) reaching the plateau never turns
    let (mut lo, mut hi) = (0.0, (2.0 * potential(plateau, gamma, p)).sqrt());
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        let (_, dw) = integrate(p, gamma, mid, steps);
        // turning before x = 1/2 means the half-period is too short
        if dw.iter().any(|&v| v <= 0.0) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let slope = 0.5 * (lo + hi);
    let (w, dw) = integrate(p, gamma, slope, steps);
    if w.iter().any(|v| !v.is_finite() || *v < 0.0) {
        return Err(Error::Domain(format!("shooting left the positive cone at γ = {gamma}")));
    }
    let h = 0.5 / steps as f64;
    let half = |f: &dyn Fn(usize) -> f64| simpson((0..=steps).map(f), h, steps);
    let xi2 = 2.0 * half(&|i| w[i] * w[i]);
    let norm_p1 = 2.0 * half(&|i| w[i].powf(p + 1.0));
    let grad_sq = 2.0 * half(&|i| dw[i] * dw[i]);
    Ok(ShootingSolution {
        p,
        gamma,
        slope,
        rho: w[steps],
        xi: xi2.sqrt(),
        norm_p1,
        grad_sq,
        w,
        dw,
    })
}

impl ShootingSolution {
    fn steps(&self) -> usize {
        self.w.len() - 1
    }

    /// `|w′(0)² − 2F(ρ)| / 2F(ρ)`.
    pub fn energy_residual(&self) -> f64 {
        let two_f = 2.0 * potential(self.rho, self.gamma, self.p);
        ((self.slope * self.slope - two_f) / two_f).abs()
    }

    /// `|w′(1/2)| / w′(0)`.
    pub fn turning_residual(&self) -> f64 {
        (self.dw[self.steps()] / self.slope).abs()
    }

    /// `w(x)` for `x ∈ [0, 1]` by cubic Hermite interpolation, mirrored
    /// about `1/2`.
    pub fn value_at(&self, x: f64) -> f64 {
        let x = if x > 0.5 { 1.0 - x } else { x }.clamp(0.0, 0.5);
        let n = self.steps();
        let h = 0.5 / n as f64;
        let pos = x / h;
        let i = (pos.floor() as usize).min(n - 1);
        let t = pos - i as f64;
        let (y0, y1) = (self.w[i], self.w[i + 1]);
        let (m0, m1) = (self.dw[i] * h, self.dw[i + 1] * h);
        let t2 = t * t;
        let t3 = t2 * t;
        (2.0 * t3 - 3.0 * t2 + 1.0) * y0 + (t3 - 2.0 * t2 + t) * m0 + (-2.0 * t3 + 3.0 * t2) * y1 + (t3 - t2) * m1
    }

    /// `n` equally spaced samples on `[0, 1/2]`, mirrored onto `[1/2, 1]`.
    pub fn profile(&self, n: usize) -> Vec<(f64, f64)> {
        let n = n.max(2);
        let intervals = 2 * (n - 1);
        let half: Vec<f64> = (0..n).map(|j| self.value_at(j as f64 / intervals as f64)).collect();
        (0..=intervals)
            .map(|j| (j as f64 / intervals as f64, half[j.min(intervals - j)]))
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn linear_limit() {
        let gamma = std::f64::consts::PI.powi(2) * (1.0 + 1e-4);
        let s = shoot(3.0, gamma, 2000).unwrap();
        assert!(s.rho < 0.05);
        let x = 0.3;
        let lin = s.rho * (std::f64::consts::PI * x).sin();
        assert!((s.value_at(x) - lin).abs() < 1e-2 * s.rho);
    }

    #[test]
    fn conserved_energy_and_turning_point() {
        let s = shoot(3.0, 20.0, DEFAULT_STEPS).unwrap();
        assert!(s.energy_residual() < 1e-10);
        assert!(s.turning_residual() < 1e-8);
        assert!(s.rho < 20f64.sqrt());
    }

    #[test]
    fn rejects_bad_input() {
        assert!(shoot(3.0, 5.0, 100).is_err());
        assert!(shoot(1.0, 20.0, 100).is_err());
        assert!(shoot(3.0, 20.0, 101).is_err());
    }

    #[test]
    fn profile_symmetric() {
        let s = shoot(2.0, 30.0, 1000).unwrap();
        let prof = s.profile(6);
        assert_eq!(prof.len(), 11);
        for j in 0..11 {
            assert_eq!(prof[j].1, prof[10 - j].1);
        }
        assert_eq!(prof[0].1, 0.0);
        assert_eq!(prof[5].1, s.rho);
    }
}
