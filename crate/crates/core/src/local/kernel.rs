//! Time-map integrals in plateau-scaled variables.
//!
//! With `w* = γ^{1/(p−1)}`, `s = w/w*` and `f(s) = s²/2 − s^{p+1}/(p+1)`,
//! a solution with `w(1/2) = ρ = σ·w*` satisfies
//!
//! ```text
//! T(ρ, γ) = τ(σ) / √(2γ),     τ(σ) = ∫₀^σ ds / √(f(σ) − f(s)),
//! ```
//!
//! so the solution branch is `γ = 2τ(σ)²`. For large γ the gap
//! `ε = 1 − σ` behaves like `exp(−√((p−1)γ)/2)` and leaves the range of
//! doubles long before the solver's upper limits, so everything here is
//! parametrised by `L = −ln ε` and evaluated without ever forming `1 − ε`.
//!
//! All integrals use `s = σ − t²`, i.e. `u = 1 − s = ε + t²`, and the divided
//! difference `Q = (f(σ) − f(s))/(σ − s)`, so that `√(f(σ)−f(s)) = t·√Q`.

use crate::error::Result;
use crate::numerics::{integrate, integrate_vec, QuadratureSpec};

/// Below this `u = 1 − s` the divided difference is summed as a series.
const SERIES_CUTOFF: f64 = 0.05;

/// For `L` below this the profile is far from a plateau and the integrals are
/// taken directly; above it the logarithmic part of `τ` is split off.
/// Below this `2ε + t²` every split integrand has reached its zero limit.
const NEGLIGIBLE_H1: f64 = 1e-280;

const SPLIT_LOG_GAP: f64 = 1.0;

/// `L = −ln(1 − ρ/w*)`, the logarithm of the relative distance of the
/// maximum below the plateau level.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd, serde::Serialize, serde::Deserialize)]
pub struct PlateauGap(f64);

impl PlateauGap {
    pub fn from_log(log_gap: f64) -> Self {
        debug_assert!(log_gap > 0.0);
        Self(log_gap)
    }

    /// From `σ = ρ/w* ∈ (0, 1)`.
    pub fn from_ratio(sigma: f64) -> Self {
        Self(-(-sigma).ln_1p())
    }

    /// `L`.
    pub fn log(&self) -> f64 {
        self.0
    }

    /// `ε = 1 − σ`; underflows to zero for very large `L`.
    pub fn gap(&self) -> f64 {
        (-self.0).exp()
    }

    /// `σ = ρ/w*`.
    pub fn ratio(&self) -> f64 {
        -(-self.0).exp_m1()
    }
}

/// Scale-free description of one solution of the local problem.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScaledIntegrals {
    pub gap: PlateauGap,
    /// `τ(σ)`.
    pub tau: f64,
    /// `J₂/τ` with `J_k = ∫₀^σ s^k ds/√(f(σ)−f(s))`.
    pub m2: f64,
    /// `J_{p+1}/τ`.
    pub mp: f64,
    /// `4τ·∫₀^σ √(f(σ)−f(s)) ds`.
    pub g: f64,
}

#[derive(Debug, Clone)]
pub(crate) struct Kernel {
    p: f64,
    /// Taylor coefficients `c_n` of `f(1) − f(1−u) = Σ_{n≥2} c_n uⁿ`.
    coeffs: Vec<f64>,
}

#[derive(Clone, Copy)]
struct GapValues {
    eps: f64,
    sigma: f64,
    log_gap: f64,
}

impl From<PlateauGap> for GapValues {
    fn from(g: PlateauGap) -> Self {
        Self {
            eps: g.gap(),
            sigma: g.ratio(),
            log_gap: g.log(),
        }
    }
}

impl Kernel {
    pub fn new(p: f64) -> Self {
        // binom(p+1, n) by recurrence; exact zeros terminate integer p
        let mut coeffs = Vec::with_capacity(64);
        let mut binom = (p + 1.0) * p / 2.0;
        coeffs.push((p - 1.0) / 2.0);
        for n in 3..64 {
            binom *= (p + 1.0 - (n as f64 - 1.0)) / n as f64;
            let sign = if n % 2 == 0 { 1.0 } else { -1.0 };
            let c = sign * binom / (p + 1.0);
            coeffs.push(c);
            if binom == 0.0 {
                break;
            }
        }
        Self { p, coeffs }
    }

    /// `Q(u, ε) = (f(σ) − f(s))/(σ − s)` at `s = σ − t²`.
    fn divided_difference(&self, gv: GapValues, t2: f64) -> f64 {
        let u = gv.eps + t2;
        if u < SERIES_CUTOFF {
            // Σ c_n h_{n−1}(u, ε), h_m the complete homogeneous polynomial
            let mut h = 2.0 * gv.eps + t2;
            let mut eps_pow = gv.eps;
            let mut sum = self.coeffs[0] * h;
            for &c in &self.coeffs[1..] {
                eps_pow *= gv.eps;
                h = u * h + eps_pow;
                let term = c * h;
                sum += term;
                if term.abs() <= 1e-18 * sum.abs() {
                    break;
                }
            }
            sum
        } else {
            let p = self.p;
            let sigma = gv.sigma;
            let s = sigma - t2;
            let r = t2 / sigma;
            let e = if r == 0.0 {
                p + 1.0
            } else {
                -((p + 1.0) * (-r).ln_1p()).exp_m1() / r
            };
            0.5 * (sigma + s) - sigma.powf(p) * e / (p + 1.0)
        }
    }

    /// `Q(ε, ε)/(2ε) = f′(σ)/(2ε)`, the limit of `Q/(2ε + t²)` as `t → 0`.
    fn p_at_origin(&self, gv: GapValues) -> f64 {
        if gv.eps < SERIES_CUTOFF {
            let mut sum = 0.0;
            let mut eps_pow = 1.0;
            for (i, &c) in self.coeffs.iter().enumerate() {
                let n = (i + 2) as f64;
                let term = c * n * eps_pow / 2.0;
                sum += term;
                if term.abs() <= 1e-18 * sum.abs() {
                    break;
                }
                eps_pow *= gv.eps;
            }
            sum
        } else {
            let one_minus_pow = -((self.p - 1.0) * gv.sigma.ln()).exp_m1();
            gv.sigma * one_minus_pow / (2.0 * gv.eps)
        }
    }

    /// `asinh(t/√(2ε))`, safe when `ε` underflows.
    fn log_part(gv: GapValues, t: f64) -> f64 {
        if t <= 0.0 {
            return 0.0;
        }
        let lx = t.ln() + 0.5 * gv.log_gap - 0.5 * std::f64::consts::LN_2;
        if lx > 18.0 {
            std::f64::consts::LN_2 + lx
        } else {
            lx.exp().asinh()
        }
    }

    pub fn integrals(&self, gap: PlateauGap, spec: &QuadratureSpec) -> Result<ScaledIntegrals> {
        let gv = GapValues::from(gap);
        let p = self.p;
        let sigma = gv.sigma;
        if gap.log() < SPLIT_LOG_GAP {
            // t = √σ·v, everything normalised by the natural power of σ
            let [tau, j2, jp, jd] = integrate_vec(
                |v| {
                    let q_over_sigma = self.divided_difference(gv, sigma * v * v) / sigma;
                    let k = 2.0 / q_over_sigma.sqrt();
                    let one_minus = 1.0 - v * v;
                    [
                        k,
                        k * one_minus * one_minus,
                        k * one_minus.powf(p + 1.0),
                        2.0 * v * v * q_over_sigma.sqrt(),
                    ]
                },
                0.0,
                1.0,
                spec,
            )?;
            return Ok(ScaledIntegrals {
                gap,
                tau,
                m2: sigma * sigma * j2 / tau,
                mp: sigma.powf(p + 1.0) * jp / tau,
                g: 4.0 * tau * sigma * sigma * jd,
            });
        }

        let k0 = 1.0 / self.p_at_origin(gv).sqrt();
        let t_max = sigma.sqrt();
        let [reg, r2, rp, jd] = integrate_vec(
            |t| {
                let t2 = t * t;
                let h1 = 2.0 * gv.eps + t2;
                if h1 < NEGLIGIBLE_H1 {
                    return [0.0; 4];
                }
                let q = self.divided_difference(gv, t2);
                let k = (h1 / q).sqrt();
                let u = gv.eps + t2;
                let ln_s = if u < 0.5 { (-u).ln_1p() } else { (sigma - t2).ln() };
                let inv = 2.0 / q.sqrt();
                [
                    2.0 * (k - k0) / h1.sqrt(),
                    inv * -(2.0 * ln_s).exp_m1(),
                    inv * -((p + 1.0) * ln_s).exp_m1(),
                    2.0 * t2 * q.sqrt(),
                ]
            },
            0.0,
            t_max,
            spec,
        )?;
        let tau = 2.0 * k0 * Self::log_part(gv, t_max) + reg;
        Ok(ScaledIntegrals {
            gap,
            tau,
            m2: 1.0 - r2 / tau,
            mp: 1.0 - rp / tau,
            g: 4.0 * tau * jd,
        })
    }

    /// `τ(σ)` alone.
    pub fn tau(&self, gap: PlateauGap, spec: &QuadratureSpec) -> Result<f64> {
        self.elapsed(gap, gap.ratio().sqrt(), spec)
    }

    /// `Θ(t) = ∫₀^t 2 dt′/√Q`: scaled time from the midpoint to `s = σ − t²`.
    /// Position is `x = 1/2 − Θ(t)/(2τ)`.
    pub fn elapsed(&self, gap: PlateauGap, t: f64, spec: &QuadratureSpec) -> Result<f64> {
        let gv = GapValues::from(gap);
        if t <= 0.0 {
            return Ok(0.0);
        }
        if gap.log() < SPLIT_LOG_GAP {
            let sigma = gv.sigma;
            let v_max = (t / sigma.sqrt()).min(1.0);
            return Ok(integrate(
                |v| 2.0 / (self.divided_difference(gv, sigma * v * v) / sigma).sqrt(),
                0.0,
                v_max,
                spec,
            )?);
        }
        let k0 = 1.0 / self.p_at_origin(gv).sqrt();
        let reg = integrate(
            |t| {
                let t2 = t * t;
                let h1 = 2.0 * gv.eps + t2;
                if h1 < NEGLIGIBLE_H1 {
                    return 0.0;
                }
                let k = (h1 / self.divided_difference(gv, t2)).sqrt();
                2.0 * (k - k0) / h1.sqrt()
            },
            0.0,
            t,
            spec,
        )?;
        Ok(2.0 * k0 * Self::log_part(gv, t) + reg)
    }
}
