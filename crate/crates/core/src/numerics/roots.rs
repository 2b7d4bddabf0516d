//! Bracketed scalar root finding.

use super::NumericsError;

/// A closed interval `[lo, hi]` with `lo < hi`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RootBracket {
    pub lo: f64,
    pub hi: f64,
}

impl RootBracket {
    pub fn new(lo: f64, hi: f64) -> Result<Self, NumericsError> {
        if lo < hi && lo.is_finite() && hi.is_finite() {
            Ok(Self { lo, hi })
        } else {
            Err(NumericsError::InvalidBracket { lo, hi })
        }
    }

    pub fn width(&self) -> f64 {
        self.hi - self.lo
    }

    pub fn contains(&self, x: f64) -> bool {
        self.lo <= x && x <= self.hi
    }
}

/// Iteration cap for [`find_root`]. Brent needs far fewer; the cap only
/// matters for pathological inputs.
const MAX_ITERATIONS: usize = 400;

fn eval<F: FnMut(f64) -> f64>(f: &mut F, x: f64) -> Result<f64, NumericsError> {
    let y = f(x);
    if y.is_nan() {
        Err(NumericsError::NonFinite { abscissa: x })
    } else {
        Ok(y)
    }
}

/// Brent's method: bisection safeguarded inverse-quadratic/secant steps.
///
/// Stops when the bracket width is below `x_tol·|x|` (plus a few ulps), or
/// when `|f(x)| ≤ f_tol`. The returned point always lies inside the initial
/// bracket.
pub fn find_root<F>(mut f: F, bracket: RootBracket, x_tol: f64, f_tol: f64) -> Result<f64, NumericsError>
where
    F: FnMut(f64) -> f64,
{
    let (mut a, mut b) = (bracket.lo, bracket.hi);
    let mut fa = eval(&mut f, a)?;
    let mut fb = eval(&mut f, b)?;
    if fa.abs() <= f_tol {
        return Ok(a);
    }
    if fb.abs() <= f_tol {
        return Ok(b);
    }
    if fa.signum() == fb.signum() {
        return Err(NumericsError::SameSign { lo: a, hi: b, f_lo: fa, f_hi: fb });
    }

    let (mut c, mut fc) = (a, fa);
    let mut d = b - a;
    let mut e = d;
    for _ in 0..MAX_ITERATIONS {
        if fb.signum() == fc.signum() {
            c = a;
            fc = fa;
            d = b - a;
            e = d;
        }
        if fc.abs() < fb.abs() {
            a = b;
            b = c;
            c = a;
            fa = fb;
            fb = fc;
            fc = fa;
        }
        let tol = 2.0 * f64::EPSILON * b.abs() + 0.5 * x_tol * b.abs() + f64::MIN_POSITIVE;
        let m = 0.5 * (c - b);
        if m.abs() <= tol || fb.abs() <= f_tol || fb == 0.0 {
            return Ok(b);
        }
        if e.abs() >= tol && fa.abs() > fb.abs() {
            let s = fb / fa;
            let (mut p, mut q);
            if a == c {
                p = 2.0 * m * s;
                q = 1.0 - s;
            } else {
                let qa = fa / fc;
                let r = fb / fc;
                p = s * (2.0 * m * qa * (qa - r) - (b - a) * (r - 1.0));
                q = (qa - 1.0) * (r - 1.0) * (s - 1.0);
            }
            if p > 0.0 {
                q = -q;
            } else {
                p = -p;
            }
            if 2.0 * p < (3.0 * m * q - (tol * q).abs()).min((e * q).abs()) {
                e = d;
                d = p / q;
            } else {
                d = m;
                e = m;
            }
        } else {
            d = m;
            e = m;
        }
        a = b;
        fa = fb;
        b += if d.abs() > tol { d } else { tol.copysign(m) };
        fb = eval(&mut f, b)?;
    }
    let (lo, hi) = if b < c { (b, c) } else { (c, b) };
    Err(NumericsError::RootBudgetExhausted { lo, hi })
}

/// Finds `[a, b]` with a sign change by growing the upper end geometrically:
/// `lo·growth^k` when `lo > 0`, `lo + growth^k` otherwise.
pub fn expand_bracket_up<F>(mut f: F, lo: f64, growth: f64, budget: usize) -> Result<RootBracket, NumericsError>
where
    F: FnMut(f64) -> f64,
{
    if !(growth > 1.0) {
        return Err(NumericsError::InvalidBracket { lo, hi: lo * growth });
    }
    let f_lo = eval(&mut f, lo)?;
    if f_lo == 0.0 {
        return RootBracket::new(lo, if lo > 0.0 { lo * growth } else { lo + 1.0 });
    }
    let upper = |k: i32| if lo > 0.0 { lo * growth.powi(k) } else { lo + growth.powi(k - 1) };
    let mut prev = lo;
    for k in 1..=budget as i32 {
        let hi = upper(k);
        if !hi.is_finite() {
            break;
        }
        let f_hi = eval(&mut f, hi)?;
        if f_hi == 0.0 || f_hi.signum() != f_lo.signum() {
            return RootBracket::new(prev, hi);
        }
        prev = hi;
    }
    Err(NumericsError::BracketExpansionFailed { lo, last: prev })
}
