//! Test-only oracle: the local problem solved as a boundary value problem
//! by second-order finite differences and Newton's method, refined by one
//! Richardson step. Shares no code with the library solvers.

#![allow(dead_code)]

#[derive(Debug, Clone, Copy)]
pub struct FdSolution {
    pub rho: f64,
    pub xi: f64,
    pub norm_p1: f64,
    pub grad_sq: f64,
}

/// Tridiagonal solve with constant off-diagonal `off`.
fn thomas(diag: &[f64], off: f64, rhs: &mut [f64]) {
    let n = diag.len();
    let mut c = vec![0.0; n];
    let mut b = diag[0];
    c[0] = off / b;
    rhs[0] /= b;
    for i in 1..n {
        b = diag[i] - off * c[i - 1];
        c[i] = off / b;
        rhs[i] = (rhs[i] - off * rhs[i - 1]) / b;
    }
    for i in (0..n - 1).rev() {
        rhs[i] -= c[i] * rhs[i + 1];
    }
}

fn solve_grid(p: f64, gamma: f64, n: usize) -> FdSolution {
    assert!(n % 2 == 0);
    let h = 1.0 / n as f64;
    let plateau = gamma.powf(1.0 / (p - 1.0));
    let mut w: Vec<f64> = (1..n).map(|i| 0.9 * plateau * (std::f64::consts::PI * i as f64 * h).sin()).collect();
    let m = w.len();
    let inv_h2 = 1.0 / (h * h);
    for _ in 0..100 {
        let at = |w: &[f64], i: isize| if i < 0 || i as usize >= m { 0.0 } else { w[i as usize] };
        let mut res: Vec<f64> = (0..m)
            .map(|i| {
                let i = i as isize;
                -(at(&w, i - 1) - 2.0 * at(&w, i) + at(&w, i + 1)) * inv_h2 + at(&w, i).powf(p) - gamma * at(&w, i)
            })
            .collect();
        let diag: Vec<f64> = w.iter().map(|&v| 2.0 * inv_h2 + p * v.powf(p - 1.0) - gamma).collect();
        let norm = res.iter().fold(0.0f64, |a, r| a.max(r.abs()));
        thomas(&diag, -inv_h2, &mut res);
        for (v, d) in w.iter_mut().zip(&res) {
            *v -= d;
        }
        if norm < 1e-11 * gamma * plateau {
            break;
        }
    }
    assert!(w.iter().all(|&v| v > 0.0), "finite-difference Newton left the positive branch");
    let mut full = vec![0.0];
    full.extend_from_slice(&w);
    full.push(0.0);
    let xi2: f64 = full.iter().map(|v| v * v).sum::<f64>() * h;
    let np1: f64 = full.iter().map(|v| v.powf(p + 1.0)).sum::<f64>() * h;
    let g: f64 = full.windows(2).map(|s| ((s[1] - s[0]) / h).powi(2)).sum::<f64>() * h;
    FdSolution { rho: full[n / 2], xi: xi2.sqrt(), norm_p1: np1, grad_sq: g }
}

/// Richardson-extrapolated finite-difference solution on `n` and `2n`
/// intervals.
pub fn fd_solution(p: f64, gamma: f64, n: usize) -> FdSolution {
    let c = solve_grid(p, gamma, n);
    let f = solve_grid(p, gamma, 2 * n);
    let r = |a: f64, b: f64| (4.0 * b - a) / 3.0;
    FdSolution {
        rho: r(c.rho, f.rho),
        xi: r(c.xi * c.xi, f.xi * f.xi).sqrt(),
        norm_p1: r(c.norm_p1, f.norm_p1),
        grad_sq: r(c.grad_sq, f.grad_sq),
    }
}

pub fn rel(a: f64, b: f64) -> f64 {
    ((a - b) / b).abs()
}
