mod common;

use bifurq_core::nonlocal::{solve_h_closed_from_norms, solve_h_from_norms};
use bifurq_core::shooting::{shoot, DEFAULT_STEPS};
use bifurq_core::{AsymptoticModel, Error, NonlocalProblem, ProblemParams};
use common::fd_solution;

fn example() -> NonlocalProblem {
    NonlocalProblem::with_pq(3.0, 1.0 / 3.0).unwrap()
}

/// `h` from norms by bisection on the original (untransformed) equation
/// `h^{(p−1−2q)/q} = G + h^{p−1}N`.
fn h_by_bisection(p: f64, q: f64, g: f64, n: f64) -> f64 {
    let e = (p - 1.0 - 2.0 * q) / q;
    let floor = (2.0 / (p + 1.0)).powf(1.0 / (p - 1.0));
    let f = |h: f64| e * h.ln() - (g + h.powf(p - 1.0) * n).ln();
    let (mut lo, mut hi) = (floor, floor * 2.0);
    while f(hi) < 0.0 {
        hi *= 2.0;
    }
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if f(mid) < 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

#[test]
fn h_against_bisection_for_general_q() {
    for (p, q) in [(3.0, 0.1), (3.0, 0.45), (2.0, 0.2), (5.0, 0.5)] {
        let pp = ProblemParams::new(p, q).unwrap();
        for (g, n) in [(10.0, 1.0), (1e3, 50.0), (1e6, 1e8)] {
            let h = solve_h_from_norms(&pp, g, n).unwrap();
            let want = h_by_bisection(p, q, g, n);
            assert!(((h - want) / want).abs() < 1e-12, "p={p} q={q} G={g} N={n}");
        }
    }
}

#[test]
fn closed_form_quadratic_case() {
    assert!((solve_h_closed_from_norms(3.0, 4.0, 3.0) - 2.0).abs() < 1e-15);
    for p in [2.0, 3.0, 5.0] {
        let np = NonlocalProblem::with_pq(p, (p - 1.0) / (2.0 * p)).unwrap();
        for xi in [10.0, 50.0] {
            let a = np.solve_h(xi).unwrap();
            let b = np.solve_h_closed(xi).unwrap();
            assert!(((a - b) / a).abs() <= 1e-10);
        }
    }
}

#[test]
fn threshold_pinned_by_finite_differences() {
    let np = example();
    let t = np.xi_threshold().unwrap();
    let sol = np.local().solve_gamma_for_xi(t.xi0).unwrap();
    let fd = fd_solution(3.0, sol.gamma, 4000);
    let d = fd.grad_sq + 0.5 * fd.norm_p1;
    assert!((d - 0.25).abs() < 1e-7, "D(xi0) = {d}");
}

#[test]
fn admissibility_of_produced_points() {
    let np = example();
    let floor = 0.5f64.sqrt();
    for xi in [1.0, 3.0, 30.0, 300.0] {
        let pt = np.point_from_xi(xi).unwrap();
        assert!(pt.h > floor);
        assert!(pt.beta_residual() <= 1e-8);
        assert_eq!(pt.alpha, pt.h * pt.xi());
        assert!((pt.xi() / xi - 1.0).abs() < 1e-10);
    }
}

#[test]
fn monotone_h_and_alpha() {
    let np = example();
    let pts: Vec<_> = [1.0, 2.0, 4.0, 8.0, 16.0, 64.0, 256.0].iter().map(|&x| np.point_from_xi(x).unwrap()).collect();
    for w in pts.windows(2) {
        assert!(w[0].h < w[1].h);
        assert!(w[0].alpha < w[1].alpha);
        assert!(w[0].lambda < w[1].lambda);
    }
}

#[test]
fn alpha_round_trips_and_uniqueness() {
    let np = example();
    for xi in [0.5, 20.0, 500.0] {
        let pt = np.point_from_xi(xi).unwrap();
        let back = np.point_from_alpha(pt.alpha).unwrap();
        assert!((back.xi() / xi - 1.0).abs() <= 1e-8, "xi = {xi}");
    }
    for a in [1e2, 1e3, 1e4] {
        assert_eq!(np.alpha_crossings(a, 64).unwrap(), 1);
    }
}

#[test]
fn below_threshold_errors() {
    let np = example();
    let t = np.xi_threshold().unwrap();
    let err = np.point_from_alpha(t.alpha0).unwrap_err();
    match err {
        Error::BelowThreshold { threshold, .. } => assert_eq!(threshold, t.alpha0),
        e => panic!("unexpected {e}"),
    }
    assert!(np.point_from_xi(t.xi0 * 0.9).is_err());
    assert!(np.point_from_alpha(t.alpha0 * 1.001).is_ok());
}

#[test]
fn strong_form_with_shooting_profile() {
    let np = example();
    for xi in [1.0, 4.0] {
        let pt = np.point_from_xi(xi).unwrap();
        let s = shoot(3.0, pt.local.gamma, DEFAULT_STEPS).unwrap();
        assert!(pt.strong_residual(&s.profile(129)) <= 1e-6);
    }
}

#[test]
fn leading_orders() {
    let np = example();
    let m = AsymptoticModel::new(np.params()).unwrap();
    let pt = np.point_from_alpha(1e6).unwrap();
    assert!((pt.xi() / 100.0 - 1.0).abs() <= 0.05);
    let refined = m.xi_of_alpha_asym(1e6).total();
    assert!((pt.xi() - refined).abs() < (pt.xi() - 100.0).abs());
    let pt = np.point_from_xi(1e4).unwrap();
    assert!((pt.lambda / (pt.alpha * pt.alpha) - 1.0).abs() <= 0.05);
}

#[test]
fn shared_across_threads() {
    use rayon::prelude::*;
    let np = example();
    let hs: Vec<f64> = (1..=16).collect::<Vec<_>>().par_iter().map(|&i| np.solve_h(i as f64).unwrap()).collect();
    assert!(hs.windows(2).all(|w| w[0] < w[1]));
    let again = np.solve_h(7.0).unwrap();
    assert_eq!(again, hs[6]);
}
