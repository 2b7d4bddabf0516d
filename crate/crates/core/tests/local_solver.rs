mod common;

use std::f64::consts::PI;

use bifurq_core::local::potential;
use bifurq_core::shooting::{shoot, DEFAULT_STEPS};
use bifurq_core::LocalProblem;
use common::{fd_solution, rel};

fn cubic() -> LocalProblem {
    LocalProblem::with_p(3.0).unwrap()
}

#[test]
fn rho_at_twenty_matches_finite_differences() {
    let lp = cubic();
    let rho = lp.solve_rho(20.0).unwrap();
    let fd = fd_solution(3.0, 20.0, 4000);
    assert!(rel(rho, fd.rho) < 1e-8, "{rho} vs {}", fd.rho);
    assert!((lp.time_map(rho, 20.0).unwrap() - 0.5).abs() < 1e-10);
}

#[test]
fn norms_at_twenty_match_finite_differences() {
    let lp = cubic();
    let rho = lp.solve_rho(20.0).unwrap();
    let sol = lp.compute_norms(rho, 20.0).unwrap();
    let fd = fd_solution(3.0, 20.0, 4000);
    assert!(rel(sol.xi, fd.xi) < 1e-6);
    assert!(rel(sol.norm_p1, fd.norm_p1) < 1e-6);
    assert!(rel(sol.grad_sq, fd.grad_sq) < 1e-6);
}

#[test]
fn finite_differences_other_exponents() {
    for (p, gamma) in [(2.0, 30.0), (5.0, 15.0)] {
        let sol = LocalProblem::with_p(p).unwrap().solve_gamma(gamma).unwrap();
        let fd = fd_solution(p, gamma, 4000);
        assert!(rel(sol.rho, fd.rho) < 1e-7, "p={p}");
        assert!(rel(sol.xi, fd.xi) < 1e-7, "p={p}");
        assert!(rel(sol.grad_sq, fd.grad_sq) < 1e-7, "p={p}");
    }
}

#[test]
fn shooting_energy_identity() {
    let s = shoot(3.0, 20.0, DEFAULT_STEPS).unwrap();
    let two_f = 2.0 * potential(s.rho, 20.0, 3.0);
    assert!(rel(s.slope * s.slope, two_f) < 1e-8);
    let fd = fd_solution(3.0, 20.0, 4000);
    assert!(rel(s.rho, fd.rho) < 1e-8);
}

#[test]
fn profile_against_shooting() {
    let lp = cubic();
    let sol = lp.solve_gamma(20.0).unwrap();
    let s = shoot(3.0, 20.0, DEFAULT_STEPS).unwrap();
    for (x, w) in lp.profile(&sol, 17).unwrap() {
        assert!((w - s.value_at(x)).abs() < 1e-8 * sol.rho, "x = {x}");
    }
}

#[test]
fn monotone_on_dyadic_grid() {
    let lp = cubic();
    let sols: Vec<_> = (0..9).map(|i| lp.solve_gamma_for_xi(2f64.powi(i)).unwrap()).collect();
    for w in sols.windows(2) {
        assert!(w[0].gamma < w[1].gamma);
        assert!(w[0].rho < w[1].rho);
        assert!(w[0].d() < w[1].d());
        assert!(w[0].norm_p1 < w[1].norm_p1);
    }
}

#[test]
fn invariants_along_the_branch() {
    let lp = cubic();
    for xi in [1e-2, 0.5, 3.0, 30.0, 300.0, 3e3, 3e4] {
        let s = lp.solve_gamma_for_xi(xi).unwrap();
        assert!(s.gamma > PI * PI);
        assert!(s.time_map_residual() <= 1e-8);
        assert!(s.energy_identity_residual() <= 1e-8);
        assert!(s.rho <= lp.params().plateau(s.gamma));
        assert!(s.xi < s.rho);
        assert!(rel(s.xi, xi) < 1e-10);
    }
}

#[test]
fn sup_norm_defect_bounded() {
    let lp = cubic();
    let d2 = lp.solve_gamma(1e2).unwrap().sup_norm_defect();
    let d3 = lp.solve_gamma(1e3).unwrap().sup_norm_defect();
    let d4 = lp.solve_gamma(1e4).unwrap().sup_norm_defect();
    assert!(d4.abs() <= 2.0 * d2.abs());
    assert!(d3.abs() <= 2.0 * d2.abs());
}

#[test]
fn residual_trend_toward_constant() {
    let lp = cubic();
    let c1 = 2.0 * 2f64.sqrt();
    let r: Vec<f64> = [50.0, 100.0, 200.0, 400.0]
        .iter()
        .map(|&xi| (lp.solve_gamma_for_xi(xi).unwrap().gamma - xi * xi - c1 * xi - 4.0).abs())
        .collect();
    assert!(r.windows(2).all(|w| w[1] < w[0]));
}

#[test]
fn large_xi_guard_and_supported_range() {
    let lp = cubic();
    assert!(lp.solve_gamma_for_xi(1e5).is_ok());
    assert!(lp.solve_gamma_for_xi(1e9).is_err());
}

#[test]
fn tolerance_override_still_converges() {
    let tol = bifurq_core::Tolerances::with_rel_tol(1e-6).unwrap();
    let lp = LocalProblem::new(bifurq_core::LocalParams::new(3.0).unwrap(), tol);
    let coarse = lp.solve_gamma_for_xi(10.0).unwrap();
    let fine = cubic().solve_gamma_for_xi(10.0).unwrap();
    assert!(rel(coarse.gamma, fine.gamma) < 1e-5);
}
