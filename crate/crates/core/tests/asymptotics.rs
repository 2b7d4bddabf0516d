use bifurq_core::asymptotics::{compute_c1, gamma_asym, norm_asym};
use bifurq_core::local::PlateauGap;
use bifurq_core::{AsymptoticModel, LocalProblem, ProblemParams};

/// `C₁` by the midpoint rule after `s = 1 − v²`, which is unrelated to the
/// library's adaptive rule.
fn c1_midpoint(p: f64, n: usize) -> f64 {
    let a = (p - 1.0) / (p + 1.0);
    let b = 2.0 / (p + 1.0);
    let h = 1.0 / n as f64;
    let sum: f64 = (0..n)
        .map(|i| {
            let v = (i as f64 + 0.5) * h;
            let s = 1.0 - v * v;
            2.0 * v * (a - s * s + b * s.powf(p + 1.0)).max(0.0).sqrt()
        })
        .sum();
    (p + 3.0) * sum * h
}

#[test]
fn c1_against_midpoint_rule() {
    for p in [1.5, 2.0, 3.0, 4.0, 6.0] {
        let c = compute_c1(p).unwrap();
        let coarse = c1_midpoint(p, 20_000);
        let fine = c1_midpoint(p, 40_000);
        let extrapolated = (4.0 * fine - coarse) / 3.0;
        assert!((c - extrapolated).abs() < 1e-9 * c, "p = {p}: {c} vs {extrapolated}");
    }
}

#[test]
fn c1_from_plateau_limit() {
    // far along the branch m2 ≈ 1 − √2·C1/((p−1)τ)
    for p in [2.0, 3.0, 5.0] {
        let lp = LocalProblem::with_p(p).unwrap();
        let sol = lp.solution_at_gap(PlateauGap::from_log(400.0)).unwrap();
        let w2 = sol.gamma.powf(2.0 / (p - 1.0));
        let tau = (sol.gamma / 2.0).sqrt();
        let c1 = (1.0 - sol.xi * sol.xi / w2) * (p - 1.0) * tau / 2f64.sqrt();
        let want = compute_c1(p).unwrap();
        assert!((c1 / want - 1.0).abs() < 1e-3, "p = {p}: {c1} vs {want}");
    }
}

#[test]
fn spec_values() {
    let m = AsymptoticModel::new(ProblemParams::new(3.0, 1.0 / 3.0).unwrap()).unwrap();
    let c1 = m.c1;
    assert!((gamma_asym(100.0, 3.0, c1).total() - 10286.842712474619).abs() < 1e-6);
    let (n, g) = norm_asym(100.0, 3.0, c1);
    assert!((n.total() - (1e8 + 2.0 / 3.0 * c1 * 1e6)).abs() < 1e-4);
    // C1²/(p−1) = 4 at p = 3, so the ξ² coefficient of the gradient is 4
    assert!((g.correction - 4e4).abs() < 1e-6);
    assert!((g.leading - c1 / 3.0 * 1e6).abs() < 1e-6);
    let l = m.lambda_asym(1000.0);
    assert!((l.total() - (1e6 + c1 * 1e5)).abs() < 1e-6);
}

#[test]
fn exponent_limits() {
    for p in [2.0, 3.0, 7.0] {
        let tiny = AsymptoticModel::new(ProblemParams::new(p, 1e-9).unwrap()).unwrap();
        assert!((tiny.lambda_exponent - (p - 1.0) / 2.0).abs() < 1e-8);
        assert!(tiny.k < 1e-8);
    }
}

#[test]
fn composed_coefficient_is_c1() {
    for (p, q) in [(3.0, 1.0 / 3.0), (2.0, 0.1), (5.0, 0.6), (1.5, 0.15)] {
        let m = AsymptoticModel::new(ProblemParams::new(p, q).unwrap()).unwrap();
        assert!((m.composed_lambda_coefficient() - m.c1).abs() <= 4.0 * f64::EPSILON * (m.c1 + (p - 1.0) * m.b));
    }
}
