use bifurq_core::numerics::{find_root, integrate, integrate_sqrt_singular, QuadratureSpec, RootBracket};
use proptest::prelude::*;

fn spec() -> QuadratureSpec {
    QuadratureSpec::default()
}

#[test]
fn spec_examples() {
    assert!((integrate(|s| s, 0.0, 1.0, &spec()).unwrap() - 0.5).abs() < 1e-14);
    let v = integrate(|s| (1.0 - s * s) / 2f64.sqrt(), 0.0, 1.0, &spec()).unwrap();
    assert!((v - 2f64.sqrt() / 3.0).abs() < 1e-14);
    assert_eq!(integrate(|_| 0.0, 0.0, 1.0, &spec()).unwrap(), 0.0);
    let v = integrate_sqrt_singular(|w| 1.0 / (1.0 - w).sqrt(), 0.0, 1.0, &spec()).unwrap();
    assert!((v - 2.0).abs() < 1e-12);
    let v = integrate_sqrt_singular(|w| w / (4.0 - w).sqrt(), 0.0, 4.0, &spec()).unwrap();
    assert!((v - 32.0 / 3.0).abs() < 1e-10);
}

proptest! {
    #[test]
    fn linearity(a in -5.0f64..5.0, b in -5.0f64..5.0, k in 0.5f64..6.0) {
        let f = |s: f64| (k * s).sin();
        let g = |s: f64| (s * k).exp() / (1.0 + s);
        let sp = spec();
        let lhs = integrate(|s| a * f(s) + b * g(s), 0.0, 1.5, &sp).unwrap();
        let rhs = a * integrate(f, 0.0, 1.5, &sp).unwrap() + b * integrate(g, 0.0, 1.5, &sp).unwrap();
        let tol = 2.0 * (sp.abs_tol + sp.rel_tol * (lhs.abs() + rhs.abs()));
        prop_assert!((lhs - rhs).abs() <= tol);
    }

    #[test]
    fn singular_rule_agrees_on_smooth_integrands(c in 0.1f64..3.0, b in 0.5f64..4.0) {
        let sp = spec();
        // φ(w) = (b − w)·c·w vanishes at b, so g is smooth
        let g = |w: f64| c * w * (b - w).sqrt();
        let plain = integrate(g, 0.0, b, &sp).unwrap();
        let subst = integrate_sqrt_singular(g, 0.0, b, &sp).unwrap();
        prop_assert!((plain - subst).abs() <= 2.0 * (sp.abs_tol + sp.rel_tol * plain.abs()) + 1e-9 * plain.abs());
    }

    #[test]
    fn root_stays_in_bracket(r in -10.0f64..10.0, lo_off in 0.01f64..5.0, hi_off in 0.01f64..5.0) {
        let b = RootBracket::new(r - lo_off, r + hi_off).unwrap();
        let x = find_root(|x| (x - r).powi(3) + (x - r), b, 1e-12, 0.0).unwrap();
        prop_assert!(b.contains(x));
        prop_assert!((x - r).abs() < 1e-10);
    }
}
