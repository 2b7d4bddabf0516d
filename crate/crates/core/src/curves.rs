//! Parallel sweeps producing [`CurveTable`]s.

use rayon::prelude::*;

use crate::asymptotics::AsymptoticModel;
use crate::error::{Error, Result};
use crate::local::LocalProblem;
use crate::nonlocal::NonlocalProblem;
use crate::table::{CurveKind, CurveTable, Row, TableMeta};

/// `n` log-spaced points from `min` to `max` inclusive.
pub fn geometric_grid(min: f64, max: f64, n: usize) -> Result<Vec<f64>> {
    if !(min > 0.0 && min < max && max.is_finite()) {
        return Err(Error::InvalidParams(format!("grid needs 0 < min < max, got [{min}, {max}]")));
    }
    if n < 2 {
        return Err(Error::InvalidParams(format!("grid needs n ≥ 2, got {n}")));
    }
    let ratio = (max / min).ln() / (n - 1) as f64;
    let mut grid: Vec<f64> = (0..n).map(|i| min * (ratio * i as f64).exp()).collect();
    grid[n - 1] = max;
    Ok(grid)
}

/// Rows of `xi, gamma, gamma_asym, residual`.
pub fn local_curve(problem: &LocalProblem, c1: f64, grid: &[f64]) -> Result<CurveTable> {
    let p = problem.p();
    let width = CurveKind::LocalGammaVsXi.columns().len();
    let rows = grid
        .par_iter()
        .map(|&xi| match problem.solve_gamma_for_xi(xi) {
            Ok(sol) => {
                let pred = crate::asymptotics::gamma_asym(xi, p, c1).total();
                Row::ok(vec![xi, sol.gamma, pred, sol.gamma - pred])
            }
            Err(e) => Row::failed(xi, width, e),
        })
        .collect();
    let meta = TableMeta::new(CurveKind::LocalGammaVsXi, p, None, *problem.tolerances());
    CurveTable::new(meta, rows)
}

/// Rows of `alpha, xi, h, lambda, lambda_asym, residual`. Refuses grids
/// reaching down to `α₀`.
pub fn nonlocal_curve(problem: &NonlocalProblem, model: &AsymptoticModel, grid: &[f64]) -> Result<CurveTable> {
    let t = problem.xi_threshold()?;
    if let Some(&a) = grid.iter().find(|&&a| !(a > t.alpha0)) {
        return Err(Error::BelowThreshold { what: "alpha", value: a, threshold: t.alpha0 });
    }
    let width = CurveKind::NonlocalLambdaVsAlpha.columns().len();
    let rows = grid
        .par_iter()
        .map(|&alpha| match problem.point_from_alpha(alpha) {
            Ok(pt) => {
                let pred = model.lambda_asym(alpha).total();
                Row::ok(vec![alpha, pt.xi(), pt.h, pt.lambda, pred, pt.lambda - pred])
            }
            Err(e) => Row::failed(alpha, width, e),
        })
        .collect();
    let params = problem.params();
    let meta = TableMeta::new(
        CurveKind::NonlocalLambdaVsAlpha,
        params.p(),
        Some(params.q()),
        *problem.local().tolerances(),
    );
    CurveTable::new(meta, rows)
}

/// Rows of `xi, h, h_asym, residual`.
pub fn h_curve(problem: &NonlocalProblem, model: &AsymptoticModel, grid: &[f64]) -> Result<CurveTable> {
    let width = CurveKind::HVsXi.columns().len();
    let rows = grid
        .par_iter()
        .map(|&xi| match problem.solve_h(xi) {
            Ok(h) => {
                let pred = model.h_asym(xi).total();
                Row::ok(vec![xi, h, pred, h - pred])
            }
            Err(e) => Row::failed(xi, width, e),
        })
        .collect();
    let params = problem.params();
    let meta = TableMeta::new(CurveKind::HVsXi, params.p(), Some(params.q()), *problem.local().tolerances());
    CurveTable::new(meta, rows)
}

/// `2n − 1` rows of `x, w` for the solution with eigenvalue `gamma`.
pub fn profile_table(problem: &LocalProblem, gamma: f64, n: usize) -> Result<CurveTable> {
    let sol = problem.solve_gamma(gamma)?;
    let rows = problem.profile(&sol, n)?.into_iter().map(|(x, w)| Row::ok(vec![x, w])).collect();
    let meta = TableMeta::new(CurveKind::Profile, problem.p(), None, *problem.tolerances());
    CurveTable::new(meta, rows)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::params::ProblemParams;

    #[test]
    fn grid_shape() {
        let g = geometric_grid(10.0, 1000.0, 3).unwrap();
        assert_eq!(g.len(), 3);
        assert_eq!(g[0], 10.0);
        assert!((g[1] - 100.0).abs() < 1e-12);
        assert_eq!(g[2], 1000.0);
        assert!(geometric_grid(0.0, 1.0, 3).is_err());
        assert!(geometric_grid(2.0, 1.0, 3).is_err());
        assert!(geometric_grid(1.0, 2.0, 1).is_err());
    }

    #[test]
    fn local_curve_rows() {
        let lp = LocalProblem::with_p(3.0).unwrap();
        let c1 = crate::asymptotics::compute_c1(3.0).unwrap();
        let t = local_curve(&lp, c1, &[10.0, 100.0]).unwrap();
        assert_eq!(t.rows.len(), 2);
        assert_eq!(t.failures(), 0);
        for r in &t.rows {
            assert_eq!(r.values[3], r.values[1] - r.values[2]);
        }
    }

    #[test]
    fn nonlocal_curve_threshold() {
        let np = NonlocalProblem::with_pq(3.0, 1.0 / 3.0).unwrap();
        let model = AsymptoticModel::new(ProblemParams::new(3.0, 1.0 / 3.0).unwrap()).unwrap();
        let a0 = np.xi_threshold().unwrap().alpha0;
        assert!(matches!(
            nonlocal_curve(&np, &model, &[a0 * 0.5, 100.0]),
            Err(Error::BelowThreshold { .. })
        ));
        let t = nonlocal_curve(&np, &model, &geometric_grid(10.0, 1e4, 4).unwrap()).unwrap();
        let lam = t.column("lambda").unwrap();
        assert!(lam.windows(2).all(|w| w[0] < w[1]));
    }

    #[test]
    fn profile_rows() {
        let lp = LocalProblem::with_p(3.0).unwrap();
        let t = profile_table(&lp, 20.0, 6).unwrap();
        assert_eq!(t.rows.len(), 11);
        assert!(profile_table(&lp, 9.0, 6).is_err());
    }
}
