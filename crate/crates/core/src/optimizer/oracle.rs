//! Exhaustive grid search over the design box.

use rayon::prelude::*;

use super::objective::{constraint_g, log_objective};
use super::ObjectiveContext;
use crate::config::ExclusionDesign;
use crate::error::{ensure, Result};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OraclePoint {
    pub x: ExclusionDesign,
    pub f_value: f64,
    pub g_value: f64,
    /// Grid spacing in `R_e` and `C`.
    pub cell: [f64; 2],
}

/// `R_e` spans the box inclusively in `n` points; `C` takes the `n` values
/// `1 + (j+1)(C_max−1)/n`, excluding 1 and including `C_max`. Ties go to the
/// lowest `R_e`, then the lowest `C`. `None` when no grid point is feasible.
pub fn brute_force_oracle(ctx: &ObjectiveContext, n: usize) -> Result<Option<OraclePoint>> {
    ctx.validate()?;
    ensure(n >= 50, "resolution", n as f64, "need at least 50 points per axis")?;
    let d_re = (ctx.re_max - ctx.re_min) / (n - 1) as f64;
    let d_c = (ctx.c_max - 1.0) / n as f64;
    let rows: Vec<Option<(f64, ExclusionDesign, f64)>> = (0..n)
        .into_par_iter()
        .map(|i| -> Result<Option<(f64, ExclusionDesign, f64)>> {
            let re = if i == n - 1 { ctx.re_max } else { ctx.re_min + d_re * i as f64 };
            let mut best: Option<(f64, ExclusionDesign, f64)> = None;
            for j in 0..n {
                let c = if j == n - 1 { ctx.c_max } else { 1.0 + (j + 1) as f64 * d_c };
                let x = ExclusionDesign::new(re, c);
                let g = constraint_g(ctx, &x)?.value;
                if g > ctx.i_d2d {
                    continue;
                }
                let psi = log_objective(ctx, &x)?.value;
                if best.is_none_or(|(b, _, _)| psi > b) {
                    best = Some((psi, x, g));
                }
            }
            Ok(best)
        })
        .collect::<Result<_>>()?;
    let mut best: Option<(f64, ExclusionDesign, f64)> = None;
    for (psi, x, g) in rows.into_iter().flatten() {
        if best.is_none_or(|(b, _, _)| psi > b) {
            best = Some((psi, x, g));
        }
    }
    Ok(best.map(|(psi, x, g)| OraclePoint {
        x,
        f_value: psi.exp(),
        g_value: g,
        cell: [d_re, d_c],
    }))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn empty_feasible_set() {
        let ctx = ObjectiveContext::table_two(1e-6);
        assert_eq!(brute_force_oracle(&ctx, 50).unwrap(), None);
    }

    #[test]
    fn unconstrained_picks_c_max() {
        let ctx = ObjectiveContext::table_two(f64::INFINITY);
        let p = brute_force_oracle(&ctx, 60).unwrap().unwrap();
        assert_eq!(p.x.c, ctx.c_max);
    }

    #[test]
    fn refinement_moves_less_than_a_coarse_cell() {
        let ctx = ObjectiveContext::table_two(f64::INFINITY);
        let a = brute_force_oracle(&ctx, 50).unwrap().unwrap();
        let b = brute_force_oracle(&ctx, 400).unwrap().unwrap();
        assert!((a.x.re - b.x.re).abs() <= a.cell[0]);
        assert!((a.x.c - b.x.c).abs() <= a.cell[1]);
    }

    #[test]
    fn too_coarse_rejected() {
        let ctx = ObjectiveContext::table_two(10.0);
        assert!(brute_force_oracle(&ctx, 10).is_err());
    }
}
