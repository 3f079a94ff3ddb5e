//! Joint choice of exclusion radius and power ratio:
//! maximize `f(X)` subject to `g(X) <= I_D2D` over `X = (R_e, C)` in a box.
//!
//! `f` increases in `C` and `g` is affine and increasing in `C`, so the
//! optimum lies on the frontier `C_f(R_e) = min(C_max, largest feasible C)`.
//! [`solve`] scans that one-dimensional frontier, refines the best bracket by
//! golden-section search and then certifies the point with KKT residuals.

pub mod kkt;
pub mod objective;
pub mod oracle;
pub mod quasiconcavity;

use crate::config::{ExclusionDesign, NetworkConfig, ReferenceGeometry};
use crate::error::{ensure, Error, Result};

pub use kkt::{kkt_at, KktResiduals};
pub use objective::{
    c_min, constraint_g, log_objective, objective_f, CMin, Constraint, LogObjective,
};
pub use oracle::{brute_force_oracle, OraclePoint};
pub use quasiconcavity::{verify_quasiconcavity, QuasiConcavityReport};

/// Relative distance to `I_D2D` within which the constraint counts as active.
pub const ACTIVE_TOLERANCE: f64 = 1e-7;
/// Final bracket width of the golden-section search, in km.
pub const GOLDEN_TOLERANCE: f64 = 1e-10;
const COARSE_POINTS: usize = 401;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ObjectiveContext {
    pub cfg: NetworkConfig,
    pub r_ref: f64,
    /// Reference D2D receiver's distance to the reference base station.
    pub d: f64,
    pub r0: f64,
    /// Interference budget at the reference D2D receiver, W.
    pub i_d2d: f64,
    pub re_min: f64,
    pub re_max: f64,
    pub c_max: f64,
}

impl ObjectiveContext {
    /// Reference scenario with `R_e ∈ [0.4, 0.9]` km, `C_max = 10` and the
    /// default reference geometry.
    pub fn table_two(i_d2d: f64) -> Self {
        let geo = ReferenceGeometry::default();
        Self {
            cfg: NetworkConfig::table_one(),
            r_ref: geo.r_ref,
            d: geo.d,
            r0: geo.r0,
            i_d2d,
            re_min: 0.4,
            re_max: 0.9,
            c_max: 10.0,
        }
    }

    pub fn validate(&self) -> Result<()> {
        self.cfg.validate()?;
        ensure(
            self.re_min > 0.0 && self.re_min < self.re_max,
            "re_min",
            self.re_min,
            "need 0 < re_min < re_max",
        )?;
        ensure(
            self.re_max <= self.cfg.cell_radius,
            "re_max",
            self.re_max,
            "must not exceed R_c",
        )?;
        ensure(
            self.r_ref > 0.0 && self.r_ref < self.re_min,
            "r_ref",
            self.r_ref,
            "reference user must be cellular over the whole box",
        )?;
        ensure(
            self.d > self.re_max && self.d.is_finite(),
            "d",
            self.d,
            "D2D receiver must lie outside every exclusion radius",
        )?;
        ensure(self.r0 > 0.0, "r0", self.r0, "must be positive")?;
        ensure(self.i_d2d > 0.0, "i_d2d", self.i_d2d, "must be positive")?;
        ensure(
            self.c_max > 1.0 && self.c_max.is_finite(),
            "c_max",
            self.c_max,
            "must exceed 1",
        )?;
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Status {
    Interior,
    ConstraintActive,
    BoundActive,
}

impl Status {
    pub fn as_str(self) -> &'static str {
        match self {
            Status::Interior => "interior",
            Status::ConstraintActive => "constraint_active",
            Status::BoundActive => "bound_active",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct OptimizationResult {
    pub x_star: ExclusionDesign,
    pub f_value: f64,
    pub g_value: f64,
    /// Multiplier of `g` in the `Ψ = ln f` Lagrangian.
    pub multiplier_beta: f64,
    pub kkt_residuals: KktResiduals,
    pub status: Status,
    /// Golden-section iterations.
    pub iterations: usize,
    pub c_min: CMin,
    /// Names of the constraints active at the solution.
    pub active: Vec<&'static str>,
}

/// Largest feasible `C` at `re`, capped at `C_max`; `None` if even `C = 1`
/// violates the budget. Bisection keeps the feasible end.
pub fn frontier_c(ctx: &ObjectiveContext, re: f64) -> Result<Option<f64>> {
    let g = |c: f64| constraint_g(ctx, &ExclusionDesign::new(re, c)).map(|k| k.value);
    if g(1.0)? > ctx.i_d2d {
        return Ok(None);
    }
    if g(ctx.c_max)? <= ctx.i_d2d {
        return Ok(Some(ctx.c_max));
    }
    let (mut lo, mut hi) = (1.0, ctx.c_max);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if g(mid)? <= ctx.i_d2d {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(Some(lo))
}

fn frontier_value(ctx: &ObjectiveContext, re: f64) -> Result<Option<(f64, f64)>> {
    Ok(match frontier_c(ctx, re)? {
        Some(c) => Some((log_objective(ctx, &ExclusionDesign::new(re, c))?.value, c)),
        None => None,
    })
}

fn grid(ctx: &ObjectiveContext) -> Vec<f64> {
    let n = COARSE_POINTS;
    (0..n)
        .map(|i| {
            if i == n - 1 {
                ctx.re_max
            } else {
                ctx.re_min + (ctx.re_max - ctx.re_min) * i as f64 / (n - 1) as f64
            }
        })
        .collect()
}

/// Maximizes `f` on the feasible part of the box.
pub fn solve(ctx: &ObjectiveContext) -> Result<OptimizationResult> {
    ctx.validate()?;
    let res = grid(ctx);
    let mut values = Vec::with_capacity(res.len());
    let mut min_g = f64::INFINITY;
    for &re in &res {
        min_g = min_g.min(constraint_g(ctx, &ExclusionDesign::new(re, 1.0))?.value);
        values.push(frontier_value(ctx, re)?);
    }
    let best = values
        .iter()
        .enumerate()
        .filter_map(|(i, v)| v.map(|(psi, _)| (i, psi)))
        .fold(None, |acc: Option<(usize, f64)>, (i, psi)| match acc {
            Some((_, b)) if b >= psi => acc,
            _ => Some((i, psi)),
        });
    let Some((k, _)) = best else {
        return Err(Error::Infeasible {
            min_interference: min_g,
            limit: ctx.i_d2d,
        });
    };

    // Golden-section refinement on the neighbouring grid cells.
    let phi = |re: f64| -> Result<f64> {
        Ok(frontier_value(ctx, re)?.map_or(f64::NEG_INFINITY, |(psi, _)| psi))
    };
    let (mut a, mut b) = (res[k.saturating_sub(1)], res[(k + 1).min(res.len() - 1)]);
    let inv_phi = (5f64.sqrt() - 1.0) / 2.0;
    let mut x1 = b - inv_phi * (b - a);
    let mut x2 = a + inv_phi * (b - a);
    let (mut f1, mut f2) = (phi(x1)?, phi(x2)?);
    let mut iterations = 0;
    while b - a > GOLDEN_TOLERANCE && iterations < 200 {
        iterations += 1;
        if f1 >= f2 {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - inv_phi * (b - a);
            f1 = phi(x1)?;
        } else {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + inv_phi * (b - a);
            f2 = phi(x2)?;
        }
    }
    let mut candidates = vec![res[k], a, b, 0.5 * (a + b)];
    candidates.retain(|r| (ctx.re_min..=ctx.re_max).contains(r));
    let mut star: Option<(f64, f64, f64)> = None;
    for re in candidates {
        if let Some((psi, c)) = frontier_value(ctx, re)? {
            if star.is_none_or(|(p, _, _)| psi > p) {
                star = Some((psi, re, c));
            }
        }
    }
    let (_, re, c) = star.expect("grid optimum is feasible");
    let x = ExclusionDesign::new(re, c);

    let g = constraint_g(ctx, &x)?;
    let active: Vec<&'static str> = kkt::active_set(ctx, &x, g.value, g.gradient)
        .iter()
        .map(|a| a.name)
        .collect();
    let (beta, residuals) = kkt_at(ctx, &x)?;
    let on_bound = active.iter().any(|n| *n != "g");
    let status = if on_bound {
        Status::BoundActive
    } else if active.contains(&"g") {
        Status::ConstraintActive
    } else {
        Status::Interior
    };
    Ok(OptimizationResult {
        x_star: x,
        f_value: objective_f(ctx, &x)?,
        g_value: g.value,
        multiplier_beta: beta,
        kkt_residuals: residuals,
        status,
        iterations,
        c_min: c_min(ctx, re)?,
        active,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn relaxed(i: f64) -> ObjectiveContext {
        ObjectiveContext {
            r0: 2.0,
            ..ObjectiveContext::table_two(i)
        }
    }

    #[test]
    fn unconstrained_optimum_sits_at_c_max() {
        let ctx = ObjectiveContext::table_two(f64::INFINITY);
        let r = solve(&ctx).unwrap();
        assert_eq!(r.x_star.c, ctx.c_max);
        assert_eq!(r.status, Status::BoundActive);
        assert_eq!(r.multiplier_beta, 0.0);
        // Re* maximizes Ψ(·, C_max) on a fine scan.
        let best = (0..=2000)
            .map(|i| 0.4 + 0.5 * i as f64 / 2000.0)
            .map(|re| log_objective(&ctx, &ExclusionDesign::new(re, ctx.c_max)).unwrap().value)
            .fold(f64::NEG_INFINITY, f64::max);
        let got = log_objective(&ctx, &r.x_star).unwrap().value;
        assert!(got >= best - 1e-12);
    }

    #[test]
    fn infeasible_budget_reported() {
        let ctx = ObjectiveContext::table_two(1e-3);
        assert!(matches!(solve(&ctx), Err(Error::Infeasible { .. })));
    }

    #[test]
    fn frontier_bisection_matches_affine_root() {
        let ctx = relaxed(12.0);
        for re in [0.4, 0.5, 0.6] {
            let Some(c) = frontier_c(&ctx, re).unwrap() else { continue };
            let g0 = constraint_g(&ctx, &ExclusionDesign::new(re, 0.0)).map(|g| g.value);
            // g is affine in C: g = g(0) + C·∂g/∂C.
            let slope = constraint_g(&ctx, &ExclusionDesign::new(re, 1.0)).unwrap().gradient[1];
            let g_at_zero = constraint_g(&ctx, &ExclusionDesign::new(re, 1.0)).unwrap().value - slope;
            assert!(g0.is_err());
            let root = ((ctx.i_d2d - g_at_zero) / slope).min(ctx.c_max);
            assert!((c - root).abs() <= 1e-12 * root, "{c} vs {root}");
        }
    }

    #[test]
    fn solution_is_feasible_and_stationary() {
        for i in [6.0, 9.0, 12.0, 15.0] {
            let ctx = relaxed(i);
            let Ok(r) = solve(&ctx) else { continue };
            assert!(r.g_value <= ctx.i_d2d + 1e-9);
            assert!(r.multiplier_beta >= 0.0);
            assert!(r.kkt_residuals.complementary_slackness <= 1e-6);
            if r.status != Status::BoundActive {
                assert!(r.kkt_residuals.stationarity <= 1e-4, "{:?}", r);
            }
        }
    }

    #[test]
    fn frontier_invariant_under_joint_power_scaling() {
        let a = relaxed(12.0);
        let mut b = a;
        b.cfg.p_d *= 2.5;
        b.i_d2d *= 2.5;
        for re in [0.4, 0.55, 0.7] {
            let ca = frontier_c(&a, re).unwrap();
            let cb = frontier_c(&b, re).unwrap();
            match (ca, cb) {
                (Some(x), Some(y)) => assert!((x - y).abs() < 1e-9 * x),
                (None, None) => {}
                other => panic!("{other:?}"),
            }
        }
    }

    #[test]
    fn bad_context_rejected() {
        let mut ctx = ObjectiveContext::table_two(10.0);
        ctx.d = 0.85;
        assert!(solve(&ctx).is_err());
        let mut ctx = ObjectiveContext::table_two(10.0);
        ctx.r_ref = 0.5;
        assert!(solve(&ctx).is_err());
        let mut ctx = ObjectiveContext::table_two(10.0);
        ctx.c_max = 1.0;
        assert!(solve(&ctx).is_err());
    }
}
