//! Log-objective, constraint and their derivatives.
//!
//! Coordinates are ordered `(R_e, C)` throughout. With `k = 2πλ_b`,
//! `e = exp(−πλ_b R_e²)`, `A = (2R_c − R_e)^(2−2α)` and `B = R_e^(2−2α)·e`, the
//! active-training mean SINR is
//! `f = C²·r^(−2α)·(2α−2)/(2π) / D` with `D = C²λ_b·A + λ·B`, so
//! `Ψ = ln f = ln(C²·r^(−2α)·(2α−2)/(2π)) − ln D`.

use std::f64::consts::PI;

use super::ObjectiveContext;
use crate::analytics::{self, derived_densities};
use crate::config::ExclusionDesign;
use crate::error::{Error, Result};

pub const RE: usize = 0;
pub const C: usize = 1;

/// `Ψ`, its gradient and Hessian at one point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LogObjective {
    pub value: f64,
    pub gradient: [f64; 2],
    pub hessian: [[f64; 2]; 2],
}

/// `D` with its partial derivatives.
#[derive(Debug, Clone, Copy, PartialEq)]
pub(crate) struct DTerms {
    pub d: f64,
    pub d_c: f64,
    pub d_r: f64,
    pub d_cc: f64,
    pub d_rr: f64,
    pub d_cr: f64,
}

pub(crate) fn d_terms(ctx: &ObjectiveContext, x: &ExclusionDesign) -> DTerms {
    let cfg = &ctx.cfg;
    let a = cfg.alpha;
    let lb = cfg.lambda_b;
    let lambda = cfg.lambda();
    let k = 2.0 * PI * lb;
    let (re, c) = (x.re, x.c);
    let far = 2.0 * cfg.cell_radius - re;
    let e = (-PI * lb * re * re).exp();

    let big_a = far.powf(2.0 - 2.0 * a);
    let big_a1 = (2.0 * a - 2.0) * far.powf(1.0 - 2.0 * a);
    let big_a2 = (2.0 * a - 2.0) * (2.0 * a - 1.0) * far.powf(-2.0 * a);

    let b = re.powf(2.0 - 2.0 * a) * e;
    let b1 = e * ((2.0 - 2.0 * a) * re.powf(1.0 - 2.0 * a) - k * re.powf(3.0 - 2.0 * a));
    let b2 = e
        * ((2.0 - 2.0 * a) * (1.0 - 2.0 * a) * re.powf(-2.0 * a)
            - k * (3.0 - 2.0 * a) * re.powf(2.0 - 2.0 * a)
            - k * (2.0 - 2.0 * a) * re.powf(2.0 - 2.0 * a)
            + k * k * re.powf(4.0 - 2.0 * a));

    DTerms {
        d: c * c * lb * big_a + lambda * b,
        d_c: 2.0 * c * lb * big_a,
        d_r: c * c * lb * big_a1 + lambda * b1,
        d_cc: 2.0 * lb * big_a,
        d_rr: c * c * lb * big_a2 + lambda * b2,
        d_cr: 2.0 * c * lb * big_a1,
    }
}

fn check_point(ctx: &ObjectiveContext, x: &ExclusionDesign) -> Result<()> {
    x.validate(&ctx.cfg)?;
    if x.re <= 0.0 {
        return Err(Error::Divergent("the D2D term of the objective is singular at R_e = 0"));
    }
    Ok(())
}

pub fn log_objective(ctx: &ObjectiveContext, x: &ExclusionDesign) -> Result<LogObjective> {
    check_point(ctx, x)?;
    let a = ctx.cfg.alpha;
    let c = x.c;
    let t = d_terms(ctx, x);
    let value = (c * c * ctx.r_ref.powf(-2.0 * a) * (2.0 * a - 2.0) / (2.0 * PI)).ln() - t.d.ln();
    let dd = t.d * t.d;
    let g_r = -t.d_r / t.d;
    let g_c = 2.0 / c - t.d_c / t.d;
    let h_rr = -t.d_rr / t.d + t.d_r * t.d_r / dd;
    let h_cc = -2.0 / (c * c) - t.d_cc / t.d + t.d_c * t.d_c / dd;
    let h_cr = -t.d_cr / t.d + t.d_c * t.d_r / dd;
    Ok(LogObjective {
        value,
        gradient: [g_r, g_c],
        hessian: [[h_rr, h_cr], [h_cr, h_cc]],
    })
}

/// `f(X)`: the active-training mean SINR of the reference cellular user.
pub fn objective_f(ctx: &ObjectiveContext, x: &ExclusionDesign) -> Result<f64> {
    check_point(ctx, x)?;
    analytics::avg_cell_sinr(&ctx.cfg.with_training(crate::TrainingMode::ActiveD2D), x, ctx.r_ref)
}

/// `g(X)` with its gradient.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Constraint {
    pub value: f64,
    pub gradient: [f64; 2],
}

/// Pieces of `∂g/∂R_e = K·P_d·(C·slope − offset)`, `K = 2π/(α−2)`.
struct ReSlope {
    slope: f64,
    offset: f64,
}

fn re_slope(ctx: &ObjectiveContext, re: f64) -> Result<ReSlope> {
    let cfg = &ctx.cfg;
    let a = cfg.alpha;
    let dens = derived_densities(cfg, re)?;
    let e = (-PI * cfg.lambda_b * re * re).exp();
    // dλ_c/dR_e = −dλ_d/dR_e.
    let dlc = 2.0 * PI * cfg.lambda_b * re * cfg.lambda() * e;
    let gap = ctx.d - re;
    Ok(ReSlope {
        slope: dlc * gap.powf(2.0 - a) + (a - 2.0) * dens.lambda_c * gap.powf(1.0 - a),
        offset: dlc * ctx.r0.powf(2.0 - a),
    })
}

pub fn constraint_g(ctx: &ObjectiveContext, x: &ExclusionDesign) -> Result<Constraint> {
    let cfg = &ctx.cfg;
    let value = analytics::d2d_interference(cfg, x, ctx.d, ctx.r0)?;
    let a = cfg.alpha;
    let k = 2.0 * PI / (a - 2.0);
    let dens = derived_densities(cfg, x.re)?;
    let s = re_slope(ctx, x.re)?;
    Ok(Constraint {
        value,
        gradient: [
            k * cfg.p_d * (x.c * s.slope - s.offset),
            k * cfg.p_d * dens.lambda_c * (ctx.d - x.re).powf(2.0 - a),
        ],
    })
}

/// Threshold on `C` above which `g` grows with `R_e`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum CMin {
    Finite(f64),
    /// The `C` coefficient of `∂g/∂R_e` vanishes.
    Unbounded,
}

/// Root of `∂g/∂R_e = 0` in `C`; the derivative is affine in `C`.
pub fn c_min(ctx: &ObjectiveContext, re: f64) -> Result<CMin> {
    if re >= ctx.d {
        return Err(Error::ReceiverInsideExclusion { d: ctx.d, re });
    }
    let s = re_slope(ctx, re)?;
    if !(s.slope > 0.0) || !s.slope.is_finite() {
        return Ok(CMin::Unbounded);
    }
    Ok(CMin::Finite(s.offset / s.slope))
}

/// Expressions exactly as printed for `λ_b = 1/(πR_c²)`, `λ = a·λ_b`, kept to
/// audit the independently derived ones.
pub mod printed {
    use super::*;

    struct Common {
        a: f64,
        rc: f64,
        users: f64,
        e: f64,
        far: f64,
    }

    fn common(ctx: &ObjectiveContext, x: &ExclusionDesign) -> Common {
        let rc = ctx.cfg.cell_radius;
        Common {
            a: ctx.cfg.alpha,
            rc,
            users: ctx.cfg.user_ratio,
            e: (-(x.re / rc).powi(2)).exp(),
            far: 2.0 * rc - x.re,
        }
    }

    /// `D = C²(2R_c−R_e)^(2−2α) + a·R_e^(2−2α)·e`.
    pub fn d_term(ctx: &ObjectiveContext, x: &ExclusionDesign) -> f64 {
        let k = common(ctx, x);
        let (re, c, a) = (x.re, x.c, k.a);
        c * c * k.far.powf(2.0 - 2.0 * a) + k.users * re.powf(2.0 - 2.0 * a) * k.e
    }

    /// `E`, the `R_e`-derivative of `D`.
    pub fn e_term(ctx: &ObjectiveContext, x: &ExclusionDesign) -> f64 {
        let k = common(ctx, x);
        let (re, c, a, rc) = (x.re, x.c, k.a, k.rc);
        (2.0 * a - 2.0) * c * c * k.far.powf(1.0 - 2.0 * a)
            + k.users
                * k.e
                * ((2.0 - 2.0 * a) * re.powf(1.0 - 2.0 * a) - 2.0 * re.powf(3.0 - 2.0 * a) / (rc * rc))
    }

    /// `A`, meant to be the second `R_e`-derivative of `D`. The printed last
    /// term carries a minus sign.
    pub fn a_term(ctx: &ObjectiveContext, x: &ExclusionDesign) -> f64 {
        let k = common(ctx, x);
        let (re, c, a, rc) = (x.re, x.c, k.a, k.rc);
        (2.0 * a - 2.0) * (2.0 * a - 1.0) * c * c * k.far.powf(-2.0 * a)
            + k.users
                * k.e
                * ((1.0 - 2.0 * a) * (2.0 - 2.0 * a) * re.powf(-2.0 * a)
                    - (2.0 - 2.0 * a) * 2.0 * re.powf(2.0 - 2.0 * a) / (rc * rc)
                    - (3.0 - 2.0 * a) * 2.0 * re.powf(2.0 - 2.0 * a) / (rc * rc)
                    - 4.0 * re.powf(4.0 - 2.0 * a) / rc.powi(4))
    }

    /// `∂²Ψ/∂C²` as printed.
    pub fn psi_cc(ctx: &ObjectiveContext, x: &ExclusionDesign) -> f64 {
        let k = common(ctx, x);
        let d = d_term(ctx, x);
        let c = x.c;
        let t = k.far.powf(2.0 - 2.0 * k.a);
        -2.0 / (c * c) - 2.0 * t / d + 4.0 * c * c * k.far.powf(4.0 - 4.0 * k.a) / (d * d)
    }

    /// `∂²Ψ/∂R_e² = (−A·D + E²)/D²` as printed.
    pub fn psi_rr(ctx: &ObjectiveContext, x: &ExclusionDesign) -> f64 {
        let d = d_term(ctx, x);
        let e = e_term(ctx, x);
        (-a_term(ctx, x) * d + e * e) / (d * d)
    }

    /// `∂²Ψ/∂C∂R_e` as printed.
    pub fn psi_cr(ctx: &ObjectiveContext, x: &ExclusionDesign) -> f64 {
        let k = common(ctx, x);
        let d = d_term(ctx, x);
        let e = e_term(ctx, x);
        let c = x.c;
        (-d * (2.0 * k.a - 2.0) * 2.0 * c * k.far.powf(1.0 - 2.0 * k.a)
            + e * 2.0 * c * k.far.powf(2.0 - 2.0 * k.a))
            / (d * d)
    }

    /// `∂g/∂R_e` as printed in the quasi-convexity argument. Its `r_0` term
    /// lacks the `exp(−(R_e/R_c)²)` factor carried by `λ_d`.
    pub fn dg_dre(ctx: &ObjectiveContext, x: &ExclusionDesign) -> f64 {
        let k = common(ctx, x);
        let (re, c, a, rc) = (x.re, x.c, k.a, k.rc);
        let lambda = ctx.cfg.lambda();
        let gap = ctx.d - re;
        ctx.cfg.p_d * 2.0 * PI * lambda / (a - 2.0)
            * (c * ((a - 2.0) * gap.powf(1.0 - a) * (1.0 - k.e)
                + 2.0 * re / (rc * rc) * gap.powf(2.0 - a) * k.e)
                - ctx.r0.powf(2.0 - a) * 2.0 * re / (rc * rc))
    }

    /// Left-hand sides of the two stationarity equations as printed, for
    /// multiplier `beta` on `g` in the `f`-form Lagrangian.
    pub fn lemma_residuals(ctx: &ObjectiveContext, x: &ExclusionDesign, beta: f64) -> [f64; 2] {
        let k = common(ctx, x);
        let cfg = &ctx.cfg;
        let (re, c, a, rc) = (x.re, x.c, k.a, k.rc);
        let lambda = cfg.lambda();
        let lambda_c = lambda * (1.0 - k.e);
        let lambda_d = lambda * k.e;
        let r = ctx.r_ref.powf(-2.0 * a);
        let gap = ctx.d - re;
        let tpi = 2.0 * PI;
        let d = c * c * tpi * cfg.lambda_b * k.far.powf(2.0 - 2.0 * a) / (2.0 * a - 2.0)
            + tpi * lambda_d * re.powf(2.0 - 2.0 * a) / (2.0 * a - 2.0);

        let eq1 = 4.0 * c * PI * lambda_d * r * re.powf(2.0 - 2.0 * a) / (d * d * (2.0 * a - 2.0))
            - beta * cfg.p_d * tpi * lambda_c * gap.powf(2.0 - a) / (a - 2.0);

        let bracket = (2.0 * a - 2.0) * cfg.lambda_b * c * c * k.far.powf(1.0 - 2.0 * a)
            + lambda
                * k.e
                * ((2.0 - 2.0 * a) * re.powf(1.0 - 2.0 * a) - 2.0 * re.powf(3.0 - 2.0 * a) / (rc * rc));
        let dg = cfg.p_d * tpi / (a - 2.0)
            * (c * ((a - 2.0) * gap.powf(1.0 - a) * lambda_c
                + 2.0 * re / (rc * rc) * gap.powf(2.0 - a) * lambda * k.e)
                - lambda_d * ctx.r0.powf(2.0 - a) * 2.0 * re / (rc * rc));
        let eq2 = -c * c * tpi / (2.0 * a - 2.0) * r * bracket - beta * d * d * dg;
        [eq1, eq2]
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::config::NetworkConfig;

    fn ctx() -> ObjectiveContext {
        ObjectiveContext::table_two(15.0)
    }

    fn rel(a: f64, b: f64) -> f64 {
        (a - b).abs() / b.abs().max(1e-300)
    }

    #[test]
    fn psi_is_log_of_analytic_sinr() {
        let c = ctx();
        for (re, cc) in [(0.4, 1.0), (0.6, 4.0), (0.9, 10.0)] {
            let x = ExclusionDesign::new(re, cc);
            let psi = log_objective(&c, &x).unwrap().value;
            assert!(rel(psi.exp(), objective_f(&c, &x).unwrap()) < 1e-12);
        }
    }

    #[test]
    fn psi_matches_printed_form_on_reference_density() {
        let c = ctx();
        let a = c.cfg.alpha;
        for (re, cc) in [(0.45, 2.0), (0.7, 7.5)] {
            let x = ExclusionDesign::new(re, cc);
            let printed = (cc * cc * (a - 1.0) * c.r_ref.powf(-2.0 * a)).ln()
                - printed::d_term(&c, &x).ln();
            assert!((printed - log_objective(&c, &x).unwrap().value).abs() < 1e-12);
        }
    }

    #[test]
    fn printed_terms_against_derived() {
        let c = ctx();
        let lb = c.cfg.lambda_b;
        let a = c.cfg.alpha;
        for (re, cc) in [(0.4, 1.5), (0.65, 5.0), (0.9, 9.0)] {
            let x = ExclusionDesign::new(re, cc);
            let t = d_terms(&c, &x);
            assert!(rel(printed::d_term(&c, &x), t.d / lb) < 1e-12);
            assert!(rel(printed::e_term(&c, &x), t.d_r / lb) < 1e-12);
            // The printed A differs by the sign of its last term.
            let fixed = printed::a_term(&c, &x)
                + 8.0 * c.cfg.user_ratio * (-(re * re)).exp() * re.powf(4.0 - 2.0 * a);
            assert!(rel(fixed, t.d_rr / lb) < 1e-12);
            assert!(rel(printed::a_term(&c, &x), t.d_rr / lb) > 1e-6);

            let h = log_objective(&c, &x).unwrap().hessian;
            assert!(rel(printed::psi_cc(&c, &x), h[C][C]) < 1e-12);
            assert!(rel(printed::psi_cr(&c, &x), h[RE][C]) < 1e-12);
        }
    }

    #[test]
    fn printed_dg_dre_drops_the_hole_factor() {
        let c = ctx();
        let x = ExclusionDesign::new(0.6, 3.0);
        let ours = constraint_g(&c, &x).unwrap().gradient[RE];
        let printed = printed::dg_dre(&c, &x);
        let e = (-(0.6f64 * 0.6)).exp();
        let k = c.cfg.p_d * 2.0 * PI * c.cfg.lambda() / (c.cfg.alpha - 2.0);
        let fix = k * c.r0.powf(2.0 - c.cfg.alpha) * 2.0 * 0.6 * (1.0 - e);
        assert!(rel(printed + fix, ours) < 1e-12);
    }

    #[test]
    fn lemma_first_equation_is_f_stationarity_in_c() {
        let c = ctx();
        let x = ExclusionDesign::new(0.6, 3.0);
        let f = objective_f(&c, &x).unwrap();
        let lo = log_objective(&c, &x).unwrap();
        let g = constraint_g(&c, &x).unwrap();
        let beta = 0.37;
        let [eq1, eq2] = printed::lemma_residuals(&c, &x, beta);
        let df_dc = f * lo.gradient[C];
        assert!(rel(eq1, df_dc - beta * g.gradient[C]) < 1e-10);
        // Second equation: D_L²·(∂f/∂R_e − β·∂g/∂R_e).
        let t = d_terms(&c, &x);
        let dl = t.d * 2.0 * PI / (2.0 * c.cfg.alpha - 2.0);
        let df_dr = f * lo.gradient[RE];
        assert!(rel(eq2, dl * dl * (df_dr - beta * g.gradient[RE])) < 1e-10);
    }

    #[test]
    fn psi_ignores_c_without_users() {
        let mut c = ctx();
        c.cfg = c.cfg.with_user_ratio(0.0);
        let a = log_objective(&c, &ExclusionDesign::new(0.6, 2.0)).unwrap();
        let b = log_objective(&c, &ExclusionDesign::new(0.6, 8.0)).unwrap();
        assert!((a.value - b.value).abs() < 1e-12);
        assert!(a.gradient[C].abs() < 1e-12);
    }

    #[test]
    fn psi_increases_in_c_with_users() {
        let c = ctx();
        for re in [0.4, 0.6, 0.9] {
            for cc in [1.0, 5.0, 10.0] {
                assert!(log_objective(&c, &ExclusionDesign::new(re, cc)).unwrap().gradient[C] > 0.0);
            }
        }
    }

    #[test]
    fn singular_and_inside_points_rejected() {
        let c = ctx();
        assert!(log_objective(&c, &ExclusionDesign::new(0.0, 2.0)).is_err());
        let mut near = ctx();
        near.d = 0.5;
        assert!(constraint_g(&near, &ExclusionDesign::new(0.6, 2.0)).is_err());
        assert!(c_min(&near, 0.6).is_err());
    }

    #[test]
    fn c_min_separates_signs_of_dg_dre() {
        let c = ctx();
        for re in [0.45, 0.6, 0.8] {
            let CMin::Finite(cm) = c_min(&c, re).unwrap() else {
                panic!("finite expected")
            };
            let below = ExclusionDesign::new(re, (cm * 0.9).max(1.0));
            let above = ExclusionDesign::new(re, cm * 1.1 + 1.0);
            if cm * 0.9 >= 1.0 {
                assert!(constraint_g(&c, &below).unwrap().gradient[RE] < 0.0);
            }
            assert!(constraint_g(&c, &above).unwrap().gradient[RE] > 0.0);
            let at = ExclusionDesign::new(re, cm.max(1.0));
            if cm >= 1.0 {
                assert!(constraint_g(&c, &at).unwrap().gradient[RE].abs() < 1e-9);
            }
        }
    }

    #[test]
    fn c_min_vanishes_for_distant_d2d() {
        let mut c = ctx();
        c.r0 = 1e9;
        let CMin::Finite(v) = c_min(&c, 0.6).unwrap() else { panic!() };
        assert!(v < 1e-8);
    }

    #[test]
    fn c_min_grows_with_receiver_distance() {
        let mut prev = 0.0;
        for d in [0.92, 1.0, 1.2, 1.5] {
            let mut c = ctx();
            c.d = d;
            let CMin::Finite(v) = c_min(&c, 0.6).unwrap() else { panic!() };
            assert!(v > prev);
            prev = v;
        }
    }

    #[test]
    fn c_min_unbounded_without_exclusion() {
        let mut c = ctx();
        c.cfg = NetworkConfig::table_one();
        assert_eq!(c_min(&c, 0.0).unwrap(), CMin::Unbounded);
    }

    #[test]
    fn g_scales_with_pd_at_fixed_c() {
        let c = ctx();
        let mut scaled = ctx();
        scaled.cfg.p_d *= 3.0;
        let x = ExclusionDesign::new(0.7, 4.0);
        let a = constraint_g(&c, &x).unwrap();
        let b = constraint_g(&scaled, &x).unwrap();
        assert!(rel(b.value, 3.0 * a.value) < 1e-12);
        assert!(rel(b.gradient[RE], 3.0 * a.gradient[RE]) < 1e-12);
    }
}
