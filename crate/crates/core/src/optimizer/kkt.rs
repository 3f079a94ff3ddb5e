//! Multiplier recovery and first-order optimality residuals.

use super::objective::{constraint_g, log_objective, objective_f, printed, C, RE};
use super::ObjectiveContext;
use crate::config::ExclusionDesign;
use crate::error::Result;

/// An inequality `h(X) <= 0` that is active at the candidate point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub(crate) struct Active {
    pub name: &'static str,
    pub gradient: [f64; 2],
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KktResiduals {
    /// `‖∇Ψ − β∇g − Σμ∇h‖ / ‖∇Ψ‖`.
    pub stationarity: f64,
    /// Same for `f` with multiplier `f·β`.
    pub stationarity_f: f64,
    /// `max(0, g − I_D2D)` in watts.
    pub primal_violation: f64,
    /// `|β·(g − I_D2D)|`.
    pub complementary_slackness: f64,
    /// Printed stationarity equations evaluated with the recovered multiplier.
    pub printed_lemma: [f64; 2],
}

fn norm(v: [f64; 2]) -> f64 {
    v[0].hypot(v[1])
}

/// Least squares for `grad ≈ Σ μ_i a_i` with `μ >= 0`, by enumerating
/// subsets of at most two active gradients.
pub(crate) fn nonnegative_fit(grad: [f64; 2], active: &[Active]) -> (Vec<f64>, [f64; 2]) {
    let n = active.len();
    let residual = |mu: &[f64]| {
        let mut r = grad;
        for (m, a) in mu.iter().zip(active) {
            r[0] -= m * a.gradient[0];
            r[1] -= m * a.gradient[1];
        }
        r
    };
    let mut best = (vec![0.0; n], grad);
    let mut best_norm = norm(grad);
    let mut consider = |mu: Vec<f64>| {
        if mu.iter().all(|&m| m >= 0.0 && m.is_finite()) {
            let r = residual(&mu);
            if norm(r) < best_norm {
                best_norm = norm(r);
                best = (mu, r);
            }
        }
    };
    for i in 0..n {
        let a = active[i].gradient;
        let aa = a[0] * a[0] + a[1] * a[1];
        if aa > 0.0 {
            let mut mu = vec![0.0; n];
            mu[i] = (grad[0] * a[0] + grad[1] * a[1]) / aa;
            consider(mu);
        }
        for j in i + 1..n {
            let b = active[j].gradient;
            let det = a[0] * b[1] - a[1] * b[0];
            if det.abs() > 1e-300 {
                let mut mu = vec![0.0; n];
                mu[i] = (grad[0] * b[1] - grad[1] * b[0]) / det;
                mu[j] = (a[0] * grad[1] - a[1] * grad[0]) / det;
                consider(mu);
            }
        }
    }
    best
}

/// Constraints active at `x` within the given tolerances.
pub(crate) fn active_set(
    ctx: &ObjectiveContext,
    x: &ExclusionDesign,
    g_value: f64,
    g_gradient: [f64; 2],
) -> Vec<Active> {
    let mut out = Vec::new();
    if ctx.i_d2d.is_finite() && (g_value - ctx.i_d2d).abs() <= super::ACTIVE_TOLERANCE * ctx.i_d2d {
        out.push(Active {
            name: "g",
            gradient: g_gradient,
        });
    }
    let span_re = ctx.re_max - ctx.re_min;
    if (x.re - ctx.re_max).abs() <= 1e-9 * span_re {
        out.push(Active {
            name: "re_max",
            gradient: [1.0, 0.0],
        });
    }
    if (x.re - ctx.re_min).abs() <= 1e-9 * span_re {
        out.push(Active {
            name: "re_min",
            gradient: [-1.0, 0.0],
        });
    }
    if (x.c - ctx.c_max).abs() <= 1e-12 * ctx.c_max {
        out.push(Active {
            name: "c_max",
            gradient: [0.0, 1.0],
        });
    }
    if (x.c - 1.0).abs() <= 1e-12 {
        out.push(Active {
            name: "c_min",
            gradient: [0.0, -1.0],
        });
    }
    out
}

/// Recovers `β` for `g` and reports the residuals at `x`.
pub fn kkt_at(ctx: &ObjectiveContext, x: &ExclusionDesign) -> Result<(f64, KktResiduals)> {
    let lo = log_objective(ctx, x)?;
    let g = constraint_g(ctx, x)?;
    let f = objective_f(ctx, x)?;
    let active = active_set(ctx, x, g.value, g.gradient);
    let (mu, r) = nonnegative_fit(lo.gradient, &active);
    let beta = active
        .iter()
        .zip(&mu)
        .find(|(a, _)| a.name == "g")
        .map_or(0.0, |(_, &m)| m);

    let scale = norm(lo.gradient).max(f64::MIN_POSITIVE);
    let stationarity = norm(r) / scale;
    // ∇f = f·∇Ψ, so every multiplier scales by f.
    let rf = [f * r[RE], f * r[C]];
    let stationarity_f = norm(rf) / (f * scale);
    let slack = g.value - ctx.i_d2d;
    Ok((
        beta,
        KktResiduals {
            stationarity,
            stationarity_f,
            primal_violation: slack.max(0.0),
            complementary_slackness: if beta == 0.0 { 0.0 } else { (beta * slack).abs() },
            printed_lemma: printed::lemma_residuals(ctx, x, f * beta),
        },
    ))
}
