//! Grid certificate that `Ψ = ln f` is concave on the design box.

use super::objective::{log_objective, C, RE};
use super::ObjectiveContext;
use crate::config::ExclusionDesign;
use crate::error::{ensure, Result};

/// Eigenvalue threshold above which a grid point counts as a violation.
pub const EIGEN_TOLERANCE: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq)]
pub struct QuasiConcavityReport {
    pub grid: Vec<ExclusionDesign>,
    /// Ascending eigenvalue pair of the Hessian of `Ψ` at each grid point.
    pub hessian_eigs: Vec<[f64; 2]>,
    pub violations: Vec<ExclusionDesign>,
    /// Points where one of the individual sign claims fails: `Ψ_CC < 0`,
    /// `Ψ_RR < 0`, `Ψ_CR < 0`, `Ψ_CR > Ψ_RR`, `Ψ_CR > Ψ_CC`.
    pub sign_disagreements: Vec<(ExclusionDesign, &'static str)>,
}

impl QuasiConcavityReport {
    pub fn certified(&self) -> bool {
        self.violations.is_empty()
    }

    pub fn max_eigenvalue(&self) -> f64 {
        self.hessian_eigs
            .iter()
            .map(|e| e[1])
            .fold(f64::NEG_INFINITY, f64::max)
    }
}

/// Eigenvalues of a symmetric 2×2 matrix, ascending.
pub fn symmetric_eigs(h: &[[f64; 2]; 2]) -> [f64; 2] {
    let mean = 0.5 * (h[0][0] + h[1][1]);
    let half = 0.5 * (h[0][0] - h[1][1]);
    let r = half.hypot(h[0][1]);
    [mean - r, mean + r]
}

fn linspace(lo: f64, hi: f64, n: usize) -> impl Iterator<Item = f64> {
    (0..n).map(move |i| lo + (hi - lo) * i as f64 / (n - 1) as f64)
}

/// Evaluates the Hessian of `Ψ` on an `n × n` grid spanning the box,
/// `C` from 1 to `C_max`.
pub fn verify_quasiconcavity(ctx: &ObjectiveContext, n: usize) -> Result<QuasiConcavityReport> {
    ctx.validate()?;
    ensure(n >= 8, "grid_resolution", n as f64, "need at least 8 points per axis")?;
    let mut report = QuasiConcavityReport {
        grid: Vec::with_capacity(n * n),
        hessian_eigs: Vec::with_capacity(n * n),
        violations: Vec::new(),
        sign_disagreements: Vec::new(),
    };
    for re in linspace(ctx.re_min, ctx.re_max, n) {
        for c in linspace(1.0, ctx.c_max, n) {
            let x = ExclusionDesign::new(re, c);
            let h = log_objective(ctx, &x)?.hessian;
            let eigs = symmetric_eigs(&h);
            if eigs[1] > EIGEN_TOLERANCE {
                report.violations.push(x);
            }
            let (rr, cc, cr) = (h[RE][RE], h[C][C], h[RE][C]);
            for (ok, claim) in [
                (cc < 0.0, "d2psi/dC2 < 0"),
                (rr < 0.0, "d2psi/dRe2 < 0"),
                (cr < 0.0, "d2psi/dCdRe < 0"),
                (cr > rr, "d2psi/dCdRe > d2psi/dRe2"),
                (cr > cc, "d2psi/dCdRe > d2psi/dC2"),
            ] {
                if !ok {
                    report.sign_disagreements.push((x, claim));
                }
            }
            report.grid.push(x);
            report.hessian_eigs.push(eigs);
        }
    }
    Ok(report)
}
