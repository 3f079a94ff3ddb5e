//! Closed-form densities, estimation error, interference and SINR.
//!
//! Every expectation here is a Campbell integral over a Poisson field that
//! starts at a hard minimum range:
//!
//! * co-pilot cellular interferers: density `λ_b`, range `>= 2R_c − R_e`;
//! * D2D interferers seen by the base station: density `λ_d`, range `>= R_e`;
//! * cellular interferers seen by a D2D receiver at distance `d`: density
//!   `λ_c`, range `>= d − R_e`;
//! * D2D interferers seen by a D2D receiver: density `λ_d`, range `>= r_0`.
//!
//! First moments use the path-loss exponent `α`, second moments `2α`.

use std::f64::consts::PI;

use crate::config::{ExclusionDesign, NetworkConfig, ReferenceGeometry};
use crate::error::{ensure, Error, Result};
use crate::geometry::campbell_moment;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DerivedDensities {
    /// All users, `λ`.
    pub lambda: f64,
    /// Users outside every exclusion disk (D2D mode), `λ_d`.
    pub lambda_d: f64,
    /// Users inside some exclusion disk (cellular mode), `λ_c`.
    pub lambda_c: f64,
}

pub fn derived_densities(cfg: &NetworkConfig, re: f64) -> Result<DerivedDensities> {
    cfg.validate()?;
    ensure(
        (0.0..=cfg.cell_radius).contains(&re),
        "re",
        re,
        "exclusion radius must lie in [0, R_c]",
    )?;
    let lambda = cfg.lambda();
    let x = -PI * cfg.lambda_b * re * re;
    Ok(DerivedDensities {
        lambda,
        lambda_d: lambda * x.exp(),
        lambda_c: -lambda * x.exp_m1(),
    })
}

/// Nearest co-pilot range assumed by the pilot-contamination model.
pub fn copilot_floor(cfg: &NetworkConfig, re: f64) -> f64 {
    2.0 * cfg.cell_radius - re
}

fn checked(cfg: &NetworkConfig, x: &ExclusionDesign) -> Result<DerivedDensities> {
    cfg.validate()?;
    x.validate(cfg)?;
    if cfg.training_mode.d2d_active() && x.re <= 0.0 {
        return Err(Error::Divergent(
            "active D2D training with no exclusion zone puts interferers at zero range",
        ));
    }
    derived_densities(cfg, x.re)
}

/// Per-antenna channel-estimation MSE split by source.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MseTerms {
    pub noise: f64,
    pub copilot: f64,
    pub d2d: f64,
}

impl MseTerms {
    pub fn total(&self) -> f64 {
        self.noise + self.copilot + self.d2d
    }
}

/// `σ²/P_c + 2πλ_b(2R_c−R_e)^(2−α)/(α−2) [+ P_d·2πλ_d·R_e^(2−α)/((α−2)P_c)]`,
/// the last term only with active D2D training.
pub fn mse_terms(cfg: &NetworkConfig, x: &ExclusionDesign) -> Result<MseTerms> {
    let dens = checked(cfg, x)?;
    let p_c = x.p_c(cfg);
    let copilot = campbell_moment(cfg.lambda_b, copilot_floor(cfg, x.re), cfg.alpha)?;
    let d2d = if cfg.training_mode.d2d_active() {
        cfg.p_d / p_c * campbell_moment(dens.lambda_d, x.re, cfg.alpha)?
    } else {
        0.0
    };
    Ok(MseTerms {
        noise: cfg.sigma2_bs / p_c,
        copilot,
        d2d,
    })
}

/// Channel-estimation MSE normalized by the antenna count.
pub fn mse_per_antenna(cfg: &NetworkConfig, x: &ExclusionDesign) -> Result<f64> {
    mse_terms(cfg, x).map(|t| t.total())
}

/// Channel-estimation MSE summed over all `M` antennas.
pub fn mse_total(cfg: &NetworkConfig, x: &ExclusionDesign) -> Result<f64> {
    Ok(cfg.antennas as f64 * mse_per_antenna(cfg, x)?)
}

/// Mean interference power at the reference base station after MRC, in the
/// large-array limit.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BsInterference {
    /// `P_c²·2πλ_b(2R_c−R_e)^(2−2α)/(2α−2)`.
    pub copilot: f64,
    /// `P_d²·2πλ_d·R_e^(2−2α)/(2α−2)`; zero with muted training.
    pub d2d: f64,
}

impl BsInterference {
    pub fn total(&self) -> f64 {
        self.copilot + self.d2d
    }
}

pub fn bs_interference_terms(cfg: &NetworkConfig, x: &ExclusionDesign) -> Result<BsInterference> {
    let dens = checked(cfg, x)?;
    let p_c = x.p_c(cfg);
    let second = 2.0 * cfg.alpha;
    let copilot = p_c * p_c * campbell_moment(cfg.lambda_b, copilot_floor(cfg, x.re), second)?;
    let d2d = if cfg.training_mode.d2d_active() {
        cfg.p_d * cfg.p_d * campbell_moment(dens.lambda_d, x.re, second)?
    } else {
        0.0
    };
    Ok(BsInterference { copilot, d2d })
}

/// The SINR denominator.
pub fn avg_bs_interference(cfg: &NetworkConfig, x: &ExclusionDesign) -> Result<f64> {
    bs_interference_terms(cfg, x).map(|t| t.total())
}

/// Mean uplink SINR of a cellular user at `r_ref` from its base station.
pub fn avg_cell_sinr(cfg: &NetworkConfig, x: &ExclusionDesign, r_ref: f64) -> Result<f64> {
    ensure(r_ref > 0.0, "r_ref", r_ref, "must be positive")?;
    if r_ref >= x.re {
        return Err(Error::ReferenceNotCellular { r_ref, re: x.re });
    }
    let p_c = x.p_c(cfg);
    let denom = avg_bs_interference(cfg, x)?;
    if !(denom > 0.0) {
        return Err(Error::DegenerateSinr(denom));
    }
    Ok(p_c * p_c * r_ref.powf(-2.0 * cfg.alpha) / denom)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct D2dInterference {
    /// `P_c·2πλ_c(d−R_e)^(2−α)/(α−2)`.
    pub cellular: f64,
    /// `P_d·2πλ_d·r_0^(2−α)/(α−2)`.
    pub d2d: f64,
}

impl D2dInterference {
    pub fn total(&self) -> f64 {
        self.cellular + self.d2d
    }
}

pub fn d2d_interference_terms(
    cfg: &NetworkConfig,
    x: &ExclusionDesign,
    d: f64,
    r0: f64,
) -> Result<D2dInterference> {
    cfg.validate()?;
    x.validate(cfg)?;
    if d <= x.re {
        return Err(Error::ReceiverInsideExclusion { d, re: x.re });
    }
    ensure(r0 > 0.0, "r0", r0, "must be positive")?;
    let dens = derived_densities(cfg, x.re)?;
    Ok(D2dInterference {
        cellular: x.p_c(cfg) * campbell_moment(dens.lambda_c, d - x.re, cfg.alpha)?,
        d2d: cfg.p_d * campbell_moment(dens.lambda_d, r0, cfg.alpha)?,
    })
}

/// Mean interference at a D2D receiver `d` km from the reference base station.
pub fn d2d_interference(cfg: &NetworkConfig, x: &ExclusionDesign, d: f64, r0: f64) -> Result<f64> {
    d2d_interference_terms(cfg, x, d, r0).map(|t| t.total())
}

/// Mean SINR of a D2D link of length `link_dist` whose receiver sits `d` km
/// from the reference base station.
pub fn avg_d2d_sinr(
    cfg: &NetworkConfig,
    x: &ExclusionDesign,
    link_dist: f64,
    d: f64,
    r0: f64,
) -> Result<f64> {
    ensure(link_dist > 0.0, "link_dist", link_dist, "must be positive")?;
    let denom = cfg.sigma2_d2d + d2d_interference(cfg, x, d, r0)?;
    if !(denom > 0.0) {
        return Err(Error::DegenerateSinr(denom));
    }
    Ok(cfg.p_d * link_dist.powf(-cfg.alpha) / denom)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AnalyticReport {
    pub mse_per_antenna: f64,
    pub avg_bs_interference: f64,
    pub avg_cell_sinr: f64,
    pub d2d_interference: f64,
    pub avg_d2d_sinr: f64,
}

pub fn analytic_report(
    cfg: &NetworkConfig,
    x: &ExclusionDesign,
    geo: &ReferenceGeometry,
) -> Result<AnalyticReport> {
    Ok(AnalyticReport {
        mse_per_antenna: mse_per_antenna(cfg, x)?,
        avg_bs_interference: avg_bs_interference(cfg, x)?,
        avg_cell_sinr: avg_cell_sinr(cfg, x, geo.r_ref)?,
        d2d_interference: d2d_interference(cfg, x, geo.d, geo.r0)?,
        avg_d2d_sinr: avg_d2d_sinr(cfg, x, geo.link_dist, geo.d, geo.r0)?,
    })
}
