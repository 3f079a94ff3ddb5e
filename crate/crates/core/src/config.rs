//! Scenario parameters shared by the analytic, simulation and optimization layers.

use std::f64::consts::PI;

use crate::error::{ensure, Result};

/// Whether D2D transmitters stay silent during uplink pilot training.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub enum TrainingMode {
    MutedD2D,
    #[default]
    ActiveD2D,
}

impl TrainingMode {
    pub fn d2d_active(self) -> bool {
        matches!(self, TrainingMode::ActiveD2D)
    }

    pub fn as_str(self) -> &'static str {
        match self {
            TrainingMode::MutedD2D => "muted",
            TrainingMode::ActiveD2D => "active",
        }
    }
}

/// `P = 10^((dBm − 30)/10)` watts.
pub fn dbm_to_watt(dbm: f64) -> f64 {
    10f64.powf((dbm - 30.0) / 10.0)
}

pub fn watt_to_dbm(watt: f64) -> f64 {
    10.0 * watt.log10() + 30.0
}

/// Network parameters. Lengths in km, powers in W, densities per km².
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NetworkConfig {
    /// Cell radius `R_c`.
    pub cell_radius: f64,
    /// Path-loss exponent, `> 2`.
    pub alpha: f64,
    /// Base-station density `λ_b`.
    pub lambda_b: f64,
    /// User density relative to base stations, `λ = a·λ_b`.
    pub user_ratio: f64,
    /// D2D transmit power `P_d`.
    pub p_d: f64,
    pub antennas: usize,
    /// Noise variance at the base station, per antenna, in the units the
    /// channel-estimation error is normalized to.
    pub sigma2_bs: f64,
    /// Noise variance at a D2D receiver.
    pub sigma2_d2d: f64,
    pub training_mode: TrainingMode,
    pub pilots: usize,
}

impl Default for NetworkConfig {
    fn default() -> Self {
        Self::table_one()
    }
}

impl NetworkConfig {
    /// Reference scenario: α = 3, R_c = 1 km, λ_b = 1/(πR_c²), λ = 150·λ_b,
    /// P_d = 16 dBm, σ²_D2D = 10⁻³, 128 antennas, 10 pilots.
    pub fn table_one() -> Self {
        Self {
            cell_radius: 1.0,
            alpha: 3.0,
            lambda_b: 1.0 / PI,
            user_ratio: 150.0,
            p_d: dbm_to_watt(16.0),
            antennas: 128,
            sigma2_bs: 1.0,
            sigma2_d2d: 1e-3,
            training_mode: TrainingMode::ActiveD2D,
            pilots: 10,
        }
    }

    pub fn with_training(mut self, mode: TrainingMode) -> Self {
        self.training_mode = mode;
        self
    }

    pub fn with_user_ratio(mut self, a: f64) -> Self {
        self.user_ratio = a;
        self
    }

    pub fn with_antennas(mut self, m: usize) -> Self {
        self.antennas = m;
        self
    }

    /// User density `λ = a·λ_b`.
    pub fn lambda(&self) -> f64 {
        self.user_ratio * self.lambda_b
    }

    pub fn validate(&self) -> Result<()> {
        ensure(
            self.cell_radius > 0.0 && self.cell_radius.is_finite(),
            "cell_radius",
            self.cell_radius,
            "must be positive",
        )?;
        ensure(
            self.alpha > 2.0 && self.alpha.is_finite(),
            "alpha",
            self.alpha,
            "path-loss exponent must exceed 2",
        )?;
        ensure(
            self.lambda_b > 0.0 && self.lambda_b.is_finite(),
            "lambda_b",
            self.lambda_b,
            "must be positive",
        )?;
        ensure(
            self.user_ratio >= 0.0 && self.user_ratio.is_finite(),
            "a",
            self.user_ratio,
            "must be non-negative",
        )?;
        ensure(
            self.p_d > 0.0 && self.p_d.is_finite(),
            "p_d",
            self.p_d,
            "must be positive",
        )?;
        ensure(
            self.antennas >= 1,
            "antennas",
            self.antennas as f64,
            "need at least one antenna",
        )?;
        ensure(
            self.pilots >= 1,
            "pilots",
            self.pilots as f64,
            "need at least one pilot",
        )?;
        ensure(
            self.sigma2_bs >= 0.0 && self.sigma2_bs.is_finite(),
            "sigma2_bs",
            self.sigma2_bs,
            "must be non-negative",
        )?;
        ensure(
            self.sigma2_d2d >= 0.0 && self.sigma2_d2d.is_finite(),
            "sigma2_d2d",
            self.sigma2_d2d,
            "must be non-negative",
        )?;
        Ok(())
    }
}

/// The optimization vector: exclusion radius and cellular-to-D2D power ratio.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ExclusionDesign {
    /// Exclusion radius `R_e` in km.
    pub re: f64,
    /// Power ratio, `P_c = C·P_d`.
    pub c: f64,
}

impl ExclusionDesign {
    pub fn new(re: f64, c: f64) -> Self {
        Self { re, c }
    }

    pub fn p_c(&self, cfg: &NetworkConfig) -> f64 {
        self.c * cfg.p_d
    }

    /// `0 <= R_e <= R_c` and `C >= 1`.
    pub fn validate(&self, cfg: &NetworkConfig) -> Result<()> {
        ensure(
            self.re >= 0.0 && self.re <= cfg.cell_radius,
            "re",
            self.re,
            "exclusion radius must lie in [0, R_c]",
        )?;
        ensure(
            self.c >= 1.0 && self.c.is_finite(),
            "c",
            self.c,
            "cellular power must not be below D2D power",
        )?;
        Ok(())
    }
}

/// Positions that the per-user expressions are conditioned on.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ReferenceGeometry {
    /// Reference cellular user's distance to its base station.
    pub r_ref: f64,
    /// Reference D2D receiver's distance to the reference base station.
    pub d: f64,
    /// Minimum range to interfering D2D transmitters.
    pub r0: f64,
    /// D2D transmitter-receiver distance.
    pub link_dist: f64,
}

impl Default for ReferenceGeometry {
    fn default() -> Self {
        Self {
            r_ref: 0.2,
            d: 0.95,
            r0: 0.1,
            link_dist: 0.05,
        }
    }
}
