//! Drop-based Monte Carlo simulation of the reference base station.
//!
//! Two user topologies are available. [`Topology::Poisson`] draws base
//! stations as a Poisson field and co-pilot users as one Poisson layer per
//! pilot outside `2R_c − R_e`, which is the model the closed forms describe.
//! [`Topology::Hexagonal`] is a literal multi-cell layout with per-cell
//! scheduling and is used to audit the co-pilot floor assumption.

pub mod drop;
pub mod mrc;
pub mod rng;
pub mod stats;

use rayon::prelude::*;

use crate::analytics::{self, copilot_floor, derived_densities};
use crate::config::{ExclusionDesign, NetworkConfig};
use crate::error::{ensure, Result};
use crate::geometry::campbell_moment;

pub use drop::{
    generate_drop, sample_geometry, D2dPair, DropExtras, DropGeometry, DropRealization,
    ScheduledUser, StatDraw,
};
pub use mrc::{training_phase, uplink_mrc, CoherentTerms, DropStatistics, FiniteTerms};
pub use rng::drop_seed;
pub use stats::MonteCarloEstimate;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Topology {
    #[default]
    Poisson,
    Hexagonal {
        cell_count: usize,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum FadingModel {
    /// Per-user chi-square summaries of the `M`-antenna channels.
    #[default]
    Statistical,
    /// Full channel vectors, pilot book and noise matrices.
    Explicit,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SimulationConfig {
    pub topology: Topology,
    pub fading: FadingModel,
    /// Distance of the pinned reference user to its base station.
    pub r_ref: f64,
    /// D2D transmitter-receiver distance.
    pub link_dist: f64,
    /// Poisson topology: radius of the simulated D2D and non-reference-pilot
    /// population.
    pub region_radius: f64,
    /// Poisson topology: outer radius of the reference-pilot co-pilot layer.
    pub copilot_radius: f64,
    /// Add the MRC noise term to the measured interference.
    pub include_noise: bool,
}

impl Default for SimulationConfig {
    fn default() -> Self {
        Self {
            topology: Topology::Poisson,
            fading: FadingModel::Statistical,
            r_ref: 0.2,
            link_dist: 0.05,
            region_radius: 6.0,
            copilot_radius: 40.0,
            include_noise: false,
        }
    }
}

impl SimulationConfig {
    pub fn validate(&self, cfg: &NetworkConfig) -> Result<()> {
        ensure(self.r_ref > 0.0, "r_ref", self.r_ref, "must be positive")?;
        ensure(
            self.link_dist > 0.0 && self.link_dist.is_finite(),
            "link_dist",
            self.link_dist,
            "must be positive",
        )?;
        ensure(
            self.region_radius >= cfg.cell_radius && self.region_radius.is_finite(),
            "region_radius",
            self.region_radius,
            "must cover at least one cell",
        )?;
        ensure(
            self.copilot_radius >= cfg.cell_radius && self.copilot_radius.is_finite(),
            "copilot_radius",
            self.copilot_radius,
            "must be at least R_c",
        )?;
        if let Topology::Hexagonal { cell_count } = self.topology {
            ensure(cell_count >= 1, "cell_count", cell_count as f64, "need at least one cell")?;
        }
        Ok(())
    }
}

/// Quantity measured by a sweep.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Quantity {
    /// Coherent co-pilot and D2D interference power at the reference BS.
    BsInterference,
    /// Per-antenna channel-estimation MSE.
    Mse,
    /// Ratio of mean coherent signal to mean interference.
    CellSinr,
    /// D2D transmitter density beyond `R_e` of the reference BS.
    D2dDensity,
}

impl Quantity {
    pub const ALL: [Quantity; 4] = [
        Quantity::BsInterference,
        Quantity::Mse,
        Quantity::CellSinr,
        Quantity::D2dDensity,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            Quantity::BsInterference => "bs_interference",
            Quantity::Mse => "mse",
            Quantity::CellSinr => "cell_sinr",
            Quantity::D2dDensity => "d2d_density",
        }
    }
}

/// Realized co-pilot plus D2D interference power in the MRC statistic.
pub fn measure_bs_interference(
    drop: &DropRealization,
    cfg: &NetworkConfig,
    x: &ExclusionDesign,
    sim: &SimulationConfig,
) -> f64 {
    let s = uplink_mrc(drop, cfg, x, sim.fading);
    interference_of(&s, sim)
}

fn interference_of(s: &DropStatistics, sim: &SimulationConfig) -> f64 {
    s.coherent.interference() + if sim.include_noise { s.noise } else { 0.0 }
}

/// Per-drop numbers needed by every quantity.
#[derive(Debug, Clone, Copy, PartialEq)]
struct DropSample {
    interference: f64,
    signal: f64,
    mse: f64,
    density: f64,
    min_copilot: f64,
}

fn sample_drop(
    drop: &DropRealization,
    cfg: &NetworkConfig,
    x: &ExclusionDesign,
    sim: &SimulationConfig,
) -> DropSample {
    let s = uplink_mrc(drop, cfg, x, sim.fading);
    DropSample {
        interference: interference_of(&s, sim),
        signal: s.coherent.signal,
        mse: s.mse,
        density: drop.d2d_in_window() as f64 / drop.d2d_window.area(),
        min_copilot: drop.min_copilot_distance(),
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepResult {
    pub quantity: Quantity,
    pub re_values: Vec<f64>,
    /// Closed-form value at each `R_e`.
    pub analytic: Vec<f64>,
    /// Closed-form value minus its restriction to the simulated region. NaN
    /// for the hexagonal topology.
    pub truncation_bias: Vec<f64>,
    pub empirical: Vec<MonteCarloEstimate>,
    /// Closest realized co-pilot interferer across all drops.
    pub min_copilot_distance: Vec<f64>,
}

impl SweepResult {
    /// Analytic value over the simulated region only.
    pub fn truncated_analytic(&self, i: usize) -> f64 {
        let b = self.truncation_bias[i];
        if b.is_nan() {
            self.analytic[i]
        } else {
            self.analytic[i] - b
        }
    }
}

fn analytic_value(
    cfg: &NetworkConfig,
    x: &ExclusionDesign,
    sim: &SimulationConfig,
    quantity: Quantity,
) -> Result<f64> {
    match quantity {
        Quantity::BsInterference => analytics::avg_bs_interference(cfg, x),
        Quantity::Mse => analytics::mse_per_antenna(cfg, x),
        Quantity::CellSinr => analytics::avg_cell_sinr(cfg, x, sim.r_ref),
        Quantity::D2dDensity => Ok(derived_densities(cfg, x.re)?.lambda_d),
    }
}

/// Closed-form tails beyond the Poisson simulation region.
fn truncation_bias(
    cfg: &NetworkConfig,
    x: &ExclusionDesign,
    sim: &SimulationConfig,
    quantity: Quantity,
    full: f64,
) -> Result<f64> {
    if !matches!(sim.topology, Topology::Poisson) {
        return Ok(f64::NAN);
    }
    let p_c = x.p_c(cfg);
    let lambda_d = derived_densities(cfg, x.re)?.lambda_d;
    let active = cfg.training_mode.d2d_active();
    // Both tails start where the simulated layers stop.
    let copilot_outer = sim.copilot_radius.max(copilot_floor(cfg, x.re));
    let d2d_outer = sim.region_radius.max(x.re);
    let tail = |density: f64, r: f64, e: f64| campbell_moment(density, r, e);
    let a = cfg.alpha;
    let interference_tail = || -> Result<f64> {
        let mut t = p_c * p_c * tail(cfg.lambda_b, copilot_outer, 2.0 * a)?;
        if active {
            t += cfg.p_d * cfg.p_d * tail(lambda_d, d2d_outer, 2.0 * a)?;
        }
        Ok(t)
    };
    Ok(match quantity {
        Quantity::BsInterference => interference_tail()?,
        Quantity::Mse => {
            let mut t = tail(cfg.lambda_b, copilot_outer, a)?;
            if active {
                t += cfg.p_d / p_c * tail(lambda_d, d2d_outer, a)?;
            }
            t
        }
        Quantity::CellSinr => {
            let denom = analytics::avg_bs_interference(cfg, x)?;
            let truncated = full * denom / (denom - interference_tail()?);
            full - truncated
        }
        Quantity::D2dDensity => 0.0,
    })
}

/// Runs `n_drops` drops and evaluates each at every `R_e` in `re_values`.
///
/// Drop `i` uses seed `drop_seed(seed, i)` at every `R_e`, and the result is
/// the same for any thread count.
pub fn run_sweep(
    cfg: &NetworkConfig,
    template: &ExclusionDesign,
    sim: &SimulationConfig,
    quantity: Quantity,
    re_values: &[f64],
    n_drops: usize,
    seed: u64,
) -> Result<SweepResult> {
    cfg.validate()?;
    sim.validate(cfg)?;
    ensure(n_drops >= 1, "n_drops", n_drops as f64, "need at least one drop")?;
    let mut analytic = Vec::with_capacity(re_values.len());
    let mut bias = Vec::with_capacity(re_values.len());
    let designs: Vec<ExclusionDesign> = re_values
        .iter()
        .map(|&re| ExclusionDesign::new(re, template.c))
        .collect();
    for x in &designs {
        drop::check_re(cfg, x.re)?;
        x.validate(cfg)?;
        let a = analytic_value(cfg, x, sim, quantity)?;
        bias.push(truncation_bias(cfg, x, sim, quantity, a)?);
        analytic.push(a);
    }

    let per_drop: Vec<Vec<DropSample>> = (0..n_drops as u64)
        .into_par_iter()
        .map(|i| -> Result<Vec<DropSample>> {
            let geo = sample_geometry(cfg, sim, drop_seed(seed, i))?;
            designs
                .iter()
                .map(|x| Ok(sample_drop(&geo.realize(cfg, x, sim)?, cfg, x, sim)))
                .collect()
        })
        .collect::<Result<_>>()?;

    let mut empirical = Vec::with_capacity(designs.len());
    let mut min_copilot = Vec::with_capacity(designs.len());
    for k in 0..designs.len() {
        let col = |f: fn(&DropSample) -> f64| per_drop.iter().map(|d| f(&d[k])).collect::<Vec<_>>();
        let est = match quantity {
            Quantity::BsInterference => stats::mean_estimate(&col(|d| d.interference)),
            Quantity::Mse => stats::mean_estimate(&col(|d| d.mse)),
            Quantity::D2dDensity => stats::mean_estimate(&col(|d| d.density)),
            Quantity::CellSinr => {
                stats::ratio_estimate(&col(|d| d.signal), &col(|d| d.interference))
            }
        };
        empirical.push(est);
        min_copilot.push(
            per_drop
                .iter()
                .map(|d| d[k].min_copilot)
                .fold(f64::INFINITY, f64::min),
        );
    }

    Ok(SweepResult {
        quantity,
        re_values: re_values.to_vec(),
        analytic,
        truncation_bias: bias,
        empirical,
        min_copilot_distance: min_copilot,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::config::TrainingMode;

    fn quick() -> SimulationConfig {
        SimulationConfig {
            region_radius: 3.0,
            copilot_radius: 10.0,
            ..SimulationConfig::default()
        }
    }

    #[test]
    fn single_drop_flags_missing_error_bar() {
        let cfg = NetworkConfig::table_one();
        let r = run_sweep(
            &cfg,
            &ExclusionDesign::new(0.5, 10.0),
            &quick(),
            Quantity::Mse,
            &[0.5],
            1,
            3,
        )
        .unwrap();
        assert!(!r.empirical[0].std_error_available);
        assert_eq!(r.empirical[0].std_error, 0.0);
    }

    #[test]
    fn invalid_re_rejects_whole_sweep() {
        let cfg = NetworkConfig::table_one();
        let x = ExclusionDesign::new(0.5, 10.0);
        for bad in [0.0, 1.5, -0.1] {
            assert!(run_sweep(&cfg, &x, &quick(), Quantity::Mse, &[0.5, bad], 4, 1).is_err());
        }
    }

    #[test]
    fn sweep_is_deterministic_across_thread_counts() {
        let cfg = NetworkConfig::table_one();
        let x = ExclusionDesign::new(0.5, 10.0);
        let run = |threads: usize| {
            rayon::ThreadPoolBuilder::new()
                .num_threads(threads)
                .build()
                .unwrap()
                .install(|| {
                    run_sweep(&cfg, &x, &quick(), Quantity::CellSinr, &[0.4, 0.7], 40, 99).unwrap()
                })
        };
        let a = run(1);
        let b = run(3);
        assert_eq!(a, b);
    }

    #[test]
    fn copilot_power_scales_with_pc_squared() {
        let cfg = NetworkConfig::table_one().with_training(TrainingMode::MutedD2D);
        let sim = quick();
        for seed in 0..5 {
            let a = ExclusionDesign::new(0.6, 2.0);
            let b = ExclusionDesign::new(0.6, 4.0);
            let da = generate_drop(&cfg, &a, &sim, seed).unwrap();
            let db = generate_drop(&cfg, &b, &sim, seed).unwrap();
            let ia = measure_bs_interference(&da, &cfg, &a, &sim);
            let ib = measure_bs_interference(&db, &cfg, &b, &sim);
            assert!(((ib / ia) - 4.0).abs() < 1e-12);
        }
    }

    #[test]
    fn no_users_single_cell_has_no_interference() {
        let cfg = NetworkConfig::table_one().with_user_ratio(0.0);
        let sim = SimulationConfig {
            copilot_radius: 1.0,
            region_radius: 1.0,
            ..SimulationConfig::default()
        };
        let x = ExclusionDesign::new(0.5, 2.0);
        let d = generate_drop(&cfg, &x, &sim, 1).unwrap();
        assert_eq!(measure_bs_interference(&d, &cfg, &x, &sim), 0.0);
    }

    #[test]
    fn truncation_bias_shrinks_with_region() {
        let cfg = NetworkConfig::table_one();
        let x = ExclusionDesign::new(0.5, 10.0);
        let small = truncation_bias(&cfg, &x, &quick(), Quantity::Mse, 0.0).unwrap();
        let large = truncation_bias(&cfg, &x, &SimulationConfig::default(), Quantity::Mse, 0.0)
            .unwrap();
        assert!(small > large && large > 0.0);
        let full = analytics::avg_cell_sinr(&cfg, &x, 0.2).unwrap();
        let s = truncation_bias(&cfg, &x, &quick(), Quantity::CellSinr, full).unwrap();
        assert!(s < 0.0);
    }
}
