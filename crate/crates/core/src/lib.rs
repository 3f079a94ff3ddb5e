//! Exclusion-zone design for D2D underlay in massive MIMO uplinks.
//!
//! Closed-form densities, interference and SINR live in [`analytics`], the
//! drop simulator that checks them in [`montecarlo`], and the joint
//! exclusion-radius and power-ratio optimizer in [`optimizer`].

pub mod analytics;
pub mod config;
pub mod error;
pub mod geometry;
pub mod montecarlo;
pub mod optimizer;

pub use analytics::{analytic_report, AnalyticReport, DerivedDensities};
pub use config::{
    dbm_to_watt, watt_to_dbm, ExclusionDesign, NetworkConfig, ReferenceGeometry, TrainingMode,
};
pub use error::{Error, Result};
pub use geometry::{Annulus, HexLayout, Mode, Point2D};
pub use montecarlo::{
    FadingModel, MonteCarloEstimate, Quantity, SimulationConfig, SweepResult, Topology,
};
pub use optimizer::{ObjectiveContext, OptimizationResult, Status};
