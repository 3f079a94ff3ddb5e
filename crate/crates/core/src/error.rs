use thiserror::Error;

/// Errors raised by the analytic, simulation and optimization layers.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid parameter `{name}` = {value}: {reason}")]
    InvalidParameter {
        name: &'static str,
        value: f64,
        reason: &'static str,
    },

    #[error("sampling region is unbounded but density is {density}")]
    UnboundedRegion { density: f64 },

    #[error("moment integral diverges: {0}")]
    Divergent(&'static str),

    #[error("reference user at {r_ref} km is not inside the exclusion radius {re} km")]
    ReferenceNotCellular { r_ref: f64, re: f64 },

    #[error("receiver at {d} km lies inside the exclusion radius {re} km")]
    ReceiverInsideExclusion { d: f64, re: f64 },

    #[error("SINR denominator is not positive ({0})")]
    DegenerateSinr(f64),

    #[error("optimization is infeasible: smallest interference {min_interference} W exceeds the limit {limit} W")]
    Infeasible { min_interference: f64, limit: f64 },
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn ensure(
    cond: bool,
    name: &'static str,
    value: f64,
    reason: &'static str,
) -> Result<()> {
    if cond {
        Ok(())
    } else {
        Err(Error::InvalidParameter {
            name,
            value,
            reason,
        })
    }
}
