//! Command-line front end: scenario files in, headered CSV tables out.

pub mod commands;
pub mod output;
pub mod scenario;

use std::path::{Path, PathBuf};

use thiserror::Error;

pub use commands::{run, Command, Report};
pub use output::{scenario_hash, Table};
pub use scenario::{parse_scenario, ReGrid, Scenario, ScenarioError};

pub const EXIT_OK: i32 = 0;
pub const EXIT_ERROR: i32 = 1;
pub const EXIT_INFEASIBLE: i32 = 2;
pub const EXIT_VALIDATION: i32 = 3;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("scenario: {0}")]
    Scenario(#[from] ScenarioError),
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },
    #[error("{context}: {source}")]
    Core {
        context: String,
        source: exzone_core::Error,
    },
}

impl CliError {
    pub fn io(path: &Path, source: std::io::Error) -> Self {
        CliError::Io {
            path: path.to_path_buf(),
            source,
        }
    }

    pub fn core(context: impl Into<String>, source: exzone_core::Error) -> Self {
        CliError::Core {
            context: context.into(),
            source,
        }
    }
}

/// Command-line overrides applied on top of a scenario file.
#[derive(Debug, Clone, Default)]
pub struct Overrides {
    pub seed: Option<u64>,
    pub drops: Option<usize>,
    pub re_grid: Option<ReGrid>,
}

impl Overrides {
    pub fn apply(&self, mut s: Scenario) -> Result<Scenario, CliError> {
        if let Some(seed) = self.seed {
            s.seed = seed;
        }
        if let Some(n) = self.drops {
            s.n_drops = n;
        }
        if let Some(g) = self.re_grid {
            s.re_grid = g;
        }
        s.validate()?;
        Ok(s)
    }
}

/// Loads the scenario (or the defaults when `path` is `None`) and applies
/// the overrides.
pub fn load_scenario(path: Option<&Path>, overrides: &Overrides) -> Result<Scenario, CliError> {
    let s = match path {
        Some(p) => {
            let text = std::fs::read_to_string(p).map_err(|e| CliError::io(p, e))?;
            parse_scenario(&text)?
        }
        None => Scenario::default(),
    };
    overrides.apply(s)
}

/// Runs `command`, writes its tables under `out` and returns the written
/// paths with the exit code.
pub fn execute(command: Command, s: &Scenario, out: &Path) -> Result<(Vec<PathBuf>, i32), CliError> {
    let report = run(command, s)?;
    let mut paths = Vec::with_capacity(report.tables.len());
    for t in &report.tables {
        paths.push(t.write(out)?);
    }
    let code = if report.violations > 0 {
        EXIT_VALIDATION
    } else if report.infeasible > 0 {
        EXIT_INFEASIBLE
    } else {
        EXIT_OK
    };
    Ok((paths, code))
}
