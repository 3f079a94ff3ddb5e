//! The four subcommands. Each returns its tables in memory; the caller
//! writes them.

use exzone_core::montecarlo::run_sweep;
use exzone_core::optimizer::{solve, CMin};
use exzone_core::{analytic_report, Error, Quantity, SweepResult};

use crate::output::{Cell, Table};
use crate::scenario::Scenario;
use crate::CliError;

/// |z| above which `validate` reports a disagreement.
pub const VALIDATION_SIGMAS: f64 = 3.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Command {
    Analyze,
    Simulate,
    Optimize,
    Validate,
}

impl Command {
    pub fn as_str(self) -> &'static str {
        match self {
            Command::Analyze => "analyze",
            Command::Simulate => "simulate",
            Command::Optimize => "optimize",
            Command::Validate => "validate",
        }
    }
}

/// Tables produced by a command plus the exit condition they imply.
#[derive(Debug, Clone)]
pub struct Report {
    pub tables: Vec<Table>,
    /// Budgets with no feasible design.
    pub infeasible: usize,
    /// Validation rows outside the agreement band.
    pub violations: usize,
}

impl Report {
    fn new(tables: Vec<Table>) -> Self {
        Self {
            tables,
            infeasible: 0,
            violations: 0,
        }
    }
}

pub fn run(command: Command, s: &Scenario) -> Result<Report, CliError> {
    match command {
        Command::Analyze => analyze(s),
        Command::Simulate => simulate(s),
        Command::Optimize => optimize(s),
        Command::Validate => validate(s),
    }
}

pub fn analyze(s: &Scenario) -> Result<Report, CliError> {
    let mut t = Table::new(
        "analyze",
        "analyze",
        s,
        &[
            "re",
            "c",
            "mse_per_antenna",
            "avg_bs_interference",
            "avg_cell_sinr",
            "d2d_interference",
            "avg_d2d_sinr",
        ],
    );
    for re in s.re_grid.values() {
        let r = analytic_report(&s.network, &s.design(re), &s.geometry)
            .map_err(|e| CliError::core(format!("analyze at re = {re}"), e))?;
        t.push(vec![
            re.into(),
            s.c.into(),
            r.mse_per_antenna.into(),
            r.avg_bs_interference.into(),
            r.avg_cell_sinr.into(),
            r.d2d_interference.into(),
            r.avg_d2d_sinr.into(),
        ]);
    }
    Ok(Report::new(vec![t]))
}

fn sweep(s: &Scenario, q: Quantity) -> Result<SweepResult, CliError> {
    run_sweep(
        &s.network,
        &s.design(s.re_grid.start),
        &s.simulation,
        q,
        &s.re_grid.values(),
        s.n_drops,
        s.seed,
    )
    .map_err(|e| CliError::core(format!("simulate {}", q.as_str()), e))
}

pub fn simulate(s: &Scenario) -> Result<Report, CliError> {
    let mut tables = Vec::new();
    for q in Quantity::ALL {
        let r = sweep(s, q)?;
        let mut t = Table::new(
            format!("simulate_{}", q.as_str()),
            "simulate",
            s,
            &[
                "quantity",
                "re",
                "c",
                "analytic",
                "truncated_analytic",
                "empirical_mean",
                "std_error",
                "n_drops",
                "min_copilot_distance",
            ],
        );
        for (i, re) in r.re_values.iter().enumerate() {
            let e = &r.empirical[i];
            t.push(vec![
                q.as_str().into(),
                (*re).into(),
                s.c.into(),
                r.analytic[i].into(),
                r.truncated_analytic(i).into(),
                e.mean.into(),
                e.std_error.into(),
                e.n_drops.into(),
                r.min_copilot_distance[i].into(),
            ]);
        }
        tables.push(t);
    }
    Ok(Report::new(tables))
}

pub fn optimize(s: &Scenario) -> Result<Report, CliError> {
    let mut t = Table::new(
        "optimize",
        "optimize",
        s,
        &[
            "i_d2d",
            "re",
            "c",
            "status",
            "f_value",
            "g_value",
            "multiplier_beta",
            "c_min",
            "stationarity",
            "primal_violation",
            "complementary_slackness",
        ],
    );
    let mut infeasible = 0;
    for &budget in &s.i_d2d {
        match solve(&s.context(budget)) {
            Ok(r) => {
                let c_min = match r.c_min {
                    CMin::Finite(c) => c,
                    CMin::Unbounded => f64::INFINITY,
                };
                let k = r.kkt_residuals;
                t.push(vec![
                    budget.into(),
                    r.x_star.re.into(),
                    r.x_star.c.into(),
                    r.status.as_str().into(),
                    r.f_value.into(),
                    r.g_value.into(),
                    r.multiplier_beta.into(),
                    c_min.into(),
                    k.stationarity.into(),
                    k.primal_violation.into(),
                    k.complementary_slackness.into(),
                ]);
            }
            Err(Error::Infeasible {
                min_interference, ..
            }) => {
                infeasible += 1;
                let nan = Cell::Num(f64::NAN);
                t.push(vec![
                    budget.into(),
                    nan.clone(),
                    nan.clone(),
                    "infeasible".into(),
                    nan.clone(),
                    min_interference.into(),
                    nan.clone(),
                    nan.clone(),
                    nan.clone(),
                    (min_interference - budget).into(),
                    nan,
                ]);
            }
            Err(e) => return Err(CliError::core(format!("optimize at i_d2d = {budget} W"), e)),
        }
    }
    let mut report = Report::new(vec![t]);
    report.infeasible = infeasible;
    Ok(report)
}

/// Agreement of the simulated and closed-form means over the sweep grid.
///
/// The reference is the closed form restricted to the simulated region, so
/// the band measures model agreement rather than truncation.
pub fn validate(s: &Scenario) -> Result<Report, CliError> {
    let mut t = Table::new(
        "validate",
        "validate",
        s,
        &[
            "quantity",
            "re",
            "c",
            "analytic",
            "truncated_analytic",
            "empirical_mean",
            "std_error",
            "n_drops",
            "z",
            "pass",
        ],
    );
    let mut violations = 0;
    for q in [Quantity::BsInterference, Quantity::Mse, Quantity::D2dDensity] {
        let r = sweep(s, q)?;
        for (i, re) in r.re_values.iter().enumerate() {
            let e = &r.empirical[i];
            let target = r.truncated_analytic(i);
            let z = (e.mean - target) / e.std_error;
            let pass = e.within_sigmas(target, VALIDATION_SIGMAS);
            if !pass {
                violations += 1;
            }
            t.push(vec![
                q.as_str().into(),
                (*re).into(),
                s.c.into(),
                r.analytic[i].into(),
                target.into(),
                e.mean.into(),
                e.std_error.into(),
                e.n_drops.into(),
                z.into(),
                if pass { "true" } else { "false" }.into(),
            ]);
        }
    }
    let mut report = Report::new(vec![t]);
    report.violations = violations;
    Ok(report)
}
