use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, ValueEnum};
use exzone_cli::{execute, load_scenario, Command, Overrides, ReGrid, EXIT_ERROR};

#[derive(Debug, Clone, Copy, ValueEnum)]
enum Cmd {
    /// Closed-form metrics over the exclusion-radius grid.
    Analyze,
    /// Monte Carlo sweeps of every measured quantity.
    Simulate,
    /// Optimal exclusion radius and power ratio for each interference budget.
    Optimize,
    /// Simulated means against the closed forms; exits 3 on any 3σ miss.
    Validate,
}

/// Exclusion-zone design for D2D underlay in massive MIMO uplinks.
#[derive(Debug, Parser)]
#[command(name = "exzone", version)]
struct Args {
    #[arg(value_enum)]
    command: Cmd,
    /// Scenario file of `key = value` lines; defaults apply when omitted.
    #[arg(long)]
    scenario: Option<PathBuf>,
    /// Output directory for CSV files.
    #[arg(long, default_value = "out")]
    out: PathBuf,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    drops: Option<usize>,
    /// Exclusion radii as `start:stop:step` in km.
    #[arg(long, value_parser = parse_grid)]
    re_grid: Option<ReGrid>,
}

fn parse_grid(s: &str) -> Result<ReGrid, String> {
    ReGrid::parse(s).map_err(|e| e.to_string())
}

fn main() -> ExitCode {
    let args = Args::parse();
    let command = match args.command {
        Cmd::Analyze => Command::Analyze,
        Cmd::Simulate => Command::Simulate,
        Cmd::Optimize => Command::Optimize,
        Cmd::Validate => Command::Validate,
    };
    let overrides = Overrides {
        seed: args.seed,
        drops: args.drops,
        re_grid: args.re_grid,
    };
    let result = load_scenario(args.scenario.as_deref(), &overrides)
        .and_then(|s| execute(command, &s, &args.out));
    match result {
        Ok((paths, code)) => {
            for p in paths {
                println!("{}", p.display());
            }
            ExitCode::from(code as u8)
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(EXIT_ERROR as u8)
        }
    }
}
