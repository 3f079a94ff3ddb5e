use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use exzone_cli::{
    commands, execute, parse_scenario, scenario_hash, Command as Cmd, EXIT_INFEASIBLE, EXIT_OK,
    EXIT_VALIDATION,
};

fn exzone(args: &[&str], dir: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_exzone"))
        .args(args)
        .current_dir(dir)
        .output()
        .expect("run exzone")
}

fn small() -> &'static str {
    "drops = 200\nre_grid = 0.4:0.9:0.25\nr0 = 2\nregion_radius = 3\ncopilot_radius = 10\n"
}

#[test]
fn optimize_emits_table_two_layout() {
    let s = parse_scenario(small()).unwrap();
    let report = commands::optimize(&s).unwrap();
    let text = report.tables[0].render();
    let mut lines = text.lines();
    let header = lines.next().unwrap();
    assert!(header.starts_with("command,scenario_hash,seed,i_d2d,re,c,status"));
    let rows: Vec<&str> = lines.collect();
    assert_eq!(rows.len(), 3);
    let hash = scenario_hash(&s);
    for (row, budget) in rows.iter().zip(["1.20000000000e1", "1.50000000000e1", "1.80000000000e1"]) {
        assert!(row.starts_with(&format!("optimize,{hash},1,{budget},")), "{row}");
    }
    assert_eq!(report.infeasible, 0);
}

#[test]
fn infeasible_budget_exits_two() {
    let dir = tempfile::tempdir().unwrap();
    let s = parse_scenario(&format!("{}i_d2d = 1 W", small())).unwrap();
    let (paths, code) = execute(Cmd::Optimize, &s, dir.path()).unwrap();
    assert_eq!(code, EXIT_INFEASIBLE);
    let text = fs::read_to_string(&paths[0]).unwrap();
    assert!(text.contains(",infeasible,"), "{text}");
}

#[test]
fn analyze_covers_grid() {
    let s = parse_scenario(small()).unwrap();
    let t = &commands::analyze(&s).unwrap().tables[0];
    assert_eq!(t.rows().len(), 3);
}

#[test]
fn simulate_writes_one_file_per_quantity() {
    let dir = tempfile::tempdir().unwrap();
    let s = parse_scenario(small()).unwrap();
    let (paths, code) = execute(Cmd::Simulate, &s, dir.path()).unwrap();
    assert_eq!(code, EXIT_OK);
    let mut names: Vec<String> = paths
        .iter()
        .map(|p| p.file_name().unwrap().to_string_lossy().into_owned())
        .collect();
    names.sort();
    assert_eq!(
        names,
        [
            "simulate_bs_interference.csv",
            "simulate_cell_sinr.csv",
            "simulate_d2d_density.csv",
            "simulate_mse.csv"
        ]
    );
}

#[test]
fn hexagonal_layout_fails_validation() {
    // The literal layout keeps co-pilot users farther out than the Poisson
    // model assumes, so the interference closed form overshoots it.
    let dir = tempfile::tempdir().unwrap();
    let s = parse_scenario(&format!("{}topology = hexagonal\ncell_count = 19", small())).unwrap();
    let (_, code) = execute(Cmd::Validate, &s, dir.path()).unwrap();
    assert_eq!(code, EXIT_VALIDATION);
}

#[test]
fn binary_rejects_bad_scenarios() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("bad.txt");
    fs::write(&path, "alpha = 2\n").unwrap();
    let out = exzone(&["analyze", "--scenario", path.to_str().unwrap()], dir.path());
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("alpha"));

    fs::write(&path, "p_d = 16\n").unwrap();
    let out = exzone(&["analyze", "--scenario", path.to_str().unwrap()], dir.path());
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("unit"));
}

#[test]
fn flags_override_scenario() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("s.txt");
    fs::write(&path, small()).unwrap();
    let out = exzone(
        &[
            "analyze",
            "--scenario",
            path.to_str().unwrap(),
            "--out",
            "res",
            "--seed",
            "9",
            "--re-grid",
            "0.5:0.7:0.1",
        ],
        dir.path(),
    );
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let text = fs::read_to_string(dir.path().join("res/analyze.csv")).unwrap();
    let rows: Vec<&str> = text.lines().skip(1).collect();
    assert_eq!(rows.len(), 3);
    assert!(rows.iter().all(|r| r.split(',').nth(2) == Some("9")));
    assert!(rows[0].contains(",5.00000000000e-1,"));
}

#[test]
fn seeds_change_simulation_output() {
    let mut s = parse_scenario(small()).unwrap();
    let a = commands::simulate(&s).unwrap().tables[1].render();
    s.seed = 2;
    let b = commands::simulate(&s).unwrap().tables[1].render();
    assert_ne!(a, b);
}
