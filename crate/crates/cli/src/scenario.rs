//! Flat `key = value` scenario files.
//!
//! ```text
//! # Table I defaults with a lighter user load
//! a = 100
//! p_d = 16 dBm
//! i_d2d = 12 W, 15 W, 18 W
//! re_grid = 0.4:0.9:0.05
//! ```
//!
//! Powers (`p_d`, `i_d2d`) need a unit: `W`, `mW` or `dBm`. Omitted keys take
//! the reference defaults; unknown keys are rejected.

use std::f64::consts::PI;
use std::fmt::Write as _;

use exzone_core::{
    dbm_to_watt, ExclusionDesign, FadingModel, NetworkConfig, ObjectiveContext,
    ReferenceGeometry, SimulationConfig, Topology, TrainingMode,
};
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ScenarioError {
    #[error("line {line}: expected `key = value`")]
    Syntax { line: usize },
    #[error("line {line}: unknown key `{key}`")]
    UnknownKey { line: usize, key: String },
    #[error("line {line}: duplicate key `{key}`")]
    Duplicate { line: usize, key: String },
    #[error("`{key}`: {reason}")]
    Value { key: String, reason: String },
}

fn bad(key: &str, reason: impl Into<String>) -> ScenarioError {
    ScenarioError::Value {
        key: key.to_string(),
        reason: reason.into(),
    }
}

/// Inclusive `start:stop:step` grid of exclusion radii.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ReGrid {
    pub start: f64,
    pub stop: f64,
    pub step: f64,
}

impl ReGrid {
    pub fn parse(text: &str) -> Result<Self, ScenarioError> {
        let parts: Vec<&str> = text.split(':').map(str::trim).collect();
        let [start, stop, step] = parts[..] else {
            return Err(bad("re_grid", "expected start:stop:step"));
        };
        let num = |s: &str| {
            s.parse::<f64>()
                .map_err(|_| bad("re_grid", format!("`{s}` is not a number")))
        };
        let grid = Self {
            start: num(start)?,
            stop: num(stop)?,
            step: num(step)?,
        };
        if !(grid.step > 0.0) || !(grid.stop >= grid.start) || !grid.start.is_finite() {
            return Err(bad("re_grid", "need start <= stop and step > 0"));
        }
        if (grid.stop - grid.start) / grid.step > 1e6 {
            return Err(bad("re_grid", "too many points"));
        }
        Ok(grid)
    }

    pub fn values(&self) -> Vec<f64> {
        let n = ((self.stop - self.start) / self.step + 1e-9).floor() as usize;
        (0..=n).map(|k| self.start + k as f64 * self.step).collect()
    }
}

impl std::fmt::Display for ReGrid {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}:{}:{}", self.start, self.stop, self.step)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Scenario {
    pub network: NetworkConfig,
    pub geometry: ReferenceGeometry,
    /// Power ratio used by `analyze` and `simulate`.
    pub c: f64,
    pub re_min: f64,
    pub re_max: f64,
    pub c_max: f64,
    pub re_grid: ReGrid,
    pub n_drops: usize,
    pub seed: u64,
    /// Interference budgets for `optimize`, W.
    pub i_d2d: Vec<f64>,
    pub simulation: SimulationConfig,
}

impl Default for Scenario {
    fn default() -> Self {
        let geometry = ReferenceGeometry::default();
        Self {
            network: NetworkConfig::table_one(),
            geometry,
            c: 10.0,
            re_min: 0.4,
            re_max: 0.9,
            c_max: 10.0,
            re_grid: ReGrid {
                start: 0.4,
                stop: 0.9,
                step: 0.05,
            },
            n_drops: 10_000,
            seed: 1,
            i_d2d: vec![12.0, 15.0, 18.0],
            simulation: SimulationConfig {
                r_ref: geometry.r_ref,
                link_dist: geometry.link_dist,
                ..SimulationConfig::default()
            },
        }
    }
}

const KEYS: &[&str] = &[
    "cell_radius",
    "alpha",
    "lambda_b",
    "a",
    "p_d",
    "antennas",
    "sigma2_bs",
    "sigma2_d2d",
    "training",
    "pilots",
    "r_ref",
    "d",
    "r0",
    "link_dist",
    "c",
    "re_min",
    "re_max",
    "c_max",
    "re_grid",
    "drops",
    "seed",
    "i_d2d",
    "topology",
    "cell_count",
    "fading",
    "region_radius",
    "copilot_radius",
    "include_noise",
];

fn number(key: &str, v: &str) -> Result<f64, ScenarioError> {
    let x: f64 = v
        .parse()
        .map_err(|_| bad(key, format!("`{v}` is not a number")))?;
    if x.is_nan() {
        return Err(bad(key, "NaN is not allowed"));
    }
    Ok(x)
}

fn integer<T: std::str::FromStr>(key: &str, v: &str) -> Result<T, ScenarioError> {
    v.parse()
        .map_err(|_| bad(key, format!("`{v}` is not a non-negative integer")))
}

/// A power with an explicit unit, in watts.
fn power(key: &str, v: &str) -> Result<f64, ScenarioError> {
    let v = v.trim();
    let split = v
        .find(|c: char| c.is_ascii_alphabetic() && c != 'e' && c != 'E')
        .or_else(|| v.rfind(char::is_whitespace))
        .ok_or_else(|| bad(key, "power needs a unit (W, mW or dBm)"))?;
    let (num, unit) = v.split_at(split);
    let x = number(key, num.trim())?;
    match unit.trim() {
        "W" => Ok(x),
        "mW" => Ok(x * 1e-3),
        "dBm" => Ok(dbm_to_watt(x)),
        "" => Err(bad(key, "power needs a unit (W, mW or dBm)")),
        other => Err(bad(key, format!("unknown power unit `{other}`"))),
    }
}

fn boolean(key: &str, v: &str) -> Result<bool, ScenarioError> {
    match v {
        "true" => Ok(true),
        "false" => Ok(false),
        _ => Err(bad(key, "expected true or false")),
    }
}

pub fn parse_scenario(text: &str) -> Result<Scenario, ScenarioError> {
    let mut entries: Vec<(usize, &str, &str)> = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let (k, v) = line
            .split_once('=')
            .ok_or(ScenarioError::Syntax { line: i + 1 })?;
        let (k, v) = (k.trim(), v.trim());
        if !KEYS.contains(&k) {
            return Err(ScenarioError::UnknownKey {
                line: i + 1,
                key: k.to_string(),
            });
        }
        if entries.iter().any(|(_, e, _)| *e == k) {
            return Err(ScenarioError::Duplicate {
                line: i + 1,
                key: k.to_string(),
            });
        }
        entries.push((i + 1, k, v));
    }

    let mut s = Scenario::default();
    let mut lambda_b = None;
    let mut cell_count = 31;
    let mut topology = "poisson";
    for &(_, k, v) in &entries {
        let net = &mut s.network;
        match k {
            "cell_radius" => net.cell_radius = number(k, v)?,
            "alpha" => net.alpha = number(k, v)?,
            "lambda_b" => lambda_b = Some(number(k, v)?),
            "a" => net.user_ratio = number(k, v)?,
            "p_d" => net.p_d = power(k, v)?,
            "antennas" => net.antennas = integer(k, v)?,
            "sigma2_bs" => net.sigma2_bs = number(k, v)?,
            "sigma2_d2d" => net.sigma2_d2d = number(k, v)?,
            "training" => {
                net.training_mode = match v {
                    "muted" => TrainingMode::MutedD2D,
                    "active" => TrainingMode::ActiveD2D,
                    _ => return Err(bad(k, "expected muted or active")),
                }
            }
            "pilots" => net.pilots = integer(k, v)?,
            "r_ref" => s.geometry.r_ref = number(k, v)?,
            "d" => s.geometry.d = number(k, v)?,
            "r0" => s.geometry.r0 = number(k, v)?,
            "link_dist" => s.geometry.link_dist = number(k, v)?,
            "c" => s.c = number(k, v)?,
            "re_min" => s.re_min = number(k, v)?,
            "re_max" => s.re_max = number(k, v)?,
            "c_max" => s.c_max = number(k, v)?,
            "re_grid" => s.re_grid = ReGrid::parse(v)?,
            "drops" => s.n_drops = integer(k, v)?,
            "seed" => s.seed = integer(k, v)?,
            "i_d2d" => {
                s.i_d2d = v
                    .split(',')
                    .map(|p| power(k, p))
                    .collect::<Result<_, _>>()?
            }
            "topology" => topology = v,
            "cell_count" => cell_count = integer(k, v)?,
            "fading" => {
                s.simulation.fading = match v {
                    "statistical" => FadingModel::Statistical,
                    "explicit" => FadingModel::Explicit,
                    _ => return Err(bad(k, "expected statistical or explicit")),
                }
            }
            "region_radius" => s.simulation.region_radius = number(k, v)?,
            "copilot_radius" => s.simulation.copilot_radius = number(k, v)?,
            "include_noise" => s.simulation.include_noise = boolean(k, v)?,
            _ => unreachable!("key list and match arms agree"),
        }
    }
    s.network.lambda_b =
        lambda_b.unwrap_or(1.0 / (PI * s.network.cell_radius * s.network.cell_radius));
    s.simulation.topology = match topology {
        "poisson" => Topology::Poisson,
        "hexagonal" => Topology::Hexagonal { cell_count },
        _ => return Err(bad("topology", "expected poisson or hexagonal")),
    };
    if topology == "poisson" && entries.iter().any(|(_, k, _)| *k == "cell_count") {
        return Err(bad("cell_count", "only meaningful with topology = hexagonal"));
    }
    s.sync_simulation();
    s.validate()?;
    Ok(s)
}

impl Scenario {
    /// Copies the reference geometry into the simulation settings.
    pub fn sync_simulation(&mut self) {
        self.simulation.r_ref = self.geometry.r_ref;
        self.simulation.link_dist = self.geometry.link_dist;
    }

    pub fn design(&self, re: f64) -> ExclusionDesign {
        ExclusionDesign::new(re, self.c)
    }

    pub fn context(&self, i_d2d: f64) -> ObjectiveContext {
        ObjectiveContext {
            cfg: self.network,
            r_ref: self.geometry.r_ref,
            d: self.geometry.d,
            r0: self.geometry.r0,
            i_d2d,
            re_min: self.re_min,
            re_max: self.re_max,
            c_max: self.c_max,
        }
    }

    /// Checks every downstream invariant, naming the offending key.
    pub fn validate(&self) -> Result<(), ScenarioError> {
        let core = |key: &str, r: exzone_core::Result<()>| r.map_err(|e| bad(key, e.to_string()));
        core("network", self.network.validate())?;
        core("simulation", self.simulation.validate(&self.network))?;
        let g = &self.geometry;
        for (key, v) in [("r_ref", g.r_ref), ("d", g.d), ("r0", g.r0), ("link_dist", g.link_dist)] {
            if !(v > 0.0 && v.is_finite()) {
                return Err(bad(key, "must be positive"));
            }
        }
        if !(self.c >= 1.0 && self.c.is_finite()) {
            return Err(bad("c", "must be at least 1"));
        }
        if self.n_drops == 0 {
            return Err(bad("drops", "need at least one drop"));
        }
        for re in self.re_grid.values() {
            if !(re > 0.0 && re <= self.network.cell_radius) {
                return Err(bad("re_grid", format!("{re} lies outside (0, R_c]")));
            }
        }
        if self.i_d2d.is_empty() || self.i_d2d.iter().any(|&i| !(i > 0.0)) {
            return Err(bad("i_d2d", "need one or more positive budgets"));
        }
        core("re_min", self.context(self.i_d2d[0]).validate())?;
        Ok(())
    }

    /// Canonical text form; `parse_scenario` reads it back unchanged.
    pub fn serialize(&self) -> String {
        let n = &self.network;
        let g = &self.geometry;
        let sim = &self.simulation;
        let mut out = String::new();
        let mut put = |k: &str, v: String| {
            let _ = writeln!(out, "{k} = {v}");
        };
        put("cell_radius", n.cell_radius.to_string());
        put("alpha", n.alpha.to_string());
        put("lambda_b", n.lambda_b.to_string());
        put("a", n.user_ratio.to_string());
        put("p_d", format!("{} W", n.p_d));
        put("antennas", n.antennas.to_string());
        put("sigma2_bs", n.sigma2_bs.to_string());
        put("sigma2_d2d", n.sigma2_d2d.to_string());
        put("training", n.training_mode.as_str().to_string());
        put("pilots", n.pilots.to_string());
        put("r_ref", g.r_ref.to_string());
        put("d", g.d.to_string());
        put("r0", g.r0.to_string());
        put("link_dist", g.link_dist.to_string());
        put("c", self.c.to_string());
        put("re_min", self.re_min.to_string());
        put("re_max", self.re_max.to_string());
        put("c_max", self.c_max.to_string());
        put("re_grid", self.re_grid.to_string());
        put("drops", self.n_drops.to_string());
        put("seed", self.seed.to_string());
        put(
            "i_d2d",
            self.i_d2d
                .iter()
                .map(|i| format!("{i} W"))
                .collect::<Vec<_>>()
                .join(", "),
        );
        match sim.topology {
            Topology::Poisson => put("topology", "poisson".into()),
            Topology::Hexagonal { cell_count } => {
                put("topology", "hexagonal".into());
                put("cell_count", cell_count.to_string());
            }
        }
        put(
            "fading",
            match sim.fading {
                FadingModel::Statistical => "statistical",
                FadingModel::Explicit => "explicit",
            }
            .into(),
        );
        put("region_radius", sim.region_radius.to_string());
        put("copilot_radius", sim.copilot_radius.to_string());
        put("include_noise", sim.include_noise.to_string());
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn empty_document_is_reference_scenario() {
        let s = parse_scenario("").unwrap();
        assert_eq!(s, Scenario::default());
        assert!((s.network.lambda_b - 1.0 / PI).abs() < 1e-15);
        assert_eq!(s.network.user_ratio, 150.0);
        assert_eq!(s.network.alpha, 3.0);
        assert_eq!(s.network.sigma2_d2d, 1e-3);
    }

    #[test]
    fn dbm_power() {
        let s = parse_scenario("p_d = 16 dBm").unwrap();
        assert!((s.network.p_d - 0.0398).abs() < 1e-4);
        let w = parse_scenario("p_d = 39.8107 mW").unwrap();
        assert!((w.network.p_d - s.network.p_d).abs() < 1e-6);
        let e = parse_scenario("p_d = 3.98e-2W").unwrap();
        assert!((e.network.p_d - 0.0398).abs() < 1e-12);
    }

    #[test]
    fn bare_power_is_ambiguous() {
        let e = parse_scenario("p_d = 16").unwrap_err();
        assert!(e.to_string().contains("p_d"), "{e}");
    }

    #[test]
    fn alpha_two_rejected() {
        let e = parse_scenario("alpha = 2").unwrap_err();
        assert!(e.to_string().contains("alpha"), "{e}");
    }

    #[test]
    fn unknown_and_duplicate_keys() {
        assert!(matches!(
            parse_scenario("alpah = 3"),
            Err(ScenarioError::UnknownKey { line: 1, .. })
        ));
        assert!(matches!(
            parse_scenario("a = 1\na = 2"),
            Err(ScenarioError::Duplicate { line: 2, .. })
        ));
        assert!(matches!(
            parse_scenario("just words"),
            Err(ScenarioError::Syntax { line: 1 })
        ));
    }

    #[test]
    fn lambda_b_follows_cell_radius() {
        let s = parse_scenario("cell_radius = 2\nre_grid = 0.4:1.8:0.2\nre_max = 1.8\nd = 1.9").unwrap();
        assert!((s.network.lambda_b - 1.0 / (4.0 * PI)).abs() < 1e-15);
    }

    #[test]
    fn budgets_and_grid() {
        let s = parse_scenario("i_d2d = 12 W, 15 W, 18000 mW\nre_grid = 0.4:0.9:0.1").unwrap();
        assert_eq!(s.i_d2d, vec![12.0, 15.0, 18.0]);
        let v = s.re_grid.values();
        assert_eq!(v.len(), 6);
        assert!((v[5] - 0.9).abs() < 1e-12);
        assert!(parse_scenario("re_grid = 0.0:0.5:0.1").is_err());
        assert!(parse_scenario("re_grid = 0.5:0.4:0.1").is_err());
    }

    #[test]
    fn comments_and_blank_lines() {
        let s = parse_scenario("# header\n\na = 50 # lighter load\n").unwrap();
        assert_eq!(s.network.user_ratio, 50.0);
    }

    #[test]
    fn hexagonal_topology() {
        let s = parse_scenario("topology = hexagonal\ncell_count = 7").unwrap();
        assert_eq!(s.simulation.topology, Topology::Hexagonal { cell_count: 7 });
        assert!(parse_scenario("cell_count = 7").is_err());
    }

    #[test]
    fn serialize_round_trips() {
        let mut s = Scenario::default();
        s.network.p_d = dbm_to_watt(16.0);
        s.simulation.topology = Topology::Hexagonal { cell_count: 19 };
        s.i_d2d = vec![0.1, 1.0 / 3.0];
        assert_eq!(parse_scenario(&s.serialize()).unwrap(), s);
    }
}
