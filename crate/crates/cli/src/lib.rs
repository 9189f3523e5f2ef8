//! Configuration ingestion, scenario dispatch, and report emission for the
//! torsionlab experiment suite.

use serde::{Deserialize, Serialize};
use std::path::{Path, PathBuf};
use torsionlab::experiments::{
    default_t_grid, run_circle_metric, run_coupled_trace, run_eigencon, run_gluing,
    run_interval_metric, run_product, run_supertrace, write_report, ExperimentReport, YModel,
    DEFAULT_GRIDS,
};
use torsionlab::{Error, Result};

/// Log-spaced heat-time grid specification.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TGridSpec {
    pub min: f64,
    pub max: f64,
    pub points: usize,
}

impl Default for TGridSpec {
    fn default() -> Self {
        TGridSpec {
            min: 1e-2,
            max: 10.0,
            points: 60,
        }
    }
}

impl TGridSpec {
    pub fn values(&self) -> Vec<f64> {
        if self.points < 2 {
            return vec![self.min];
        }
        let (lo, hi) = (self.min.ln(), self.max.ln());
        (0..self.points)
            .map(|i| (lo + (hi - lo) * i as f64 / (self.points - 1) as f64).exp())
            .collect()
    }
}

fn default_length() -> f64 {
    8.0
}
fn default_cuts() -> Vec<f64> {
    vec![4.0, 3.0]
}
fn default_ranks() -> Vec<usize> {
    vec![1, 2]
}
fn default_k_max() -> usize {
    10
}
fn default_grids() -> [usize; 3] {
    DEFAULT_GRIDS
}
fn default_n() -> usize {
    2000
}
fn default_out() -> PathBuf {
    PathBuf::from("out")
}

/// A validated scenario run request. Unknown keys are rejected; every field
/// except `scenario` has a documented default.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub scenario: String,
    /// Circle circumference for the glued geometries.
    #[serde(default = "default_length")]
    pub length: f64,
    /// Cut positions l1 for the gluing scenario (l2 = length - l1).
    #[serde(default = "default_cuts")]
    pub cuts: Vec<f64>,
    #[serde(default = "default_ranks")]
    pub rank_levels: Vec<usize>,
    /// Deformation strengths; empty means the scenario's default sweep.
    #[serde(default, rename = "T_list")]
    pub t_list: Vec<f64>,
    #[serde(default = "default_k_max")]
    pub k_max: usize,
    /// Richardson grid ladder (ascending).
    #[serde(default = "default_grids")]
    pub grids: [usize; 3],
    #[serde(default)]
    pub t_grid: TGridSpec,
    /// Finite-difference grid size for single-grid scenarios.
    #[serde(default = "default_n")]
    pub n: usize,
    #[serde(default)]
    pub seed: u64,
    #[serde(default = "default_out")]
    pub output_dir: PathBuf,
}

pub const SCENARIOS: [&str; 7] = [
    "eigencon",
    "supertrace",
    "circle-metric",
    "interval-metric",
    "gluing",
    "coupled-trace",
    "product",
];

impl RunConfig {
    pub fn minimal(scenario: &str) -> Self {
        serde_json::from_value(serde_json::json!({ "scenario": scenario }))
            .expect("defaults are complete")
    }

    fn validate(&self, path: &str) -> Result<()> {
        let fail = |field: &str, message: String| {
            Err(Error::Config {
                path: format!("{path}:{field}"),
                message,
            })
        };
        if !(self.length > 0.0) {
            return fail("length", format!("must be positive, got {}", self.length));
        }
        for &c in &self.cuts {
            if !(c > 0.0 && c < self.length) {
                return fail("cuts", format!("cut {c} outside (0, {})", self.length));
            }
        }
        if self.t_list.iter().any(|&t| !(t >= 0.0) || t > 1e4) {
            return fail("T_list", "strengths must lie in [0, 1e4]".into());
        }
        if self.k_max == 0 || self.k_max > 64 {
            return fail("k_max", format!("must be in 1..=64, got {}", self.k_max));
        }
        if !(self.grids[0] >= 100 && self.grids[0] < self.grids[1] && self.grids[1] < self.grids[2])
        {
            return fail("grids", format!("need ascending sizes >= 100, got {:?}", self.grids));
        }
        if self.n < 100 || self.n > 100_000 {
            return fail("n", format!("must be in 100..=100000, got {}", self.n));
        }
        if !(self.t_grid.min > 0.0 && self.t_grid.max > self.t_grid.min) {
            return fail("t_grid", "need 0 < min < max".into());
        }
        if self.t_grid.points == 0 || self.t_grid.points > 10_000 {
            return fail("t_grid", format!("points must be in 1..=10000, got {}", self.t_grid.points));
        }
        Ok(())
    }

    /// Strength sweep, falling back to the scenario's default.
    fn strengths(&self, default: &[f64]) -> Vec<f64> {
        if self.t_list.is_empty() {
            default.to_vec()
        } else {
            self.t_list.clone()
        }
    }
}

/// Load and validate a JSON config; unknown keys are rejected with the
/// offending key named.
pub fn parse_config(path: &Path) -> Result<RunConfig> {
    let text = std::fs::read_to_string(path)?;
    let config: RunConfig = serde_json::from_str(&text).map_err(|e| Error::Config {
        path: path.display().to_string(),
        message: e.to_string(),
    })?;
    config.validate(&path.display().to_string())?;
    Ok(config)
}

/// Run one scenario and return its report.
pub fn run_scenario(config: &RunConfig) -> Result<ExperimentReport> {
    match config.scenario.as_str() {
        "eigencon" => run_eigencon(
            &config.strengths(&[4.0, 8.0, 16.0, 32.0]),
            config.k_max,
            config.grids,
        ),
        "supertrace" => run_supertrace(
            &config.strengths(&[0.0, 4.0, 16.0]),
            &[0.1, 1.0, 10.0],
            config.n,
        ),
        "circle-metric" => {
            run_circle_metric(&config.strengths(&[0.0, 2.0, 4.0, 6.0, 8.0]), config.grids)
        }
        "interval-metric" => run_interval_metric(&config.strengths(&[0.0, 2.0, 4.0, 6.0])),
        "gluing" => run_gluing(config.length, &config.cuts, &config.rank_levels),
        "coupled-trace" => {
            // The coupled trace is defined for t <= 1; restrict the grid.
            let ts: Vec<f64> = if config.t_list.is_empty() && config.t_grid.points == 60 {
                vec![0.2, 0.35, 0.6, 1.0]
            } else {
                config
                    .t_grid
                    .values()
                    .into_iter()
                    .filter(|&t| t <= 1.0)
                    .collect()
            };
            run_coupled_trace(&config.strengths(&[4.0, 16.0, 64.0]), &ts, config.n)
        }
        "product" => {
            let ts: Vec<f64> = if config.t_grid.points == 60 {
                default_t_grid()
            } else {
                config.t_grid.values()
            };
            let strength = config.t_list.first().copied().unwrap_or(8.0);
            // Both fiber models: the chi = 0 circle (vanishing) and the
            // chi = 2 point pair (doubling).
            let a = run_product(&YModel::two_points(1), strength, &ts, config.n)?;
            let b = run_product(&YModel::circle(1.0, 16, 1), strength, &ts, config.n)?;
            let mut rows = a.rows;
            rows.extend(b.rows);
            Ok(ExperimentReport {
                scenario: a.scenario,
                verdict: if rows.iter().all(|r| r.pass) {
                    torsionlab::experiments::Verdict::Pass
                } else {
                    torsionlab::experiments::Verdict::Fail
                },
                rows,
            })
        }
        other => Err(Error::UnknownScenario(other.to_string())),
    }
}

/// Run the scenario, write `<output_dir>/<scenario>.csv` and `.json`, and
/// print a verdict table. Exit status: 0 on pass, 1 on failing rows,
/// 2 for an unknown scenario.
pub fn dispatch(config: &RunConfig) -> i32 {
    let scenarios: Vec<String> = if config.scenario == "golden" {
        SCENARIOS.iter().map(|s| s.to_string()).collect()
    } else {
        vec![config.scenario.clone()]
    };
    let mut all_pass = true;
    println!("{:<16} {:>6} {:>6}  verdict", "scenario", "rows", "fail");
    for name in &scenarios {
        let mut c = config.clone();
        c.scenario = name.clone();
        if config.scenario == "golden" {
            c.t_list.clear(); // golden always runs the default sweeps
        }
        let report = match run_scenario(&c) {
            Ok(r) => r,
            Err(Error::UnknownScenario(s)) => {
                eprintln!("unknown scenario '{s}' (expected one of {SCENARIOS:?} or golden)");
                return 2;
            }
            Err(e) => {
                eprintln!("scenario {name} failed to run: {e}");
                return 1;
            }
        };
        match write_report(&report, &config.output_dir) {
            Ok(_) => {}
            Err(e) => {
                eprintln!("could not write report for {name}: {e}");
                return 1;
            }
        }
        let failing: Vec<_> = report.rows.iter().filter(|r| !r.pass).collect();
        println!(
            "{:<16} {:>6} {:>6}  {}",
            report.scenario,
            report.rows.len(),
            failing.len(),
            if report.passed() { "pass" } else { "FAIL" }
        );
        for r in failing {
            let params: Vec<String> = r
                .parameters
                .iter()
                .map(|(k, v)| format!("{k}={}", serde_json::to_string(v).unwrap_or_default()))
                .collect();
            println!(
                "    FAIL {} measured={:.6e} target={:.6e} residual={:+.3e} err={:.1e} {}",
                params.join(" "),
                r.measured,
                r.target,
                r.residual,
                r.error_estimate,
                r.note
            );
        }
        all_pass &= report.passed();
    }
    if all_pass {
        0
    } else {
        1
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn minimal_config_gets_defaults() {
        let c: RunConfig = serde_json::from_str(r#"{"scenario":"gluing"}"#).unwrap();
        assert_eq!(c.length, 8.0);
        assert_eq!(c.cuts, vec![4.0, 3.0]);
        assert_eq!(c.grids, DEFAULT_GRIDS);
        assert_eq!(c.t_grid.points, 60);
        assert_eq!(c.seed, 0);
    }

    #[test]
    fn unknown_key_is_named() {
        let err = serde_json::from_str::<RunConfig>(r#"{"scenario":"gluing","Tlist":[4]}"#)
            .unwrap_err()
            .to_string();
        assert!(err.contains("Tlist"), "{err}");
    }

    #[test]
    fn t_list_round_trips() {
        let c: RunConfig =
            serde_json::from_str(r#"{"scenario":"eigencon","T_list":[4,8,16,32]}"#).unwrap();
        assert_eq!(c.t_list, vec![4.0, 8.0, 16.0, 32.0]);
        let back = serde_json::to_value(&c).unwrap();
        assert_eq!(back["T_list"], serde_json::json!([4.0, 8.0, 16.0, 32.0]));
    }

    #[test]
    fn unknown_scenario_exits_2() {
        let mut c = RunConfig::minimal("gluing");
        c.scenario = "torsion-disco".into();
        let dir = tempfile::tempdir().unwrap();
        c.output_dir = dir.path().to_path_buf();
        assert_eq!(dispatch(&c), 2);
    }

    #[test]
    fn out_of_range_field_errors_with_path() {
        let mut c = RunConfig::minimal("gluing");
        c.k_max = 0;
        let err = c.validate("cfg.json").unwrap_err().to_string();
        assert!(err.contains("cfg.json:k_max"), "{err}");
    }

    #[test]
    fn gluing_dispatch_writes_byte_identical_csv() {
        let mut c = RunConfig::minimal("gluing");
        let dir = tempfile::tempdir().unwrap();
        c.output_dir = dir.path().to_path_buf();
        assert_eq!(dispatch(&c), 0);
        let first = std::fs::read(dir.path().join("gluing.csv")).unwrap();
        assert_eq!(dispatch(&c), 0);
        let second = std::fs::read(dir.path().join("gluing.csv")).unwrap();
        assert_eq!(first, second);
        assert!(dir.path().join("gluing.json").exists());
        assert!(!first.contains(&b'\r'));
    }
}
