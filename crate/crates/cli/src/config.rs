//! Run configuration: flag values, config-file loading, and the y-grid
//! `a:b:step` notation.

use serde::{Deserialize, Serialize};
use std::path::{Path, PathBuf};
use thiserror::Error;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum OutputFormat {
    Csv,
    Json,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum CommandKind {
    Simulate,
    Oracle,
    Verify,
    Theorem1,
    Prop6,
}

/// Everything a run needs; serialised verbatim into meta.json so any output
/// can be re-derived from its own metadata.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Config {
    pub command: CommandKind,
    pub beta: f64,
    pub x0: f64,
    pub t: f64,
    pub n_runs: u64,
    pub seed: u64,
    /// Observation times for `simulate`; empty means the horizon only.
    #[serde(default)]
    pub snapshot_times: Vec<f64>,
    /// Offsets y from the front βt/2 (levels for `oracle`, the evaluation
    /// grid for `theorem1`, thresholds z for `prop6`).
    pub y_grid: Vec<f64>,
    /// Intermediate martingale time; defaults to t/5 when omitted.
    pub s_intermediate: Option<f64>,
    pub population_cap: u64,
    /// 0 means one worker per core.
    pub parallelism: usize,
    pub output_path: PathBuf,
    pub output_format: OutputFormat,
    /// Scales every verification tolerance; below 1 tightens the suite.
    pub tolerance_scale: f64,
    /// Shrinks the verify ensembles to smoke-test size.
    pub quick: bool,
    /// Skip the limit-law criteria (7 and 8) in `verify`.
    pub skip_limit_laws: bool,
    /// Dump per-run genealogies from `simulate` (intended for small runs).
    pub genealogy: bool,
}

impl Config {
    pub fn defaults(command: CommandKind) -> Self {
        Self {
            command,
            beta: 1.0,
            x0: 0.0,
            t: 4.0,
            n_runs: 1_000,
            seed: 61,
            snapshot_times: Vec::new(),
            y_grid: parse_grid("-1:4:0.5").expect("default grid parses"),
            s_intermediate: None,
            population_cap: catbbm_core::DEFAULT_POPULATION_CAP,
            parallelism: 0,
            output_path: PathBuf::from("."),
            output_format: OutputFormat::Csv,
            tolerance_scale: 1.0,
            quick: false,
            skip_limit_laws: false,
            genealogy: false,
        }
    }

    /// The intermediate martingale time actually used.
    pub fn resolved_s_intermediate(&self) -> f64 {
        self.s_intermediate.unwrap_or(self.t / 5.0)
    }

    pub fn validate(&self) -> Result<(), ConfigError> {
        catbbm_core::ModelParams::new(self.beta, self.x0, self.t)
            .map_err(|e| ConfigError::Invalid(e.to_string()))?;
        if self.n_runs == 0 {
            return Err(ConfigError::Invalid("n_runs must be at least 1".into()));
        }
        if self.y_grid.is_empty() {
            return Err(ConfigError::Invalid("y grid must be nonempty".into()));
        }
        if self.y_grid.windows(2).any(|w| w[0] > w[1]) {
            return Err(ConfigError::Invalid("y grid must be sorted".into()));
        }
        let s = self.resolved_s_intermediate();
        if !(s >= 0.0 && s <= self.t) {
            return Err(ConfigError::Invalid(format!(
                "s_intermediate {s} outside [0, t = {}]",
                self.t
            )));
        }
        if self.snapshot_times.windows(2).any(|w| w[0] > w[1])
            || self
                .snapshot_times
                .iter()
                .any(|&s| !(0.0..=self.t).contains(&s))
        {
            return Err(ConfigError::Invalid(
                "snapshot times must be sorted within [0, t]".into(),
            ));
        }
        if !(self.tolerance_scale > 0.0) {
            return Err(ConfigError::Invalid(
                "tolerance scale must be positive".into(),
            ));
        }
        Ok(())
    }
}

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("invalid configuration: {0}")]
    Invalid(String),
    #[error("cannot parse grid '{0}': expected a:b:step with step > 0 and b ≥ a")]
    BadGrid(String),
    #[error("cannot read config file: {0}")]
    Io(#[from] std::io::Error),
    #[error("cannot parse config file: {0}")]
    Parse(#[from] serde_json::Error),
}

/// Parses the `a:b:step` grid notation into an inclusive ascending grid.
pub fn parse_grid(spec: &str) -> Result<Vec<f64>, ConfigError> {
    let parts: Vec<&str> = spec.split(':').collect();
    let bad = || ConfigError::BadGrid(spec.to_string());
    if parts.len() != 3 {
        return Err(bad());
    }
    let a: f64 = parts[0].parse().map_err(|_| bad())?;
    let b: f64 = parts[1].parse().map_err(|_| bad())?;
    let step: f64 = parts[2].parse().map_err(|_| bad())?;
    if !(step > 0.0) || b < a || !a.is_finite() || !b.is_finite() {
        return Err(bad());
    }
    let n = ((b - a) / step).round() as usize;
    let mut grid: Vec<f64> = (0..=n)
        .map(|i| a + i as f64 * step)
        .filter(|&y| y <= b + 1e-12 * step)
        .collect();
    if grid.is_empty() {
        grid.push(a);
    }
    Ok(grid)
}

/// Loads a config file: either a bare `Config` or a meta.json produced by an
/// earlier run (the `config` field is used, everything else ignored).
pub fn load_config_file(path: &Path) -> Result<Config, ConfigError> {
    let text = std::fs::read_to_string(path)?;
    let value: serde_json::Value = serde_json::from_str(&text)?;
    let config_value = match value.get("config") {
        Some(inner) => inner.clone(),
        None => value,
    };
    Ok(serde_json::from_value(config_value)?)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn grid_notation_is_inclusive() {
        assert_eq!(
            parse_grid("0:2:0.5").unwrap(),
            vec![0.0, 0.5, 1.0, 1.5, 2.0]
        );
        assert_eq!(parse_grid("1:1:0.5").unwrap(), vec![1.0]);
        assert_eq!(parse_grid("-1:1:1").unwrap(), vec![-1.0, 0.0, 1.0]);
        assert!(parse_grid("1:0:0.5").is_err());
        assert!(parse_grid("0:1:0").is_err());
        assert!(parse_grid("nonsense").is_err());
    }

    #[test]
    fn validation_guards_the_obvious() {
        let mut c = Config::defaults(CommandKind::Simulate);
        assert!(c.validate().is_ok());
        c.n_runs = 0;
        assert!(c.validate().is_err());
        c.n_runs = 10;
        c.beta = -1.0;
        assert!(c.validate().is_err());
        c.beta = 1.0;
        c.s_intermediate = Some(10.0);
        assert!(c.validate().is_err());
    }

    #[test]
    fn config_round_trips_through_json() {
        let c = Config::defaults(CommandKind::Oracle);
        let text = serde_json::to_string_pretty(&c).unwrap();
        let back: Config = serde_json::from_str(&text).unwrap();
        assert_eq!(c, back);
    }
}
