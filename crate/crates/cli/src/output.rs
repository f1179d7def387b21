//! Output files: CSV/JSON tables plus the meta.json that makes every run
//! re-derivable.
//!
//! Floats are written with Rust's shortest round-trip formatting, so
//! identical (config, seed, version) triples produce byte-identical tables.

use crate::config::Config;
use serde::Serialize;
use sha2::{Digest, Sha256};
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

#[derive(Debug, thiserror::Error)]
pub enum OutputError {
    #[error("cannot write {path}: {source}")]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },
    #[error("cannot serialise output: {0}")]
    Serialise(#[from] serde_json::Error),
}

/// Reproducibility envelope written next to every table.
#[derive(Debug, Serialize)]
pub struct Meta {
    pub config: Config,
    pub config_sha256: String,
    pub versions: Versions,
    pub wall_time_secs: f64,
    pub aborted_runs: Vec<u64>,
}

#[derive(Debug, Serialize)]
pub struct Versions {
    pub core: &'static str,
    pub cli: &'static str,
}

impl Meta {
    pub fn new(config: &Config, wall_time_secs: f64, aborted_runs: Vec<u64>) -> Self {
        Self {
            config: config.clone(),
            config_sha256: config_hash(config),
            versions: Versions {
                core: catbbm_core::VERSION,
                cli: env!("CARGO_PKG_VERSION"),
            },
            wall_time_secs,
            aborted_runs,
        }
    }
}

/// SHA-256 of the canonical JSON encoding of the config.
pub fn config_hash(config: &Config) -> String {
    let canonical = serde_json::to_string(config).expect("config serialises");
    let digest = Sha256::digest(canonical.as_bytes());
    digest.iter().map(|b| format!("{b:02x}")).collect()
}

/// Hash of the config with the execution-only fields (parallelism, output
/// location) normalised away: two runs with the same semantic hash produce
/// the same numbers, whatever the thread count.
pub fn semantic_config_hash(config: &Config) -> String {
    let mut semantic = config.clone();
    semantic.parallelism = 0;
    semantic.output_path = PathBuf::new();
    config_hash(&semantic)
}

pub fn write_meta(dir: &Path, meta: &Meta) -> Result<PathBuf, OutputError> {
    write_json(dir, "meta.json", meta)
}

pub fn write_json<T: Serialize>(dir: &Path, name: &str, value: &T) -> Result<PathBuf, OutputError> {
    let path = dir.join(name);
    let mut text = serde_json::to_string_pretty(value)?;
    text.push('\n');
    write_bytes(&path, text.as_bytes())?;
    Ok(path)
}

/// Writes a CSV table with the given header; each row is already formatted.
pub fn write_csv(
    dir: &Path,
    name: &str,
    header: &str,
    rows: impl Iterator<Item = String>,
) -> Result<PathBuf, OutputError> {
    let path = dir.join(name);
    let mut buf = String::with_capacity(4096);
    buf.push_str(header);
    buf.push('\n');
    for row in rows {
        buf.push_str(&row);
        buf.push('\n');
    }
    write_bytes(&path, buf.as_bytes())?;
    Ok(path)
}

fn write_bytes(path: &Path, bytes: &[u8]) -> Result<(), OutputError> {
    let io = |source| OutputError::Io {
        path: path.to_path_buf(),
        source,
    };
    if let Some(parent) = path.parent() {
        if !parent.as_os_str().is_empty() {
            fs::create_dir_all(parent).map_err(io)?;
        }
    }
    let mut f = fs::File::create(path).map_err(io)?;
    f.write_all(bytes).map_err(io)
}

/// Shortest round-trip decimal for a float, `NaN`-free by construction in the
/// tables we emit; optional values render as the empty cell.
pub fn fmt_f64(v: f64) -> String {
    format!("{v}")
}

pub fn fmt_opt(v: Option<f64>) -> String {
    v.map(fmt_f64).unwrap_or_default()
}
