//! Batch front end for the correlation engines.
//!
//! A run is described by a [`RunConfig`] (TOML file plus command-line overrides). [`run`]
//! executes it and returns the artifacts, which [`write_artifacts`] stores under the output
//! directory. Every artifact carries the SHA-256 hash of the configuration, and identical
//! configurations give byte-identical artifacts.

pub mod commands;
pub mod config;

pub use config::{parse_complex, Command, Engine, OutputConfig, RunConfig, Suite, OUT_DIR_ENV};

use serde::Serialize;
use std::path::PathBuf;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    /// Invalid configuration or unusable output location.
    #[error("configuration error: {0}")]
    Config(String),
    /// An engine failed, or a validation suite did not pass.
    #[error("numerical failure: {0}")]
    Numerical(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) => 2,
            CliError::Numerical(_) => 3,
        }
    }
}

impl From<engines::EngineError> for CliError {
    fn from(e: engines::EngineError) -> Self {
        match e {
            engines::EngineError::InvalidParameter(m) => CliError::Config(m),
            other => CliError::Numerical(other.to_string()),
        }
    }
}

/// One output file: name relative to the output directory, and its contents.
#[derive(Debug, Clone, PartialEq)]
pub struct Artifact {
    pub name: String,
    pub contents: String,
}

/// Everything a run produced.
#[derive(Debug, Clone, PartialEq)]
pub struct RunReport {
    pub config_hash: String,
    /// Human-readable summary for the terminal.
    pub summary: String,
    pub artifacts: Vec<Artifact>,
    /// False when a validation suite has failing rows.
    pub passed: bool,
}

/// The JSON envelope shared by every command.
#[derive(Serialize)]
struct Record<'a, T: Serialize> {
    tool: &'static str,
    version: &'static str,
    config_hash: &'a str,
    config: &'a RunConfig,
    result: T,
}

pub(crate) fn json_artifact<T: Serialize>(cfg: &RunConfig, hash: &str, result: T) -> Result<Artifact, CliError> {
    let record = Record { tool: "ncorr", version: env!("CARGO_PKG_VERSION"), config_hash: hash, config: cfg, result };
    let mut contents = serde_json::to_string_pretty(&record).map_err(|e| CliError::Numerical(e.to_string()))?;
    contents.push('\n');
    Ok(Artifact { name: format!("{}.json", cfg.prefix()), contents })
}

/// A CSV file whose first line is a `# config_hash=…` comment.
pub(crate) fn csv_artifact(name: String, hash: &str, header: &[&str], rows: Vec<Vec<String>>) -> Result<Artifact, CliError> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(header).map_err(|e| CliError::Numerical(e.to_string()))?;
    for row in rows {
        w.write_record(&row).map_err(|e| CliError::Numerical(e.to_string()))?;
    }
    let body = String::from_utf8(w.into_inner().map_err(|e| CliError::Numerical(e.to_string()))?)
        .map_err(|e| CliError::Numerical(e.to_string()))?;
    Ok(Artifact { name, contents: format!("# config_hash={hash}\n{body}") })
}

/// Validates the configuration and executes its command.
pub fn run(cfg: &RunConfig) -> Result<RunReport, CliError> {
    cfg.validate()?;
    let hash = cfg.hash();
    log::info!("{} with config hash {hash}", cfg.command.name());
    match cfg.command {
        Command::Sample => commands::sample(cfg, hash),
        Command::Paircorr => commands::paircorr(cfg, hash),
        Command::Ratios => commands::ratios(cfg, hash),
        Command::Jstar => commands::jstar(cfg, hash),
        Command::Ncorr => commands::ncorr(cfg, hash),
        Command::Validate => commands::validate(cfg, hash),
    }
}

/// Writes the artifacts under `dir`, creating it if needed, and returns the paths.
pub fn write_artifacts(dir: &std::path::Path, artifacts: &[Artifact]) -> Result<Vec<PathBuf>, CliError> {
    std::fs::create_dir_all(dir).map_err(|e| CliError::Config(format!("{}: {e}", dir.display())))?;
    artifacts
        .iter()
        .map(|a| {
            let path = dir.join(&a.name);
            std::fs::write(&path, &a.contents).map_err(|e| CliError::Config(format!("{}: {e}", path.display())))?;
            Ok(path)
        })
        .collect()
}
