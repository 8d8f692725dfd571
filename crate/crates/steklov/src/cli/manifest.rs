//! Run manifests: the reproducibility record written before any numerics.
//!
//! A manifest captures the exact invocation (argument vector), the resolved
//! parameter set including every default, the artifact version, a wall-clock
//! timestamp, and the output paths the run will produce. Re-executing the
//! stored argument vector reproduces the numeric payloads byte-for-byte
//! (the timestamp lives only here, never in result files). A manifest is
//! written eagerly so a crashed run still leaves a parseable record.

use crate::error::Result;
use serde::{Deserialize, Serialize};
use std::path::{Path, PathBuf};

/// Resolved parameters of a run; unused fields stay `None` for commands
/// that do not take them.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, Default)]
pub struct ManifestParams {
    pub n: Option<u32>,
    pub q: Option<f64>,
    pub a: Option<f64>,
    pub a_min: Option<f64>,
    pub a_max: Option<f64>,
    pub steps: Option<usize>,
    pub s: Option<f64>,
    pub l: Option<usize>,
    pub m: Option<usize>,
    pub tol: Option<f64>,
    pub seed: Option<u64>,
    pub seeds: Option<usize>,
    pub jobs: Option<usize>,
    pub init: Option<String>,
    pub method: Option<String>,
    pub trials: Option<usize>,
}

/// The on-disk record of one command invocation.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunManifest {
    /// Crate version that produced the artifact.
    pub artifact_version: String,
    /// Subcommand name.
    pub command: String,
    /// Full argument vector (binary path first); rerunning `argv[1..]`
    /// against the same binary reproduces the numeric payloads.
    pub argv: Vec<String>,
    /// Resolved parameters, defaults included.
    pub parameters: ManifestParams,
    /// Milliseconds since the Unix epoch at invocation.
    pub timestamp_unix_ms: u64,
    /// Files the run writes (besides this manifest).
    pub output_paths: Vec<String>,
}

impl RunManifest {
    /// Assemble a manifest stamped with the current wall clock.
    pub fn new(command: &str, argv: Vec<String>, parameters: ManifestParams, outputs: &[&Path]) -> Self {
        let timestamp_unix_ms = std::time::SystemTime::now()
            .duration_since(std::time::UNIX_EPOCH)
            .map(|d| d.as_millis() as u64)
            .unwrap_or(0);
        RunManifest {
            artifact_version: env!("CARGO_PKG_VERSION").to_string(),
            command: command.to_string(),
            argv,
            parameters,
            timestamp_unix_ms,
            output_paths: outputs
                .iter()
                .map(|p| p.to_string_lossy().into_owned())
                .collect(),
        }
    }

    /// Write as pretty JSON (serde round-trips this type losslessly).
    pub fn write(&self, path: &Path) -> Result<()> {
        let body = serde_json::to_string_pretty(self)?;
        std::fs::write(path, body + "\n")?;
        Ok(())
    }

    /// Read a manifest back.
    pub fn read(path: &Path) -> Result<Self> {
        let body = std::fs::read_to_string(path)?;
        Ok(serde_json::from_str(&body)?)
    }
}

/// Manifest path belonging to an artifact: `r.json` -> `r.manifest.json`.
pub fn manifest_path_for(artifact: &Path) -> PathBuf {
    artifact.with_extension("manifest.json")
}
