//! Run manifests and JSON output helpers.

use std::path::{Path, PathBuf};
use std::time::{Instant, SystemTime, UNIX_EPOCH};

use serde::Serialize;
use sha2::{Digest, Sha256};
use solwave_core::groundstate::GridSpec;
use solwave_core::{PhysicalParams, ReducedParams};

use crate::exit::CliError;

pub const MANIFEST_FILE: &str = "manifest.json";

pub fn sha256_hex(bytes: &[u8]) -> String {
    Sha256::digest(bytes).iter().map(|b| format!("{b:02x}")).collect()
}

#[derive(Clone, Debug, Serialize)]
pub struct Parameters {
    pub physical: PhysicalParams,
    pub reduced: ReducedParams,
}

#[derive(Clone, Debug, Serialize)]
pub struct Timings {
    pub started_unix: f64,
    pub wall_seconds: f64,
}

/// Record of one run. Everything except `timings` depends only on the inputs.
#[derive(Clone, Debug, Serialize)]
pub struct RunManifest {
    pub subcommand: String,
    pub parameters: Parameters,
    pub grid: GridSpec,
    /// Remaining resolved inputs of the subcommand.
    pub inputs: serde_json::Value,
    /// SHA-256 of the serialized `parameters`, `grid` and `inputs`.
    pub config_hash: String,
    /// SHA-256 of the config file, when one was given.
    pub config_file_hash: Option<String>,
    /// Files written by the run, relative to the manifest's directory.
    pub outputs: Vec<String>,
    pub status: String,
    pub exit_code: i32,
    pub message: Option<String>,
    pub timings: Timings,
}

pub struct Clock {
    started: SystemTime,
    instant: Instant,
}

impl Clock {
    pub fn start() -> Clock {
        Clock { started: SystemTime::now(), instant: Instant::now() }
    }

    pub fn timings(&self) -> Timings {
        Timings {
            started_unix: self.started.duration_since(UNIX_EPOCH).map(|d| d.as_secs_f64()).unwrap_or(0.0),
            wall_seconds: self.instant.elapsed().as_secs_f64(),
        }
    }
}

impl RunManifest {
    pub fn new(
        subcommand: &str,
        parameters: Parameters,
        grid: GridSpec,
        inputs: serde_json::Value,
        config_file_hash: Option<String>,
    ) -> RunManifest {
        let hashed = serde_json::json!({ "parameters": &parameters, "grid": grid, "inputs": &inputs });
        let config_hash = sha256_hex(serde_json::to_string(&hashed).unwrap_or_default().as_bytes());
        RunManifest {
            subcommand: subcommand.to_string(),
            parameters,
            grid,
            inputs,
            config_hash,
            config_file_hash,
            outputs: Vec::new(),
            status: "pending".into(),
            exit_code: 0,
            message: None,
            timings: Timings { started_unix: 0.0, wall_seconds: 0.0 },
        }
    }

    pub fn finish(&mut self, clock: &Clock, result: &Result<(), CliError>) {
        self.timings = clock.timings();
        match result {
            Ok(()) => {
                self.status = "ok".into();
                self.exit_code = 0;
            }
            Err(e) => {
                self.status = status_name(e.code).into();
                self.exit_code = e.code;
                self.message = Some(e.message.clone());
            }
        }
    }

    pub fn write(&self, dir: &Path) -> Result<PathBuf, CliError> {
        let path = dir.join(MANIFEST_FILE);
        write_json(&path, self)?;
        Ok(path)
    }
}

pub fn status_name(code: i32) -> &'static str {
    match code {
        crate::exit::OK => "ok",
        crate::exit::USAGE => "invalid",
        crate::exit::BLOCKED => "blocked",
        crate::exit::NO_CONVERGENCE => "no-convergence",
        crate::exit::VERIFY_FAILED => "verify-failed",
        _ => "failed",
    }
}

pub fn ensure_dir(dir: &Path) -> Result<(), CliError> {
    std::fs::create_dir_all(dir).map_err(|e| CliError::io(dir, e))
}

pub fn write_json<T: Serialize + ?Sized>(path: &Path, value: &T) -> Result<(), CliError> {
    let mut text = serde_json::to_string_pretty(value).map_err(|e| CliError::io(path, e))?;
    text.push('\n');
    std::fs::write(path, text).map_err(|e| CliError::io(path, e))
}

pub fn write_text(path: &Path, text: &str) -> Result<(), CliError> {
    std::fs::write(path, text).map_err(|e| CliError::io(path, e))
}
