//! The run manifest: what was executed, what came out, and whether to trust
//! it. Every listed output exists at write time and carries its SHA-256;
//! the exit-status contract (0 iff every run succeeded) is decided here.

use crate::error::CliError;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use std::fs::File;
use std::io::{BufWriter, Read};
use std::path::{Path, PathBuf};
use std::time::{SystemTime, UNIX_EPOCH};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum RunState {
    Ok,
    Failed,
    Cancelled,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct RunStatus {
    pub name: String,
    pub status: RunState,
    /// Empty on success; error text or partial-output note otherwise.
    pub detail: String,
    pub wall_seconds: f64,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct OutputFile {
    /// Relative to the output directory holding the manifest.
    pub path: String,
    pub bytes: u64,
    pub sha256: String,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct RunManifest {
    pub tool: String,
    pub version: String,
    pub subcommand: String,
    /// Hash of the effective config (after overrides), as fixed-width hex.
    pub config_hash: String,
    pub seed_offset: u64,
    pub threads: usize,
    pub started_unix: f64,
    pub finished_unix: f64,
    /// True when a shutdown signal arrived before the queue drained.
    pub interrupted: bool,
    pub runs: Vec<RunStatus>,
    pub outputs: Vec<OutputFile>,
}

pub fn unix_now() -> f64 {
    SystemTime::now().duration_since(UNIX_EPOCH).map(|d| d.as_secs_f64()).unwrap_or(0.0)
}

pub fn sha256_hex(path: &Path) -> std::io::Result<String> {
    let mut f = File::open(path)?;
    let mut hasher = Sha256::new();
    let mut buf = [0u8; 64 * 1024];
    loop {
        let n = f.read(&mut buf)?;
        if n == 0 {
            break;
        }
        hasher.update(&buf[..n]);
    }
    Ok(format!("{:x}", hasher.finalize()))
}

impl RunManifest {
    pub fn new(subcommand: &str, config_hash: u64, seed_offset: u64, threads: usize) -> Self {
        RunManifest {
            tool: "anderson".to_string(),
            version: env!("CARGO_PKG_VERSION").to_string(),
            subcommand: subcommand.to_string(),
            config_hash: format!("{config_hash:016x}"),
            seed_offset,
            threads,
            started_unix: unix_now(),
            finished_unix: 0.0,
            interrupted: false,
            runs: Vec::new(),
            outputs: Vec::new(),
        }
    }

    /// Checksums `files` (relative to `out_dir`) into the output list. A
    /// listed file that cannot be read is a hard error: the manifest must
    /// never name an output it cannot vouch for.
    pub fn record_outputs(&mut self, out_dir: &Path, files: &[PathBuf]) -> Result<(), CliError> {
        for rel in files {
            let full = out_dir.join(rel);
            let meta = std::fs::metadata(&full).map_err(|e| CliError::Io {
                context: format!("stat output {}", full.display()),
                source: e,
            })?;
            let sha256 = sha256_hex(&full).map_err(|e| CliError::Io {
                context: format!("checksum output {}", full.display()),
                source: e,
            })?;
            self.outputs.push(OutputFile {
                path: rel.to_string_lossy().into_owned(),
                bytes: meta.len(),
                sha256,
            });
        }
        Ok(())
    }

    pub fn all_succeeded(&self) -> bool {
        self.runs.iter().all(|r| r.status == RunState::Ok)
    }

    pub fn write(&self, path: &Path) -> Result<(), CliError> {
        let f = File::create(path).map_err(|e| CliError::Io {
            context: format!("create manifest {}", path.display()),
            source: e,
        })?;
        serde_json::to_writer_pretty(BufWriter::new(f), self)
            .map_err(|e| CliError::Core(e.into()))?;
        Ok(())
    }
}
