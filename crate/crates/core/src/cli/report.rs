use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use serde::Serialize;
use serde_json::Value;
use sha2::{Digest, Sha256};

use crate::error::{Error, Result, Warning};
use crate::io;

#[derive(Debug, Clone, Serialize)]
pub struct OutputFile {
    pub path: String,
    pub bytes: u64,
    pub sha256: String,
}

#[derive(Debug, Clone, Serialize)]
pub struct ReportedError {
    pub code: &'static str,
    pub message: String,
}

/// Everything a run produced, written as `report.json` next to the outputs.
#[derive(Debug, Clone, Serialize)]
pub struct RunReport {
    pub command: Vec<String>,
    pub config: BTreeMap<String, Value>,
    pub config_hash: String,
    pub residuals: BTreeMap<String, f64>,
    pub warnings: Vec<Warning>,
    pub error: Option<ReportedError>,
    pub wall_time_seconds: f64,
    pub outputs: Vec<OutputFile>,
    pub exit_code: i32,
}

/// Collects outputs, residuals and warnings while a command runs.
#[derive(Debug, Default)]
pub struct Recorder {
    pub out_dir: PathBuf,
    pub residuals: BTreeMap<String, f64>,
    pub warnings: Vec<Warning>,
    pub outputs: Vec<OutputFile>,
    /// Set when a check ran to completion but did not pass.
    pub failed: bool,
}

impl Recorder {
    pub fn new(out_dir: PathBuf) -> Self {
        Self {
            out_dir,
            ..Self::default()
        }
    }

    pub fn path(&self, name: &str) -> PathBuf {
        self.out_dir.join(name)
    }

    pub fn residual(&mut self, name: &str, value: f64) {
        self.residuals.insert(name.to_string(), value);
    }

    /// Adds warnings, dropping exact repeats.
    pub fn warn(&mut self, ws: impl IntoIterator<Item = Warning>) {
        for w in ws {
            if !self.warnings.contains(&w) {
                self.warnings.push(w);
            }
        }
    }

    pub fn text(&mut self, name: &str, text: &str) -> Result<()> {
        let path = self.path(name);
        io::write_text(&path, text)?;
        self.track(&path)
    }

    pub fn json(&mut self, name: &str, value: &impl Serialize) -> Result<()> {
        let path = self.path(name);
        io::write_json(&path, value)?;
        self.track(&path)
    }

    pub fn track(&mut self, path: &Path) -> Result<()> {
        let bytes = std::fs::read(path).map_err(|e| Error::io(path.display(), e))?;
        self.outputs.push(OutputFile {
            path: path.display().to_string(),
            bytes: bytes.len() as u64,
            sha256: hex::encode(Sha256::digest(&bytes)),
        });
        Ok(())
    }
}
