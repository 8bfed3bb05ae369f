//! Run manifests: every command records its seed, resolved
//! configuration hash and input file hashes so a run can be reproduced
//! bit for bit.

use crate::error::CliError;
use serde::Serialize;
use sha2::{Digest, Sha256};
use std::path::{Path, PathBuf};

#[derive(Debug, Serialize)]
pub struct InputRecord {
    pub path: String,
    pub sha256: String,
}

#[derive(Debug, Serialize)]
pub struct Manifest {
    pub command: String,
    pub version: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    /// Resolved configuration after merging defaults, config file and
    /// flags.
    pub config: serde_json::Value,
    pub config_sha256: String,
    pub inputs: std::collections::BTreeMap<String, InputRecord>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub design_columns: Option<Vec<fxvol_core::market::ColumnLabel>>,
}

impl Manifest {
    pub fn new(command: &str, seed: Option<u64>, config: serde_json::Value) -> Self {
        let config_sha256 = sha256_hex(config.to_string().as_bytes());
        Self {
            command: command.to_string(),
            version: env!("CARGO_PKG_VERSION").to_string(),
            seed,
            config,
            config_sha256,
            inputs: Default::default(),
            design_columns: None,
        }
    }

    pub fn record_input(&mut self, name: &str, path: &Path) -> Result<(), CliError> {
        let bytes = std::fs::read(path)
            .map_err(|e| CliError::data(format!("cannot hash {}: {e}", path.display())))?;
        self.inputs.insert(
            name.to_string(),
            InputRecord {
                path: path.display().to_string(),
                sha256: sha256_hex(&bytes),
            },
        );
        Ok(())
    }

    pub fn write(&self, path: &Path) -> Result<(), CliError> {
        let json = serde_json::to_string_pretty(self)
            .map_err(|e| CliError::data(format!("manifest serialization: {e}")))?;
        std::fs::write(path, json)
            .map_err(|e| CliError::data(format!("cannot write {}: {e}", path.display())))?;
        Ok(())
    }
}

pub fn sha256_hex(bytes: &[u8]) -> String {
    let digest = Sha256::digest(bytes);
    digest.iter().map(|b| format!("{b:02x}")).collect()
}

/// Manifest path for a single-file output: `<out>.manifest.json`.
pub fn sidecar_path(out: &Path) -> PathBuf {
    let mut s = out.as_os_str().to_owned();
    s.push(".manifest.json");
    PathBuf::from(s)
}
