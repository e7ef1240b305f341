//! Run manifests: enough to re-run a command and check its outputs.

use std::path::Path;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use super::HarnessError;

pub const MANIFEST_FILE: &str = "manifest.json";

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FileDigest {
    pub path: String,
    pub sha256: String,
}

impl FileDigest {
    pub fn of(path: &Path, label: impl Into<String>) -> Result<Self, HarnessError> {
        Ok(Self {
            path: label.into(),
            sha256: sha256_file(path)?,
        })
    }
}

pub fn sha256_file(path: &Path) -> Result<String, HarnessError> {
    let bytes = std::fs::read(path).map_err(|e| HarnessError::Data(format!("cannot read {}: {e}", path.display())))?;
    Ok(hex::encode(Sha256::digest(&bytes)))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Manifest {
    pub tool_version: String,
    /// Subcommand name.
    pub command: String,
    /// Subcommand arguments as parsed.
    pub args: serde_json::Value,
    pub seed: u64,
    pub format: String,
    /// Resolved configuration as TOML, and its SHA-256.
    pub config: String,
    pub config_hash: String,
    /// Input files with their digests at run time.
    pub inputs: Vec<FileDigest>,
    /// Output files relative to the output directory.
    pub outputs: Vec<FileDigest>,
}

impl Manifest {
    pub fn write(&self, out_dir: &Path) -> Result<(), HarnessError> {
        let text = serde_json::to_string_pretty(self)?;
        std::fs::write(out_dir.join(MANIFEST_FILE), text)?;
        Ok(())
    }

    pub fn read(path: &Path) -> Result<Self, HarnessError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| HarnessError::Data(format!("cannot read manifest {}: {e}", path.display())))?;
        serde_json::from_str(&text).map_err(|e| HarnessError::Data(format!("invalid manifest: {e}")))
    }

    /// Output files whose digests under `out_dir` differ from the recorded ones.
    pub fn mismatched_outputs(&self, out_dir: &Path) -> Result<Vec<String>, HarnessError> {
        let mut bad = Vec::new();
        for f in &self.outputs {
            let p = out_dir.join(&f.path);
            if !p.exists() || sha256_file(&p)? != f.sha256 {
                bad.push(f.path.clone());
            }
        }
        Ok(bad)
    }
}
