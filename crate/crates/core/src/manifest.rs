//! Run manifests: one JSON document per CLI run recording the toolkit
//! version, a digest of the resolved configuration, the seed for
//! stochastic runs, wall time, and a checksum per output file. Re-running
//! with the same digest must reproduce every output byte for byte.

use std::collections::BTreeMap;
use std::path::Path;

use serde::Serialize;

use crate::csvout;
use crate::error::Result;

#[derive(Debug, Clone, Serialize, PartialEq)]
pub struct OutputRecord {
    pub path: String,
    pub sha256: String,
}

#[derive(Debug, Clone, Serialize, PartialEq)]
pub struct RunManifest {
    pub toolkit_version: String,
    pub command: String,
    pub config_digest: String,
    pub seed: Option<u64>,
    pub wall_time_s: f64,
    pub outputs: Vec<OutputRecord>,
    pub metadata: BTreeMap<String, String>,
}

impl RunManifest {
    pub fn new(command: impl Into<String>, config_digest: String, seed: Option<u64>) -> Self {
        Self {
            toolkit_version: env!("CARGO_PKG_VERSION").to_string(),
            command: command.into(),
            config_digest,
            seed,
            wall_time_s: 0.0,
            outputs: Vec::new(),
            metadata: BTreeMap::new(),
        }
    }

    pub fn record_output(&mut self, path: &Path, sha256: String) {
        self.outputs.push(OutputRecord {
            path: path.display().to_string(),
            sha256,
        });
    }

    pub fn write_json(&self, path: &Path) -> Result<()> {
        let text = serde_json::to_string_pretty(self).expect("manifest serializes");
        std::fs::write(path, text)?;
        Ok(())
    }
}

/// Digest of a resolved configuration: SHA-256 over canonical
/// `command` + sorted `key=value` lines.
pub fn digest_config(command: &str, map: &BTreeMap<String, String>) -> String {
    let mut canonical = String::new();
    canonical.push_str(command);
    canonical.push('\n');
    for (k, v) in map {
        canonical.push_str(k);
        canonical.push('=');
        canonical.push_str(v);
        canonical.push('\n');
    }
    csvout::sha256_hex(canonical.as_bytes())
}
