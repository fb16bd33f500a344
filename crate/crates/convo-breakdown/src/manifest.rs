//! Run manifests: enough provenance to reproduce a command's outputs.

use std::path::Path;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

/// Records what a command ran with: config digests, seed, and paths.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RunManifest {
    pub command: String,
    pub config_digests: Vec<(String, String)>,
    pub seed: u64,
    pub inputs: Vec<String>,
    pub outputs: Vec<String>,
    pub tool_version: String,
}

/// Hex SHA-256 of a byte string.
pub fn digest_bytes(bytes: &[u8]) -> String {
    hex::encode(Sha256::digest(bytes))
}

/// Hex SHA-256 of a file's contents.
pub fn digest_file(path: &Path) -> std::io::Result<String> {
    Ok(digest_bytes(&std::fs::read(path)?))
}

impl RunManifest {
    pub fn new(command: &str, seed: u64) -> Self {
        RunManifest {
            command: command.to_string(),
            config_digests: Vec::new(),
            seed,
            inputs: Vec::new(),
            outputs: Vec::new(),
            tool_version: env!("CARGO_PKG_VERSION").to_string(),
        }
    }

    pub fn add_config(&mut self, name: &str, content: &str) {
        self.config_digests
            .push((name.to_string(), digest_bytes(content.as_bytes())));
    }

    pub fn serialize(&self) -> String {
        let mut out = serde_json::to_string_pretty(self).expect("manifest serialization");
        out.push('\n');
        out
    }

    pub fn parse(text: &str) -> Result<Self, serde_json::Error> {
        serde_json::from_str(text)
    }

    /// Recomputes each named digest over `resolve` and reports mismatches.
    pub fn verify<F>(&self, resolve: F) -> Vec<String>
    where
        F: Fn(&str) -> Option<String>,
    {
        let mut mismatches = Vec::new();
        for (name, recorded) in &self.config_digests {
            match resolve(name) {
                Some(content) if digest_bytes(content.as_bytes()) == *recorded => {}
                _ => mismatches.push(name.clone()),
            }
        }
        mismatches
    }
}
