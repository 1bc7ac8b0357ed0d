//! Schema-versioned run manifests with content digests of every emitted file.

use std::fs;
use std::path::{Path, PathBuf};

use chrono::{DateTime, SecondsFormat, Utc};
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

pub const SCHEMA_VERSION: &str = "v1";

#[derive(Serialize, Deserialize)]
pub struct OutputFile {
    pub path: String,
    pub sha256: String,
}

#[derive(Serialize, Deserialize)]
pub struct RunManifest {
    pub schema: String,
    pub tool_version: String,
    pub command: String,
    /// Seed actually used (explicit or auto-chosen).
    #[serde(skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    pub config: serde_json::Value,
    pub started: String,
    pub finished: String,
    pub output_files: Vec<OutputFile>,
}

pub struct ManifestBuilder {
    command: String,
    seed: Option<u64>,
    config: serde_json::Value,
    started: DateTime<Utc>,
    out_dir: PathBuf,
    files: Vec<PathBuf>,
}

impl ManifestBuilder {
    pub fn new(out_dir: &Path, command: String, config: serde_json::Value) -> Self {
        ManifestBuilder {
            command,
            seed: None,
            config,
            started: Utc::now(),
            out_dir: out_dir.to_path_buf(),
            files: Vec::new(),
        }
    }

    pub fn set_seed(&mut self, seed: u64) {
        self.seed = Some(seed);
    }

    /// Registers an emitted file (absolute or relative to the output dir).
    pub fn add_file(&mut self, path: &Path) {
        self.files.push(path.to_path_buf());
    }

    /// Writes `manifest.json` into the output directory.
    pub fn write(self) -> std::io::Result<PathBuf> {
        let mut output_files = Vec::new();
        for file in &self.files {
            let bytes = fs::read(file)?;
            let digest = Sha256::digest(&bytes);
            let rel = file
                .strip_prefix(&self.out_dir)
                .unwrap_or(file)
                .display()
                .to_string();
            output_files.push(OutputFile {
                path: rel,
                sha256: format!("{digest:x}"),
            });
        }
        let manifest = RunManifest {
            schema: SCHEMA_VERSION.to_string(),
            tool_version: env!("CARGO_PKG_VERSION").to_string(),
            command: self.command,
            seed: self.seed,
            config: self.config,
            started: self.started.to_rfc3339_opts(SecondsFormat::Micros, true),
            finished: Utc::now().to_rfc3339_opts(SecondsFormat::Micros, true),
            output_files,
        };
        let path = self.out_dir.join("manifest.json");
        fs::write(&path, serde_json::to_string_pretty(&manifest)?)?;
        Ok(path)
    }
}
