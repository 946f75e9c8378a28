//! Output directory writer and run manifest.
//!
//! All files of a command go through one [`ArtifactWriter`], which records
//! each file's size and SHA-256 for the manifest.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use anyhow::{Context, Result};
use serde::Serialize;
use sha2::{Digest, Sha256};

pub fn sha256_hex(bytes: &[u8]) -> String {
    Sha256::digest(bytes).iter().map(|b| format!("{b:02x}")).collect()
}

#[derive(Debug, Clone, Serialize)]
pub struct Artifact {
    pub path: String,
    pub bytes: usize,
    pub sha256: String,
}

#[derive(Debug, Serialize)]
pub struct Manifest<'a> {
    pub command: &'a str,
    pub tool_version: &'a str,
    pub seed: u64,
    pub config_sha256: String,
    pub data_sha256: Option<String>,
    pub artifacts: &'a [Artifact],
}

pub struct ArtifactWriter {
    root: PathBuf,
    artifacts: Vec<Artifact>,
}

impl ArtifactWriter {
    pub fn new(root: &Path) -> Result<Self> {
        fs::create_dir_all(root).with_context(|| format!("creating output directory {}", root.display()))?;
        Ok(ArtifactWriter {
            root: root.to_path_buf(),
            artifacts: Vec::new(),
        })
    }

    pub fn root(&self) -> &Path {
        &self.root
    }

    /// Renders into memory, then writes `relative` under the root.
    pub fn write_with<F>(&mut self, relative: &str, render: F) -> Result<PathBuf>
    where
        F: FnOnce(&mut Vec<u8>) -> modechoice::Result<()>,
    {
        let mut buf = Vec::new();
        render(&mut buf).with_context(|| format!("rendering {relative}"))?;
        self.write_bytes(relative, &buf)
    }

    pub fn write_bytes(&mut self, relative: &str, bytes: &[u8]) -> Result<PathBuf> {
        let path = self.root.join(relative);
        if let Some(parent) = path.parent() {
            fs::create_dir_all(parent).with_context(|| format!("creating {}", parent.display()))?;
        }
        let mut file = fs::File::create(&path).with_context(|| format!("creating {}", path.display()))?;
        file.write_all(bytes)
            .with_context(|| format!("writing {}", path.display()))?;
        self.artifacts.push(Artifact {
            path: relative.to_string(),
            bytes: bytes.len(),
            sha256: sha256_hex(bytes),
        });
        Ok(path)
    }

    /// Writes the manifest listing every artifact written so far:
    /// `manifest.json` for `run`, `<command>_manifest.json` otherwise.
    pub fn finish(
        mut self,
        command: &str,
        seed: u64,
        config_toml: &str,
        data_sha256: Option<String>,
    ) -> Result<PathBuf> {
        let artifacts = std::mem::take(&mut self.artifacts);
        let manifest = Manifest {
            command,
            tool_version: env!("CARGO_PKG_VERSION"),
            seed,
            config_sha256: sha256_hex(config_toml.as_bytes()),
            data_sha256,
            artifacts: &artifacts,
        };
        let mut text = serde_json::to_string_pretty(&manifest).expect("manifest serializes");
        text.push('\n');
        let name = if command == "run" {
            "manifest.json".to_string()
        } else {
            format!("{command}_manifest.json")
        };
        self.write_bytes(&name, text.as_bytes())
    }
}
