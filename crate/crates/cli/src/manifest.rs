//! Run manifests: what was run, on which inputs, producing which files.

use std::path::{Path, PathBuf};

use serde::Serialize;
use sha2::{Digest, Sha256};

#[derive(Debug, Clone, Serialize)]
pub struct FileDigest {
    pub path: String,
    pub sha256: String,
}

impl FileDigest {
    pub fn of_bytes(path: impl Into<String>, bytes: &[u8]) -> Self {
        Self {
            path: path.into(),
            sha256: hex::encode(Sha256::digest(bytes)),
        }
    }

    pub fn of_file(path: &Path) -> std::io::Result<Self> {
        Ok(Self::of_bytes(path.display().to_string(), &std::fs::read(path)?))
    }
}

/// Written as `manifest.json` next to the artifacts of one command.
#[derive(Debug, Clone, Serialize)]
pub struct RunManifest {
    pub command: String,
    pub parameters: serde_json::Value,
    pub fixtures: Vec<FileDigest>,
    pub tool: String,
    pub tool_version: String,
    pub outputs: Vec<FileDigest>,
}

/// A file produced by a command, written only when `--out` is given.
#[derive(Debug, Clone)]
pub struct Artifact {
    pub name: String,
    pub bytes: Vec<u8>,
}

impl Artifact {
    pub fn new(name: impl Into<String>, bytes: impl Into<Vec<u8>>) -> Self {
        Self {
            name: name.into(),
            bytes: bytes.into(),
        }
    }
}

/// Writes the artifacts and their manifest into `dir`.
pub fn write_all(
    dir: &Path,
    command: &str,
    parameters: serde_json::Value,
    fixtures: &[PathBuf],
    artifacts: &[Artifact],
) -> std::io::Result<PathBuf> {
    std::fs::create_dir_all(dir)?;
    let mut outputs = Vec::with_capacity(artifacts.len());
    for a in artifacts {
        std::fs::write(dir.join(&a.name), &a.bytes)?;
        outputs.push(FileDigest::of_bytes(a.name.clone(), &a.bytes));
    }
    let fixtures = fixtures
        .iter()
        .map(|p| FileDigest::of_file(p))
        .collect::<std::io::Result<Vec<_>>>()?;
    let manifest = RunManifest {
        command: command.to_string(),
        parameters,
        fixtures,
        tool: env!("CARGO_PKG_NAME").to_string(),
        tool_version: env!("CARGO_PKG_VERSION").to_string(),
        outputs,
    };
    let path = dir.join("manifest.json");
    let mut text = serde_json::to_string_pretty(&manifest).map_err(std::io::Error::other)?;
    text.push('\n');
    std::fs::write(&path, text)?;
    Ok(path)
}
