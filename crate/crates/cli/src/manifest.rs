//! Run manifests: what went in, what came out, and under which settings.

use std::fs;
use std::path::{Path, PathBuf};

use anyhow::{Context, Result};
use serde::Serialize;
use sha2::{Digest, Sha256};

#[derive(Debug, Serialize)]
pub struct FileDigest {
    pub path: String,
    pub sha256: String,
}

#[derive(Debug, Serialize)]
pub struct Manifest {
    pub tool: &'static str,
    pub version: &'static str,
    pub command: String,
    pub config_sha256: String,
    pub config: serde_json::Value,
    pub inputs: Vec<FileDigest>,
    /// Output file names relative to the manifest's directory.
    pub outputs: Vec<FileDigest>,
}

pub fn sha256_hex(bytes: &[u8]) -> String {
    hex::encode(Sha256::digest(bytes))
}

fn digest_file(path: &Path, shown: String) -> Result<FileDigest> {
    let bytes = fs::read(path).with_context(|| format!("hashing {}", path.display()))?;
    Ok(FileDigest {
        path: shown,
        sha256: sha256_hex(&bytes),
    })
}

/// Hashes a directory's `*.jsonl` files in name order, as ingest reads them.
fn digest_inputs(path: &Path) -> Result<Vec<FileDigest>> {
    if !path.is_dir() {
        return Ok(vec![digest_file(path, path.display().to_string())?]);
    }
    let mut files: Vec<PathBuf> = fs::read_dir(path)
        .with_context(|| format!("listing {}", path.display()))?
        .filter_map(|e| e.ok().map(|e| e.path()))
        .filter(|p| p.is_file() && p.extension().is_some_and(|e| e == "jsonl"))
        .collect();
    files.sort();
    files
        .iter()
        .map(|f| digest_file(f, f.display().to_string()))
        .collect()
}

impl Manifest {
    pub fn new<C: Serialize>(command: &str, config: &C) -> Result<Self> {
        let config = serde_json::to_value(config)?;
        let canonical = serde_json::to_vec(&config)?;
        Ok(Manifest {
            tool: env!("CARGO_PKG_NAME"),
            version: env!("CARGO_PKG_VERSION"),
            command: command.to_owned(),
            config_sha256: sha256_hex(&canonical),
            config,
            inputs: Vec::new(),
            outputs: Vec::new(),
        })
    }

    pub fn input(&mut self, path: &Path) -> Result<()> {
        self.inputs.extend(digest_inputs(path)?);
        Ok(())
    }

    pub fn output(&mut self, path: &Path) -> Result<()> {
        let shown = path
            .file_name()
            .map(|n| n.to_string_lossy().into_owned())
            .unwrap_or_else(|| path.display().to_string());
        self.outputs.push(digest_file(path, shown)?);
        Ok(())
    }

    pub fn write(&self, path: &Path) -> Result<()> {
        let mut text = serde_json::to_string_pretty(self)?;
        text.push('\n');
        fs::write(path, text).with_context(|| format!("writing manifest {}", path.display()))
    }

    /// Writes `<out>.manifest.json` beside a single output file.
    pub fn write_beside(&mut self, out: &Path) -> Result<PathBuf> {
        self.output(out)?;
        let mut name = out.as_os_str().to_owned();
        name.push(".manifest.json");
        let path = PathBuf::from(name);
        self.write(&path)?;
        Ok(path)
    }
}
