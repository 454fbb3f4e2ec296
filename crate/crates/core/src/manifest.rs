//! `manifest.json`: the files of an output directory with their content
//! hashes, the producing version and the resolved configuration.

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{BcsError, Result};
use crate::io_util::{read_json, sha256_file, write_json, VERSION};

pub const MANIFEST: &str = "manifest.json";

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FileEntry {
    /// Relative to the manifest's directory, `/`-separated.
    pub path: String,
    pub sha256: String,
    pub bytes: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Manifest {
    pub version: String,
    #[serde(default, skip_serializing_if = "serde_json::Value::is_null")]
    pub config: serde_json::Value,
    pub files: Vec<FileEntry>,
}

/// Hashes `files` (relative to `dir`, listed in sorted order) and writes the
/// manifest next to them.
pub fn write_manifest(dir: &Path, files: &[String], config: serde_json::Value) -> Result<Manifest> {
    let mut sorted: Vec<&String> = files.iter().collect();
    sorted.sort();
    sorted.dedup();
    let entries = sorted
        .into_iter()
        .map(|rel| {
            let path = dir.join(rel);
            let bytes = std::fs::metadata(&path)
                .map_err(|e| BcsError::io(&path, e))?
                .len();
            Ok(FileEntry {
                path: rel.clone(),
                sha256: sha256_file(&path)?,
                bytes,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let manifest = Manifest {
        version: VERSION.to_string(),
        config,
        files: entries,
    };
    write_json(&dir.join(MANIFEST), &manifest)?;
    Ok(manifest)
}

/// Reads the manifest in `dir` and checks every listed file against its hash.
pub fn verify_manifest(dir: &Path) -> Result<Manifest> {
    let manifest: Manifest = read_json(&dir.join(MANIFEST))?;
    for entry in &manifest.files {
        let actual = sha256_file(&dir.join(&entry.path))?;
        if actual != entry.sha256 {
            return Err(BcsError::Inconsistent(format!(
                "{} does not match its manifest hash",
                entry.path
            )));
        }
    }
    Ok(manifest)
}
