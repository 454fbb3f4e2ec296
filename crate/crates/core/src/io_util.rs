use std::fs;
use std::path::Path;

use serde::Serialize;
use sha2::{Digest, Sha256};

use crate::error::{BcsError, Result};

pub const VERSION: &str = concat!("bcs ", env!("CARGO_PKG_VERSION"));

/// Shortest decimal that parses back to the same `f64`.
///
/// Plain notation for moderate magnitudes, exponent notation otherwise, so
/// that neither `1e-300` nor `1e300` expands to hundreds of digits.
pub fn fmt_f64(x: f64) -> String {
    let a = x.abs();
    if x == 0.0 || (1e-5..1e16).contains(&a) || !x.is_finite() {
        format!("{x}")
    } else {
        format!("{x:e}")
    }
}

pub fn write_json<T: Serialize + ?Sized>(path: &Path, value: &T) -> Result<()> {
    let mut text = serde_json::to_string_pretty(value).map_err(|e| BcsError::json(path, e))?;
    text.push('\n');
    fs::write(path, text).map_err(|e| BcsError::io(path, e))
}

pub fn read_json<T: serde::de::DeserializeOwned>(path: &Path) -> Result<T> {
    let text = fs::read_to_string(path).map_err(|e| BcsError::io(path, e))?;
    serde_json::from_str(&text).map_err(|e| BcsError::json(path, e))
}

pub fn ensure_dir(dir: &Path) -> Result<()> {
    fs::create_dir_all(dir).map_err(|e| BcsError::io(dir, e))
}

pub fn sha256_file(path: &Path) -> Result<String> {
    let bytes = fs::read(path).map_err(|e| BcsError::io(path, e))?;
    Ok(hex::encode(Sha256::digest(&bytes)))
}
