//! CSV serialization helpers.
//!
//! Floating-point values are written with 17 significant digits so that
//! every f64 round-trips exactly and identical inputs always produce
//! byte-identical files.

use std::fmt::Write as _;
use std::path::Path;

use sha2::{Digest, Sha256};

use crate::error::Result;

/// Format one f64 with 17 significant digits.
pub fn fmt_float(x: f64) -> String {
    format!("{x:.16e}")
}

/// Assemble a CSV document from a fixed header and row cells.
pub fn csv_document<R, C>(header: &str, rows: R) -> String
where
    R: IntoIterator<Item = C>,
    C: IntoIterator<Item = String>,
{
    let mut out = String::new();
    out.push_str(header);
    out.push('\n');
    for row in rows {
        let mut first = true;
        for cell in row {
            if !first {
                out.push(',');
            }
            let _ = write!(out, "{cell}");
            first = false;
        }
        out.push('\n');
    }
    out
}

/// Write bytes and return their SHA-256 as lowercase hex.
pub fn write_with_checksum(path: &Path, contents: &str) -> Result<String> {
    std::fs::write(path, contents)?;
    Ok(sha256_hex(contents.as_bytes()))
}

pub fn sha256_hex(bytes: &[u8]) -> String {
    let digest = Sha256::digest(bytes);
    let mut out = String::with_capacity(64);
    for b in digest {
        let _ = write!(out, "{b:02x}");
    }
    out
}
