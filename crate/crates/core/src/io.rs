//! Output helpers shared by the exporters: fixed-width numeric formatting
//! and atomic file writes (temp + rename).

use std::fs;
use std::io;
use std::path::Path;

/// 17-significant-digit scientific form, the canonical CSV number format.
pub fn fmt_g17(x: f64) -> String {
    format!("{x:.16e}")
}

/// Write a file atomically: the content lands under a `.tmp` suffix first
/// and is renamed into place.
pub fn write_atomic(path: &Path, bytes: &[u8]) -> io::Result<()> {
    let tmp = path.with_extension(match path.extension() {
        Some(ext) => format!("{}.tmp", ext.to_string_lossy()),
        None => "tmp".to_string(),
    });
    fs::write(&tmp, bytes)?;
    fs::rename(&tmp, path)
}
