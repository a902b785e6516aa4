//! File formats: network checkpoints, dataset/history/report CSVs, IDX,
//! and minimal SVG charts. Writers are deterministic (byte-stable given
//! identical values) and go through an atomic temp-then-rename.

pub mod checkpoint;
pub mod dataset;
pub mod idx;
pub mod report;
pub mod svg;

use std::path::Path;

use crate::error::CliResult;

/// Writes via a sibling temp file and rename, so readers never observe a
/// partial file.
pub fn write_atomic(path: &Path, contents: &[u8]) -> CliResult<()> {
    if let Some(parent) = path.parent() {
        if !parent.as_os_str().is_empty() {
            std::fs::create_dir_all(parent)?;
        }
    }
    let mut tmp = path.as_os_str().to_owned();
    tmp.push(".tmp");
    let tmp_path = Path::new(&tmp);
    std::fs::write(tmp_path, contents)?;
    std::fs::rename(tmp_path, path)?;
    Ok(())
}

/// 17 significant digits: round-trip exact for every finite f64.
pub(crate) fn full_precision(x: f64) -> String {
    format!("{x:.16e}")
}
