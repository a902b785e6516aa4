//! IDX binary format (big-endian dimensions, u8 payload): magic
//! 0x00000803 for image tensors, 0x00000801 for label vectors. Pixels are
//! scaled to [0, 1] and flattened into columns.

use std::path::Path;

use rankscope_core::datagen::{Dataset, DatasetMeta, Targets};
use rankscope_core::linalg::Matrix;

use crate::error::{CliError, CliResult};

const IMAGES_MAGIC: u32 = 0x0000_0803;
const LABELS_MAGIC: u32 = 0x0000_0801;

fn bad(msg: &str) -> CliError {
    CliError::Config(format!("idx: {msg}"))
}

fn read_u32(bytes: &[u8], at: usize) -> CliResult<u32> {
    let slice = bytes
        .get(at..at + 4)
        .ok_or_else(|| bad("truncated header"))?;
    Ok(u32::from_be_bytes([slice[0], slice[1], slice[2], slice[3]]))
}

/// Parses an image tensor: returns `(count, rows, cols, pixels)` with
/// pixels scaled to [0, 1], image-major.
pub fn parse_images(bytes: &[u8]) -> CliResult<(usize, usize, usize, Vec<f64>)> {
    if read_u32(bytes, 0)? != IMAGES_MAGIC {
        return Err(bad("bad magic (expected 0x00000803)"));
    }
    let count = read_u32(bytes, 4)? as usize;
    let rows = read_u32(bytes, 8)? as usize;
    let cols = read_u32(bytes, 12)? as usize;
    let need = 16 + count * rows * cols;
    if bytes.len() != need {
        return Err(bad(&format!("expected {need} bytes, got {}", bytes.len())));
    }
    let pixels = bytes[16..].iter().map(|&b| b as f64 / 255.0).collect();
    Ok((count, rows, cols, pixels))
}

/// Parses a label vector of raw bytes.
pub fn parse_labels(bytes: &[u8]) -> CliResult<Vec<u8>> {
    if read_u32(bytes, 0)? != LABELS_MAGIC {
        return Err(bad("bad magic (expected 0x00000801)"));
    }
    let count = read_u32(bytes, 4)? as usize;
    let need = 8 + count;
    if bytes.len() != need {
        return Err(bad(&format!("expected {need} bytes, got {}", bytes.len())));
    }
    Ok(bytes[8..].to_vec())
}

fn images_to_matrix(count: usize, rows: usize, cols: usize, pixels: Vec<f64>) -> CliResult<Matrix> {
    if count == 0 || rows * cols == 0 {
        return Err(bad("empty image tensor"));
    }
    let dim = rows * cols;
    Ok(Matrix::from_fn(dim, count, |i, j| pixels[j * dim + i]))
}

/// Loads an image file as an autoencoder dataset (`Y = X`).
pub fn load_idx(path: &Path) -> CliResult<Dataset> {
    let bytes = std::fs::read(path)
        .map_err(|e| CliError::Config(format!("cannot read {}: {e}", path.display())))?;
    let (count, rows, cols, pixels) = parse_images(&bytes)?;
    let x = images_to_matrix(count, rows, cols, pixels)?;
    Ok(Dataset {
        targets: Targets::Values(x.clone()),
        x,
        meta: DatasetMeta::default(),
    })
}

/// Loads an image/label file pair as a labeled dataset; the counts must
/// match. Raw labels are 0-based classes and come back 1-based.
pub fn load_idx_pair(images: &Path, labels: &Path) -> CliResult<Dataset> {
    let image_bytes = std::fs::read(images)
        .map_err(|e| CliError::Config(format!("cannot read {}: {e}", images.display())))?;
    let label_bytes = std::fs::read(labels)
        .map_err(|e| CliError::Config(format!("cannot read {}: {e}", labels.display())))?;
    let (count, rows, cols, pixels) = parse_images(&image_bytes)?;
    let raw = parse_labels(&label_bytes)?;
    if raw.len() != count {
        return Err(bad(&format!("{count} images but {} labels", raw.len())));
    }
    let x = images_to_matrix(count, rows, cols, pixels)?;
    let classes = raw.iter().copied().max().unwrap_or(0) as usize + 1;
    let labels = raw.into_iter().map(|b| b as usize + 1).collect();
    Ok(Dataset {
        x,
        targets: Targets::Labels { labels, classes },
        meta: DatasetMeta::default(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn authored_images() -> Vec<u8> {
        // Two 3x3 images with hand-picked bytes.
        let mut bytes = Vec::new();
        bytes.extend_from_slice(&IMAGES_MAGIC.to_be_bytes());
        bytes.extend_from_slice(&2u32.to_be_bytes());
        bytes.extend_from_slice(&3u32.to_be_bytes());
        bytes.extend_from_slice(&3u32.to_be_bytes());
        bytes.extend_from_slice(&[0, 255, 51, 102, 153, 204, 10, 20, 30]);
        bytes.extend_from_slice(&[255, 0, 0, 0, 128, 0, 0, 0, 255]);
        bytes
    }

    #[test]
    fn authored_bytes_parse_to_exact_pixels() {
        let (count, rows, cols, pixels) = parse_images(&authored_images()).unwrap();
        assert_eq!((count, rows, cols), (2, 3, 3));
        assert_eq!(pixels[0], 0.0);
        assert_eq!(pixels[1], 1.0); // byte 255 -> exactly 1.0
        assert_eq!(pixels[2], 51.0 / 255.0);
        assert_eq!(pixels[9], 1.0);
        assert_eq!(pixels[13], 128.0 / 255.0);
        let m = images_to_matrix(count, rows, cols, pixels).unwrap();
        assert_eq!(m.shape(), (9, 2));
        assert_eq!(m.get(1, 0), 1.0);
        assert_eq!(m.get(0, 1), 1.0);
    }

    #[test]
    fn empty_and_bad_magic_rejected() {
        assert!(parse_images(&[]).is_err());
        assert!(parse_labels(&[]).is_err());
        let mut bytes = authored_images();
        bytes[3] = 0x01;
        assert!(parse_images(&bytes).is_err());
        let mut truncated = authored_images();
        truncated.pop();
        assert!(parse_images(&truncated).is_err());
    }

    #[test]
    fn label_pairing_checks_counts() {
        let dir = tempfile::tempdir().unwrap();
        let img_path = dir.path().join("img.idx");
        let lbl_path = dir.path().join("lbl.idx");
        std::fs::write(&img_path, authored_images()).unwrap();

        let mut labels = Vec::new();
        labels.extend_from_slice(&LABELS_MAGIC.to_be_bytes());
        labels.extend_from_slice(&2u32.to_be_bytes());
        labels.extend_from_slice(&[3u8, 0u8]);
        std::fs::write(&lbl_path, &labels).unwrap();
        let d = load_idx_pair(&img_path, &lbl_path).unwrap();
        match &d.targets {
            Targets::Labels { labels, classes } => {
                assert_eq!(labels, &vec![4, 1]);
                assert_eq!(*classes, 4);
            }
            _ => panic!(),
        }

        // One label short: count mismatch.
        let mut short = Vec::new();
        short.extend_from_slice(&LABELS_MAGIC.to_be_bytes());
        short.extend_from_slice(&1u32.to_be_bytes());
        short.push(1);
        std::fs::write(&lbl_path, &short).unwrap();
        assert!(load_idx_pair(&img_path, &lbl_path).is_err());
    }
}
