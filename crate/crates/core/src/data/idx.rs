//! MNIST IDX files: big-endian `u32` magic and dimensions, then unsigned bytes.

use std::fs;
use std::path::Path;

use nalgebra::DMatrix;

use super::LabeledMatrix;
use crate::error::{Error, Result};

pub const IDX_IMAGES_MAGIC: u32 = 0x0000_0803;
pub const IDX_LABELS_MAGIC: u32 = 0x0000_0801;

fn read_u32(bytes: &[u8], word: usize) -> Result<u32> {
    let start = 4 * word;
    bytes
        .get(start..start + 4)
        .map(|b| u32::from_be_bytes([b[0], b[1], b[2], b[3]]))
        .ok_or(Error::TruncatedFile {
            expected: start + 4,
            found: bytes.len(),
        })
}

fn check_magic(bytes: &[u8], expected: u32) -> Result<()> {
    let found = read_u32(bytes, 0)?;
    if found != expected {
        return Err(Error::BadMagic { expected, found });
    }
    Ok(())
}

fn payload(bytes: &[u8], header: usize, len: usize) -> Result<&[u8]> {
    let expected = header + len;
    if bytes.len() < expected {
        return Err(Error::TruncatedFile {
            expected,
            found: bytes.len(),
        });
    }
    Ok(&bytes[header..expected])
}

/// Image rows scaled to `[0, 1]`; one row of `rows·cols` pixels per image.
pub fn parse_idx_images(bytes: &[u8]) -> Result<DMatrix<f64>> {
    check_magic(bytes, IDX_IMAGES_MAGIC)?;
    let count = read_u32(bytes, 1)? as usize;
    let pixels = read_u32(bytes, 2)? as usize * read_u32(bytes, 3)? as usize;
    let data = payload(bytes, 16, count * pixels)?;
    Ok(DMatrix::from_fn(count, pixels, |i, j| {
        f64::from(data[i * pixels + j]) / 255.0
    }))
}

pub fn parse_idx_labels(bytes: &[u8]) -> Result<Vec<u32>> {
    check_magic(bytes, IDX_LABELS_MAGIC)?;
    let count = read_u32(bytes, 1)? as usize;
    Ok(payload(bytes, 8, count)?
        .iter()
        .map(|&b| u32::from(b))
        .collect())
}

/// Loads an IDX image/label pair.
pub fn load_idx_images(images_path: &Path, labels_path: &Path) -> Result<LabeledMatrix> {
    let features = parse_idx_images(&fs::read(images_path)?)?;
    let classes = parse_idx_labels(&fs::read(labels_path)?)?;
    if features.nrows() != classes.len() {
        return Err(Error::CountMismatch {
            images: features.nrows(),
            labels: classes.len(),
        });
    }
    Ok(LabeledMatrix { features, classes })
}

/// Encodes raw pixel bytes (image-major) as an IDX image file.
pub fn encode_idx_images(count: u32, rows: u32, cols: u32, pixels: &[u8]) -> Vec<u8> {
    let mut out = Vec::with_capacity(16 + pixels.len());
    for word in [IDX_IMAGES_MAGIC, count, rows, cols] {
        out.extend_from_slice(&word.to_be_bytes());
    }
    out.extend_from_slice(pixels);
    out
}

pub fn encode_idx_labels(labels: &[u8]) -> Vec<u8> {
    let mut out = Vec::with_capacity(8 + labels.len());
    out.extend_from_slice(&IDX_LABELS_MAGIC.to_be_bytes());
    out.extend_from_slice(&(labels.len() as u32).to_be_bytes());
    out.extend_from_slice(labels);
    out
}
