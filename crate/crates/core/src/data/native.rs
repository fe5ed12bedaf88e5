//! `SUBDS1` binary dataset container.
//!
//! Layout, all integers and floats little-endian:
//!
//! ```text
//! "SUBDS1"                 6 bytes
//! n                        u64   ambient dimension
//! count                    u64   number of samples
//! per sample:
//!   l                      u64   subspace dimension
//!   has_class              u8    0 or 1
//!   class                  u32   present only when has_class = 1
//!   basis                  n·l × f64, column-major
//! ```

use std::fs::File;
use std::io::{BufReader, BufWriter, Read, Write};
use std::path::Path;

use nalgebra::DMatrix;

use super::SubspaceDataset;
use crate::error::{Error, Result};
use crate::linalg::Subspace;

pub const SUBDS_MAGIC: &[u8; 6] = b"SUBDS1";

pub fn write_dataset<W: Write>(ds: &SubspaceDataset, mut w: W) -> Result<()> {
    w.write_all(SUBDS_MAGIC)?;
    w.write_all(&(ds.ambient_dim().unwrap_or(0) as u64).to_le_bytes())?;
    w.write_all(&(ds.len() as u64).to_le_bytes())?;
    for (i, s) in ds.samples().iter().enumerate() {
        w.write_all(&(s.dim() as u64).to_le_bytes())?;
        match ds.class_labels() {
            Some(labels) => {
                w.write_all(&[1])?;
                w.write_all(&labels[i].to_le_bytes())?;
            }
            None => w.write_all(&[0])?,
        }
        for x in s.basis().iter() {
            w.write_all(&x.to_le_bytes())?;
        }
    }
    w.flush()?;
    Ok(())
}

fn read_array<const N: usize, R: Read>(r: &mut R) -> Result<[u8; N]> {
    let mut buf = [0u8; N];
    r.read_exact(&mut buf).map_err(|e| match e.kind() {
        std::io::ErrorKind::UnexpectedEof => Error::Format("unexpected end of file".into()),
        _ => Error::Io(e),
    })?;
    Ok(buf)
}

fn read_len<R: Read>(r: &mut R) -> Result<usize> {
    usize::try_from(u64::from_le_bytes(read_array(r)?))
        .map_err(|_| Error::Format("length overflows usize".into()))
}

pub fn read_dataset<R: Read>(mut r: R, name: &str) -> Result<SubspaceDataset> {
    if &read_array::<6, _>(&mut r)? != SUBDS_MAGIC {
        return Err(Error::Format("missing SUBDS1 magic".into()));
    }
    let n = read_len(&mut r)?;
    let count = read_len(&mut r)?;
    let mut samples = Vec::with_capacity(count.min(1 << 20));
    let mut labels = Vec::with_capacity(count.min(1 << 20));
    let mut labelled = None;
    for i in 0..count {
        let l = read_len(&mut r)?;
        if l == 0 || l > n {
            return Err(Error::Format(format!(
                "sample {i} has dimension {l} in R^{n}"
            )));
        }
        let has_class = match read_array::<1, _>(&mut r)?[0] {
            0 => false,
            1 => true,
            b => return Err(Error::Format(format!("bad class flag {b}"))),
        };
        if *labelled.get_or_insert(has_class) != has_class {
            return Err(Error::Format(
                "class labels present on only some samples".into(),
            ));
        }
        if has_class {
            labels.push(u32::from_le_bytes(read_array(&mut r)?));
        }
        let mut data = Vec::with_capacity(n * l);
        for _ in 0..n * l {
            data.push(f64::from_le_bytes(read_array(&mut r)?));
        }
        samples.push(Subspace::new(DMatrix::from_vec(n, l, data))?);
    }
    let mut rest = [0u8; 1];
    if r.read(&mut rest)? != 0 {
        return Err(Error::Format("trailing bytes after last sample".into()));
    }
    SubspaceDataset::new(samples, labelled.unwrap_or(false).then_some(labels), name)
}

pub fn save_dataset(ds: &SubspaceDataset, path: &Path) -> Result<()> {
    write_dataset(ds, BufWriter::new(File::create(path)?))
}

/// Loads a `SUBDS1` file; the dataset is named after the file stem.
pub fn load_dataset(path: &Path) -> Result<SubspaceDataset> {
    let name = path
        .file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_default();
    read_dataset(BufReader::new(File::open(path)?), &name)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::data::{synth_generate, SynthSpec};

    #[test]
    fn rejects_garbage() {
        assert!(read_dataset(&b"SUBDS2"[..], "x").is_err());
        let ds = synth_generate(&SynthSpec::default()).unwrap();
        let mut bytes = Vec::new();
        write_dataset(&ds, &mut bytes).unwrap();
        assert!(read_dataset(&bytes[..bytes.len() - 1], "x").is_err());
        bytes.push(0);
        assert!(read_dataset(&bytes[..], "x").is_err());
    }

    #[test]
    fn unlabelled_round_trip() {
        let ds = synth_generate(&SynthSpec::default()).unwrap();
        let bare = SubspaceDataset::new(ds.samples().to_vec(), None, "p").unwrap();
        let mut bytes = Vec::new();
        write_dataset(&bare, &mut bytes).unwrap();
        let back = read_dataset(&bytes[..], "p").unwrap();
        assert_eq!(back, bare);
    }
}
