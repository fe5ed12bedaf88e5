use std::io;

use thiserror::Error;

/// Errors produced by the clustering pipeline and its loaders.
#[derive(Debug, Error)]
pub enum Error {
    #[error("matrix has numerical rank {effective_rank}, expected {expected}")]
    RankDeficient {
        effective_rank: usize,
        expected: usize,
    },
    #[error("ambient dimension mismatch: expected {expected}, found {found}")]
    AmbientMismatch { expected: usize, found: usize },
    #[error("input is empty")]
    EmptyInput,
    #[error("prototype dimension {k} exceeds ambient dimension {n}")]
    DimensionTooLarge { k: usize, n: usize },
    #[error("{centers} centers requested but only {samples} samples available")]
    TooManyCenters { centers: usize, samples: usize },
    #[error("length mismatch: {left} labels vs {right} classes")]
    LengthMismatch { left: usize, right: usize },
    #[error("dataset has no class labels")]
    MissingClassLabels,
    #[error("bad IDX magic number: expected {expected:#010x}, found {found:#010x}")]
    BadMagic { expected: u32, found: u32 },
    #[error("truncated file: expected {expected} bytes, found {found}")]
    TruncatedFile { expected: usize, found: usize },
    #[error("image count {images} does not match label count {labels}")]
    CountMismatch { images: usize, labels: usize },
    #[error("class {class} has {count} members, fewer than the group size {group_size}")]
    ClassTooSmall {
        class: u32,
        count: usize,
        group_size: usize,
    },
    #[error("parse error on line {line}: {message}")]
    Parse { line: u64, message: String },
    #[error("line {line} has {found} features, expected {expected}")]
    InconsistentWidth {
        line: u64,
        expected: usize,
        found: usize,
    },
    #[error("invalid dataset file: {0}")]
    Format(String),
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),
    #[error("non-orthonormal or non-finite basis: {0}")]
    InvalidBasis(String),
    #[error(transparent)]
    Io(#[from] io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
