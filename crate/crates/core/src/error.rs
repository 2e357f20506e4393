use std::path::PathBuf;

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("unknown wavelet `{0}` (expected `db2` or `dmey`)")]
    UnknownWavelet(String),

    #[error("plane of {width}x{height} has an odd dimension; pad to even size before transforming")]
    OddDimension { width: usize, height: usize },

    #[error("size mismatch: expected {expected:?}, found {found:?}")]
    SizeMismatch {
        expected: (usize, usize),
        found: (usize, usize),
    },

    #[error("{what}: {width}x{height} is smaller than the minimum {min}x{min}")]
    TooSmall {
        what: &'static str,
        width: usize,
        height: usize,
        min: usize,
    },

    #[error("{width}x{height} is not divisible by {factor}")]
    NotDivisible {
        width: usize,
        height: usize,
        factor: usize,
    },

    #[error("sample buffer holds {found} values, expected {expected}")]
    BufferLength { expected: usize, found: usize },

    #[error("non-finite sample value")]
    NonFinite,

    #[error("fitness is not finite at position {position:?}")]
    NonFiniteFitness { position: Vec<f64> },

    #[error("anchor {index} lies outside the search bounds: {position:?}")]
    AnchorOutOfBounds { index: usize, position: Vec<f64> },

    #[error("fusion weight {index} = {value} is outside [0, 1]")]
    WeightOutOfRange { index: usize, value: f64 },

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error("scale factor must be greater than 1, got {0}")]
    InvalidScale(f64),

    #[error("unsupported channel count {0} (expected 1 or 3)")]
    UnsupportedChannels(usize),

    #[error("no decodable images in {}", .0.display())]
    EmptyDataset(PathBuf),

    #[error("malformed report: {0}")]
    Report(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Image(#[from] image::ImageError),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}
