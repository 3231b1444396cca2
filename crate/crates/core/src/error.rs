use std::path::PathBuf;

use crate::symmetry::GroupElement;

/// Errors produced by the chromasym library.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("image dimensions {width}x{height} must be non-zero and even")]
    InvalidDims { width: u32, height: u32 },

    #[error("channel value {0} outside [0, 1]")]
    ChannelOutOfRange(f64),

    #[error("invalid map parameters: {0}")]
    InvalidMap(String),

    #[error("invalid partition: {0}")]
    InvalidPartition(String),

    #[error("the identity element exchanges no subsections")]
    IdentityHasNoPairs,

    #[error("subsection {0} is out of range for a partition with {1} subsections")]
    SubsectionOutOfRange(u32, u32),

    #[error("assignment does not cover subsection {0}")]
    IncompleteAssignment(u32),

    #[error("subsections {0} and {1} are not paired under {2}")]
    NotAPair(u32, u32, GroupElement),

    #[error("assignment was built for {declared} but {requested} was requested")]
    ElementMismatch {
        declared: GroupElement,
        requested: GroupElement,
    },

    #[error("image mixes pixels with and without alpha")]
    MixedAlpha,

    #[error("dimension mismatch: expected {expected:?}, got {actual:?}")]
    DimensionMismatch {
        expected: (u32, u32),
        actual: (u32, u32),
    },

    #[error("palette has more than {limit} distinct colors")]
    PaletteTooLarge { limit: usize },

    #[error("source color {src:?} maps to both {first:?} and {second:?}")]
    NotAFunction {
        src: [u8; 3],
        first: [u8; 3],
        second: [u8; 3],
    },

    #[error("inconsistent demo permutation: {0}")]
    InconsistentPermutation(String),

    #[error("invalid configuration:\n  {}", .0.join("\n  "))]
    Config(Vec<String>),

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("{path}: cannot decode PNG: {source}")]
    Decode {
        path: PathBuf,
        #[source]
        source: png::DecodingError,
    },

    #[error("cannot encode PNG: {0}")]
    Encode(#[from] png::EncodingError),

    #[error("{path}: unsupported image format: {reason}")]
    Unsupported { path: PathBuf, reason: String },

    #[error("{path}: odd dimensions {width}x{height} and cropping disabled")]
    OddDimensions {
        path: PathBuf,
        width: u32,
        height: u32,
    },
}

impl Error {
    /// True for failures of the file system or codec rather than of the input's content.
    pub fn is_io(&self) -> bool {
        matches!(
            self,
            Error::Io { .. } | Error::Decode { .. } | Error::Encode(_) | Error::Unsupported { .. }
        )
    }
}

pub type Result<T> = std::result::Result<T, Error>;
