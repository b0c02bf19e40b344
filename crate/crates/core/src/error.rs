use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("image must be at least 1x1")]
    EmptyImage,

    #[error("pixel buffer has {actual} entries, expected {expected}")]
    DataLength { expected: usize, actual: usize },

    #[error("binary pixel {index} has value {value}, expected 0 or 1")]
    InvalidLabel { index: usize, value: u8 },

    #[error("ascii picture rows have different lengths")]
    Ragged,

    #[error("crop window {window:?} outside {width}x{height} image")]
    CropOutOfBounds {
        window: (usize, usize, usize, usize),
        width: usize,
        height: usize,
    },

    #[error("image dimensions differ: {0}x{1} vs {2}x{3}")]
    DimensionMismatch(usize, usize, usize, usize),

    #[error("marker is not contained in mask")]
    MarkerOutsideMask,

    #[error("structuring element length must be odd and positive, got {0}")]
    InvalidSeLength(i64),

    #[error("unsupported line direction {0} degrees (expected 0, 45, 90 or 135)")]
    InvalidDirection(u32),

    #[error("word image contains no ink")]
    EmptyWord,

    #[error("netpbm: {0}")]
    Pnm(String),

    #[error("model: {0}")]
    Model(String),

    #[error("model has no samples")]
    EmptyModel,

    #[error("k = {k} is invalid for a model with {samples} samples")]
    InvalidK { k: usize, samples: usize },

    #[error("evaluation set is empty")]
    EmptyTestSet,

    #[error("config: {0}")]
    Config(String),

    #[error("glyph sheet: {0}")]
    GlyphSheet(String),

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }
}
