use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected_w}x{expected_h}, found {found_w}x{found_h}")]
    DimensionMismatch {
        expected_w: u32,
        expected_h: u32,
        found_w: u32,
        found_h: u32,
    },
    #[error("invalid raster: {0}")]
    InvalidRaster(String),

    #[error("manual border is empty (tp + fn = 0)")]
    EmptyManualBorder,
    #[error("manual border fills the image (fp + tn = 0)")]
    EmptyBackground,
    #[error("automatic border is empty (tp + fp = 0)")]
    EmptyAutomaticBorder,
    #[error("no observation masks given")]
    EmptyObservationList,

    #[error("invalid pixel pair ({i}, {j}) for an image of {n} pixels")]
    IndexOutOfRange { i: usize, j: usize, n: usize },
    #[error("at least two pixels are required, got {0}")]
    TooFewPixels(usize),
    #[error("dataset pair model has no images")]
    EmptyDataset,
    #[error("expected index {expected} leaves no room for normalization")]
    DegenerateNormalization { expected: f64 },

    #[error("closed quadratic spline needs at least 3 control points, got {0}")]
    TooFewControlPoints(usize),
    #[error("closed curve encloses zero area")]
    DegenerateCurve,

    #[error("{0}")]
    Parse(String),
    #[error("validation error in {entry}: {field}: {message}")]
    Validation {
        entry: String,
        field: String,
        message: String,
    },
    #[error("missing file {}", .0.display())]
    MissingFile(PathBuf),

    #[error("no records to aggregate")]
    EmptyInput,
    #[error("layout mismatch: {0}")]
    LayoutMismatch(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Image(#[from] image::ImageError),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub(crate) fn dims(expected: (u32, u32), found: (u32, u32)) -> Self {
        Error::DimensionMismatch {
            expected_w: expected.0,
            expected_h: expected.1,
            found_w: found.0,
            found_h: found.1,
        }
    }
}
