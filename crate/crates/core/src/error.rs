//! Error type shared across the pipeline stages.

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("incompatible mask/image dimensions: {expected} vs {got}")]
    DimensionMismatch { expected: String, got: String },

    #[error("invalid raster construction: {0}")]
    InvalidRaster(String),

    #[error("operation requires a nonempty mask")]
    EmptyMask,

    #[error("degenerate mask: {0}")]
    DegenerateMask(String),

    #[error("no lesion found: {0}")]
    NoLesionFound(String),

    #[error("degenerate hair detection: mask covers the whole image")]
    DegenerateHairDetection,

    #[error("degenerate contour: {0}")]
    DegenerateContour(String),

    #[error("contour point ({x:.2}, {y:.2}) outside image bounds {width}x{height}")]
    ContourOutOfBounds {
        x: f64,
        y: f64,
        width: usize,
        height: usize,
    },

    #[error("segmentation disagreement: watershed and active-contour masks are disjoint")]
    SegmentationDisagreement,

    #[error("insufficient texture support: {0}")]
    InsufficientTexture(String),

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("training data must contain at least {needed} samples of each class")]
    SingleClass { needed: usize },

    #[error("model file error: {0}")]
    ModelFormat(String),

    #[error("feature registry mismatch: model built for {model_hash}, current registry is {current_hash}")]
    RegistryMismatch {
        model_hash: String,
        current_hash: String,
    },

    #[error("dataset error: {0}")]
    Dataset(String),

    #[error("pipeline stage '{stage}' failed: {message}")]
    Stage { stage: String, message: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error("image codec error: {0}")]
    Image(#[from] image::ImageError),

    #[error("csv error: {0}")]
    Csv(#[from] csv::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
