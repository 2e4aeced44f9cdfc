//! Dermoscopy lesion analysis: dual-method segmentation (watershed +
//! active contour), mask agreement metrics, a 73-feature extractor and a
//! two-stage SVM / neural-network risk classifier, with a batch
//! evaluation harness and CLI on top.

pub mod classifiers;
pub mod error;
pub mod features;
pub mod pipeline;
pub mod preprocess;
pub mod raster;
pub mod segmentation;
pub mod similarity;

pub use error::{Error, Result};
