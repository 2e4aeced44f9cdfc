//! The 73-feature lesion descriptor: 3 shape + 44 GLCM + 2 coarseness +
//! 24 color features in a fixed canonical order, plus the out-of-band
//! diameter measurement.

mod coarseness;
mod color;
mod glcm;
mod shape;

pub use coarseness::coarseness;
pub use color::{color_stats, ColorStats, CHANNEL_NAMES};
pub use glcm::{glcm, glcm_stats, GlcmMatrix, GlcmStats};
pub use shape::{asymmetry, compactness, feret_diameter, radial_variance};

use std::sync::OnceLock;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};
use crate::raster::{BinaryMask, RasterImage};

/// The four co-occurrence offsets with their conventional angle labels.
pub const GLCM_OFFSETS: [((i32, i32), &str); 4] = [
    ((1, 0), "0"),
    ((1, 1), "45"),
    ((0, 1), "90"),
    ((-1, 1), "135"),
];

pub const FEATURE_COUNT: usize = 73;

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default)]
pub struct FeatureConfig {
    /// Gray-level quantization for the co-occurrence matrices.
    pub glcm_levels: usize,
    /// Millimeters per pixel, when the acquisition scale is known.
    pub mm_per_pixel: Option<f64>,
}

impl Default for FeatureConfig {
    fn default() -> Self {
        Self {
            glcm_levels: 16,
            mm_per_pixel: None,
        }
    }
}

/// Canonical feature names, in the exact vector order.
pub fn canonical_names() -> &'static [String] {
    static NAMES: OnceLock<Vec<String>> = OnceLock::new();
    NAMES.get_or_init(|| {
        let mut names = vec![
            "asymmetry".to_string(),
            "compactness".to_string(),
            "radial_variance".to_string(),
        ];
        for (_, angle) in GLCM_OFFSETS {
            for stat in GlcmStats::NAMES {
                names.push(format!("glcm_{stat}_{angle}"));
            }
        }
        names.push("coarseness_mean".to_string());
        names.push("coarseness_std".to_string());
        for stat in ["variance", "entropy", "skewness"] {
            for channel in CHANNEL_NAMES {
                names.push(format!("{channel}_{stat}"));
            }
        }
        assert_eq!(names.len(), FEATURE_COUNT);
        names
    })
}

/// Hash of the canonical name list; persisted models carry it so a stale
/// model cannot be applied to a reordered registry.
pub fn registry_hash() -> String {
    static HASH: OnceLock<String> = OnceLock::new();
    HASH.get_or_init(|| {
        let mut hasher = Sha256::new();
        hasher.update(canonical_names().join("\n").as_bytes());
        let digest = hasher.finalize();
        digest.iter().map(|b| format!("{b:02x}")).collect()
    })
    .clone()
}

/// Fixed-order feature vector; always 73 finite values.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FeatureVector {
    values: Vec<f64>,
}

impl FeatureVector {
    pub fn new(values: Vec<f64>) -> Result<Self> {
        if values.len() != FEATURE_COUNT {
            return Err(Error::InvalidInput(format!(
                "feature vector must have {FEATURE_COUNT} values, got {}",
                values.len()
            )));
        }
        if let Some(pos) = values.iter().position(|v| !v.is_finite()) {
            return Err(Error::InvalidInput(format!(
                "non-finite value for feature '{}'",
                canonical_names()[pos]
            )));
        }
        Ok(Self { values })
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn get(&self, name: &str) -> Option<f64> {
        canonical_names()
            .iter()
            .position(|n| n == name)
            .map(|i| self.values[i])
    }
}

/// Diameter measurements, kept out of the classifier input.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct LesionMeasurements {
    pub diameter_px: f64,
    pub diameter_mm: Option<f64>,
}

/// Computes the full descriptor for an image/mask pair. The canonical
/// block order is shape, GLCM (11 statistics per offset), coarseness,
/// then the color variance/entropy/skewness blocks.
pub fn assemble_features(
    img: &RasterImage,
    mask: &BinaryMask,
    cfg: &FeatureConfig,
) -> Result<(FeatureVector, LesionMeasurements)> {
    if img.channels() != 3 {
        return Err(Error::InvalidInput(
            "feature extraction expects an RGB image".into(),
        ));
    }
    if img.width() != mask.width() || img.height() != mask.height() {
        return Err(Error::DimensionMismatch {
            expected: format!("{}x{}", img.width(), img.height()),
            got: format!("{}x{}", mask.width(), mask.height()),
        });
    }
    if mask.is_empty() {
        return Err(Error::EmptyMask);
    }
    let gray = img.to_grayscale();

    let mut values = Vec::with_capacity(FEATURE_COUNT);
    values.push(asymmetry(mask)?);
    values.push(compactness(mask)?);
    values.push(radial_variance(mask)?);

    for (offset, _) in GLCM_OFFSETS {
        let matrix = glcm(&gray, mask, offset, cfg.glcm_levels)?;
        values.extend_from_slice(&glcm_stats(&matrix).to_array());
    }

    let (c_mean, c_std) = coarseness(&gray, mask)?;
    values.push(c_mean);
    values.push(c_std);

    let colors = color_stats(img, mask)?;
    values.extend_from_slice(&colors.variance);
    values.extend_from_slice(&colors.entropy);
    values.extend_from_slice(&colors.skewness);

    let diameter_px = feret_diameter(mask)?;
    let measurements = LesionMeasurements {
        diameter_px,
        diameter_mm: cfg.mm_per_pixel.map(|s| diameter_px * s),
    };
    Ok((FeatureVector::new(values)?, measurements))
}
