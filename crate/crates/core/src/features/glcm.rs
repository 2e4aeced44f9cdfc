//! Gray-level co-occurrence matrices and the statistics derived from
//! their joint distribution.

use crate::error::{Error, Result};
use crate::raster::{BinaryMask, RasterImage};

/// Symmetric normalized co-occurrence matrix for one offset.
#[derive(Debug, Clone)]
pub struct GlcmMatrix {
    levels: usize,
    offset: (i32, i32),
    entries: Vec<f64>,
}

impl GlcmMatrix {
    pub fn levels(&self) -> usize {
        self.levels
    }

    pub fn offset(&self) -> (i32, i32) {
        self.offset
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.entries[i * self.levels + j]
    }

    pub fn entries(&self) -> &[f64] {
        &self.entries
    }
}

/// Quantizes in-mask pixels to `levels` uniform bins of [0, 255] and
/// accumulates symmetric co-occurrence counts over `offset`.
pub fn glcm(
    gray: &RasterImage,
    mask: &BinaryMask,
    offset: (i32, i32),
    levels: usize,
) -> Result<GlcmMatrix> {
    if gray.channels() != 1 {
        return Err(Error::InvalidInput("glcm expects a grayscale image".into()));
    }
    if !(2..=256).contains(&levels) {
        return Err(Error::InvalidConfig(format!(
            "glcm levels must be in [2, 256], got {levels}"
        )));
    }
    if offset == (0, 0) {
        return Err(Error::InvalidConfig("glcm offset must be nonzero".into()));
    }
    if gray.width() != mask.width() || gray.height() != mask.height() {
        return Err(Error::DimensionMismatch {
            expected: format!("{}x{}", gray.width(), gray.height()),
            got: format!("{}x{}", mask.width(), mask.height()),
        });
    }
    let (w, h) = (gray.width() as i64, gray.height() as i64);
    let quant = |v: u8| (v as usize * levels) / 256;
    let mut counts = vec![0u64; levels * levels];
    let mut pairs = 0u64;
    for (x, y) in mask.foreground() {
        let (nx, ny) = (x as i64 + offset.0 as i64, y as i64 + offset.1 as i64);
        if nx < 0 || ny < 0 || nx >= w || ny >= h {
            continue;
        }
        if !mask.get(nx as usize, ny as usize) {
            continue;
        }
        let a = quant(gray.gray(x, y));
        let b = quant(gray.gray(nx as usize, ny as usize));
        counts[a * levels + b] += 1;
        counts[b * levels + a] += 1;
        pairs += 1;
    }
    if pairs < 2 {
        return Err(Error::InsufficientTexture(format!(
            "{pairs} co-occurring in-mask pairs for offset {offset:?}"
        )));
    }
    let total = (2 * pairs) as f64;
    let entries = counts.iter().map(|&c| c as f64 / total).collect();
    Ok(GlcmMatrix {
        levels,
        offset,
        entries,
    })
}

/// The eleven distribution statistics, in canonical order.
#[derive(Debug, Clone, Copy)]
pub struct GlcmStats {
    pub mean: f64,
    pub variance: f64,
    pub correlation: f64,
    pub homogeneity: f64,
    pub contrast: f64,
    pub energy: f64,
    pub entropy: f64,
    pub dissimilarity: f64,
    pub kurtosis: f64,
    pub skewness: f64,
    pub max_probability: f64,
}

impl GlcmStats {
    pub fn to_array(self) -> [f64; 11] {
        [
            self.mean,
            self.variance,
            self.correlation,
            self.homogeneity,
            self.contrast,
            self.energy,
            self.entropy,
            self.dissimilarity,
            self.kurtosis,
            self.skewness,
            self.max_probability,
        ]
    }

    pub const NAMES: [&'static str; 11] = [
        "mean",
        "variance",
        "correlation",
        "homogeneity",
        "contrast",
        "energy",
        "entropy",
        "dissimilarity",
        "kurtosis",
        "skewness",
        "max_probability",
    ];
}

/// Haralick-style statistics of the joint distribution; mean, variance,
/// skewness and kurtosis are taken over the marginal gray-level
/// distribution (the matrix is symmetric, so both marginals agree).
/// Zero-variance marginals use the degenerate conventions: correlation 1,
/// skewness and kurtosis 0.
pub fn glcm_stats(g: &GlcmMatrix) -> GlcmStats {
    let l = g.levels();
    let mut marginal = vec![0.0; l];
    for (i, m) in marginal.iter_mut().enumerate() {
        for j in 0..l {
            *m += g.get(i, j);
        }
    }
    let mean: f64 = marginal.iter().enumerate().map(|(i, &p)| i as f64 * p).sum();
    let variance: f64 = marginal
        .iter()
        .enumerate()
        .map(|(i, &p)| (i as f64 - mean).powi(2) * p)
        .sum();
    let sigma = variance.sqrt();

    let mut correlation = 0.0;
    let mut homogeneity = 0.0;
    let mut contrast = 0.0;
    let mut energy = 0.0;
    let mut entropy = 0.0;
    let mut dissimilarity = 0.0;
    let mut max_probability = 0.0f64;
    for i in 0..l {
        for j in 0..l {
            let p = g.get(i, j);
            let d = i as f64 - j as f64;
            homogeneity += p / (1.0 + d * d);
            contrast += d * d * p;
            energy += p * p;
            if p > 0.0 {
                entropy -= p * p.log2();
            }
            dissimilarity += d.abs() * p;
            max_probability = max_probability.max(p);
            if variance > 0.0 {
                correlation += (i as f64 - mean) * (j as f64 - mean) * p / variance;
            }
        }
    }
    if variance == 0.0 {
        correlation = 1.0;
    }
    let (skewness, kurtosis) = if variance > 0.0 {
        let m3: f64 = marginal
            .iter()
            .enumerate()
            .map(|(i, &p)| (i as f64 - mean).powi(3) * p)
            .sum();
        let m4: f64 = marginal
            .iter()
            .enumerate()
            .map(|(i, &p)| (i as f64 - mean).powi(4) * p)
            .sum();
        (m3 / sigma.powi(3), m4 / (variance * variance))
    } else {
        (0.0, 0.0)
    };

    GlcmStats {
        mean,
        variance,
        correlation,
        homogeneity,
        contrast,
        energy,
        entropy,
        dissimilarity,
        kurtosis,
        skewness,
        max_probability,
    }
}
