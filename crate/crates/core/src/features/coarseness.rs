//! Tamura coarseness: per pixel, the window size (2, 4, ..., 32) whose
//! directional average-difference response is strongest.

use crate::error::{Error, Result};
use crate::raster::{BinaryMask, RasterImage};

const MAX_K: u32 = 5;
const MIN_BBOX: usize = 32;

struct IntegralImage {
    width: usize,
    height: usize,
    sums: Vec<f64>,
}

impl IntegralImage {
    fn build(gray: &RasterImage) -> Self {
        let (w, h) = (gray.width(), gray.height());
        let mut sums = vec![0.0; (w + 1) * (h + 1)];
        for y in 0..h {
            for x in 0..w {
                sums[(y + 1) * (w + 1) + (x + 1)] = f64::from(gray.gray(x, y))
                    + sums[y * (w + 1) + (x + 1)]
                    + sums[(y + 1) * (w + 1) + x]
                    - sums[y * (w + 1) + x];
            }
        }
        Self {
            width: w,
            height: h,
            sums,
        }
    }

    /// Mean over the window [x0, x1] x [y0, y1]; `None` when any part
    /// falls outside the image. Clamping instead would fabricate responses
    /// out of border repetition and drown the real texture signal.
    fn window_mean(&self, x0: i64, y0: i64, x1: i64, y1: i64) -> Option<f64> {
        if x0 < 0 || y0 < 0 || x1 >= self.width as i64 || y1 >= self.height as i64 {
            return None;
        }
        let (x0, y0, x1, y1) = (x0 as usize, y0 as usize, x1 as usize, y1 as usize);
        let w = self.width + 1;
        let total = self.sums[(y1 + 1) * w + (x1 + 1)] - self.sums[y0 * w + (x1 + 1)]
            - self.sums[(y1 + 1) * w + x0]
            + self.sums[y0 * w + x0];
        Some(total / ((x1 - x0 + 1) * (y1 - y0 + 1)) as f64)
    }

    /// Mean of the 2^k x 2^k window centered at (x, y).
    fn scale_mean(&self, x: i64, y: i64, k: u32) -> Option<f64> {
        let half = 1i64 << (k - 1);
        self.window_mean(x - half, y - half, x + half - 1, y + half - 1)
    }
}

/// Mean and standard deviation of the per-pixel best window size over the
/// mask. Ties pick the smallest window, so a flat region scores (2, 0).
pub fn coarseness(gray: &RasterImage, mask: &BinaryMask) -> Result<(f64, f64)> {
    if gray.channels() != 1 {
        return Err(Error::InvalidInput(
            "coarseness expects a grayscale image".into(),
        ));
    }
    if gray.width() != mask.width() || gray.height() != mask.height() {
        return Err(Error::DimensionMismatch {
            expected: format!("{}x{}", gray.width(), gray.height()),
            got: format!("{}x{}", mask.width(), mask.height()),
        });
    }
    let (x0, y0, x1, y1) = mask.bounding_box().ok_or(Error::EmptyMask)?;
    if x1 - x0 + 1 < MIN_BBOX || y1 - y0 + 1 < MIN_BBOX {
        return Err(Error::DegenerateMask(format!(
            "mask bounding box {}x{} is below {MIN_BBOX}x{MIN_BBOX}",
            x1 - x0 + 1,
            y1 - y0 + 1
        )));
    }
    let integral = IntegralImage::build(gray);

    let mut sum = 0.0;
    let mut sum_sq = 0.0;
    let mut count = 0usize;
    for (x, y) in mask.foreground() {
        let (xi, yi) = (x as i64, y as i64);
        let mut best_k = 1u32;
        let mut best_e = f64::NEG_INFINITY;
        for k in 1..=MAX_K {
            let half = 1i64 << (k - 1);
            let e_h = match (
                integral.scale_mean(xi + half, yi, k),
                integral.scale_mean(xi - half, yi, k),
            ) {
                (Some(a), Some(b)) => Some((a - b).abs()),
                _ => None,
            };
            let e_v = match (
                integral.scale_mean(xi, yi + half, k),
                integral.scale_mean(xi, yi - half, k),
            ) {
                (Some(a), Some(b)) => Some((a - b).abs()),
                _ => None,
            };
            let e = match (e_h, e_v) {
                (Some(a), Some(b)) => a.max(b),
                (Some(a), None) | (None, Some(a)) => a,
                (None, None) => continue,
            };
            if e > best_e {
                best_e = e;
                best_k = k;
            }
        }
        let s = f64::from(1u32 << best_k);
        sum += s;
        sum_sq += s * s;
        count += 1;
    }
    let mean = sum / count as f64;
    let var = (sum_sq / count as f64 - mean * mean).max(0.0);
    Ok((mean, var.sqrt()))
}
