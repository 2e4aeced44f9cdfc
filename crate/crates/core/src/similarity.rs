//! Mask/image agreement measures: windowed SSIM, Jaccard and
//! Sorensen-Dice, all reported as percentages.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::raster::{BinaryMask, RasterImage};

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default)]
pub struct SimilarityConfig {
    /// Dynamic range of the samples.
    pub dynamic_range: f64,
    /// Gaussian window size (odd) and sigma for the local statistics.
    pub window: usize,
    pub window_sigma: f64,
}

impl Default for SimilarityConfig {
    fn default() -> Self {
        Self {
            dynamic_range: 255.0,
            window: 11,
            window_sigma: 1.5,
        }
    }
}

impl SimilarityConfig {
    pub fn c1(&self) -> f64 {
        (0.01 * self.dynamic_range).powi(2)
    }

    pub fn c2(&self) -> f64 {
        (0.03 * self.dynamic_range).powi(2)
    }

    pub fn validate(&self) -> Result<()> {
        if self.dynamic_range <= 0.0 {
            return Err(Error::InvalidConfig("dynamic_range must be > 0".into()));
        }
        if self.window < 3 || self.window.is_multiple_of(2) {
            return Err(Error::InvalidConfig(format!(
                "window must be odd and >= 3, got {}",
                self.window
            )));
        }
        if self.window_sigma <= 0.0 {
            return Err(Error::InvalidConfig("window_sigma must be > 0".into()));
        }
        Ok(())
    }
}

/// Per-image agreement scores in percent.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct SimilarityReport {
    pub ssim_pct: f64,
    pub jaccard_pct: f64,
    pub dice_pct: f64,
}

fn check_dims(a: (usize, usize), b: (usize, usize)) -> Result<()> {
    if a != b {
        return Err(Error::DimensionMismatch {
            expected: format!("{}x{}", a.0, a.1),
            got: format!("{}x{}", b.0, b.1),
        });
    }
    Ok(())
}

fn gaussian_window(size: usize, sigma: f64) -> Vec<f64> {
    let half = (size / 2) as i64;
    let mut w = Vec::with_capacity(size * size);
    for dy in -half..=half {
        for dx in -half..=half {
            w.push((-((dx * dx + dy * dy) as f64) / (2.0 * sigma * sigma)).exp());
        }
    }
    let sum: f64 = w.iter().sum();
    for v in &mut w {
        *v /= sum;
    }
    w
}

/// Mean structural similarity over Gaussian-weighted local windows,
/// scaled to percent. Windows are renormalized where they overhang the
/// border.
pub fn ssim(a: &RasterImage, b: &RasterImage, cfg: &SimilarityConfig) -> Result<f64> {
    if a.channels() != 1 || b.channels() != 1 {
        return Err(Error::InvalidInput("ssim expects grayscale inputs".into()));
    }
    check_dims((a.width(), a.height()), (b.width(), b.height()))?;
    cfg.validate()?;
    let (w, h) = (a.width(), a.height());
    let half = (cfg.window / 2) as i64;
    let weights = gaussian_window(cfg.window, cfg.window_sigma);
    let (c1, c2) = (cfg.c1(), cfg.c2());

    let mut acc = 0.0;
    for y in 0..h as i64 {
        for x in 0..w as i64 {
            let mut wsum = 0.0;
            let mut mu_x = 0.0;
            let mut mu_y = 0.0;
            for dy in -half..=half {
                for dx in -half..=half {
                    let (sx, sy) = (x + dx, y + dy);
                    if sx < 0 || sy < 0 || sx >= w as i64 || sy >= h as i64 {
                        continue;
                    }
                    let wt = weights[((dy + half) * (2 * half + 1) + dx + half) as usize];
                    wsum += wt;
                    mu_x += wt * f64::from(a.gray(sx as usize, sy as usize));
                    mu_y += wt * f64::from(b.gray(sx as usize, sy as usize));
                }
            }
            mu_x /= wsum;
            mu_y /= wsum;
            let mut var_x = 0.0;
            let mut var_y = 0.0;
            let mut cov = 0.0;
            for dy in -half..=half {
                for dx in -half..=half {
                    let (sx, sy) = (x + dx, y + dy);
                    if sx < 0 || sy < 0 || sx >= w as i64 || sy >= h as i64 {
                        continue;
                    }
                    let wt = weights[((dy + half) * (2 * half + 1) + dx + half) as usize] / wsum;
                    let da = f64::from(a.gray(sx as usize, sy as usize)) - mu_x;
                    let db = f64::from(b.gray(sx as usize, sy as usize)) - mu_y;
                    var_x += wt * da * da;
                    var_y += wt * db * db;
                    cov += wt * da * db;
                }
            }
            let num = (2.0 * mu_x * mu_y + c1) * (2.0 * cov + c2);
            let den = (mu_x * mu_x + mu_y * mu_y + c1) * (var_x + var_y + c2);
            acc += num / den;
        }
    }
    Ok((acc / (w * h) as f64 * 100.0).max(-100.0))
}

/// SSIM between two masks rendered as 0/255 images.
pub fn ssim_masks(a: &BinaryMask, b: &BinaryMask, cfg: &SimilarityConfig) -> Result<f64> {
    let to_img = |m: &BinaryMask| {
        RasterImage::new(
            m.width(),
            m.height(),
            1,
            m.bits().iter().map(|&v| if v { 255 } else { 0 }).collect(),
        )
    };
    ssim(&to_img(a)?, &to_img(b)?, cfg)
}

fn overlap_counts(a: &BinaryMask, b: &BinaryMask) -> Result<(usize, usize, usize)> {
    check_dims((a.width(), a.height()), (b.width(), b.height()))?;
    let mut common = 0usize;
    let mut only_a = 0usize;
    let mut only_b = 0usize;
    for (&x, &y) in a.bits().iter().zip(b.bits()) {
        match (x, y) {
            (true, true) => common += 1,
            (true, false) => only_a += 1,
            (false, true) => only_b += 1,
            _ => {}
        }
    }
    Ok((common, only_a, only_b))
}

/// Intersection over union in percent; two empty masks agree perfectly.
pub fn jaccard(a: &BinaryMask, b: &BinaryMask) -> Result<f64> {
    let (common, only_a, only_b) = overlap_counts(a, b)?;
    let union = common + only_a + only_b;
    if union == 0 {
        return Ok(100.0);
    }
    Ok(100.0 * common as f64 / union as f64)
}

/// Twice the intersection over the size sum, in percent; two empty masks
/// agree perfectly.
pub fn dice(a: &BinaryMask, b: &BinaryMask) -> Result<f64> {
    let (common, only_a, only_b) = overlap_counts(a, b)?;
    let total = 2 * common + only_a + only_b;
    if total == 0 {
        return Ok(100.0);
    }
    Ok(100.0 * 2.0 * common as f64 / total as f64)
}

/// All three measures for a computed mask against ground truth.
pub fn compare_masks(
    computed: &BinaryMask,
    truth: &BinaryMask,
    cfg: &SimilarityConfig,
) -> Result<SimilarityReport> {
    Ok(SimilarityReport {
        ssim_pct: ssim_masks(computed, truth, cfg)?,
        jaccard_pct: jaccard(computed, truth)?,
        dice_pct: dice(computed, truth)?,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn img_from(vals: &[u8], w: usize, h: usize) -> RasterImage {
        RasterImage::new(w, h, 1, vals.to_vec()).unwrap()
    }

    #[test]
    fn ssim_of_identical_image_is_hundred() {
        let img = RasterImage::from_fn(20, 14, 1, |x, y, _| ((x * 13 + y * 7) % 251) as u8)
            .unwrap();
        let s = ssim(&img, &img, &SimilarityConfig::default()).unwrap();
        assert_eq!(s, 100.0);
    }

    #[test]
    fn ssim_constant_images_match_closed_form() {
        let a = RasterImage::filled(16, 16, 1, 0).unwrap();
        let b = RasterImage::filled(16, 16, 1, 255).unwrap();
        let cfg = SimilarityConfig::default();
        let got = ssim(&a, &b, &cfg).unwrap();
        // constant windows: mu_x = 0, mu_y = 255, all variances zero
        let (c1, c2) = (cfg.c1(), cfg.c2());
        let want = (c1 * c2) / ((255.0f64.powi(2) + c1) * c2) * 100.0;
        assert!((got - want).abs() < 1e-9, "got {got}, want {want}");
    }

    /// Direct per-window recomputation with the same definition.
    fn ssim_oracle(a: &RasterImage, b: &RasterImage, cfg: &SimilarityConfig) -> f64 {
        let (w, h) = (a.width(), a.height());
        let half = (cfg.window / 2) as i64;
        let mut total = 0.0;
        for y in 0..h as i64 {
            for x in 0..w as i64 {
                let mut pts = Vec::new();
                for dy in -half..=half {
                    for dx in -half..=half {
                        let (sx, sy) = (x + dx, y + dy);
                        if sx < 0 || sy < 0 || sx >= w as i64 || sy >= h as i64 {
                            continue;
                        }
                        let g = (-((dx * dx + dy * dy) as f64)
                            / (2.0 * cfg.window_sigma * cfg.window_sigma))
                            .exp();
                        pts.push((
                            g,
                            f64::from(a.gray(sx as usize, sy as usize)),
                            f64::from(b.gray(sx as usize, sy as usize)),
                        ));
                    }
                }
                let wsum: f64 = pts.iter().map(|p| p.0).sum();
                let mu_x: f64 = pts.iter().map(|p| p.0 * p.1).sum::<f64>() / wsum;
                let mu_y: f64 = pts.iter().map(|p| p.0 * p.2).sum::<f64>() / wsum;
                let var_x: f64 =
                    pts.iter().map(|p| p.0 * (p.1 - mu_x).powi(2)).sum::<f64>() / wsum;
                let var_y: f64 =
                    pts.iter().map(|p| p.0 * (p.2 - mu_y).powi(2)).sum::<f64>() / wsum;
                let cov: f64 = pts
                    .iter()
                    .map(|p| p.0 * (p.1 - mu_x) * (p.2 - mu_y))
                    .sum::<f64>()
                    / wsum;
                let num = (2.0 * mu_x * mu_y + cfg.c1()) * (2.0 * cov + cfg.c2());
                let den =
                    (mu_x * mu_x + mu_y * mu_y + cfg.c1()) * (var_x + var_y + cfg.c2());
                total += num / den;
            }
        }
        total / (w * h) as f64 * 100.0
    }

    #[test]
    fn ssim_matches_windowed_oracle_on_random_pair() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(5);
        let a: Vec<u8> = (0..256).map(|_| rng.gen()).collect();
        let b: Vec<u8> = (0..256).map(|_| rng.gen()).collect();
        let (a, b) = (img_from(&a, 16, 16), img_from(&b, 16, 16));
        let cfg = SimilarityConfig::default();
        let got = ssim(&a, &b, &cfg).unwrap();
        let want = ssim_oracle(&a, &b, &cfg);
        assert!(
            (got - want).abs() <= 1e-9 * want.abs().max(1.0),
            "got {got}, want {want}"
        );
    }

    #[test]
    fn jaccard_and_dice_basics() {
        let a = BinaryMask::from_fn(4, 2, |x, _| x < 2).unwrap(); // {0,1}
        let b = BinaryMask::from_fn(4, 2, |x, _| (1..3).contains(&x)).unwrap(); // {1,2}
        // per row: common 1, only-a 1, only-b 1 -> totals 2/2/2
        assert!((jaccard(&a, &b).unwrap() - 100.0 * 2.0 / 6.0).abs() < 1e-12);
        assert!((dice(&a, &b).unwrap() - 100.0 * 4.0 / 8.0).abs() < 1e-12);

        assert_eq!(jaccard(&a, &a).unwrap(), 100.0);
        assert_eq!(dice(&a, &a).unwrap(), 100.0);

        let empty = BinaryMask::empty(4, 2).unwrap();
        assert_eq!(jaccard(&empty, &empty).unwrap(), 100.0);
        assert_eq!(dice(&empty, &empty).unwrap(), 100.0);

        let disjoint = BinaryMask::from_fn(4, 2, |x, _| x >= 2).unwrap();
        assert_eq!(jaccard(&a, &disjoint).unwrap(), 0.0);
        assert_eq!(dice(&a, &disjoint).unwrap(), 0.0);
    }

    #[test]
    fn jaccard_spec_count_example() {
        // common 3, unique-to-first 1, unique-to-second 2 -> 50%
        let a = BinaryMask::from_fn(6, 1, |x, _| x < 4).unwrap();
        let b = BinaryMask::from_fn(6, 1, |x, _| !(3..4).contains(&x)).unwrap();
        assert!((jaccard(&a, &b).unwrap() - 50.0).abs() < 1e-12);
        // dice of the same pair: 2*3 / (4 + 5)
        assert!((dice(&a, &b).unwrap() - 100.0 * 6.0 / 9.0).abs() < 1e-12);
    }

    #[test]
    fn dimension_mismatch_is_an_error() {
        let a = BinaryMask::empty(4, 4).unwrap();
        let b = BinaryMask::empty(5, 4).unwrap();
        assert!(jaccard(&a, &b).is_err());
        assert!(dice(&a, &b).is_err());
    }

    proptest! {
        #[test]
        fn symmetry_and_dice_jaccard_identity(bits_a in proptest::collection::vec(any::<bool>(), 36),
                                              bits_b in proptest::collection::vec(any::<bool>(), 36)) {
            let a = BinaryMask::from_bits(6, 6, bits_a).unwrap();
            let b = BinaryMask::from_bits(6, 6, bits_b).unwrap();
            let j_ab = jaccard(&a, &b).unwrap();
            let j_ba = jaccard(&b, &a).unwrap();
            let d_ab = dice(&a, &b).unwrap();
            let d_ba = dice(&b, &a).unwrap();
            prop_assert_eq!(j_ab, j_ba);
            prop_assert_eq!(d_ab, d_ba);
            prop_assert!(j_ab <= d_ab + 1e-12);
            // d = 2j / (1 + j) with both as fractions
            let j = j_ab / 100.0;
            let d = d_ab / 100.0;
            prop_assert!((d - 2.0 * j / (1.0 + j)).abs() < 1e-12);
        }

        #[test]
        fn fixing_one_disagreement_never_hurts(bits_a in proptest::collection::vec(any::<bool>(), 25),
                                               bits_b in proptest::collection::vec(any::<bool>(), 25)) {
            let a = BinaryMask::from_bits(5, 5, bits_a.clone()).unwrap();
            let b = BinaryMask::from_bits(5, 5, bits_b.clone()).unwrap();
            if let Some(i) = bits_a.iter().zip(&bits_b).position(|(x, y)| x != y) {
                let mut fixed = bits_b.clone();
                fixed[i] = bits_a[i];
                let b2 = BinaryMask::from_bits(5, 5, fixed).unwrap();
                prop_assert!(jaccard(&a, &b2).unwrap() >= jaccard(&a, &b).unwrap() - 1e-12);
                prop_assert!(dice(&a, &b2).unwrap() >= dice(&a, &b).unwrap() - 1e-12);
            }
        }
    }
}
