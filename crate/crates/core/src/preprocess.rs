//! Image refinement ahead of segmentation: unsharp-style sharpening and
//! removal of dark hair strands.
//!
//! Hair removal follows the classic directional-closing recipe: a dark
//! thin line on lighter skin disappears under a grayscale closing whose
//! line element crosses it, so the closing residue localizes the hair.
//! Flagged pixels are replaced by a local mean of clean pixels.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::raster::{dilate, BinaryMask, RasterImage, StructuringElement};

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default)]
pub struct PreprocessConfig {
    pub sharpen_enabled: bool,
    pub hair_removal_enabled: bool,
    /// Line element length in pixels; odd, >= 3.
    pub hair_line_length: u32,
    pub hair_angles: Vec<f64>,
    /// Closing-residue threshold in intensity units, 1..=254.
    pub hair_threshold: u8,
    pub inpaint_radius: u32,
    /// Run hair removal before sharpening (sharpening amplifies hair edges).
    pub hair_removal_first: bool,
}

impl Default for PreprocessConfig {
    fn default() -> Self {
        Self {
            sharpen_enabled: true,
            hair_removal_enabled: true,
            hair_line_length: 9,
            hair_angles: vec![0.0, 45.0, 90.0, 135.0],
            hair_threshold: 20,
            inpaint_radius: 3,
            hair_removal_first: true,
        }
    }
}

impl PreprocessConfig {
    pub fn validate(&self) -> Result<()> {
        if self.hair_line_length < 3 || self.hair_line_length.is_multiple_of(2) {
            return Err(Error::InvalidConfig(format!(
                "hair_line_length must be odd and >= 3, got {}",
                self.hair_line_length
            )));
        }
        if self.hair_threshold == 0 || self.hair_threshold == 255 {
            return Err(Error::InvalidConfig(format!(
                "hair_threshold must be in [1, 254], got {}",
                self.hair_threshold
            )));
        }
        if self.inpaint_radius == 0 {
            return Err(Error::InvalidConfig("inpaint_radius must be >= 1".into()));
        }
        if self.hair_angles.is_empty() {
            return Err(Error::InvalidConfig("hair_angles must be nonempty".into()));
        }
        Ok(())
    }
}

const SHARPEN_KERNEL: [[i32; 3]; 3] = [[0, -1, 0], [-1, 5, -1], [0, -1, 0]];

/// 3x3 Laplacian-boost sharpening with replicate-padded borders and
/// clamped output.
pub fn sharpen(img: &RasterImage) -> RasterImage {
    let (w, h, ch) = (img.width() as i64, img.height() as i64, img.channels());
    RasterImage::from_fn(img.width(), img.height(), ch, |x, y, c| {
        let mut acc = 0i32;
        for (ky, row) in SHARPEN_KERNEL.iter().enumerate() {
            for (kx, &k) in row.iter().enumerate() {
                let sx = (x as i64 + kx as i64 - 1).clamp(0, w - 1) as usize;
                let sy = (y as i64 + ky as i64 - 1).clamp(0, h - 1) as usize;
                acc += k * i32::from(img.get(sx, sy, c));
            }
        }
        acc.clamp(0, 255) as u8
    })
    .expect("same shape as input")
}

// Replicate padding: clipping the element instead would let border
// erosions skip samples and conjure closing residue out of thin air.
fn gray_rank(img: &RasterImage, se: &StructuringElement, take_max: bool) -> RasterImage {
    let (w, h) = (img.width() as i64, img.height() as i64);
    RasterImage::from_fn(img.width(), img.height(), 1, |x, y, _| {
        let mut best: Option<u8> = None;
        for &(dx, dy) in se.offsets() {
            let sx = (x as i64 + dx).clamp(0, w - 1) as usize;
            let sy = (y as i64 + dy).clamp(0, h - 1) as usize;
            let v = img.gray(sx, sy);
            best = Some(match best {
                None => v,
                Some(b) if take_max => b.max(v),
                Some(b) => b.min(v),
            });
        }
        best.expect("structuring element is nonempty")
    })
    .expect("same shape as input")
}

/// Grayscale closing (dilation then erosion) over a flat element.
fn gray_close(img: &RasterImage, se: &StructuringElement) -> RasterImage {
    gray_rank(&gray_rank(img, se, true), se, false)
}

/// Detects dark linear structures and paints them over with the mean of
/// nearby clean pixels. Returns the repaired image and the hair mask; the
/// image is bit-identical to the input outside the mask.
pub fn remove_hair(img: &RasterImage, cfg: &PreprocessConfig) -> Result<(RasterImage, BinaryMask)> {
    cfg.validate()?;
    let gray = img.to_grayscale();
    let (w, h) = (img.width(), img.height());

    let mut response = vec![0u8; w * h];
    for &angle in &cfg.hair_angles {
        let se = StructuringElement::line(cfg.hair_line_length, angle);
        let closed = gray_close(&gray, &se);
        for (i, r) in response.iter_mut().enumerate() {
            let diff = closed.data()[i].saturating_sub(gray.data()[i]);
            *r = (*r).max(diff);
        }
    }

    let raw = BinaryMask::from_bits(w, h, response.iter().map(|&r| r > cfg.hair_threshold).collect())?;
    let hair = dilate(&raw, &StructuringElement::disk(1));
    if hair.area() == w * h {
        return Err(Error::DegenerateHairDetection);
    }
    if hair.is_empty() {
        return Ok((img.clone(), hair));
    }

    let mut data = img.data().to_vec();
    let ch = img.channels();
    for (x, y) in hair.foreground() {
        let mut radius = cfg.inpaint_radius as i64;
        loop {
            let mut sums = [0u64; 3];
            let mut count = 0u64;
            for dy in -radius..=radius {
                for dx in -radius..=radius {
                    if dx * dx + dy * dy > radius * radius {
                        continue;
                    }
                    let (sx, sy) = (x as i64 + dx, y as i64 + dy);
                    if sx < 0 || sy < 0 || sx >= w as i64 || sy >= h as i64 {
                        continue;
                    }
                    if hair.get(sx as usize, sy as usize) {
                        continue;
                    }
                    for (c, sum) in sums.iter_mut().enumerate().take(ch) {
                        *sum += u64::from(img.get(sx as usize, sy as usize, c));
                    }
                    count += 1;
                }
            }
            if count > 0 {
                for c in 0..ch {
                    let mean = (sums[c] as f64 / count as f64).round().clamp(0.0, 255.0);
                    data[(y * w + x) * ch + c] = mean as u8;
                }
                break;
            }
            // no clean pixel this close; widen the search
            radius += 1;
        }
    }
    Ok((RasterImage::new(w, h, ch, data)?, hair))
}

/// Applies the configured refinement steps in the configured order.
pub fn preprocess(img: &RasterImage, cfg: &PreprocessConfig) -> Result<(RasterImage, BinaryMask)> {
    cfg.validate()?;
    let empty = BinaryMask::empty(img.width(), img.height())?;
    let run_hair = |i: &RasterImage| -> Result<(RasterImage, BinaryMask)> {
        if cfg.hair_removal_enabled {
            remove_hair(i, cfg)
        } else {
            Ok((i.clone(), empty.clone()))
        }
    };
    let run_sharpen = |i: &RasterImage| {
        if cfg.sharpen_enabled {
            sharpen(i)
        } else {
            i.clone()
        }
    };
    if cfg.hair_removal_first {
        let (clean, mask) = run_hair(img)?;
        Ok((run_sharpen(&clean), mask))
    } else {
        let (clean, mask) = run_hair(&run_sharpen(img))?;
        Ok((clean, mask))
    }
}
