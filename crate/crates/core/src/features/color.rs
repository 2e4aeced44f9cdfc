//! Color statistics over the lesion: variance, histogram entropy and
//! skewness for eight channels spanning RGB, HSV, CIELAB L* and gray.

use crate::error::{Error, Result};
use crate::raster::{BinaryMask, RasterImage};

pub const CHANNEL_NAMES: [&str; 8] = ["r", "g", "b", "h", "s", "v", "lstar", "gray"];

/// Per-channel (variance, entropy, skewness) triples in channel order.
#[derive(Debug, Clone)]
pub struct ColorStats {
    pub variance: [f64; 8],
    pub entropy: [f64; 8],
    pub skewness: [f64; 8],
}

/// Standard HSV with hue in degrees [0, 360) and s, v in [0, 1].
pub fn rgb_to_hsv(r: u8, g: u8, b: u8) -> (f64, f64, f64) {
    let r = f64::from(r) / 255.0;
    let g = f64::from(g) / 255.0;
    let b = f64::from(b) / 255.0;
    let max = r.max(g).max(b);
    let min = r.min(g).min(b);
    let delta = max - min;
    let h = if delta == 0.0 {
        0.0
    } else if max == r {
        60.0 * (((g - b) / delta).rem_euclid(6.0))
    } else if max == g {
        60.0 * ((b - r) / delta + 2.0)
    } else {
        60.0 * ((r - g) / delta + 4.0)
    };
    let s = if max == 0.0 { 0.0 } else { delta / max };
    (h, s, max)
}

fn srgb_linear(c: u8) -> f64 {
    let c = f64::from(c) / 255.0;
    if c <= 0.04045 {
        c / 12.92
    } else {
        ((c + 0.055) / 1.055).powf(2.4)
    }
}

/// CIELAB L* under D65.
pub fn rgb_to_lstar(r: u8, g: u8, b: u8) -> f64 {
    let y = 0.2126 * srgb_linear(r) + 0.7152 * srgb_linear(g) + 0.0722 * srgb_linear(b);
    let t = (6.0f64 / 29.0).powi(3);
    let f = if y > t {
        y.cbrt()
    } else {
        y / (3.0 * (6.0f64 / 29.0).powi(2)) + 4.0 / 29.0
    };
    116.0 * f - 16.0
}

fn moments(values: &[f64]) -> (f64, f64) {
    // single-valued distributions are exactly degenerate by convention
    if values.iter().all(|&v| v == values[0]) {
        return (0.0, 0.0);
    }
    let n = values.len() as f64;
    let mean = values.iter().sum::<f64>() / n;
    let var = values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / n;
    let skew = if var > 0.0 {
        let m3 = values.iter().map(|v| (v - mean).powi(3)).sum::<f64>() / n;
        m3 / var.powf(1.5)
    } else {
        0.0
    };
    (var, skew)
}

/// Shannon entropy in bits of a 256-bin histogram over [lo, hi].
fn histogram_entropy(values: &[f64], lo: f64, hi: f64) -> f64 {
    let mut hist = [0u64; 256];
    let span = hi - lo;
    for &v in values {
        let bin = (((v - lo) / span) * 256.0).floor().clamp(0.0, 255.0) as usize;
        hist[bin] += 1;
    }
    let n = values.len() as f64;
    let mut e = 0.0;
    for &c in &hist {
        if c > 0 {
            let p = c as f64 / n;
            e -= p * p.log2();
        }
    }
    e
}

/// Wraps hue deviations into (-180, 180].
fn hue_delta(h: f64, center: f64) -> f64 {
    let mut d = h - center;
    while d <= -180.0 {
        d += 360.0;
    }
    while d > 180.0 {
        d -= 360.0;
    }
    d
}

/// Computes the 24 color features over the in-mask pixels. Hue is treated
/// circularly: entropy over the raw hue histogram, moments over the
/// deviations from the circular mean.
pub fn color_stats(rgb: &RasterImage, mask: &BinaryMask) -> Result<ColorStats> {
    if rgb.channels() != 3 {
        return Err(Error::InvalidInput(
            "color statistics need a 3-channel image".into(),
        ));
    }
    if rgb.width() != mask.width() || rgb.height() != mask.height() {
        return Err(Error::DimensionMismatch {
            expected: format!("{}x{}", rgb.width(), rgb.height()),
            got: format!("{}x{}", mask.width(), mask.height()),
        });
    }
    if mask.is_empty() {
        return Err(Error::EmptyMask);
    }

    let n = mask.area();
    let mut channels: [Vec<f64>; 8] = std::array::from_fn(|_| Vec::with_capacity(n));
    for (x, y) in mask.foreground() {
        let (r, g, b) = (rgb.get(x, y, 0), rgb.get(x, y, 1), rgb.get(x, y, 2));
        let (h, s, v) = rgb_to_hsv(r, g, b);
        let l = rgb_to_lstar(r, g, b);
        let gray = (0.299 * f64::from(r) + 0.587 * f64::from(g) + 0.114 * f64::from(b))
            .round()
            .clamp(0.0, 255.0);
        channels[0].push(f64::from(r));
        channels[1].push(f64::from(g));
        channels[2].push(f64::from(b));
        channels[3].push(h);
        channels[4].push(s);
        channels[5].push(v);
        channels[6].push(l);
        channels[7].push(gray);
    }

    let ranges: [(f64, f64); 8] = [
        (0.0, 256.0),
        (0.0, 256.0),
        (0.0, 256.0),
        (0.0, 360.0),
        (0.0, 1.0 + f64::EPSILON),
        (0.0, 1.0 + f64::EPSILON),
        (0.0, 100.0 + f64::EPSILON),
        (0.0, 256.0),
    ];

    let mut out = ColorStats {
        variance: [0.0; 8],
        entropy: [0.0; 8],
        skewness: [0.0; 8],
    };
    for (c, values) in channels.iter().enumerate() {
        out.entropy[c] = histogram_entropy(values, ranges[c].0, ranges[c].1);
        if c == 3 {
            // circular mean via the angular resultant
            let (ss, cc) = values.iter().fold((0.0, 0.0), |(ss, cc), &h| {
                let rad = h.to_radians();
                (ss + rad.sin(), cc + rad.cos())
            });
            let center = ss.atan2(cc).to_degrees();
            let deltas: Vec<f64> = values.iter().map(|&h| hue_delta(h, center)).collect();
            let (var, skew) = moments(&deltas);
            out.variance[c] = var;
            out.skewness[c] = skew;
        } else {
            let (var, skew) = moments(values);
            out.variance[c] = var;
            out.skewness[c] = skew;
        }
    }
    Ok(out)
}
