//! Greedy active contour ("snake") minimization.
//!
//! A closed polygon moves to reduce a discrete energy that combines
//! spacing uniformity, bending, attraction to strong smoothed-image
//! gradients, and a pressure potential that inflates or deflates the
//! contour. Each sweep moves one point at a time to the best position in
//! its 3x3 pixel neighborhood; a move is taken only when it strictly
//! lowers the whole-contour energy, so the energy trace is non-increasing
//! within a sweep by construction. Points are redistributed to uniform
//! arc length every few sweeps to keep the sampling density stable.
//!
//! The internal terms are normalized by the mean point spacing: spacing
//! deviation enters as (d_i - mean)^2 / mean^2 and bending as the squared
//! second difference over mean^4 (a discrete curvature). Unnormalized
//! pixel-squared terms grow with sampling density until single-point
//! moves can no longer pay for themselves and deflation deadlocks.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::raster::{BinaryMask, RasterImage, ScalarField};

use super::watershed::otsu_threshold;

/// Smoothing applied to the image before its gradient feeds the energy.
pub const SNAKE_SIGMA: f64 = 2.0;
/// Target inter-point spacing restored by resampling, in pixels.
pub const SNAKE_SPACING: f64 = 4.0;
/// Sweeps between arc-length resampling passes.
const RESAMPLE_EVERY: usize = 5;
/// Contours below this filled area are considered collapsed.
const MIN_AREA: f64 = 10.0;

/// Closed contour of subpixel points.
#[derive(Debug, Clone, PartialEq)]
pub struct SnakeContour {
    points: Vec<(f64, f64)>,
}

impl SnakeContour {
    /// Builds a contour, dropping consecutive duplicate points; at least 8
    /// distinct consecutive points must remain.
    pub fn new(points: Vec<(f64, f64)>) -> Result<Self> {
        let mut cleaned: Vec<(f64, f64)> = Vec::with_capacity(points.len());
        for p in points {
            if cleaned.last() != Some(&p) {
                cleaned.push(p);
            }
        }
        if cleaned.len() > 1 && cleaned.first() == cleaned.last() {
            cleaned.pop();
        }
        if cleaned.len() < 8 {
            return Err(Error::DegenerateContour(format!(
                "{} distinct points, need at least 8",
                cleaned.len()
            )));
        }
        Ok(Self { points: cleaned })
    }

    /// Circle sampled so adjacent points sit roughly `SNAKE_SPACING` apart.
    pub fn circle(cx: f64, cy: f64, radius: f64, n_points: usize) -> Result<Self> {
        let n = n_points.max(8);
        let pts = (0..n)
            .map(|i| {
                let t = 2.0 * std::f64::consts::PI * i as f64 / n as f64;
                (cx + radius * t.cos(), cy + radius * t.sin())
            })
            .collect();
        Self::new(pts)
    }

    pub fn points(&self) -> &[(f64, f64)] {
        &self.points
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    /// Absolute shoelace area of the polygon.
    pub fn area(&self) -> f64 {
        let n = self.points.len();
        let mut acc = 0.0;
        for i in 0..n {
            let (x0, y0) = self.points[i];
            let (x1, y1) = self.points[(i + 1) % n];
            acc += x0 * y1 - x1 * y0;
        }
        acc.abs() / 2.0
    }

    pub fn perimeter_length(&self) -> f64 {
        let n = self.points.len();
        (0..n)
            .map(|i| {
                let (x0, y0) = self.points[i];
                let (x1, y1) = self.points[(i + 1) % n];
                ((x1 - x0).powi(2) + (y1 - y0).powi(2)).sqrt()
            })
            .sum()
    }

    /// Redistributes points uniformly along the polygon, aiming for
    /// `spacing` between neighbors (never fewer than 8 points).
    pub fn resampled(&self, spacing: f64) -> Result<Self> {
        let total = self.perimeter_length();
        if total <= f64::EPSILON {
            return Err(Error::DegenerateContour("zero-length contour".into()));
        }
        let n_new = ((total / spacing).round() as usize).max(8);
        let step = total / n_new as f64;
        let n = self.points.len();
        let mut out = Vec::with_capacity(n_new);
        let mut seg = 0usize;
        let mut seg_start = 0.0;
        let mut seg_len = {
            let (x0, y0) = self.points[0];
            let (x1, y1) = self.points[1 % n];
            ((x1 - x0).powi(2) + (y1 - y0).powi(2)).sqrt()
        };
        for i in 0..n_new {
            let target = i as f64 * step;
            while target > seg_start + seg_len && seg < n - 1 {
                seg_start += seg_len;
                seg += 1;
                let (x0, y0) = self.points[seg];
                let (x1, y1) = self.points[(seg + 1) % n];
                seg_len = ((x1 - x0).powi(2) + (y1 - y0).powi(2)).sqrt();
            }
            let t = if seg_len > 0.0 {
                ((target - seg_start) / seg_len).clamp(0.0, 1.0)
            } else {
                0.0
            };
            let (x0, y0) = self.points[seg];
            let (x1, y1) = self.points[(seg + 1) % n];
            out.push((x0 + t * (x1 - x0), y0 + t * (y1 - y0)));
        }
        Self::new(out)
    }

    /// Rasterizes the polygon by even-odd scan fill over pixel centers.
    pub fn scan_fill(&self, width: usize, height: usize) -> Result<BinaryMask> {
        let n = self.points.len();
        let mut bits = vec![false; width * height];
        for y in 0..height {
            let yc = y as f64 + 0.5;
            let mut xs: Vec<f64> = Vec::new();
            for i in 0..n {
                let (x0, y0) = self.points[i];
                let (x1, y1) = self.points[(i + 1) % n];
                if (y0 <= yc && y1 > yc) || (y1 <= yc && y0 > yc) {
                    let t = (yc - y0) / (y1 - y0);
                    xs.push(x0 + t * (x1 - x0));
                }
            }
            xs.sort_by(|a, b| a.partial_cmp(b).unwrap());
            for x in 0..width {
                let xc = x as f64 + 0.5;
                let crossings = xs.partition_point(|&v| v < xc);
                if crossings % 2 == 1 {
                    bits[y * width + x] = true;
                }
            }
        }
        BinaryMask::from_bits(width, height, bits)
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default)]
pub struct EnergyWeights {
    /// Spacing-uniformity (tension) weight.
    pub alpha: f64,
    /// Bending (rigidity) weight.
    pub beta: f64,
    /// Image-gradient attraction weight.
    pub w_img: f64,
    /// Pressure weight; positive deflates, negative inflates.
    pub w_con: f64,
}

impl Default for EnergyWeights {
    fn default() -> Self {
        Self {
            alpha: 1.0,
            beta: 1.0,
            w_img: 1.2,
            w_con: 0.2,
        }
    }
}

impl EnergyWeights {
    pub fn validate(&self) -> Result<()> {
        if self.alpha < 0.0 || self.beta < 0.0 || self.w_img < 0.0 {
            return Err(Error::InvalidConfig(
                "alpha, beta and w_img must be nonnegative".into(),
            ));
        }
        Ok(())
    }
}

/// Smoothed gradient-magnitude field used by the image energy term.
pub fn gradient_field(gray: &RasterImage) -> ScalarField {
    ScalarField::from_gray(gray)
        .gaussian_blurred(SNAKE_SIGMA)
        .gradient_magnitude()
}

fn check_bounds(points: &[(f64, f64)], width: usize, height: usize) -> Result<()> {
    for &(x, y) in points {
        if x < 0.0 || y < 0.0 || x > (width - 1) as f64 || y > (height - 1) as f64 {
            return Err(Error::ContourOutOfBounds {
                x,
                y,
                width,
                height,
            });
        }
    }
    Ok(())
}

fn energy_of_points(points: &[(f64, f64)], field: &ScalarField, w: &EnergyWeights) -> f64 {
    let n = points.len();
    let mut spacings = Vec::with_capacity(n);
    let (mut cx, mut cy) = (0.0, 0.0);
    for i in 0..n {
        let (x0, y0) = points[(i + n - 1) % n];
        let (x1, y1) = points[i];
        spacings.push(((x1 - x0).powi(2) + (y1 - y0).powi(2)).sqrt());
        cx += x1;
        cy += y1;
    }
    cx /= n as f64;
    cy /= n as f64;
    let mean_d: f64 = spacings.iter().sum::<f64>() / n as f64;
    if mean_d <= f64::EPSILON {
        return f64::INFINITY;
    }
    let mean_d2 = mean_d * mean_d;
    let mean_d4 = mean_d2 * mean_d2;

    let mut total = 0.0;
    for i in 0..n {
        let (px, py) = points[(i + n - 1) % n];
        let (x, y) = points[i];
        let (nx, ny) = points[(i + 1) % n];

        let dev = (spacings[i] - mean_d) / mean_d;
        let continuity = dev * dev;

        let sx = px - 2.0 * x + nx;
        let sy = py - 2.0 * y + ny;
        let curvature = (sx * sx + sy * sy) / mean_d4;

        let g = field.bilinear(x, y);
        let image = -(g * g);

        let pressure = ((x - cx).powi(2) + (y - cy).powi(2)).sqrt();

        total += w.alpha * continuity + w.beta * curvature + w.w_img * image + w.w_con * pressure;
    }
    total
}

/// Total discrete energy of a contour over an image.
pub fn snake_energy(c: &SnakeContour, gray: &RasterImage, w: &EnergyWeights) -> Result<f64> {
    if gray.channels() != 1 {
        return Err(Error::InvalidInput("snake expects a grayscale image".into()));
    }
    w.validate()?;
    check_bounds(c.points(), gray.width(), gray.height())?;
    let field = gradient_field(gray);
    Ok(energy_of_points(c.points(), &field, w))
}

/// One record per greedy sweep. `energy_start` is measured after any
/// resampling that opened the sweep, so `energy_end <= energy_start`
/// holds exactly for every record.
#[derive(Debug, Clone)]
pub struct SweepStats {
    pub energy_start: f64,
    pub energy_end: f64,
    pub moved: usize,
    pub resampled: bool,
}

#[derive(Debug, Clone)]
pub struct SnakeRun {
    pub mask: BinaryMask,
    pub contour: SnakeContour,
    pub sweeps: Vec<SweepStats>,
}

/// Greedy minimization driver; returns the filled mask plus the contour
/// and per-sweep energy trace.
pub fn snake_segment_with_trace(
    gray: &RasterImage,
    init: &SnakeContour,
    w: &EnergyWeights,
    max_iter: usize,
    tol: f64,
) -> Result<SnakeRun> {
    if gray.channels() != 1 {
        return Err(Error::InvalidInput("snake expects a grayscale image".into()));
    }
    if max_iter < 1 {
        return Err(Error::InvalidConfig("max_iter must be >= 1".into()));
    }
    if !(tol > 0.0 && tol < 1.0) {
        return Err(Error::InvalidConfig(format!(
            "tol must be in (0, 1), got {tol}"
        )));
    }
    w.validate()?;
    let (width, height) = (gray.width(), gray.height());
    check_bounds(init.points(), width, height)?;
    let field = gradient_field(gray);

    let mut points = init.points().to_vec();
    let mut sweeps = Vec::new();
    const MOVES: [(f64, f64); 8] = [
        (0.0, -1.0),
        (-1.0, 0.0),
        (1.0, 0.0),
        (0.0, 1.0),
        (-1.0, -1.0),
        (1.0, -1.0),
        (-1.0, 1.0),
        (1.0, 1.0),
    ];

    for sweep in 0..max_iter {
        let mut resampled = false;
        if sweep > 0 && sweep % RESAMPLE_EVERY == 0 {
            let contour = SnakeContour::new(points.clone())?;
            points = contour.resampled(SNAKE_SPACING)?.points().to_vec();
            resampled = true;
        }
        let n = points.len();
        let energy_start = energy_of_points(&points, &field, w);
        let mut current = energy_start;
        let mut moved = 0usize;
        for i in 0..n {
            let original = points[i];
            let mut best = current;
            let mut best_pos: Option<(f64, f64)> = None;
            for &(dx, dy) in &MOVES {
                let cand = (original.0 + dx, original.1 + dy);
                if cand.0 < 0.0
                    || cand.1 < 0.0
                    || cand.0 > (width - 1) as f64
                    || cand.1 > (height - 1) as f64
                {
                    continue;
                }
                points[i] = cand;
                let e = energy_of_points(&points, &field, w);
                if e < best {
                    best = e;
                    best_pos = Some(cand);
                }
            }
            match best_pos {
                Some(p) => {
                    points[i] = p;
                    current = best;
                    moved += 1;
                }
                None => points[i] = original,
            }
        }
        debug_assert!(current <= energy_start, "greedy sweep raised the energy");
        sweeps.push(SweepStats {
            energy_start,
            energy_end: current,
            moved,
            resampled,
        });
        if (moved as f64) < tol * n as f64 {
            break;
        }
    }

    let contour = SnakeContour::new(points)?;
    if contour.area() < MIN_AREA {
        return Err(Error::DegenerateContour(format!(
            "contour collapsed to area {:.1} px^2",
            contour.area()
        )));
    }
    let mask = contour.scan_fill(width, height)?;
    Ok(SnakeRun {
        mask,
        contour,
        sweeps,
    })
}

pub fn snake_segment(
    gray: &RasterImage,
    init: &SnakeContour,
    w: &EnergyWeights,
    max_iter: usize,
    tol: f64,
) -> Result<BinaryMask> {
    snake_segment_with_trace(gray, init, w, max_iter, tol).map(|run| run.mask)
}

/// Initial contour: a circle at the Otsu dark-region centroid with 1.2x
/// its equivalent radius, falling back to an image-centered circle when
/// thresholding finds nothing.
pub fn default_snake_init(gray: &RasterImage) -> Result<SnakeContour> {
    assert_eq!(gray.channels(), 1);
    let (w, h) = (gray.width(), gray.height());
    let (cx, cy, radius) = match otsu_threshold(gray) {
        Some(t) => {
            let dark = BinaryMask::from_fn(w, h, |x, y| gray.gray(x, y) <= t)?;
            let (cx, cy) = dark.centroid()?;
            let r_equiv = (dark.area() as f64 / std::f64::consts::PI).sqrt();
            (cx, cy, 1.2 * r_equiv)
        }
        None => (
            (w - 1) as f64 / 2.0,
            (h - 1) as f64 / 2.0,
            0.45 * w.min(h) as f64,
        ),
    };
    let n = ((2.0 * std::f64::consts::PI * radius / SNAKE_SPACING).round() as usize).max(16);
    let pts = (0..n)
        .map(|i| {
            let t = 2.0 * std::f64::consts::PI * i as f64 / n as f64;
            (
                (cx + radius * t.cos()).clamp(0.0, (w - 1) as f64),
                (cy + radius * t.sin()).clamp(0.0, (h - 1) as f64),
            )
        })
        .collect();
    SnakeContour::new(pts)
}
