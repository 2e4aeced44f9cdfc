//! Shape descriptors: asymmetry about the principal axes, normalized
//! compactness, radial boundary variance and the Feret diameter.

use crate::error::{Error, Result};
use crate::raster::BinaryMask;

type Vec2 = (f64, f64);

/// Principal axis directions from the second central moments of the
/// foreground. Degenerate (isotropic) masks fall back to the x/y axes.
fn principal_axes(m: &BinaryMask) -> Result<(Vec2, Vec2, Vec2)> {
    let (cx, cy) = m.centroid()?;
    let (mut mxx, mut myy, mut mxy) = (0.0, 0.0, 0.0);
    for (x, y) in m.foreground() {
        let dx = x as f64 - cx;
        let dy = y as f64 - cy;
        mxx += dx * dx;
        myy += dy * dy;
        mxy += dx * dy;
    }
    let theta = 0.5 * (2.0 * mxy).atan2(mxx - myy);
    let major = (theta.cos(), theta.sin());
    let minor = (-theta.sin(), theta.cos());
    Ok(((cx, cy), major, minor))
}

/// Rasterizes the reflection of `m` across the axis line through
/// `center`, then scores |m XOR reflection| / (2 |m|). Reflections
/// leaving the canvas are dropped.
fn reflect_score(m: &BinaryMask, center: (f64, f64), axis: (f64, f64)) -> f64 {
    let (w, h) = (m.width(), m.height());
    let mut reflected = vec![false; w * h];
    for (x, y) in m.foreground() {
        let px = x as f64 - center.0;
        let py = y as f64 - center.1;
        let dot = px * axis.0 + py * axis.1;
        let rx = (2.0 * dot * axis.0 - px + center.0).round();
        let ry = (2.0 * dot * axis.1 - py + center.1).round();
        if rx >= 0.0 && ry >= 0.0 && (rx as usize) < w && (ry as usize) < h {
            reflected[ry as usize * w + rx as usize] = true;
        }
    }
    let xor = m
        .bits()
        .iter()
        .zip(&reflected)
        .filter(|(&a, &b)| a != b)
        .count();
    xor as f64 / (2.0 * m.area() as f64)
}

/// Mean over the two principal axes of |m XOR reflect(m)| / (2 |m|).
pub fn asymmetry(m: &BinaryMask) -> Result<f64> {
    if m.is_empty() {
        return Err(Error::EmptyMask);
    }
    let (center, major, minor) = principal_axes(m)?;
    Ok((reflect_score(m, center, major) + reflect_score(m, center, minor)) / 2.0)
}

/// Isoperimetric quotient P^2 / (4 pi A) with the boundary-pixel-count
/// perimeter. A digital disk bottoms out near 8/pi^2 (~0.81) rather than
/// 1 because the 4-neighbor boundary count of a circle approaches
/// 4*sqrt(2)*r, under the 2*pi*r arc length; ordering across shapes is
/// what downstream consumers rely on.
pub fn compactness(m: &BinaryMask) -> Result<f64> {
    if m.is_empty() {
        return Err(Error::EmptyMask);
    }
    let p = m.perimeter()? as f64;
    let a = m.area() as f64;
    Ok(p * p / (4.0 * std::f64::consts::PI * a))
}

/// Scale-invariant boundary irregularity: Var(r) / mean(r)^2 over the
/// centroid-to-boundary distances.
pub fn radial_variance(m: &BinaryMask) -> Result<f64> {
    if m.is_empty() {
        return Err(Error::EmptyMask);
    }
    let boundary = m.boundary();
    if boundary.len() < 8 {
        return Err(Error::DegenerateMask(format!(
            "{} boundary pixels, need at least 8",
            boundary.len()
        )));
    }
    let (cx, cy) = m.centroid()?;
    let radii: Vec<f64> = boundary
        .iter()
        .map(|&(x, y)| ((x as f64 - cx).powi(2) + (y as f64 - cy).powi(2)).sqrt())
        .collect();
    let mean = radii.iter().sum::<f64>() / radii.len() as f64;
    if mean <= f64::EPSILON {
        return Err(Error::DegenerateMask("zero mean boundary radius".into()));
    }
    let var = radii.iter().map(|r| (r - mean).powi(2)).sum::<f64>() / radii.len() as f64;
    Ok(var / (mean * mean))
}

/// Maximum pairwise distance between boundary pixels, via the convex hull.
pub fn feret_diameter(m: &BinaryMask) -> Result<f64> {
    if m.is_empty() {
        return Err(Error::EmptyMask);
    }
    let pts = m.boundary();
    let hull = convex_hull(&pts);
    let mut best = 0.0f64;
    for i in 0..hull.len() {
        for j in i + 1..hull.len() {
            let dx = hull[i].0 as f64 - hull[j].0 as f64;
            let dy = hull[i].1 as f64 - hull[j].1 as f64;
            best = best.max((dx * dx + dy * dy).sqrt());
        }
    }
    Ok(best)
}

/// Andrew monotone-chain convex hull over integer points.
fn convex_hull(points: &[(usize, usize)]) -> Vec<(i64, i64)> {
    let mut pts: Vec<(i64, i64)> = points.iter().map(|&(x, y)| (x as i64, y as i64)).collect();
    pts.sort();
    pts.dedup();
    if pts.len() <= 2 {
        return pts;
    }
    let cross = |o: (i64, i64), a: (i64, i64), b: (i64, i64)| {
        (a.0 - o.0) * (b.1 - o.1) - (a.1 - o.1) * (b.0 - o.0)
    };
    let mut lower: Vec<(i64, i64)> = Vec::new();
    for &p in &pts {
        while lower.len() >= 2 && cross(lower[lower.len() - 2], lower[lower.len() - 1], p) <= 0 {
            lower.pop();
        }
        lower.push(p);
    }
    let mut upper: Vec<(i64, i64)> = Vec::new();
    for &p in pts.iter().rev() {
        while upper.len() >= 2 && cross(upper[upper.len() - 2], upper[upper.len() - 1], p) <= 0 {
            upper.pop();
        }
        upper.push(p);
    }
    lower.pop();
    upper.pop();
    lower.extend(upper);
    lower
}
