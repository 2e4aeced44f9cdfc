//! Binary morphology: dilation, erosion, spur removal, set operations,
//! connected components and hole filling.

use super::mask::BinaryMask;
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SeShape {
    Disk,
    Square,
    Line,
}

/// Flat structuring element with its origin at the center.
#[derive(Debug, Clone)]
pub struct StructuringElement {
    shape: SeShape,
    offsets: Vec<(i64, i64)>,
}

impl StructuringElement {
    /// Euclidean disk: offsets with dx^2 + dy^2 <= radius^2.
    /// Radius 1 yields the 4-connected plus shape.
    pub fn disk(radius: u32) -> Self {
        let r = radius as i64;
        let mut offsets = Vec::new();
        for dy in -r..=r {
            for dx in -r..=r {
                if dx * dx + dy * dy <= r * r {
                    offsets.push((dx, dy));
                }
            }
        }
        Self {
            shape: SeShape::Disk,
            offsets,
        }
    }

    /// Chebyshev square of half-width `radius`.
    pub fn square(radius: u32) -> Self {
        let r = radius as i64;
        let mut offsets = Vec::new();
        for dy in -r..=r {
            for dx in -r..=r {
                offsets.push((dx, dy));
            }
        }
        Self {
            shape: SeShape::Square,
            offsets,
        }
    }

    /// Digital line of `length` pixels through the origin at `angle_deg`
    /// (0 = horizontal, counted toward the positive y axis at 90).
    pub fn line(length: u32, angle_deg: f64) -> Self {
        assert!(length >= 1);
        let half = (length as i64 - 1) / 2;
        let (s, c) = angle_deg.to_radians().sin_cos();
        let mut offsets = Vec::new();
        for i in -half..=half {
            let dx = (i as f64 * c).round() as i64;
            let dy = (i as f64 * s).round() as i64;
            if !offsets.contains(&(dx, dy)) {
                offsets.push((dx, dy));
            }
        }
        Self {
            shape: SeShape::Line,
            offsets,
        }
    }

    pub fn shape(&self) -> SeShape {
        self.shape
    }

    pub fn offsets(&self) -> &[(i64, i64)] {
        &self.offsets
    }
}

/// Output pixel is set iff the element placed there overlaps foreground;
/// offsets falling outside the image are ignored.
pub fn dilate(m: &BinaryMask, se: &StructuringElement) -> BinaryMask {
    BinaryMask::from_fn(m.width(), m.height(), |x, y| {
        se.offsets()
            .iter()
            .any(|&(dx, dy)| m.get_signed(x as i64 + dx, y as i64 + dy))
    })
    .expect("same dimensions as input")
}

/// Output pixel is set iff every element offset lands on foreground;
/// pixels outside the image count as background, so erosion also shrinks
/// away from the borders.
pub fn erode(m: &BinaryMask, se: &StructuringElement) -> BinaryMask {
    BinaryMask::from_fn(m.width(), m.height(), |x, y| {
        se.offsets()
            .iter()
            .all(|&(dx, dy)| m.get_signed(x as i64 + dx, y as i64 + dy))
    })
    .expect("same dimensions as input")
}

fn spur_pass(m: &BinaryMask) -> BinaryMask {
    BinaryMask::from_fn(m.width(), m.height(), |x, y| {
        if !m.get(x, y) {
            return false;
        }
        let mut neighbors = 0;
        for dy in -1i64..=1 {
            for dx in -1i64..=1 {
                if dx == 0 && dy == 0 {
                    continue;
                }
                if m.get_signed(x as i64 + dx, y as i64 + dy) {
                    neighbors += 1;
                }
            }
        }
        neighbors != 1
    })
    .expect("same dimensions as input")
}

/// Each iteration synchronously deletes foreground pixels with exactly one
/// 8-connected foreground neighbor. Stops early once a fixed point is hit.
pub fn remove_spurs(m: &BinaryMask, iterations: usize) -> BinaryMask {
    assert!(iterations >= 1);
    let mut cur = m.clone();
    for _ in 0..iterations {
        let next = spur_pass(&cur);
        if next == cur {
            break;
        }
        cur = next;
    }
    cur
}

/// Spur removal iterated until nothing changes.
pub fn remove_spurs_fixpoint(m: &BinaryMask) -> BinaryMask {
    let mut cur = m.clone();
    loop {
        let next = spur_pass(&cur);
        if next == cur {
            return cur;
        }
        cur = next;
    }
}

fn check_dims(a: &BinaryMask, b: &BinaryMask) -> Result<()> {
    if !a.same_dims(b) {
        return Err(Error::DimensionMismatch {
            expected: format!("{}x{}", a.width(), a.height()),
            got: format!("{}x{}", b.width(), b.height()),
        });
    }
    Ok(())
}

pub fn mask_and(a: &BinaryMask, b: &BinaryMask) -> Result<BinaryMask> {
    check_dims(a, b)?;
    let bits = a
        .bits()
        .iter()
        .zip(b.bits())
        .map(|(&x, &y)| x && y)
        .collect();
    BinaryMask::from_bits(a.width(), a.height(), bits)
}

/// a AND NOT b.
pub fn mask_subtract(a: &BinaryMask, b: &BinaryMask) -> Result<BinaryMask> {
    check_dims(a, b)?;
    let bits = a
        .bits()
        .iter()
        .zip(b.bits())
        .map(|(&x, &y)| x && !y)
        .collect();
    BinaryMask::from_bits(a.width(), a.height(), bits)
}

pub fn mask_complement(a: &BinaryMask) -> BinaryMask {
    let bits = a.bits().iter().map(|&x| !x).collect();
    BinaryMask::from_bits(a.width(), a.height(), bits).expect("same dimensions as input")
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Connectivity {
    Four,
    Eight,
}

impl Connectivity {
    pub fn offsets(self) -> &'static [(i64, i64)] {
        match self {
            Connectivity::Four => &[(0, -1), (-1, 0), (1, 0), (0, 1)],
            Connectivity::Eight => &[
                (0, -1),
                (-1, 0),
                (1, 0),
                (0, 1),
                (-1, -1),
                (1, -1),
                (-1, 1),
                (1, 1),
            ],
        }
    }
}

/// Label connected foreground components; label 0 means background.
/// Components are numbered in row-major order of their first pixel.
pub fn label_components(m: &BinaryMask, connectivity: Connectivity) -> (Vec<u32>, u32) {
    let (w, h) = (m.width(), m.height());
    let mut labels = vec![0u32; w * h];
    let mut next = 0u32;
    let mut stack = Vec::new();
    for start in 0..w * h {
        if !m.bits()[start] || labels[start] != 0 {
            continue;
        }
        next += 1;
        labels[start] = next;
        stack.push(start);
        while let Some(idx) = stack.pop() {
            let (x, y) = ((idx % w) as i64, (idx / w) as i64);
            for &(dx, dy) in connectivity.offsets() {
                let (nx, ny) = (x + dx, y + dy);
                if nx < 0 || ny < 0 || nx >= w as i64 || ny >= h as i64 {
                    continue;
                }
                let nidx = ny as usize * w + nx as usize;
                if m.bits()[nidx] && labels[nidx] == 0 {
                    labels[nidx] = next;
                    stack.push(nidx);
                }
            }
        }
    }
    (labels, next)
}

/// Keeps only the maximal-area component; area ties resolve to the
/// component whose first row-major pixel comes earliest.
pub fn largest_component(m: &BinaryMask, connectivity: Connectivity) -> BinaryMask {
    if m.is_empty() {
        return m.clone();
    }
    let (labels, count) = label_components(m, connectivity);
    let mut areas = vec![0usize; count as usize + 1];
    for &l in &labels {
        if l != 0 {
            areas[l as usize] += 1;
        }
    }
    // labels are assigned in row-major discovery order, so the smallest
    // label among maximal areas is the required tie-break
    let mut best = 1u32;
    for l in 2..=count {
        if areas[l as usize] > areas[best as usize] {
            best = l;
        }
    }
    let bits = labels.iter().map(|&l| l == best).collect();
    BinaryMask::from_bits(m.width(), m.height(), bits).expect("same dimensions as input")
}

/// Fills background regions not reachable from the image border
/// (4-connected background flood).
pub fn fill_holes(m: &BinaryMask) -> BinaryMask {
    let (w, h) = (m.width(), m.height());
    let mut outside = vec![false; w * h];
    let mut stack = Vec::new();
    for x in 0..w {
        for y in [0, h - 1] {
            let idx = y * w + x;
            if !m.bits()[idx] && !outside[idx] {
                outside[idx] = true;
                stack.push(idx);
            }
        }
    }
    for y in 0..h {
        for x in [0, w - 1] {
            let idx = y * w + x;
            if !m.bits()[idx] && !outside[idx] {
                outside[idx] = true;
                stack.push(idx);
            }
        }
    }
    while let Some(idx) = stack.pop() {
        let (x, y) = ((idx % w) as i64, (idx / w) as i64);
        for &(dx, dy) in Connectivity::Four.offsets() {
            let (nx, ny) = (x + dx, y + dy);
            if nx < 0 || ny < 0 || nx >= w as i64 || ny >= h as i64 {
                continue;
            }
            let nidx = ny as usize * w + nx as usize;
            if !m.bits()[nidx] && !outside[nidx] {
                outside[nidx] = true;
                stack.push(nidx);
            }
        }
    }
    let bits = m
        .bits()
        .iter()
        .zip(&outside)
        .map(|(&fg, &out)| fg || !out)
        .collect();
    BinaryMask::from_bits(w, h, bits).expect("same dimensions as input")
}
