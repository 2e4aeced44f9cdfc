use crate::error::{Error, Result};

/// Binary lesion/background mask, row-major, with the foreground count
/// cached at construction.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BinaryMask {
    width: usize,
    height: usize,
    bits: Vec<bool>,
    area: usize,
}

impl BinaryMask {
    pub fn from_bits(width: usize, height: usize, bits: Vec<bool>) -> Result<Self> {
        if width == 0 || height == 0 {
            return Err(Error::InvalidRaster(format!(
                "zero-sized mask {width}x{height}"
            )));
        }
        if bits.len() != width * height {
            return Err(Error::InvalidRaster(format!(
                "bit count {} does not match {width}x{height}",
                bits.len()
            )));
        }
        let area = bits.iter().filter(|&&b| b).count();
        Ok(Self {
            width,
            height,
            bits,
            area,
        })
    }

    pub fn from_fn<F: FnMut(usize, usize) -> bool>(
        width: usize,
        height: usize,
        mut f: F,
    ) -> Result<Self> {
        let mut bits = Vec::with_capacity(width * height);
        for y in 0..height {
            for x in 0..width {
                bits.push(f(x, y));
            }
        }
        Self::from_bits(width, height, bits)
    }

    pub fn empty(width: usize, height: usize) -> Result<Self> {
        Self::from_bits(width, height, vec![false; width * height])
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    #[inline]
    pub fn get(&self, x: usize, y: usize) -> bool {
        debug_assert!(x < self.width && y < self.height);
        self.bits[y * self.width + x]
    }

    #[inline]
    pub fn get_signed(&self, x: i64, y: i64) -> bool {
        if x < 0 || y < 0 || x >= self.width as i64 || y >= self.height as i64 {
            return false;
        }
        self.bits[y as usize * self.width + x as usize]
    }

    pub fn bits(&self) -> &[bool] {
        &self.bits
    }

    /// Foreground pixel count, O(1).
    pub fn area(&self) -> usize {
        self.area
    }

    pub fn is_empty(&self) -> bool {
        self.area == 0
    }

    pub fn same_dims(&self, other: &BinaryMask) -> bool {
        self.width == other.width && self.height == other.height
    }

    pub fn foreground(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        let w = self.width;
        self.bits
            .iter()
            .enumerate()
            .filter(|(_, &b)| b)
            .map(move |(i, _)| (i % w, i / w))
    }

    /// Foreground pixels with at least one 4-connected background neighbor;
    /// pixels outside the image count as background.
    pub fn boundary(&self) -> Vec<(usize, usize)> {
        let mut out = Vec::new();
        for (x, y) in self.foreground() {
            let (xi, yi) = (x as i64, y as i64);
            let edge = !self.get_signed(xi - 1, yi)
                || !self.get_signed(xi + 1, yi)
                || !self.get_signed(xi, yi - 1)
                || !self.get_signed(xi, yi + 1);
            if edge {
                out.push((x, y));
            }
        }
        out
    }

    /// Count of boundary pixels.
    pub fn perimeter(&self) -> Result<usize> {
        if self.is_empty() {
            return Err(Error::EmptyMask);
        }
        Ok(self.boundary().len())
    }

    /// Mean of foreground pixel coordinates.
    pub fn centroid(&self) -> Result<(f64, f64)> {
        if self.is_empty() {
            return Err(Error::EmptyMask);
        }
        let (mut sx, mut sy) = (0.0, 0.0);
        for (x, y) in self.foreground() {
            sx += x as f64;
            sy += y as f64;
        }
        let n = self.area as f64;
        Ok((sx / n, sy / n))
    }

    /// Tight bounding box of the foreground as (x0, y0, x1, y1), inclusive.
    pub fn bounding_box(&self) -> Option<(usize, usize, usize, usize)> {
        if self.is_empty() {
            return None;
        }
        let (mut x0, mut y0, mut x1, mut y1) = (self.width, self.height, 0, 0);
        for (x, y) in self.foreground() {
            x0 = x0.min(x);
            y0 = y0.min(y);
            x1 = x1.max(x);
            y1 = y1.max(y);
        }
        Some((x0, y0, x1, y1))
    }
}
