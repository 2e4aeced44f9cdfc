use super::image::RasterImage;

/// Dense f64 grid used for smoothed intensities and gradient magnitudes.
#[derive(Debug, Clone)]
pub struct ScalarField {
    width: usize,
    height: usize,
    data: Vec<f64>,
}

impl ScalarField {
    pub fn new(width: usize, height: usize, data: Vec<f64>) -> Self {
        assert_eq!(data.len(), width * height);
        Self {
            width,
            height,
            data,
        }
    }

    pub fn from_gray(img: &RasterImage) -> Self {
        assert_eq!(img.channels(), 1);
        Self {
            width: img.width(),
            height: img.height(),
            data: img.data().iter().map(|&v| f64::from(v)).collect(),
        }
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn data(&self) -> &[f64] {
        &self.data
    }

    #[inline]
    pub fn get(&self, x: usize, y: usize) -> f64 {
        self.data[y * self.width + x]
    }

    /// Replicate-padded accessor.
    #[inline]
    fn get_clamped(&self, x: i64, y: i64) -> f64 {
        let x = x.clamp(0, self.width as i64 - 1) as usize;
        let y = y.clamp(0, self.height as i64 - 1) as usize;
        self.data[y * self.width + x]
    }

    /// Separable Gaussian blur with kernel radius ceil(3*sigma) and
    /// replicate borders.
    pub fn gaussian_blurred(&self, sigma: f64) -> ScalarField {
        assert!(sigma > 0.0);
        let radius = (3.0 * sigma).ceil() as i64;
        let mut kernel = Vec::with_capacity((2 * radius + 1) as usize);
        for i in -radius..=radius {
            kernel.push((-0.5 * (i as f64 / sigma).powi(2)).exp());
        }
        let sum: f64 = kernel.iter().sum();
        for k in &mut kernel {
            *k /= sum;
        }

        let mut horiz = vec![0.0; self.data.len()];
        for y in 0..self.height as i64 {
            for x in 0..self.width as i64 {
                let mut acc = 0.0;
                for (ki, k) in kernel.iter().enumerate() {
                    acc += k * self.get_clamped(x + ki as i64 - radius, y);
                }
                horiz[y as usize * self.width + x as usize] = acc;
            }
        }
        let horiz = ScalarField::new(self.width, self.height, horiz);

        let mut out = vec![0.0; self.data.len()];
        for y in 0..self.height as i64 {
            for x in 0..self.width as i64 {
                let mut acc = 0.0;
                for (ki, k) in kernel.iter().enumerate() {
                    acc += k * horiz.get_clamped(x, y + ki as i64 - radius);
                }
                out[y as usize * self.width + x as usize] = acc;
            }
        }
        ScalarField::new(self.width, self.height, out)
    }

    /// Gradient magnitude from central differences with replicate borders.
    pub fn gradient_magnitude(&self) -> ScalarField {
        let mut out = vec![0.0; self.data.len()];
        for y in 0..self.height as i64 {
            for x in 0..self.width as i64 {
                let gx = (self.get_clamped(x + 1, y) - self.get_clamped(x - 1, y)) / 2.0;
                let gy = (self.get_clamped(x, y + 1) - self.get_clamped(x, y - 1)) / 2.0;
                out[y as usize * self.width + x as usize] = (gx * gx + gy * gy).sqrt();
            }
        }
        ScalarField::new(self.width, self.height, out)
    }

    /// Bilinear interpolation at a subpixel position; coordinates are
    /// clamped to the valid range first.
    pub fn bilinear(&self, x: f64, y: f64) -> f64 {
        let x = x.clamp(0.0, (self.width - 1) as f64);
        let y = y.clamp(0.0, (self.height - 1) as f64);
        let x0 = x.floor() as usize;
        let y0 = y.floor() as usize;
        let x1 = (x0 + 1).min(self.width - 1);
        let y1 = (y0 + 1).min(self.height - 1);
        let fx = x - x0 as f64;
        let fy = y - y0 as f64;
        let top = self.get(x0, y0) * (1.0 - fx) + self.get(x1, y0) * fx;
        let bot = self.get(x0, y1) * (1.0 - fx) + self.get(x1, y1) * fx;
        top * (1.0 - fy) + bot * fy
    }
}
