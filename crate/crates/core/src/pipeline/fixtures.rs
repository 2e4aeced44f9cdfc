//! Deterministic synthetic lesion corpus: round, uniformly colored
//! "benign" blobs against irregular, mottled "malignant" ones, with exact
//! ground-truth masks and a CSV manifest. Lets the whole pipeline run
//! without any downloaded dataset.

use std::path::Path;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::classifiers::ClassLabel;
use crate::error::Result;
use crate::raster::{io, BinaryMask, RasterImage};

use super::dataset::{DatasetRecord, SourceKind};

#[derive(Debug, Clone)]
pub struct FixtureSpec {
    pub per_class: usize,
    pub seed: u64,
    pub size: usize,
}

impl Default for FixtureSpec {
    fn default() -> Self {
        Self {
            per_class: 20,
            seed: 7,
            size: 128,
        }
    }
}

struct LesionShape {
    cx: f64,
    cy: f64,
    base_radius: f64,
    harmonics: Vec<(f64, f64, f64)>, // (frequency, amplitude, phase)
}

impl LesionShape {
    fn radius_at(&self, theta: f64) -> f64 {
        let mut r = 1.0;
        for &(freq, amp, phase) in &self.harmonics {
            r += amp * (freq * theta + phase).sin();
        }
        self.base_radius * r.max(0.3)
    }

    fn contains(&self, x: usize, y: usize) -> bool {
        let dx = x as f64 - self.cx;
        let dy = y as f64 - self.cy;
        let r = self.radius_at(dy.atan2(dx));
        dx * dx + dy * dy <= r * r
    }
}

const SKIN: [f64; 3] = [208.0, 172.0, 152.0];
const BENIGN_FILL: [f64; 3] = [122.0, 84.0, 66.0];
const MALIGNANT_PALETTE: [[f64; 3]; 4] = [
    [58.0, 34.0, 30.0],
    [112.0, 62.0, 46.0],
    [152.0, 98.0, 72.0],
    [84.0, 48.0, 58.0],
];

fn synth_case(
    rng: &mut ChaCha8Rng,
    size: usize,
    label: ClassLabel,
) -> (RasterImage, BinaryMask) {
    let half = size as f64 / 2.0;
    let jitter = size as f64 / 12.0;
    let shape = LesionShape {
        cx: half + rng.gen_range(-jitter..jitter),
        cy: half + rng.gen_range(-jitter..jitter),
        base_radius: rng.gen_range(0.24..0.30) * size as f64,
        harmonics: match label {
            ClassLabel::NonMelanoma => vec![
                (2.0, rng.gen_range(0.0..0.03), rng.gen_range(0.0..std::f64::consts::TAU)),
                (3.0, rng.gen_range(0.0..0.02), rng.gen_range(0.0..std::f64::consts::TAU)),
            ],
            ClassLabel::Melanoma => vec![
                (2.0, rng.gen_range(0.06..0.12), rng.gen_range(0.0..std::f64::consts::TAU)),
                (3.0, rng.gen_range(0.05..0.10), rng.gen_range(0.0..std::f64::consts::TAU)),
                (5.0, rng.gen_range(0.04..0.08), rng.gen_range(0.0..std::f64::consts::TAU)),
                (7.0, rng.gen_range(0.03..0.06), rng.gen_range(0.0..std::f64::consts::TAU)),
            ],
        },
    };

    let mask = BinaryMask::from_fn(size, size, |x, y| shape.contains(x, y)).expect("valid size");

    // mottling grid for malignant interiors
    let cell = 7usize;
    let cells_per_row = size / cell + 2;
    let patches: Vec<usize> = (0..cells_per_row * cells_per_row)
        .map(|_| rng.gen_range(0..MALIGNANT_PALETTE.len()))
        .collect();

    // per-pixel noise drawn in row-major order for determinism
    let mut data = Vec::with_capacity(size * size * 3);
    for y in 0..size {
        for x in 0..size {
            let base = if mask.get(x, y) {
                match label {
                    ClassLabel::NonMelanoma => BENIGN_FILL,
                    ClassLabel::Melanoma => {
                        let idx = (y / cell) * cells_per_row + x / cell;
                        MALIGNANT_PALETTE[patches[idx]]
                    }
                }
            } else {
                SKIN
            };
            let spread = if mask.get(x, y) && label == ClassLabel::Melanoma {
                10.0
            } else {
                4.0
            };
            for &channel in &base {
                let v = channel + rng.gen_range(-spread..spread);
                data.push(v.round().clamp(0.0, 255.0) as u8);
            }
        }
    }
    let img = RasterImage::new(size, size, 3, data).expect("valid size");
    (img, mask)
}

/// Writes `per_class` benign plus `per_class` malignant cases under
/// `out_dir` (images/, masks/, manifest.csv) and returns their records.
pub fn generate_fixtures(out_dir: &Path, spec: &FixtureSpec) -> Result<Vec<DatasetRecord>> {
    std::fs::create_dir_all(out_dir.join("images"))?;
    std::fs::create_dir_all(out_dir.join("masks"))?;

    let mut records = Vec::new();
    let mut manifest = String::from("id,image,mask,label\n");
    for (label, prefix) in [
        (ClassLabel::NonMelanoma, "benign"),
        (ClassLabel::Melanoma, "malignant"),
    ] {
        for i in 0..spec.per_class {
            let id = format!("{prefix}_{i:03}");
            // one independent stream per case keeps cases stable when
            // per_class changes
            let mut rng = ChaCha8Rng::seed_from_u64(
                spec.seed ^ (i as u64 + 1).wrapping_mul(if prefix == "benign" { 0x9e37 } else { 0x7f4a }),
            );
            let (img, mask) = synth_case(&mut rng, spec.size, label);
            let image_rel = format!("images/{id}.png");
            let mask_rel = format!("masks/{id}.png");
            io::write_image(&img, &out_dir.join(&image_rel))?;
            io::write_mask(&mask, &out_dir.join(&mask_rel))?;
            manifest.push_str(&format!("{id},{image_rel},{mask_rel},{label}\n"));
            records.push(DatasetRecord {
                id,
                image_path: out_dir.join(&image_rel),
                truth_mask_path: Some(out_dir.join(&mask_rel)),
                label: Some(label),
                source: SourceKind::Custom,
            });
        }
    }
    std::fs::write(out_dir.join("manifest.csv"), manifest)?;
    records.sort_by(|a, b| a.id.cmp(&b.id));
    Ok(records)
}
