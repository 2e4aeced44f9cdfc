//! Marker-controlled immersion watershed.
//!
//! The gradient image is treated as topography and flooded from two
//! markers: an internal one inside the dark lesion region and an external
//! one covering definite background. Flooding pops the lowest-level
//! frontier pixel first (FIFO among equal levels, in push order) and the
//! flood level never recedes, so a basin spills over a saddle only once
//! the water reaches the saddle height. Each pixel is claimed by the first
//! basin that reaches it.

use std::cmp::Ordering;
use std::collections::BinaryHeap;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::raster::{
    dilate, erode, fill_holes, largest_component, mask_complement, remove_spurs_fixpoint,
    BinaryMask, Connectivity, RasterImage, ScalarField, StructuringElement,
};

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default)]
pub struct WatershedConfig {
    pub gaussian_sigma: f64,
    pub marker_erosion: u32,
    pub connectivity: u8,
}

impl Default for WatershedConfig {
    fn default() -> Self {
        Self {
            gaussian_sigma: 2.0,
            marker_erosion: 5,
            connectivity: 8,
        }
    }
}

impl WatershedConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.gaussian_sigma.is_finite() && self.gaussian_sigma > 0.0) {
            return Err(Error::InvalidConfig(format!(
                "gaussian_sigma must be positive, got {}",
                self.gaussian_sigma
            )));
        }
        if self.marker_erosion == 0 {
            return Err(Error::InvalidConfig("marker_erosion must be >= 1".into()));
        }
        self.connectivity_enum().map(|_| ())
    }

    pub fn connectivity_enum(&self) -> Result<Connectivity> {
        match self.connectivity {
            4 => Ok(Connectivity::Four),
            8 => Ok(Connectivity::Eight),
            other => Err(Error::InvalidConfig(format!(
                "connectivity must be 4 or 8, got {other}"
            ))),
        }
    }
}

/// Otsu threshold over the 256-bin histogram; `None` when every pixel has
/// the same intensity (no between-class variance anywhere). Pixels with
/// value <= threshold form the dark class.
pub fn otsu_threshold(gray: &RasterImage) -> Option<u8> {
    assert_eq!(gray.channels(), 1);
    let mut hist = [0u64; 256];
    for &v in gray.data() {
        hist[v as usize] += 1;
    }
    let total = gray.data().len() as f64;
    let total_sum: f64 = hist
        .iter()
        .enumerate()
        .map(|(v, &c)| v as f64 * c as f64)
        .sum();

    let mut best: Option<(f64, u8)> = None;
    let mut w0 = 0.0;
    let mut sum0 = 0.0;
    for (t, &count) in hist.iter().enumerate() {
        w0 += count as f64;
        sum0 += t as f64 * count as f64;
        let w1 = total - w0;
        if w0 == 0.0 || w1 == 0.0 {
            continue;
        }
        let mu0 = sum0 / w0;
        let mu1 = (total_sum - sum0) / w1;
        let between = w0 * w1 * (mu0 - mu1) * (mu0 - mu1);
        match best {
            Some((b, _)) if between <= b => {}
            _ => best = Some((between, t as u8)),
        }
    }
    match best {
        Some((b, t)) if b > 0.0 => Some(t),
        _ => None,
    }
}

/// Marker labels for flooding: 0 = unlabeled.
pub const MARKER_INTERNAL: u8 = 1;
pub const MARKER_EXTERNAL: u8 = 2;

struct QueueEntry {
    // gradient magnitudes are nonnegative, so IEEE bit patterns order
    // exactly like the values
    level_bits: u64,
    seq: u64,
    idx: usize,
}

impl PartialEq for QueueEntry {
    fn eq(&self, other: &Self) -> bool {
        self.level_bits == other.level_bits && self.seq == other.seq
    }
}
impl Eq for QueueEntry {}
impl PartialOrd for QueueEntry {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for QueueEntry {
    fn cmp(&self, other: &Self) -> Ordering {
        // reversed: BinaryHeap is a max-heap, we want the lowest
        // (level, seq) first
        (other.level_bits, other.seq).cmp(&(self.level_bits, self.seq))
    }
}

/// Floods `levels` from the nonzero labels in `markers` (row-major push
/// order) and returns a full labeling. Unreachable pixels keep label 0
/// only when the marker map has no labels at all.
pub fn flood_from_markers(
    levels: &ScalarField,
    markers: &[u8],
    connectivity: Connectivity,
) -> Vec<u8> {
    let (w, h) = (levels.width(), levels.height());
    assert_eq!(markers.len(), w * h);
    let mut labels = markers.to_vec();
    let mut heap = BinaryHeap::new();
    let mut seq = 0u64;
    for (idx, &m) in markers.iter().enumerate() {
        if m != 0 {
            heap.push(QueueEntry {
                level_bits: levels.data()[idx].to_bits(),
                seq,
                idx,
            });
            seq += 1;
        }
    }
    while let Some(entry) = heap.pop() {
        let (x, y) = ((entry.idx % w) as i64, (entry.idx / w) as i64);
        for &(dx, dy) in connectivity.offsets() {
            let (nx, ny) = (x + dx, y + dy);
            if nx < 0 || ny < 0 || nx >= w as i64 || ny >= h as i64 {
                continue;
            }
            let nidx = ny as usize * w + nx as usize;
            if labels[nidx] != 0 {
                continue;
            }
            labels[nidx] = labels[entry.idx];
            // the flood level may only rise
            let level_bits = levels.data()[nidx].to_bits().max(entry.level_bits);
            heap.push(QueueEntry {
                level_bits,
                seq,
                idx: nidx,
            });
            seq += 1;
        }
    }
    labels
}

/// Builds the internal/external marker map from the Otsu dark region.
pub fn build_markers(gray: &RasterImage, cfg: &WatershedConfig) -> Result<Vec<u8>> {
    let threshold = otsu_threshold(gray)
        .ok_or_else(|| Error::NoLesionFound("image has no dark region to threshold".into()))?;
    let (w, h) = (gray.width(), gray.height());
    let dark = BinaryMask::from_fn(w, h, |x, y| gray.gray(x, y) <= threshold)?;
    let se = StructuringElement::disk(cfg.marker_erosion);
    let internal = erode(&dark, &se);
    if internal.is_empty() {
        return Err(Error::NoLesionFound(
            "dark region vanished under marker erosion".into(),
        ));
    }
    let external_core = erode(&mask_complement(&dark), &se);

    let mut markers = vec![0u8; w * h];
    for (x, y) in external_core.foreground() {
        markers[y * w + x] = MARKER_EXTERNAL;
    }
    // the 1px border frame is certain background
    for x in 0..w {
        markers[x] = MARKER_EXTERNAL;
        markers[(h - 1) * w + x] = MARKER_EXTERNAL;
    }
    for y in 0..h {
        markers[y * w] = MARKER_EXTERNAL;
        markers[y * w + w - 1] = MARKER_EXTERNAL;
    }
    // internal wins any overlap; erosion keeps it off the border anyway
    for (x, y) in internal.foreground() {
        markers[y * w + x] = MARKER_INTERNAL;
    }
    Ok(markers)
}

/// Full watershed segmentation: smooth, take the gradient, flood from
/// markers, then smooth the basin boundary and keep one solid blob.
pub fn watershed_segment(gray: &RasterImage, cfg: &WatershedConfig) -> Result<BinaryMask> {
    if gray.channels() != 1 {
        return Err(Error::InvalidInput(
            "watershed expects a single-channel image".into(),
        ));
    }
    cfg.validate()?;
    let markers = build_markers(gray, cfg)?;
    let gradient = ScalarField::from_gray(gray)
        .gaussian_blurred(cfg.gaussian_sigma)
        .gradient_magnitude();
    let connectivity = cfg.connectivity_enum()?;
    let labels = flood_from_markers(&gradient, &markers, connectivity);

    let lesion = BinaryMask::from_bits(
        gray.width(),
        gray.height(),
        labels.iter().map(|&l| l == MARKER_INTERNAL).collect(),
    )?;
    let smoothed = remove_spurs_fixpoint(&dilate(&lesion, &StructuringElement::disk(1)));
    Ok(fill_holes(&largest_component(&smoothed, connectivity)))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn otsu_splits_bimodal() {
        let img = RasterImage::from_fn(16, 16, 1, |x, y, _| {
            if (4..12).contains(&x) && (4..12).contains(&y) {
                40
            } else {
                200
            }
        })
        .unwrap();
        let t = otsu_threshold(&img).unwrap();
        assert!((40..200).contains(&t), "threshold {t} between the modes");
    }

    #[test]
    fn otsu_rejects_constant() {
        let img = RasterImage::filled(8, 8, 1, 99).unwrap();
        assert!(otsu_threshold(&img).is_none());
    }

    #[test]
    fn constant_image_yields_no_lesion() {
        let img = RasterImage::filled(16, 16, 1, 120).unwrap();
        match watershed_segment(&img, &WatershedConfig::default()) {
            Err(Error::NoLesionFound(_)) => {}
            other => panic!("expected no-lesion error, got {other:?}"),
        }
    }

    /// Linear-scan reference flood: same rule as `flood_from_markers` but
    /// the minimum (level, seq) entry is found by exhaustive search over a
    /// plain list instead of a heap.
    fn flood_oracle(levels: &ScalarField, markers: &[u8], connectivity: Connectivity) -> Vec<u8> {
        let (w, h) = (levels.width(), levels.height());
        let mut labels = markers.to_vec();
        let mut queue: Vec<(u64, u64, usize)> = Vec::new();
        let mut seq = 0u64;
        for (idx, &m) in markers.iter().enumerate() {
            if m != 0 {
                queue.push((levels.data()[idx].to_bits(), seq, idx));
                seq += 1;
            }
        }
        while !queue.is_empty() {
            let mut best = 0;
            for i in 1..queue.len() {
                if (queue[i].0, queue[i].1) < (queue[best].0, queue[best].1) {
                    best = i;
                }
            }
            let (level, _, idx) = queue.remove(best);
            let (x, y) = ((idx % w) as i64, (idx / w) as i64);
            for &(dx, dy) in connectivity.offsets() {
                let (nx, ny) = (x + dx, y + dy);
                if nx < 0 || ny < 0 || nx >= w as i64 || ny >= h as i64 {
                    continue;
                }
                let nidx = ny as usize * w + nx as usize;
                if labels[nidx] != 0 {
                    continue;
                }
                labels[nidx] = labels[idx];
                queue.push((levels.data()[nidx].to_bits().max(level), seq, nidx));
                seq += 1;
            }
        }
        labels
    }

    #[test]
    fn flooding_matches_oracle_on_two_basin_grid() {
        // two valleys separated by a ridge along x = 3..=4
        let mut vals = Vec::new();
        for _y in 0..8 {
            for x in 0..8 {
                let v = match x {
                    0..=2 => x as f64,
                    3..=4 => 9.0,
                    _ => (7 - x) as f64,
                };
                vals.push(v);
            }
        }
        let levels = ScalarField::new(8, 8, vals);
        let mut markers = vec![0u8; 64];
        markers[3 * 8] = 1; // left valley floor
        markers[3 * 8 + 7] = 2; // right valley floor
        for conn in [Connectivity::Four, Connectivity::Eight] {
            let got = flood_from_markers(&levels, &markers, conn);
            let want = flood_oracle(&levels, &markers, conn);
            assert_eq!(got, want);
            assert!(got.iter().all(|&l| l != 0), "every pixel labeled");
        }
    }

    #[test]
    fn flooding_matches_oracle_on_random_tie_heavy_grids() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(11);
        for _ in 0..200 {
            let vals: Vec<f64> = (0..36).map(|_| f64::from(rng.gen_range(0..3u8))).collect();
            let levels = ScalarField::new(6, 6, vals);
            let mut markers = vec![0u8; 36];
            markers[0] = 1;
            markers[35] = 2;
            let got = flood_from_markers(&levels, &markers, Connectivity::Four);
            let want = flood_oracle(&levels, &markers, Connectivity::Four);
            assert_eq!(got, want);
        }
    }

    #[test]
    fn dark_square_segments_within_one_pixel_band() {
        let img = RasterImage::from_fn(16, 16, 1, |x, y, _| {
            if (5..11).contains(&x) && (5..11).contains(&y) {
                40
            } else {
                200
            }
        })
        .unwrap();
        let cfg = WatershedConfig {
            gaussian_sigma: 1.0,
            marker_erosion: 2,
            connectivity: 8,
        };
        let mask = watershed_segment(&img, &cfg).unwrap();
        // must contain the square interior shrunk by 1, stay within the
        // square grown by 1
        for y in 0..16i64 {
            for x in 0..16i64 {
                let inner = (6..10).contains(&x) && (6..10).contains(&y);
                let outer = (4..12).contains(&x) && (4..12).contains(&y);
                let got = mask.get(x as usize, y as usize);
                if inner {
                    assert!(got, "interior pixel ({x},{y}) missing");
                }
                if !outer {
                    assert!(!got, "pixel ({x},{y}) outside the +1 band");
                }
            }
        }
    }
}
