//! Lesion segmentation three ways: watershed, active contour, and their
//! intersected combination.

mod snake;
mod watershed;

pub use snake::{
    default_snake_init, gradient_field, snake_energy, snake_segment, snake_segment_with_trace,
    EnergyWeights, SnakeContour, SnakeRun, SweepStats, SNAKE_SIGMA, SNAKE_SPACING,
};
pub use watershed::{
    build_markers, flood_from_markers, otsu_threshold, watershed_segment, WatershedConfig,
    MARKER_EXTERNAL, MARKER_INTERNAL,
};

use crate::error::{Error, Result};
use crate::raster::{
    dilate, fill_holes, largest_component, mask_and, remove_spurs_fixpoint, BinaryMask,
    Connectivity, StructuringElement,
};

/// Combines the two segmentations: intersect, then one dilation, spur
/// removal to a fixed point, largest component and hole filling.
pub fn merge_masks(watershed: &BinaryMask, snake: &BinaryMask) -> Result<BinaryMask> {
    let core = mask_and(snake, watershed)?;
    if core.is_empty() {
        return Err(Error::SegmentationDisagreement);
    }
    let grown = dilate(&core, &StructuringElement::disk(1));
    let smoothed = remove_spurs_fixpoint(&grown);
    Ok(fill_holes(&largest_component(&smoothed, Connectivity::Eight)))
}
