//! Pixel-grid and binary-mask primitives shared by every pipeline stage.

mod field;
mod image;
pub mod io;
mod mask;
pub mod morph;

pub use field::ScalarField;
pub use image::RasterImage;
pub use mask::BinaryMask;
pub use morph::{
    dilate, erode, fill_holes, label_components, largest_component, mask_and, mask_complement,
    mask_subtract, remove_spurs, remove_spurs_fixpoint, Connectivity, SeShape, StructuringElement,
};
