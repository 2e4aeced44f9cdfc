//! PNG/BMP reading and writing. Masks serialize as single-channel PNG with
//! foreground 255 and background 0.

use std::path::Path;

use image::{DynamicImage, ImageBuffer, Luma, Rgb};

use super::{BinaryMask, RasterImage};
use crate::error::{Error, Result};

pub fn read_image(path: &Path) -> Result<RasterImage> {
    let dyn_img = image::open(path)?;
    match dyn_img {
        DynamicImage::ImageLuma8(buf) => RasterImage::new(
            buf.width() as usize,
            buf.height() as usize,
            1,
            buf.into_raw(),
        ),
        other => {
            let rgb = other.to_rgb8();
            RasterImage::new(
                rgb.width() as usize,
                rgb.height() as usize,
                3,
                rgb.into_raw(),
            )
        }
    }
}

pub fn write_image(img: &RasterImage, path: &Path) -> Result<()> {
    if let Some(dir) = path.parent() {
        std::fs::create_dir_all(dir)?;
    }
    match img.channels() {
        1 => {
            let buf: ImageBuffer<Luma<u8>, Vec<u8>> = ImageBuffer::from_raw(
                img.width() as u32,
                img.height() as u32,
                img.data().to_vec(),
            )
            .ok_or_else(|| Error::InvalidRaster("buffer shape".into()))?;
            buf.save(path)?;
        }
        3 => {
            let buf: ImageBuffer<Rgb<u8>, Vec<u8>> = ImageBuffer::from_raw(
                img.width() as u32,
                img.height() as u32,
                img.data().to_vec(),
            )
            .ok_or_else(|| Error::InvalidRaster("buffer shape".into()))?;
            buf.save(path)?;
        }
        _ => unreachable!("channel invariant"),
    }
    Ok(())
}

/// Any nonzero sample is foreground, so 0/255 round-trips bit-exactly.
pub fn read_mask(path: &Path) -> Result<BinaryMask> {
    let gray = image::open(path)?.to_luma8();
    BinaryMask::from_bits(
        gray.width() as usize,
        gray.height() as usize,
        gray.into_raw().iter().map(|&v| v != 0).collect(),
    )
}

pub fn write_mask(mask: &BinaryMask, path: &Path) -> Result<()> {
    let img = RasterImage::new(
        mask.width(),
        mask.height(),
        1,
        mask.bits().iter().map(|&b| if b { 255 } else { 0 }).collect(),
    )?;
    write_image(&img, path)
}
