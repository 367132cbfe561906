//! Image raster I/O: decoding support/query images and masks, and 8-bit
//! PGM (P5) output for heatmaps and synthetic data.

use std::fs::File;
use std::io::BufWriter;
use std::path::Path;

use image::codecs::pnm::{PnmEncoder, PnmSubtype, SampleEncoding};
use image::{DynamicImage, ExtendedColorType, GrayImage, ImageEncoder, ImageError};

use crate::anomaly::Grid;
use crate::error::{Error, Result};
use crate::foreground::{binarize_nonzero, PixelMask};

fn convert(path: &Path, e: ImageError) -> Error {
    match e {
        ImageError::IoError(io) => Error::io(path, io),
        other => Error::format(path, other.to_string()),
    }
}

pub fn load_image(path: impl AsRef<Path>) -> Result<DynamicImage> {
    let path = path.as_ref();
    image::open(path).map_err(|e| convert(path, e))
}

/// `(height, width)` read from the image header.
pub fn image_dims(path: impl AsRef<Path>) -> Result<(usize, usize)> {
    let path = path.as_ref();
    let (w, h) = image::image_dimensions(path).map_err(|e| convert(path, e))?;
    Ok((h as usize, w as usize))
}

/// Ground-truth mask: any non-zero pixel is anomalous.
pub fn load_mask(path: impl AsRef<Path>) -> Result<PixelMask> {
    Ok(binarize_nonzero(&load_image(path)?))
}

pub fn write_pgm(path: impl AsRef<Path>, image: &GrayImage) -> Result<()> {
    let path = path.as_ref();
    let file = File::create(path).map_err(|e| Error::io(path, e))?;
    PnmEncoder::new(BufWriter::new(file))
        .with_subtype(PnmSubtype::Graymap(SampleEncoding::Binary))
        .write_image(
            image.as_raw(),
            image.width(),
            image.height(),
            ExtendedColorType::L8,
        )
        .map_err(|e| convert(path, e))
}

/// 8-bit rendering of a `[0, 1]` map, `round(255 * v)`.
pub fn heatmap(grid: &Grid) -> GrayImage {
    let raw = grid
        .values()
        .iter()
        .map(|&v| (255.0 * v.clamp(0.0, 1.0)).round() as u8)
        .collect();
    GrayImage::from_raw(grid.cols() as u32, grid.rows() as u32, raw)
        .expect("grid dims match buffer")
}

pub fn mask_image(mask: &PixelMask) -> GrayImage {
    let raw = mask
        .bits()
        .iter()
        .map(|&b| if b { 255 } else { 0 })
        .collect();
    GrayImage::from_raw(mask.width() as u32, mask.height() as u32, raw)
        .expect("mask dims match buffer")
}
