//! Classic unsupervised image processing: luma conversion, gradient
//! binarization, connected-component labeling, boundary tracing and shape
//! tests.

mod binarize;
mod components;
mod contour;
mod gray;
mod shape;

use std::path::Path;

use image::RgbaImage;

use crate::error::RasterError;

pub use binarize::{gradient_binarize, BinaryMap};
pub use components::{connected_components, Components, Region};
pub use contour::{is_rectangle, trace_boundary};
pub use gray::{luma, to_grayscale, GrayImage};
pub use shape::{crop, is_wireframe, stroke_width};

/// Decodes a PNG or JPEG file into RGBA.
pub fn load_image(path: &Path) -> Result<RgbaImage, RasterError> {
    let img = image::open(path)?.to_rgba8();
    if img.width() == 0 || img.height() == 0 {
        return Err(RasterError::Empty);
    }
    Ok(img)
}

pub fn decode_image(bytes: &[u8]) -> Result<RgbaImage, RasterError> {
    let img = image::load_from_memory(bytes)?.to_rgba8();
    if img.width() == 0 || img.height() == 0 {
        return Err(RasterError::Empty);
    }
    Ok(img)
}
