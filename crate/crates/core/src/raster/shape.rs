use image::RgbaImage;

use crate::error::RasterError;
use crate::geometry::BBox;

use super::components::{Components, Region};

/// Run of member pixels starting at (x, y) and stepping by (dx, dy).
fn run_length(components: &Components, region: &Region, x: i64, y: i64, dx: i64, dy: i64, max: u32) -> u32 {
    let mut n = 0;
    while n < max && components.is_member(region, x + dx * i64::from(n), y + dy * i64::from(n)) {
        n += 1;
    }
    n
}

/// Measured stroke width: the thickest of the four sides, sampled on the
/// middle row and column of the bbox.
pub fn stroke_width(components: &Components, region: &Region) -> u32 {
    let b = region.bbox;
    let (l, t, r, bt) = (
        i64::from(b.left()),
        i64::from(b.top()),
        i64::from(b.right()),
        i64::from(b.bottom()),
    );
    let (mx, my) = ((l + r) / 2, (t + bt) / 2);
    [
        run_length(components, region, l, my, 1, 0, b.width()),
        run_length(components, region, r - 1, my, -1, 0, b.width()),
        run_length(components, region, mx, t, 0, 1, b.height()),
        run_length(components, region, mx, bt - 1, 0, -1, b.height()),
    ]
    .into_iter()
    .max()
    .unwrap_or(0)
}

/// Hollow-frame test: the share of the region's own pixels inside its bbox,
/// after removing a border band as wide as the measured stroke, is at most
/// `hollow_tol`. Pixels of other regions inside the frame do not count.
pub fn is_wireframe(components: &Components, region: &Region, hollow_tol: f64) -> bool {
    let b = region.bbox;
    let stroke = stroke_width(components, region);
    if stroke == 0 || 2 * stroke >= b.width() || 2 * stroke >= b.height() {
        return false;
    }
    let Ok(inner) = BBox::new(
        b.left() + stroke,
        b.top() + stroke,
        b.right() - stroke,
        b.bottom() - stroke,
    ) else {
        return false;
    };
    let mut filled = 0u64;
    for y in inner.top()..inner.bottom() {
        for x in inner.left()..inner.right() {
            if components.is_member(region, i64::from(x), i64::from(y)) {
                filled += 1;
            }
        }
    }
    filled as f64 / inner.area() as f64 <= hollow_tol
}

/// Exact sub-raster copy.
pub fn crop(image: &RgbaImage, bbox: &BBox) -> Result<RgbaImage, RasterError> {
    if bbox.right() > image.width() || bbox.bottom() > image.height() {
        return Err(RasterError::CropOutOfBounds {
            bbox: *bbox,
            width: image.width(),
            height: image.height(),
        });
    }
    Ok(image::imageops::crop_imm(image, bbox.left(), bbox.top(), bbox.width(), bbox.height()).to_image())
}
