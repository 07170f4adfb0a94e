use image::RgbaImage;

use crate::error::RasterError;
use crate::geometry::{iou, BBox, Widget, WidgetId};
use crate::raster::{connected_components, gradient_binarize, to_grayscale, Components};

use super::config::DetectorConfig;

/// Non-text widgets together with the labeling they came from.
/// `region_of[i]` indexes `components.regions` for `widgets[i]`.
#[derive(Clone, Debug)]
pub struct NonTextDetection {
    pub widgets: Vec<Widget>,
    pub region_of: Vec<usize>,
    pub components: Components,
}

/// Area limits for one detection pass, in pixels of the analysed image.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct AreaLimits {
    pub min_area: f64,
    pub max_area_ratio: f64,
}

impl AreaLimits {
    pub fn from_config(cfg: &DetectorConfig, image_width: u32) -> Self {
        AreaLimits {
            min_area: cfg.min_area_px(image_width),
            max_area_ratio: cfg.max_widget_area_ratio,
        }
    }
}

/// Grayscale, binarize, label, then keep regions whose bbox area is within
/// the configured limits.
pub fn detect_nontext(image: &RgbaImage, cfg: &DetectorConfig) -> Result<Vec<Widget>, RasterError> {
    Ok(detect_regions(image, cfg, AreaLimits::from_config(cfg, image.width()))?.widgets)
}

pub fn detect_regions(
    image: &RgbaImage,
    cfg: &DetectorConfig,
    limits: AreaLimits,
) -> Result<NonTextDetection, RasterError> {
    let gray = to_grayscale(image)?;
    let map = gradient_binarize(&gray, cfg.gradient_threshold);
    let components = connected_components(&map);
    let image_area = f64::from(image.width()) * f64::from(image.height());

    let mut kept: Vec<usize> = components
        .regions
        .iter()
        .enumerate()
        .filter(|(_, r)| {
            let a = r.bbox.area() as f64;
            a >= limits.min_area && a <= limits.max_area_ratio * image_area
        })
        .map(|(i, _)| i)
        .collect();
    kept = suppress_duplicates(&components, kept, cfg.duplicate_iou);

    let widgets = kept
        .iter()
        .enumerate()
        .map(|(n, &i)| Widget::non_text(WidgetId(n as u32), components.regions[i].bbox))
        .collect();
    Ok(NonTextDetection {
        widgets,
        region_of: kept,
        components,
    })
}

/// Of two regions whose boxes overlap above `max_iou`, the one with fewer
/// pixels is dropped. Order of the survivors is preserved.
fn suppress_duplicates(components: &Components, kept: Vec<usize>, max_iou: f64) -> Vec<usize> {
    let regions = &components.regions;
    let mut alive = vec![true; kept.len()];
    for a in 0..kept.len() {
        for b in a + 1..kept.len() {
            if !alive[a] || !alive[b] {
                continue;
            }
            let (ra, rb) = (&regions[kept[a]], &regions[kept[b]]);
            if iou(&ra.bbox, &rb.bbox) > max_iou {
                if rb.area > ra.area {
                    alive[a] = false;
                } else {
                    alive[b] = false;
                }
            }
        }
    }
    kept.into_iter().zip(alive).filter(|(_, a)| *a).map(|(i, _)| i).collect()
}

/// Detection restricted to a crop, in the crop's own coordinates. Regions
/// touching the crop border are ignored: they are cut-off parts of
/// neighbours.
pub fn detect_in_crop(
    crop: &RgbaImage,
    cfg: &DetectorConfig,
    limits: AreaLimits,
) -> Result<Vec<BBox>, RasterError> {
    let det = detect_regions(crop, cfg, limits)?;
    let (w, h) = crop.dimensions();
    Ok(det
        .widgets
        .into_iter()
        .map(|w| w.bbox)
        .filter(|b| b.left() > 0 && b.top() > 0 && b.right() < w && b.bottom() < h)
        .collect())
}
