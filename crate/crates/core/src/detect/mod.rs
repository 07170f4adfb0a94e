//! Widget detection: non-text regions from pixels, text from an OCR source,
//! container recognition and the text/non-text merge.

mod config;
mod containers;
mod evaluate;
mod merge;
mod nontext;
mod ocr;
mod records;

use image::RgbaImage;

pub use config::DetectorConfig;
pub use containers::{assign_children, recognize_containers};
pub use evaluate::{evaluate_detection, DetectionReport};
pub use merge::{merge_widgets, renumber};
pub use nontext::{detect_in_crop, detect_nontext, detect_regions, AreaLimits, NonTextDetection};
pub use ocr::{
    ingest_text, merge_lines, parse_records, text_widgets, FileOcr, HttpOcr, HttpOcrConfig, OcrProvider, StaticOcr,
    TextBox, ENV_RETRIES, ENV_TIMEOUT_MS, ENV_TOKEN, ENV_URL,
};
pub use records::{class_from_name, load_widgets, parse_widgets, widgets_to_json, WidgetRecord};

use crate::error::Error;
use crate::geometry::Widget;

/// Full detection for one screenshot given its OCR boxes: non-text
/// detection, line merging, container recognition and merge.
pub fn detect_widgets(image: &RgbaImage, text_boxes: &[TextBox], cfg: &DetectorConfig) -> Result<Vec<Widget>, Error> {
    cfg.validate()?;
    let det = detect_regions(image, cfg, AreaLimits::from_config(cfg, image.width()))?;
    let lines = merge_lines(text_boxes, cfg);
    let first_text = det.widgets.len() as u32;
    let texts = text_widgets(&lines, image.width(), image.height(), first_text);

    let mut all = det.widgets.clone();
    all.extend(texts);
    let region_of: Vec<Option<usize>> = det
        .region_of
        .iter()
        .map(|&r| Some(r))
        .chain(std::iter::repeat(None))
        .take(all.len())
        .collect();
    recognize_containers(&mut all, &region_of, &det.components, cfg);

    let (texts, nontexts): (Vec<Widget>, Vec<Widget>) = all.into_iter().partition(Widget::is_text);
    Ok(merge_widgets(texts, nontexts, cfg, cfg.containment_px(image.width())))
}

/// Same as [`detect_widgets`] with boxes pulled from a provider.
pub fn detect_with_provider(
    image: &RgbaImage,
    provider: &dyn OcrProvider,
    cfg: &DetectorConfig,
) -> Result<Vec<Widget>, Error> {
    let boxes = provider.recognize(image)?;
    detect_widgets(image, &boxes, cfg)
}
