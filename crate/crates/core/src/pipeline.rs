//! End-to-end runs: detection followed by grouping, or grouping of widgets
//! that are already known.

use image::RgbaImage;

use crate::detect::{assign_children, detect_widgets, DetectorConfig, TextBox};
use crate::error::Error;
use crate::geometry::Widget;
use crate::group::{perceptual_grouping, GroupingConfig, GroupingOutcome};

/// Detects widgets in `image` and groups them, with continuity corrections.
pub fn run_detection(
    image: &RgbaImage,
    text_boxes: &[TextBox],
    det: &DetectorConfig,
    grp: &GroupingConfig,
) -> Result<GroupingOutcome, Error> {
    grp.validate()?;
    let widgets = detect_widgets(image, text_boxes, det)?;
    Ok(perceptual_grouping(widgets, Some(image), image.dimensions(), det, grp))
}

/// Groups known widgets, e.g. from view metadata. Widgets flagged as
/// containers get their children from geometry; nothing is re-detected.
pub fn run_metadata(
    mut widgets: Vec<Widget>,
    size: (u32, u32),
    det: &DetectorConfig,
    grp: &GroupingConfig,
) -> Result<GroupingOutcome, Error> {
    det.validate()?;
    grp.validate()?;
    let flags: Vec<bool> = widgets.iter().map(|w| w.is_container).collect();
    assign_children(&mut widgets, &flags, det.containment_px(size.0));
    Ok(perceptual_grouping(widgets, None, size, det, grp))
}
