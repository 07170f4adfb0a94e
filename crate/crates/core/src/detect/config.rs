use serde::{Deserialize, Serialize};

use crate::error::Error;

/// Detection thresholds. Pixel quantities are expressed at
/// `reference_width` and scaled by `image_width / reference_width`
/// (areas by the square of that factor).
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct DetectorConfig {
    /// Minimum bbox area of a valid widget, px².
    pub min_widget_area: f64,
    /// Regions larger than this fraction of the image are discarded.
    pub max_widget_area_ratio: f64,
    pub gradient_threshold: u8,
    pub straightness_tol: f64,
    pub coverage_tol: f64,
    pub hollow_tol: f64,
    /// Slack used by every containment check, px.
    pub containment_tol: f64,
    /// Non-text boxes overlapping text above this IoU are treated as text.
    pub text_overlap_iou: f64,
    /// Above this IoU a text box and a container child are the same widget.
    pub duplicate_iou: f64,
    /// Minimum vertical overlap (fraction of the shorter box) for two OCR
    /// words to share a line.
    pub line_overlap: f64,
    /// Maximum word gap on a line, in median character widths.
    pub line_gap_chars: f64,
    pub reference_width: u32,
}

impl Default for DetectorConfig {
    fn default() -> Self {
        DetectorConfig {
            min_widget_area: 100.0,
            max_widget_area_ratio: 0.8,
            gradient_threshold: 4,
            straightness_tol: 3.0,
            coverage_tol: 0.8,
            hollow_tol: 0.15,
            containment_tol: 2.0,
            text_overlap_iou: 0.2,
            duplicate_iou: 0.9,
            line_overlap: 0.5,
            line_gap_chars: 1.5,
            reference_width: 1440,
        }
    }
}

impl DetectorConfig {
    pub fn validate(&self) -> Result<(), Error> {
        let bad = |m: &str| Err(Error::Config(format!("detector: {m}")));
        if !(self.min_widget_area > 0.0) {
            return bad("min_widget_area must be > 0");
        }
        if !(self.max_widget_area_ratio > 0.0 && self.max_widget_area_ratio <= 1.0) {
            return bad("max_widget_area_ratio must be in (0, 1]");
        }
        if self.reference_width == 0 {
            return bad("reference_width must be > 0");
        }
        if self.straightness_tol < 0.0 || self.containment_tol < 0.0 {
            return bad("tolerances must be >= 0");
        }
        if !(0.0..=1.0).contains(&self.coverage_tol) || !(0.0..=1.0).contains(&self.hollow_tol) {
            return bad("coverage_tol and hollow_tol must be ratios");
        }
        Ok(())
    }

    pub fn scale(&self, image_width: u32) -> f64 {
        f64::from(image_width) / f64::from(self.reference_width)
    }

    pub fn min_area_px(&self, image_width: u32) -> f64 {
        self.min_widget_area * self.scale(image_width).powi(2)
    }

    pub fn straightness_px(&self, image_width: u32) -> f64 {
        (self.straightness_tol * self.scale(image_width)).max(1.0)
    }

    pub fn containment_px(&self, image_width: u32) -> u32 {
        (self.containment_tol * self.scale(image_width)).round().max(1.0) as u32
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults_validate() {
        DetectorConfig::default().validate().unwrap();
    }

    #[test]
    fn invalid_values_rejected() {
        let mut c = DetectorConfig::default();
        c.min_widget_area = 0.0;
        assert!(c.validate().is_err());
        let mut c = DetectorConfig::default();
        c.max_widget_area_ratio = 1.5;
        assert!(c.validate().is_err());
    }

    #[test]
    fn thresholds_scale_with_width() {
        let c = DetectorConfig::default();
        assert_eq!(c.min_area_px(1440), 100.0);
        assert_eq!(c.min_area_px(720), 25.0);
        assert_eq!(c.straightness_px(720), 1.5);
        assert_eq!(c.containment_px(2880), 4);
    }

    #[test]
    fn partial_json_uses_defaults() {
        let c: DetectorConfig = serde_json::from_str(r#"{"min_widget_area": 80}"#).unwrap();
        assert_eq!(c.min_widget_area, 80.0);
        assert_eq!(c.gradient_threshold, 4);
        assert!(serde_json::from_str::<DetectorConfig>(r#"{"nope": 1}"#).is_err());
    }
}
