use serde::{Deserialize, Serialize};

use crate::error::Error;

/// Grouping thresholds. Pixel values are given at `reference_width` and
/// scaled by `image_width / reference_width`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct GroupingConfig {
    /// DBSCAN eps for center and edge coordinates, px.
    pub eps_position: f64,
    /// DBSCAN eps on the square root of the area, px.
    pub eps_area_sqrt: f64,
    pub min_pts: usize,
    /// Two groups pair only when their sizes differ by less than this.
    pub max_count_diff: usize,
    /// Fixed pairing distance, px. When unset it is
    /// `proximity_height_factor` times the median widget height of the two
    /// candidate groups.
    pub proximity_gap_max: Option<f64>,
    pub proximity_height_factor: f64,
    /// Multiplier on the minimum widget area when re-detecting missed
    /// widgets.
    pub relax_factor: f64,
    /// A cluster is cut where a gap between consecutive members exceeds this
    /// multiple of the median gap plus `eps_position`.
    pub split_gap_factor: f64,
    /// Extra margin around an expected missed widget, as a fraction of its
    /// larger side.
    pub correction_margin: f64,
    pub reference_width: u32,
}

impl Default for GroupingConfig {
    fn default() -> Self {
        GroupingConfig {
            eps_position: 12.0,
            eps_area_sqrt: 15.0,
            min_pts: 2,
            max_count_diff: 4,
            proximity_gap_max: None,
            proximity_height_factor: 1.5,
            relax_factor: 0.5,
            split_gap_factor: 2.0,
            correction_margin: 0.25,
            reference_width: 1440,
        }
    }
}

impl GroupingConfig {
    pub fn validate(&self) -> Result<(), Error> {
        let bad = |m: &str| Err(Error::Config(format!("grouping: {m}")));
        if !(self.eps_position > 0.0 && self.eps_area_sqrt > 0.0) {
            return bad("eps values must be > 0");
        }
        if self.min_pts == 0 {
            return bad("min_pts must be >= 1");
        }
        if self.max_count_diff == 0 {
            return bad("max_count_diff must be >= 1");
        }
        if self.proximity_gap_max.is_some_and(|g| !(g >= 0.0)) || !(self.proximity_height_factor > 0.0) {
            return bad("proximity limits must be positive");
        }
        if !(self.relax_factor > 0.0) || !(self.split_gap_factor > 0.0) || self.correction_margin < 0.0 {
            return bad("relax_factor, split_gap_factor and correction_margin must be positive");
        }
        if self.reference_width == 0 {
            return bad("reference_width must be > 0");
        }
        Ok(())
    }

    pub fn scale(&self, image_width: u32) -> f64 {
        f64::from(image_width) / f64::from(self.reference_width)
    }
}
