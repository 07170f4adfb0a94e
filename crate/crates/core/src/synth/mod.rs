//! Deterministic synthetic GUIs with ground truth: a rendered screenshot, an
//! OCR fixture, the expected hierarchy and the widget list.

mod canvas;
mod layout;

use std::fmt;
use std::path::Path;
use std::str::FromStr;

use image::RgbaImage;
use serde::{Deserialize, Serialize};

pub use canvas::{text_layout, Canvas, CHAR_CELL, TEXT_HEIGHT};
pub use layout::generate;

use crate::detect::{widgets_to_json, TextBox};
use crate::error::Error;
use crate::geometry::{BBox, Widget};
use crate::hierarchy::Hierarchy;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum LayoutKind {
    List,
    Grid,
    Cards,
    Tabs,
    Mixed,
}

impl LayoutKind {
    pub const ALL: [LayoutKind; 5] = [
        LayoutKind::List,
        LayoutKind::Grid,
        LayoutKind::Cards,
        LayoutKind::Tabs,
        LayoutKind::Mixed,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            LayoutKind::List => "list",
            LayoutKind::Grid => "grid",
            LayoutKind::Cards => "cards",
            LayoutKind::Tabs => "tabs",
            LayoutKind::Mixed => "mixed",
        }
    }
}

impl fmt::Display for LayoutKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for LayoutKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self, Error> {
        LayoutKind::ALL
            .into_iter()
            .find(|k| k.as_str() == s)
            .ok_or_else(|| Error::Config(format!("unknown layout kind {s:?}")))
    }
}

/// Everything that determines one synthetic GUI. Lengths are in pixels at
/// a 1440 px wide reference canvas and scale with `width`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SynthSpec {
    pub seed: u64,
    pub kind: LayoutKind,
    /// Repeated items (list rows, grid tiles, cards, tabs); random if unset.
    pub items: Option<usize>,
    /// Grid columns; random if unset.
    pub columns: Option<usize>,
    /// Inclusive range for icon sides.
    pub icon_size: [u32; 2],
    /// Inclusive range for the gap between repeated items.
    pub spacing: [u32; 2],
    /// Leaves the last item's leading non-text widget out of the pixels and
    /// the ground truth.
    pub occlusion: bool,
    /// Cards only (at least 4): shrinks one badge below the minimum widget
    /// area and covers another with a spurious OCR entry.
    pub plant_errors: bool,
    pub width: u32,
    pub height: u32,
}

impl Default for SynthSpec {
    fn default() -> Self {
        SynthSpec {
            seed: 0,
            kind: LayoutKind::List,
            items: None,
            columns: None,
            icon_size: [40, 64],
            spacing: [24, 48],
            occlusion: false,
            plant_errors: false,
            width: 1440,
            height: 2560,
        }
    }
}

impl SynthSpec {
    pub fn new(kind: LayoutKind, seed: u64) -> Self {
        SynthSpec {
            kind,
            seed,
            ..SynthSpec::default()
        }
    }

    pub fn validate(&self) -> Result<(), Error> {
        let bad = |m: String| Err(Error::Config(format!("synth: {m}")));
        if self.width < 360 || self.height < 640 {
            return bad(format!("canvas {}x{} is smaller than 360x640", self.width, self.height));
        }
        for (name, [lo, hi]) in [("icon_size", self.icon_size), ("spacing", self.spacing)] {
            if lo > hi || lo < 8 || hi > 200 {
                return bad(format!("{name} range [{lo}, {hi}] must satisfy 8 <= lo <= hi <= 200"));
            }
        }
        if self.items == Some(0) || self.columns == Some(0) {
            return bad("items and columns must be positive".into());
        }
        if self.plant_errors && self.kind != LayoutKind::Cards {
            return bad("planted errors need the cards layout".into());
        }
        if self.plant_errors && self.items.is_some_and(|n| n < 4) {
            return bad("planted errors need at least 4 cards".into());
        }
        Ok(())
    }
}

/// Ground-truth boxes of deliberately damaged widgets.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct Planted {
    /// Non-text widgets drawn below the minimum widget area.
    pub missing: Vec<BBox>,
    /// Non-text widgets covered by a spurious OCR entry.
    pub flipped: Vec<BBox>,
}

#[derive(Clone, Debug)]
pub struct SynthGui {
    pub image: RgbaImage,
    /// Word-level OCR fixture.
    pub ocr: Vec<TextBox>,
    pub ground_truth: Hierarchy,
    /// Ground-truth widgets, ids in file order, container flags set.
    pub widgets: Vec<Widget>,
    pub planted: Planted,
}

impl SynthGui {
    pub fn ocr_json(&self) -> String {
        serde_json::to_string_pretty(&self.ocr).expect("text boxes serialize")
    }

    /// Writes `<stem>.png`, `<stem>.ocr.json`, `<stem>.gt.json` and
    /// `<stem>.widgets.json` into `dir`.
    pub fn write(&self, dir: &Path, stem: &str) -> Result<(), Error> {
        let io = |path: &Path| {
            let path = path.to_owned();
            move |source| crate::error::FormatError::Io { path, source }
        };
        let png = dir.join(format!("{stem}.png"));
        self.image
            .save_with_format(&png, image::ImageFormat::Png)
            .map_err(|source| crate::error::RasterError::Encode {
                path: png.clone(),
                source,
            })?;
        for (suffix, body) in [
            ("ocr.json", self.ocr_json()),
            ("gt.json", self.ground_truth.to_json()),
            ("widgets.json", widgets_to_json(&self.widgets)),
        ] {
            let path = dir.join(format!("{stem}.{suffix}"));
            std::fs::write(&path, body).map_err(io(&path))?;
        }
        Ok(())
    }
}

/// Specs for a corpus of `count` GUIs cycling through `kinds`, each a copy
/// of `template` with its own kind and seed. Stems are `<kind>_<index>`.
pub fn corpus(template: &SynthSpec, count: usize, kinds: &[LayoutKind]) -> Vec<(String, SynthSpec)> {
    (0..count)
        .map(|i| {
            let kind = kinds[i % kinds.len()];
            let seed = template.seed.wrapping_mul(0x9E37_79B9_7F4A_7C15).wrapping_add(i as u64);
            let spec = SynthSpec {
                kind,
                seed,
                ..template.clone()
            };
            (format!("{kind}_{i:03}"), spec)
        })
        .collect()
}
