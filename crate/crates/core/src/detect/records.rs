//! Widget list files: `[{bbox, class, content?, container?}]`.

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::FormatError;
use crate::geometry::{BBox, Widget, WidgetClass, WidgetId};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct WidgetRecord {
    pub bbox: BBox,
    /// "text" or "nontext"; view class names ending in `TextView` count as
    /// text and any other name as non-text.
    pub class: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub content: Option<String>,
    #[serde(default, skip_serializing_if = "std::ops::Not::not")]
    pub container: bool,
}

pub fn class_from_name(name: &str) -> WidgetClass {
    let lower = name.to_ascii_lowercase();
    if lower == "text" || lower.ends_with("textview") {
        WidgetClass::Text
    } else {
        WidgetClass::NonText
    }
}

impl WidgetRecord {
    pub fn from_widget(w: &Widget) -> Self {
        WidgetRecord {
            bbox: w.bbox,
            class: match w.class() {
                WidgetClass::Text => "text".into(),
                WidgetClass::NonText => "nontext".into(),
            },
            content: w.text_content().filter(|s| !s.is_empty()).map(str::to_owned),
            container: w.is_container,
        }
    }

    pub fn to_widget(&self, id: WidgetId) -> Widget {
        let mut w = match class_from_name(&self.class) {
            WidgetClass::Text => Widget::text(id, self.bbox, self.content.clone().unwrap_or_default()),
            WidgetClass::NonText => Widget::non_text(id, self.bbox),
        };
        w.is_container = self.container;
        w
    }
}

pub fn parse_widgets(bytes: &[u8], path: &Path) -> Result<Vec<WidgetRecord>, FormatError> {
    serde_json::from_slice(bytes).map_err(|source| FormatError::Json {
        path: path.to_owned(),
        source,
    })
}

/// Loads a widget file. Ids follow file order.
pub fn load_widgets(path: &Path) -> Result<Vec<Widget>, FormatError> {
    let bytes = std::fs::read(path).map_err(|source| FormatError::Io {
        path: path.to_owned(),
        source,
    })?;
    Ok(parse_widgets(&bytes, path)?
        .iter()
        .enumerate()
        .map(|(i, r)| r.to_widget(WidgetId(i as u32)))
        .collect())
}

pub fn widgets_to_json(widgets: &[Widget]) -> String {
    let records: Vec<WidgetRecord> = widgets.iter().map(WidgetRecord::from_widget).collect();
    serde_json::to_string_pretty(&records).expect("records serialize")
}
