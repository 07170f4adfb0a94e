//! OCR sources and word-to-line merging.

use std::io::{Cursor, Read};
use std::path::{Path, PathBuf};
use std::time::Duration;

use image::RgbaImage;
use serde::{Deserialize, Serialize};

use crate::error::OcrError;
use crate::geometry::{BBox, Widget, WidgetId};

use super::config::DetectorConfig;

/// One recognized word or line.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TextBox {
    pub bbox: BBox,
    pub content: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub confidence: Option<f64>,
}

impl TextBox {
    pub fn new(bbox: BBox, content: impl Into<String>, confidence: Option<f64>) -> Result<Self, OcrError> {
        let content = content.into();
        if content.trim().is_empty() {
            return Err(OcrError::InvalidRecord {
                index: 0,
                reason: "empty content".into(),
            });
        }
        Ok(TextBox {
            bbox,
            content,
            confidence,
        })
    }
}

#[derive(Deserialize)]
struct RawRecord {
    bbox: [f64; 4],
    content: String,
    #[serde(default)]
    confidence: Option<f64>,
}

/// Parses a JSON list of `{bbox, content, confidence?}` records. Float
/// coordinates are rounded to the nearest pixel.
pub fn parse_records(bytes: &[u8]) -> Result<Vec<TextBox>, OcrError> {
    let raw: Vec<RawRecord> = serde_json::from_slice(bytes)?;
    raw.into_iter()
        .enumerate()
        .map(|(index, r)| {
            let invalid = |reason: String| OcrError::InvalidRecord { index, reason };
            if r.bbox.iter().any(|v| !v.is_finite() || *v < 0.0 || *v > f64::from(u32::MAX)) {
                return Err(invalid(format!("bbox {:?} out of range", r.bbox)));
            }
            let [l, t, rt, b] = r.bbox.map(|v| v.round() as u32);
            let bbox = BBox::new(l, t, rt, b).map_err(|e| invalid(e.to_string()))?;
            if r.content.trim().is_empty() {
                return Err(invalid("empty content".into()));
            }
            if let Some(c) = r.confidence {
                if !(0.0..=1.0).contains(&c) {
                    return Err(invalid(format!("confidence {c} outside [0, 1]")));
                }
            }
            Ok(TextBox {
                bbox,
                content: r.content,
                confidence: r.confidence,
            })
        })
        .collect()
}

/// A source of text boxes for one screenshot.
pub trait OcrProvider: Send + Sync {
    fn recognize(&self, image: &RgbaImage) -> Result<Vec<TextBox>, OcrError>;
}

/// Fixed boxes, independent of the image.
#[derive(Clone, Debug, Default)]
pub struct StaticOcr(pub Vec<TextBox>);

impl OcrProvider for StaticOcr {
    fn recognize(&self, _image: &RgbaImage) -> Result<Vec<TextBox>, OcrError> {
        Ok(self.0.clone())
    }
}

/// Reads a precomputed record file.
#[derive(Clone, Debug)]
pub struct FileOcr {
    path: PathBuf,
}

impl FileOcr {
    pub fn new(path: impl Into<PathBuf>) -> Self {
        FileOcr { path: path.into() }
    }

    pub fn path(&self) -> &Path {
        &self.path
    }
}

impl OcrProvider for FileOcr {
    fn recognize(&self, _image: &RgbaImage) -> Result<Vec<TextBox>, OcrError> {
        let bytes = std::fs::read(&self.path).map_err(|source| OcrError::Io {
            path: self.path.clone(),
            source,
        })?;
        parse_records(&bytes)
    }
}

pub const ENV_URL: &str = "GESTALT_OCR_URL";
pub const ENV_TIMEOUT_MS: &str = "GESTALT_OCR_TIMEOUT_MS";
pub const ENV_RETRIES: &str = "GESTALT_OCR_RETRIES";
pub const ENV_TOKEN: &str = "GESTALT_OCR_TOKEN";

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct HttpOcrConfig {
    pub url: String,
    pub timeout_ms: u64,
    /// Extra attempts after the first failure.
    pub retries: u32,
}

impl Default for HttpOcrConfig {
    fn default() -> Self {
        HttpOcrConfig {
            url: String::new(),
            timeout_ms: 10_000,
            retries: 2,
        }
    }
}

impl HttpOcrConfig {
    /// Environment values take precedence over the config file.
    pub fn with_env_overrides(mut self) -> Result<Self, OcrError> {
        self.apply_overrides(|k| std::env::var(k).ok())?;
        Ok(self)
    }

    fn apply_overrides(&mut self, get: impl Fn(&str) -> Option<String>) -> Result<(), OcrError> {
        let bad = |k: &str, v: &str| OcrError::Http {
            url: String::new(),
            attempts: 0,
            message: format!("invalid {k}={v}"),
        };
        if let Some(v) = get(ENV_URL) {
            self.url = v;
        }
        if let Some(v) = get(ENV_TIMEOUT_MS) {
            self.timeout_ms = v.trim().parse().map_err(|_| bad(ENV_TIMEOUT_MS, &v))?;
        }
        if let Some(v) = get(ENV_RETRIES) {
            self.retries = v.trim().parse().map_err(|_| bad(ENV_RETRIES, &v))?;
        }
        Ok(())
    }
}

/// Posts the PNG-encoded screenshot to an endpoint that answers with the
/// record schema. A bearer token is read from `GESTALT_OCR_TOKEN`.
#[derive(Clone, Debug)]
pub struct HttpOcr {
    config: HttpOcrConfig,
    token: Option<String>,
}

impl HttpOcr {
    pub fn new(config: HttpOcrConfig) -> Self {
        HttpOcr {
            config,
            token: std::env::var(ENV_TOKEN).ok().filter(|t| !t.is_empty()),
        }
    }

    pub fn with_token(mut self, token: Option<String>) -> Self {
        self.token = token;
        self
    }

    pub fn recognize_bytes(&self, body: &[u8]) -> Result<Vec<TextBox>, OcrError> {
        let agent = ureq::AgentBuilder::new()
            .timeout(Duration::from_millis(self.config.timeout_ms))
            .build();
        let attempts = self.config.retries + 1;
        let mut last = String::new();
        for attempt in 1..=attempts {
            let mut req = agent.post(&self.config.url).set("Content-Type", "image/png");
            if let Some(t) = &self.token {
                req = req.set("Authorization", &format!("Bearer {t}"));
            }
            match req.send_bytes(body) {
                Ok(resp) => {
                    let mut buf = Vec::new();
                    resp.into_reader()
                        .read_to_end(&mut buf)
                        .map_err(|e| self.failure(attempt, e.to_string()))?;
                    return parse_records(&buf);
                }
                Err(ureq::Error::Status(code, resp)) if code < 500 => {
                    let text = resp.into_string().unwrap_or_default();
                    return Err(self.failure(attempt, format!("status {code}: {text}")));
                }
                Err(e) => {
                    log::warn!("OCR request to {} failed (attempt {attempt}): {e}", self.config.url);
                    last = e.to_string();
                }
            }
        }
        Err(self.failure(attempts, last))
    }

    fn failure(&self, attempts: u32, message: String) -> OcrError {
        OcrError::Http {
            url: self.config.url.clone(),
            attempts,
            message,
        }
    }
}

impl OcrProvider for HttpOcr {
    fn recognize(&self, image: &RgbaImage) -> Result<Vec<TextBox>, OcrError> {
        let mut png = Cursor::new(Vec::new());
        image
            .write_to(&mut png, image::ImageFormat::Png)
            .map_err(|e| self.failure(0, format!("cannot encode image: {e}")))?;
        self.recognize_bytes(png.get_ref())
    }
}

fn char_width(b: &TextBox) -> f64 {
    let chars = b.content.chars().filter(|c| !c.is_whitespace()).count().max(1);
    f64::from(b.bbox.width()) / chars as f64
}

fn median(mut v: Vec<f64>) -> f64 {
    v.sort_by(f64::total_cmp);
    let n = v.len();
    if n == 0 {
        0.0
    } else if n % 2 == 1 {
        v[n / 2]
    } else {
        (v[n / 2 - 1] + v[n / 2]) / 2.0
    }
}

fn vertical_overlap(a: &BBox, b: &BBox) -> f64 {
    let lo = a.top().max(b.top());
    let hi = a.bottom().min(b.bottom());
    let shorter = a.height().min(b.height());
    f64::from(hi.saturating_sub(lo)) / f64::from(shorter)
}

/// Joins word boxes into lines. A word extends a line when it overlaps the
/// line vertically by at least `line_overlap` of the shorter height and
/// starts no further than `line_gap_chars` median character widths to its
/// right. Output is ordered top-to-bottom, left-to-right.
pub fn merge_lines(boxes: &[TextBox], cfg: &DetectorConfig) -> Vec<TextBox> {
    let max_gap = cfg.line_gap_chars * median(boxes.iter().map(char_width).collect());
    let mut order: Vec<&TextBox> = boxes.iter().collect();
    order.sort_by_key(|b| (b.bbox.left(), b.bbox.top(), b.bbox.right(), b.bbox.bottom()));

    let mut lines: Vec<TextBox> = Vec::new();
    for b in order {
        let best = lines
            .iter()
            .enumerate()
            .filter_map(|(i, line)| {
                let overlap = vertical_overlap(&line.bbox, &b.bbox);
                let gap = f64::from(b.bbox.left()) - f64::from(line.bbox.right());
                let ok = overlap >= cfg.line_overlap
                    && b.bbox.left() >= line.bbox.left()
                    && gap <= max_gap;
                ok.then_some((i, overlap, gap.max(0.0)))
            })
            .min_by(|x, y| y.1.total_cmp(&x.1).then(x.2.total_cmp(&y.2)).then(x.0.cmp(&y.0)));
        match best {
            Some((i, _, _)) => {
                let line = &mut lines[i];
                line.bbox = line.bbox.union(&b.bbox);
                line.content.push(' ');
                line.content.push_str(&b.content);
                line.confidence = match (line.confidence, b.confidence) {
                    (Some(x), Some(y)) => Some(x.min(y)),
                    (x, y) => x.or(y),
                };
            }
            None => lines.push(b.clone()),
        }
    }
    lines.sort_by_key(|l| (l.bbox.top(), l.bbox.left()));
    lines
}

/// Text widgets with ids starting at `first_id`, clipped to the image.
/// Boxes entirely outside the image are dropped.
pub fn text_widgets(lines: &[TextBox], width: u32, height: u32, first_id: u32) -> Vec<Widget> {
    let mut out = Vec::new();
    for line in lines {
        let b = line.bbox;
        let (r, bt) = (b.right().min(width), b.bottom().min(height));
        let Ok(bbox) = BBox::new(b.left(), b.top(), r, bt) else {
            log::warn!("OCR box {b} lies outside the {width}x{height} image; dropped");
            continue;
        };
        out.push(Widget::text(WidgetId(first_id + out.len() as u32), bbox, line.content.clone()));
    }
    out
}

/// Queries the provider and returns one text widget per merged line.
pub fn ingest_text(
    provider: &dyn OcrProvider,
    image: &RgbaImage,
    cfg: &DetectorConfig,
) -> Result<Vec<Widget>, OcrError> {
    let boxes = provider.recognize(image)?;
    Ok(text_widgets(&merge_lines(&boxes, cfg), image.width(), image.height(), 0))
}
