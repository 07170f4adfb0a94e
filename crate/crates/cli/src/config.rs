use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use serde::{Deserialize, Serialize};
use serde_json::Value;

use gestalt_core::detect::{DetectorConfig, HttpOcrConfig};
use gestalt_core::group::GroupingConfig;
use gestalt_core::synth::SynthSpec;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum OcrMode {
    File,
    Http,
}

/// Where text boxes come from. `path` is a fixture file, or a directory
/// holding `<stem>.ocr.json` per image.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct OcrSpec {
    pub mode: Option<OcrMode>,
    pub path: Option<PathBuf>,
    pub url: Option<String>,
    pub timeout_ms: u64,
    pub retries: u32,
}

impl Default for OcrSpec {
    fn default() -> Self {
        let http = HttpOcrConfig::default();
        OcrSpec {
            mode: None,
            path: None,
            url: None,
            timeout_ms: http.timeout_ms,
            retries: http.retries,
        }
    }
}

pub enum OcrSource {
    File(PathBuf),
    Http(HttpOcrConfig),
}

impl OcrSpec {
    /// The single configured source; `None` when nothing is configured.
    pub fn source(&self) -> Result<Option<OcrSource>> {
        let mode = match (self.mode, &self.path, &self.url) {
            (Some(m), _, _) => m,
            (None, Some(_), Some(_)) => bail!("both ocr.path and ocr.url are set; choose one OCR mode"),
            (None, Some(_), None) => OcrMode::File,
            (None, None, Some(_)) => OcrMode::Http,
            (None, None, None) => return Ok(None),
        };
        Ok(Some(match mode {
            OcrMode::File => OcrSource::File(self.path.clone().context("ocr.mode is file but ocr.path is unset")?),
            OcrMode::Http => OcrSource::Http(HttpOcrConfig {
                url: self.url.clone().context("ocr.mode is http but ocr.url is unset")?,
                timeout_ms: self.timeout_ms,
                retries: self.retries,
            }),
        }))
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    pub detector: DetectorConfig,
    pub grouping: GroupingConfig,
    pub ocr: OcrSpec,
    pub out: PathBuf,
    pub overlay: bool,
    pub thresholds: Vec<usize>,
    /// Defaults for `synth`; its flags override these.
    pub synth: SynthSpec,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            detector: DetectorConfig::default(),
            grouping: GroupingConfig::default(),
            ocr: OcrSpec::default(),
            out: PathBuf::from("."),
            overlay: false,
            thresholds: vec![0, 1, 2, 3, 4],
            synth: SynthSpec::default(),
        }
    }
}

impl RunConfig {
    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).with_context(|| format!("cannot read config {}", path.display()))?;
        serde_json::from_str(&text).with_context(|| format!("invalid config {}", path.display()))
    }

    /// Sets the value at a dotted key such as `detector.min_widget_area`.
    /// The value is read as JSON when it parses, else as a string.
    pub fn set(&mut self, key: &str, raw: &str) -> Result<()> {
        let mut doc = serde_json::to_value(&*self)?;
        let mut slot = &mut doc;
        for part in key.split('.') {
            slot = match slot {
                Value::Object(map) => map.get_mut(part).with_context(|| format!("unknown config key {key:?}"))?,
                _ => bail!("unknown config key {key:?}"),
            };
        }
        *slot = serde_json::from_str(raw).unwrap_or_else(|_| Value::String(raw.to_owned()));
        *self = serde_json::from_value(doc).with_context(|| format!("invalid value {raw:?} for {key}"))?;
        Ok(())
    }

    /// Sorts and dedups thresholds, then checks every section.
    pub fn finish(mut self) -> Result<Self> {
        self.thresholds.sort_unstable();
        self.thresholds.dedup();
        if self.thresholds.is_empty() {
            bail!("thresholds must not be empty");
        }
        self.detector.validate()?;
        self.grouping.validate()?;
        self.ocr.source()?;
        Ok(self)
    }
}

/// Parses `0,1,3` or an inclusive range `0..4`.
pub fn parse_thresholds(s: &str) -> Result<Vec<usize>> {
    if let Some((a, b)) = s.split_once("..") {
        let a: usize = a.trim().parse().with_context(|| format!("bad threshold range {s:?}"))?;
        let b: usize = b.trim_start_matches('=').trim().parse().with_context(|| format!("bad threshold range {s:?}"))?;
        if a > b {
            bail!("empty threshold range {s:?}");
        }
        return Ok((a..=b).collect());
    }
    s.split(',')
        .map(|t| t.trim().parse().with_context(|| format!("bad threshold {t:?}")))
        .collect()
}

/// Pulls `--section.key=value` and `--section.key value` arguments out of
/// `args`; everything else is returned for clap.
pub fn split_dotted(args: Vec<String>) -> Result<(Vec<String>, Vec<(String, String)>)> {
    let mut rest = Vec::new();
    let mut dotted = Vec::new();
    let mut it = args.into_iter();
    while let Some(a) = it.next() {
        let Some(flag) = a.strip_prefix("--").filter(|f| f.split('=').next().is_some_and(|k| k.contains('.'))) else {
            rest.push(a);
            continue;
        };
        match flag.split_once('=') {
            Some((k, v)) => dotted.push((k.to_owned(), v.to_owned())),
            None => {
                let v = it.next().with_context(|| format!("--{flag} needs a value"))?;
                dotted.push((flag.to_owned(), v));
            }
        }
    }
    Ok((rest, dotted))
}
