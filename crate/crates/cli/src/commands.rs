use std::collections::BTreeMap;
use std::fmt;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use anyhow::{bail, Context, Result};
use clap::Args;
use rayon::prelude::*;
use serde::Serialize;

use gestalt_core::detect::{load_widgets, FileOcr, HttpOcr, OcrProvider, ENV_TOKEN};
use gestalt_core::eval::{evaluate_gui, EvalReport};
use gestalt_core::hierarchy::Hierarchy;
use gestalt_core::overlay::render_overlay;
use gestalt_core::pipeline::{run_detection, run_metadata};
use gestalt_core::raster::load_image;
use gestalt_core::synth::{corpus, generate, LayoutKind};

use crate::config::{OcrSource, RunConfig};
use crate::output::{png_bytes, write_atomic};

/// A problem with arguments or configuration rather than with an input.
#[derive(Debug)]
pub struct ConfigError(pub String);

impl fmt::Display for ConfigError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for ConfigError {}

fn config_error(msg: impl Into<String>) -> anyhow::Error {
    ConfigError(msg.into()).into()
}

#[derive(Debug, PartialEq, Eq)]
pub enum Status {
    Ok,
    /// Some inputs failed; the rest were written.
    Partial,
}

impl From<Status> for ExitCode {
    fn from(s: Status) -> ExitCode {
        match s {
            Status::Ok => ExitCode::SUCCESS,
            Status::Partial => ExitCode::from(1),
        }
    }
}

fn stem_of(path: &Path) -> Result<String> {
    path.file_stem()
        .and_then(|s| s.to_str())
        .map(str::to_owned)
        .with_context(|| format!("{}: cannot derive a file stem", path.display()))
}

/// `path` itself, or `<path>/<stem>.<suffix>` when it is a directory.
fn per_stem(path: &Path, stem: &str, suffix: &str) -> PathBuf {
    if path.is_dir() {
        path.join(format!("{stem}.{suffix}"))
    } else {
        path.to_owned()
    }
}

fn create_out(dir: &Path) -> Result<()> {
    std::fs::create_dir_all(dir).with_context(|| format!("cannot create output directory {}", dir.display()))
}

#[derive(Serialize)]
struct FailedInput {
    input: String,
    error: String,
}

pub fn run(images: &[PathBuf], cfg: &RunConfig, metadata: Option<&Path>) -> Result<Status> {
    let mut stems = BTreeMap::new();
    for p in images {
        if let Some(prev) = stems.insert(stem_of(p)?, p) {
            return Err(config_error(format!(
                "{} and {} share a stem and would overwrite each other",
                prev.display(),
                p.display()
            )));
        }
    }
    let single = images.len() == 1;
    let source = match metadata {
        Some(m) => {
            if !single && !m.is_dir() {
                return Err(config_error("with several images, --metadata-widgets must be a directory"));
            }
            None
        }
        None => {
            let src = cfg
                .ocr
                .source()?
                .ok_or_else(|| config_error("detection needs an OCR source: --ocr-file or --ocr-url"))?;
            if let OcrSource::File(p) = &src {
                if !single && !p.is_dir() {
                    return Err(config_error("with several images, --ocr-file must be a directory"));
                }
            }
            Some(src)
        }
    };
    create_out(&cfg.out)?;

    let results: Vec<(&PathBuf, Result<()>)> = images
        .par_iter()
        .map(|p| (p, run_one(p, cfg, metadata, source.as_ref())))
        .collect();
    let failed: Vec<FailedInput> = results
        .into_iter()
        .filter_map(|(p, r)| r.err().map(|e| (p, e)))
        .map(|(p, e)| {
            eprintln!("error: {}: {e:#}", p.display());
            FailedInput {
                input: p.display().to_string(),
                error: format!("{e:#}"),
            }
        })
        .collect();
    if failed.is_empty() {
        return Ok(Status::Ok);
    }
    write_atomic(&cfg.out.join("errors.json"), serde_json::to_string_pretty(&failed)?.as_bytes())?;
    Ok(Status::Partial)
}

fn run_one(path: &Path, cfg: &RunConfig, metadata: Option<&Path>, source: Option<&OcrSource>) -> Result<()> {
    let started = Instant::now();
    let stem = stem_of(path)?;
    let image = load_image(path).with_context(|| format!("cannot load {}", path.display()))?;
    let outcome = match (metadata, source) {
        (Some(m), _) => {
            let file = per_stem(m, &stem, "widgets.json");
            let widgets = load_widgets(&file)?;
            run_metadata(widgets, image.dimensions(), &cfg.detector, &cfg.grouping)?
        }
        (None, Some(OcrSource::File(p))) => {
            let boxes = FileOcr::new(per_stem(p, &stem, "ocr.json")).recognize(&image)?;
            run_detection(&image, &boxes, &cfg.detector, &cfg.grouping)?
        }
        (None, Some(OcrSource::Http(c))) => {
            let provider = HttpOcr::new(c.clone().with_env_overrides()?).with_token(std::env::var(ENV_TOKEN).ok());
            let boxes = provider.recognize(&image)?;
            run_detection(&image, &boxes, &cfg.detector, &cfg.grouping)?
        }
        (None, None) => bail!("no widget source"),
    };
    write_atomic(
        &cfg.out.join(format!("{stem}.hierarchy.json")),
        outcome.hierarchy.to_json().as_bytes(),
    )?;
    if cfg.overlay {
        let overlay = render_overlay(&image, &outcome.hierarchy)?;
        write_atomic(&cfg.out.join(format!("{stem}.overlay.png")), &png_bytes(&overlay)?)?;
    }
    log::info!(
        "{}: {} widgets, {} blocks, {} recovered, {} reclassified in {:.0?}",
        path.display(),
        outcome.widgets.len(),
        outcome.hierarchy.blocks().len(),
        outcome.recovered.len(),
        outcome.reclassified.len(),
        started.elapsed()
    );
    Ok(())
}

const HIERARCHY_SUFFIXES: [&str; 2] = [".gt.json", ".hierarchy.json"];

/// Hierarchy files of a directory keyed by stem.
fn hierarchy_files(dir: &Path) -> Result<BTreeMap<String, PathBuf>> {
    let mut out = BTreeMap::new();
    for entry in std::fs::read_dir(dir).with_context(|| format!("cannot read directory {}", dir.display()))? {
        let path = entry?.path();
        let Some(name) = path.file_name().and_then(|n| n.to_str()) else {
            continue;
        };
        if let Some(stem) = HIERARCHY_SUFFIXES.iter().find_map(|s| name.strip_suffix(s)) {
            if let Some(prev) = out.insert(stem.to_owned(), path.clone()) {
                bail!("{} and {} have the same stem", prev.display(), path.display());
            }
        }
    }
    Ok(out)
}

pub fn eval(pred: &Path, gt: &Path, cfg: &RunConfig) -> Result<Status> {
    let gt_files = hierarchy_files(gt)?;
    if gt_files.is_empty() {
        bail!("no *.gt.json or *.hierarchy.json files in {}", gt.display());
    }
    let pred_files = hierarchy_files(pred)?;
    let mut report = EvalReport::default();
    for stem in pred_files.keys().filter(|s| !gt_files.contains_key(*s)) {
        log::warn!("{stem}: prediction without ground truth; skipped");
        report.skipped.push(stem.clone());
    }
    let mut status = Status::Ok;
    for (stem, gt_path) in &gt_files {
        let Some(pred_path) = pred_files.get(stem) else {
            log::warn!("{stem}: ground truth without prediction; skipped");
            report.skipped.push(stem.clone());
            continue;
        };
        let loaded = Hierarchy::load(gt_path).and_then(|g| Ok((g, Hierarchy::load(pred_path)?)));
        match loaded {
            Ok((g, p)) => report.add(stem, &evaluate_gui(&g, &p, &cfg.thresholds)),
            Err(e) => {
                eprintln!("error: {stem}: {e}");
                report.skipped.push(stem.clone());
                status = Status::Partial;
            }
        }
    }
    report.skipped.sort();
    if report.per_gui.is_empty() {
        bail!("no GUI could be evaluated; skipped: {}", report.skipped.join(", "));
    }
    report.finish(&cfg.thresholds);

    create_out(&cfg.out)?;
    let mut csv = Vec::new();
    report.write_csv(&mut csv)?;
    write_atomic(&cfg.out.join("eval.csv"), &csv)?;
    write_atomic(&cfg.out.join("eval.json"), report.to_json().as_bytes())?;
    println!("threshold,tp,fp,fn,precision,recall,f1");
    for r in &report.aggregate {
        println!(
            "{},{},{},{},{:.3},{:.3},{:.3}",
            r.threshold, r.tp, r.fp, r.fn_, r.precision, r.recall, r.f1
        );
    }
    Ok(status)
}

#[derive(Args, Debug)]
pub struct SynthArgs {
    /// Number of GUIs.
    #[arg(long, default_value_t = 10)]
    count: usize,
    /// Base seed (default: the config's synth.seed).
    #[arg(long)]
    seed: Option<u64>,
    /// Layout kinds to cycle through.
    #[arg(long, value_delimiter = ',', default_value = "list,grid,cards,tabs")]
    kinds: Vec<String>,
    /// Repeated items per GUI (random when unset).
    #[arg(long)]
    items: Option<usize>,
    /// Grid columns (random when unset).
    #[arg(long)]
    columns: Option<usize>,
    /// Hide the last item's leading non-text widget.
    #[arg(long)]
    occlusion: bool,
    /// Plant a sub-minimum badge and a spurious OCR entry (cards only).
    #[arg(long)]
    plant_errors: bool,
    #[arg(long)]
    width: Option<u32>,
    #[arg(long)]
    height: Option<u32>,
}

pub fn synth(args: &SynthArgs, cfg: &RunConfig) -> Result<Status> {
    let kinds = args
        .kinds
        .iter()
        .map(|k| k.parse::<LayoutKind>())
        .collect::<Result<Vec<_>, _>>()
        .map_err(|e| config_error(e.to_string()))?;
    if kinds.is_empty() || args.count == 0 {
        return Err(config_error("synth needs at least one kind and a positive count"));
    }
    let mut template = cfg.synth.clone();
    template.seed = args.seed.unwrap_or(template.seed);
    template.items = args.items.or(template.items);
    template.columns = args.columns.or(template.columns);
    template.occlusion |= args.occlusion;
    template.plant_errors |= args.plant_errors;
    template.width = args.width.unwrap_or(template.width);
    template.height = args.height.unwrap_or(template.height);
    let specs = corpus(&template, args.count, &kinds);
    for (_, spec) in &specs {
        spec.validate().map_err(|e| config_error(e.to_string()))?;
    }
    create_out(&cfg.out)?;

    let results: Vec<Result<()>> = specs
        .par_iter()
        .map(|(stem, spec)| {
            let gui = generate(spec)?;
            let dir = &cfg.out;
            write_atomic(&dir.join(format!("{stem}.png")), &png_bytes(&gui.image)?)?;
            write_atomic(&dir.join(format!("{stem}.ocr.json")), gui.ocr_json().as_bytes())?;
            write_atomic(&dir.join(format!("{stem}.gt.json")), gui.ground_truth.to_json().as_bytes())?;
            write_atomic(
                &dir.join(format!("{stem}.widgets.json")),
                gestalt_core::detect::widgets_to_json(&gui.widgets).as_bytes(),
            )?;
            Ok(())
        })
        .collect();
    let mut status = Status::Ok;
    for ((stem, _), r) in specs.iter().zip(results) {
        if let Err(e) = r {
            eprintln!("error: {stem}: {e:#}");
            status = Status::Partial;
        }
    }
    Ok(status)
}

pub fn render(image: &Path, hierarchy: &Path, cfg: &RunConfig) -> Result<Status> {
    let img = load_image(image).with_context(|| format!("cannot load {}", image.display()))?;
    let h = Hierarchy::load(hierarchy)?;
    let overlay = render_overlay(&img, &h).with_context(|| format!("cannot draw {}", hierarchy.display()))?;
    create_out(&cfg.out)?;
    let out = cfg.out.join(format!("{}.overlay.png", stem_of(image)?));
    write_atomic(&out, &png_bytes(&overlay)?)?;
    println!("{}", out.display());
    Ok(Status::Ok)
}
