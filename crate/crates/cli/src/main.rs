mod commands;
mod config;
mod output;

use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{Context, Result};
use clap::{Args, Parser, Subcommand};

use config::{parse_thresholds, split_dotted, RunConfig};

/// Widget detection and perceptual grouping for GUI screenshots.
///
/// Any config key can also be given as a flag of its dotted name, e.g.
/// `--detector.min_widget_area=80` or `--grouping.eps_position 10`.
#[derive(Parser, Debug)]
#[command(name = "gestalt", version)]
struct Cli {
    #[command(flatten)]
    global: Global,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug)]
struct Global {
    /// JSON config file.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Worker threads for file-level parallelism (default: all cores).
    #[arg(long, global = true)]
    jobs: Option<usize>,
    /// Output directory.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Also write <stem>.overlay.png for every run.
    #[arg(long, global = true)]
    overlay: bool,
    /// Widget file, or directory of <stem>.widgets.json, to group instead
    /// of detecting.
    #[arg(long, global = true)]
    metadata_widgets: Option<PathBuf>,
    /// OCR fixture file, or directory of <stem>.ocr.json.
    #[arg(long, global = true)]
    ocr_file: Option<PathBuf>,
    /// OCR endpoint (token from GESTALT_OCR_TOKEN).
    #[arg(long, global = true)]
    ocr_url: Option<String>,
    /// Edit-distance thresholds, e.g. `0..4` or `0,1,2`.
    #[arg(long, global = true)]
    thresholds: Option<String>,
    /// More logging (-v info, -vv debug).
    #[arg(short, long, global = true, action = clap::ArgAction::Count)]
    verbose: u8,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Detect and group widgets in screenshots.
    Run {
        #[arg(required = true)]
        images: Vec<PathBuf>,
    },
    /// Score predicted hierarchies against ground truth.
    Eval {
        #[arg(long)]
        pred: PathBuf,
        #[arg(long)]
        gt: PathBuf,
    },
    /// Generate a synthetic corpus with ground truth.
    Synth(commands::SynthArgs),
    /// Draw a hierarchy over its screenshot.
    Render { image: PathBuf, hierarchy: PathBuf },
}

/// Exit status for bad configuration or arguments.
const CONFIG_ERROR: u8 = 2;

fn build_config(g: &Global, dotted: &[(String, String)]) -> Result<RunConfig> {
    let mut cfg = match &g.config {
        Some(p) => RunConfig::load(p)?,
        None => RunConfig::default(),
    };
    if let Some(out) = &g.out {
        cfg.out = out.clone();
    }
    if g.overlay {
        cfg.overlay = true;
    }
    if g.ocr_file.is_some() && g.ocr_url.is_some() {
        anyhow::bail!("--ocr-file and --ocr-url are mutually exclusive");
    }
    if let Some(p) = &g.ocr_file {
        cfg.ocr.mode = Some(config::OcrMode::File);
        cfg.ocr.path = Some(p.clone());
    }
    if let Some(u) = &g.ocr_url {
        cfg.ocr.mode = Some(config::OcrMode::Http);
        cfg.ocr.url = Some(u.clone());
    }
    if let Some(t) = &g.thresholds {
        cfg.thresholds = parse_thresholds(t)?;
    }
    for (k, v) in dotted {
        cfg.set(k, v)?;
    }
    cfg.finish()
}

fn main() -> ExitCode {
    let (args, dotted) = match split_dotted(std::env::args().collect()) {
        Ok(x) => x,
        Err(e) => {
            eprintln!("error: {e:#}");
            return ExitCode::from(CONFIG_ERROR);
        }
    };
    let cli = Cli::parse_from(args);
    let level = match cli.global.verbose {
        0 => "warn",
        1 => "info",
        _ => "debug",
    };
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or(level)).init();

    let setup = build_config(&cli.global, &dotted).and_then(|cfg| {
        let mut pool = rayon::ThreadPoolBuilder::new();
        if let Some(n) = cli.global.jobs {
            pool = pool.num_threads(n.max(1));
        }
        let pool = pool.build().context("cannot start worker pool")?;
        Ok((cfg, pool))
    });
    let (cfg, pool) = match setup {
        Ok(x) => x,
        Err(e) => {
            eprintln!("error: {e:#}");
            return ExitCode::from(CONFIG_ERROR);
        }
    };

    let result = pool.install(|| match cli.command {
        Command::Run { images } => commands::run(&images, &cfg, cli.global.metadata_widgets.as_deref()),
        Command::Eval { pred, gt } => commands::eval(&pred, &gt, &cfg),
        Command::Synth(args) => commands::synth(&args, &cfg),
        Command::Render { image, hierarchy } => commands::render(&image, &hierarchy, &cfg),
    });
    match result {
        Ok(status) => status.into(),
        Err(e) => {
            eprintln!("error: {e:#}");
            e.downcast_ref::<commands::ConfigError>()
                .map_or(ExitCode::FAILURE, |_| ExitCode::from(CONFIG_ERROR))
        }
    }
}
