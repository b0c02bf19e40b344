use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{Context, Result};
use clap::{Parser, Subcommand};
use scriptid::PipelineConfig;

mod commands;
mod fsio;

#[derive(Parser, Debug)]
#[command(name = "scriptid", version, about = "Word-level script identification for printed documents")]
struct Cli {
    /// Pipeline parameters as `key = value` lines
    #[arg(long, global = true)]
    config: Option<PathBuf>,

    /// Seed for every random choice
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,

    /// Worker threads (default: all cores)
    #[arg(long, global = true)]
    jobs: Option<usize>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Binarize, despeckle and deskew a page
    Preprocess {
        /// Page image (PGM or PBM)
        input: PathBuf,
        /// Output PBM
        #[arg(short, long)]
        output: PathBuf,
        /// Report path (default: <output>.txt)
        #[arg(long)]
        report: Option<PathBuf>,
    },

    /// Cut a page into word images plus a manifest
    Segment {
        /// Page image; a PGM page is preprocessed first
        page: PathBuf,
        /// Directory for `L{line}_W{word}.pbm` files and manifest.csv
        #[arg(short, long)]
        out_dir: PathBuf,
    },

    /// Compute feature vectors for a corpus directory or one word image
    Extract {
        /// Corpus root (one subdirectory per script) or a single image
        input: PathBuf,
        /// Dump file (default: stdout)
        #[arg(short, long)]
        output: Option<PathBuf>,
        /// Label for a single image
        #[arg(long)]
        label: Option<String>,
    },

    /// Build a model file from a labeled feature dump
    Train {
        dump: PathBuf,
        #[arg(short, long)]
        output: PathBuf,
        /// Default neighbour count stored in the model (default: config k)
        #[arg(short)]
        k: Option<usize>,
    },

    /// Predict the script of word images or of every word on pages
    Classify {
        model: PathBuf,
        inputs: Vec<PathBuf>,
        /// Treat inputs as pages: preprocess, segment, then classify each word
        #[arg(long)]
        page: bool,
        /// Neighbour count (default: the model's)
        #[arg(short)]
        k: Option<usize>,
        /// Append per-word wall time in milliseconds (always on for pages)
        #[arg(long)]
        timing: bool,
    },

    /// Accuracy report and confusion matrix
    Evaluate {
        model: PathBuf,
        /// Labeled feature dump; optional with --loo
        dump: Option<PathBuf>,
        #[arg(short)]
        k: Option<usize>,
        /// Leave-one-out over the model's own samples
        #[arg(long)]
        loo: bool,
        /// Also write the k-NN confusion matrix here
        #[arg(long)]
        csv: Option<PathBuf>,
    },

    /// Generate a synthetic labeled corpus from glyph sheets
    GenCorpus {
        /// Output corpus root
        #[arg(short, long)]
        out: PathBuf,
        /// Glyph sheet directory with sheets.txt (default: bundled sheets)
        #[arg(long)]
        fonts_dir: Option<PathBuf>,
        #[arg(long, default_value_t = 150)]
        per_class: usize,
        /// Salt-and-pepper probability
        #[arg(long, default_value_t = 0.0)]
        noise: f64,
        /// Maximum absolute word skew in degrees
        #[arg(long, default_value_t = 0.0)]
        skew: f64,
        #[arg(long, default_value_t = 10.0)]
        min_pt: f64,
        #[arg(long, default_value_t = 36.0)]
        max_pt: f64,
        /// Number of multi-line pages to generate
        #[arg(long, default_value_t = 0)]
        pages: usize,
        /// Directory for pages and their truth files
        #[arg(long)]
        pages_dir: Option<PathBuf>,
    },
}

fn load_config(path: Option<&PathBuf>) -> Result<PipelineConfig> {
    match path {
        Some(p) => PipelineConfig::from_file(p).with_context(|| format!("loading config {}", p.display())),
        None => Ok(PipelineConfig::default()),
    }
}

fn run(cli: Cli) -> Result<()> {
    if let Some(n) = cli.jobs {
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .context("starting worker pool")?;
    }
    let cfg = load_config(cli.config.as_ref())?;
    match cli.command {
        Command::Preprocess { input, output, report } => commands::preprocess(&cfg, &input, &output, report),
        Command::Segment { page, out_dir } => commands::segment(&cfg, &page, &out_dir),
        Command::Extract { input, output, label } => commands::extract(&cfg, &input, output.as_deref(), label),
        Command::Train { dump, output, k } => commands::train(&dump, &output, k.unwrap_or(cfg.k)),
        Command::Classify {
            model,
            inputs,
            page,
            k,
            timing,
        } => commands::classify(&cfg, &model, &inputs, page, k, timing),
        Command::Evaluate {
            model,
            dump,
            k,
            loo,
            csv,
        } => commands::evaluate(&model, dump.as_deref(), k, loo, csv.as_deref()),
        Command::GenCorpus {
            out,
            fonts_dir,
            per_class,
            noise,
            skew,
            min_pt,
            max_pt,
            pages,
            pages_dir,
        } => commands::gen_corpus(
            cli.seed,
            &commands::CorpusRequest {
                out,
                fonts_dir,
                per_class,
                noise,
                skew,
                min_pt,
                max_pt,
                pages,
                pages_dir,
            },
        ),
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}
