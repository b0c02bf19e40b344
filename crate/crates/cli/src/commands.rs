use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};
use std::time::Instant;

use anyhow::{bail, ensure, Context, Result};
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use scriptid::classifier::{evaluate as evaluate_knn, evaluate_nn, leave_one_out};
use scriptid::dump::{self, DumpRecord};
use scriptid::pipeline::{self, classify_word};
use scriptid::pnm::{self, Raster};
use scriptid::synth::{self, CorpusParams, GlyphSheets, PageParams};
use scriptid::{Model, PipelineConfig, Report, ScriptLabel};

use crate::fsio::{write_atomic, Staging};

fn read_raster(path: &Path) -> Result<Raster> {
    let bytes = fs::read(path).with_context(|| format!("reading {}", path.display()))?;
    pnm::decode(&bytes).with_context(|| format!("decoding {}", path.display()))
}

fn load_model(path: &Path) -> Result<Model> {
    let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    Model::from_text(&text).with_context(|| format!("loading model {}", path.display()))
}

fn load_dump(path: &Path) -> Result<Vec<DumpRecord>> {
    let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    dump::parse(&text).with_context(|| format!("parsing {}", path.display()))
}

pub fn preprocess(cfg: &PipelineConfig, input: &Path, output: &Path, report: Option<PathBuf>) -> Result<()> {
    let raster = read_raster(input)?;
    let (page, rep) = pipeline::preprocess(&raster, cfg);
    let report_path = report.unwrap_or_else(|| {
        let mut p = output.as_os_str().to_owned();
        p.push(".txt");
        PathBuf::from(p)
    });
    write_atomic(&report_path, rep.to_text().as_bytes())?;
    write_atomic(output, &pnm::encode_pbm(&page))?;
    print!("{}", rep.to_text());
    Ok(())
}

pub fn segment(cfg: &PipelineConfig, page: &Path, out_dir: &Path) -> Result<()> {
    let page = match read_raster(page)? {
        Raster::Binary(b) => b,
        gray @ Raster::Gray(_) => pipeline::preprocess(&gray, cfg).0,
    };
    let words = pipeline::segment(&page, cfg);
    let encoded: Vec<Vec<u8>> = words.par_iter().map(|w| pnm::encode_pbm(&w.image)).collect();

    let mut staging = Staging::new(out_dir)?;
    let mut manifest = String::from("file,row_start,row_end,col_start,col_end\n");
    for (w, bytes) in words.iter().zip(&encoded) {
        staging.add(&w.file_name(), bytes)?;
        manifest.push_str(&w.manifest_line());
        manifest.push('\n');
    }
    staging.add("manifest.csv", manifest.as_bytes())?;
    staging.commit()?;
    eprintln!("{} words written to {}", words.len(), out_dir.display());
    Ok(())
}

fn is_image(path: &Path) -> bool {
    path.extension()
        .and_then(|e| e.to_str())
        .is_some_and(|e| e.eq_ignore_ascii_case("pgm") || e.eq_ignore_ascii_case("pbm"))
}

fn sorted_entries(dir: &Path) -> Result<Vec<PathBuf>> {
    let mut entries = fs::read_dir(dir)
        .with_context(|| format!("listing {}", dir.display()))?
        .map(|e| e.map(|e| e.path()))
        .collect::<std::io::Result<Vec<_>>>()
        .with_context(|| format!("listing {}", dir.display()))?;
    entries.sort();
    Ok(entries)
}

/// One word image to extract: file on disk, path as written to the dump, label.
struct Job {
    file: PathBuf,
    name: String,
    label: Option<ScriptLabel>,
}

fn corpus_jobs(root: &Path) -> Result<Vec<Job>> {
    let mut jobs = Vec::new();
    for entry in sorted_entries(root)? {
        let name = entry.file_name().unwrap_or_default().to_string_lossy().into_owned();
        if entry.is_dir() {
            let label: ScriptLabel = match name.parse() {
                Ok(l) => l,
                Err(e) => {
                    eprintln!("warning: skipping directory {name}: {e}");
                    continue;
                }
            };
            for file in sorted_entries(&entry)?.into_iter().filter(|p| p.is_file() && is_image(p)) {
                let fname = file.file_name().unwrap_or_default().to_string_lossy().into_owned();
                jobs.push(Job {
                    file,
                    name: format!("{name}/{fname}"),
                    label: Some(label.clone()),
                });
            }
        } else if is_image(&entry) {
            jobs.push(Job {
                file: entry,
                name,
                label: None,
            });
        }
    }
    Ok(jobs)
}

pub fn extract(cfg: &PipelineConfig, input: &Path, output: Option<&Path>, label: Option<String>) -> Result<()> {
    let label = label.map(|l| l.parse::<ScriptLabel>()).transpose()?;
    let jobs = if input.is_dir() {
        corpus_jobs(input)?
    } else {
        vec![Job {
            file: input.to_path_buf(),
            name: input.to_string_lossy().into_owned(),
            label,
        }]
    };

    let results: Vec<Result<String>> = jobs
        .par_iter()
        .map(|job| {
            let img = pipeline::word_binary(&read_raster(&job.file)?);
            let features = pipeline::word_features(&img, cfg).with_context(|| job.name.clone())?;
            let line = DumpRecord {
                path: job.name.clone(),
                label: job.label.clone(),
                features,
            }
            .to_line()?;
            Ok(line)
        })
        .collect();

    let mut text = dump::header();
    text.push('\n');
    let mut ok = 0;
    for r in results {
        match r {
            Ok(line) => {
                text.push_str(&line);
                text.push('\n');
                ok += 1;
            }
            Err(e) => eprintln!("warning: skipped: {e:#}"),
        }
    }
    ensure!(ok > 0, "no word image could be processed under {}", input.display());
    match output {
        Some(path) => write_atomic(path, text.as_bytes())?,
        None => print!("{text}"),
    }
    eprintln!("{ok} of {} words extracted", jobs.len());
    Ok(())
}

pub fn train(dump_path: &Path, output: &Path, k: usize) -> Result<()> {
    let records = load_dump(dump_path)?;
    let mut samples = Vec::with_capacity(records.len());
    for r in &records {
        match r.to_sample() {
            Some(s) => samples.push(s),
            None => bail!("{}: unlabeled line for {}", dump_path.display(), r.path),
        }
    }
    let model = Model::new(samples, k).context("building model")?;
    write_atomic(output, model.to_text().as_bytes())?;
    for (label, n) in model.class_counts() {
        println!("{label}: {n}");
    }
    println!("total: {} (k = {})", model.len(), model.k());
    Ok(())
}

struct Classified {
    name: String,
    label: ScriptLabel,
    confidence: f64,
    millis: f64,
}

impl Classified {
    fn line(&self, timing: bool) -> String {
        let mut s = format!("{},{},{:.4}", self.name, self.label, self.confidence);
        if timing {
            let _ = write!(s, ",{:.3}", self.millis);
        }
        s
    }
}

fn classify_page(cfg: &PipelineConfig, model: &Model, path: &Path, k: usize) -> Result<Vec<Classified>> {
    let raster = read_raster(path)?;
    let (page, _) = pipeline::preprocess(&raster, cfg);
    let prefix = path.to_string_lossy();
    pipeline::segment(&page, cfg)
        .par_iter()
        .map(|w| {
            let start = Instant::now();
            let res = classify_word(model, &w.image, cfg, k)?;
            let millis = start.elapsed().as_secs_f64() * 1e3;
            Ok(Classified {
                name: format!("{prefix}:L{}_W{}", w.line, w.word),
                confidence: res.knn.confidence(),
                label: res.knn.label,
                millis,
            })
        })
        .collect()
}

fn classify_file(cfg: &PipelineConfig, model: &Model, path: &Path, k: usize) -> Result<Classified> {
    let bytes = fs::read(path).with_context(|| format!("reading {}", path.display()))?;
    let start = Instant::now();
    let raster = pnm::decode(&bytes).with_context(|| format!("decoding {}", path.display()))?;
    let res = classify_word(model, &pipeline::word_binary(&raster), cfg, k)
        .with_context(|| format!("classifying {}", path.display()))?;
    let millis = start.elapsed().as_secs_f64() * 1e3;
    Ok(Classified {
        name: path.to_string_lossy().into_owned(),
        confidence: res.knn.confidence(),
        label: res.knn.label,
        millis,
    })
}

pub fn classify(
    cfg: &PipelineConfig,
    model_path: &Path,
    inputs: &[PathBuf],
    page: bool,
    k: Option<usize>,
    timing: bool,
) -> Result<()> {
    ensure!(!inputs.is_empty(), "no input images given");
    let model = load_model(model_path)?;
    let k = k.unwrap_or(model.k());
    ensure!(
        k >= 1 && k <= model.len(),
        "k = {k} is outside 1..={} for this model",
        model.len()
    );

    let results: Vec<Result<Vec<Classified>>> = inputs
        .par_iter()
        .map(|p| {
            if page {
                classify_page(cfg, &model, p, k)
            } else {
                classify_file(cfg, &model, p, k).map(|c| vec![c])
            }
        })
        .collect();

    let mut failed = 0;
    let mut out = String::new();
    for r in results {
        match r {
            Ok(words) => {
                for w in words {
                    out.push_str(&w.line(timing || page));
                    out.push('\n');
                }
            }
            Err(e) => {
                eprintln!("error: {e:#}");
                failed += 1;
            }
        }
    }
    print!("{out}");
    ensure!(failed == 0, "{failed} of {} inputs failed", inputs.len());
    Ok(())
}

fn percent(x: Option<f64>) -> String {
    x.map_or_else(|| "-".to_string(), |v| format!("{:.2}%", 100.0 * v))
}

/// Per-class accuracy with one column per classifier, then the k-NN confusion matrix.
fn render_report(nn: &Report, knn: &Report, k: usize) -> String {
    let mut s = String::new();
    let knn_head = format!("KNN (k={k})");
    let _ = writeln!(s, "{:<18}{:>10}{:>12}{:>8}", "script", "NN", knn_head, "words");
    let totals = knn.class_totals();
    for (i, ((label, a), (_, b))) in nn.per_class_accuracy().into_iter().zip(knn.per_class_accuracy()).enumerate() {
        let _ = writeln!(s, "{:<18}{:>10}{:>12}{:>8}", label.as_str(), percent(a), percent(b), totals[i]);
    }
    let _ = writeln!(
        s,
        "{:<18}{:>10}{:>12}{:>8}",
        "overall",
        percent(Some(nn.overall_accuracy())),
        percent(Some(knn.overall_accuracy())),
        knn.total()
    );
    let _ = writeln!(s, "\nconfusion matrix (KNN, k={k})");
    s.push_str(&knn.confusion_csv());
    s
}

pub fn evaluate(model_path: &Path, dump_path: Option<&Path>, k: Option<usize>, loo: bool, csv: Option<&Path>) -> Result<()> {
    let model = load_model(model_path)?;
    let k = k.unwrap_or(model.k());
    let (nn, knn) = if loo {
        ensure!(dump_path.is_none(), "--loo evaluates the model's own samples; drop the dump argument");
        (leave_one_out(&model, 1)?, leave_one_out(&model, k)?)
    } else {
        let path = dump_path.context("a labeled dump is required unless --loo is given")?;
        let mut test = Vec::new();
        for r in load_dump(path)? {
            match r.to_sample() {
                Some(s) => test.push(s),
                None => bail!("{}: unlabeled line for {}", path.display(), r.path),
            }
        }
        (evaluate_nn(&model, &test)?, evaluate_knn(&model, &test, k)?)
    };
    if let Some(path) = csv {
        write_atomic(path, knn.confusion_csv().as_bytes())?;
    }
    print!("{}", render_report(&nn, &knn, k));
    Ok(())
}

pub struct CorpusRequest {
    pub out: PathBuf,
    pub fonts_dir: Option<PathBuf>,
    pub per_class: usize,
    pub noise: f64,
    pub skew: f64,
    pub min_pt: f64,
    pub max_pt: f64,
    pub pages: usize,
    pub pages_dir: Option<PathBuf>,
}

pub fn gen_corpus(seed: u64, req: &CorpusRequest) -> Result<()> {
    ensure!(req.per_class >= 1, "--per-class must be at least 1");
    ensure!(
        req.min_pt > 0.0 && req.min_pt <= req.max_pt,
        "point sizes must satisfy 0 < min <= max"
    );
    ensure!((0.0..0.5).contains(&req.noise), "--noise must be in [0, 0.5)");
    ensure!((0.0..=45.0).contains(&req.skew), "--skew must be in [0, 45]");
    ensure!(
        req.pages == 0 || req.pages_dir.is_some(),
        "--pages needs --pages-dir"
    );
    let sheets = match &req.fonts_dir {
        Some(dir) => GlyphSheets::load_dir(dir).with_context(|| format!("loading glyph sheets from {}", dir.display()))?,
        None => GlyphSheets::bundled(),
    };

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let params = CorpusParams {
        per_class: req.per_class,
        min_point: req.min_pt,
        max_point: req.max_pt,
        noise: req.noise,
        skew: req.skew,
        ..Default::default()
    };
    let words = synth::generate_words(&sheets, &params, &mut rng);

    let mut staging = Staging::new(&req.out)?;
    let mut manifest = String::from("file,label,glyphs,point_size\n");
    for (i, w) in words.iter().enumerate() {
        let n = i % req.per_class + 1;
        let name = format!("{0}/{0}_{n:04}.pgm", w.label);
        staging.add(&name, &pnm::encode_pgm(&w.gray))?;
        let glyphs: Vec<String> = w.glyphs.iter().map(usize::to_string).collect();
        let _ = writeln!(manifest, "{name},{},{},{:.2}", w.label, glyphs.join("-"), w.point_size);
    }
    staging.add("manifest.csv", manifest.as_bytes())?;
    staging.commit()?;
    eprintln!("{} words written to {}", words.len(), req.out.display());

    if let Some(dir) = &req.pages_dir {
        let mut staging = Staging::new(dir)?;
        for p in 1..=req.pages {
            let page = synth::generate_page(&sheets, &PageParams::default(), &mut rng);
            let gray = synth::render_gray(&page.image, &mut rng);
            staging.add(&format!("page_{p:03}.pgm"), &pnm::encode_pgm(&gray))?;
            let mut truth = String::from("line,word,label,row_start,row_end,col_start,col_end\n");
            for (li, line) in page.lines.iter().enumerate() {
                for (wi, w) in line.words.iter().enumerate() {
                    let _ = writeln!(
                        truth,
                        "{},{},{},{},{},{},{}",
                        li + 1,
                        wi + 1,
                        w.label,
                        line.band.row_start,
                        line.band.row_end,
                        w.col_start,
                        w.col_end
                    );
                }
            }
            staging.add(&format!("page_{p:03}.csv"), truth.as_bytes())?;
        }
        staging.commit()?;
        eprintln!("{} pages written to {}", req.pages, dir.display());
    }
    Ok(())
}
