use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use scriptid::pnm::{self, Raster};
use scriptid::synth::{generate_page, render_gray, GlyphSheets, PageParams};
use scriptid::{BinaryImage, PipelineConfig};
use tempfile::TempDir;

fn scriptid(args: &[&str], cwd: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_scriptid"))
        .args(args)
        .current_dir(cwd)
        .output()
        .expect("binary runs")
}

fn ok(args: &[&str], cwd: &Path) -> String {
    let out = scriptid(args, cwd);
    assert!(
        out.status.success(),
        "{args:?} failed: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    String::from_utf8(out.stdout).unwrap()
}

fn fails(args: &[&str], cwd: &Path) -> String {
    let out = scriptid(args, cwd);
    assert!(!out.status.success(), "{args:?} should fail");
    String::from_utf8(out.stderr).unwrap()
}

fn small_page() -> PageParams {
    PageParams {
        width: 800,
        lines: 3,
        words_per_line: 4,
        margin: 80,
        ..Default::default()
    }
}

/// A gray page with exactly three lines of four words.
fn write_page(dir: &Path, seed: u64) -> (PathBuf, scriptid::synth::GeneratedPage) {
    let sheets = GlyphSheets::bundled();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let page = loop {
        let p = generate_page(&sheets, &small_page(), &mut rng);
        if p.lines.len() == 3 && p.lines.iter().all(|l| l.words.len() == 4) {
            break p;
        }
    };
    let path = dir.join("page.pgm");
    fs::write(&path, pnm::encode_pgm(&render_gray(&page.image, &mut rng))).unwrap();
    (path, page)
}

fn files_in(dir: &Path) -> Vec<String> {
    let mut v: Vec<String> = fs::read_dir(dir)
        .unwrap()
        .map(|e| e.unwrap().file_name().to_string_lossy().into_owned())
        .collect();
    v.sort();
    v
}

#[test]
fn preprocess_matches_library_pipeline() {
    let tmp = TempDir::new().unwrap();
    let (page_path, _) = write_page(tmp.path(), 1);
    let stdout = ok(&["preprocess", "page.pgm", "-o", "clean.pbm"], tmp.path());

    let raster = pnm::read(&page_path).unwrap();
    let (want, report) = scriptid::pipeline::preprocess(&raster, &PipelineConfig::default());
    let Raster::Binary(got) = pnm::read(tmp.path().join("clean.pbm")).unwrap() else {
        panic!("expected a PBM")
    };
    assert_eq!(got, want);
    assert_eq!(stdout, report.to_text());
    assert_eq!(fs::read_to_string(tmp.path().join("clean.pbm.txt")).unwrap(), report.to_text());
    assert!(stdout.contains("skew_angle=0.0"));
}

#[test]
fn blank_page_gives_empty_output() {
    let tmp = TempDir::new().unwrap();
    fs::write(tmp.path().join("blank.pgm"), pnm::encode_pgm(&scriptid::GrayImage::filled(40, 30, 240).unwrap())).unwrap();
    ok(&["preprocess", "blank.pgm", "-o", "out.pbm", "--report", "r.txt"], tmp.path());
    let Raster::Binary(b) = pnm::read(tmp.path().join("out.pbm")).unwrap() else { panic!() };
    assert_eq!(b, BinaryImage::zeros(40, 30).unwrap());
    assert!(fs::read_to_string(tmp.path().join("r.txt")).unwrap().contains("components=0"));

    ok(&["segment", "out.pbm", "-o", "words"], tmp.path());
    assert_eq!(files_in(&tmp.path().join("words")), vec!["manifest.csv"]);
    assert_eq!(
        fs::read_to_string(tmp.path().join("words/manifest.csv")).unwrap(),
        "file,row_start,row_end,col_start,col_end\n"
    );
}

#[test]
fn corrupt_input_leaves_nothing_behind() {
    let tmp = TempDir::new().unwrap();
    fs::write(tmp.path().join("bad.pgm"), b"P5\n10 10\n255\nshort").unwrap();
    let err = fails(&["preprocess", "bad.pgm", "-o", "out/clean.pbm"], tmp.path());
    assert!(err.contains("bad.pgm"), "{err}");
    assert!(!tmp.path().join("out/clean.pbm").exists());
    assert!(!tmp.path().join("out/clean.pbm.txt").exists());
    fails(&["preprocess", "missing.pgm", "-o", "x.pbm"], tmp.path());
    assert_eq!(files_in(tmp.path()), vec!["bad.pgm"]);
}

#[test]
fn segment_recovers_generator_boxes_deterministically() {
    let tmp = TempDir::new().unwrap();
    let (_, page) = write_page(tmp.path(), 2);
    ok(&["segment", "page.pgm", "-o", "a"], tmp.path());
    ok(&["segment", "page.pgm", "-o", "b"], tmp.path());

    let names = files_in(&tmp.path().join("a"));
    assert_eq!(names.len(), 13, "{names:?}");
    let manifest = fs::read_to_string(tmp.path().join("a/manifest.csv")).unwrap();
    let rows: Vec<Vec<String>> = manifest.lines().skip(1).map(|l| l.split(',').map(String::from).collect()).collect();
    assert_eq!(rows.len(), 12);
    let truth: Vec<_> = page
        .lines
        .iter()
        .enumerate()
        .flat_map(|(li, l)| l.words.iter().enumerate().map(move |(wi, w)| (li, wi, l.band, w.clone())))
        .collect();
    for (row, (li, wi, band, w)) in rows.iter().zip(truth) {
        assert_eq!(row[0], format!("L{}_W{}.pbm", li + 1, wi + 1));
        let nums: Vec<usize> = row[1..].iter().map(|s| s.parse().unwrap()).collect();
        for (got, want) in nums.iter().zip([band.row_start, band.row_end, w.col_start, w.col_end]) {
            assert!(got.abs_diff(want) <= 1, "{row:?}");
        }
    }
    for name in names {
        assert_eq!(
            fs::read(tmp.path().join("a").join(&name)).unwrap(),
            fs::read(tmp.path().join("b").join(&name)).unwrap(),
            "{name}"
        );
    }
}

#[test]
fn extract_single_rectangle_matches_closed_form() {
    let tmp = TempDir::new().unwrap();
    // 6 wide, 12 tall: line length 9 fits vertically only
    let rect = BinaryImage::ones(6, 12).unwrap().pad(3);
    fs::write(tmp.path().join("rect.pbm"), pnm::encode_pbm(&rect)).unwrap();
    let out = ok(&["extract", "rect.pbm", "--label", "digits"], tmp.path());
    let line = out.lines().find(|l| !l.starts_with('#')).unwrap();
    let fields: Vec<&str> = line.split(',').collect();
    assert_eq!(&fields[..2], ["rect.pbm", "english_numeral"]);
    let values: Vec<f64> = fields[2..].iter().map(|s| s.parse().unwrap()).collect();
    assert_eq!(values, [0.0, 0.0, 1.0, 0.0, 2.0, 1.0, 0.5, 1.0]);
}

#[test]
fn extract_walks_a_corpus_and_skips_bad_files() {
    let tmp = TempDir::new().unwrap();
    let root = tmp.path().join("corpus");
    fs::create_dir_all(root.join("kannada")).unwrap();
    fs::create_dir_all(root.join("devnagari")).unwrap();
    let a = pnm::encode_pbm(&BinaryImage::from_fn(9, 9, |r, c| r == 4 || c == 4).unwrap());
    fs::write(root.join("kannada/w2.pbm"), &a).unwrap();
    fs::write(root.join("kannada/w1.pbm"), &a).unwrap();
    fs::write(root.join("devnagari/w1.pbm"), pnm::encode_pbm(&BinaryImage::ones(8, 3).unwrap())).unwrap();
    fs::write(root.join("devnagari/broken.pgm"), b"P2\n2 2\n255\n1 2 3").unwrap();
    fs::write(root.join("notes.txt"), b"ignored").unwrap();

    let out = scriptid(&["extract", "corpus", "-o", "dump.csv"], tmp.path());
    assert!(out.status.success());
    assert!(String::from_utf8_lossy(&out.stderr).contains("broken.pgm"));
    let dump = fs::read_to_string(tmp.path().join("dump.csv")).unwrap();
    let lines: Vec<&str> = dump.lines().filter(|l| !l.starts_with('#')).collect();
    let paths: Vec<&str> = lines.iter().map(|l| l.split(',').next().unwrap()).collect();
    assert_eq!(paths, ["devnagari/w1.pbm", "kannada/w1.pbm", "kannada/w2.pbm"]);
    // same picture, same numbers
    assert_eq!(lines[1].split_once(".pbm").unwrap().1, lines[2].split_once(".pbm").unwrap().1);

    fs::create_dir_all(tmp.path().join("empty/kannada")).unwrap();
    fs::write(tmp.path().join("empty/kannada/blank.pbm"), pnm::encode_pbm(&BinaryImage::zeros(4, 4).unwrap())).unwrap();
    fails(&["extract", "empty", "-o", "none.csv"], tmp.path());
    assert!(!tmp.path().join("none.csv").exists());
}

fn tiny_corpus(dir: &Path) {
    ok(&["gen-corpus", "-o", "corpus", "--per-class", "12", "--seed", "5"], dir);
    ok(&["extract", "corpus", "-o", "dump.csv"], dir);
}

#[test]
fn train_classify_evaluate_round_trip() {
    let tmp = TempDir::new().unwrap();
    let dir = tmp.path();
    tiny_corpus(dir);
    let counts = ok(&["train", "dump.csv", "-o", "model.txt", "-k", "1"], dir);
    assert!(counts.contains("kannada: 12") && counts.contains("devnagari: 12") && counts.contains("english_numeral: 12"));

    let model_text = fs::read_to_string(dir.join("model.txt")).unwrap();
    let reloaded = scriptid::Model::from_text(&model_text).unwrap();
    assert_eq!(reloaded.to_text(), model_text);
    assert_eq!(reloaded.len(), 36);

    let out = ok(&["classify", "model.txt", "corpus/kannada/kannada_0003.pgm", "--timing"], dir);
    let fields: Vec<&str> = out.trim().split(',').collect();
    assert_eq!(&fields[1..3], ["kannada", "1.0000"]);
    assert!(fields[3].parse::<f64>().unwrap() > 0.0);

    let report = ok(&["evaluate", "model.txt", "dump.csv", "--csv", "confusion.csv"], dir);
    assert!(report.lines().any(|l| l.starts_with("overall") && l.contains("100.00%")), "{report}");
    let csv = fs::read_to_string(dir.join("confusion.csv")).unwrap();
    for row in csv.lines().skip(1) {
        let sum: usize = row.split(',').skip(1).map(|n| n.parse::<usize>().unwrap()).sum();
        assert_eq!(sum, 12);
    }
}

#[test]
fn train_rejects_bad_input() {
    let tmp = TempDir::new().unwrap();
    let dir = tmp.path();
    tiny_corpus(dir);
    fails(&["train", "dump.csv", "-o", "m.txt", "-k", "37"], dir);
    fails(&["train", "dump.csv", "-o", "m.txt", "-k", "4"], dir);
    let mut dump = fs::read_to_string(dir.join("dump.csv")).unwrap();
    dump.push_str("loose.pbm,,0.1,0,0,0,1,0.2,0.5,0.5\n");
    fs::write(dir.join("mixed.csv"), dump).unwrap();
    let err = fails(&["train", "mixed.csv", "-o", "m.txt"], dir);
    assert!(err.contains("unlabeled"), "{err}");
    assert!(!dir.join("m.txt").exists());
}

#[test]
fn model_with_wrong_feature_order_is_refused() {
    let tmp = TempDir::new().unwrap();
    let dir = tmp.path();
    tiny_corpus(dir);
    ok(&["train", "dump.csv", "-o", "model.txt"], dir);
    let text = fs::read_to_string(dir.join("model.txt")).unwrap().replace("opd_0,opd_45", "opd_45,opd_0");
    fs::write(dir.join("swapped.txt"), text).unwrap();
    let err = fails(&["classify", "swapped.txt", "corpus/kannada/kannada_0001.pgm"], dir);
    assert!(err.contains("feature order"), "{err}");
}

#[test]
fn page_mode_reports_every_word_with_timing() {
    let tmp = TempDir::new().unwrap();
    let dir = tmp.path();
    tiny_corpus(dir);
    ok(&["train", "dump.csv", "-o", "model.txt"], dir);
    write_page(dir, 3);
    let out = ok(&["classify", "model.txt", "page.pgm", "--page"], dir);
    let lines: Vec<&str> = out.lines().collect();
    assert_eq!(lines.len(), 12);
    assert!(lines[0].starts_with("page.pgm:L1_W1,"));
    for l in lines {
        let f: Vec<&str> = l.split(',').collect();
        assert_eq!(f.len(), 4);
        assert!(f[3].parse::<f64>().unwrap() > 0.0);
    }
}

#[test]
fn gen_corpus_layout_and_reproducibility() {
    let tmp = TempDir::new().unwrap();
    let dir = tmp.path();
    ok(&["gen-corpus", "-o", "a", "--per-class", "10", "--seed", "11", "--noise", "0.01", "--skew", "3"], dir);
    ok(&["gen-corpus", "-o", "b", "--per-class", "10", "--seed", "11", "--noise", "0.01", "--skew", "3"], dir);
    for class in ["devnagari", "english_numeral", "kannada"] {
        let names = files_in(&dir.join("a").join(class));
        assert_eq!(names.len(), 10);
        for n in names {
            let p = format!("{class}/{n}");
            assert_eq!(fs::read(dir.join("a").join(&p)).unwrap(), fs::read(dir.join("b").join(&p)).unwrap());
        }
    }
    let manifest = fs::read_to_string(dir.join("a/manifest.csv")).unwrap();
    assert_eq!(manifest, fs::read_to_string(dir.join("b/manifest.csv")).unwrap());
    // the first word of every class is a single glyph
    for class in ["devnagari", "english_numeral", "kannada"] {
        let first = manifest.lines().find(|l| l.starts_with(&format!("{class}/"))).unwrap();
        assert!(!first.split(',').nth(2).unwrap().contains('-'), "{first}");
    }

    let err = fails(&["gen-corpus", "-o", "c", "--fonts-dir", "no-such-dir"], dir);
    assert!(err.contains("sheets.txt"), "{err}");
    assert!(!dir.join("c/manifest.csv").exists());
}

#[test]
fn bad_config_is_rejected_at_startup() {
    let tmp = TempDir::new().unwrap();
    fs::write(tmp.path().join("cfg.txt"), "k = 4\n").unwrap();
    let err = fails(&["--config", "cfg.txt", "gen-corpus", "-o", "x"], tmp.path());
    assert!(err.contains("k must be odd"), "{err}");
    fs::write(tmp.path().join("cfg.txt"), "# tuned\nk = 5\nmin_area = 10\n").unwrap();
    ok(&["--config", "cfg.txt", "gen-corpus", "-o", "x", "--per-class", "1"], tmp.path());
}
