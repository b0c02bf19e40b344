//! Synthetic word and page generator built from bitmap glyph sheets.
//!
//! A sheet is a PBM holding square glyph cells in rows of six. Glyphs keep
//! their vertical position inside the cell, so a word is composed by
//! laying cells side by side on a shared baseline: `joined` sheets abut
//! (their headlines merge), `spaced` sheets leave a small gap between glyphs.
//! An index file `sheets.txt` lists `label file cell count style` per sheet.

use std::fs;
use std::path::Path;

use rand::Rng;

use crate::classifier::ScriptLabel;
use crate::error::{Error, Result};
use crate::image::{BinaryImage, GrayImage};
use crate::pnm::{self, Raster};
use crate::segmentation::{rotate, LineBand};

const SHEET_COLUMNS: usize = 6;
/// Inter-glyph gap of spaced sheets, as a fraction of the cell size.
const GLYPH_GAP: f64 = 0.083;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SheetStyle {
    Joined,
    Spaced,
}

/// Glyphs of one script, each `cell` rows tall and trimmed to its ink columns.
#[derive(Debug, Clone)]
pub struct GlyphSet {
    pub label: ScriptLabel,
    pub cell: usize,
    pub style: SheetStyle,
    pub glyphs: Vec<BinaryImage>,
}

impl GlyphSet {
    /// Slices `count` cells out of a sheet image.
    pub fn from_sheet(
        label: ScriptLabel,
        sheet: &BinaryImage,
        cell: usize,
        count: usize,
        style: SheetStyle,
    ) -> Result<Self> {
        if cell == 0 || count == 0 {
            return Err(Error::GlyphSheet(format!("{label}: empty sheet description")));
        }
        let rows = count.div_ceil(SHEET_COLUMNS);
        if sheet.width() < SHEET_COLUMNS.min(count) * cell || sheet.height() < rows * cell {
            return Err(Error::GlyphSheet(format!(
                "{label}: {}x{} sheet too small for {count} cells of {cell}",
                sheet.width(),
                sheet.height()
            )));
        }
        let mut glyphs = Vec::with_capacity(count);
        for i in 0..count {
            let (r0, c0) = ((i / SHEET_COLUMNS) * cell, (i % SHEET_COLUMNS) * cell);
            let cellimg = sheet.crop(r0, c0, r0 + cell - 1, c0 + cell - 1)?;
            let (_, first, _, last) = cellimg
                .ink_bounds()
                .ok_or_else(|| Error::GlyphSheet(format!("{label}: glyph {i} is blank")))?;
            glyphs.push(cellimg.crop(0, first, cell - 1, last)?);
        }
        Ok(Self {
            label,
            cell,
            style,
            glyphs,
        })
    }

    /// Lays out the given glyphs at sheet resolution.
    pub fn compose(&self, indices: &[usize]) -> BinaryImage {
        let gap = match self.style {
            SheetStyle::Joined => 0,
            SheetStyle::Spaced => (GLYPH_GAP * self.cell as f64).round() as usize,
        };
        let parts: Vec<&BinaryImage> = indices.iter().map(|&i| &self.glyphs[i % self.glyphs.len()]).collect();
        let width = parts.iter().map(|g| g.width()).sum::<usize>() + gap * parts.len().saturating_sub(1);
        let mut out = BinaryImage::zeros(width.max(1), self.cell).expect("nonzero");
        let mut x = 0;
        for g in parts {
            blit(&mut out, g, 0, x);
            x += g.width() + gap;
        }
        out
    }
}

/// All glyph sets of a sheet directory.
#[derive(Debug, Clone)]
pub struct GlyphSheets {
    pub sets: Vec<GlyphSet>,
}

impl GlyphSheets {
    /// The sheets shipped with the crate.
    pub fn bundled() -> Self {
        const INDEX: &str = include_str!("../assets/glyphs/sheets.txt");
        let files: [(&str, &[u8]); 3] = [
            ("devnagari.pbm", include_bytes!("../assets/glyphs/devnagari.pbm")),
            ("kannada.pbm", include_bytes!("../assets/glyphs/kannada.pbm")),
            ("english_numeral.pbm", include_bytes!("../assets/glyphs/english_numeral.pbm")),
        ];
        Self::parse(INDEX, |name| {
            files
                .iter()
                .find(|(f, _)| *f == name)
                .map(|(_, b)| b.to_vec())
                .ok_or_else(|| Error::GlyphSheet(format!("missing bundled sheet {name}")))
        })
        .expect("bundled glyph sheets are valid")
    }

    /// Loads `sheets.txt` and the sheets it names from `dir`.
    pub fn load_dir(dir: impl AsRef<Path>) -> Result<Self> {
        let dir = dir.as_ref();
        let index_path = dir.join("sheets.txt");
        let index = fs::read_to_string(&index_path).map_err(|e| Error::io(&index_path, e))?;
        Self::parse(&index, |name| {
            let p = dir.join(name);
            fs::read(&p).map_err(|e| Error::io(&p, e))
        })
    }

    fn parse(index: &str, mut load: impl FnMut(&str) -> Result<Vec<u8>>) -> Result<Self> {
        let mut sets = Vec::new();
        for line in index.lines().map(str::trim).filter(|l| !l.is_empty() && !l.starts_with('#')) {
            let f: Vec<&str> = line.split_whitespace().collect();
            let [label, file, cell, count, style] = f[..] else {
                return Err(Error::GlyphSheet(format!("bad index line {line:?}")));
            };
            let label: ScriptLabel = label.parse()?;
            let num = |s: &str| {
                s.parse::<usize>()
                    .map_err(|_| Error::GlyphSheet(format!("bad number {s:?} in {line:?}")))
            };
            let style = match style {
                "joined" => SheetStyle::Joined,
                "spaced" => SheetStyle::Spaced,
                other => return Err(Error::GlyphSheet(format!("unknown style {other:?}"))),
            };
            let sheet = match pnm::decode(&load(file)?)? {
                Raster::Binary(b) => b,
                Raster::Gray(_) => return Err(Error::GlyphSheet(format!("{file} is not a PBM"))),
            };
            sets.push(GlyphSet::from_sheet(label, &sheet, num(cell)?, num(count)?, style)?);
        }
        if sets.is_empty() {
            return Err(Error::GlyphSheet("index lists no sheets".into()));
        }
        Ok(Self { sets })
    }

    pub fn get(&self, label: &ScriptLabel) -> Option<&GlyphSet> {
        self.sets.iter().find(|s| s.label == *label)
    }

    pub fn labels(&self) -> Vec<ScriptLabel> {
        self.sets.iter().map(|s| s.label.clone()).collect()
    }
}

fn blit(dst: &mut BinaryImage, src: &BinaryImage, row: usize, col: usize) {
    for r in 0..src.height() {
        for c in 0..src.width() {
            if src.get(r, c) && row + r < dst.height() && col + c < dst.width() {
                dst.set(row + r, col + c, true);
            }
        }
    }
}

/// Nearest-neighbour resampling to an exact size.
pub fn resize_nearest(img: &BinaryImage, width: usize, height: usize) -> BinaryImage {
    let (width, height) = (width.max(1), height.max(1));
    BinaryImage::from_fn(width, height, |r, c| {
        let sr = ((r as f64 + 0.5) * img.height() as f64 / height as f64) as usize;
        let sc = ((c as f64 + 0.5) * img.width() as f64 / width as f64) as usize;
        img.get(sr.min(img.height() - 1), sc.min(img.width() - 1))
    })
    .expect("nonzero")
}

/// Cell height in pixels for a point size at 300 dpi.
pub fn cell_pixels(point_size: f64) -> usize {
    (point_size * 300.0 / 72.0 * 0.75).round().max(8.0) as usize
}

/// Renders a bilevel image as a scanned-looking gray image.
pub fn render_gray<R: Rng>(img: &BinaryImage, rng: &mut R) -> GrayImage {
    let paper: u8 = rng.gen_range(200..=250);
    let ink: u8 = rng.gen_range(10..=70);
    let data = img
        .data()
        .iter()
        .map(|&v| {
            let base = if v != 0 { ink } else { paper } as i16;
            (base + rng.gen_range(-8i16..=8)).clamp(0, 255) as u8
        })
        .collect();
    GrayImage::new(img.width(), img.height(), data).expect("same dims")
}

/// Flips each pixel with probability `p`.
pub fn add_noise<R: Rng>(img: &BinaryImage, p: f64, rng: &mut R) -> BinaryImage {
    if p <= 0.0 {
        return img.clone();
    }
    let data = img
        .data()
        .iter()
        .map(|&v| if rng.gen_bool(p.min(1.0)) { 1 - v } else { v })
        .collect();
    BinaryImage::new(img.width(), img.height(), data).expect("labels stay binary")
}

/// Options for word corpora.
#[derive(Debug, Clone, PartialEq)]
pub struct CorpusParams {
    pub per_class: usize,
    pub min_point: f64,
    pub max_point: f64,
    pub max_glyphs: usize,
    /// Pixel flip probability.
    pub noise: f64,
    /// Words are rotated by a uniform angle in `[-skew, skew]` degrees.
    pub skew: f64,
    /// Background margin around each word, in pixels.
    pub margin: usize,
}

impl Default for CorpusParams {
    fn default() -> Self {
        Self {
            per_class: 150,
            min_point: 10.0,
            max_point: 36.0,
            max_glyphs: 6,
            noise: 0.0,
            skew: 0.0,
            margin: 4,
        }
    }
}

#[derive(Debug, Clone)]
pub struct GeneratedWord {
    pub label: ScriptLabel,
    pub glyphs: Vec<usize>,
    pub point_size: f64,
    /// Bilevel rendering (before gray conversion).
    pub binary: BinaryImage,
    pub gray: GrayImage,
}

/// Composes one word of `glyphs` at `point_size`, cropped to ink.
pub fn render_word(set: &GlyphSet, glyphs: &[usize], point_size: f64) -> BinaryImage {
    let base = set.compose(glyphs);
    let scale = cell_pixels(point_size) as f64 / set.cell as f64;
    let w = (base.width() as f64 * scale).round() as usize;
    let h = (base.height() as f64 * scale).round() as usize;
    resize_nearest(&base, w, h)
        .crop_to_ink()
        .expect("glyphs have ink")
}

/// Words for every sheet, `per_class` each. The first word of each class is
/// always a single glyph.
pub fn generate_words<R: Rng>(sheets: &GlyphSheets, params: &CorpusParams, rng: &mut R) -> Vec<GeneratedWord> {
    let mut out = Vec::with_capacity(sheets.sets.len() * params.per_class);
    for set in &sheets.sets {
        for i in 0..params.per_class {
            let n = if i == 0 { 1 } else { rng.gen_range(1..=params.max_glyphs.max(1)) };
            let glyphs: Vec<usize> = (0..n).map(|_| rng.gen_range(0..set.glyphs.len())).collect();
            let point_size = if params.max_point > params.min_point {
                rng.gen_range(params.min_point..=params.max_point)
            } else {
                params.min_point
            };
            let mut binary = render_word(set, &glyphs, point_size).pad(params.margin);
            if params.skew > 0.0 {
                let angle = rng.gen_range(-params.skew..=params.skew);
                let grow = (binary.width().max(binary.height()) as f64 * angle.to_radians().abs().sin())
                    .ceil() as usize
                    + 1;
                binary = rotate(&binary.pad(grow), angle);
            }
            binary = add_noise(&binary, params.noise, rng);
            let gray = render_gray(&binary, rng);
            out.push(GeneratedWord {
                label: set.label.clone(),
                glyphs,
                point_size,
                binary,
                gray,
            });
        }
    }
    out
}

/// Options for multi-line pages.
#[derive(Debug, Clone, PartialEq)]
pub struct PageParams {
    pub width: usize,
    pub lines: usize,
    pub words_per_line: usize,
    pub min_point: f64,
    pub max_point: f64,
    pub max_glyphs: usize,
    /// Blank margin on every side; should cover the rotation sweep.
    pub margin: usize,
}

impl Default for PageParams {
    fn default() -> Self {
        Self {
            width: 1400,
            lines: 4,
            words_per_line: 5,
            min_point: 10.0,
            max_point: 16.0,
            max_glyphs: 4,
            margin: 200,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct WordTruth {
    pub label: ScriptLabel,
    pub col_start: usize,
    pub col_end: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct LineTruth {
    pub band: LineBand,
    pub words: Vec<WordTruth>,
}

#[derive(Debug, Clone)]
pub struct GeneratedPage {
    pub image: BinaryImage,
    pub point_size: f64,
    pub lines: Vec<LineTruth>,
}

/// A page of mixed-script lines with exact ink boxes for lines and words.
pub fn generate_page<R: Rng>(sheets: &GlyphSheets, params: &PageParams, rng: &mut R) -> GeneratedPage {
    let point_size = if params.max_point > params.min_point {
        rng.gen_range(params.min_point..=params.max_point)
    } else {
        params.min_point
    };
    let cell = cell_pixels(point_size);
    let line_pitch = cell + (0.6 * cell as f64).round() as usize;
    let height = 2 * params.margin + params.lines * line_pitch;
    let mut page = BinaryImage::zeros(params.width, height).expect("nonzero");
    let right_limit = params.width.saturating_sub(params.margin);

    let mut lines = Vec::new();
    for li in 0..params.lines {
        let top = params.margin + li * line_pitch;
        let mut x = params.margin;
        let mut words = Vec::new();
        let mut row_span: Option<(usize, usize)> = None;
        for _ in 0..params.words_per_line {
            let set = &sheets.sets[rng.gen_range(0..sheets.sets.len())];
            let n = rng.gen_range(1..=params.max_glyphs.max(1));
            let glyphs: Vec<usize> = (0..n).map(|_| rng.gen_range(0..set.glyphs.len())).collect();
            // keep the cell's vertical placement so words share a baseline
            let base = set.compose(&glyphs);
            let scale = cell as f64 / set.cell as f64;
            let scaled = resize_nearest(&base, (base.width() as f64 * scale).round() as usize, cell);
            let Some((r0, c0, r1, c1)) = scaled.ink_bounds() else { continue };
            let word_w = c1 - c0 + 1;
            if x + word_w > right_limit {
                break;
            }
            let ink = scaled.crop(0, c0, cell - 1, c1).expect("in bounds");
            blit(&mut page, &ink, top, x);
            words.push(WordTruth {
                label: set.label.clone(),
                col_start: x,
                col_end: x + word_w - 1,
            });
            row_span = Some(match row_span {
                None => (top + r0, top + r1),
                Some((a, b)) => (a.min(top + r0), b.max(top + r1)),
            });
            let gap = (0.5 * cell as f64).round() as usize + rng.gen_range(0..=(0.3 * cell as f64) as usize);
            x += word_w + gap;
        }
        if let Some((row_start, row_end)) = row_span {
            lines.push(LineTruth {
                band: LineBand { row_start, row_end },
                words,
            });
        }
    }
    GeneratedPage {
        image: page,
        point_size,
        lines,
    }
}
