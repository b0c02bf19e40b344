//! Skew correction and projection-profile segmentation of pages into text
//! lines and words.

use crate::image::BinaryImage;

/// Inclusive row range of one text line.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct LineBand {
    pub row_start: usize,
    pub row_end: usize,
}

impl LineBand {
    pub fn height(&self) -> usize {
        self.row_end - self.row_start + 1
    }
}

/// Inclusive column range of one word inside a line.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct WordBox {
    pub line: LineBand,
    pub col_start: usize,
    pub col_end: usize,
}

impl WordBox {
    pub fn width(&self) -> usize {
        self.col_end - self.col_start + 1
    }

    /// Crops the word out of its page.
    pub fn crop(&self, page: &BinaryImage) -> BinaryImage {
        page.crop(self.line.row_start, self.col_start, self.line.row_end, self.col_end)
            .expect("word box lies inside its page")
    }
}

/// Thresholds for line and word segmentation.
#[derive(Debug, Clone, PartialEq)]
pub struct SegmentParams {
    /// Rows with projection above this value are text rows.
    pub line_threshold: usize,
    /// Columns with projection at or below this value are gap columns.
    pub word_threshold: usize,
    /// Bands shorter than this are discarded.
    pub min_line_height: usize,
    /// Inter-word gap as a fraction of line height.
    pub gap_ratio: f64,
    /// Lower bound on the inter-word gap, in columns.
    pub gap_floor: usize,
}

impl Default for SegmentParams {
    fn default() -> Self {
        Self {
            line_threshold: 0,
            word_threshold: 0,
            min_line_height: 5,
            gap_ratio: 0.2,
            gap_floor: 2,
        }
    }
}

impl SegmentParams {
    /// Minimum gap width separating two words in a line of this height.
    pub fn gap_min(&self, line_height: usize) -> usize {
        let scaled = (self.gap_ratio * line_height as f64 + 0.5).floor() as usize;
        scaled.max(self.gap_floor)
    }
}

/// Per-row ink counts.
pub fn horizontal_projection(img: &BinaryImage) -> Vec<usize> {
    img.data()
        .chunks_exact(img.width())
        .map(|row| row.iter().filter(|&&v| v != 0).count())
        .collect()
}

/// Per-column ink counts.
pub fn vertical_projection(img: &BinaryImage) -> Vec<usize> {
    column_counts(img, 0, img.height() - 1)
}

fn column_counts(img: &BinaryImage, row_start: usize, row_end: usize) -> Vec<usize> {
    let w = img.width();
    let mut counts = vec![0usize; w];
    for row in img.data()[row_start * w..(row_end + 1) * w].chunks_exact(w) {
        for (acc, &v) in counts.iter_mut().zip(row) {
            *acc += v as usize;
        }
    }
    counts
}

/// Maximal runs of indices whose value exceeds `threshold`, as inclusive ranges.
fn runs_above(values: &[usize], threshold: usize) -> Vec<(usize, usize)> {
    let mut runs = Vec::new();
    let mut start = None;
    for (i, &v) in values.iter().enumerate() {
        match (v > threshold, start) {
            (true, None) => start = Some(i),
            (false, Some(s)) => {
                runs.push((s, i - 1));
                start = None;
            }
            _ => {}
        }
    }
    if let Some(s) = start {
        runs.push((s, values.len() - 1));
    }
    runs
}

/// Splits a page into text lines at the valleys of its horizontal projection.
pub fn segment_lines(page: &BinaryImage, params: &SegmentParams) -> Vec<LineBand> {
    runs_above(&horizontal_projection(page), params.line_threshold)
        .into_iter()
        .filter(|&(s, e)| e - s + 1 >= params.min_line_height)
        .map(|(row_start, row_end)| LineBand { row_start, row_end })
        .collect()
}

/// Splits one line into words at wide valleys of its vertical projection.
pub fn segment_words(page: &BinaryImage, line: LineBand, params: &SegmentParams) -> Vec<WordBox> {
    let proj = column_counts(page, line.row_start, line.row_end);
    let gap_min = params.gap_min(line.height());
    let runs = runs_above(&proj, params.word_threshold);

    let mut words = Vec::new();
    let mut current: Option<(usize, usize)> = None;
    for (s, e) in runs {
        current = match current {
            Some((cs, ce)) if s - ce - 1 < gap_min => Some((cs, e)),
            Some(done) => {
                words.push(done);
                Some((s, e))
            }
            None => Some((s, e)),
        };
    }
    words.extend(current);

    words
        .into_iter()
        .filter_map(|(s, e)| {
            // trim to columns that actually hold ink
            let first = (s..=e).find(|&c| proj[c] > 0)?;
            let last = (s..=e).rev().find(|&c| proj[c] > 0)?;
            Some(WordBox {
                line,
                col_start: first,
                col_end: last,
            })
        })
        .collect()
}

/// Lines and their words, top to bottom and left to right.
pub fn segment_page(page: &BinaryImage, params: &SegmentParams) -> Vec<(LineBand, Vec<WordBox>)> {
    segment_lines(page, params)
        .into_iter()
        .map(|line| (line, segment_words(page, line, params)))
        .collect()
}

/// Rotates the content counter-clockwise (as displayed) by `degrees` about
/// the image centre, keeping the canvas size. Nearest-neighbour sampling, so
/// every output pixel copies an input label; samples outside are background.
pub fn rotate(img: &BinaryImage, degrees: f64) -> BinaryImage {
    let (w, h) = (img.width(), img.height());
    if degrees == 0.0 {
        return img.clone();
    }
    let (sin, cos) = degrees.to_radians().sin_cos();
    let cx = (w as f64 - 1.0) / 2.0;
    let cy = (h as f64 - 1.0) / 2.0;
    let mut data = vec![0u8; w * h];
    for r in 0..h {
        let y = r as f64 - cy;
        for c in 0..w {
            let x = c as f64 - cx;
            // inverse of the forward map (x, y) -> (x cos + y sin, -x sin + y cos)
            let sx = x * cos - y * sin + cx;
            let sy = x * sin + y * cos + cy;
            let (sr, sc) = (sy.round(), sx.round());
            if img.get_or_bg(sr as isize, sc as isize) {
                data[r * w + c] = 1;
            }
        }
    }
    BinaryImage::from_raw_unchecked(w, h, data)
}

/// Skew search parameters.
#[derive(Debug, Clone, PartialEq)]
pub struct DeskewParams {
    /// Search range is `[-max_angle, max_angle]` degrees.
    pub max_angle: f64,
    /// Angular resolution of the search, degrees.
    pub step: f64,
}

impl Default for DeskewParams {
    fn default() -> Self {
        Self {
            max_angle: 15.0,
            step: 0.1,
        }
    }
}

#[derive(Debug, Clone)]
pub struct Deskewed {
    pub image: BinaryImage,
    /// Estimated skew in degrees; the image was rotated by its negation.
    pub angle: f64,
}

/// Estimates page skew in degrees (counter-clockwise positive).
///
/// Every ink pixel is projected onto the rows of the page rotated back by
/// each candidate angle; the angle whose row profile has the largest sum of
/// squares (equivalently, variance) wins. Blank pages give 0.
pub fn estimate_skew(page: &BinaryImage, params: &DeskewParams) -> f64 {
    let cx = (page.width() as f64 - 1.0) / 2.0;
    let cy = (page.height() as f64 - 1.0) / 2.0;
    let mut points = Vec::new();
    for r in 0..page.height() {
        for c in 0..page.width() {
            if page.get(r, c) {
                points.push((c as f64 - cx, r as f64 - cy));
            }
        }
    }
    if points.is_empty() || params.step <= 0.0 {
        return 0.0;
    }

    let radius = (cx * cx + cy * cy).sqrt();
    let nbins = 2 * radius.ceil() as usize + 4;
    // unrotated rows land exactly on bins, whatever the parity of the height
    let offset = radius.ceil() + 1.0 + cy.fract();
    let mut bins = vec![0.0f64; nbins];
    let mut score = |angle: f64| -> f64 {
        let (sin, cos) = angle.to_radians().sin_cos();
        bins.iter_mut().for_each(|b| *b = 0.0);
        for &(x, y) in &points {
            // row coordinate after rotating the page by -angle
            let row = x * sin + y * cos + offset;
            let lo = row.floor();
            let frac = row - lo;
            let i = lo as usize;
            bins[i] += 1.0 - frac;
            bins[i + 1] += frac;
        }
        bins.iter().map(|b| b * b).sum::<f64>()
    };

    let steps = (params.max_angle / params.step).round() as i64;
    let mut best_angle = 0.0;
    let mut best = score(0.0);
    // visit 0, -1, +1, -2, +2, ... so ties resolve toward the smallest |angle|
    for k in 1..=steps {
        for i in [-k, k] {
            let angle = i as f64 * params.step;
            let s = score(angle);
            if s > best {
                best = s;
                best_angle = angle;
            }
        }
    }
    // snap to the step grid so repeated runs print identically
    (best_angle / params.step).round() * params.step
}

/// Estimates skew and rotates the page back by it.
pub fn deskew(page: &BinaryImage, params: &DeskewParams) -> Deskewed {
    let angle = estimate_skew(page, params);
    let image = if angle == 0.0 {
        page.clone()
    } else {
        rotate(page, -angle)
    };
    Deskewed { image, angle }
}
