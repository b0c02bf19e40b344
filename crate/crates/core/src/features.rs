//! The eight word-level features.
//!
//! Four on-pixel densities come from opening by reconstruction with a line
//! element in each direction followed by hole filling. The other four are
//! averaged component descriptors (aspect ratio, eccentricity, extent) and
//! the filled-ink ratio. All features are computed on the tight ink crop of
//! the word.

use std::fmt;

use crate::error::{Error, Result};
use crate::image::BinaryImage;
use crate::imaging::{
    component_eccentricity, component_extent, connected_components, ComponentStats, Connectivity,
};
use crate::morphology::{fill_holes, line_se, opening_by_reconstruction, Direction};

/// Canonical feature names, in serialization order.
pub const FEATURE_NAMES: [&str; 8] = ["opd_0", "opd_45", "opd_90", "opd_135", "aar", "pr", "ecc", "ext"];

/// Feature vector in canonical order.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FeatureVector {
    pub opd_0: f64,
    pub opd_45: f64,
    pub opd_90: f64,
    pub opd_135: f64,
    pub aar: f64,
    pub pr: f64,
    pub ecc: f64,
    pub ext: f64,
}

impl FeatureVector {
    pub const LEN: usize = 8;

    pub fn from_array(v: [f64; 8]) -> Self {
        Self {
            opd_0: v[0],
            opd_45: v[1],
            opd_90: v[2],
            opd_135: v[3],
            aar: v[4],
            pr: v[5],
            ecc: v[6],
            ext: v[7],
        }
    }

    pub fn to_array(&self) -> [f64; 8] {
        [
            self.opd_0,
            self.opd_45,
            self.opd_90,
            self.opd_135,
            self.aar,
            self.pr,
            self.ecc,
            self.ext,
        ]
    }

    pub fn opd(&self, direction: Direction) -> f64 {
        match direction {
            Direction::Horizontal => self.opd_0,
            Direction::RightDiagonal => self.opd_45,
            Direction::Vertical => self.opd_90,
            Direction::LeftDiagonal => self.opd_135,
        }
    }

    /// Checks the range invariants; returns the name of the first violated one.
    pub fn validate(&self) -> std::result::Result<(), String> {
        let v = self.to_array();
        if let Some(i) = v.iter().position(|x| !x.is_finite()) {
            return Err(format!("{} is not finite", FEATURE_NAMES[i]));
        }
        for (i, &x) in v.iter().enumerate() {
            let ok = match i {
                0..=3 | 5 | 6 => (0.0..=1.0).contains(&x),
                4 => x > 0.0,
                _ => x > 0.0 && x <= 1.0,
            };
            if !ok {
                return Err(format!("{} = {x} out of range", FEATURE_NAMES[i]));
            }
        }
        Ok(())
    }
}

impl fmt::Display for FeatureVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let v = self.to_array();
        for (i, x) in v.iter().enumerate() {
            if i > 0 {
                f.write_str(",")?;
            }
            f.write_str(&format_decimal(*x))?;
        }
        Ok(())
    }
}

/// Plain decimal text with at least six significant digits that parses back
/// to exactly `x`.
pub fn format_decimal(x: f64) -> String {
    if x == 0.0 || !x.is_finite() {
        return if x == 0.0 { "0.000000".to_string() } else { x.to_string() };
    }
    let magnitude = x.abs().log10().floor() as i32;
    for sig in 6..=17 {
        let decimals = (sig - 1 - magnitude).max(0) as usize;
        let s = format!("{x:.decimals$}");
        if s.parse::<f64>().ok() == Some(x) {
            return s;
        }
    }
    // shortest round-trip fallback; not reached for finite values
    x.to_string()
}

/// Knobs for feature extraction.
#[derive(Debug, Clone, PartialEq)]
pub struct FeatureParams {
    /// Line length as a fraction of the mean component height.
    pub se_ratio: f64,
    /// Shortest allowed line length (odd).
    pub se_min_length: usize,
}

impl Default for FeatureParams {
    fn default() -> Self {
        Self {
            se_ratio: 0.7,
            se_min_length: 3,
        }
    }
}

/// A word cropped tight to its ink, with its 8-connected components.
#[derive(Debug, Clone)]
pub struct WordImage {
    img: BinaryImage,
    components: Vec<ComponentStats>,
}

impl WordImage {
    /// Crops `img` to its ink and labels it. Fails on a blank image.
    pub fn new(img: &BinaryImage) -> Result<Self> {
        let img = img.crop_to_ink().ok_or(Error::EmptyWord)?;
        let components = connected_components(&img, Connectivity::Eight).into_stats();
        Ok(Self { img, components })
    }

    pub fn image(&self) -> &BinaryImage {
        &self.img
    }

    pub fn components(&self) -> &[ComponentStats] {
        &self.components
    }

    /// Width times height of the crop.
    pub fn size(&self) -> usize {
        self.img.len()
    }

    fn mean_over_components(&self, f: impl Fn(&ComponentStats) -> f64) -> f64 {
        self.components.iter().map(f).sum::<f64>() / self.components.len() as f64
    }
}

/// Line length for the directional openings: 70% (by default) of the mean
/// component height, rounded half up, at least `se_min_length`, bumped to odd.
pub fn se_length_for(word: &WordImage, params: &FeatureParams) -> usize {
    let mean_height = word.mean_over_components(|c| c.bbox_height() as f64);
    let mut len = (params.se_ratio * mean_height + 0.5).floor() as usize;
    len = len.max(params.se_min_length.max(1));
    if len % 2 == 0 {
        len += 1;
    }
    len
}

/// On-pixel density in one direction, with the word's own line length.
pub fn opd(word: &WordImage, direction: Direction, params: &FeatureParams) -> f64 {
    opd_with_length(word, direction, se_length_for(word, params))
}

/// On-pixel density in one direction with an explicit odd line length.
pub fn opd_with_length(word: &WordImage, direction: Direction, length: usize) -> f64 {
    let se = line_se(direction, length).expect("line length must be odd");
    let g = fill_holes(&opening_by_reconstruction(&word.img, &se));
    g.count_ones() as f64 / word.size() as f64
}

/// Mean of bounding-box height over width across components.
pub fn aar(word: &WordImage) -> f64 {
    word.mean_over_components(ComponentStats::aspect_ratio)
}

/// Ink share of the hole-filled word.
pub fn pixel_ratio(word: &WordImage) -> f64 {
    fill_holes(&word.img).count_ones() as f64 / word.size() as f64
}

pub fn avg_eccentricity(word: &WordImage) -> f64 {
    word.mean_over_components(component_eccentricity)
}

pub fn avg_extent(word: &WordImage) -> f64 {
    word.mean_over_components(component_extent)
}

/// All eight features in canonical order.
pub fn extract_features(word: &WordImage, params: &FeatureParams) -> FeatureVector {
    let len = se_length_for(word, params);
    let [opd_0, opd_45, opd_90, opd_135] = Direction::ALL.map(|d| opd_with_length(word, d, len));
    FeatureVector {
        opd_0,
        opd_45,
        opd_90,
        opd_135,
        aar: aar(word),
        pr: pixel_ratio(word),
        ecc: avg_eccentricity(word),
        ext: avg_extent(word),
    }
}

/// Convenience wrapper: crop, label and extract in one step.
pub fn features_of(img: &BinaryImage, params: &FeatureParams) -> Result<FeatureVector> {
    Ok(extract_features(&WordImage::new(img)?, params))
}
