//! The end-to-end pipeline as plain library calls: preprocess a page,
//! segment it into words, extract features, classify.

use crate::classifier::{classify_knn, classify_nn, Model, Prediction, ScriptLabel};
use crate::config::PipelineConfig;
use crate::error::Result;
use crate::features::{extract_features, FeatureVector, WordImage};
use crate::image::{BinaryImage, GrayImage};
use crate::imaging::{binarize_otsu, connected_components, remove_small_objects, Connectivity};
use crate::pnm::Raster;
use crate::segmentation::{deskew, segment_page, WordBox};

#[derive(Debug, Clone, PartialEq)]
pub struct PreprocessReport {
    /// Otsu threshold, `None` when the input was already bilevel.
    pub threshold: Option<u8>,
    /// Skew removed from the page, degrees.
    pub angle: f64,
    /// 8-connected components left on the cleaned page.
    pub components: usize,
}

impl PreprocessReport {
    pub fn to_text(&self) -> String {
        format!(
            "threshold={}\nskew_angle={:.1}\ncomponents={}\n",
            self.threshold.map_or_else(|| "none".to_string(), |t| t.to_string()),
            self.angle,
            self.components
        )
    }
}

/// Binarizes, removes speckle and corrects skew.
pub fn preprocess(raster: &Raster, cfg: &PipelineConfig) -> (BinaryImage, PreprocessReport) {
    let (binary, threshold) = match raster {
        Raster::Gray(g) => {
            let (b, t) = binarize_otsu(g);
            (b, Some(t))
        }
        Raster::Binary(b) => (b.clone(), None),
    };
    let clean = remove_small_objects(&binary, cfg.min_area);
    let (page, angle) = if cfg.deskew {
        let d = deskew(&clean, &cfg.deskew_params);
        (d.image, d.angle)
    } else {
        (clean, 0.0)
    };
    let components = connected_components(&page, Connectivity::Eight).len();
    (
        page,
        PreprocessReport {
            threshold,
            angle,
            components,
        },
    )
}

pub fn preprocess_gray(img: &GrayImage, cfg: &PipelineConfig) -> (BinaryImage, PreprocessReport) {
    preprocess(&Raster::Gray(img.clone()), cfg)
}

/// One word cut out of a page; `line` and `word` are 1-based.
#[derive(Debug, Clone)]
pub struct PageWord {
    pub line: usize,
    pub word: usize,
    pub bbox: WordBox,
    pub image: BinaryImage,
}

impl PageWord {
    /// File name used when words are written out.
    pub fn file_name(&self) -> String {
        format!("L{}_W{}.pbm", self.line, self.word)
    }

    pub fn manifest_line(&self) -> String {
        format!(
            "{},{},{},{},{}",
            self.file_name(),
            self.bbox.line.row_start,
            self.bbox.line.row_end,
            self.bbox.col_start,
            self.bbox.col_end
        )
    }
}

/// Lines then words, in reading order.
pub fn segment(page: &BinaryImage, cfg: &PipelineConfig) -> Vec<PageWord> {
    segment_page(page, &cfg.segment)
        .into_iter()
        .enumerate()
        .flat_map(|(li, (_, words))| {
            words.into_iter().enumerate().map(move |(wi, bbox)| PageWord {
                line: li + 1,
                word: wi + 1,
                bbox,
                image: bbox.crop(page),
            })
        })
        .collect()
}

/// Bilevel view of a word image file.
pub fn word_binary(raster: &Raster) -> BinaryImage {
    match raster {
        Raster::Gray(g) => binarize_otsu(g).0,
        Raster::Binary(b) => b.clone(),
    }
}

pub fn word_features(img: &BinaryImage, cfg: &PipelineConfig) -> Result<FeatureVector> {
    Ok(extract_features(&WordImage::new(img)?, &cfg.features))
}

/// Features plus both classifier outputs for one word.
#[derive(Debug, Clone)]
pub struct WordResult {
    pub features: FeatureVector,
    pub nearest: (ScriptLabel, f64),
    pub knn: Prediction,
}

pub fn classify_word(model: &Model, img: &BinaryImage, cfg: &PipelineConfig, k: usize) -> Result<WordResult> {
    let features = word_features(img, cfg)?;
    Ok(WordResult {
        nearest: classify_nn(model, &features),
        knn: classify_knn(model, &features, k)?,
        features,
    })
}
