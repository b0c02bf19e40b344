//! Pipeline configuration with `key = value` text files.

use std::path::Path;

use crate::error::{Error, Result};
use crate::features::FeatureParams;
use crate::segmentation::{DeskewParams, SegmentParams};

/// Every tunable threshold of the pipeline.
#[derive(Debug, Clone, PartialEq)]
pub struct PipelineConfig {
    /// Components below this area are treated as speckle.
    pub min_area: usize,
    pub deskew: bool,
    pub deskew_params: DeskewParams,
    pub segment: SegmentParams,
    pub features: FeatureParams,
    /// Neighbour count for k-NN.
    pub k: usize,
}

impl Default for PipelineConfig {
    fn default() -> Self {
        Self {
            min_area: 15,
            deskew: true,
            deskew_params: DeskewParams::default(),
            segment: SegmentParams::default(),
            features: FeatureParams::default(),
            k: 3,
        }
    }
}

impl PipelineConfig {
    pub fn from_file(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        let mut cfg = Self::default();
        cfg.apply_text(&text)?;
        Ok(cfg)
    }

    /// Applies `key = value` lines on top of the current values.
    pub fn apply_text(&mut self, text: &str) -> Result<()> {
        for (i, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) = line
                .split_once('=')
                .ok_or_else(|| Error::Config(format!("line {}: expected key = value", i + 1)))?;
            self.set(key.trim(), value.trim())
                .map_err(|e| Error::Config(format!("line {}: {e}", i + 1)))?;
        }
        self.validate()
    }

    /// Sets one parameter by name.
    pub fn set(&mut self, key: &str, value: &str) -> Result<()> {
        fn parse<T: std::str::FromStr>(key: &str, value: &str) -> Result<T> {
            value
                .parse()
                .map_err(|_| Error::Config(format!("{key}: cannot parse {value:?}")))
        }
        match key {
            "min_area" => self.min_area = parse(key, value)?,
            "deskew" => self.deskew = parse(key, value)?,
            "deskew_max_angle" => self.deskew_params.max_angle = parse(key, value)?,
            "deskew_step" => self.deskew_params.step = parse(key, value)?,
            "line_threshold" => self.segment.line_threshold = parse(key, value)?,
            "word_threshold" => self.segment.word_threshold = parse(key, value)?,
            "min_line_height" => self.segment.min_line_height = parse(key, value)?,
            "gap_ratio" => self.segment.gap_ratio = parse(key, value)?,
            "gap_floor" => self.segment.gap_floor = parse(key, value)?,
            "se_ratio" => self.features.se_ratio = parse(key, value)?,
            "se_min_length" => self.features.se_min_length = parse(key, value)?,
            "k" => self.k = parse(key, value)?,
            other => return Err(Error::Config(format!("unknown key {other:?}"))),
        }
        Ok(())
    }

    /// Range checks; called after every load.
    pub fn validate(&self) -> Result<()> {
        let fail = |msg: &str| Err(Error::Config(msg.to_string()));
        if self.min_area == 0 {
            return fail("min_area must be >= 1");
        }
        let d = &self.deskew_params;
        if !(d.max_angle > 0.0 && d.max_angle <= 45.0) {
            return fail("deskew_max_angle must be in (0, 45]");
        }
        if !(d.step > 0.0 && d.step <= d.max_angle) {
            return fail("deskew_step must be in (0, deskew_max_angle]");
        }
        if self.segment.min_line_height == 0 {
            return fail("min_line_height must be >= 1");
        }
        if !(self.segment.gap_ratio >= 0.0 && self.segment.gap_ratio <= 5.0) {
            return fail("gap_ratio must be in [0, 5]");
        }
        if self.segment.gap_floor == 0 {
            return fail("gap_floor must be >= 1");
        }
        if !(self.features.se_ratio > 0.0 && self.features.se_ratio <= 2.0) {
            return fail("se_ratio must be in (0, 2]");
        }
        if self.features.se_min_length == 0 || self.features.se_min_length % 2 == 0 {
            return fail("se_min_length must be odd and >= 1");
        }
        if self.k == 0 || self.k % 2 == 0 {
            return fail("k must be odd and >= 1");
        }
        Ok(())
    }

    /// Renders every parameter as a config file body.
    pub fn to_text(&self) -> String {
        let d = &self.deskew_params;
        let s = &self.segment;
        format!(
            "min_area = {}\ndeskew = {}\ndeskew_max_angle = {}\ndeskew_step = {}\n\
             line_threshold = {}\nword_threshold = {}\nmin_line_height = {}\n\
             gap_ratio = {}\ngap_floor = {}\nse_ratio = {}\nse_min_length = {}\nk = {}\n",
            self.min_area,
            self.deskew,
            d.max_angle,
            d.step,
            s.line_threshold,
            s.word_threshold,
            s.min_line_height,
            s.gap_ratio,
            s.gap_floor,
            self.features.se_ratio,
            self.features.se_min_length,
            self.k
        )
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults_are_valid_and_round_trip() {
        let cfg = PipelineConfig::default();
        cfg.validate().unwrap();
        let mut back = PipelineConfig {
            k: 7,
            ..Default::default()
        };
        back.apply_text(&cfg.to_text()).unwrap();
        assert_eq!(back, cfg);
    }

    #[test]
    fn overrides_and_comments() {
        let mut cfg = PipelineConfig::default();
        cfg.apply_text("# tuned\nk = 5\nmin_area=20 # bigger dots\n\ngap_ratio = 0.3\n")
            .unwrap();
        assert_eq!((cfg.k, cfg.min_area, cfg.segment.gap_ratio), (5, 20, 0.3));
    }

    #[test]
    fn rejects_bad_values() {
        for bad in ["k = 4", "k = 0", "min_area = 0", "deskew_step = 0", "se_min_length = 2", "nope = 1", "k"] {
            let mut cfg = PipelineConfig::default();
            assert!(cfg.apply_text(bad).is_err(), "{bad}");
        }
    }
}
