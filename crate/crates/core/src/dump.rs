//! Feature dump: one line per word, `path,label,f1,...,f8`.
//!
//! The label field is empty for unlabeled words. Lines starting with `#`
//! are comments.

use crate::classifier::{Sample, ScriptLabel};
use crate::error::{Error, Result};
use crate::features::{FeatureVector, FEATURE_NAMES};

#[derive(Debug, Clone, PartialEq)]
pub struct DumpRecord {
    pub path: String,
    pub label: Option<ScriptLabel>,
    pub features: FeatureVector,
}

impl DumpRecord {
    pub fn to_line(&self) -> Result<String> {
        if self.path.contains([',', '\n', '\r']) {
            return Err(Error::Model(format!("path {:?} cannot be written to a dump", self.path)));
        }
        Ok(format!(
            "{},{},{}",
            self.path,
            self.label.as_ref().map_or("", |l| l.as_str()),
            self.features
        ))
    }

    pub fn to_sample(&self) -> Option<Sample> {
        self.label.clone().map(|label| Sample {
            features: self.features,
            label,
        })
    }
}

/// Header comment naming the columns.
pub fn header() -> String {
    format!("# path,label,{}", FEATURE_NAMES.join(","))
}

pub fn parse_line(line: &str) -> Result<DumpRecord> {
    let fields: Vec<&str> = line.split(',').collect();
    let (path, label, nums) = match fields.len() {
        10 => (fields[0], fields[1].trim(), &fields[2..]),
        9 => (fields[0], "", &fields[1..]),
        n => return Err(Error::Model(format!("dump line has {n} fields, expected 9 or 10"))),
    };
    let mut v = [0.0; 8];
    for (slot, f) in v.iter_mut().zip(nums) {
        *slot = f
            .trim()
            .parse()
            .map_err(|_| Error::Model(format!("bad number {f:?} in dump")))?;
    }
    Ok(DumpRecord {
        path: path.to_string(),
        label: if label.is_empty() { None } else { Some(label.parse()?) },
        features: FeatureVector::from_array(v),
    })
}

/// Parses a whole dump, reporting the 1-based line number on failure.
pub fn parse(text: &str) -> Result<Vec<DumpRecord>> {
    text.lines()
        .enumerate()
        .filter(|(_, l)| !l.trim().is_empty() && !l.starts_with('#'))
        .map(|(i, l)| {
            parse_line(l).map_err(|e| Error::Model(format!("dump line {}: {e}", i + 1)))
        })
        .collect()
}

pub fn to_text(records: &[DumpRecord]) -> Result<String> {
    let mut out = header();
    out.push('\n');
    for r in records {
        out.push_str(&r.to_line()?);
        out.push('\n');
    }
    Ok(out)
}
