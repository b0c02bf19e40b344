//! Nearest-neighbour and k-nearest-neighbour classification with Euclidean
//! distance on raw (unnormalized) feature vectors.
//!
//! Tie-breaks are fixed so results are reproducible: equal distances favour
//! the lower sample index, and a split vote goes to the label whose voters
//! have the smallest summed distance, then to the smaller label.

use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::features::{FeatureVector, FEATURE_NAMES};

/// Script class of a word.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum ScriptLabel {
    Kannada,
    Telugu,
    Devnagari,
    EnglishNumeral,
    /// Any other class name found in a corpus or model file.
    Other(String),
}

impl ScriptLabel {
    pub fn as_str(&self) -> &str {
        match self {
            ScriptLabel::Kannada => "kannada",
            ScriptLabel::Telugu => "telugu",
            ScriptLabel::Devnagari => "devnagari",
            ScriptLabel::EnglishNumeral => "english_numeral",
            ScriptLabel::Other(s) => s,
        }
    }
}

impl fmt::Display for ScriptLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for ScriptLabel {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        if s.is_empty() || s.contains([',', '\n', '\r', '=']) {
            return Err(Error::Model(format!("invalid label {s:?}")));
        }
        let key: String = s
            .chars()
            .filter(|c| !matches!(c, '_' | '-' | ' '))
            .flat_map(char::to_lowercase)
            .collect();
        Ok(match key.as_str() {
            "kannada" => ScriptLabel::Kannada,
            "telugu" => ScriptLabel::Telugu,
            "devnagari" | "devanagari" => ScriptLabel::Devnagari,
            "englishnumeral" | "englishnumerals" | "digits" => ScriptLabel::EnglishNumeral,
            _ => ScriptLabel::Other(s.to_string()),
        })
    }
}

/// One labeled training vector.
#[derive(Debug, Clone, PartialEq)]
pub struct Sample {
    pub features: FeatureVector,
    pub label: ScriptLabel,
}

pub const MODEL_VERSION: u32 = 1;

/// Labeled training set plus the default neighbour count.
#[derive(Debug, Clone, PartialEq)]
pub struct Model {
    samples: Vec<Sample>,
    k: usize,
}

impl Model {
    /// `k` must be odd, positive and at most the number of samples.
    pub fn new(samples: Vec<Sample>, k: usize) -> Result<Self> {
        if samples.is_empty() {
            return Err(Error::EmptyModel);
        }
        if k == 0 || k % 2 == 0 || k > samples.len() {
            return Err(Error::InvalidK {
                k,
                samples: samples.len(),
            });
        }
        for (i, s) in samples.iter().enumerate() {
            s.features
                .validate()
                .map_err(|e| Error::Model(format!("sample {i}: {e}")))?;
        }
        Ok(Self { samples, k })
    }

    pub fn samples(&self) -> &[Sample] {
        &self.samples
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    /// Distinct labels in label order.
    pub fn labels(&self) -> Vec<ScriptLabel> {
        let mut labels: Vec<_> = self.samples.iter().map(|s| s.label.clone()).collect();
        labels.sort();
        labels.dedup();
        labels
    }

    /// Sample count per label.
    pub fn class_counts(&self) -> BTreeMap<ScriptLabel, usize> {
        let mut counts = BTreeMap::new();
        for s in &self.samples {
            *counts.entry(s.label.clone()).or_insert(0) += 1;
        }
        counts
    }

    /// Serializes to the line-oriented model format.
    pub fn to_text(&self) -> String {
        let mut out = format!(
            "version={MODEL_VERSION}\nk={}\nfeatures={}\nnormalization=none\n",
            self.k,
            FEATURE_NAMES.join(",")
        );
        for s in &self.samples {
            out.push_str(s.label.as_str());
            out.push(',');
            out.push_str(&s.features.to_string());
            out.push('\n');
        }
        out
    }

    /// Parses the model format, rejecting unknown versions and feature lists.
    pub fn from_text(text: &str) -> Result<Self> {
        let mut version = None;
        let mut k = None;
        let mut features = None;
        let mut normalization = None;
        let mut samples = Vec::new();

        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let err = |msg: String| Error::Model(format!("line {}: {msg}", lineno + 1));
            if let Some((key, value)) = line.split_once('=') {
                if !samples.is_empty() {
                    return Err(err("header after samples".into()));
                }
                let value = value.trim();
                match key.trim() {
                    "version" => version = Some(value.to_string()),
                    "k" => k = Some(value.parse::<usize>().map_err(|_| err(format!("bad k {value:?}")))?),
                    "features" => features = Some(value.to_string()),
                    "normalization" => normalization = Some(value.to_string()),
                    other => return Err(err(format!("unknown header key {other:?}"))),
                }
                continue;
            }
            let fields: Vec<&str> = line.split(',').collect();
            if fields.len() != 1 + FeatureVector::LEN {
                return Err(err(format!("expected {} fields, got {}", 1 + FeatureVector::LEN, fields.len())));
            }
            let label: ScriptLabel = fields[0].parse()?;
            let mut v = [0.0; 8];
            for (slot, f) in v.iter_mut().zip(&fields[1..]) {
                *slot = f
                    .trim()
                    .parse()
                    .map_err(|_| err(format!("bad number {f:?}")))?;
            }
            samples.push(Sample {
                features: FeatureVector::from_array(v),
                label,
            });
        }

        match version.as_deref() {
            Some(v) if v == MODEL_VERSION.to_string() => {}
            Some(v) => return Err(Error::Model(format!("unsupported version {v:?}"))),
            None => return Err(Error::Model("missing version header".into())),
        }
        let expected = FEATURE_NAMES.join(",");
        match features.as_deref() {
            Some(f) if f.replace(' ', "") == expected => {}
            Some(f) => {
                return Err(Error::Model(format!(
                    "feature order {f:?} does not match {expected:?}"
                )))
            }
            None => return Err(Error::Model("missing features header".into())),
        }
        match normalization.as_deref() {
            Some("none") => {}
            Some(n) => return Err(Error::Model(format!("unsupported normalization {n:?}"))),
            None => return Err(Error::Model("missing normalization header".into())),
        }
        let k = k.ok_or_else(|| Error::Model("missing k header".into()))?;
        Self::new(samples, k)
    }
}

/// Euclidean distance.
pub fn distance(a: &FeatureVector, b: &FeatureVector) -> f64 {
    a.to_array()
        .iter()
        .zip(b.to_array().iter())
        .map(|(x, y)| (x - y) * (x - y))
        .sum::<f64>()
        .sqrt()
}

/// Label of the single closest sample, and its distance.
pub fn classify_nn(model: &Model, v: &FeatureVector) -> (ScriptLabel, f64) {
    let (idx, d) = nearest(&model.samples, None, v).expect("model is nonempty");
    (model.samples[idx].label.clone(), d)
}

fn nearest(samples: &[Sample], skip: Option<usize>, v: &FeatureVector) -> Option<(usize, f64)> {
    let mut best: Option<(usize, f64)> = None;
    for (i, s) in samples.iter().enumerate() {
        if Some(i) == skip {
            continue;
        }
        let d = distance(&s.features, v);
        // strict comparison keeps the lowest index on ties
        if best.is_none_or(|(_, bd)| d < bd) {
            best = Some((i, d));
        }
    }
    best
}

/// Outcome of a k-NN vote.
#[derive(Debug, Clone, PartialEq)]
pub struct Prediction {
    pub label: ScriptLabel,
    /// Votes per label among the neighbours, in label order.
    pub votes: Vec<(ScriptLabel, usize)>,
    /// Neighbour indices, nearest first.
    pub neighbours: Vec<usize>,
    pub k: usize,
}

impl Prediction {
    /// Share of the neighbours that voted for the winning label.
    pub fn confidence(&self) -> f64 {
        let won = self
            .votes
            .iter()
            .find(|(l, _)| *l == self.label)
            .map_or(0, |(_, n)| *n);
        won as f64 / self.k as f64
    }
}

/// Majority label among the `k` nearest samples.
pub fn classify_knn(model: &Model, v: &FeatureVector, k: usize) -> Result<Prediction> {
    if k == 0 || k > model.len() {
        return Err(Error::InvalidK {
            k,
            samples: model.len(),
        });
    }
    Ok(knn(&model.samples, None, v, k))
}

fn knn(samples: &[Sample], skip: Option<usize>, v: &FeatureVector, k: usize) -> Prediction {
    let mut scored: Vec<(f64, usize)> = samples
        .iter()
        .enumerate()
        .filter(|&(i, _)| Some(i) != skip)
        .map(|(i, s)| (distance(&s.features, v), i))
        .collect();
    let by_distance_then_index =
        |a: &(f64, usize), b: &(f64, usize)| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1));
    if k < scored.len() {
        scored.select_nth_unstable_by(k - 1, by_distance_then_index);
        scored.truncate(k);
    }
    scored.sort_unstable_by(by_distance_then_index);

    let mut tally: BTreeMap<&ScriptLabel, (usize, f64)> = BTreeMap::new();
    for &(d, i) in &scored {
        let e = tally.entry(&samples[i].label).or_insert((0, 0.0));
        e.0 += 1;
        e.1 += d;
    }
    // BTreeMap iterates in label order, so a full tie keeps the smaller label
    let mut winner: Option<(&ScriptLabel, usize, f64)> = None;
    for (&label, &(count, sum)) in &tally {
        let better = match winner {
            None => true,
            Some((_, wc, ws)) => count > wc || (count == wc && sum.total_cmp(&ws) == Ordering::Less),
        };
        if better {
            winner = Some((label, count, sum));
        }
    }
    let label = winner.expect("k >= 1").0.clone();
    Prediction {
        label,
        votes: tally.iter().map(|(l, (n, _))| ((*l).clone(), *n)).collect(),
        neighbours: scored.iter().map(|&(_, i)| i).collect(),
        k,
    }
}

/// Accuracy summary and confusion matrix.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Report {
    /// Row/column labels of the confusion matrix, in label order.
    pub labels: Vec<ScriptLabel>,
    /// `confusion[i][j]`: samples of true class i predicted as j.
    pub confusion: Vec<Vec<usize>>,
}

impl Report {
    fn new(mut labels: Vec<ScriptLabel>) -> Self {
        labels.sort();
        labels.dedup();
        let n = labels.len();
        Self {
            labels,
            confusion: vec![vec![0; n]; n],
        }
    }

    fn record(&mut self, truth: &ScriptLabel, predicted: &ScriptLabel) {
        let i = self.labels.binary_search(truth).expect("known label");
        let j = self.labels.binary_search(predicted).expect("known label");
        self.confusion[i][j] += 1;
    }

    pub fn total(&self) -> usize {
        self.confusion.iter().flatten().sum()
    }

    pub fn correct(&self) -> usize {
        (0..self.labels.len()).map(|i| self.confusion[i][i]).sum()
    }

    pub fn overall_accuracy(&self) -> f64 {
        self.correct() as f64 / self.total() as f64
    }

    /// Sample count of each true class.
    pub fn class_totals(&self) -> Vec<usize> {
        self.confusion.iter().map(|row| row.iter().sum()).collect()
    }

    /// Per true class accuracy; `None` for classes absent from the test set.
    pub fn per_class_accuracy(&self) -> Vec<(ScriptLabel, Option<f64>)> {
        self.labels
            .iter()
            .enumerate()
            .map(|(i, l)| {
                let row: usize = self.confusion[i].iter().sum();
                let acc = (row > 0).then(|| self.confusion[i][i] as f64 / row as f64);
                (l.clone(), acc)
            })
            .collect()
    }

    /// Confusion matrix as CSV with a header row of predicted labels.
    pub fn confusion_csv(&self) -> String {
        let mut out = String::from("true\\predicted");
        for l in &self.labels {
            out.push(',');
            out.push_str(l.as_str());
        }
        out.push('\n');
        for (i, l) in self.labels.iter().enumerate() {
            out.push_str(l.as_str());
            for n in &self.confusion[i] {
                out.push_str(&format!(",{n}"));
            }
            out.push('\n');
        }
        out
    }
}

/// Classifies every test vector with k-NN and tallies the results.
pub fn evaluate(model: &Model, test: &[Sample], k: usize) -> Result<Report> {
    if test.is_empty() {
        return Err(Error::EmptyTestSet);
    }
    if k == 0 || k > model.len() {
        return Err(Error::InvalidK {
            k,
            samples: model.len(),
        });
    }
    let mut report = Report::new(
        model
            .labels()
            .into_iter()
            .chain(test.iter().map(|s| s.label.clone()))
            .collect(),
    );
    for s in test {
        let p = knn(&model.samples, None, &s.features, k);
        report.record(&s.label, &p.label);
    }
    Ok(report)
}

/// Nearest-neighbour version of [`evaluate`].
pub fn evaluate_nn(model: &Model, test: &[Sample]) -> Result<Report> {
    if test.is_empty() {
        return Err(Error::EmptyTestSet);
    }
    let mut report = Report::new(
        model
            .labels()
            .into_iter()
            .chain(test.iter().map(|s| s.label.clone()))
            .collect(),
    );
    for s in test {
        let (label, _) = classify_nn(model, &s.features);
        report.record(&s.label, &label);
    }
    Ok(report)
}

/// Classifies each sample against all the others.
pub fn leave_one_out(model: &Model, k: usize) -> Result<Report> {
    if k == 0 || model.len() < k + 1 {
        return Err(Error::InvalidK {
            k,
            samples: model.len(),
        });
    }
    let mut report = Report::new(model.labels());
    for (i, s) in model.samples.iter().enumerate() {
        let p = knn(&model.samples, Some(i), &s.features, k);
        report.record(&s.label, &p.label);
    }
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn fv(x: f64, y: f64) -> FeatureVector {
        FeatureVector::from_array([x, y, 0.0, 0.0, 1.0, 0.5, 0.5, 0.5])
    }

    fn sample(x: f64, y: f64, label: ScriptLabel) -> Sample {
        Sample {
            features: fv(x, y),
            label,
        }
    }

    fn clusters() -> Model {
        use ScriptLabel::*;
        Model::new(
            vec![
                sample(0.1, 0.1, Kannada),
                sample(0.12, 0.1, Kannada),
                sample(0.1, 0.13, Kannada),
                sample(0.9, 0.9, EnglishNumeral),
                sample(0.88, 0.9, EnglishNumeral),
                sample(0.9, 0.91, EnglishNumeral),
            ],
            3,
        )
        .unwrap()
    }

    #[test]
    fn label_parsing() {
        assert_eq!("Devanagari".parse::<ScriptLabel>().unwrap(), ScriptLabel::Devnagari);
        assert_eq!("english_numeral".parse::<ScriptLabel>().unwrap(), ScriptLabel::EnglishNumeral);
        assert_eq!("KANNADA".parse::<ScriptLabel>().unwrap(), ScriptLabel::Kannada);
        assert_eq!("tamil".parse::<ScriptLabel>().unwrap(), ScriptLabel::Other("tamil".into()));
        assert!("a,b".parse::<ScriptLabel>().is_err());
        assert!("".parse::<ScriptLabel>().is_err());
    }

    #[test]
    fn distance_basics() {
        let v = fv(0.3, 0.4);
        assert_eq!(distance(&v, &v), 0.0);
        assert_eq!(distance(&fv(0.0, 0.0), &fv(1.0, 0.0)), 1.0);
        assert!((distance(&fv(0.0, 0.0), &fv(0.3, 0.4)) - 0.5).abs() < 1e-15);
    }

    #[test]
    fn nn_exact_match_and_cluster() {
        let m = clusters();
        let (l, d) = classify_nn(&m, &fv(0.88, 0.9));
        assert_eq!((l, d), (ScriptLabel::EnglishNumeral, 0.0));
        assert_eq!(classify_nn(&m, &fv(0.2, 0.15)).0, ScriptLabel::Kannada);
    }

    #[test]
    fn knn_majority_and_confidence() {
        use ScriptLabel::*;
        let m = Model::new(
            vec![
                sample(0.0, 0.0, Telugu),
                sample(0.1, 0.0, Telugu),
                sample(0.2, 0.0, Kannada),
                sample(0.9, 0.0, Kannada),
                sample(0.95, 0.0, Kannada),
            ],
            3,
        )
        .unwrap();
        let p = classify_knn(&m, &fv(0.05, 0.0), 3).unwrap();
        assert_eq!(p.label, Telugu);
        assert_eq!(p.votes, vec![(Kannada, 1), (Telugu, 2)]);
        assert!((p.confidence() - 2.0 / 3.0).abs() < 1e-15);
        assert!(matches!(classify_knn(&m, &fv(0.0, 0.0), 7), Err(Error::InvalidK { k: 7, .. })));
    }

    #[test]
    fn vote_tie_goes_to_smaller_summed_distance() {
        use ScriptLabel::*;
        // k = 2 forces a 1-1 split
        let m = Model::new(
            vec![sample(0.0, 0.0, Telugu), sample(0.25, 0.0, Kannada), sample(0.75, 0.0, Devnagari)],
            1,
        )
        .unwrap();
        assert_eq!(classify_knn(&m, &fv(0.0625, 0.0), 2).unwrap().label, Telugu);
        assert_eq!(classify_knn(&m, &fv(0.1875, 0.0), 2).unwrap().label, Kannada);
        // exact distance tie between Kannada and Devnagari: label order decides
        let p = classify_knn(&m, &fv(0.5, 0.0), 2).unwrap();
        assert_eq!(p.neighbours, vec![1, 2]);
        assert_eq!(p.label, Kannada);
    }

    #[test]
    fn distance_ties_prefer_lower_index() {
        use ScriptLabel::*;
        let m = Model::new(vec![sample(0.0, 0.0, Telugu), sample(0.2, 0.0, Kannada)], 1).unwrap();
        assert_eq!(classify_nn(&m, &fv(0.1, 0.0)).0, Telugu);
        assert_eq!(classify_knn(&m, &fv(0.1, 0.0), 1).unwrap().label, Telugu);
    }

    #[test]
    fn model_validation() {
        assert!(matches!(Model::new(vec![], 3), Err(Error::EmptyModel)));
        let one = vec![sample(0.1, 0.1, ScriptLabel::Kannada)];
        assert!(matches!(Model::new(one.clone(), 3), Err(Error::InvalidK { .. })));
        assert!(matches!(Model::new(one.clone(), 2), Err(Error::InvalidK { .. })));
        assert!(Model::new(one, 1).is_ok());
    }

    #[test]
    fn model_text_round_trip_is_byte_stable() {
        let m = clusters();
        let text = m.to_text();
        assert!(text.starts_with(
            "version=1\nk=3\nfeatures=opd_0,opd_45,opd_90,opd_135,aar,pr,ecc,ext\nnormalization=none\n"
        ));
        let back = Model::from_text(&text).unwrap();
        assert_eq!(back, m);
        assert_eq!(back.to_text(), text);
    }

    #[test]
    fn model_loader_guards() {
        let text = clusters().to_text();
        let wrong_order = text.replace("opd_0,opd_45", "opd_45,opd_0");
        assert!(Model::from_text(&wrong_order).unwrap_err().to_string().contains("feature order"));
        let wrong_version = text.replace("version=1", "version=2");
        assert!(Model::from_text(&wrong_version).is_err());
        let normalized = text.replace("normalization=none", "normalization=zscore");
        assert!(Model::from_text(&normalized).is_err());
        let short = format!("{text}kannada,0.1,0.2\n");
        assert!(Model::from_text(&short).is_err());
    }

    #[test]
    fn evaluate_memorizes_training_set() {
        let m = clusters();
        let r = evaluate(&m, m.samples(), 1).unwrap();
        assert_eq!(r.overall_accuracy(), 1.0);
        assert_eq!(r.confusion, vec![vec![3, 0], vec![0, 3]]);
        assert_eq!(r.class_totals(), vec![3, 3]);
        assert!(matches!(evaluate(&m, &[], 1), Err(Error::EmptyTestSet)));
        let csv = r.confusion_csv();
        assert_eq!(csv, "true\\predicted,kannada,english_numeral\nkannada,3,0\nenglish_numeral,0,3\n");
    }

    #[test]
    fn loo_twins_and_outlier() {
        use ScriptLabel::*;
        let twins = Model::new(
            vec![
                sample(0.1, 0.1, Kannada),
                sample(0.1, 0.1, Kannada),
                sample(0.8, 0.8, Devnagari),
                sample(0.8, 0.8, Devnagari),
            ],
            1,
        )
        .unwrap();
        let r = leave_one_out(&twins, 1).unwrap();
        assert_eq!(r.overall_accuracy(), 1.0);
        assert_eq!(r.total(), 4);

        let mut samples = clusters().samples().to_vec();
        samples.push(sample(0.11, 0.11, EnglishNumeral));
        let outlier = Model::new(samples, 3).unwrap();
        let r = leave_one_out(&outlier, 3).unwrap();
        assert_eq!(r.total(), 7);
        assert_eq!(r.correct(), 6);
        let numeral_row = r.labels.iter().position(|l| *l == EnglishNumeral).unwrap();
        let kannada_col = r.labels.iter().position(|l| *l == Kannada).unwrap();
        assert_eq!(r.confusion[numeral_row][kannada_col], 1);

        assert!(leave_one_out(&twins, 5).is_err());
    }
}
