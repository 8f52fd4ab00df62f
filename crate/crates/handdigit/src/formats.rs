//! On-disk formats: PPM/PGM images, the features CSV, tree/metrics/manifest
//! JSON and a plain-text confusion table.

use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use handdigit_core::features::{FeatureVector, FEATURE_COUNT, FEATURE_NAMES};
use handdigit_core::image::{encode_pgm, encode_ppm, load_gray, load_image};
use handdigit_core::learner::{
    ConfusionMatrix, Dataset, DecisionTree, Digit, LearnerConfig, MetricsReport, Sample,
};
use handdigit_core::synth::{FingerSpec, HandPose};
use handdigit_core::{BinaryMask, ImageRgb};
use serde::{Deserialize, Serialize};

use crate::error::{AppError, Result};

pub fn read_bytes(path: &Path) -> Result<Vec<u8>> {
    fs::read(path).map_err(AppError::io(path))
}

/// Writes `bytes`, creating missing parent directories.
pub fn write_bytes(path: &Path, bytes: &[u8]) -> Result<()> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        fs::create_dir_all(dir).map_err(AppError::io(dir))?;
    }
    fs::write(path, bytes).map_err(AppError::io(path))
}

pub fn read_image(path: &Path) -> Result<ImageRgb> {
    load_image(&read_bytes(path)?).map_err(|source| AppError::Decode {
        path: path.into(),
        source,
    })
}

pub fn write_image(path: &Path, img: &ImageRgb) -> Result<()> {
    write_bytes(path, &encode_ppm(img))
}

/// Reads a PGM mask; any nonzero pixel is set.
pub fn read_mask(path: &Path) -> Result<BinaryMask> {
    let gray = load_gray(&read_bytes(path)?).map_err(|source| AppError::Decode {
        path: path.into(),
        source,
    })?;
    Ok(BinaryMask::from_gray(&gray))
}

pub fn write_mask(path: &Path, mask: &BinaryMask) -> Result<()> {
    write_bytes(path, &encode_pgm(&mask.to_gray()))
}

/// One CSV row. Unlabeled rows come from images of unknown digit.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FeatureRow {
    pub label: Option<Digit>,
    pub vector: FeatureVector,
}

impl From<Sample> for FeatureRow {
    fn from(s: Sample) -> Self {
        Self {
            label: Some(s.label),
            vector: s.vector,
        }
    }
}

/// Header `label,n,dist_x1,...,r_y4`; the label column is present when every
/// row has a label. Numbers use the shortest text that parses back to the
/// same `f64`.
pub fn features_csv(rows: &[FeatureRow]) -> Result<Vec<u8>> {
    let labeled = !rows.is_empty() && rows.iter().all(|r| r.label.is_some());
    let mut w = csv::Writer::from_writer(Vec::new());
    let mut header: Vec<&str> = Vec::with_capacity(FEATURE_COUNT + 1);
    if labeled {
        header.push("label");
    }
    header.extend(FEATURE_NAMES);
    w.write_record(&header)?;
    for r in rows {
        let mut rec: Vec<String> = Vec::with_capacity(FEATURE_COUNT + 1);
        if labeled {
            rec.extend(r.label.map(|d| d.to_string()));
        }
        rec.extend(r.vector.to_array().iter().map(|v| v.to_string()));
        w.write_record(&rec)?;
    }
    w.into_inner()
        .map_err(|e| AppError::Invalid(format!("csv: {}", e.error())))
}

pub fn parse_features_csv(bytes: &[u8]) -> Result<Vec<FeatureRow>> {
    let mut r = csv::Reader::from_reader(bytes);
    let header = r.headers()?.clone();
    let names: Vec<&str> = header.iter().collect();
    let labeled = names.first() == Some(&"label");
    if names[labeled as usize..] != FEATURE_NAMES {
        return Err(AppError::Invalid(format!(
            "features csv header must be [label,]{}",
            FEATURE_NAMES.join(",")
        )));
    }
    let mut rows = Vec::new();
    for (i, rec) in r.records().enumerate() {
        let rec = rec?;
        let line = i + 2;
        let bad = |what: &str| AppError::Invalid(format!("features csv line {line}: {what}"));
        let label = if labeled {
            let d: u8 = rec[0]
                .trim()
                .parse()
                .map_err(|_| bad("label is not a digit"))?;
            Some(Digit::new(d).map_err(|_| bad("label must be 1 to 9"))?)
        } else {
            None
        };
        let mut a = [0.0; FEATURE_COUNT];
        for (slot, field) in a.iter_mut().zip(rec.iter().skip(labeled as usize)) {
            *slot = field
                .trim()
                .parse()
                .map_err(|_| bad("value is not a number"))?;
        }
        let vector = FeatureVector::from_array(&a).map_err(|e| bad(&e.to_string()))?;
        rows.push(FeatureRow { label, vector });
    }
    Ok(rows)
}

/// Labeled rows as a training or test set.
pub fn rows_to_dataset(rows: &[FeatureRow]) -> Result<Dataset> {
    rows.iter()
        .map(|r| {
            r.label
                .map(|label| Sample {
                    vector: r.vector,
                    label,
                })
                .ok_or_else(|| AppError::Invalid("features csv has no label column".into()))
        })
        .collect::<Result<Vec<_>>>()
        .map(Dataset::new)
}

pub fn tree_json(tree: &DecisionTree) -> Result<Vec<u8>> {
    Ok(serde_json::to_vec_pretty(tree)?)
}

pub fn parse_tree_json(bytes: &[u8]) -> Result<DecisionTree> {
    Ok(serde_json::from_slice(bytes)?)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MetricsDocument {
    pub learner: LearnerConfig,
    pub confusion: ConfusionMatrix,
    #[serde(flatten)]
    pub report: MetricsReport,
}

pub fn metrics_json(doc: &MetricsDocument) -> Result<Vec<u8>> {
    Ok(serde_json::to_vec_pretty(doc)?)
}

/// Rows are true digits, columns assigned digits.
pub fn confusion_table(m: &ConfusionMatrix) -> String {
    let width = m
        .counts
        .iter()
        .flatten()
        .max()
        .map_or(1, |v| v.to_string().len())
        .max(3);
    let mut s = format!("{:>5} |", "true");
    for d in 1..=9 {
        let _ = write!(s, " {d:>width$}");
    }
    s.push('\n');
    s.push_str(&"-".repeat(7 + 9 * (width + 1)));
    s.push('\n');
    for (i, row) in m.counts.iter().enumerate() {
        let _ = write!(s, "{:>5} |", i + 1);
        for v in row {
            let _ = write!(s, " {v:>width$}");
        }
        s.push('\n');
    }
    s
}

/// A generated image. The pose fields sit next to `path` and `label`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ManifestEntry {
    pub path: String,
    pub label: Digit,
    #[serde(flatten)]
    pub pose: HandPose,
}

pub fn manifest_json(entries: &[ManifestEntry]) -> Result<Vec<u8>> {
    Ok(serde_json::to_vec_pretty(entries)?)
}

pub fn parse_manifest_json(bytes: &[u8]) -> Result<Vec<ManifestEntry>> {
    Ok(serde_json::from_slice(bytes)?)
}

/// Finger table of every digit, written next to the manifest.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LayoutEntry {
    pub digit: Digit,
    pub fingers: Vec<FingerSpec>,
}

pub fn layout_json(entries: &[LayoutEntry]) -> Result<Vec<u8>> {
    Ok(serde_json::to_vec_pretty(entries)?)
}
