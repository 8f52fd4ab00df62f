//! Parallel rendering and featurization. Results always come back in input
//! order, whatever the thread count.

use std::path::Path;

use handdigit_core::features::FeatureVector;
use handdigit_core::learner::Digit;
use handdigit_core::pipeline::{extract_features, PipelineConfig, Rejection};
use handdigit_core::synth::{dataset_poses, finger_layout, render_hand, HandPose, PoseRanges};
use handdigit_core::ImageRgb;
use rayon::prelude::*;

use crate::error::Result;
use crate::formats::{layout_json, manifest_json, write_bytes, LayoutEntry, ManifestEntry};

pub const MANIFEST_FILE: &str = "manifest.json";
pub const LAYOUT_FILE: &str = "layout.json";

/// File name of dataset image `index`.
pub fn image_name(index: usize, digit: Digit) -> String {
    format!("img_{index:05}_d{digit}.ppm")
}

pub fn render_all(poses: &[HandPose]) -> Result<Vec<ImageRgb>> {
    poses.par_iter().map(|p| Ok(render_hand(p)?.0)).collect()
}

pub fn featurize_all(
    images: &[ImageRgb],
    cfg: &PipelineConfig,
) -> Vec<std::result::Result<FeatureVector, Rejection>> {
    images
        .par_iter()
        .map(|img| extract_features(img, cfg).0)
        .collect()
}

pub fn layout_table() -> Vec<LayoutEntry> {
    Digit::ALL
        .iter()
        .map(|&digit| LayoutEntry {
            digit,
            fingers: finger_layout(digit),
        })
        .collect()
}

/// Renders `per_digit` images of every digit into `dir` with
/// `manifest.json` and `layout.json`, and returns the manifest.
pub fn write_dataset(
    dir: &Path,
    per_digit: usize,
    seed: u64,
    ranges: &PoseRanges,
) -> Result<Vec<ManifestEntry>> {
    let poses = dataset_poses(per_digit, seed, ranges)?;
    let entries: Vec<ManifestEntry> = poses
        .par_iter()
        .enumerate()
        .map(|(i, pose)| {
            let name = image_name(i, pose.digit);
            let (img, _) = render_hand(pose)?;
            crate::formats::write_image(&dir.join(&name), &img)?;
            Ok(ManifestEntry {
                path: name,
                label: pose.digit,
                pose: *pose,
            })
        })
        .collect::<Result<_>>()?;
    write_bytes(&dir.join(MANIFEST_FILE), &manifest_json(&entries)?)?;
    write_bytes(&dir.join(LAYOUT_FILE), &layout_json(&layout_table())?)?;
    Ok(entries)
}
