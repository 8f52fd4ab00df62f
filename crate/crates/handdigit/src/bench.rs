//! The synthetic benchmark: render a seeded dataset, extract features, split
//! 70/30 and train each learner on the same split.

use handdigit_core::learner::{
    evaluate, metrics, split_dataset, train, ConfusionMatrix, Dataset, DecisionTree, Digit,
    LearnerConfig, LearnerKind, MetricsReport, Sample,
};
use handdigit_core::pipeline::PipelineConfig;
use handdigit_core::synth::{dataset_poses, PoseRanges};

use crate::dataset::{featurize_all, render_all};
use crate::error::Result;
use crate::formats::{features_csv, metrics_json, tree_json, FeatureRow, MetricsDocument};

#[derive(Debug, Clone)]
pub struct BenchmarkConfig {
    pub per_digit: usize,
    pub seed: u64,
    pub ranges: PoseRanges,
    pub train_fraction: f64,
    pub split_seed: u64,
    pub pipeline: PipelineConfig,
    pub learners: Vec<LearnerConfig>,
}

impl Default for BenchmarkConfig {
    fn default() -> Self {
        let learner = |kind| LearnerConfig { kind, prune: false };
        Self {
            per_digit: 220,
            seed: 2024,
            ranges: PoseRanges::default(),
            train_fraction: 0.7,
            split_seed: 7,
            pipeline: PipelineConfig::default(),
            learners: vec![
                learner(LearnerKind::Id3 { bins: 8 }),
                learner(LearnerKind::C45),
                learner(LearnerKind::C45Beta { beta: 2.0 }),
            ],
        }
    }
}

#[derive(Debug, Clone)]
pub struct LearnerRun {
    pub config: LearnerConfig,
    pub tree: DecisionTree,
    pub confusion: ConfusionMatrix,
    pub report: MetricsReport,
    pub tree_json: Vec<u8>,
    pub metrics_json: Vec<u8>,
}

#[derive(Debug, Clone)]
pub struct BenchmarkRun {
    /// Labeled features of every image that passed the pipeline.
    pub features_csv: Vec<u8>,
    pub images: usize,
    pub rejected: usize,
    /// Detected peak count per accepted image, with its digit.
    pub peak_counts: Vec<(Digit, u8)>,
    pub learners: Vec<LearnerRun>,
}

pub fn run_benchmark(cfg: &BenchmarkConfig) -> Result<BenchmarkRun> {
    let poses = dataset_poses(cfg.per_digit, cfg.seed, &cfg.ranges)?;
    let images = render_all(&poses)?;
    let results = featurize_all(&images, &cfg.pipeline);
    let mut samples = Vec::with_capacity(poses.len());
    let mut rejected = 0;
    for (pose, r) in poses.iter().zip(results) {
        match r {
            Ok(vector) => samples.push(Sample {
                vector,
                label: pose.digit,
            }),
            Err(_) => rejected += 1,
        }
    }
    let rows: Vec<FeatureRow> = samples.iter().map(|&s| s.into()).collect();
    let peak_counts = samples.iter().map(|s| (s.label, s.vector.n)).collect();
    let data = Dataset::new(samples);
    let (train_set, test_set) = split_dataset(&data, cfg.train_fraction, cfg.split_seed)?;
    let learners = cfg
        .learners
        .iter()
        .map(|lc| {
            let tree = train(&train_set, lc)?;
            let confusion = evaluate(&tree, &test_set)?;
            let report = metrics(&confusion)?;
            let doc = MetricsDocument {
                learner: *lc,
                confusion,
                report: report.clone(),
            };
            Ok(LearnerRun {
                config: *lc,
                tree_json: tree_json(&tree)?,
                metrics_json: metrics_json(&doc)?,
                tree,
                confusion,
                report,
            })
        })
        .collect::<Result<_>>()?;
    Ok(BenchmarkRun {
        features_csv: features_csv(&rows)?,
        images: poses.len(),
        rejected,
        peak_counts,
        learners,
    })
}
