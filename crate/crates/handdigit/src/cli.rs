//! Command-line front end. Exit codes: 0 success, 1 usage error, 2
//! processing error.

use std::ffi::OsString;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{ArgGroup, Args, CommandFactory, FromArgMatches, Parser, Subcommand, ValueEnum};
use handdigit_core::handloc::LocalizationMethod;
use handdigit_core::learner::{
    classify, evaluate as evaluate_tree, metrics, split_dataset, train, Dataset, LearnerKind,
    Sample,
};
use handdigit_core::pipeline::{
    detect_edges, featurize_fingers, isolate_fingers_from_mask, locate, recognize, segment,
    Diagnostics, PipelineConfig,
};
use handdigit_core::skin::{CrispSkinRange, FuzzySkinSystem, SkinClassifier};
use handdigit_core::synth::PoseRanges;
use rayon::prelude::*;
use serde::Serialize;

use crate::dataset::{featurize_all, write_dataset};
use crate::error::{AppError, Result};
use crate::formats::{
    confusion_table, features_csv, metrics_json, parse_features_csv, parse_manifest_json,
    parse_tree_json, read_bytes, read_image, read_mask, rows_to_dataset, tree_json, write_bytes,
    write_mask, FeatureRow, MetricsDocument,
};

pub const EXIT_OK: i32 = 0;
pub const EXIT_USAGE: i32 = 1;
pub const EXIT_FAILURE: i32 = 2;

/// Caps the global thread pool when set.
pub const THREADS_ENV: &str = "HANDDIGIT_THREADS";

#[derive(Debug, Parser)]
#[command(
    name = "handdigit",
    version,
    about = "Recognize hand-signed digits 1 to 9 in color images"
)]
struct Cli {
    /// Pipeline configuration (JSON); missing fields take their defaults.
    #[arg(long, global = true, value_name = "FILE")]
    config: Option<PathBuf>,
    /// Skin classifier, overriding the configuration.
    #[arg(long, global = true, value_enum)]
    skin: Option<SkinMode>,
    /// Hand localization method, overriding the configuration.
    #[arg(long, global = true, value_enum)]
    method: Option<Method>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum SkinMode {
    Crisp,
    Fuzzy,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum Method {
    Ellipse,
    Comparison,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum Learner {
    Id3,
    C45,
    C45Beta,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Write the skin mask of an image as PGM.
    SkinMask(InOut),
    /// Write the Canny edge map of an image as PGM.
    Edges(InOut),
    /// Find the hand and write its mask (image frame) as PGM.
    Locate(InOut),
    /// Turn a hand mask upright, remove the palm and write the finger mask.
    Fingers(FingersArgs),
    /// Write feature vectors as CSV.
    Featurize(FeaturizeArgs),
    /// Render a labeled synthetic dataset with a manifest.
    Synth(SynthArgs),
    /// Train a decision tree from a features CSV.
    Train(TrainArgs),
    /// Classify an image or every row of a features CSV.
    Classify(ClassifyArgs),
    /// Print metrics JSON and the confusion table of a tree on labeled data.
    Evaluate(EvaluateArgs),
    /// Run the whole pipeline on one image and print the result as JSON.
    Pipeline(PipelineArgs),
}

#[derive(Debug, Args)]
struct InOut {
    #[arg(long, value_name = "PPM")]
    image: PathBuf,
    #[arg(long, value_name = "PGM")]
    out: PathBuf,
}

#[derive(Debug, Args)]
struct FingersArgs {
    /// Hand mask written by `locate`.
    #[arg(long, value_name = "PGM")]
    hand: PathBuf,
    #[arg(long, value_name = "PGM")]
    out: PathBuf,
}

#[derive(Debug, Args)]
#[command(group(ArgGroup::new("input").required(true).args(["image", "fingers", "manifest"])))]
struct FeaturizeArgs {
    #[arg(long, value_name = "PPM")]
    image: Option<PathBuf>,
    /// Finger mask written by `fingers`; needs --hand-length.
    #[arg(long, value_name = "PGM", requires = "hand_length")]
    fingers: Option<PathBuf>,
    #[arg(long)]
    hand_length: Option<f64>,
    /// Dataset manifest; rows are labeled and rejected images are skipped.
    #[arg(long, value_name = "JSON")]
    manifest: Option<PathBuf>,
    /// Output CSV; standard output when absent.
    #[arg(long, value_name = "CSV")]
    out: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct SynthArgs {
    #[arg(long, default_value_t = 10)]
    per_digit: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Pose ranges (JSON); missing fields take their defaults.
    #[arg(long, value_name = "FILE")]
    ranges: Option<PathBuf>,
    #[arg(long, value_name = "DIR")]
    out: PathBuf,
    /// Also write labeled features to DIR/features.csv.
    #[arg(long)]
    features: bool,
}

#[derive(Debug, Args)]
struct TrainArgs {
    #[arg(long, value_name = "CSV")]
    data: PathBuf,
    #[arg(long, value_enum)]
    learner: Option<Learner>,
    /// Bins per feature for ID3.
    #[arg(long)]
    bins: Option<usize>,
    /// Entropy degree for c45-beta.
    #[arg(long)]
    beta: Option<f64>,
    #[arg(long)]
    prune: bool,
    /// Train on this stratified share of the data only.
    #[arg(long)]
    train_fraction: Option<f64>,
    /// Seed of the stratified split.
    #[arg(long, default_value_t = 7)]
    seed: u64,
    /// Where to write the held-out rows.
    #[arg(long, value_name = "CSV", requires = "train_fraction")]
    test_out: Option<PathBuf>,
    #[arg(long, value_name = "JSON")]
    out: PathBuf,
}

#[derive(Debug, Args)]
#[command(group(ArgGroup::new("input").required(true).args(["image", "features"])))]
struct ClassifyArgs {
    #[arg(long, value_name = "JSON")]
    tree: PathBuf,
    #[arg(long, value_name = "PPM")]
    image: Option<PathBuf>,
    #[arg(long, value_name = "CSV")]
    features: Option<PathBuf>,
}

#[derive(Debug, Args)]
#[command(group(ArgGroup::new("input").required(true).args(["data", "manifest"])))]
struct EvaluateArgs {
    #[arg(long, value_name = "JSON")]
    tree: PathBuf,
    /// Labeled features CSV.
    #[arg(long, value_name = "CSV")]
    data: Option<PathBuf>,
    /// Dataset manifest; images are featurized first.
    #[arg(long, value_name = "JSON")]
    manifest: Option<PathBuf>,
    /// Also write the metrics JSON here.
    #[arg(long, value_name = "JSON")]
    out: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct PipelineArgs {
    #[arg(long, value_name = "JSON")]
    tree: PathBuf,
    #[arg(long, value_name = "PPM")]
    image: PathBuf,
}

fn config_help() -> String {
    let json = serde_json::to_string_pretty(&PipelineConfig::default()).unwrap_or_default();
    format!("Default configuration (--config):\n{json}\n\nEnvironment: {THREADS_ENV} caps the number of worker threads.")
}

/// Parses `args` (program name first) and runs the command.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cmd = Cli::command().after_long_help(config_help());
    let cli = match cmd
        .try_get_matches_from(args)
        .and_then(|m| Cli::from_arg_matches(&m))
    {
        Ok(c) => c,
        Err(e) => {
            let text = e.render().to_string();
            if e.use_stderr() {
                let _ = write!(err, "{text}");
                return EXIT_USAGE;
            }
            let _ = write!(out, "{text}");
            return EXIT_OK;
        }
    };
    if let Err(msg) = init_threads() {
        let _ = writeln!(err, "error: {msg}");
        return EXIT_USAGE;
    }
    match execute(&cli, out, err) {
        Ok(code) => code,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            EXIT_FAILURE
        }
    }
}

fn init_threads() -> std::result::Result<(), String> {
    let Ok(v) = std::env::var(THREADS_ENV) else {
        return Ok(());
    };
    let n: usize = v
        .trim()
        .parse()
        .ok()
        .filter(|&n| n > 0)
        .ok_or_else(|| format!("{THREADS_ENV} must be a positive integer, got {v:?}"))?;
    // the global pool can only be built once per process
    let _ = rayon::ThreadPoolBuilder::new()
        .num_threads(n)
        .build_global();
    Ok(())
}

fn load_config(cli: &Cli) -> Result<PipelineConfig> {
    let mut cfg: PipelineConfig = match &cli.config {
        Some(p) => serde_json::from_slice(&read_bytes(p)?)?,
        None => PipelineConfig::default(),
    };
    match cli.skin {
        Some(SkinMode::Crisp) => cfg.skin = SkinClassifier::Crisp(CrispSkinRange::default()),
        Some(SkinMode::Fuzzy) => cfg.skin = SkinClassifier::Fuzzy(FuzzySkinSystem::default()),
        None => {}
    }
    match cli.method {
        Some(Method::Ellipse) => cfg.localization = LocalizationMethod::Ellipse,
        Some(Method::Comparison) => cfg.localization = LocalizationMethod::Comparison,
        None => {}
    }
    cfg.validate()?;
    Ok(cfg)
}

fn print_json(out: &mut dyn Write, value: &impl Serialize) -> Result<()> {
    let s = serde_json::to_string_pretty(value)?;
    writeln!(out, "{s}").map_err(AppError::io("<stdout>"))
}

fn emit(out: &mut dyn Write, path: Option<&Path>, bytes: &[u8]) -> Result<()> {
    match path {
        Some(p) => write_bytes(p, bytes),
        None => out.write_all(bytes).map_err(AppError::io("<stdout>")),
    }
}

fn read_tree(path: &Path) -> Result<handdigit_core::learner::DecisionTree> {
    parse_tree_json(&read_bytes(path)?)
}

/// Featurizes the images of a manifest; rejected images are reported on
/// `err` and left out.
fn manifest_rows(
    path: &Path,
    cfg: &PipelineConfig,
    err: &mut dyn Write,
) -> Result<Vec<FeatureRow>> {
    let entries = parse_manifest_json(&read_bytes(path)?)?;
    let dir = path.parent().unwrap_or(Path::new("."));
    let images = entries
        .par_iter()
        .map(|e| read_image(&dir.join(&e.path)))
        .collect::<Result<Vec<_>>>()?;
    let mut rows = Vec::with_capacity(entries.len());
    for (e, r) in entries.iter().zip(featurize_all(&images, cfg)) {
        match r {
            Ok(vector) => rows.push(FeatureRow {
                label: Some(e.label),
                vector,
            }),
            Err(rej) => {
                let _ = writeln!(err, "{}: {rej}", e.path);
            }
        }
    }
    Ok(rows)
}

#[derive(Serialize)]
struct LocateSummary<'a> {
    method: LocalizationMethod,
    hands_found: usize,
    face_found: bool,
    hand_area: usize,
    ratios: &'a [f64],
}

#[derive(Serialize)]
struct FingersSummary {
    hand_length: f64,
    theta: f64,
    flipped: bool,
    low_confidence: bool,
}

fn execute(cli: &Cli, out: &mut dyn Write, err: &mut dyn Write) -> Result<i32> {
    match &cli.command {
        Command::SkinMask(a) => {
            let cfg = load_config(cli)?;
            write_mask(&a.out, &segment(&read_image(&a.image)?, &cfg))?;
        }
        Command::Edges(a) => {
            let cfg = load_config(cli)?;
            write_mask(&a.out, &detect_edges(&read_image(&a.image)?, &cfg)?)?;
        }
        Command::Locate(a) => {
            let cfg = load_config(cli)?;
            let img = read_image(&a.image)?;
            let mut diag = Diagnostics::default();
            let found = locate(&img, &cfg, &mut diag).map_err(AppError::Rejected)?;
            let Some(hand) = found.hands.first() else {
                return Err(AppError::Invalid(if found.face.is_some() {
                    "only a face was found".into()
                } else {
                    "no hand found".into()
                }));
            };
            write_mask(&a.out, &hand.to_mask(img.width(), img.height()))?;
            print_json(
                out,
                &LocateSummary {
                    method: found.method,
                    hands_found: found.hands.len(),
                    face_found: found.face.is_some(),
                    hand_area: hand.area(),
                    ratios: &found.ratios,
                },
            )?;
        }
        Command::Fingers(a) => {
            let cfg = load_config(cli)?;
            let stage = isolate_fingers_from_mask(&read_mask(&a.hand)?, &cfg)
                .map_err(AppError::Rejected)?;
            write_mask(&a.out, &stage.fingers)?;
            print_json(
                out,
                &FingersSummary {
                    hand_length: stage.hand_length,
                    theta: stage.upright.theta_measured,
                    flipped: stage.upright.flipped,
                    low_confidence: stage.upright.low_confidence,
                },
            )?;
        }
        Command::Featurize(a) => {
            let cfg = load_config(cli)?;
            let rows = if let Some(p) = &a.manifest {
                manifest_rows(p, &cfg, err)?
            } else if let Some(p) = &a.image {
                let (r, _, _) = handdigit_core::pipeline::extract_features(&read_image(p)?, &cfg);
                vec![FeatureRow {
                    label: None,
                    vector: r.map_err(AppError::Rejected)?,
                }]
            } else {
                let fingers =
                    read_mask(a.fingers.as_deref().expect("clap enforces the input group"))?;
                let hl = a.hand_length.expect("clap enforces --hand-length");
                let (_, vector) =
                    featurize_fingers(&fingers, hl, &cfg).map_err(AppError::Rejected)?;
                vec![FeatureRow {
                    label: None,
                    vector,
                }]
            };
            emit(out, a.out.as_deref(), &features_csv(&rows)?)?;
        }
        Command::Synth(a) => {
            let ranges: PoseRanges = match &a.ranges {
                Some(p) => serde_json::from_slice(&read_bytes(p)?)?,
                None => PoseRanges::default(),
            };
            let entries = write_dataset(&a.out, a.per_digit, a.seed, &ranges)?;
            if a.features {
                let cfg = load_config(cli)?;
                let rows = manifest_rows(&a.out.join(crate::dataset::MANIFEST_FILE), &cfg, err)?;
                write_bytes(&a.out.join("features.csv"), &features_csv(&rows)?)?;
            }
            writeln!(out, "wrote {} images to {}", entries.len(), a.out.display())
                .map_err(AppError::io("<stdout>"))?;
        }
        Command::Train(a) => {
            let cfg = load_config(cli)?;
            let mut lc = cfg.learner;
            if let Some(l) = a.learner {
                lc.kind = match l {
                    Learner::Id3 => LearnerKind::Id3 { bins: 8 },
                    Learner::C45 => LearnerKind::C45,
                    Learner::C45Beta => LearnerKind::C45Beta { beta: 2.0 },
                };
            }
            match (&mut lc.kind, a.bins, a.beta) {
                (LearnerKind::Id3 { bins }, Some(b), None) => *bins = b,
                (LearnerKind::C45Beta { beta }, None, Some(b)) => *beta = b,
                (_, None, None) => {}
                _ => {
                    return Err(AppError::Invalid(
                        "--bins applies to id3 and --beta to c45-beta".into(),
                    ))
                }
            }
            lc.prune |= a.prune;
            let data = rows_to_dataset(&parse_features_csv(&read_bytes(&a.data)?)?)?;
            let train_set = match a.train_fraction {
                Some(f) => {
                    let (tr, te) = split_dataset(&data, f, a.seed)?;
                    if let Some(p) = &a.test_out {
                        write_bytes(p, &features_csv(&rows_of(&te))?)?;
                    }
                    tr
                }
                None => data,
            };
            let tree = train(&train_set, &lc)?;
            write_bytes(&a.out, &tree_json(&tree)?)?;
            writeln!(
                out,
                "trained on {} samples, {} leaves",
                train_set.len(),
                tree.root.leaf_count()
            )
            .map_err(AppError::io("<stdout>"))?;
        }
        Command::Classify(a) => {
            let tree = read_tree(&a.tree)?;
            if let Some(p) = &a.image {
                let cfg = load_config(cli)?;
                let r = recognize(&read_image(p)?, &cfg, &tree);
                match r.digit() {
                    Some(d) => writeln!(out, "{d}").map_err(AppError::io("<stdout>"))?,
                    None => {
                        if let handdigit_core::pipeline::Outcome::Rejected(rej) = r.outcome {
                            return Err(AppError::Rejected(rej));
                        }
                    }
                }
            } else {
                let rows = parse_features_csv(&read_bytes(
                    a.features
                        .as_deref()
                        .expect("clap enforces the input group"),
                )?)?;
                for r in rows {
                    writeln!(out, "{}", classify(&tree, &r.vector))
                        .map_err(AppError::io("<stdout>"))?;
                }
            }
        }
        Command::Evaluate(a) => {
            let tree = read_tree(&a.tree)?;
            let rows = match (&a.data, &a.manifest) {
                (Some(p), _) => parse_features_csv(&read_bytes(p)?)?,
                (None, Some(p)) => manifest_rows(p, &load_config(cli)?, err)?,
                (None, None) => unreachable!("clap enforces the input group"),
            };
            let confusion = evaluate_tree(&tree, &rows_to_dataset(&rows)?)?;
            let doc = MetricsDocument {
                learner: handdigit_core::learner::LearnerConfig {
                    kind: tree.learner,
                    prune: false,
                },
                confusion,
                report: metrics(&confusion)?,
            };
            let json = metrics_json(&doc)?;
            if let Some(p) = &a.out {
                write_bytes(p, &json)?;
            }
            out.write_all(&json)
                .and_then(|_| writeln!(out))
                .map_err(AppError::io("<stdout>"))?;
            write!(out, "{}", confusion_table(&confusion)).map_err(AppError::io("<stdout>"))?;
        }
        Command::Pipeline(a) => {
            let cfg = load_config(cli)?;
            let tree = read_tree(&a.tree)?;
            let r = recognize(&read_image(&a.image)?, &cfg, &tree);
            print_json(out, &r)?;
            if r.digit().is_none() {
                return Ok(EXIT_FAILURE);
            }
        }
    }
    Ok(EXIT_OK)
}

fn rows_of(d: &Dataset) -> Vec<FeatureRow> {
    d.samples.iter().map(|&s: &Sample| s.into()).collect()
}
