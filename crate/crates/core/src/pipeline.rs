//! End-to-end recognition: image in, digit (or a rejection naming the
//! failing stage) out, with per-stage diagnostics.

use alloc::string::{String, ToString};
use alloc::vec::Vec;
use core::fmt;

use crate::edge::{canny_relative, to_gray, EdgeMap};
use crate::features::{extract, FeatureVector, Peak, PeakParams};
use crate::fingers::{hand_bounds, locate_palm, palm_dims, strip_to_fingers, PalmWindow};
use crate::geometry::{connected_components, Region};
use crate::handloc::{
    adjust_hand, locate_comparison_method, locate_ellipse_method, EllipseMethodParams,
    LocalizationMethod, LocalizationOutcome, MorphFactors, RotatedHand,
};
use crate::image::{lowpass, rgb_to_ycbcr, ImageRgb};
use crate::learner::{classify, DecisionTree, Digit, LearnerConfig};
use crate::mask::BinaryMask;
use crate::skin::{skin_mask, SkinClassifier};
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(default))]
pub struct CannyParams {
    pub sigma: f64,
    /// Hysteresis thresholds as fractions of the largest gradient magnitude.
    pub low: f64,
    pub high: f64,
}

impl Default for CannyParams {
    fn default() -> Self {
        Self {
            sigma: 1.4,
            low: 0.1,
            high: 0.3,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(default))]
pub struct PipelineConfig {
    /// Box-filter radius applied before color conversion; 0 disables it.
    pub lowpass_radius: usize,
    pub skin: SkinClassifier,
    pub canny: CannyParams,
    pub localization: LocalizationMethod,
    pub ellipse: EllipseMethodParams,
    pub morphology: MorphFactors,
    pub peaks: PeakParams,
    pub learner: LearnerConfig,
    pub seed: u64,
}

impl Default for PipelineConfig {
    fn default() -> Self {
        Self {
            lowpass_radius: 1,
            skin: SkinClassifier::default(),
            canny: CannyParams::default(),
            localization: LocalizationMethod::Ellipse,
            ellipse: EllipseMethodParams::default(),
            morphology: MorphFactors::default(),
            peaks: PeakParams::default(),
            learner: LearnerConfig::default(),
            seed: 0,
        }
    }
}

impl PipelineConfig {
    pub fn validate(&self) -> Result<()> {
        match &self.skin {
            SkinClassifier::Crisp(r) => r.validate()?,
            SkinClassifier::Fuzzy(s) => s.validate()?,
        }
        let c = &self.canny;
        if !(c.sigma > 0.0 && c.low > 0.0 && c.low < c.high && c.high <= 1.0) {
            return Err(Error::Parameter {
                name: "canny",
                reason: "need sigma > 0 and 0 < low < high <= 1",
            });
        }
        if !(self.ellipse.face_ratio_threshold > 0.0 && self.ellipse.face_ratio_threshold < 1.0) {
            return Err(Error::Parameter {
                name: "face_ratio_threshold",
                reason: "must lie in (0, 1)",
            });
        }
        if !(self.morphology.diamond > 0.0 && self.morphology.disk > 0.0) {
            return Err(Error::Parameter {
                name: "morphology",
                reason: "factors must be positive",
            });
        }
        let p = &self.peaks;
        if p.smoothing_window.is_multiple_of(2)
            || !(p.smoothing_frac >= 0.0 && p.smoothing_frac < 1.0)
            || !(p.min_rel_amplitude > 0.0 && p.min_rel_amplitude < 1.0)
            || p.min_separation_frac < 0.0
        {
            return Err(Error::Parameter {
                name: "peaks",
                reason: "window must be odd, fractions in [0, 1), amplitude in (0, 1)",
            });
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "kebab-case"))]
pub enum Stage {
    Skin,
    Edges,
    Localization,
    Orientation,
    HandBounds,
    Palm,
    Features,
}

impl fmt::Display for Stage {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Stage::Skin => "skin",
            Stage::Edges => "edges",
            Stage::Localization => "localization",
            Stage::Orientation => "orientation",
            Stage::HandBounds => "hand-bounds",
            Stage::Palm => "palm",
            Stage::Features => "features",
        };
        f.write_str(s)
    }
}

/// A stage failure.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct Rejection {
    pub stage: Stage,
    pub reason: String,
}

impl fmt::Display for Rejection {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "rejected at {}: {}", self.stage, self.reason)
    }
}

fn reject<T>(stage: Stage, e: impl ToString) -> core::result::Result<T, Rejection> {
    Err(Rejection {
        stage,
        reason: e.to_string(),
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct Flags {
    /// A second hand was found and ignored.
    pub second_hand: bool,
    /// Both ellipse halves held the same skin count; fingers assumed up.
    pub finger_side_tie: bool,
    /// Thumb correction left too little to fit; the raw hand was used.
    pub orientation_uncorrected: bool,
}

#[derive(Debug, Clone, PartialEq, Default)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct Diagnostics {
    pub region_count: usize,
    pub method: Option<LocalizationMethod>,
    pub face_found: bool,
    pub hands_found: usize,
    /// Outline ratios of the examined regions (ellipse method).
    pub ratios: Vec<f64>,
    /// Measured hand axis angle, radians.
    pub theta: Option<f64>,
    pub flipped: bool,
    pub hand_length: Option<f64>,
    pub palm: Option<PalmWindow>,
    pub peaks: Vec<Peak>,
    pub features: Option<FeatureVector>,
}

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "lowercase"))]
pub enum Outcome {
    Digit(Digit),
    Rejected(Rejection),
}

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct RecognitionResult {
    pub outcome: Outcome,
    pub diagnostics: Diagnostics,
    pub flags: Flags,
}

impl RecognitionResult {
    pub fn digit(&self) -> Option<Digit> {
        match self.outcome {
            Outcome::Digit(d) => Some(d),
            Outcome::Rejected(_) => None,
        }
    }
}

fn smoothed(img: &ImageRgb, cfg: &PipelineConfig) -> ImageRgb {
    if cfg.lowpass_radius > 0 {
        lowpass(img, cfg.lowpass_radius)
    } else {
        img.clone()
    }
}

/// Low-pass, YCbCr conversion and skin classification.
pub fn segment(img: &ImageRgb, cfg: &PipelineConfig) -> BinaryMask {
    skin_mask(&rgb_to_ycbcr(&smoothed(img, cfg)), &cfg.skin)
}

/// Canny edges of the low-passed luminance.
pub fn detect_edges(img: &ImageRgb, cfg: &PipelineConfig) -> Result<EdgeMap> {
    let c = &cfg.canny;
    canny_relative(&to_gray(&smoothed(img, cfg)), c.sigma, c.low, c.high)
}

/// Runs the configured localization method. `edges` is required by the
/// ellipse method.
pub fn localize(
    mask: &BinaryMask,
    edges: Option<&EdgeMap>,
    cfg: &PipelineConfig,
) -> Result<LocalizationOutcome> {
    match cfg.localization {
        LocalizationMethod::Ellipse => {
            let edges = edges.ok_or(Error::Empty("edge map"))?;
            locate_ellipse_method(mask, edges, &cfg.ellipse)
        }
        LocalizationMethod::Comparison => Ok(locate_comparison_method(&connected_components(mask))),
    }
}

/// Margin around a hand crop; keeps the hand off the crop border.
const CROP_MARGIN: usize = 2;

/// Hand processing from the largest region of a hand mask: orientation,
/// vertical adjustment, palm removal.
#[derive(Debug, Clone, PartialEq)]
pub struct FingerStage {
    pub upright: RotatedHand,
    pub hand_length: f64,
    pub palm: PalmWindow,
    pub fingers: BinaryMask,
}

pub fn isolate_fingers(
    hand: &Region,
    cfg: &PipelineConfig,
) -> core::result::Result<FingerStage, Rejection> {
    let (local, _) = hand.to_local_mask(CROP_MARGIN);
    let mut upright = match adjust_hand(&local, &cfg.morphology) {
        Ok(u) => u,
        Err(e) => return reject(Stage::Orientation, e),
    };
    let bounds = match hand_bounds(&upright.mask) {
        Ok(b) => b,
        Err(e) => return reject(Stage::HandBounds, e),
    };
    let dims = match palm_dims(bounds.hand_length) {
        Ok(d) => d,
        Err(e) => return reject(Stage::Palm, e),
    };
    // a narrow hand can be thinner than the palm window: widen the canvas
    let (ww, wh) = (libm::round(dims.1) as usize, libm::round(dims.0) as usize);
    let (w, h) = (upright.mask.width(), upright.mask.height());
    if ww > w || wh > h {
        let (nw, nh) = (w.max(ww), h.max(wh));
        upright.mask =
            upright
                .mask
                .translated(nw, nh, ((nw - w) / 2) as i64, ((nh - h) / 2) as i64);
    }
    let palm = match locate_palm(&upright.mask, dims) {
        Ok(p) => p,
        Err(e) => return reject(Stage::Palm, e),
    };
    let fingers = strip_to_fingers(&upright.mask, &palm);
    Ok(FingerStage {
        upright,
        hand_length: bounds.hand_length,
        palm,
        fingers,
    })
}

/// Finger stage applied to the largest region of a stored hand mask.
pub fn isolate_fingers_from_mask(
    hand_mask: &BinaryMask,
    cfg: &PipelineConfig,
) -> core::result::Result<FingerStage, Rejection> {
    match connected_components(hand_mask).into_iter().next() {
        Some(r) => isolate_fingers(&r, cfg),
        None => reject(Stage::Localization, "hand mask is empty"),
    }
}

/// Peaks and feature vector of a finger mask.
pub fn featurize_fingers(
    fingers: &BinaryMask,
    hand_length: f64,
    cfg: &PipelineConfig,
) -> core::result::Result<(Vec<Peak>, FeatureVector), Rejection> {
    extract(fingers, hand_length, &cfg.peaks).or_else(|e| reject(Stage::Features, e))
}

/// Picks the hand to process: the largest one, flagging any other.
fn chosen_hand(out: &LocalizationOutcome) -> core::result::Result<(&Region, bool), Rejection> {
    match out.hands.first() {
        Some(h) => Ok((h, out.hands.len() > 1)),
        None if out.face.is_some() => reject(Stage::Localization, "only a face was found"),
        None => reject(Stage::Localization, "no skin region"),
    }
}

/// Skin mask, edges and localization; returns the outcome with the
/// diagnostics filled so far.
pub fn locate(
    img: &ImageRgb,
    cfg: &PipelineConfig,
    diag: &mut Diagnostics,
) -> core::result::Result<LocalizationOutcome, Rejection> {
    let mask = segment(img, cfg);
    let edges = match cfg.localization {
        LocalizationMethod::Ellipse => match detect_edges(img, cfg) {
            Ok(e) => Some(e),
            Err(e) => return reject(Stage::Edges, e),
        },
        LocalizationMethod::Comparison => None,
    };
    let out = match localize(&mask, edges.as_ref(), cfg) {
        Ok(o) => o,
        Err(e) => return reject(Stage::Localization, e),
    };
    diag.region_count = out.hands.len() + out.face.is_some() as usize;
    diag.method = Some(out.method);
    diag.face_found = out.face.is_some();
    diag.hands_found = out.hands.len();
    diag.ratios = out.ratios.clone();
    Ok(out)
}

fn run(
    img: &ImageRgb,
    cfg: &PipelineConfig,
    diag: &mut Diagnostics,
    flags: &mut Flags,
) -> core::result::Result<FeatureVector, Rejection> {
    if let Err(e) = cfg.validate() {
        return reject(Stage::Skin, e);
    }
    let out = locate(img, cfg, diag)?;
    let (hand, second) = chosen_hand(&out)?;
    flags.second_hand = second;
    let stage = isolate_fingers(hand, cfg)?;
    diag.theta = Some(stage.upright.theta_measured);
    diag.flipped = stage.upright.flipped;
    flags.finger_side_tie = stage.upright.low_confidence;
    diag.hand_length = Some(stage.hand_length);
    diag.palm = Some(stage.palm);
    let (peaks, v) = featurize_fingers(&stage.fingers, stage.hand_length, cfg)?;
    diag.peaks = peaks;
    diag.features = Some(v);
    Ok(v)
}

/// Feature extraction without classification.
pub fn extract_features(
    img: &ImageRgb,
    cfg: &PipelineConfig,
) -> (
    core::result::Result<FeatureVector, Rejection>,
    Diagnostics,
    Flags,
) {
    let mut diag = Diagnostics::default();
    let mut flags = Flags::default();
    let r = run(img, cfg, &mut diag, &mut flags);
    (r, diag, flags)
}

/// Full recognition.
pub fn recognize(img: &ImageRgb, cfg: &PipelineConfig, tree: &DecisionTree) -> RecognitionResult {
    let (r, diagnostics, flags) = extract_features(img, cfg);
    let outcome = match r {
        Ok(v) => Outcome::Digit(classify(tree, &v)),
        Err(rej) => Outcome::Rejected(rej),
    };
    RecognitionResult {
        outcome,
        diagnostics,
        flags,
    }
}
