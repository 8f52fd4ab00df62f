//! Column projection of finger pixels, peak detection and the 17-slot
//! feature vector.

use alloc::vec::Vec;

use crate::mask::BinaryMask;
use crate::{Error, Result};

/// Number of slots in a [`FeatureVector`].
pub const FEATURE_COUNT: usize = 17;

/// Slot names in vector order.
pub const FEATURE_NAMES: [&str; FEATURE_COUNT] = [
    "n", "dist_x1", "dist_x2", "dist_x3", "dist_x4", "dist_y1", "dist_y2", "dist_y3", "dist_y4",
    "r_x1", "r_x2", "r_x3", "r_x4", "r_y1", "r_y2", "r_y3", "r_y4",
];

#[derive(Debug, Clone, PartialEq)]
pub struct Histogram {
    pub bins: Vec<f64>,
    pub hand_length: f64,
}

/// Column counts of the finger mask divided by the hand length.
pub fn project_histogram(fingers: &BinaryMask, hand_length: f64) -> Result<Histogram> {
    if !(hand_length > 0.0) {
        return Err(Error::Parameter {
            name: "hand_length",
            reason: "must be positive",
        });
    }
    let mut counts = alloc::vec![0usize; fingers.width()];
    for (x, _) in fingers.true_pixels() {
        counts[x] += 1;
    }
    Ok(Histogram {
        bins: counts.into_iter().map(|c| c as f64 / hand_length).collect(),
        hand_length,
    })
}

/// Centered moving average; the window shrinks at the ends so each output
/// is the mean of the bins that exist.
pub fn smooth(h: &Histogram, window: usize) -> Result<Histogram> {
    if window.is_multiple_of(2) {
        return Err(Error::Parameter {
            name: "smoothing window",
            reason: "must be odd",
        });
    }
    let n = h.bins.len();
    let r = window / 2;
    let bins = (0..n)
        .map(|i| {
            let lo = i.saturating_sub(r);
            let hi = (i + r).min(n - 1);
            h.bins[lo..=hi].iter().sum::<f64>() / (hi - lo + 1) as f64
        })
        .collect();
    Ok(Histogram {
        bins,
        hand_length: h.hand_length,
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct Peak {
    pub x: usize,
    pub y: f64,
}

/// Upper bound on reported peaks (one per finger).
pub const MAX_PEAKS: usize = 5;

/// Strict local maxima; a flat top counts once, at its leftmost bin, when
/// the bins on both sides of the plateau are lower. Bins outside the
/// histogram read as zero.
pub fn local_maxima(bins: &[f64]) -> Vec<Peak> {
    let n = bins.len();
    let mut out = Vec::new();
    let mut i = 0;
    while i < n {
        let mut j = i;
        while j + 1 < n && bins[j + 1] == bins[i] {
            j += 1;
        }
        let left = if i == 0 { 0.0 } else { bins[i - 1] };
        let right = if j + 1 == n { 0.0 } else { bins[j + 1] };
        if bins[i] > left && bins[i] > right {
            out.push(Peak { x: i, y: bins[i] });
        }
        i = j + 1;
    }
    out
}

/// Significant peaks: local maxima at least `min_rel_amplitude` of the
/// highest bin, greedily kept by amplitude while more than `min_separation`
/// bins from every kept peak, at most [`MAX_PEAKS`], sorted by x.
pub fn detect_peaks(
    h: &Histogram,
    min_rel_amplitude: f64,
    min_separation: usize,
) -> Result<Vec<Peak>> {
    if !(min_rel_amplitude > 0.0 && min_rel_amplitude < 1.0) {
        return Err(Error::Parameter {
            name: "min_rel_amplitude",
            reason: "must lie in (0, 1)",
        });
    }
    let max = h.bins.iter().copied().fold(0.0, f64::max);
    if max <= 0.0 {
        return Ok(Vec::new());
    }
    let mut cands: Vec<Peak> = local_maxima(&h.bins)
        .into_iter()
        .filter(|p| p.y >= min_rel_amplitude * max)
        .collect();
    cands.sort_by(|a, b| b.y.total_cmp(&a.y).then(a.x.cmp(&b.x)));
    let mut kept: Vec<Peak> = Vec::new();
    for c in cands {
        if kept.len() == MAX_PEAKS {
            break;
        }
        if kept.iter().all(|k| k.x.abs_diff(c.x) > min_separation) {
            kept.push(c);
        }
    }
    kept.sort_by_key(|p| p.x);
    Ok(kept)
}

/// `(n, dist_x1..4, dist_y1..4, r_x1..4, r_y1..4)`; unused slots are zero.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct FeatureVector {
    pub n: u8,
    pub dist_x: [f64; 4],
    pub dist_y: [f64; 4],
    pub r_x: [f64; 4],
    pub r_y: [f64; 4],
}

impl FeatureVector {
    pub fn to_array(&self) -> [f64; FEATURE_COUNT] {
        let mut a = [0.0; FEATURE_COUNT];
        a[0] = self.n as f64;
        a[1..5].copy_from_slice(&self.dist_x);
        a[5..9].copy_from_slice(&self.dist_y);
        a[9..13].copy_from_slice(&self.r_x);
        a[13..17].copy_from_slice(&self.r_y);
        a
    }

    pub fn from_array(a: &[f64; FEATURE_COUNT]) -> Result<Self> {
        let n = a[0];
        if !(0.0..=MAX_PEAKS as f64).contains(&n) || libm::trunc(n) != n {
            return Err(Error::Decode {
                field: "n",
                reason: "peak count must be an integer in 0..=5",
            });
        }
        if a.iter().any(|v| !v.is_finite() || *v < 0.0) {
            return Err(Error::Decode {
                field: "features",
                reason: "slots must be finite and non-negative",
            });
        }
        let take = |o: usize| [a[o], a[o + 1], a[o + 2], a[o + 3]];
        Ok(Self {
            n: n as u8,
            dist_x: take(1),
            dist_y: take(5),
            r_x: take(9),
            r_y: take(13),
        })
    }

    pub fn get(&self, slot: usize) -> f64 {
        self.to_array()[slot]
    }
}

fn ratios(d: &[f64; 4]) -> [f64; 4] {
    let mut r = [0.0; 4];
    for i in 0..3 {
        if d[i] != 0.0 && d[i + 1] != 0.0 {
            r[i] = d[i] / d[i + 1];
        }
    }
    r
}

/// Builds the vector from at most five peaks sorted by x.
pub fn feature_vector(peaks: &[Peak]) -> Result<FeatureVector> {
    if peaks.len() > MAX_PEAKS {
        return Err(Error::Parameter {
            name: "peaks",
            reason: "at most 5 peaks",
        });
    }
    let mut v = FeatureVector {
        n: peaks.len() as u8,
        ..Default::default()
    };
    for (i, w) in peaks.windows(2).enumerate() {
        v.dist_x[i] = w[0].x.abs_diff(w[1].x) as f64;
        v.dist_y[i] = (w[0].y - w[1].y).abs();
    }
    v.r_x = ratios(&v.dist_x);
    v.r_y = ratios(&v.dist_y);
    Ok(v)
}

/// Peak-detection settings.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(default))]
pub struct PeakParams {
    /// Smallest odd moving-average width in bins.
    pub smoothing_window: usize,
    /// Moving-average width as a fraction of the hand length; the wider of
    /// the two windows is used, rounded up to odd.
    pub smoothing_frac: f64,
    pub min_rel_amplitude: f64,
    /// Minimum peak separation as a fraction of the histogram width.
    pub min_separation_frac: f64,
}

impl Default for PeakParams {
    fn default() -> Self {
        Self {
            smoothing_window: 5,
            smoothing_frac: 0.04,
            min_rel_amplitude: 0.1,
            min_separation_frac: 0.08,
        }
    }
}

impl PeakParams {
    pub fn min_separation(&self, width: usize) -> usize {
        libm::round(self.min_separation_frac * width as f64) as usize
    }

    pub fn window(&self, hand_length: f64) -> usize {
        let w =
            (libm::round(self.smoothing_frac * hand_length) as usize).max(self.smoothing_window);
        w | 1
    }
}

/// Histogram, smoothing, peaks and vector in one call.
pub fn extract(
    fingers: &BinaryMask,
    hand_length: f64,
    params: &PeakParams,
) -> Result<(Vec<Peak>, FeatureVector)> {
    let h = smooth(
        &project_histogram(fingers, hand_length)?,
        params.window(hand_length),
    )?;
    let peaks = detect_peaks(
        &h,
        params.min_rel_amplitude,
        params.min_separation(h.bins.len()),
    )?;
    let v = feature_vector(&peaks)?;
    Ok((peaks, v))
}
