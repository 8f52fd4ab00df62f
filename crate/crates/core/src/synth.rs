//! Parametric renderer of labeled hand images with exact ground truth.
//!
//! A hand lives in a local frame measured in hand lengths: `u` to the right,
//! `v` toward the fingers, origin at the palm center. The palm is an ellipse
//! of height 0.496 and width 0.44, a wrist stub hangs below it and each
//! extended finger is a capsule rising from the palm top. Pixels are either
//! skin or background (no anti-aliasing), so the rendered mask is exact.

use alloc::vec::Vec;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::geometry::{Ellipse, Point};
use crate::image::{rgb_to_ycbcr_pixel, ycbcr_to_rgb_pixel, ImageRgb};
use crate::learner::Digit;
use crate::mask::BinaryMask;
use crate::skin::{classify_crisp, classify_fuzzy, CrispSkinRange, FuzzySkinSystem};
use crate::{Error, Result};

/// Luma of rendered skin.
pub const SKIN_LUMA: u8 = 150;

const PALM_HALF_WIDTH: f64 = 0.22;
const PALM_HALF_HEIGHT: f64 = 0.248;
const WRIST_HALF_WIDTH: f64 = 0.17;
const WRIST_TOP: f64 = -0.12;
const WRIST_BOTTOM: f64 = -0.40;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "lowercase"))]
pub enum Finger {
    Thumb,
    Index,
    Middle,
    Ring,
    Little,
}

impl Finger {
    pub const ALL: [Finger; 5] = [
        Finger::Thumb,
        Finger::Index,
        Finger::Middle,
        Finger::Ring,
        Finger::Little,
    ];

    pub fn index(self) -> usize {
        self as usize
    }
}

/// One finger in hand units. `angle_deg` tilts it from the `v` axis toward
/// `+u`; the width tapers linearly from `radius` at the base to `tip_radius`.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct FingerSpec {
    pub finger: Finger,
    pub base: (f64, f64),
    pub angle_deg: f64,
    pub length: f64,
    pub radius: f64,
    pub tip_radius: f64,
}

fn spec(
    finger: Finger,
    base: (f64, f64),
    angle_deg: f64,
    length: f64,
    radius: f64,
    tip_radius: f64,
) -> FingerSpec {
    FingerSpec {
        finger,
        base,
        angle_deg,
        length,
        radius,
        tip_radius,
    }
}

fn neutral(f: Finger) -> FingerSpec {
    match f {
        Finger::Thumb => spec(f, (-0.17, -0.02), -55.0, 0.34, 0.038, 0.023),
        Finger::Index => spec(f, (-0.15, 0.15), -6.0, 0.26, 0.039, 0.039),
        Finger::Middle => spec(f, (-0.05, 0.18), -2.0, 0.50, 0.039, 0.039),
        Finger::Ring => spec(f, (0.05, 0.17), 3.0, 0.35, 0.039, 0.039),
        Finger::Little => spec(f, (0.15, 0.12), 8.0, 0.21, 0.035, 0.035),
    }
}

/// Extended fingers of each digit. Digits with three fingers use different
/// finger sets, so their spacing and length patterns differ. Fingers stand
/// nearly upright with clearly different lengths; only the two fingers of
/// digit 2 spread into a V.
pub fn finger_layout(digit: Digit) -> Vec<FingerSpec> {
    use Finger::*;
    let set: &[Finger] = match digit.get() {
        1 => &[Index],
        2 => &[Index, Middle],
        3 => &[Thumb, Index, Middle],
        4 => &[Index, Middle, Ring, Little],
        5 => &[Thumb, Index, Middle, Ring, Little],
        6 => &[Index, Middle, Ring],
        7 => &[Index, Middle, Little],
        8 => &[Index, Ring, Little],
        _ => &[Middle, Ring, Little],
    };
    let mut out: Vec<FingerSpec> = set.iter().map(|&f| neutral(f)).collect();
    for s in &mut out {
        match (digit.get(), s.finger) {
            (1, Index) => {
                s.base.0 = -0.06;
                s.angle_deg = -2.0;
            }
            (2, Index) => {
                s.base.0 = -0.09;
                s.angle_deg = -9.0;
            }
            (2, Middle) => {
                s.base.0 = -0.005;
                s.angle_deg = 1.0;
            }
            _ => {}
        }
    }
    out
}

/// A closed fist: no extended fingers.
pub fn fist_layout() -> Vec<FingerSpec> {
    Vec::new()
}

#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct HandPose {
    pub digit: Digit,
    pub canvas: (usize, usize),
    /// Palm center in pixels.
    pub center: (f64, f64),
    /// Hand length in pixels.
    pub scale: f64,
    /// Image-frame angle of the hand axis; 90 is upright with fingers toward
    /// smaller y.
    pub rotation_deg: f64,
    /// Angular offset per finger, indexed by [`Finger::index`].
    pub jitter_deg: [f64; 5],
    /// Skin `(Cb, Cr)`; luma is [`SKIN_LUMA`].
    pub skin: (u8, u8),
    /// Background `(Y, Cb, Cr)`.
    pub background: (u8, u8, u8),
    /// Per-channel uniform RGB noise amplitude.
    pub noise: u8,
    pub noise_seed: u64,
}

impl HandPose {
    /// Upright, noise-free pose centered in a square canvas.
    pub fn upright(digit: Digit, scale: f64) -> Self {
        let side = libm::ceil(scale * 1.6) as usize + 8;
        let c = side as f64 / 2.0;
        Self {
            digit,
            canvas: (side, side),
            center: (c, c + 0.05 * scale),
            scale,
            rotation_deg: 90.0,
            jitter_deg: [0.0; 5],
            skin: (102, 170),
            background: (70, 150, 110),
            noise: 0,
            noise_seed: 0,
        }
    }

    /// Unit vectors of the local `u` and `v` axes in image coordinates.
    pub fn axes(&self) -> ((f64, f64), (f64, f64)) {
        let r = self.rotation_deg.to_radians();
        let (c, s) = (libm::cos(r), libm::sin(r));
        ((s, -c), (-c, -s))
    }

    pub fn to_image(&self, u: f64, v: f64) -> Point {
        let ((rx, ry), (fx, fy)) = self.axes();
        Point::new(
            self.center.0 + self.scale * (u * rx + v * fx),
            self.center.1 + self.scale * (u * ry + v * fy),
        )
    }

    pub fn to_local(&self, p: Point) -> (f64, f64) {
        let ((rx, ry), (fx, fy)) = self.axes();
        let (dx, dy) = (
            (p.x - self.center.0) / self.scale,
            (p.y - self.center.1) / self.scale,
        );
        (dx * rx + dy * ry, dx * fx + dy * fy)
    }

    /// Hand axis angle in the image, radians in `[0, pi)`.
    pub fn orientation(&self) -> f64 {
        crate::math::wrap(self.rotation_deg.to_radians(), core::f64::consts::PI)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct GroundTruth {
    pub digit: Digit,
    pub mask: BinaryMask,
    pub palm_center: Point,
    /// Palm semi-axes in pixels (across, along the hand).
    pub palm_radii: (f64, f64),
    /// Base and tip of each extended finger in image coordinates.
    pub fingers: Vec<(Finger, Point, Point)>,
    /// Hand axis angle in radians, `[0, pi)`.
    pub orientation: f64,
}

/// Axis segment of a finger with its base and tip radii.
#[derive(Clone, Copy)]
struct Stroke {
    a: (f64, f64),
    b: (f64, f64),
    r0: f64,
    r1: f64,
}

impl Stroke {
    fn new(f: &FingerSpec, jitter: f64) -> Self {
        let (a, b) = segment(f, jitter);
        Self {
            a,
            b,
            r0: f.radius,
            r1: f.tip_radius,
        }
    }

    /// Inside when within the interpolated radius of the nearest axis point.
    fn contains(&self, u: f64, v: f64) -> bool {
        let (dx, dy) = (self.b.0 - self.a.0, self.b.1 - self.a.1);
        let len2 = dx * dx + dy * dy;
        let t = if len2 > 0.0 {
            (((u - self.a.0) * dx + (v - self.a.1) * dy) / len2).clamp(0.0, 1.0)
        } else {
            0.0
        };
        let (px, py) = (self.a.0 + t * dx - u, self.a.1 + t * dy - v);
        let r = self.r0 + t * (self.r1 - self.r0);
        px * px + py * py <= r * r
    }
}

fn segment(f: &FingerSpec, jitter: f64) -> ((f64, f64), (f64, f64)) {
    let a = (f.angle_deg + jitter).to_radians();
    let tip = (
        f.base.0 + f.length * libm::sin(a),
        f.base.1 + f.length * libm::cos(a),
    );
    (f.base, tip)
}

fn in_hand(u: f64, v: f64, fingers: &[Stroke]) -> bool {
    let (pu, pv) = (u / PALM_HALF_WIDTH, v / PALM_HALF_HEIGHT);
    if pu * pu + pv * pv <= 1.0 {
        return true;
    }
    if u.abs() <= WRIST_HALF_WIDTH && (WRIST_BOTTOM..=WRIST_TOP).contains(&v) {
        return true;
    }
    fingers.iter().any(|s| s.contains(u, v))
}

/// Renders `pose` with the digit's finger layout.
pub fn render_hand(pose: &HandPose) -> Result<(ImageRgb, GroundTruth)> {
    render_layout(pose, &finger_layout(pose.digit), None)
}

/// Renders `pose` with an explicit finger layout and an optional solid skin
/// ellipse standing in for a face.
pub fn render_layout(
    pose: &HandPose,
    layout: &[FingerSpec],
    face: Option<&Ellipse>,
) -> Result<(ImageRgb, GroundTruth)> {
    let (w, h) = pose.canvas;
    if w < 3 || h < 3 || !(pose.scale > 0.0) {
        return Err(Error::Parameter {
            name: "pose",
            reason: "canvas must be at least 3x3 and scale positive",
        });
    }
    let fingers: Vec<Stroke> = layout
        .iter()
        .map(|f| Stroke::new(f, pose.jitter_deg[f.finger.index()]))
        .collect();
    let hand = BinaryMask::from_fn(w, h, |x, y| {
        let (u, v) = pose.to_local(Point::from((x, y)));
        in_hand(u, v, &fingers)
    });
    let touches = hand
        .true_pixels()
        .any(|(x, y)| x == 0 || y == 0 || x == w - 1 || y == h - 1);
    if touches || hand.is_empty() {
        return Err(Error::Canvas {
            width: w,
            height: h,
        });
    }
    let mut mask = hand.clone();
    if let Some(e) = face {
        for y in 0..h {
            for x in 0..w {
                if e.contains(Point::from((x, y))) {
                    if hand.get(x, y) {
                        return Err(Error::Parameter {
                            name: "face",
                            reason: "overlaps the hand",
                        });
                    }
                    mask.set(x, y, true);
                }
            }
        }
    }

    let skin = ycbcr_to_rgb_pixel([SKIN_LUMA, pose.skin.0, pose.skin.1]);
    let bg = ycbcr_to_rgb_pixel([pose.background.0, pose.background.1, pose.background.2]);
    let mut rng = ChaCha8Rng::seed_from_u64(pose.noise_seed);
    let amp = pose.noise as i16;
    let mut data = Vec::with_capacity(w * h * 3);
    for (x, y) in (0..h).flat_map(|y| (0..w).map(move |x| (x, y))) {
        let base = if mask.get(x, y) { skin } else { bg };
        for c in base {
            let n = if amp > 0 {
                rng.random_range(-amp..=amp)
            } else {
                0
            };
            data.push((c as i16 + n).clamp(0, 255) as u8);
        }
    }
    let img = ImageRgb::new(w, h, data)?;

    let truth = GroundTruth {
        digit: pose.digit,
        mask: hand,
        palm_center: pose.to_image(0.0, 0.0),
        palm_radii: (PALM_HALF_WIDTH * pose.scale, PALM_HALF_HEIGHT * pose.scale),
        fingers: layout
            .iter()
            .zip(&fingers)
            .map(|(f, s)| {
                (
                    f.finger,
                    pose.to_image(s.a.0, s.a.1),
                    pose.to_image(s.b.0, s.b.1),
                )
            })
            .collect(),
        orientation: pose.orientation(),
    };
    Ok((img, truth))
}

/// Largest RGB noise amplitude; backgrounds keep 8 chroma units from skin.
pub const MAX_NOISE: u8 = 7;

/// Sampling ranges for dataset poses.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(default))]
pub struct PoseRanges {
    pub canvas: (usize, usize),
    pub scale: (f64, f64),
    pub rotation_deg: (f64, f64),
    /// Maximum absolute finger jitter.
    pub jitter_deg: f64,
    pub skin_cb: (u8, u8),
    pub skin_cr: (u8, u8),
    pub noise: (u8, u8),
}

impl Default for PoseRanges {
    fn default() -> Self {
        Self {
            canvas: (200, 200),
            scale: (100.0, 130.0),
            rotation_deg: (60.0, 120.0),
            jitter_deg: 4.0,
            skin_cb: (84, 120),
            skin_cr: (146, 203),
            noise: (0, 6),
        }
    }
}

impl PoseRanges {
    pub fn validate(&self) -> Result<()> {
        let bad = |reason| {
            Err(Error::Parameter {
                name: "pose ranges",
                reason,
            })
        };
        if self.scale.0 <= 0.0 || self.scale.0 > self.scale.1 {
            return bad("scale range must be positive and ordered");
        }
        if self.rotation_deg.0 > self.rotation_deg.1
            || self.noise.0 > self.noise.1
            || self.jitter_deg < 0.0
        {
            return bad("ranges must be ordered");
        }
        if self.noise.1 > MAX_NOISE {
            return bad("noise amplitude above 7 can carry background into the skin box");
        }
        // RGB noise of amplitude a moves Cb and Cr by at most a, plus one
        // unit of rounding
        let crisp = CrispSkinRange::default();
        let margin = self.noise.1 + 1;
        if self.skin_cb.0 > self.skin_cb.1
            || self.skin_cr.0 > self.skin_cr.1
            || self.skin_cb.0 < crisp.cb_min + margin
            || self.skin_cb.1 > crisp.cb_max - margin
            || self.skin_cr.0 < crisp.cr_min + margin
            || self.skin_cr.1 > crisp.cr_max - margin
        {
            return bad("skin chroma plus noise must stay inside the crisp skin box");
        }
        // the hand spans about 0.7 hand lengths around the palm center
        let reach = 0.7 * self.scale.1;
        if 2.0 * reach + 2.0 > self.canvas.0.min(self.canvas.1) as f64 {
            return bad("canvas too small for the largest scale");
        }
        Ok(())
    }
}

fn uniform(rng: &mut ChaCha8Rng, (lo, hi): (f64, f64)) -> f64 {
    if hi > lo {
        rng.random_range(lo..hi)
    } else {
        lo
    }
}

/// Background `(Y, Cb, Cr)` whose RGB rendering is far from skin both in
/// luma and in chroma.
fn background(rng: &mut ChaCha8Rng) -> (u8, u8, u8) {
    let fuzzy = FuzzySkinSystem::default();
    let crisp = CrispSkinRange::default();
    loop {
        let y = if rng.random_bool(0.5) {
            rng.random_range(40..=105)
        } else {
            rng.random_range(195..=230)
        };
        let (cb, cr) = if rng.random_bool(0.5) {
            (rng.random_range(145..=175), rng.random_range(100..=150))
        } else {
            (rng.random_range(90..=150), rng.random_range(95..=118))
        };
        let back = rgb_to_ycbcr_pixel(ycbcr_to_rgb_pixel([y, cb, cr]));
        let far = (-8i16..=8).step_by(8).all(|d| {
            let b = (back[1] as i16 + d).clamp(0, 255) as u8;
            let r = (back[2] as i16 + d).clamp(0, 255) as u8;
            !classify_fuzzy(b, r, &fuzzy).1 && !classify_crisp(b, r, &crisp)
        });
        if far && (back[0] as i16 - SKIN_LUMA as i16).abs() >= 40 {
            return (y, cb, cr);
        }
    }
}

/// Pose `index` of a dataset: an independent ChaCha8 stream per index, so
/// generation order never changes the result.
pub fn sample_pose(digit: Digit, index: u64, seed: u64, ranges: &PoseRanges) -> Result<HandPose> {
    ranges.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index);
    let scale = uniform(&mut rng, ranges.scale);
    let rotation_deg = uniform(&mut rng, ranges.rotation_deg);
    let mut jitter_deg = [0.0; 5];
    for j in &mut jitter_deg {
        *j = uniform(&mut rng, (-ranges.jitter_deg, ranges.jitter_deg));
    }
    let skin = (
        rng.random_range(ranges.skin_cb.0..=ranges.skin_cb.1),
        rng.random_range(ranges.skin_cr.0..=ranges.skin_cr.1),
    );
    let background = background(&mut rng);
    let noise = rng.random_range(ranges.noise.0..=ranges.noise.1);
    let noise_seed = rng.random();
    let (w, h) = (ranges.canvas.0 as f64, ranges.canvas.1 as f64);
    let mut pose = HandPose {
        digit,
        canvas: ranges.canvas,
        center: (w / 2.0, h / 2.0),
        scale,
        rotation_deg,
        jitter_deg,
        skin,
        background,
        noise,
        noise_seed,
    };
    // place the palm center so the hand box stays inside with a margin
    let (x0, y0, x1, y1) = local_extent(&pose);
    let room_x = (w - 4.0) - (x1 - x0);
    let room_y = (h - 4.0) - (y1 - y0);
    if room_x < 0.0 || room_y < 0.0 {
        return Err(Error::Canvas {
            width: ranges.canvas.0,
            height: ranges.canvas.1,
        });
    }
    let ox = 2.0 + uniform(&mut rng, (0.0, room_x)) - x0;
    let oy = 2.0 + uniform(&mut rng, (0.0, room_y)) - y0;
    pose.center = (pose.center.0 + ox, pose.center.1 + oy);
    Ok(pose)
}

/// Image-space bounding box of the hand outline relative to the palm
/// center `pose.center`, sampled densely from the local geometry.
fn local_extent(pose: &HandPose) -> (f64, f64, f64, f64) {
    let fingers: Vec<Stroke> = finger_layout(pose.digit)
        .iter()
        .map(|f| Stroke::new(f, pose.jitter_deg[f.finger.index()]))
        .collect();
    let (mut x0, mut y0, mut x1, mut y1) = (
        f64::INFINITY,
        f64::INFINITY,
        f64::NEG_INFINITY,
        f64::NEG_INFINITY,
    );
    let steps = 240;
    for i in 0..=steps {
        for j in 0..=steps {
            let u = -0.8 + 1.6 * i as f64 / steps as f64;
            let v = -0.5 + 1.3 * j as f64 / steps as f64;
            if in_hand(u, v, &fingers) {
                let p = pose.to_image(u, v);
                x0 = x0.min(p.x);
                x1 = x1.max(p.x);
                y0 = y0.min(p.y);
                y1 = y1.max(p.y);
            }
        }
    }
    let pad = 2.0;
    (x0 - pad, y0 - pad, x1 + pad, y1 + pad)
}

/// Poses of a full dataset, digit-major: `count_per_digit` poses of digit
/// 1, then digit 2, and so on. Pose `i` uses stream `i`.
pub fn dataset_poses(
    count_per_digit: usize,
    seed: u64,
    ranges: &PoseRanges,
) -> Result<Vec<HandPose>> {
    if count_per_digit == 0 {
        return Err(Error::Parameter {
            name: "count_per_digit",
            reason: "must be at least 1",
        });
    }
    let mut out = Vec::with_capacity(9 * count_per_digit);
    for d in Digit::ALL {
        for k in 0..count_per_digit {
            let index = (d.index() * count_per_digit + k) as u64;
            out.push(sample_pose(d, index, seed, ranges)?);
        }
    }
    Ok(out)
}
