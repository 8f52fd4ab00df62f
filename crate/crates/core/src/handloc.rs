//! Hand versus face discrimination, hand orientation and vertical adjustment.

use alloc::vec::Vec;
use core::f64::consts::{FRAC_PI_2, PI};

use crate::edge::EdgeMap;
use crate::geometry::{
    connected_components, convex_hull, dilate, erode, fit_ellipse, moment_ellipse,
    rasterize_ellipse_perimeter, Ellipse, Point, Region, StructuringElement,
};
use crate::mask::BinaryMask;
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "lowercase"))]
pub enum LocalizationMethod {
    #[default]
    Ellipse,
    Comparison,
}

/// Which pixels count as "white" when walking a fitted ellipse outline.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "lowercase"))]
pub enum WhitePixels {
    /// Pixels of the region in the skin mask.
    #[default]
    Skin,
    /// Pixels of the edge map.
    Edge,
}

#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(default))]
pub struct EllipseMethodParams {
    /// A region whose outline ratio reaches this value is a face.
    pub face_ratio_threshold: f64,
    /// An outline pixel is white when a white pixel lies within this
    /// Chebyshev distance.
    pub tolerance: usize,
    pub white: WhitePixels,
}

impl Default for EllipseMethodParams {
    fn default() -> Self {
        Self {
            face_ratio_threshold: 0.92,
            tolerance: 1,
            white: WhitePixels::Skin,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct LocalizationOutcome {
    /// At most two, largest first.
    pub hands: Vec<Region>,
    pub face: Option<Region>,
    pub method: LocalizationMethod,
    /// Outline ratio of each examined region (ellipse method only), in
    /// component order.
    pub ratios: Vec<f64>,
}

impl LocalizationOutcome {
    fn empty(method: LocalizationMethod) -> Self {
        Self {
            hands: Vec::new(),
            face: None,
            method,
            ratios: Vec::new(),
        }
    }
}

/// Fraction of outline pixels of the ellipse fitted to a region's edge
/// pixels that are white. Solid blobs score near 1; a hand scores lower
/// because its outline crosses the gaps between fingers.
fn outline_ratio(labels: &[u32], label: u32, edges: &EdgeMap, params: &EllipseMethodParams) -> f64 {
    let (w, h) = (edges.width(), edges.height());
    let tol = params.tolerance as i64;
    let near = |x: i64, y: i64, r: i64, hit: &dyn Fn(usize) -> bool| {
        for dy in -r..=r {
            for dx in -r..=r {
                let (nx, ny) = (x + dx, y + dy);
                if nx >= 0
                    && ny >= 0
                    && (nx as usize) < w
                    && (ny as usize) < h
                    && hit(ny as usize * w + nx as usize)
                {
                    return true;
                }
            }
        }
        false
    };
    let in_region = |i: usize| labels[i] == label;
    let points: Vec<Point> = edges
        .true_pixels()
        .filter(|&(x, y)| near(x as i64, y as i64, 1, &in_region))
        .map(Point::from)
        .collect();
    let Ok(ellipse) = fit_ellipse(&points) else {
        return 0.0;
    };
    if !(ellipse.b >= 1.0) {
        return 0.0;
    }
    let outline = rasterize_ellipse_perimeter(&ellipse);
    if outline.is_empty() {
        return 0.0;
    }
    let is_edge = |i: usize| edges.bits()[i];
    let white = outline
        .iter()
        .filter(|&&(x, y)| match params.white {
            WhitePixels::Skin => near(x, y, tol, &in_region),
            WhitePixels::Edge => near(x, y, tol, &is_edge),
        })
        .count();
    white as f64 / outline.len() as f64
}

/// Ellipse-based localization: the three largest skin regions are each
/// summarized by an ellipse fitted to their edge pixels; a high share of
/// white pixels on that outline marks the face.
pub fn locate_ellipse_method(
    mask: &BinaryMask,
    edges: &EdgeMap,
    params: &EllipseMethodParams,
) -> Result<LocalizationOutcome> {
    if !(params.face_ratio_threshold > 0.0 && params.face_ratio_threshold < 1.0) {
        return Err(Error::Parameter {
            name: "face_ratio_threshold",
            reason: "must lie in (0, 1)",
        });
    }
    if edges.width() != mask.width() || edges.height() != mask.height() {
        return Err(Error::Dimensions("edge map and mask differ in size"));
    }
    let mut regions = connected_components(mask);
    regions.truncate(3);
    if regions.is_empty() {
        return Ok(LocalizationOutcome::empty(LocalizationMethod::Ellipse));
    }
    let mut labels = alloc::vec![u32::MAX; mask.width() * mask.height()];
    for (k, r) in regions.iter().enumerate() {
        for &(x, y) in &r.pixels {
            labels[y * mask.width() + x] = k as u32;
        }
    }
    let ratios: Vec<f64> = (0..regions.len())
        .map(|k| outline_ratio(&labels, k as u32, edges, params))
        .collect();
    let face_idx = ratios
        .iter()
        .enumerate()
        .filter(|(_, &r)| r >= params.face_ratio_threshold)
        .fold(None::<(usize, f64)>, |best, (i, &r)| match best {
            Some((_, br)) if br >= r => best,
            _ => Some((i, r)),
        })
        .map(|(i, _)| i);
    let mut face = None;
    let mut hands = Vec::new();
    for (i, r) in regions.into_iter().enumerate() {
        if Some(i) == face_idx {
            face = Some(r);
        } else if hands.len() < 2 {
            hands.push(r);
        }
    }
    Ok(LocalizationOutcome {
        hands,
        face,
        method: LocalizationMethod::Ellipse,
        ratios,
    })
}

/// Comparison-based localization from the (area-sorted) regions.
///
/// Three regions: the highest one (smallest barycenter y) is the face.
/// Two regions: both are hands when the area ratio is below 1.5, otherwise
/// the higher one is the face. One region: it is a hand.
pub fn locate_comparison_method(regions: &[Region]) -> LocalizationOutcome {
    let regions = &regions[..regions.len().min(3)];
    let mut out = LocalizationOutcome::empty(LocalizationMethod::Comparison);
    let highest = || {
        regions.iter().enumerate().fold(0, |best, (i, r)| {
            if r.barycenter.1 < regions[best].barycenter.1 {
                i
            } else {
                best
            }
        })
    };
    let face_idx = match regions.len() {
        0 => return out,
        1 => None,
        2 => {
            let ratio = regions[0].area() as f64 / regions[1].area() as f64;
            if ratio < 1.5 {
                None
            } else {
                Some(highest())
            }
        }
        _ => Some(highest()),
    };
    for (i, r) in regions.iter().enumerate() {
        if Some(i) == face_idx {
            out.face = Some(r.clone());
        } else {
            out.hands.push(r.clone());
        }
    }
    out
}

/// Structuring-element radii for thumb correction, as fractions of the
/// hand extent (see [`hand_extent`]).
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(default))]
pub struct MorphFactors {
    pub diamond: f64,
    pub disk: f64,
}

impl Default for MorphFactors {
    fn default() -> Self {
        Self {
            diamond: 0.05,
            disk: 0.10,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Orientation {
    /// Major-axis angle in `[0, pi)`.
    pub theta: f64,
    pub ellipse: Ellipse,
    /// False when the corrected mask was too small and the raw mask was fitted.
    pub corrected: bool,
}

/// Largest distance between two pixels of the mask plus one pixel. Unlike
/// the bounding-box side it does not grow when the hand is rotated.
pub fn hand_extent(mask: &BinaryMask) -> Result<f64> {
    let pts: Vec<Point> = mask.true_pixels().map(Point::from).collect();
    let hull = convex_hull(&pts)?;
    let mut d2 = 0.0f64;
    for (i, a) in hull.iter().enumerate() {
        for b in &hull[i + 1..] {
            d2 = d2.max((a.x - b.x) * (a.x - b.x) + (a.y - b.y) * (a.y - b.y));
        }
    }
    Ok(libm::sqrt(d2) + 1.0)
}

/// Ellipse fitted to the hand after diamond dilation (closes the gaps
/// between fingers) and disk erosion (removes the thumb and thin fingers).
pub fn hand_orientation(hand: &BinaryMask, factors: &MorphFactors) -> Result<Orientation> {
    if hand.is_empty() {
        return Err(Error::Empty("hand mask"));
    }
    let extent = hand_extent(hand)?;
    let r_d = (libm::round(factors.diamond * extent) as usize).max(1);
    let r_e = (libm::round(factors.disk * extent) as usize).max(1);

    let pad = r_d + 1;
    let padded = hand.translated(
        hand.width() + 2 * pad,
        hand.height() + 2 * pad,
        pad as i64,
        pad as i64,
    );
    let corrected = erode(
        &dilate(&padded, &StructuringElement::diamond(r_d)),
        &StructuringElement::disk(r_e),
    );
    let points: Vec<Point> = corrected
        .true_pixels()
        .map(|(x, y)| Point::new(x as f64 - pad as f64, y as f64 - pad as f64))
        .collect();
    if points.len() >= 5 {
        if let Ok(ellipse) = fit_ellipse(&points) {
            return Ok(Orientation {
                theta: ellipse.theta,
                ellipse,
                corrected: true,
            });
        }
    }
    let raw: Vec<Point> = hand.true_pixels().map(Point::from).collect();
    if raw.len() < 5 {
        return Err(Error::Fit("hand has fewer than 5 pixels"));
    }
    let ellipse = fit_ellipse(&raw)?;
    Ok(Orientation {
        theta: ellipse.theta,
        ellipse,
        corrected: false,
    })
}

/// Rotates the mask by `pi/2 - theta` about its (rounded) barycenter so an
/// axis at angle `theta` becomes vertical. Nearest-neighbor sampling into a
/// canvas that holds the rotated content plus a one-pixel margin.
pub fn rotate_to_vertical(mask: &BinaryMask, theta: f64) -> BinaryMask {
    let pixels: Vec<(usize, usize)> = mask.true_pixels().collect();
    if pixels.is_empty() {
        return mask.clone();
    }
    let n = pixels.len() as f64;
    let cx = libm::round(pixels.iter().map(|p| p.0 as f64).sum::<f64>() / n);
    let cy = libm::round(pixels.iter().map(|p| p.1 as f64).sum::<f64>() / n);
    let phi = FRAC_PI_2 - theta;
    let (mut c, mut s) = (libm::cos(phi), libm::sin(phi));
    if s.abs() < 1e-12 {
        s = 0.0;
        c = c.signum();
    } else if c.abs() < 1e-12 {
        c = 0.0;
        s = s.signum();
    }
    let forward = |x: f64, y: f64| {
        let (dx, dy) = (x - cx, y - cy);
        (cx + c * dx - s * dy, cy + s * dx + c * dy)
    };
    let (mut xmin, mut ymin, mut xmax, mut ymax) = (
        f64::INFINITY,
        f64::INFINITY,
        f64::NEG_INFINITY,
        f64::NEG_INFINITY,
    );
    for &(x, y) in &pixels {
        let (u, v) = forward(x as f64, y as f64);
        xmin = xmin.min(u);
        xmax = xmax.max(u);
        ymin = ymin.min(v);
        ymax = ymax.max(v);
    }
    let ox = libm::floor(xmin + 1e-9) - 1.0;
    let oy = libm::floor(ymin + 1e-9) - 1.0;
    let w = (libm::ceil(xmax - 1e-9) - ox) as usize + 2;
    let h = (libm::ceil(ymax - 1e-9) - oy) as usize + 2;
    BinaryMask::from_fn(w, h, |i, j| {
        let (dx, dy) = (i as f64 + ox - cx, j as f64 + oy - cy);
        let sx = cx + c * dx + s * dy;
        let sy = cy - s * dx + c * dy;
        mask.get_signed(libm::round(sx) as i64, libm::round(sy) as i64)
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "lowercase"))]
pub enum Half {
    Up,
    Down,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct FingerSide {
    pub half: Half,
    /// Set when both halves hold the same number of skin pixels.
    pub low_confidence: bool,
    pub up_count: usize,
    pub down_count: usize,
}

/// Splits the ellipse along its minor axis and picks the half with fewer
/// skin pixels as the finger side. "Up" is the half toward smaller y.
pub fn finger_half(ellipse: &Ellipse, mask: &BinaryMask) -> FingerSide {
    let (c, s) = ellipse.major_dir();
    let (ux, uy) = if s > 0.0 || (s == 0.0 && c > 0.0) {
        (-c, -s)
    } else {
        (c, s)
    };
    let (mut up, mut down) = (0usize, 0usize);
    for (x, y) in mask.true_pixels() {
        let p = Point::from((x, y));
        if !ellipse.contains(p) {
            continue;
        }
        let t = (p.x - ellipse.center.x) * ux + (p.y - ellipse.center.y) * uy;
        if t > 1e-9 {
            up += 1;
        } else if t < -1e-9 {
            down += 1;
        }
    }
    let half = if down < up { Half::Down } else { Half::Up };
    FingerSide {
        half,
        low_confidence: up == down,
        up_count: up,
        down_count: down,
    }
}

/// Upright hand mask: fingers toward smaller y.
#[derive(Debug, Clone, PartialEq)]
pub struct RotatedHand {
    pub mask: BinaryMask,
    /// Rotation applied, radians (`pi/2 - theta`, plus `pi` when flipped).
    pub theta_applied: f64,
    /// Orientation measured on the input mask.
    pub theta_measured: f64,
    /// Corrected ellipse re-fitted on the output.
    pub ellipse: Ellipse,
    pub flipped: bool,
    pub low_confidence: bool,
}

/// Orientation, vertical rotation and finger-side flip in one step. The
/// finger side is judged inside the second-moment ellipse of the whole
/// upright hand.
pub fn adjust_hand(hand: &BinaryMask, factors: &MorphFactors) -> Result<RotatedHand> {
    let orientation = hand_orientation(hand, factors)?;
    let upright = rotate_to_vertical(hand, orientation.theta);
    let points: Vec<Point> = upright.true_pixels().map(Point::from).collect();
    let whole = moment_ellipse(&points)?;
    let side = finger_half(&whole, &upright);
    let flipped = side.half == Half::Down;
    let mask = if flipped {
        upright.flip_vertical()
    } else {
        upright
    };
    let refit = hand_orientation(&mask, factors)?;
    let mut applied = FRAC_PI_2 - orientation.theta;
    if flipped {
        applied += PI;
    }
    Ok(RotatedHand {
        mask,
        theta_applied: applied,
        theta_measured: orientation.theta,
        ellipse: refit.ellipse,
        flipped,
        low_confidence: side.low_confidence,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn blob(w: usize, h: usize, cx: f64, cy: f64, rx: f64, ry: f64) -> BinaryMask {
        BinaryMask::from_fn(w, h, |x, y| {
            let (dx, dy) = ((x as f64 - cx) / rx, (y as f64 - cy) / ry);
            dx * dx + dy * dy <= 1.0
        })
    }

    fn region(area: usize, y: usize) -> Region {
        let pixels = (0..area)
            .map(|i| (i % 100, y + i / 100))
            .collect::<Vec<_>>();
        connected_components(&{
            let mut m = BinaryMask::new(100, y + area / 100 + 2);
            for &(x, yy) in &pixels {
                m.set(x, yy, true);
            }
            m
        })
        .remove(0)
    }

    #[test]
    fn comparison_two_similar_regions_are_hands() {
        let out = locate_comparison_method(&[region(1000, 50), region(800, 0)]);
        assert_eq!(out.hands.len(), 2);
        assert!(out.face.is_none());
    }

    #[test]
    fn comparison_large_high_region_is_face() {
        let out = locate_comparison_method(&[region(3000, 0), region(1000, 80)]);
        assert_eq!(out.face.as_ref().unwrap().area(), 3000);
        assert_eq!(out.hands[0].area(), 1000);
    }

    #[test]
    fn comparison_ratio_exactly_one_and_a_half_takes_face_branch() {
        let out = locate_comparison_method(&[region(1500, 60), region(1000, 0)]);
        // barycenter wins the disagreement
        assert_eq!(out.face.as_ref().unwrap().area(), 1000);
        assert_eq!(out.hands.len(), 1);
    }

    #[test]
    fn comparison_three_and_one_regions() {
        let out = locate_comparison_method(&[region(900, 40), region(800, 5), region(700, 90)]);
        assert_eq!(out.face.as_ref().unwrap().area(), 800);
        assert_eq!(out.hands.len(), 2);
        let single = locate_comparison_method(&[region(500, 0)]);
        assert_eq!(single.hands.len(), 1);
        assert!(single.face.is_none());
        assert!(locate_comparison_method(&[]).hands.is_empty());
    }

    #[test]
    fn ellipse_method_empty_and_parameters() {
        let m = BinaryMask::new(10, 10);
        let out = locate_ellipse_method(&m, &m, &EllipseMethodParams::default()).unwrap();
        assert!(out.hands.is_empty() && out.face.is_none());
        let bad = EllipseMethodParams {
            face_ratio_threshold: 1.0,
            ..Default::default()
        };
        assert!(locate_ellipse_method(&m, &m, &bad).is_err());
    }

    #[test]
    fn horizontal_bar_becomes_vertical() {
        let bar = BinaryMask::from_fn(30, 9, |x, y| (5..25).contains(&x) && (3..6).contains(&y));
        let v = rotate_to_vertical(&bar, 0.0);
        let (x0, y0, x1, y1) = v.bounding_box().unwrap();
        assert_eq!((x1 - x0 + 1, y1 - y0 + 1), (3, 20));
        assert_eq!(v.count(), 60);
    }

    #[test]
    fn vertical_theta_is_translation_only() {
        let m = blob(20, 30, 9.0, 14.0, 4.0, 9.0);
        let v = rotate_to_vertical(&m, FRAC_PI_2);
        let (a, _) = m.crop_to_content(0).unwrap();
        let (b, _) = v.crop_to_content(0).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn solid_ellipse_half_tie() {
        let m = blob(41, 61, 20.0, 30.0, 12.0, 25.0);
        let pts: Vec<Point> = m.true_pixels().map(Point::from).collect();
        let e = moment_ellipse(&pts).unwrap();
        let side = finger_half(&e, &m);
        assert_eq!(side.half, Half::Up);
        assert!(side.low_confidence);
    }

    #[test]
    fn orientation_needs_pixels() {
        let mut m = BinaryMask::new(5, 5);
        m.set(1, 1, true);
        m.set(2, 1, true);
        m.set(3, 1, true);
        assert!(hand_orientation(&m, &MorphFactors::default()).is_err());
    }

    #[test]
    fn orientation_of_tilted_blob() {
        let t = 0.6f64;
        let m = BinaryMask::from_fn(120, 120, |x, y| {
            let (dx, dy) = (x as f64 - 60.0, y as f64 - 60.0);
            let u = dx * libm::cos(t) + dy * libm::sin(t);
            let v = -dx * libm::sin(t) + dy * libm::cos(t);
            (u / 45.0) * (u / 45.0) + (v / 18.0) * (v / 18.0) <= 1.0
        });
        let o = hand_orientation(&m, &MorphFactors::default()).unwrap();
        assert!((o.theta - t).abs() < 1f64.to_radians(), "{}", o.theta);
        let v = rotate_to_vertical(&m, o.theta);
        let o2 = hand_orientation(&v, &MorphFactors::default()).unwrap();
        assert!((o2.theta - FRAC_PI_2).abs() < 1f64.to_radians());
    }
}
