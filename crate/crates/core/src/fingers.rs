//! Hand dimensions, palm localization and palm/wrist removal.

use alloc::vec::Vec;

use crate::geometry::{convex_hull, min_perimeter_rect, Point, Rect};
use crate::mask::BinaryMask;
use crate::{Error, Result};

/// Palm length as a fraction of hand length.
pub const PALM_LENGTH_RATIO: f64 = 0.496;
/// Palm width as a fraction of hand length.
pub const PALM_WIDTH_RATIO: f64 = 0.44;

#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct HandBounds {
    /// Smallest-perimeter rectangle around the pixel squares.
    pub rect: Rect,
    pub hand_length: f64,
    pub hand_width: f64,
}

/// Bounds a hand with its minimum-perimeter rectangle. The rectangle encloses
/// whole pixels, so a solid `w x h` block measures exactly `w` by `h`.
pub fn hand_bounds(mask: &BinaryMask) -> Result<HandBounds> {
    if mask.is_empty() {
        return Err(Error::Empty("hand mask"));
    }
    // only the row extremes can be hull vertices
    let mut points = Vec::new();
    for y in 0..mask.height() {
        let row = &mask.bits()[y * mask.width()..(y + 1) * mask.width()];
        if let (Some(l), Some(r)) = (row.iter().position(|&b| b), row.iter().rposition(|&b| b)) {
            points.push(Point::from((l, y)));
            if r != l {
                points.push(Point::from((r, y)));
            }
        }
    }
    let hull = convex_hull(&points)?;
    let mut rect = min_perimeter_rect(&hull)?;
    rect.half_extents.0 += 0.5;
    rect.half_extents.1 += 0.5;
    let (w, h) = (rect.width(), rect.height());
    Ok(HandBounds {
        rect,
        hand_length: w.max(h),
        hand_width: w.min(h),
    })
}

/// `(palm_length, palm_width)` from the anthropometric ratios.
pub fn palm_dims(hand_length: f64) -> Result<(f64, f64)> {
    if !(hand_length > 0.0) || !hand_length.is_finite() {
        return Err(Error::Parameter {
            name: "hand_length",
            reason: "must be positive",
        });
    }
    Ok((
        PALM_LENGTH_RATIO * hand_length,
        PALM_WIDTH_RATIO * hand_length,
    ))
}

/// Axis-aligned palm placement.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct PalmWindow {
    pub x: usize,
    pub y: usize,
    pub width: usize,
    pub height: usize,
    pub skin_count: usize,
}

impl PalmWindow {
    pub fn center(&self) -> Point {
        Point::new(
            self.x as f64 + (self.width as f64 - 1.0) / 2.0,
            self.y as f64 + (self.height as f64 - 1.0) / 2.0,
        )
    }

    /// Radius of the circle through the window corners.
    pub fn circumradius(&self) -> f64 {
        libm::hypot(self.width as f64, self.height as f64) / 2.0
    }

    pub fn bottom(&self) -> usize {
        self.y + self.height - 1
    }
}

/// Integral image with a zero first row and column.
fn integral(mask: &BinaryMask) -> Vec<u32> {
    let (w, h) = (mask.width(), mask.height());
    let mut s = alloc::vec![0u32; (w + 1) * (h + 1)];
    for y in 0..h {
        let mut row = 0u32;
        for x in 0..w {
            row += mask.get(x, y) as u32;
            s[(y + 1) * (w + 1) + x + 1] = s[y * (w + 1) + x + 1] + row;
        }
    }
    s
}

/// Exhaustive stride-1 search for the window of `dims` (length, width)
/// holding the most skin pixels. Ties go to the smallest `(y, x)`.
pub fn locate_palm(mask: &BinaryMask, dims: (f64, f64)) -> Result<PalmWindow> {
    let (length, width) = dims;
    if !(length > 0.0 && width > 0.0) {
        return Err(Error::Parameter {
            name: "palm dims",
            reason: "must be positive",
        });
    }
    let wh = (libm::round(length) as usize).max(1);
    let ww = (libm::round(width) as usize).max(1);
    let (w, h) = (mask.width(), mask.height());
    if ww > w || wh > h {
        return Err(Error::Dimensions("palm window larger than the canvas"));
    }
    let s = integral(mask);
    let at = |x: usize, y: usize| s[y * (w + 1) + x];
    let mut best = PalmWindow {
        x: 0,
        y: 0,
        width: ww,
        height: wh,
        skin_count: 0,
    };
    let mut best_count = None;
    for y in 0..=h - wh {
        for x in 0..=w - ww {
            let c = at(x + ww, y + wh) + at(x, y) - at(x + ww, y) - at(x, y + wh);
            if best_count.is_none_or(|b| c > b) {
                best_count = Some(c);
                best.x = x;
                best.y = y;
                best.skin_count = c as usize;
            }
        }
    }
    Ok(best)
}

/// Clears the circle through the palm window corners (boundary included)
/// and everything below the window; what is left are finger pixels.
pub fn strip_to_fingers(mask: &BinaryMask, palm: &PalmWindow) -> BinaryMask {
    let c = palm.center();
    let r2 = palm.circumradius() * palm.circumradius();
    let bottom = palm.bottom();
    BinaryMask::from_fn(mask.width(), mask.height(), |x, y| {
        if !mask.get(x, y) || y > bottom {
            return false;
        }
        let (dx, dy) = (x as f64 - c.x, y as f64 - c.y);
        dx * dx + dy * dy > r2 + 1e-9
    })
}
