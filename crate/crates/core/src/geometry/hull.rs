use alloc::vec::Vec;
use core::f64::consts::FRAC_PI_2;

use super::Point;
use crate::math::wrap;
use crate::{Error, Result};

fn cross(o: Point, a: Point, b: Point) -> f64 {
    (a.x - o.x) * (b.y - o.y) - (a.y - o.y) * (b.x - o.x)
}

/// Convex hull by Andrew's monotone chain. Vertices are counterclockwise in
/// the (x, y) frame and collinear boundary points are dropped. Degenerate
/// inputs give a one-vertex (single point) or two-vertex (segment) hull.
pub fn convex_hull(points: &[Point]) -> Result<Vec<Point>> {
    if points.is_empty() {
        return Err(Error::Empty("convex hull of no points"));
    }
    let mut pts = points.to_vec();
    pts.sort_by(|a, b| a.x.total_cmp(&b.x).then(a.y.total_cmp(&b.y)));
    pts.dedup();
    if pts.len() < 3 {
        return Ok(pts);
    }
    let mut lower: Vec<Point> = Vec::new();
    for &p in &pts {
        while lower.len() >= 2 && cross(lower[lower.len() - 2], lower[lower.len() - 1], p) <= 0.0 {
            lower.pop();
        }
        lower.push(p);
    }
    let mut upper: Vec<Point> = Vec::new();
    for &p in pts.iter().rev() {
        while upper.len() >= 2 && cross(upper[upper.len() - 2], upper[upper.len() - 1], p) <= 0.0 {
            upper.pop();
        }
        upper.push(p);
    }
    lower.pop();
    upper.pop();
    lower.extend(upper);
    Ok(lower)
}

/// Oriented rectangle: `half_extents.0` runs along `(cos angle, sin angle)`,
/// `half_extents.1` along the perpendicular.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct Rect {
    pub center: Point,
    pub half_extents: (f64, f64),
    /// Radians in `[0, pi/2)`.
    pub angle: f64,
}

impl Rect {
    pub fn width(&self) -> f64 {
        2.0 * self.half_extents.0
    }

    pub fn height(&self) -> f64 {
        2.0 * self.half_extents.1
    }

    pub fn perimeter(&self) -> f64 {
        2.0 * (self.width() + self.height())
    }

    pub fn corners(&self) -> [Point; 4] {
        let (c, s) = (libm::cos(self.angle), libm::sin(self.angle));
        let (hw, hh) = self.half_extents;
        [(-1.0, -1.0), (1.0, -1.0), (1.0, 1.0), (-1.0, 1.0)].map(|(a, b)| {
            Point::new(
                self.center.x + a * hw * c - b * hh * s,
                self.center.y + a * hw * s + b * hh * c,
            )
        })
    }
}

/// Smallest-perimeter enclosing rectangle of a convex polygon.
///
/// The optimum has a side flush with a hull edge, so each edge direction is
/// tried in turn (the caliper orientations) and the hull is projected onto
/// it. Ties go to the smaller angle.
pub fn min_perimeter_rect(hull: &[Point]) -> Result<Rect> {
    if hull.len() < 3 {
        return Err(Error::Degenerate(
            "hull has no area, rectangle would have zero height",
        ));
    }
    let mut best: Option<(f64, Rect)> = None;
    for i in 0..hull.len() {
        let (p, q) = (hull[i], hull[(i + 1) % hull.len()]);
        let (dx, dy) = (q.x - p.x, q.y - p.y);
        let len = libm::hypot(dx, dy);
        if len == 0.0 {
            continue;
        }
        let mut angle = libm::atan2(dy, dx);
        // fold into [0, pi/2): a rectangle is symmetric under quarter turns
        angle = wrap(angle, FRAC_PI_2);
        if FRAC_PI_2 - angle < 1e-12 {
            angle = 0.0;
        }
        let (c, s) = (libm::cos(angle), libm::sin(angle));
        let (mut umin, mut umax, mut vmin, mut vmax) = (
            f64::INFINITY,
            f64::NEG_INFINITY,
            f64::INFINITY,
            f64::NEG_INFINITY,
        );
        for h in hull {
            let u = h.x * c + h.y * s;
            let v = -h.x * s + h.y * c;
            umin = umin.min(u);
            umax = umax.max(u);
            vmin = vmin.min(v);
            vmax = vmax.max(v);
        }
        let (uc, vc) = ((umin + umax) / 2.0, (vmin + vmax) / 2.0);
        let rect = Rect {
            center: Point::new(uc * c - vc * s, uc * s + vc * c),
            half_extents: ((umax - umin) / 2.0, (vmax - vmin) / 2.0),
            angle,
        };
        let perim = rect.perimeter();
        let better = match &best {
            None => true,
            Some((bp, br)) => {
                let tol = 1e-9 * bp.max(1.0);
                perim < bp - tol || (perim <= bp + tol && angle < br.angle)
            }
        };
        if better {
            best = Some((perim, rect));
        }
    }
    let (_, rect) = best.ok_or(Error::Degenerate("hull edges have zero length"))?;
    if rect.half_extents.0 <= 0.0 || rect.half_extents.1 <= 0.0 {
        return Err(Error::Degenerate("rectangle has zero height"));
    }
    Ok(rect)
}
