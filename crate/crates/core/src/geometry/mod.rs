//! Binary-mask geometry: connected components, morphology, convex hulls,
//! minimum-perimeter rectangles and conic ellipse fitting.

mod components;
mod ellipse;
mod hull;
mod morph;

pub use components::{connected_components, BoundingBox, Region};
pub use ellipse::{fit_ellipse, moment_ellipse, rasterize_ellipse_perimeter, Ellipse};
pub use hull::{convex_hull, min_perimeter_rect, Rect};
pub use morph::{dilate, erode, morph, MorphOp, SeShape, StructuringElement};

/// A point in image coordinates (x right, y down).
#[derive(Debug, Clone, Copy, PartialEq, Default)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct Point {
    pub x: f64,
    pub y: f64,
}

impl Point {
    pub const fn new(x: f64, y: f64) -> Self {
        Self { x, y }
    }
}

impl From<(usize, usize)> for Point {
    fn from((x, y): (usize, usize)) -> Self {
        Self::new(x as f64, y as f64)
    }
}

impl From<(f64, f64)> for Point {
    fn from((x, y): (f64, f64)) -> Self {
        Self::new(x, y)
    }
}
