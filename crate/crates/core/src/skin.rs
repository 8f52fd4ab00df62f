//! Skin/non-skin pixel classification on the chroma plane.
//!
//! Two classifiers share one entry point, [`skin_mask`]: a crisp box
//! `Cb in [77, 127], Cr in [139, 210]` and a zero-order Takagi-Sugeno system
//! whose default rule base reduces to the same box in its core while
//! ramping off over a 10-unit shoulder on each side.

use crate::image::ImageYCbCr;
use crate::mask::BinaryMask;
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct CrispSkinRange {
    pub cb_min: u8,
    pub cb_max: u8,
    pub cr_min: u8,
    pub cr_max: u8,
}

impl Default for CrispSkinRange {
    fn default() -> Self {
        Self {
            cb_min: 77,
            cb_max: 127,
            cr_min: 139,
            cr_max: 210,
        }
    }
}

impl CrispSkinRange {
    pub fn validate(&self) -> Result<()> {
        if self.cb_min > self.cb_max || self.cr_min > self.cr_max {
            return Err(Error::Parameter {
                name: "skin range",
                reason: "min must not exceed max",
            });
        }
        Ok(())
    }
}

/// Bounds are inclusive.
pub fn classify_crisp(cb: u8, cr: u8, range: &CrispSkinRange) -> bool {
    (range.cb_min..=range.cb_max).contains(&cb) && (range.cr_min..=range.cr_max).contains(&cr)
}

/// Trapezoidal membership function with breakpoints `a <= b <= c <= d`.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct Trapezoid {
    pub a: f64,
    pub b: f64,
    pub c: f64,
    pub d: f64,
}

impl Trapezoid {
    pub const fn new(a: f64, b: f64, c: f64, d: f64) -> Self {
        Self { a, b, c, d }
    }

    fn is_ordered(&self) -> bool {
        self.a <= self.b && self.b <= self.c && self.c <= self.d
    }
}

/// Degree of `x` in `trap`. Degenerate ramps (`a == b` or `c == d`) are 1 at
/// the shared breakpoint.
pub fn membership(x: f64, trap: &Trapezoid) -> f64 {
    let Trapezoid { a, b, c, d } = *trap;
    if x < a || x > d {
        0.0
    } else if x >= b && x <= c {
        1.0
    } else if x < b {
        (x - a) / (b - a)
    } else {
        (d - x) / (d - c)
    }
}

/// Labels for the three fuzzy subsets of each chroma input.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Tone {
    Dark = 0,
    Medium = 1,
    Light = 2,
}

/// Zero-order Takagi-Sugeno skin classifier over `(Cb, Cr)`.
///
/// `rules[i][j]` is the constant consequent of the rule
/// `IF Cb is tone i AND Cr is tone j`.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct FuzzySkinSystem {
    pub cb: [Trapezoid; 3],
    pub cr: [Trapezoid; 3],
    pub rules: [[f64; 3]; 3],
    pub threshold: f64,
}

impl Default for FuzzySkinSystem {
    fn default() -> Self {
        let mut rules = [[0.0; 3]; 3];
        rules[Tone::Medium as usize][Tone::Medium as usize] = 1.0;
        Self {
            cb: [
                Trapezoid::new(0.0, 0.0, 67.0, 77.0),
                Trapezoid::new(67.0, 77.0, 127.0, 137.0),
                Trapezoid::new(127.0, 137.0, 255.0, 255.0),
            ],
            cr: [
                Trapezoid::new(0.0, 0.0, 129.0, 139.0),
                Trapezoid::new(129.0, 139.0, 210.0, 220.0),
                Trapezoid::new(210.0, 220.0, 255.0, 255.0),
            ],
            rules,
            threshold: 0.5,
        }
    }
}

impl FuzzySkinSystem {
    pub fn new(
        cb: [Trapezoid; 3],
        cr: [Trapezoid; 3],
        rules: [[f64; 3]; 3],
        threshold: f64,
    ) -> Result<Self> {
        let sys = Self {
            cb,
            cr,
            rules,
            threshold,
        };
        sys.validate()?;
        Ok(sys)
    }

    pub fn validate(&self) -> Result<()> {
        for set in [&self.cb, &self.cr] {
            if !set.iter().all(Trapezoid::is_ordered) {
                return Err(Error::Parameter {
                    name: "membership",
                    reason: "breakpoints must satisfy a <= b <= c <= d",
                });
            }
            let covered =
                (0..=255u8).all(|v| set.iter().any(|t| membership(f64::from(v), t) > 0.0));
            if !covered {
                return Err(Error::Parameter {
                    name: "membership",
                    reason: "the three sets must cover 0..=255",
                });
            }
        }
        if !self.rules.iter().flatten().all(|z| (0.0..=1.0).contains(z)) {
            return Err(Error::Parameter {
                name: "rules",
                reason: "consequents must lie in [0, 1]",
            });
        }
        if !(0.0..=1.0).contains(&self.threshold) {
            return Err(Error::Parameter {
                name: "threshold",
                reason: "must lie in [0, 1]",
            });
        }
        Ok(())
    }
}

/// Weighted-average Sugeno output and the thresholded decision.
/// Rule strength is the minimum of the two antecedent degrees.
pub fn classify_fuzzy(cb: u8, cr: u8, sys: &FuzzySkinSystem) -> (f64, bool) {
    let mu_cb = sys.cb.map(|t| membership(f64::from(cb), &t));
    let mu_cr = sys.cr.map(|t| membership(f64::from(cr), &t));
    let (mut num, mut den) = (0.0, 0.0);
    for (i, &wi) in mu_cb.iter().enumerate() {
        for (j, &wj) in mu_cr.iter().enumerate() {
            let w = wi.min(wj);
            num += w * sys.rules[i][j];
            den += w;
        }
    }
    let score = if den > 0.0 { num / den } else { 0.0 };
    (score, score >= sys.threshold)
}

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(tag = "mode", rename_all = "lowercase"))]
pub enum SkinClassifier {
    Crisp(CrispSkinRange),
    Fuzzy(FuzzySkinSystem),
}

impl Default for SkinClassifier {
    fn default() -> Self {
        Self::Fuzzy(FuzzySkinSystem::default())
    }
}

impl SkinClassifier {
    pub fn is_skin(&self, cb: u8, cr: u8) -> bool {
        match self {
            Self::Crisp(r) => classify_crisp(cb, cr, r),
            Self::Fuzzy(s) => classify_fuzzy(cb, cr, s).1,
        }
    }
}

pub fn skin_mask(img: &ImageYCbCr, classifier: &SkinClassifier) -> BinaryMask {
    // decisions only depend on (Cb, Cr): tabulate once
    let mut table = alloc::vec![false; 256 * 256];
    for cb in 0..=255u8 {
        for cr in 0..=255u8 {
            table[usize::from(cb) * 256 + usize::from(cr)] = classifier.is_skin(cb, cr);
        }
    }
    BinaryMask::from_fn(img.width(), img.height(), |x, y| {
        let [_, cb, cr] = img.pixel(x, y);
        table[usize::from(cb) * 256 + usize::from(cr)]
    })
}
