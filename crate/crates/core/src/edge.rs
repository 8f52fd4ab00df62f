//! Canny edge detection with two-threshold hysteresis.
//!
//! Blur and gradients are computed in exact integer arithmetic (the Gaussian
//! kernel is quantized once), so the result does not depend on the order in
//! which separable passes run. That makes the detector exactly equivariant
//! under quarter-turn rotations of the input.

use alloc::vec::Vec;

use crate::image::GrayImage;
use crate::mask::BinaryMask;
use crate::{Error, Result};

pub use crate::image::to_gray;

/// Boolean edge raster produced by [`canny`].
pub type EdgeMap = BinaryMask;

/// Gradient axis quantized into four bins, measured in image coordinates
/// (x right, y down) modulo 180 degrees.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Direction {
    Deg0,
    Deg45,
    Deg90,
    Deg135,
}

/// Per-pixel Sobel magnitude of the blurred image and its quantized axis.
#[derive(Debug, Clone)]
pub struct GradientField {
    width: usize,
    height: usize,
    magnitude: Vec<f64>,
    direction: Vec<Direction>,
    // exact squared magnitude and signed components, in kernel units
    mag2: Vec<i128>,
    grad: Vec<(i64, i64)>,
}

impl GradientField {
    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn magnitude(&self, x: usize, y: usize) -> f64 {
        self.magnitude[y * self.width + x]
    }

    pub fn direction(&self, x: usize, y: usize) -> Direction {
        self.direction[y * self.width + x]
    }

    pub fn max_magnitude(&self) -> f64 {
        self.magnitude.iter().copied().fold(0.0, f64::max)
    }
}

const KERNEL_SCALE: f64 = 4096.0;
const TAN_22_5: f64 = 0.414_213_562_373_095_1;

fn gaussian_kernel(sigma: f64) -> Vec<i64> {
    let radius = libm::ceil(3.0 * sigma) as i64;
    (-radius..=radius)
        .map(|i| {
            let x = i as f64;
            libm::round(libm::exp(-x * x / (2.0 * sigma * sigma)) * KERNEL_SCALE) as i64
        })
        .collect()
}

fn quantize(gx: i64, gy: i64) -> Direction {
    let (ax, ay) = (gx.unsigned_abs() as f64, gy.unsigned_abs() as f64);
    if ax >= ay {
        // boundary at 22.5 degrees goes to the lower angle
        if ay <= TAN_22_5 * ax {
            return Direction::Deg0;
        }
    } else if ax < TAN_22_5 * ay {
        return Direction::Deg90;
    }
    if (gx > 0) == (gy > 0) {
        Direction::Deg45
    } else {
        Direction::Deg135
    }
}

/// Gaussian blur (std `sigma`, radius `ceil(3 sigma)`, edge-clamped) followed
/// by Sobel gradients.
pub fn gradient(img: &GrayImage, sigma: f64) -> Result<GradientField> {
    if !(sigma > 0.0) {
        return Err(Error::Parameter {
            name: "sigma",
            reason: "must be positive",
        });
    }
    let (w, h) = (img.width(), img.height());
    let kernel = gaussian_kernel(sigma);
    let kr = (kernel.len() / 2) as isize;
    let clamp = |v: isize, n: usize| v.clamp(0, n as isize - 1) as usize;

    let mut tmp = alloc::vec![0i64; w * h];
    for y in 0..h {
        for x in 0..w {
            let mut s = 0i64;
            for (k, &wk) in kernel.iter().enumerate() {
                s += wk * i64::from(img.get(clamp(x as isize + k as isize - kr, w), y));
            }
            tmp[y * w + x] = s;
        }
    }
    let mut blur = alloc::vec![0i64; w * h];
    for y in 0..h {
        for x in 0..w {
            let mut s = 0i64;
            for (k, &wk) in kernel.iter().enumerate() {
                s += wk * tmp[clamp(y as isize + k as isize - kr, h) * w + x];
            }
            blur[y * w + x] = s;
        }
    }

    let norm: i64 = kernel.iter().sum();
    let norm = (norm * norm) as f64;
    let at = |x: isize, y: isize| blur[clamp(y, h) * w + clamp(x, w)];
    let mut field = GradientField {
        width: w,
        height: h,
        magnitude: Vec::with_capacity(w * h),
        direction: Vec::with_capacity(w * h),
        mag2: Vec::with_capacity(w * h),
        grad: Vec::with_capacity(w * h),
    };
    for y in 0..h as isize {
        for x in 0..w as isize {
            let gx = (at(x + 1, y - 1) + 2 * at(x + 1, y) + at(x + 1, y + 1))
                - (at(x - 1, y - 1) + 2 * at(x - 1, y) + at(x - 1, y + 1));
            let gy = (at(x - 1, y + 1) + 2 * at(x, y + 1) + at(x + 1, y + 1))
                - (at(x - 1, y - 1) + 2 * at(x, y - 1) + at(x + 1, y - 1));
            let m2 = i128::from(gx) * i128::from(gx) + i128::from(gy) * i128::from(gy);
            field.mag2.push(m2);
            field.grad.push((gx, gy));
            field.magnitude.push(libm::sqrt(m2 as f64) / norm);
            field.direction.push(if m2 == 0 {
                Direction::Deg0
            } else {
                quantize(gx, gy)
            });
        }
    }
    Ok(field)
}

fn offset(dir: Direction) -> (isize, isize) {
    match dir {
        Direction::Deg0 => (1, 0),
        Direction::Deg45 => (1, 1),
        Direction::Deg90 => (0, 1),
        Direction::Deg135 => (-1, 1),
    }
}

/// Non-maximum suppression. A pixel survives when it is strictly larger than
/// its neighbor ahead (along the signed gradient) and not smaller than the
/// one behind; exact plateaus keep their brighter-side pixel.
fn suppress(field: &GradientField) -> Vec<bool> {
    let (w, h) = (field.width, field.height);
    let clamp = |v: isize, n: usize| v.clamp(0, n as isize - 1) as usize;
    let mut keep = alloc::vec![false; w * h];
    for y in 0..h {
        for x in 0..w {
            let i = y * w + x;
            let m = field.mag2[i];
            if m == 0 {
                continue;
            }
            let (mut ox, mut oy) = offset(field.direction[i]);
            let (gx, gy) = field.grad[i];
            if (ox as i64) * gx + (oy as i64) * gy < 0 {
                ox = -ox;
                oy = -oy;
            }
            let ahead = field.mag2[clamp(y as isize + oy, h) * w + clamp(x as isize + ox, w)];
            let behind = field.mag2[clamp(y as isize - oy, h) * w + clamp(x as isize - ox, w)];
            keep[i] = m > ahead && m >= behind;
        }
    }
    keep
}

/// Canny edges with absolute thresholds on the Sobel magnitude of the blurred
/// image (gray levels per pixel, unnormalized Sobel).
pub fn canny(img: &GrayImage, sigma: f64, t_low: f64, t_high: f64) -> Result<EdgeMap> {
    if !(t_low > 0.0 && t_low < t_high) {
        return Err(Error::Parameter {
            name: "thresholds",
            reason: "need 0 < t_low < t_high",
        });
    }
    let field = gradient(img, sigma)?;
    Ok(hysteresis(&field, t_low, t_high))
}

/// Canny edges with thresholds given as fractions of the largest gradient
/// magnitude in the image.
pub fn canny_relative(img: &GrayImage, sigma: f64, low: f64, high: f64) -> Result<EdgeMap> {
    if !(low > 0.0 && low < high && high <= 1.0) {
        return Err(Error::Parameter {
            name: "thresholds",
            reason: "need 0 < low < high <= 1",
        });
    }
    let field = gradient(img, sigma)?;
    let max = field.max_magnitude();
    if max == 0.0 {
        return Ok(BinaryMask::new(img.width(), img.height()));
    }
    Ok(hysteresis(&field, low * max, high * max))
}

fn hysteresis(field: &GradientField, t_low: f64, t_high: f64) -> EdgeMap {
    let (w, h) = (field.width, field.height);
    let keep = suppress(field);
    let mut edges = BinaryMask::new(w, h);
    let mut stack = Vec::new();
    for i in 0..w * h {
        if keep[i] && field.magnitude[i] >= t_high && !edges.bits()[i] {
            edges.set(i % w, i / w, true);
            stack.push(i);
            while let Some(j) = stack.pop() {
                let (x, y) = ((j % w) as isize, (j / w) as isize);
                for dy in -1..=1isize {
                    for dx in -1..=1isize {
                        let (nx, ny) = (x + dx, y + dy);
                        if nx < 0 || ny < 0 || nx >= w as isize || ny >= h as isize {
                            continue;
                        }
                        let k = ny as usize * w + nx as usize;
                        if keep[k] && field.magnitude[k] >= t_low && !edges.bits()[k] {
                            edges.set(nx as usize, ny as usize, true);
                            stack.push(k);
                        }
                    }
                }
            }
        }
    }
    edges
}
