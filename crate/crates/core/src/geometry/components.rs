use alloc::vec::Vec;

use crate::mask::BinaryMask;

/// Inclusive pixel bounding box.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct BoundingBox {
    pub min_x: usize,
    pub min_y: usize,
    pub max_x: usize,
    pub max_y: usize,
}

impl BoundingBox {
    pub fn width(&self) -> usize {
        self.max_x - self.min_x + 1
    }

    pub fn height(&self) -> usize {
        self.max_y - self.min_y + 1
    }
}

/// An 8-connected set of true pixels.
#[derive(Debug, Clone, PartialEq)]
pub struct Region {
    /// Pixels in raster order; the first one is the topmost-leftmost.
    pub pixels: Vec<(usize, usize)>,
    pub barycenter: (f64, f64),
    pub bbox: BoundingBox,
}

impl Region {
    fn from_pixels(mut pixels: Vec<(usize, usize)>) -> Self {
        pixels.sort_unstable_by_key(|&(x, y)| (y, x));
        let (mut sx, mut sy) = (0u64, 0u64);
        let (x0, y0) = pixels[0];
        let mut bbox = BoundingBox {
            min_x: x0,
            min_y: y0,
            max_x: x0,
            max_y: y0,
        };
        for &(x, y) in &pixels {
            sx += x as u64;
            sy += y as u64;
            bbox.min_x = bbox.min_x.min(x);
            bbox.max_x = bbox.max_x.max(x);
            bbox.min_y = bbox.min_y.min(y);
            bbox.max_y = bbox.max_y.max(y);
        }
        let n = pixels.len() as f64;
        Self {
            barycenter: (sx as f64 / n, sy as f64 / n),
            pixels,
            bbox,
        }
    }

    pub fn area(&self) -> usize {
        self.pixels.len()
    }

    /// Region rendered into a canvas of the given size.
    pub fn to_mask(&self, width: usize, height: usize) -> BinaryMask {
        let mut m = BinaryMask::new(width, height);
        for &(x, y) in &self.pixels {
            m.set(x, y, true);
        }
        m
    }

    /// Region cropped to its bounding box plus `margin`, with the canvas
    /// position of the crop origin.
    pub fn to_local_mask(&self, margin: usize) -> (BinaryMask, (i64, i64)) {
        let w = self.bbox.width() + 2 * margin;
        let h = self.bbox.height() + 2 * margin;
        let ox = self.bbox.min_x as i64 - margin as i64;
        let oy = self.bbox.min_y as i64 - margin as i64;
        let mut m = BinaryMask::new(w, h);
        for &(x, y) in &self.pixels {
            m.set((x as i64 - ox) as usize, (y as i64 - oy) as usize, true);
        }
        (m, (ox, oy))
    }
}

/// 8-connected components, largest first. Equal areas are ordered by the
/// topmost-leftmost pixel (smaller y, then smaller x).
pub fn connected_components(mask: &BinaryMask) -> Vec<Region> {
    let (w, h) = (mask.width(), mask.height());
    let mut seen = alloc::vec![false; w * h];
    let mut regions = Vec::new();
    let mut stack = Vec::new();
    for start in 0..w * h {
        if !mask.bits()[start] || seen[start] {
            continue;
        }
        seen[start] = true;
        stack.push(start);
        let mut pixels = Vec::new();
        while let Some(i) = stack.pop() {
            let (x, y) = (i % w, i / w);
            pixels.push((x, y));
            for dy in -1i64..=1 {
                for dx in -1i64..=1 {
                    let (nx, ny) = (x as i64 + dx, y as i64 + dy);
                    if mask.get_signed(nx, ny) {
                        let k = ny as usize * w + nx as usize;
                        if !seen[k] {
                            seen[k] = true;
                            stack.push(k);
                        }
                    }
                }
            }
        }
        regions.push(Region::from_pixels(pixels));
    }
    // discovery order is raster order of the first pixel, so a stable sort
    // on area alone applies the tie rule
    regions.sort_by(|a, b| b.area().cmp(&a.area()));
    regions
}
