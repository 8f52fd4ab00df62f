//! Dilation and erosion with diamond and disk structuring elements.
//!
//! Both shapes are balls of a metric (L1 for the diamond, L2 for the disk),
//! so each operation reduces to thresholding an exact distance transform:
//! a pixel is in `dilate(m)` iff its distance to `m` is at most `r`, and in
//! `erode(m)` iff its distance to the complement (outside the canvas
//! included) exceeds `r`.

use alloc::vec::Vec;

use crate::mask::BinaryMask;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "lowercase"))]
pub enum SeShape {
    /// `|dx| + |dy| <= r`
    Diamond,
    /// `dx^2 + dy^2 <= r^2`
    Disk,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct StructuringElement {
    pub shape: SeShape,
    pub radius: usize,
}

impl StructuringElement {
    pub fn diamond(radius: usize) -> Self {
        Self {
            shape: SeShape::Diamond,
            radius,
        }
    }

    pub fn disk(radius: usize) -> Self {
        Self {
            shape: SeShape::Disk,
            radius,
        }
    }

    pub fn contains(&self, dx: i64, dy: i64) -> bool {
        let r = self.radius as i64;
        match self.shape {
            SeShape::Diamond => dx.abs() + dy.abs() <= r,
            SeShape::Disk => dx * dx + dy * dy <= r * r,
        }
    }

    /// The offset set, row by row.
    pub fn offsets(&self) -> Vec<(i64, i64)> {
        let r = self.radius as i64;
        let mut out = Vec::new();
        for dy in -r..=r {
            for dx in -r..=r {
                if self.contains(dx, dy) {
                    out.push((dx, dy));
                }
            }
        }
        out
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MorphOp {
    Dilate,
    Erode,
}

pub fn morph(mask: &BinaryMask, op: MorphOp, se: &StructuringElement) -> BinaryMask {
    match op {
        MorphOp::Dilate => dilate(mask, se),
        MorphOp::Erode => erode(mask, se),
    }
}

/// Union of the element translated to every true pixel.
pub fn dilate(mask: &BinaryMask, se: &StructuringElement) -> BinaryMask {
    let (w, h) = (mask.width(), mask.height());
    if se.radius == 0 {
        return mask.clone();
    }
    let targets: Vec<bool> = mask.bits().to_vec();
    let r = se.radius as i64;
    let within: Vec<bool> = match se.shape {
        SeShape::Diamond => l1_distance(&targets, w, h)
            .into_iter()
            .map(|d| d <= r)
            .collect(),
        SeShape::Disk => squared_euclidean_distance(&targets, w, h)
            .into_iter()
            .map(|d| d <= r * r)
            .collect(),
    };
    BinaryMask::from_bits(w, h, within).expect("same dimensions")
}

/// Pixels whose translated element lies entirely inside the true set.
/// Pixels outside the canvas count as false.
pub fn erode(mask: &BinaryMask, se: &StructuringElement) -> BinaryMask {
    let (w, h) = (mask.width(), mask.height());
    if se.radius == 0 {
        return mask.clone();
    }
    // one-pixel false frame stands in for everything outside the canvas
    let (pw, ph) = (w + 2, h + 2);
    let mut targets = alloc::vec![true; pw * ph];
    for y in 0..h {
        for x in 0..w {
            targets[(y + 1) * pw + x + 1] = !mask.get(x, y);
        }
    }
    let r = se.radius as i64;
    let far: Vec<bool> = match se.shape {
        SeShape::Diamond => l1_distance(&targets, pw, ph)
            .into_iter()
            .map(|d| d > r)
            .collect(),
        SeShape::Disk => squared_euclidean_distance(&targets, pw, ph)
            .into_iter()
            .map(|d| d > r * r)
            .collect(),
    };
    BinaryMask::from_fn(w, h, |x, y| far[(y + 1) * pw + x + 1])
}

const FAR: i64 = 1 << 40;

/// City-block distance to the nearest target (two raster passes).
fn l1_distance(targets: &[bool], w: usize, h: usize) -> Vec<i64> {
    let mut d: Vec<i64> = targets.iter().map(|&t| if t { 0 } else { FAR }).collect();
    for y in 0..h {
        for x in 0..w {
            let i = y * w + x;
            if x > 0 {
                d[i] = d[i].min(d[i - 1] + 1);
            }
            if y > 0 {
                d[i] = d[i].min(d[i - w] + 1);
            }
        }
    }
    for y in (0..h).rev() {
        for x in (0..w).rev() {
            let i = y * w + x;
            if x + 1 < w {
                d[i] = d[i].min(d[i + 1] + 1);
            }
            if y + 1 < h {
                d[i] = d[i].min(d[i + w] + 1);
            }
        }
    }
    d
}

/// Exact squared Euclidean distance to the nearest target, computed with the
/// lower envelope of parabolas along rows and then columns.
fn squared_euclidean_distance(targets: &[bool], w: usize, h: usize) -> Vec<i64> {
    let mut d: Vec<i64> = targets.iter().map(|&t| if t { 0 } else { FAR }).collect();
    let mut f = Vec::new();
    let mut out = Vec::new();
    for y in 0..h {
        f.clear();
        f.extend_from_slice(&d[y * w..(y + 1) * w]);
        envelope(&f, &mut out);
        d[y * w..(y + 1) * w].copy_from_slice(&out);
    }
    for x in 0..w {
        f.clear();
        f.extend((0..h).map(|y| d[y * w + x]));
        envelope(&f, &mut out);
        for (y, &v) in out.iter().enumerate() {
            d[y * w + x] = v;
        }
    }
    d
}

fn envelope(f: &[i64], out: &mut Vec<i64>) {
    let n = f.len();
    out.clear();
    out.resize(n, FAR);
    let mut v = alloc::vec![0usize; n];
    let mut z = alloc::vec![0f64; n + 1];
    let mut k = 0usize;
    // skip leading infinite samples so every parabola in the envelope is finite
    let Some(first) = f.iter().position(|&x| x < FAR) else {
        return;
    };
    v[0] = first;
    z[0] = f64::NEG_INFINITY;
    z[1] = f64::INFINITY;
    let inter = |q: usize, p: usize| -> f64 {
        let (q2, p2) = ((q * q) as f64, (p * p) as f64);
        ((f[q] as f64 + q2) - (f[p] as f64 + p2)) / (2.0 * q as f64 - 2.0 * p as f64)
    };
    for q in first + 1..n {
        if f[q] >= FAR {
            continue;
        }
        let mut s = inter(q, v[k]);
        while s <= z[k] {
            k -= 1;
            s = inter(q, v[k]);
        }
        k += 1;
        v[k] = q;
        z[k] = s;
        z[k + 1] = f64::INFINITY;
    }
    k = 0;
    for (q, slot) in out.iter_mut().enumerate() {
        while z[k + 1] < q as f64 {
            k += 1;
        }
        let dq = q as i64 - v[k] as i64;
        *slot = dq * dq + f[v[k]];
    }
}
