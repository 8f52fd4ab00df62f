//! Raster images, PPM/PGM codecs, box low-pass filtering and color conversion.
//!
//! Color conversion is full-range BT.601 (the JPEG convention): chroma is
//! offset by 128 and every channel spans 0..=255.

use alloc::format;
use alloc::vec::Vec;

use crate::{Error, Result};

/// Row-major RGB image, three bytes per pixel.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ImageRgb {
    width: usize,
    height: usize,
    data: Vec<u8>,
}

/// Row-major YCbCr image with the same layout as [`ImageRgb`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ImageYCbCr {
    width: usize,
    height: usize,
    data: Vec<u8>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GrayImage {
    width: usize,
    height: usize,
    data: Vec<u8>,
}

fn check_len(width: usize, height: usize, channels: usize, len: usize) -> Result<()> {
    if width == 0 || height == 0 {
        return Err(Error::Dimensions("width and height must be at least 1"));
    }
    if width
        .checked_mul(height)
        .and_then(|n| n.checked_mul(channels))
        != Some(len)
    {
        return Err(Error::Dimensions(
            "data length does not match width x height",
        ));
    }
    Ok(())
}

impl ImageRgb {
    pub fn new(width: usize, height: usize, data: Vec<u8>) -> Result<Self> {
        check_len(width, height, 3, data.len())?;
        Ok(Self {
            width,
            height,
            data,
        })
    }

    pub fn filled(width: usize, height: usize, rgb: [u8; 3]) -> Result<Self> {
        let data = rgb
            .iter()
            .copied()
            .cycle()
            .take(width * height * 3)
            .collect();
        Self::new(width, height, data)
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn data(&self) -> &[u8] {
        &self.data
    }

    pub fn pixel(&self, x: usize, y: usize) -> [u8; 3] {
        let i = (y * self.width + x) * 3;
        [self.data[i], self.data[i + 1], self.data[i + 2]]
    }

    pub fn set_pixel(&mut self, x: usize, y: usize, rgb: [u8; 3]) {
        let i = (y * self.width + x) * 3;
        self.data[i..i + 3].copy_from_slice(&rgb);
    }
}

impl ImageYCbCr {
    pub fn new(width: usize, height: usize, data: Vec<u8>) -> Result<Self> {
        check_len(width, height, 3, data.len())?;
        Ok(Self {
            width,
            height,
            data,
        })
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn data(&self) -> &[u8] {
        &self.data
    }

    /// `[Y, Cb, Cr]` at `(x, y)`.
    pub fn pixel(&self, x: usize, y: usize) -> [u8; 3] {
        let i = (y * self.width + x) * 3;
        [self.data[i], self.data[i + 1], self.data[i + 2]]
    }
}

impl GrayImage {
    pub fn new(width: usize, height: usize, data: Vec<u8>) -> Result<Self> {
        check_len(width, height, 1, data.len())?;
        Ok(Self {
            width,
            height,
            data,
        })
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn data(&self) -> &[u8] {
        &self.data
    }

    pub fn get(&self, x: usize, y: usize) -> u8 {
        self.data[y * self.width + x]
    }
}

/// Rounds half away from zero and clamps to a byte.
pub(crate) fn to_byte(v: f64) -> u8 {
    let r = libm::round(v);
    if r <= 0.0 {
        0
    } else if r >= 255.0 {
        255
    } else {
        r as u8
    }
}

/// Full-range BT.601 forward transform of one pixel.
pub fn rgb_to_ycbcr_pixel(rgb: [u8; 3]) -> [u8; 3] {
    let [r, g, b] = rgb.map(f64::from);
    let y = 0.299 * r + 0.587 * g + 0.114 * b;
    let cb = 128.0 - 0.168736 * r - 0.331264 * g + 0.5 * b;
    let cr = 128.0 + 0.5 * r - 0.418688 * g - 0.081312 * b;
    [to_byte(y), to_byte(cb), to_byte(cr)]
}

/// Full-range BT.601 inverse transform of one pixel.
pub fn ycbcr_to_rgb_pixel(ycc: [u8; 3]) -> [u8; 3] {
    let y = f64::from(ycc[0]);
    let cb = f64::from(ycc[1]) - 128.0;
    let cr = f64::from(ycc[2]) - 128.0;
    [
        to_byte(y + 1.402 * cr),
        to_byte(y - 0.344136 * cb - 0.714136 * cr),
        to_byte(y + 1.772 * cb),
    ]
}

pub fn rgb_to_ycbcr(img: &ImageRgb) -> ImageYCbCr {
    let mut data = Vec::with_capacity(img.data.len());
    for px in img.data.chunks_exact(3) {
        data.extend_from_slice(&rgb_to_ycbcr_pixel([px[0], px[1], px[2]]));
    }
    ImageYCbCr {
        width: img.width,
        height: img.height,
        data,
    }
}

/// Box mean over the `(2r+1)^2` neighborhood with edge clamping, per channel.
///
/// Sums are exact integers, so the result does not depend on summation
/// order. The mean is rounded half away from zero.
pub fn lowpass(img: &ImageRgb, radius: usize) -> ImageRgb {
    if radius == 0 {
        return img.clone();
    }
    let (w, h) = (img.width, img.height);
    let r = radius as isize;
    let clamp = |v: isize, n: usize| v.clamp(0, n as isize - 1) as usize;

    let mut rows = alloc::vec![0u32; w * h * 3];
    for y in 0..h {
        for x in 0..w {
            for c in 0..3 {
                let mut s = 0u32;
                for dx in -r..=r {
                    s += u32::from(img.data[(y * w + clamp(x as isize + dx, w)) * 3 + c]);
                }
                rows[(y * w + x) * 3 + c] = s;
            }
        }
    }

    let n = ((2 * radius + 1) * (2 * radius + 1)) as u64;
    let mut out = Vec::with_capacity(w * h * 3);
    for y in 0..h {
        for x in 0..w {
            for c in 0..3 {
                let mut s = 0u64;
                for dy in -r..=r {
                    s += u64::from(rows[(clamp(y as isize + dy, h) * w + x) * 3 + c]);
                }
                out.push(((s + n / 2) / n) as u8);
            }
        }
    }
    ImageRgb {
        width: w,
        height: h,
        data: out,
    }
}

/// Gray level = the BT.601 luma of each pixel.
pub fn to_gray(img: &ImageRgb) -> GrayImage {
    let data = img
        .data
        .chunks_exact(3)
        .map(|px| rgb_to_ycbcr_pixel([px[0], px[1], px[2]])[0])
        .collect();
    GrayImage {
        width: img.width,
        height: img.height,
        data,
    }
}

struct Header<'a> {
    magic: [u8; 2],
    width: usize,
    height: usize,
    payload: &'a [u8],
}

fn parse_header(bytes: &[u8]) -> Result<Header<'_>> {
    if bytes.len() < 2 || bytes[0] != b'P' || !(bytes[1] == b'5' || bytes[1] == b'6') {
        return Err(Error::Decode {
            field: "magic",
            reason: "expected P5 or P6",
        });
    }
    let mut pos = 2;
    let mut fields = [0usize; 3];
    let names = ["width", "height", "maxval"];
    for (slot, name) in fields.iter_mut().zip(names) {
        // whitespace and comments before each field
        loop {
            match bytes.get(pos) {
                Some(b) if b.is_ascii_whitespace() => pos += 1,
                Some(b'#') => {
                    while bytes.get(pos).is_some_and(|&b| b != b'\n') {
                        pos += 1;
                    }
                }
                Some(_) => break,
                None => {
                    return Err(Error::Decode {
                        field: name,
                        reason: "missing",
                    })
                }
            }
        }
        let start = pos;
        while bytes.get(pos).is_some_and(u8::is_ascii_digit) {
            pos += 1;
        }
        if start == pos {
            return Err(Error::Decode {
                field: name,
                reason: "not a decimal number",
            });
        }
        let text = core::str::from_utf8(&bytes[start..pos]).map_err(|_| Error::Decode {
            field: name,
            reason: "not a decimal number",
        })?;
        *slot = text.parse().map_err(|_| Error::Decode {
            field: name,
            reason: "out of range",
        })?;
    }
    match bytes.get(pos) {
        Some(b) if b.is_ascii_whitespace() => pos += 1,
        _ => {
            return Err(Error::Decode {
                field: "maxval",
                reason: "missing whitespace before payload",
            })
        }
    }
    let [width, height, maxval] = fields;
    if width == 0 {
        return Err(Error::Decode {
            field: "width",
            reason: "must be at least 1",
        });
    }
    if height == 0 {
        return Err(Error::Decode {
            field: "height",
            reason: "must be at least 1",
        });
    }
    if maxval != 255 {
        return Err(Error::Decode {
            field: "maxval",
            reason: "only 255 is supported",
        });
    }
    Ok(Header {
        magic: [bytes[0], bytes[1]],
        width,
        height,
        payload: &bytes[pos..],
    })
}

fn payload<'a>(header: &Header<'a>, channels: usize) -> Result<&'a [u8]> {
    let expected = header
        .width
        .checked_mul(header.height)
        .and_then(|n| n.checked_mul(channels))
        .ok_or(Error::Decode {
            field: "width",
            reason: "image too large",
        })?;
    if header.payload.len() < expected {
        return Err(Error::Truncated {
            expected,
            found: header.payload.len(),
        });
    }
    Ok(&header.payload[..expected])
}

/// Decodes binary PPM (P6) or PGM (P5, promoted to gray RGB) with maxval 255.
pub fn load_image(bytes: &[u8]) -> Result<ImageRgb> {
    let header = parse_header(bytes)?;
    let data = if header.magic[1] == b'6' {
        payload(&header, 3)?.to_vec()
    } else {
        payload(&header, 1)?
            .iter()
            .flat_map(|&v| [v, v, v])
            .collect()
    };
    ImageRgb::new(header.width, header.height, data)
}

/// Decodes a binary PGM (P5) as a gray image.
pub fn load_gray(bytes: &[u8]) -> Result<GrayImage> {
    let header = parse_header(bytes)?;
    if header.magic[1] != b'5' {
        return Err(Error::Decode {
            field: "magic",
            reason: "expected P5",
        });
    }
    GrayImage::new(header.width, header.height, payload(&header, 1)?.to_vec())
}

pub fn encode_ppm(img: &ImageRgb) -> Vec<u8> {
    let mut out = format!("P6\n{} {}\n255\n", img.width, img.height).into_bytes();
    out.extend_from_slice(&img.data);
    out
}

pub fn encode_pgm(img: &GrayImage) -> Vec<u8> {
    let mut out = format!("P5\n{} {}\n255\n", img.width, img.height).into_bytes();
    out.extend_from_slice(&img.data);
    out
}
