//! Recognition of hand-signed digits (1 to 9) from single-person color images.
//!
//! The pipeline runs skin segmentation in YCbCr space (crisp box or a
//! zero-order Takagi-Sugeno refinement), separates hands from the face,
//! turns the hand upright, strips palm and wrist using anthropometric palm
//! proportions, and projects the remaining finger pixels onto the x axis.
//! Peaks of that projection form a 17-slot feature vector that a decision
//! tree (ID3, C4.5 or C4.5 with degree-beta entropy) maps to a digit.
//!
//! The crate is `no_std` and only needs `alloc`. File IO, serialization
//! formats and the command line live in the `handdigit` crate.
#![no_std]

extern crate alloc;

#[cfg(test)]
extern crate std;

mod error;
mod math;

pub mod edge;
pub mod features;
pub mod fingers;
pub mod geometry;
pub mod handloc;
pub mod image;
pub mod learner;
pub mod mask;
pub mod pipeline;
pub mod skin;
pub mod synth;

pub use error::{Error, Result};
pub use image::{GrayImage, ImageRgb, ImageYCbCr};
pub use mask::BinaryMask;
