//! File formats, parallel dataset generation, the synthetic benchmark and the
//! `handdigit` command line on top of `handdigit-core`.

pub mod bench;
pub mod cli;
pub mod dataset;
pub mod error;
pub mod formats;

pub use error::{AppError, Result};
