use thiserror::Error;

pub type Result<T, E = Error> = core::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("decode error in {field}: {reason}")]
    Decode {
        field: &'static str,
        reason: &'static str,
    },
    #[error("truncated payload: expected {expected} bytes, found {found}")]
    Truncated { expected: usize, found: usize },
    #[error("invalid parameter {name}: {reason}")]
    Parameter {
        name: &'static str,
        reason: &'static str,
    },
    #[error("dimension mismatch: {0}")]
    Dimensions(&'static str),
    #[error("empty input: {0}")]
    Empty(&'static str),
    #[error("degenerate geometry: {0}")]
    Degenerate(&'static str),
    #[error("ellipse fit failed: {0}")]
    Fit(&'static str),
    #[error("class {digit} has {count} samples, at least 2 are needed for a stratified split")]
    Stratification { digit: u8, count: usize },
    #[error("hand does not fit the {width}x{height} canvas")]
    Canvas { width: usize, height: usize },
}
