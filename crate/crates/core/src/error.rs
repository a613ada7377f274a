//! Error type shared by every module.

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    #[error("exponent {exponent} exceeds the representable range (limit 700)")]
    ExponentOverflow { exponent: f64 },

    #[error("sample set is empty")]
    EmptySample,

    #[error("sample value at index {index} is not finite")]
    NonFiniteSample { index: usize },

    #[error("block length {block_len} is invalid for n = {n} (need 2 < block length <= n)")]
    BlockLength { block_len: usize, n: usize },

    #[error("frequency {t} is not on the lattice base*sqrt(k) with base {base}")]
    OffLattice { t: f64, base: f64 },

    #[error("Toeplitz input must start with 1, got {z0_re}+{z0_im}i")]
    ToeplitzLeading { z0_re: f64, z0_im: f64 },

    #[error("degenerate estimate: {0}")]
    Degenerate(String),

    #[error("too few samples: {0}")]
    InsufficientSamples(String),

    #[error("calibration infeasible: {0}")]
    Infeasible(String),

    #[error("configuration error: {0}")]
    Config(String),

    #[error("i/o error: {0}")]
    Io(String),
}

impl Error {
    pub(crate) fn invalid(name: &'static str, reason: impl Into<String>) -> Self {
        Error::InvalidParameter {
            name,
            reason: reason.into(),
        }
    }
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

impl From<serde_json::Error> for Error {
    fn from(e: serde_json::Error) -> Self {
        Error::Config(e.to_string())
    }
}
