use thiserror::Error;

/// Errors surfaced by the library.
#[derive(Debug, Error)]
pub enum Error {
    #[error("parse error: {0}")]
    Parse(String),

    #[error("invalid complex: {0}")]
    Validation(String),

    #[error("flip map required")]
    FlipMissing,

    #[error("surgery coefficient n = 0 has no lens-space correction term")]
    ZeroSurgeryCoefficient,

    #[error("Spin^c class {i} is not a residue mod {n}")]
    SpincOutOfRange { i: i64, n: i64 },

    #[error("Spin^c index {s} outside the truncation window [{lo}, {hi}]")]
    OutsideWindow { s: i64, lo: i64, hi: i64 },

    #[error("chain map degree mismatch")]
    DegreeMismatch,

    #[error("no stabilization below the delta cap {cap}")]
    Stabilization { cap: u32 },

    #[error("staircase step vector must be palindromic")]
    NonPalindromicSteps,

    #[error("{0}")]
    Usage(String),
}
