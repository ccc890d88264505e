//! Error type shared across the crate.

use thiserror::Error;

/// Convenience alias used throughout the crate.
pub type Result<T> = std::result::Result<T, CoreError>;

/// Everything that can go wrong when building or checking spectral fields.
#[derive(Debug, Error)]
pub enum CoreError {
    #[error("invalid grid: dimension {d} and modes-per-axis {n} (need d >= 2, n >= 4 and even)")]
    InvalidGrid { d: usize, n: usize },

    #[error("grid mismatch: expected d={expected_d}, n={expected_n}, got d={got_d}, n={got_n}")]
    GridMismatch {
        expected_d: usize,
        expected_n: usize,
        got_d: usize,
        got_n: usize,
    },

    #[error("sample buffer has length {got}, grid wants {expected}")]
    SampleShape { expected: usize, got: usize },

    #[error("conjugate symmetry violated at wavenumber {k:?}: mismatch {magnitude:.3e} exceeds tolerance {tolerance:.3e}")]
    HermitianViolation {
        k: Vec<i64>,
        magnitude: f64,
        tolerance: f64,
    },

    #[error("field is not divergence-free: |k.vhat| = {magnitude:.3e} at wavenumber {k:?} (tolerance {tolerance:.3e})")]
    NotSolenoidal {
        k: Vec<i64>,
        magnitude: f64,
        tolerance: f64,
    },

    #[error("negative time {t} rejected: the evolution is a semigroup, not a group")]
    NegativeTime { t: f64 },

    #[error("time {t} rejected: snapshots exist for t > 0 only (use the limit data at t = 0)")]
    NonPositiveTime { t: f64 },

    #[error("matrix is not symmetric: |m - m^T| = {magnitude:.3e} exceeds tolerance {tolerance:.3e}")]
    AsymmetricMatrix { magnitude: f64, tolerance: f64 },

    #[error("point state invalid: {reason}")]
    InvalidPointState { reason: String },

    #[error("invalid time grid: {reason}")]
    InvalidTimes { reason: String },

    #[error("axis {axis} out of range for dimension {d}")]
    AxisOutOfRange { axis: usize, d: usize },

    #[error("test-function polarization {a:?} is not orthogonal to its wavenumber {k:?} (k.a = {dot})")]
    PolarizationNotOrthogonal { k: Vec<i64>, a: Vec<f64>, dot: f64 },

    #[error("test function invalid: {reason}")]
    InvalidTestFunction { reason: String },

    #[error("generator spec invalid: {reason}")]
    InvalidGenerator { reason: String },

    #[error("io: {0}")]
    Io(#[from] std::io::Error),

    #[error("not a field container (bad magic)")]
    BadMagic,

    #[error("unsupported field container version {found} (expected {expected})")]
    VersionMismatch { found: u32, expected: u32 },

    #[error("field container payload is {declared} bytes where grid (d={d}, n={n}) requires {required}")]
    HeaderPayloadMismatch { declared: u64, d: usize, n: usize, required: u64 },

    #[error("truncated field container: expected {expected} bytes after header, found {got}")]
    Truncated { expected: u64, got: u64 },

    #[error("field container normalization tag {found:?} does not match this library ({expected:?})")]
    NormalizationMismatch { found: String, expected: String },

    #[error("check {check} failed to run: {source}")]
    InCheck {
        check: &'static str,
        #[source]
        source: Box<CoreError>,
    },
}

impl CoreError {
    /// Tag an error with the verifier check it came from.
    pub(crate) fn in_check(self, check: &'static str) -> CoreError {
        CoreError::InCheck { check, source: Box::new(self) }
    }
}
