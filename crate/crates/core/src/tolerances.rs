//! Central tolerance constants. Identities that hold exactly in exact
//! arithmetic get tight relative bounds; quadrature comparisons carry
//! discretization error and get looser ones.

/// Algebraic identities (per-mode residuals, transform roundtrips).
pub const ALGEBRAIC: f64 = 1e-12;

/// Spectral-sum vs. physical-quadrature comparisons.
pub const QUADRATURE: f64 = 1e-10;

/// Divergence-free validation, relative to the largest coefficient.
pub const SOLENOIDAL: f64 = 1e-14;

/// Trace and symmetry of constructed stress coefficients, relative to
/// the largest coefficient matrix.
pub const RANGE: f64 = 1e-13;

/// Off-diagonal mass at which the cyclic eigenvalue sweep stops,
/// relative to the Frobenius norm of the input.
pub const JACOBI_OFFDIAG: f64 = 1e-13;

/// Decade-decay factor for finite limit checks: the last element of a
/// two-decade sequence must be at most this times the first.
pub const DECADE_DECAY: f64 = 0.05;

/// Long-time decay factor: the profile integral at t = 100 must be at
/// most this times its value at t = 1.
pub const LONG_TIME_DECAY: f64 = 0.01;
