//! Spectral construction and certification of relaxed incompressible
//! flows on the periodic box `Q = [0, 2*pi]^d`.
//!
//! From divergence-free initial data the crate builds, in closed form
//! per Fourier mode, a velocity evolved by the half-Laplacian heat
//! semigroup together with the symmetric trace-free stress produced by
//! Riesz transforms, and numerically certifies the full hypothesis list
//! that makes the triple an admissible relaxation: the linear momentum
//! balance per mode, the range of the stress, a strict pointwise energy
//! margin, energy bounds, long-time decay, and continuity of the energy
//! density at the initial time.

pub mod energy;
pub mod error;
pub mod field;
pub mod fields_io;
pub mod grid;
pub mod subsolution;
pub mod tolerances;
pub mod transform;
pub mod verifier;

mod fft;

pub use error::{CoreError, Result};
pub use field::{
    riesz_apply, FourierTensorField, FourierVectorField, PhysicalTensorField, PhysicalVectorField,
};
pub use grid::SpectralGrid;
pub use subsolution::SubsolutionSnapshot;
pub use verifier::VerificationReport;
