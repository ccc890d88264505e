//! Closed-form relaxed flow built from divergence-free initial data.
//!
//! The velocity evolves by exact per-mode exponential damping,
//! `vhat(k, t) = e^{-|k| t} vhat_0(k)` (the half-Laplacian heat
//! semigroup), and the stress is assembled from Riesz transforms,
//! `uhat_ij(k) = -i (k_j vhat_i + k_i vhat_j) / |k|`, `uhat(0) = 0`.
//! For divergence-free input the stress is symmetric and trace-free by
//! construction, and the pair solves the linear momentum balance with
//! zero pressure. No time-stepping is involved anywhere; time enters
//! only through the multiplier.

use num_complex::Complex64;

use crate::error::{CoreError, Result};
use crate::field::{FourierTensorField, FourierVectorField};
use crate::tolerances as tol;

/// `e^{-x}` flushed to exact zero past the double-precision underflow
/// threshold, to keep long-time evaluation out of denormal territory.
const UNDERFLOW_EXPONENT: f64 = 745.0;

fn damping(kmag: f64, t: f64) -> f64 {
    let x = kmag * t;
    if x > UNDERFLOW_EXPONENT {
        0.0
    } else {
        (-x).exp()
    }
}

/// The triple `(vbar, ubar, qbar = 0)` frozen at one time `t > 0`.
#[derive(Debug, Clone)]
pub struct SubsolutionSnapshot {
    t: f64,
    vbar: FourierVectorField,
    ubar: FourierTensorField,
}

impl SubsolutionSnapshot {
    pub fn t(&self) -> f64 {
        self.t
    }

    pub fn vbar(&self) -> &FourierVectorField {
        &self.vbar
    }

    pub fn ubar(&self) -> &FourierTensorField {
        &self.ubar
    }

    /// The pressure of the construction, identically zero.
    pub fn qbar(&self) -> f64 {
        0.0
    }

    /// Assemble a snapshot from parts that were produced elsewhere.
    /// Used by the verifier to examine deliberately damaged stresses.
    pub fn from_parts(t: f64, vbar: FourierVectorField, ubar: FourierTensorField) -> Result<Self> {
        vbar.grid().expect_same(ubar.grid())?;
        if t <= 0.0 {
            return Err(CoreError::NonPositiveTime { t });
        }
        Ok(Self { t, vbar, ubar })
    }
}

/// Damp every mode by `e^{-|k| t}`. Rejects `t < 0` (semigroup, not
/// group); `t = 0` returns the input unchanged. Divergence-free input
/// stays divergence-free because each mode is scaled by a real factor.
pub fn evolve_fractional_heat(v0: &FourierVectorField, t: f64) -> Result<FourierVectorField> {
    if t < 0.0 {
        return Err(CoreError::NegativeTime { t });
    }
    if t == 0.0 {
        return Ok(v0.clone());
    }
    let grid = v0.grid().clone();
    Ok(v0.scale_per_mode(move |flat| damping(grid.kmag(flat), t)))
}

/// Analytic time derivative of the evolved velocity:
/// `-|k| e^{-|k| t} vhat_0(k)` per mode, valid for `t > 0`.
pub fn time_derivative(v0: &FourierVectorField, t: f64) -> Result<FourierVectorField> {
    if t <= 0.0 {
        return Err(CoreError::NonPositiveTime { t });
    }
    let grid = v0.grid().clone();
    Ok(v0.scale_per_mode(move |flat| {
        let kmag = grid.kmag(flat);
        -kmag * damping(kmag, t)
    }))
}

/// Stress coefficients from a divergence-free velocity. The input is
/// validated first: without `k . vhat = 0` the trace-free guarantee
/// would silently fail.
pub fn stress_from_velocity(vbar: &FourierVectorField) -> Result<FourierTensorField> {
    vbar.validate_solenoidal(tol::SOLENOIDAL)?;
    Ok(stress_from_velocity_raw(vbar))
}

/// Same multiplier formula without the divergence validation. The
/// verifier uses this to report (rather than mask) the trace defect of
/// stresses built from bad input.
pub(crate) fn stress_from_velocity_raw(vbar: &FourierVectorField) -> FourierTensorField {
    let grid = vbar.grid().clone();
    let d = grid.dim();
    let num = grid.num_modes();
    let mut coeffs = vec![Complex64::default(); num * d * d];
    let mut v = vec![Complex64::default(); d];
    for (flat, k) in grid.modes() {
        let mag = grid.kmag(flat);
        if mag == 0.0 {
            continue;
        }
        vbar.coeff_vector(flat, &mut v);
        for i in 0..d {
            for j in 0..d {
                let sum = v[i] * (k[j] as f64 / mag) + v[j] * (k[i] as f64 / mag);
                // -i * sum
                coeffs[(i * d + j) * num + flat] = Complex64::new(sum.im, -sum.re);
            }
        }
    }
    FourierTensorField::from_coeffs(grid, coeffs)
}

/// Evolve, build the stress, and freeze the triple at `t > 0`.
pub fn make_snapshot(v0: &FourierVectorField, t: f64) -> Result<SubsolutionSnapshot> {
    if t <= 0.0 {
        return Err(CoreError::NonPositiveTime { t });
    }
    let vbar = evolve_fractional_heat(v0, t)?;
    let ubar = stress_from_velocity(&vbar)?;
    Ok(SubsolutionSnapshot { t, vbar, ubar })
}

/// The `t -> 0` limits of the construction: the initial velocity itself
/// and the stress assembled directly from it.
pub fn limit_data(v0: &FourierVectorField) -> Result<(FourierVectorField, FourierTensorField)> {
    let u0 = stress_from_velocity(v0)?;
    Ok((v0.clone(), u0))
}
