//! Residual of the space-time weak formulation against divergence-free
//! test functions.
//!
//! A test function is `phi(x, t) = a w(t) sin(k.x)` with `k.a = 0`, so
//! `div phi = 0` identically. The measured quantity is
//!
//! ```text
//! integral over (0,T) x Q of (v . dphi/dt + (v (x) v) : grad phi)
//!   + integral over Q of v0 . phi(., 0)
//! ```
//!
//! which vanishes for exact weak solutions. Space integrals are grid
//! means (exact for band-limited integrands below the aliasing limit);
//! the time integral is composite Simpson on the window's support, with
//! `dphi/dt` and `grad phi` evaluated analytically.

use crate::error::{CoreError, Result};
use crate::field::{FourierVectorField, PhysicalVectorField};
use crate::grid::sample_coords;
use crate::subsolution::evolve_fractional_heat;
use crate::transform::inverse_transform;

/// Shape of the temporal window on `[0, T]`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum WindowShape {
    /// `(1 - (2t/T - 1)^2)^p`: vanishes at both ends of the support.
    Interior,
    /// `(1 - (t/T)^2)^p`: equals one at `t = 0`, vanishes at `T`; puts
    /// weight on the initial-data term.
    Initial,
}

/// Polynomial window, `C^{p-1}` at the endpoints of its support.
#[derive(Debug, Clone, Copy)]
pub struct TimeWindow {
    pub horizon: f64,
    pub power: u32,
    pub shape: WindowShape,
}

impl TimeWindow {
    /// The default window: an interior bump with `p = 3` (twice
    /// continuously differentiable).
    pub fn interior(horizon: f64) -> Self {
        Self { horizon, power: 3, shape: WindowShape::Interior }
    }

    pub fn initial(horizon: f64) -> Self {
        Self { horizon, power: 3, shape: WindowShape::Initial }
    }

    fn s(&self, t: f64) -> f64 {
        match self.shape {
            WindowShape::Interior => 2.0 * t / self.horizon - 1.0,
            WindowShape::Initial => t / self.horizon,
        }
    }

    fn ds_dt(&self) -> f64 {
        match self.shape {
            WindowShape::Interior => 2.0 / self.horizon,
            WindowShape::Initial => 1.0 / self.horizon,
        }
    }

    pub fn value(&self, t: f64) -> f64 {
        if t < 0.0 || t > self.horizon {
            return 0.0;
        }
        let s = self.s(t);
        (1.0 - s * s).max(0.0).powi(self.power as i32)
    }

    pub fn derivative(&self, t: f64) -> f64 {
        if t < 0.0 || t > self.horizon {
            return 0.0;
        }
        let s = self.s(t);
        let base = (1.0 - s * s).max(0.0);
        -(self.power as f64) * base.powi(self.power as i32 - 1) * 2.0 * s * self.ds_dt()
    }
}

/// One divergence-free space-time test function.
#[derive(Debug, Clone)]
pub struct TestFunction {
    mode: Vec<i64>,
    polarization: Vec<f64>,
    window: TimeWindow,
}

impl TestFunction {
    /// Requires `k` nonzero and `k.a` exactly zero.
    pub fn new(mode: Vec<i64>, polarization: Vec<f64>, window: TimeWindow) -> Result<Self> {
        if mode.len() != polarization.len() {
            return Err(CoreError::InvalidTestFunction {
                reason: format!(
                    "wavenumber has {} components, polarization {}",
                    mode.len(),
                    polarization.len()
                ),
            });
        }
        if mode.iter().all(|&k| k == 0) {
            return Err(CoreError::InvalidTestFunction {
                reason: "wavenumber must be nonzero".into(),
            });
        }
        let dot: f64 = mode
            .iter()
            .zip(&polarization)
            .map(|(&k, &a)| k as f64 * a)
            .sum();
        if dot != 0.0 {
            return Err(CoreError::PolarizationNotOrthogonal {
                k: mode,
                a: polarization,
                dot,
            });
        }
        if window.horizon <= 0.0 || window.power < 2 {
            return Err(CoreError::InvalidTestFunction {
                reason: "window needs a positive horizon and power >= 2".into(),
            });
        }
        Ok(Self { mode, polarization, window })
    }

    pub fn dim(&self) -> usize {
        self.mode.len()
    }

    pub fn window(&self) -> &TimeWindow {
        &self.window
    }
}

/// A velocity field indexed by time, sampled on a fixed physical grid.
pub trait CandidateFlow {
    fn dim(&self) -> usize;
    fn n_phys(&self) -> usize;
    fn velocity_at(&self, t: f64) -> Result<PhysicalVectorField>;
}

/// A time-independent candidate.
pub struct SteadyFlow(pub PhysicalVectorField);

impl CandidateFlow for SteadyFlow {
    fn dim(&self) -> usize {
        self.0.d
    }
    fn n_phys(&self) -> usize {
        self.0.n_phys
    }
    fn velocity_at(&self, _t: f64) -> Result<PhysicalVectorField> {
        Ok(self.0.clone())
    }
}

/// The zero candidate.
pub struct ZeroFlow {
    pub d: usize,
    pub n_phys: usize,
}

impl CandidateFlow for ZeroFlow {
    fn dim(&self) -> usize {
        self.d
    }
    fn n_phys(&self) -> usize {
        self.n_phys
    }
    fn velocity_at(&self, _t: f64) -> Result<PhysicalVectorField> {
        Ok(PhysicalVectorField::zeros(self.d, self.n_phys))
    }
}

/// The evolved velocity of the construction, sampled per time. It
/// solves the linear balance with its stress, not the quadratic one,
/// so its weak residual stays bounded away from zero for generic data.
pub struct SubsolutionFlow {
    v0: FourierVectorField,
}

impl SubsolutionFlow {
    pub fn new(v0: FourierVectorField) -> Self {
        Self { v0 }
    }
}

impl CandidateFlow for SubsolutionFlow {
    fn dim(&self) -> usize {
        self.v0.dim()
    }
    fn n_phys(&self) -> usize {
        self.v0.grid().modes_per_axis()
    }
    fn velocity_at(&self, t: f64) -> Result<PhysicalVectorField> {
        inverse_transform(&evolve_fractional_heat(&self.v0, t)?)
    }
}

/// Evaluate the weak-form functional with `steps` Simpson intervals
/// (rounded up to even) over the window's support.
pub fn weak_form_residual(
    candidate: &dyn CandidateFlow,
    v0: &PhysicalVectorField,
    phi: &TestFunction,
    steps: usize,
) -> Result<f64> {
    let d = phi.dim();
    if candidate.dim() != d || v0.d != d || candidate.n_phys() != v0.n_phys {
        return Err(CoreError::SampleShape { expected: v0.data.len(), got: 0 });
    }
    let n_phys = v0.n_phys;
    let num = v0.num_points();
    // sin(k.x) and cos(k.x) per grid point.
    let mut sin_kx = vec![0.0; num];
    let mut cos_kx = vec![0.0; num];
    let mut x = vec![0.0; d];
    for p in 0..num {
        sample_coords(p, n_phys, &mut x);
        let kx: f64 = phi
            .mode
            .iter()
            .zip(&x)
            .map(|(&k, &xi)| k as f64 * xi)
            .sum();
        sin_kx[p] = kx.sin();
        cos_kx[p] = kx.cos();
    }
    let a = &phi.polarization;
    let kvec: Vec<f64> = phi.mode.iter().map(|&k| k as f64).collect();
    // Space integrals at a fixed time.
    let space_terms = |v: &PhysicalVectorField| -> (f64, f64) {
        let mut advect = 0.0;
        let mut transport = 0.0;
        for p in 0..num {
            let vv = v.value(p);
            let av: f64 = a.iter().zip(vv).map(|(ai, vi)| ai * vi).sum();
            let kv: f64 = kvec.iter().zip(vv).map(|(ki, vi)| ki * vi).sum();
            advect += av * sin_kx[p];
            transport += av * kv * cos_kx[p];
        }
        (advect / num as f64, transport / num as f64)
    };
    let intervals = steps.max(2) + steps % 2;
    let h = phi.window.horizon / intervals as f64;
    let mut time_integral = 0.0;
    for i in 0..=intervals {
        let t = i as f64 * h;
        let weight = if i == 0 || i == intervals {
            1.0
        } else if i % 2 == 1 {
            4.0
        } else {
            2.0
        };
        let v = candidate.velocity_at(t)?;
        if v.d != d || v.n_phys != n_phys {
            return Err(CoreError::SampleShape { expected: num * d, got: v.data.len() });
        }
        let (advect, transport) = space_terms(&v);
        let integrand = phi.window.derivative(t) * advect + phi.window.value(t) * transport;
        time_integral += weight * integrand;
    }
    time_integral *= h / 3.0;
    let (advect0, _) = space_terms(v0);
    let data_term = phi.window.value(0.0) * advect0;
    Ok((time_integral + data_term).abs())
}

/// Residuals over a ladder of Simpson refinements.
pub fn weak_form_refinement(
    candidate: &dyn CandidateFlow,
    v0: &PhysicalVectorField,
    phi: &TestFunction,
    levels: &[usize],
) -> Result<Vec<(usize, f64)>> {
    levels
        .iter()
        .map(|&steps| weak_form_residual(candidate, v0, phi, steps).map(|r| (steps, r)))
        .collect()
}

/// Convergence orders `log2(r_i / r_{i+1})` between successive levels
/// of a step-doubling refinement.
pub fn observed_orders(residuals: &[(usize, f64)]) -> Vec<f64> {
    residuals
        .windows(2)
        .map(|w| (w[0].1 / w[1].1).log2())
        .collect()
}
