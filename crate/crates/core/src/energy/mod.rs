//! The generalized energy kernel `e(v, u) = (d/2) lambda_max(v (x) v - u)`,
//! its equality-case stress, kinetic energy, and the admissible energy
//! profile built from a snapshot.
//!
//! The kernel is convex, non-negative, and bounded below by `|v|^2 / 2`,
//! with equality exactly at `u = v (x) v - (|v|^2/d) I`. Pointwise values
//! on grids are always computed in physical space; nothing here forms
//! spectral products.

mod eig;

pub use eig::{lambda_max, lambda_max_jacobi};

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha12Rng;
use rand_distr::StandardNormal;

use crate::error::{CoreError, Result};
use crate::field::{FourierVectorField, PhysicalTensorField, PhysicalVectorField};
use crate::subsolution::SubsolutionSnapshot;
use crate::transform::{inverse_tensor_oversampled, inverse_transform_oversampled};

/// A pointwise argument pair: velocity value and symmetric trace-free
/// stress value at one point.
#[derive(Debug, Clone)]
pub struct PointState {
    v: Vec<f64>,
    /// Row-major `d x d`.
    u: Vec<f64>,
}

impl PointState {
    /// Validate symmetry (`1e-14` relative) and tracelessness
    /// (`1e-14 * |u|_F`) before accepting the pair.
    pub fn new(v: Vec<f64>, u: Vec<f64>) -> Result<Self> {
        let d = v.len();
        if u.len() != d * d {
            return Err(CoreError::InvalidPointState {
                reason: format!("stress has {} entries, expected {}", u.len(), d * d),
            });
        }
        let frob = u.iter().map(|x| x * x).sum::<f64>().sqrt();
        let mut asym = 0.0f64;
        for i in 0..d {
            for j in (i + 1)..d {
                asym = asym.max((u[i * d + j] - u[j * d + i]).abs());
            }
        }
        if asym > 1e-14 * frob.max(f64::MIN_POSITIVE) {
            return Err(CoreError::InvalidPointState {
                reason: format!("stress asymmetry {asym:.3e} exceeds 1e-14 relative"),
            });
        }
        let trace: f64 = (0..d).map(|i| u[i * d + i]).sum();
        if trace.abs() > 1e-14 * frob.max(f64::MIN_POSITIVE) {
            return Err(CoreError::InvalidPointState {
                reason: format!("stress trace {trace:.3e} exceeds 1e-14 relative"),
            });
        }
        Ok(Self { v, u })
    }

    pub fn dim(&self) -> usize {
        self.v.len()
    }

    pub fn velocity(&self) -> &[f64] {
        &self.v
    }

    pub fn stress(&self) -> &[f64] {
        &self.u
    }
}

/// `e(v, u) = (d/2) lambda_max(v (x) v - u)` for a validated state.
pub fn generalized_energy(state: &PointState) -> Result<f64> {
    Ok(energy_at(&state.v, &state.u))
}

/// Kernel evaluation on raw slices; `u` must be symmetric `d x d`.
/// This is the single evaluation path used for grid sweeps.
pub fn energy_at(v: &[f64], u: &[f64]) -> f64 {
    let d = v.len();
    let mut a = vec![0.0; d * d];
    fill_energy_matrix(v, u, &mut a);
    0.5 * d as f64 * eig::lambda_max_unchecked(&a, d)
}

fn fill_energy_matrix(v: &[f64], u: &[f64], a: &mut [f64]) {
    let d = v.len();
    for i in 0..d {
        for j in 0..d {
            a[i * d + j] = v[i] * v[j] - u[i * d + j];
        }
    }
}

/// The stress attaining the lower bound: `v (x) v - (|v|^2 / d) I`,
/// symmetric with exactly zero trace.
pub fn equality_stress(v: &[f64]) -> Vec<f64> {
    let d = v.len();
    let vsq: f64 = v.iter().map(|x| x * x).sum();
    let mut u = vec![0.0; d * d];
    for i in 0..d {
        for j in 0..d {
            u[i * d + j] = v[i] * v[j];
        }
        u[i * d + i] -= vsq / d as f64;
    }
    u
}

/// Kinetic energy `(1/2) sum_k |vhat(k)|^2`, i.e. half the normalized
/// integral of `|v|^2`.
pub fn kinetic_energy(field: &FourierVectorField) -> f64 {
    0.5 * field.l2_norm_sq()
}

/// Pointwise upper bound `(d/2) (|v|^2 + |u|_F)`, always at least the
/// generalized energy of the same state.
pub fn pointwise_energy_bound(state: &PointState) -> f64 {
    let d = state.dim() as f64;
    let vsq: f64 = state.v.iter().map(|x| x * x).sum();
    let frob = state.u.iter().map(|x| x * x).sum::<f64>().sqrt();
    0.5 * d * (vsq + frob)
}

/// The additive margin `min{t, 1/t}` of the admissible profile: zero at
/// `t = 0`, maximal (one) at `t = 1`.
pub fn bump(t: f64) -> f64 {
    if t <= 0.0 {
        0.0
    } else {
        t.min(1.0 / t)
    }
}

/// Samples of the generalized energy plus the additive margin at a
/// fixed time.
#[derive(Debug, Clone)]
pub struct EnergyProfile {
    t: f64,
    bump: f64,
    oversample: usize,
    /// Pointwise `e(vbar(x), ubar(x))` on the (oversampled) grid.
    base: Vec<f64>,
    n_phys: usize,
    d: usize,
}

impl EnergyProfile {
    pub fn t(&self) -> f64 {
        self.t
    }

    pub fn bump(&self) -> f64 {
        self.bump
    }

    pub fn oversample(&self) -> usize {
        self.oversample
    }

    pub fn base(&self) -> &[f64] {
        &self.base
    }

    pub fn n_phys(&self) -> usize {
        self.n_phys
    }

    pub fn dim(&self) -> usize {
        self.d
    }

    /// Normalized integral of the base samples over `Q`.
    pub fn mean_base(&self) -> f64 {
        self.base.iter().sum::<f64>() / self.base.len() as f64
    }

    /// Normalized integral of the whole profile, base plus margin.
    pub fn mean_total(&self) -> f64 {
        self.mean_base() + self.bump
    }
}

/// Evaluate `e(vbar, ubar)` pointwise on the physical grid refined by
/// `oversample` and attach the margin `min{t, 1/t}`.
pub fn energy_profile(snapshot: &SubsolutionSnapshot, oversample: usize) -> Result<EnergyProfile> {
    let os = oversample.max(1);
    let v = inverse_transform_oversampled(snapshot.vbar(), os)?;
    let u = inverse_tensor_oversampled(snapshot.ubar(), os)?;
    let base = pointwise_energy_samples(&v, &u)?;
    Ok(EnergyProfile {
        t: snapshot.t(),
        bump: bump(snapshot.t()),
        oversample: os,
        n_phys: v.n_phys,
        d: v.d,
        base,
    })
}

/// Generalized energy at every grid point of a matching sample pair.
pub fn pointwise_energy_samples(
    v: &PhysicalVectorField,
    u: &PhysicalTensorField,
) -> Result<Vec<f64>> {
    if v.d != u.d || v.n_phys != u.n_phys {
        return Err(CoreError::SampleShape { expected: v.data.len() * v.d, got: u.data.len() });
    }
    let d = v.d;
    let num = v.num_points();
    let mut a = vec![0.0; d * d];
    let out = (0..num)
        .map(|p| {
            fill_energy_matrix(v.value(p), u.value(p), &mut a);
            0.5 * d as f64 * eig::lambda_max_unchecked(&a, d)
        })
        .collect();
    Ok(out)
}

/// The rescaled kernel `phi(v, u) = e(v / sqrt(|v|), u)`, extended by
/// continuity to `phi(0, u) = e(0, u)`. Positively 1-homogeneous.
pub fn scaled_generalized_energy(v: &[f64], u: &[f64]) -> f64 {
    let norm = v.iter().map(|x| x * x).sum::<f64>().sqrt();
    if norm == 0.0 {
        return energy_at(v, u);
    }
    let scaled: Vec<f64> = v.iter().map(|x| x / norm.sqrt()).collect();
    energy_at(&scaled, u)
}

/// Empirical Lipschitz constant of the rescaled kernel with respect to
/// `|v1 - v2| + |u1 - u2|_F`: the supremum of difference quotients over
/// `pairs` pseudorandom state pairs (half independent draws, half close
/// perturbations), reproducible per seed. Callers wanting headroom
/// should inflate the returned value.
pub fn estimate_scaled_lipschitz(d: usize, pairs: usize, seed: u64) -> f64 {
    let mut rng = ChaCha12Rng::seed_from_u64(seed);
    let mut sup = 0.0f64;
    for trial in 0..pairs {
        let (v1, u1) = random_state(d, &mut rng);
        let (v2, u2) = if trial % 2 == 0 {
            random_state(d, &mut rng)
        } else {
            perturbed_state(&v1, &u1, 1e-3, &mut rng)
        };
        let dv: f64 = v1
            .iter()
            .zip(&v2)
            .map(|(a, b)| (a - b) * (a - b))
            .sum::<f64>()
            .sqrt();
        let du: f64 = u1
            .iter()
            .zip(&u2)
            .map(|(a, b)| (a - b) * (a - b))
            .sum::<f64>()
            .sqrt();
        let denom = dv + du;
        if denom < 1e-12 {
            continue;
        }
        let num = (scaled_generalized_energy(&v1, &u1) - scaled_generalized_energy(&v2, &u2)).abs();
        sup = sup.max(num / denom);
    }
    sup
}

/// Gaussian velocity and symmetric trace-free Gaussian stress.
pub(crate) fn random_state(d: usize, rng: &mut ChaCha12Rng) -> (Vec<f64>, Vec<f64>) {
    let v: Vec<f64> = (0..d).map(|_| rng.sample(StandardNormal)).collect();
    let mut u = vec![0.0; d * d];
    for i in 0..d {
        for j in i..d {
            let g: f64 = rng.sample(StandardNormal);
            u[i * d + j] = g;
            u[j * d + i] = g;
        }
    }
    let trace: f64 = (0..d).map(|i| u[i * d + i]).sum();
    for i in 0..d {
        u[i * d + i] -= trace / d as f64;
    }
    (v, u)
}

fn perturbed_state(
    v: &[f64],
    u: &[f64],
    scale: f64,
    rng: &mut ChaCha12Rng,
) -> (Vec<f64>, Vec<f64>) {
    let d = v.len();
    let (dv, du) = random_state(d, rng);
    let v2: Vec<f64> = v.iter().zip(&dv).map(|(a, b)| a + scale * b).collect();
    let u2: Vec<f64> = u.iter().zip(&du).map(|(a, b)| a + scale * b).collect();
    (v2, u2)
}
