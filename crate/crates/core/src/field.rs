//! Fourier-side vector and tensor fields on the periodic box, plus the
//! multiplier operators (Leray projection, Riesz transforms) everything
//! else is built from.
//!
//! Coefficients are plain Fourier-series coefficients of the sampled
//! field, so the Parseval identity reads `sum_k |vhat(k)|^2 = mean over
//! Q of |v|^2`. All integrals over `Q` in this crate use that normalized
//! measure (`|Q| = 1`). Fields are immutable after construction; every
//! operation returns a fresh field.

use std::sync::Arc;

use num_complex::Complex64;

use crate::error::{CoreError, Result};
use crate::grid::SpectralGrid;
use crate::tolerances as tol;

/// Velocity-type field: one complex `d`-vector per lattice point.
///
/// Stored component-major: component `c` of mode `m` lives at
/// `coeffs[c * num_modes + m]`. The mean mode `k = 0` and all Nyquist
/// modes are forced to zero at construction, so the represented class is
/// mean-free and closed under negation of wavenumbers; Hermitian
/// symmetry (the Fourier-side form of a real field) is maintained by
/// the ordinary constructors and validated by the inverse transforms.
#[derive(Debug, Clone)]
pub struct FourierVectorField {
    grid: Arc<SpectralGrid>,
    coeffs: Vec<Complex64>,
    solenoidal: bool,
}

/// Stress-type field: one complex `d x d` matrix per lattice point,
/// entry `(i, j)` of mode `m` at `coeffs[(i*d + j) * num_modes + m]`.
#[derive(Debug, Clone)]
pub struct FourierTensorField {
    grid: Arc<SpectralGrid>,
    coeffs: Vec<Complex64>,
}

/// Real vector samples on a uniform cubic grid, point-major:
/// component `c` of sample `p` at `data[p*d + c]`.
#[derive(Debug, Clone)]
pub struct PhysicalVectorField {
    pub d: usize,
    /// Samples per axis (may exceed the spectral grid when oversampled).
    pub n_phys: usize,
    pub data: Vec<f64>,
}

/// Real matrix samples on a uniform cubic grid, point-major:
/// entry `(i, j)` of sample `p` at `data[p*d*d + i*d + j]`.
#[derive(Debug, Clone)]
pub struct PhysicalTensorField {
    pub d: usize,
    pub n_phys: usize,
    pub data: Vec<f64>,
}

impl PhysicalVectorField {
    pub fn zeros(d: usize, n_phys: usize) -> Self {
        Self { d, n_phys, data: vec![0.0; n_phys.pow(d as u32) * d] }
    }

    pub fn num_points(&self) -> usize {
        self.data.len() / self.d
    }

    pub fn value(&self, point: usize) -> &[f64] {
        &self.data[point * self.d..(point + 1) * self.d]
    }

    /// Mean over the grid of a pointwise functional; with the normalized
    /// measure this is the trapezoidal-rule integral over `Q`.
    pub fn mean_of(&self, f: impl Fn(&[f64]) -> f64) -> f64 {
        let num = self.num_points();
        self.data.chunks_exact(self.d).map(f).sum::<f64>() / num as f64
    }
}

impl PhysicalTensorField {
    pub fn num_points(&self) -> usize {
        self.data.len() / (self.d * self.d)
    }

    pub fn value(&self, point: usize) -> &[f64] {
        let dd = self.d * self.d;
        &self.data[point * dd..(point + 1) * dd]
    }

    pub fn mean_of(&self, f: impl Fn(&[f64]) -> f64) -> f64 {
        let dd = self.d * self.d;
        let num = self.num_points();
        self.data.chunks_exact(dd).map(f).sum::<f64>() / num as f64
    }
}

impl FourierVectorField {
    /// All-zero field (trivially solenoidal).
    pub fn zeros(grid: Arc<SpectralGrid>) -> Self {
        let len = grid.num_modes() * grid.dim();
        Self { grid, coeffs: vec![Complex64::default(); len], solenoidal: true }
    }

    /// Wrap raw component-major coefficients. Forces the mean and the
    /// Nyquist planes to zero, then validates the divergence to set the
    /// solenoidal flag.
    pub(crate) fn from_coeffs(grid: Arc<SpectralGrid>, mut coeffs: Vec<Complex64>) -> Self {
        debug_assert_eq!(coeffs.len(), grid.num_modes() * grid.dim());
        zero_forced_modes(&grid, &mut coeffs, grid.dim());
        let mut field = Self { grid, coeffs, solenoidal: false };
        field.solenoidal = field.solenoidal_defect().0 <= tol::SOLENOIDAL * field.max_coeff_norm();
        field
    }

    /// Place the given coefficient at `k` and its conjugate at `-k` for
    /// each listed mode. `k = 0` and Nyquist entries are rejected.
    pub fn from_pairs(grid: Arc<SpectralGrid>, pairs: &[(&[i64], &[Complex64])]) -> Result<Self> {
        let d = grid.dim();
        let num = grid.num_modes();
        let mut coeffs = vec![Complex64::default(); num * d];
        for (k, value) in pairs {
            let flat = grid.flat_index(k).ok_or_else(|| CoreError::InvalidGenerator {
                reason: format!("wavenumber {k:?} not on the lattice"),
            })?;
            if flat == 0 || grid.is_nyquist(flat) || value.len() != d {
                return Err(CoreError::InvalidGenerator {
                    reason: format!("cannot place a conjugate pair at {k:?}"),
                });
            }
            let conj = grid.conjugate_index(flat);
            for (c, &v) in value.iter().enumerate() {
                coeffs[c * num + flat] = v;
                coeffs[c * num + conj] = v.conj();
            }
        }
        Ok(Self::from_coeffs(grid, coeffs))
    }

    /// Place exactly the listed `(k, value)` coefficients with no
    /// mirroring. Meant for tests that need deliberately broken fields;
    /// mean and Nyquist modes are still forced to zero.
    pub fn from_raw_modes(grid: Arc<SpectralGrid>, modes: &[(&[i64], &[Complex64])]) -> Result<Self> {
        let d = grid.dim();
        let num = grid.num_modes();
        let mut coeffs = vec![Complex64::default(); num * d];
        for (k, value) in modes {
            let flat = grid.flat_index(k).ok_or_else(|| CoreError::InvalidGenerator {
                reason: format!("wavenumber {k:?} not on the lattice"),
            })?;
            if value.len() != d {
                return Err(CoreError::InvalidGenerator {
                    reason: format!("value at {k:?} has wrong dimension"),
                });
            }
            for (c, &v) in value.iter().enumerate() {
                coeffs[c * num + flat] = v;
            }
        }
        Ok(Self::from_coeffs(grid, coeffs))
    }

    pub fn grid(&self) -> &Arc<SpectralGrid> {
        &self.grid
    }

    pub fn dim(&self) -> usize {
        self.grid.dim()
    }

    pub fn num_modes(&self) -> usize {
        self.grid.num_modes()
    }

    /// Coefficient of component `comp` at flat mode index `flat`.
    pub fn coeff(&self, flat: usize, comp: usize) -> Complex64 {
        self.coeffs[comp * self.num_modes() + flat]
    }

    /// Coefficient vector `vhat(k)` gathered into `out`.
    pub fn coeff_vector(&self, flat: usize, out: &mut [Complex64]) {
        let num = self.num_modes();
        for (c, slot) in out.iter_mut().enumerate() {
            *slot = self.coeffs[c * num + flat];
        }
    }

    /// Contiguous coefficients of one component over all modes.
    pub fn component(&self, comp: usize) -> &[Complex64] {
        let num = self.num_modes();
        &self.coeffs[comp * num..(comp + 1) * num]
    }

    /// Whether the field passed divergence-free validation when it was
    /// constructed (or was produced by an operation that preserves it).
    pub fn is_solenoidal(&self) -> bool {
        self.solenoidal
    }

    /// Largest coefficient modulus over all modes and components; the
    /// scale against which relative validations are measured.
    pub fn max_coeff_norm(&self) -> f64 {
        self.coeffs.iter().map(|c| c.norm()).fold(0.0, f64::max)
    }

    /// `sum_k |vhat(k)|^2`, which equals the normalized integral of
    /// `|v|^2` over `Q`.
    pub fn l2_norm_sq(&self) -> f64 {
        self.coeffs.iter().map(|c| c.norm_sqr()).sum()
    }

    /// Largest divergence coefficient `|k . vhat(k)|` and the wavenumber
    /// attaining it.
    pub fn solenoidal_defect(&self) -> (f64, Vec<i64>) {
        let d = self.dim();
        let num = self.num_modes();
        let mut worst = (0.0f64, vec![0i64; d]);
        for (flat, k) in self.grid.modes() {
            let mut dot = Complex64::default();
            for (a, &ka) in k.iter().enumerate() {
                dot += self.coeffs[a * num + flat] * ka as f64;
            }
            let mag = dot.norm();
            if mag > worst.0 {
                worst = (mag, k.to_vec());
            }
        }
        worst
    }

    /// Error unless `|k . vhat| <= rel_tol * max-coefficient` everywhere.
    pub fn validate_solenoidal(&self, rel_tol: f64) -> Result<()> {
        let (mag, k) = self.solenoidal_defect();
        let tolerance = rel_tol * self.max_coeff_norm();
        if mag > tolerance {
            return Err(CoreError::NotSolenoidal { k, magnitude: mag, tolerance });
        }
        Ok(())
    }

    /// Largest mismatch `|vhat(-k) - conj(vhat(k))|` and its wavenumber.
    pub fn hermitian_defect(&self) -> (f64, Vec<i64>) {
        let d = self.dim();
        let num = self.num_modes();
        let mut worst = (0.0f64, vec![0i64; d]);
        for (flat, k) in self.grid.modes() {
            let conj = self.grid.conjugate_index(flat);
            for c in 0..d {
                let mag = (self.coeffs[c * num + conj] - self.coeffs[c * num + flat].conj()).norm();
                if mag > worst.0 {
                    worst = (mag, k.to_vec());
                }
            }
        }
        worst
    }

    pub fn validate_hermitian(&self, rel_tol: f64) -> Result<()> {
        let (mag, k) = self.hermitian_defect();
        let tolerance = rel_tol * self.max_coeff_norm();
        if mag > tolerance {
            return Err(CoreError::HermitianViolation { k, magnitude: mag, tolerance });
        }
        Ok(())
    }

    /// Orthogonal projection onto the divergence-free subspace:
    /// `vhat -> vhat - (k.vhat) k / |k|^2` per mode, `vhat(0) -> 0`.
    pub fn leray_project(&self) -> FourierVectorField {
        let d = self.dim();
        let num = self.num_modes();
        let mut coeffs = self.coeffs.clone();
        for (flat, k) in self.grid.modes() {
            let ksq: i64 = k.iter().map(|&c| c * c).sum();
            if ksq == 0 {
                for c in 0..d {
                    coeffs[c * num + flat] = Complex64::default();
                }
                continue;
            }
            let mut dot = Complex64::default();
            for (a, &ka) in k.iter().enumerate() {
                dot += coeffs[a * num + flat] * ka as f64;
            }
            let scale = dot / ksq as f64;
            for (a, &ka) in k.iter().enumerate() {
                coeffs[a * num + flat] -= scale * ka as f64;
            }
        }
        let mut out = Self { grid: self.grid.clone(), coeffs, solenoidal: true };
        zero_forced_modes(&out.grid, &mut out.coeffs, d);
        out
    }

    /// New field with every mode scaled by a real factor depending only
    /// on the mode. The factor must be even in `k` for the result to stay
    /// Hermitian; callers in this crate use functions of `|k|` only.
    pub(crate) fn scale_per_mode(&self, factor: impl Fn(usize) -> f64) -> FourierVectorField {
        let d = self.dim();
        let num = self.num_modes();
        let mut coeffs = self.coeffs.clone();
        for flat in 0..num {
            let f = factor(flat);
            for c in 0..d {
                coeffs[c * num + flat] *= f;
            }
        }
        Self { grid: self.grid.clone(), coeffs, solenoidal: self.solenoidal }
    }

    /// Componentwise difference on a shared grid.
    pub fn difference(&self, other: &FourierVectorField) -> Result<FourierVectorField> {
        self.grid.expect_same(&other.grid)?;
        let coeffs = self
            .coeffs
            .iter()
            .zip(&other.coeffs)
            .map(|(a, b)| a - b)
            .collect();
        Ok(Self {
            grid: self.grid.clone(),
            coeffs,
            solenoidal: self.solenoidal && other.solenoidal,
        })
    }
}

impl FourierTensorField {
    pub fn zeros(grid: Arc<SpectralGrid>) -> Self {
        let d = grid.dim();
        let len = grid.num_modes() * d * d;
        Self { grid, coeffs: vec![Complex64::default(); len] }
    }

    pub(crate) fn from_coeffs(grid: Arc<SpectralGrid>, mut coeffs: Vec<Complex64>) -> Self {
        let d = grid.dim();
        debug_assert_eq!(coeffs.len(), grid.num_modes() * d * d);
        zero_forced_modes(&grid, &mut coeffs, d * d);
        Self { grid, coeffs }
    }

    pub fn grid(&self) -> &Arc<SpectralGrid> {
        &self.grid
    }

    pub fn dim(&self) -> usize {
        self.grid.dim()
    }

    pub fn num_modes(&self) -> usize {
        self.grid.num_modes()
    }

    /// Entry `(i, j)` of the coefficient matrix at flat mode `flat`.
    pub fn entry(&self, flat: usize, i: usize, j: usize) -> Complex64 {
        let d = self.dim();
        self.coeffs[(i * d + j) * self.num_modes() + flat]
    }

    /// Contiguous coefficients of entry `(i, j)` over all modes.
    pub fn component(&self, i: usize, j: usize) -> &[Complex64] {
        let d = self.dim();
        let num = self.num_modes();
        let base = (i * d + j) * num;
        &self.coeffs[base..base + num]
    }

    /// Copy of the coefficients with a single entry perturbed; for
    /// detector-sensitivity experiments.
    pub fn with_perturbed_entry(&self, flat: usize, i: usize, j: usize, delta: Complex64) -> Self {
        let d = self.dim();
        let mut coeffs = self.coeffs.clone();
        coeffs[(i * d + j) * self.num_modes() + flat] += delta;
        Self { grid: self.grid.clone(), coeffs }
    }

    /// Largest Frobenius norm of a coefficient matrix over all modes.
    pub fn max_coeff_norm(&self) -> f64 {
        let d = self.dim();
        let num = self.num_modes();
        let mut worst = 0.0f64;
        for flat in 0..num {
            let mut sq = 0.0;
            for e in 0..d * d {
                sq += self.coeffs[e * num + flat].norm_sqr();
            }
            worst = worst.max(sq.sqrt());
        }
        worst
    }

    /// `sum_k |uhat(k)|_F^2 = ` normalized integral of `|u|_F^2` over `Q`.
    pub fn l2_norm_sq(&self) -> f64 {
        self.coeffs.iter().map(|c| c.norm_sqr()).sum()
    }

    /// Largest trace magnitude `|sum_i uhat_ii(k)|` over modes.
    pub fn trace_defect(&self) -> f64 {
        let d = self.dim();
        let num = self.num_modes();
        let mut worst = 0.0f64;
        for flat in 0..num {
            let mut tr = Complex64::default();
            for i in 0..d {
                tr += self.coeffs[(i * d + i) * num + flat];
            }
            worst = worst.max(tr.norm());
        }
        worst
    }

    /// Largest asymmetry `|uhat_ij(k) - uhat_ji(k)|` over modes.
    pub fn asymmetry_defect(&self) -> f64 {
        let d = self.dim();
        let num = self.num_modes();
        let mut worst = 0.0f64;
        for flat in 0..num {
            for i in 0..d {
                for j in (i + 1)..d {
                    let diff = self.coeffs[(i * d + j) * num + flat]
                        - self.coeffs[(j * d + i) * num + flat];
                    worst = worst.max(diff.norm());
                }
            }
        }
        worst
    }

    pub fn hermitian_defect(&self) -> (f64, Vec<i64>) {
        let d = self.dim();
        let num = self.num_modes();
        let mut worst = (0.0f64, vec![0i64; d]);
        for (flat, k) in self.grid.modes() {
            let conj = self.grid.conjugate_index(flat);
            for e in 0..d * d {
                let mag = (self.coeffs[e * num + conj] - self.coeffs[e * num + flat].conj()).norm();
                if mag > worst.0 {
                    worst = (mag, k.to_vec());
                }
            }
        }
        worst
    }

    pub fn validate_hermitian(&self, rel_tol: f64) -> Result<()> {
        let (mag, k) = self.hermitian_defect();
        let tolerance = rel_tol * self.max_coeff_norm();
        if mag > tolerance {
            return Err(CoreError::HermitianViolation { k, magnitude: mag, tolerance });
        }
        Ok(())
    }

    pub fn difference(&self, other: &FourierTensorField) -> Result<FourierTensorField> {
        self.grid.expect_same(&other.grid)?;
        let coeffs = self
            .coeffs
            .iter()
            .zip(&other.coeffs)
            .map(|(a, b)| a - b)
            .collect();
        Ok(Self { grid: self.grid.clone(), coeffs })
    }
}

/// Riesz transform along `axis` (0-based): multiply each coefficient by
/// `i * k_axis / |k|`, with the `k = 0` coefficient sent to zero. The
/// multiplier has modulus at most one and preserves Hermitian symmetry.
pub fn riesz_apply(grid: &SpectralGrid, axis: usize, coeffs: &[Complex64]) -> Result<Vec<Complex64>> {
    if axis >= grid.dim() {
        return Err(CoreError::AxisOutOfRange { axis, d: grid.dim() });
    }
    if coeffs.len() != grid.num_modes() {
        return Err(CoreError::SampleShape { expected: grid.num_modes(), got: coeffs.len() });
    }
    let mut out = coeffs.to_vec();
    for (flat, k) in grid.modes() {
        let mag = grid.kmag(flat);
        if mag == 0.0 {
            out[flat] = Complex64::default();
        } else {
            out[flat] *= Complex64::new(0.0, k[axis] as f64 / mag);
        }
    }
    Ok(out)
}

/// Zero the `k = 0` coefficient and every Nyquist mode, for each of the
/// `comps` interleaved component blocks.
fn zero_forced_modes(grid: &SpectralGrid, coeffs: &mut [Complex64], comps: usize) {
    let num = grid.num_modes();
    for c in 0..comps {
        coeffs[c * num] = Complex64::default();
    }
    for flat in 0..num {
        if grid.is_nyquist(flat) {
            for c in 0..comps {
                coeffs[c * num + flat] = Complex64::default();
            }
        }
    }
}
