//! Wavenumber lattice and physical sample points of the periodic box
//! `Q = [0, 2*pi]^d`.

use crate::error::{CoreError, Result};

/// Cubic spectral grid: `d` axes, `n` modes per axis.
///
/// The lattice holds every wavenumber `k` in `Z^d` with components in
/// `(-n/2, n/2]`. Modes are addressed by a flat index in row-major DFT
/// layout (axis 0 slowest); per-axis DFT index `m` maps to the signed
/// component `m` for `m <= n/2` and `m - n` otherwise. Physical sample
/// points are `x_j = 2*pi*j/n` per axis.
#[derive(Debug, Clone)]
pub struct SpectralGrid {
    d: usize,
    n: usize,
    /// Signed wavenumber of mode `i` at `lattice[i*d..(i+1)*d]`.
    lattice: Vec<i64>,
    /// Euclidean magnitude |k| per mode.
    kmag: Vec<f64>,
}

impl PartialEq for SpectralGrid {
    fn eq(&self, other: &Self) -> bool {
        self.d == other.d && self.n == other.n
    }
}
impl Eq for SpectralGrid {}

impl SpectralGrid {
    /// Build the lattice for `d >= 2` axes with `n >= 4` (even) modes each.
    pub fn new(d: usize, n: usize) -> Result<Self> {
        if d < 2 || n < 4 || !n.is_multiple_of(2) {
            return Err(CoreError::InvalidGrid { d, n });
        }
        let num = n.checked_pow(d as u32).ok_or(CoreError::InvalidGrid { d, n })?;
        let mut lattice = vec![0i64; num * d];
        let mut kmag = vec![0.0; num];
        let mut idx = vec![0usize; d];
        for flat in 0..num {
            decompose(flat, n, &mut idx);
            let mut sq = 0.0;
            for (a, &m) in idx.iter().enumerate() {
                let k = signed_component(m, n);
                lattice[flat * d + a] = k;
                sq += (k * k) as f64;
            }
            kmag[flat] = sq.sqrt();
        }
        Ok(Self { d, n, lattice, kmag })
    }

    /// Spatial dimension `d`.
    pub fn dim(&self) -> usize {
        self.d
    }

    /// Modes per axis `n`.
    pub fn modes_per_axis(&self) -> usize {
        self.n
    }

    /// Total number of lattice points, `n^d`.
    pub fn num_modes(&self) -> usize {
        self.kmag.len()
    }

    /// Signed wavenumber of the mode with flat index `flat`.
    pub fn wavenumber(&self, flat: usize) -> &[i64] {
        &self.lattice[flat * self.d..(flat + 1) * self.d]
    }

    /// Euclidean magnitude |k| of the mode.
    pub fn kmag(&self, flat: usize) -> f64 {
        self.kmag[flat]
    }

    /// Iterate `(flat index, wavenumber)` over the whole lattice.
    pub fn modes(&self) -> impl Iterator<Item = (usize, &[i64])> {
        self.lattice.chunks_exact(self.d).enumerate()
    }

    /// Flat index of the mode `-k` (always on the lattice in DFT layout;
    /// Nyquist components are their own negatives).
    pub fn conjugate_index(&self, flat: usize) -> usize {
        let mut idx = vec![0usize; self.d];
        decompose(flat, self.n, &mut idx);
        let mut out = 0usize;
        for &m in &idx {
            out = out * self.n + (self.n - m) % self.n;
        }
        out
    }

    /// True if any component of the wavenumber sits on the Nyquist plane
    /// (`component == n/2`), where the lattice has no negative partner.
    pub fn is_nyquist(&self, flat: usize) -> bool {
        let half = (self.n / 2) as i64;
        self.wavenumber(flat).contains(&half)
    }

    /// Flat index of the wavenumber `k`, or `None` when any component
    /// falls outside `(-n/2, n/2]` or the dimension disagrees.
    pub fn flat_index(&self, k: &[i64]) -> Option<usize> {
        if k.len() != self.d {
            return None;
        }
        let half = (self.n / 2) as i64;
        let mut out = 0usize;
        for &c in k {
            if c <= -half || c > half {
                return None;
            }
            let m = if c < 0 { c + self.n as i64 } else { c } as usize;
            out = out * self.n + m;
        }
        Some(out)
    }

    /// Check another grid for identity, for use at API boundaries.
    pub fn expect_same(&self, other: &SpectralGrid) -> Result<()> {
        if self != other {
            return Err(CoreError::GridMismatch {
                expected_d: self.d,
                expected_n: self.n,
                got_d: other.d,
                got_n: other.n,
            });
        }
        Ok(())
    }
}

/// Decompose a flat row-major index over a cubic `n^d` grid into per-axis
/// indices (axis 0 slowest). `out.len()` fixes `d`.
pub(crate) fn decompose(flat: usize, n: usize, out: &mut [usize]) {
    let mut rem = flat;
    for slot in out.iter_mut().rev() {
        *slot = rem % n;
        rem /= n;
    }
}

/// Signed lattice component of a per-axis DFT index.
pub(crate) fn signed_component(m: usize, n: usize) -> i64 {
    if m <= n / 2 {
        m as i64
    } else {
        m as i64 - n as i64
    }
}

/// Physical coordinates `x_j = 2*pi*j/n_phys` of sample `flat` on a cubic
/// grid with `n_phys` points per axis.
pub(crate) fn sample_coords(flat: usize, n_phys: usize, out: &mut [f64]) {
    let step = 2.0 * std::f64::consts::PI / n_phys as f64;
    let mut rem = flat;
    for slot in out.iter_mut().rev() {
        *slot = (rem % n_phys) as f64 * step;
        rem /= n_phys;
    }
}
