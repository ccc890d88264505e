//! Transforms between physical samples and Fourier coefficients.
//!
//! Forward transforms divide the DFT by `n^d`, so coefficients are the
//! Fourier-series coefficients of the sampled trigonometric polynomial
//! and `sum_k |vhat(k)|^2` equals the grid mean of `|v|^2`. Inverse
//! transforms evaluate the series without further scaling; an
//! `oversample` factor evaluates the same polynomial on a finer grid by
//! zero-padding the spectrum.

use std::sync::Arc;

use num_complex::Complex64;

use crate::error::{CoreError, Result};
use crate::fft::fft_nd_inplace;
use crate::field::{FourierTensorField, FourierVectorField, PhysicalTensorField, PhysicalVectorField};
use crate::grid::{decompose, signed_component, SpectralGrid};
use crate::tolerances as tol;

/// Fourier coefficients of real vector samples on the grid's own
/// lattice. The mean and Nyquist content of the samples is discarded
/// (those modes are forced to zero), so the roundtrip
/// `inverse(forward(s)) = s` holds exactly for samples of mean-free,
/// Nyquist-free trigonometric polynomials.
pub fn forward_transform(
    grid: &Arc<SpectralGrid>,
    samples: &PhysicalVectorField,
) -> Result<FourierVectorField> {
    let d = grid.dim();
    let n = grid.modes_per_axis();
    let num = grid.num_modes();
    if samples.d != d || samples.n_phys != n {
        return Err(CoreError::SampleShape {
            expected: num * d,
            got: samples.data.len(),
        });
    }
    let mut coeffs = vec![Complex64::default(); num * d];
    let mut buffer = vec![Complex64::default(); num];
    let scale = 1.0 / num as f64;
    for c in 0..d {
        for (p, slot) in buffer.iter_mut().enumerate() {
            *slot = Complex64::new(samples.data[p * d + c], 0.0);
        }
        fft_nd_inplace(&mut buffer, d, n, false);
        for (m, &v) in buffer.iter().enumerate() {
            coeffs[c * num + m] = v * scale;
        }
    }
    Ok(FourierVectorField::from_coeffs(grid.clone(), coeffs))
}

/// Physical samples of the field on its own grid. Fails when Hermitian
/// symmetry is broken beyond `tol::ALGEBRAIC` (naming the offending
/// wavenumber); the residual imaginary parts are checked and dropped.
pub fn inverse_transform(field: &FourierVectorField) -> Result<PhysicalVectorField> {
    field.validate_hermitian(tol::ALGEBRAIC)?;
    inverse_vector_samples(field, 1)
}

/// Samples on a grid refined by the integer factor `oversample >= 1`.
pub fn inverse_transform_oversampled(
    field: &FourierVectorField,
    oversample: usize,
) -> Result<PhysicalVectorField> {
    field.validate_hermitian(tol::ALGEBRAIC)?;
    inverse_vector_samples(field, oversample.max(1))
}

/// Tensor-field counterpart of [`inverse_transform_oversampled`].
pub fn inverse_tensor_oversampled(
    field: &FourierTensorField,
    oversample: usize,
) -> Result<PhysicalTensorField> {
    field.validate_hermitian(tol::ALGEBRAIC)?;
    let d = field.dim();
    let os = oversample.max(1);
    let n_fine = field.grid().modes_per_axis() * os;
    let num_fine = n_fine.pow(d as u32);
    let mut data = vec![0.0; num_fine * d * d];
    let mut padded = vec![Complex64::default(); num_fine];
    let scale = field.max_coeff_norm();
    for i in 0..d {
        for j in 0..d {
            let max_imag = inverse_component(
                field.grid(),
                field.component(i, j),
                os,
                &mut padded,
            );
            check_imag_residue(max_imag, scale)?;
            for (p, &v) in padded.iter().enumerate() {
                data[p * d * d + i * d + j] = v.re;
            }
        }
    }
    Ok(PhysicalTensorField { d, n_phys: n_fine, data })
}

fn inverse_vector_samples(
    field: &FourierVectorField,
    oversample: usize,
) -> Result<PhysicalVectorField> {
    let d = field.dim();
    let n_fine = field.grid().modes_per_axis() * oversample;
    let num_fine = n_fine.pow(d as u32);
    let mut data = vec![0.0; num_fine * d];
    let mut padded = vec![Complex64::default(); num_fine];
    let scale = field.max_coeff_norm();
    for c in 0..d {
        let max_imag = inverse_component(field.grid(), field.component(c), oversample, &mut padded);
        check_imag_residue(max_imag, scale)?;
        for (p, &v) in padded.iter().enumerate() {
            data[p * d + c] = v.re;
        }
    }
    Ok(PhysicalVectorField { d, n_phys: n_fine, data })
}

/// Scatter one scalar coefficient block into a zero-padded fine grid,
/// inverse transform in place, and report the largest imaginary part.
fn inverse_component(
    grid: &SpectralGrid,
    coeffs: &[Complex64],
    oversample: usize,
    padded: &mut [Complex64],
) -> f64 {
    let d = grid.dim();
    let n = grid.modes_per_axis();
    let n_fine = n * oversample;
    padded.fill(Complex64::default());
    if oversample == 1 {
        padded.copy_from_slice(coeffs);
    } else {
        let mut idx = vec![0usize; d];
        for (flat, &v) in coeffs.iter().enumerate() {
            if v == Complex64::default() {
                continue;
            }
            decompose(flat, n, &mut idx);
            let mut fine = 0usize;
            for &m in &idx {
                let k = signed_component(m, n);
                let mf = if k < 0 { (k + n_fine as i64) as usize } else { k as usize };
                fine = fine * n_fine + mf;
            }
            padded[fine] = v;
        }
    }
    fft_nd_inplace(padded, d, n_fine, true);
    padded.iter().map(|v| v.im.abs()).fold(0.0, f64::max)
}

fn check_imag_residue(max_imag: f64, coeff_scale: f64) -> Result<()> {
    if max_imag > tol::ALGEBRAIC * coeff_scale {
        return Err(CoreError::HermitianViolation {
            k: vec![],
            magnitude: max_imag,
            tolerance: tol::ALGEBRAIC * coeff_scale,
        });
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::sample_coords;

    fn grid(d: usize, n: usize) -> Arc<SpectralGrid> {
        Arc::new(SpectralGrid::new(d, n).unwrap())
    }

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    /// Sample an analytic vector function on the n^d grid.
    fn sample(d: usize, n: usize, f: impl Fn(&[f64], &mut [f64])) -> PhysicalVectorField {
        let num = n.pow(d as u32);
        let mut data = vec![0.0; num * d];
        let mut x = vec![0.0; d];
        for p in 0..num {
            sample_coords(p, n, &mut x);
            f(&x, &mut data[p * d..(p + 1) * d]);
        }
        PhysicalVectorField { d, n_phys: n, data }
    }

    #[test]
    fn zero_samples_transform_to_zero_coefficients() {
        let g = grid(2, 8);
        let s = PhysicalVectorField::zeros(2, 8);
        let f = forward_transform(&g, &s).unwrap();
        assert_eq!(f.l2_norm_sq(), 0.0);
    }

    #[test]
    fn mismatched_sample_shape_is_rejected() {
        let g = grid(2, 8);
        let s = PhysicalVectorField::zeros(2, 16);
        assert!(matches!(
            forward_transform(&g, &s),
            Err(CoreError::SampleShape { .. })
        ));
        let s = PhysicalVectorField::zeros(3, 8);
        assert!(forward_transform(&g, &s).is_err());
    }

    #[test]
    fn sine_shear_has_exactly_two_coefficients_of_modulus_half() {
        // v(x) = (sin x2, 0) -> vhat at +-(0, 1), |vhat_1| = 1/2.
        let g = grid(2, 16);
        let s = sample(2, 16, |x, v| {
            v[0] = x[1].sin();
            v[1] = 0.0;
        });
        let f = forward_transform(&g, &s).unwrap();
        let plus = g.flat_index(&[0, 1]).unwrap();
        let minus = g.flat_index(&[0, -1]).unwrap();
        assert!((f.coeff(plus, 0) - c(0.0, -0.5)).norm() < 1e-14);
        assert!((f.coeff(minus, 0) - c(0.0, 0.5)).norm() < 1e-14);
        let mut nonzero = 0;
        for flat in 0..g.num_modes() {
            for comp in 0..2 {
                if f.coeff(flat, comp).norm() > 1e-13 {
                    nonzero += 1;
                }
            }
        }
        assert_eq!(nonzero, 2);
        assert!(f.is_solenoidal());
    }

    #[test]
    fn single_pair_inverts_to_sine() {
        // vhat = (0, -i/2) at (1,0) and (0, +i/2) at (-1,0) -> (0, sin x1).
        let g = grid(2, 8);
        let f = FourierVectorField::from_pairs(
            g.clone(),
            &[(&[1, 0], &[c(0.0, 0.0), c(0.0, -0.5)])],
        )
        .unwrap();
        let s = inverse_transform(&f).unwrap();
        let mut x = vec![0.0; 2];
        for p in 0..s.num_points() {
            sample_coords(p, 8, &mut x);
            let v = s.value(p);
            assert!(v[0].abs() < 1e-14);
            assert!((v[1] - x[0].sin()).abs() < 1e-13);
        }
    }

    #[test]
    fn roundtrip_on_pseudorandom_bandlimited_samples() {
        for &(d, n) in &[(2usize, 8usize), (2, 16), (3, 8)] {
            let g = grid(d, n);
            // Deterministic mean-free, Nyquist-free trigonometric data.
            let mut pairs = Vec::new();
            let mut storage: Vec<(Vec<i64>, Vec<Complex64>)> = Vec::new();
            let kmax = (n / 2 - 1).min(3) as i64;
            let mut seed = 1.0f64;
            for axis in 0..d {
                for kv in 1..=kmax {
                    let mut k = vec![0i64; d];
                    k[axis] = kv;
                    k[(axis + 1) % d] = 1;
                    let mut val = vec![Complex64::default(); d];
                    for v in val.iter_mut() {
                        seed = (seed * 997.0).sin();
                        let re = seed;
                        seed = (seed * 997.0).sin();
                        *v = c(re, seed);
                    }
                    storage.push((k, val));
                }
            }
            for (k, v) in &storage {
                pairs.push((k.as_slice(), v.as_slice()));
            }
            let f = FourierVectorField::from_pairs(g.clone(), &pairs).unwrap();
            let samples = inverse_transform(&f).unwrap();
            let back = forward_transform(&g, &samples).unwrap();
            let diff = back.difference(&f).unwrap();
            assert!(
                diff.max_coeff_norm() <= 1e-12 * f.max_coeff_norm(),
                "coefficient roundtrip failed for d={d}, n={n}"
            );
            let samples_again = inverse_transform(&back).unwrap();
            let scale = samples.data.iter().fold(0.0f64, |m, v| m.max(v.abs()));
            for (a, b) in samples.data.iter().zip(&samples_again.data) {
                assert!((a - b).abs() <= 1e-12 * scale);
            }
        }
    }

    #[test]
    fn parseval_matches_grid_quadrature() {
        let g = grid(2, 16);
        let f = FourierVectorField::from_pairs(
            g,
            &[
                (&[1, 0], &[c(0.0, 0.2), c(0.3, -0.1)]),
                (&[2, 5], &[c(0.4, 0.0), c(0.0, 0.6)]),
                (&[0, 3], &[c(-0.3, 0.3), c(0.1, 0.1)]),
            ],
        )
        .unwrap();
        let s = inverse_transform(&f).unwrap();
        let quad = s.mean_of(|v| v.iter().map(|a| a * a).sum());
        let spectral = f.l2_norm_sq();
        assert!((quad - spectral).abs() <= 1e-10 * spectral);
    }

    #[test]
    fn hermitian_violation_is_reported_with_wavenumber() {
        let g = grid(2, 8);
        let f = FourierVectorField::from_raw_modes(
            g,
            &[(&[1, 2], &[c(1.0, 0.0), c(0.0, 0.0)])],
        )
        .unwrap();
        let err = inverse_transform(&f).unwrap_err();
        match err {
            CoreError::HermitianViolation { k, .. } => {
                assert!(k == vec![1, 2] || k == vec![-1, -2]);
            }
            other => panic!("expected HermitianViolation, got {other}"),
        }
    }

    #[test]
    fn oversampling_reproduces_the_same_polynomial() {
        let g = grid(2, 8);
        let f = FourierVectorField::from_pairs(
            g,
            &[(&[1, 2], &[c(0.5, -0.1), c(0.2, 0.4)])],
        )
        .unwrap();
        let fine = inverse_transform_oversampled(&f, 2).unwrap();
        assert_eq!(fine.n_phys, 16);
        // Coarse grid points are every second fine point; values agree.
        let coarse = inverse_transform(&f).unwrap();
        for p0 in 0..8 {
            for p1 in 0..8 {
                let pc = p0 * 8 + p1;
                let pf = (2 * p0) * 16 + 2 * p1;
                for cidx in 0..2 {
                    assert!(
                        (coarse.data[pc * 2 + cidx] - fine.data[pf * 2 + cidx]).abs() < 1e-12
                    );
                }
            }
        }
    }
}
