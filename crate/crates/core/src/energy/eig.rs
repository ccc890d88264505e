//! Largest eigenvalue of small real symmetric matrices.
//!
//! Closed forms handle d = 2 (quadratic) and d = 3 (trigonometric
//! Cardano); d >= 4 falls to a cyclic Jacobi sweep. The matrices here
//! are tiny, so robustness wins over asymptotics.

use crate::error::{CoreError, Result};
use crate::tolerances as tol;

/// Relative asymmetry beyond which input is rejected.
const SYMMETRY_TOL: f64 = 1e-12;

const MAX_SWEEPS: usize = 64;

/// Largest eigenvalue of the symmetric `d x d` matrix `m` (row-major,
/// `d = isqrt(m.len())`). Rejects input whose asymmetry exceeds
/// `1e-12 * |m|_F`.
pub fn lambda_max(m: &[f64]) -> Result<f64> {
    let d = dim_of(m)?;
    let frob = frobenius(m);
    let defect = asymmetry(m, d);
    if defect > SYMMETRY_TOL * frob.max(f64::MIN_POSITIVE) {
        return Err(CoreError::AsymmetricMatrix {
            magnitude: defect,
            tolerance: SYMMETRY_TOL * frob,
        });
    }
    Ok(lambda_max_unchecked(m, d))
}

/// Dispatch without the symmetry check, for callers that construct the
/// matrix symmetric by hand in a hot loop.
pub(crate) fn lambda_max_unchecked(m: &[f64], d: usize) -> f64 {
    match d {
        0 => 0.0,
        1 => m[0],
        2 => lambda_max_2x2(m),
        3 => lambda_max_3x3(m),
        _ => jacobi_largest(m, d),
    }
}

/// Largest eigenvalue via the cyclic Jacobi sweep, exposed for every
/// dimension so the closed forms can be cross-checked against it.
pub fn lambda_max_jacobi(m: &[f64]) -> Result<f64> {
    let d = dim_of(m)?;
    let frob = frobenius(m);
    let defect = asymmetry(m, d);
    if defect > SYMMETRY_TOL * frob.max(f64::MIN_POSITIVE) {
        return Err(CoreError::AsymmetricMatrix {
            magnitude: defect,
            tolerance: SYMMETRY_TOL * frob,
        });
    }
    Ok(jacobi_largest(m, d))
}

fn dim_of(m: &[f64]) -> Result<usize> {
    let d = (m.len() as f64).sqrt().round() as usize;
    if d * d != m.len() {
        return Err(CoreError::InvalidPointState {
            reason: format!("matrix buffer of length {} is not square", m.len()),
        });
    }
    Ok(d)
}

fn frobenius(m: &[f64]) -> f64 {
    m.iter().map(|x| x * x).sum::<f64>().sqrt()
}

fn asymmetry(m: &[f64], d: usize) -> f64 {
    let mut worst = 0.0f64;
    for i in 0..d {
        for j in (i + 1)..d {
            worst = worst.max((m[i * d + j] - m[j * d + i]).abs());
        }
    }
    worst
}

fn lambda_max_2x2(m: &[f64]) -> f64 {
    let (a, c) = (m[0], m[3]);
    let b = 0.5 * (m[1] + m[2]);
    0.5 * (a + c) + (0.5 * (a - c)).hypot(b)
}

fn lambda_max_3x3(m: &[f64]) -> f64 {
    let a = [
        m[0],
        0.5 * (m[1] + m[3]),
        0.5 * (m[2] + m[6]),
        0.5 * (m[1] + m[3]),
        m[4],
        0.5 * (m[5] + m[7]),
        0.5 * (m[2] + m[6]),
        0.5 * (m[5] + m[7]),
        m[8],
    ];
    let p1 = a[1] * a[1] + a[2] * a[2] + a[5] * a[5];
    let q = (a[0] + a[4] + a[8]) / 3.0;
    let p2 = (a[0] - q).powi(2) + (a[4] - q).powi(2) + (a[8] - q).powi(2) + 2.0 * p1;
    if p2 <= 0.0 {
        // Multiple of the identity.
        return q;
    }
    let p = (p2 / 6.0).sqrt();
    let b = |i: usize| (a[i] - if i.is_multiple_of(4) { q } else { 0.0 }) / p;
    let det_b = b(0) * (b(4) * b(8) - b(5) * b(5)) - b(1) * (b(1) * b(8) - b(5) * b(2))
        + b(2) * (b(1) * b(5) - b(4) * b(2));
    let r = (det_b / 2.0).clamp(-1.0, 1.0);
    let phi = r.acos() / 3.0;
    q + 2.0 * p * phi.cos()
}

fn jacobi_largest(m: &[f64], d: usize) -> f64 {
    let mut a: Vec<f64> = m.to_vec();
    // Symmetrize once so rounding in the input cannot drift the sweep.
    for i in 0..d {
        for j in (i + 1)..d {
            let avg = 0.5 * (a[i * d + j] + a[j * d + i]);
            a[i * d + j] = avg;
            a[j * d + i] = avg;
        }
    }
    let frob = frobenius(&a).max(f64::MIN_POSITIVE);
    for _ in 0..MAX_SWEEPS {
        let off: f64 = {
            let mut sum = 0.0;
            for i in 0..d {
                for j in (i + 1)..d {
                    sum += 2.0 * a[i * d + j] * a[i * d + j];
                }
            }
            sum.sqrt()
        };
        if off <= tol::JACOBI_OFFDIAG * frob {
            break;
        }
        for p in 0..d {
            for q in (p + 1)..d {
                let apq = a[p * d + q];
                if apq.abs() <= f64::MIN_POSITIVE {
                    continue;
                }
                let theta = (a[q * d + q] - a[p * d + p]) / (2.0 * apq);
                let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;
                let (app, aqq) = (a[p * d + p], a[q * d + q]);
                a[p * d + p] = c * c * app - 2.0 * s * c * apq + s * s * aqq;
                a[q * d + q] = s * s * app + 2.0 * s * c * apq + c * c * aqq;
                a[p * d + q] = 0.0;
                a[q * d + p] = 0.0;
                for i in 0..d {
                    if i == p || i == q {
                        continue;
                    }
                    let (aip, aiq) = (a[i * d + p], a[i * d + q]);
                    a[i * d + p] = c * aip - s * aiq;
                    a[p * d + i] = a[i * d + p];
                    a[i * d + q] = s * aip + c * aiq;
                    a[q * d + i] = a[i * d + q];
                }
            }
        }
    }
    (0..d).map(|i| a[i * d + i]).fold(f64::NEG_INFINITY, f64::max)
}
