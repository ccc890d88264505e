//! Shared fixtures for the benchmark targets.

use std::sync::Arc;

use subsol_core::fields_io::{generate, GeneratorKind, GeneratorSpec};
use subsol_core::{FourierVectorField, SpectralGrid};

/// A reproducible random divergence-free field at full spectral support.
pub fn fixture_field(d: usize, n: usize, seed: u64) -> FourierVectorField {
    let grid = Arc::new(SpectralGrid::new(d, n).expect("valid benchmark grid"));
    let mut spec = GeneratorSpec::new(GeneratorKind::Random, seed);
    spec.kmax = n / 2 - 1;
    generate(&spec, &grid).expect("benchmark field generates")
}

/// A batch of symmetric trace-free matrices for eigenvalue benchmarks.
pub fn fixture_matrices(d: usize, count: usize) -> Vec<Vec<f64>> {
    let mut state = 0x9e3779b97f4a7c15u64;
    let mut next = move || {
        state ^= state << 13;
        state ^= state >> 7;
        state ^= state << 17;
        (state >> 11) as f64 / (1u64 << 53) as f64 - 0.5
    };
    (0..count)
        .map(|_| {
            let mut m = vec![0.0; d * d];
            for i in 0..d {
                for j in i..d {
                    let x = next();
                    m[i * d + j] = x;
                    m[j * d + i] = x;
                }
            }
            let trace: f64 = (0..d).map(|i| m[i * d + i]).sum();
            for i in 0..d {
                m[i * d + i] -= trace / d as f64;
            }
            m
        })
        .collect()
}
