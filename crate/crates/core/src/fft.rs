//! Thin d-dimensional wrapper over rustfft's 1-D complex transforms.

use num_complex::Complex64;
use rustfft::FftPlanner;

/// In-place unnormalized complex DFT over a cubic `n^d` row-major array,
/// applied axis by axis. `inverse` selects the `e^{+i k x}` kernel.
pub(crate) fn fft_nd_inplace(data: &mut [Complex64], d: usize, n: usize, inverse: bool) {
    debug_assert_eq!(data.len(), n.pow(d as u32));
    let mut planner = FftPlanner::<f64>::new();
    let fft = if inverse {
        planner.plan_fft_inverse(n)
    } else {
        planner.plan_fft_forward(n)
    };
    let mut line = vec![Complex64::default(); n];
    for axis in 0..d {
        let stride = n.pow((d - 1 - axis) as u32);
        let block = stride * n;
        let blocks = data.len() / block;
        for b in 0..blocks {
            for inner in 0..stride {
                let base = b * block + inner;
                for (j, slot) in line.iter_mut().enumerate() {
                    *slot = data[base + j * stride];
                }
                fft.process(&mut line);
                for (j, &v) in line.iter().enumerate() {
                    data[base + j * stride] = v;
                }
            }
        }
    }
}
