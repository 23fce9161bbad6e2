use std::sync::Arc;

use num_complex::Complex64;
use rustfft::{Fft, FftPlanner};

/// Separable 3-D complex FFT on an `n³` row-major cube (axis 3 fastest).
pub(crate) struct Fft3 {
    n: usize,
    forward: Arc<dyn Fft<f64>>,
    inverse: Arc<dyn Fft<f64>>,
}

impl std::fmt::Debug for Fft3 {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("Fft3").field("n", &self.n).finish()
    }
}

impl Fft3 {
    pub(crate) fn new(n: usize) -> Self {
        let mut planner = FftPlanner::new();
        Self {
            n,
            forward: planner.plan_fft_forward(n),
            inverse: planner.plan_fft_inverse(n),
        }
    }

    /// Unnormalized transform in place.
    pub(crate) fn process(&self, data: &mut [Complex64], inverse: bool) {
        let n = self.n;
        debug_assert_eq!(data.len(), n * n * n);
        let plan = if inverse { &self.inverse } else { &self.forward };
        let mut scratch = vec![Complex64::default(); plan.get_inplace_scratch_len()];
        let mut buf = vec![Complex64::default(); n * n];

        // axis 3: contiguous lines
        plan.process_with_scratch(data, &mut scratch);

        // axis 2: transpose each x1-plane so that x2 is contiguous
        for plane in data.chunks_exact_mut(n * n) {
            for j in 0..n {
                for l in 0..n {
                    buf[l * n + j] = plane[j * n + l];
                }
            }
            plan.process_with_scratch(&mut buf, &mut scratch);
            for j in 0..n {
                for l in 0..n {
                    plane[j * n + l] = buf[l * n + j];
                }
            }
        }

        // axis 1: gather (x1, x3) slabs at fixed x2
        for j in 0..n {
            for i in 0..n {
                let row = (i * n + j) * n;
                for l in 0..n {
                    buf[l * n + i] = data[row + l];
                }
            }
            plan.process_with_scratch(&mut buf, &mut scratch);
            for i in 0..n {
                let row = (i * n + j) * n;
                for l in 0..n {
                    data[row + l] = buf[l * n + i];
                }
            }
        }
    }
}
