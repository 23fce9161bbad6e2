use std::sync::Arc;

use num_complex::Complex64;

use crate::error::Result;
use crate::grid::{make_grid, ScalarField, SpectralGrid, Spectrum};

/// Inverse Laplacian on all of space for sources supported in the box.
///
/// The Green's function is truncated beyond the box diameter, whose Fourier
/// transform `2 sin²(R|k|/2)/|k|²` is smooth. It is sampled on a four-fold
/// box, brought to physical space, restricted to the displacements that occur
/// between points of the box and applied by convolution on a doubled box.
pub(crate) struct FreeSpacePoisson {
    grid: Arc<SpectralGrid>,
    padded: Arc<SpectralGrid>,
    /// Multiplier of `Δ⁻¹` on the padded grid, in its forward normalization.
    kernel: Vec<Complex64>,
}

impl FreeSpacePoisson {
    pub(crate) fn new(grid: &Arc<SpectralGrid>) -> Result<Self> {
        let n = grid.n();
        let l = grid.length();
        let big = make_grid(4 * n, 4.0 * l)?;
        let radius = 3f64.sqrt() * l;
        let vol4 = (4.0 * l).powi(3);
        let coeffs: Vec<Complex64> = (0..big.len())
            .map(|m| {
                let k2 = big.k_squared(m);
                let g = if k2 == 0.0 {
                    0.5 * radius * radius
                } else {
                    let s = (0.5 * radius * k2.sqrt()).sin();
                    2.0 * s * s / k2
                };
                Complex64::new(g / vol4, 0.0)
            })
            .collect();
        let kernel4 = Spectrum::from_raw(&big, coeffs).to_physical();
        drop(big);

        let padded = make_grid(2 * n, 2.0 * l)?;
        let m2 = 2 * n;
        let m4 = 4 * n;
        let wrap = |d: usize| if d < n { d } else { d + m4 - m2 };
        let big_index = |i: usize, j: usize, k: usize| (wrap(i) * m4 + wrap(j)) * m4 + wrap(k);
        let mut restricted = vec![0.0; padded.len()];
        for i in 0..m2 {
            for j in 0..m2 {
                for k in 0..m2 {
                    restricted[padded.index(i, j, k)] = kernel4.values()[big_index(i, j, k)];
                }
            }
        }
        let vol2 = (2.0 * l).powi(3);
        let kernel = ScalarField::from_raw(&padded, restricted)
            .spectral()
            .coefficients()
            .iter()
            .map(|c| -c * vol2)
            .collect();
        Ok(Self {
            grid: grid.clone(),
            padded,
            kernel,
        })
    }

    /// `m(∇)Δ⁻¹ρ` on the box, where `multiplier` maps a wavevector to the
    /// symbol `m(ik)`.
    pub(crate) fn solve(
        &self,
        rho: &ScalarField,
        multiplier: impl Fn([f64; 3]) -> Complex64,
    ) -> ScalarField {
        let n = self.grid.n();
        let h = n / 2;
        let mut padded = vec![0.0; self.padded.len()];
        for i in 0..n {
            for j in 0..n {
                for k in 0..n {
                    padded[self.padded.index(i + h, j + h, k + h)] = rho.values()[self.grid.index(i, j, k)];
                }
            }
        }
        let spec = ScalarField::from_raw(&self.padded, padded).spectral();
        let out = spec
            .map_modes(|m, c| c * self.kernel[m] * multiplier(self.padded.deriv_wavevector(m)))
            .to_physical();
        let mut values = vec![0.0; self.grid.len()];
        for i in 0..n {
            for j in 0..n {
                for k in 0..n {
                    values[self.grid.index(i, j, k)] = out.values()[self.padded.index(i + h, j + h, k + h)];
                }
            }
        }
        ScalarField::from_raw(&self.grid, values)
    }
}
