//! Periodic-box discretization and the physical/spectral transform pair.
//!
//! The box is `[-L/2, L/2)³` with `n` points per axis. Physical samples sit at
//! centered coordinates `x_i = i·dx − L/2`, flattened row-major with `x₃`
//! fastest. Spectral coefficients use the same flattening in FFT order and are
//! normalized as Fourier-series coefficients: a constant field `c` maps to a
//! single zero-mode coefficient `c`.

mod fft;
mod field;
pub mod snapshot;
mod state;

use std::fmt;
use std::sync::Arc;

use num_complex::Complex64;

pub use field::{MatrixField, ScalarField, Spectrum, VectorField};
pub use state::State;

use crate::error::{Error, Result};
use fft::Fft3;

/// Uniform periodic grid with cached wavenumbers, dealias mask and FFT plans.
pub struct SpectralGrid {
    n: usize,
    length: f64,
    dx: f64,
    /// Per-axis wavenumbers in FFT order; index `n/2` carries `−n/2·2π/L`.
    wavenumbers: Vec<f64>,
    /// Per-axis wavenumbers used by first derivatives (Nyquist entry zeroed so
    /// that real fields stay real).
    deriv_wavenumbers: Vec<f64>,
    /// Per-axis two-thirds mask.
    keep: Vec<bool>,
    coords: Vec<f64>,
    fft: Fft3,
}

impl fmt::Debug for SpectralGrid {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("SpectralGrid")
            .field("n", &self.n)
            .field("length", &self.length)
            .finish()
    }
}

impl PartialEq for SpectralGrid {
    fn eq(&self, other: &Self) -> bool {
        self.n == other.n && self.length.to_bits() == other.length.to_bits()
    }
}

/// Builds a grid; `n` must be even and at least 8, `length` positive.
pub fn make_grid(n: usize, length: f64) -> Result<Arc<SpectralGrid>> {
    SpectralGrid::new(n, length)
}

impl SpectralGrid {
    pub fn new(n: usize, length: f64) -> Result<Arc<Self>> {
        if n < 8 || n % 2 != 0 {
            return Err(Error::InvalidGrid(format!(
                "points per axis must be even and >= 8, got {n}"
            )));
        }
        if !(length.is_finite() && length > 0.0) {
            return Err(Error::InvalidGrid(format!(
                "box length must be positive, got {length}"
            )));
        }
        let base = 2.0 * std::f64::consts::PI / length;
        let wavenumbers: Vec<f64> = (0..n)
            .map(|i| {
                let m = if i < n / 2 { i as i64 } else { i as i64 - n as i64 };
                m as f64 * base
            })
            .collect();
        let mut deriv_wavenumbers = wavenumbers.clone();
        deriv_wavenumbers[n / 2] = 0.0;
        let cutoff = n as f64 / 3.0 * base;
        let keep = wavenumbers.iter().map(|k| k.abs() < cutoff).collect();
        let dx = length / n as f64;
        let coords = (0..n).map(|i| i as f64 * dx - 0.5 * length).collect();
        Ok(Arc::new(Self {
            n,
            length,
            dx,
            wavenumbers,
            deriv_wavenumbers,
            keep,
            coords,
            fft: Fft3::new(n),
        }))
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn length(&self) -> f64 {
        self.length
    }

    pub fn dx(&self) -> f64 {
        self.dx
    }

    /// Number of grid points, `n³`.
    pub fn len(&self) -> usize {
        self.n * self.n * self.n
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// Volume of one cell, the quadrature weight of the discrete L² product.
    pub fn cell_volume(&self) -> f64 {
        self.dx * self.dx * self.dx
    }

    /// Per-axis wavenumbers in FFT order.
    pub fn wavenumbers(&self) -> &[f64] {
        &self.wavenumbers
    }

    /// Per-axis wavenumbers with the Nyquist entry zeroed.
    pub fn deriv_wavenumbers(&self) -> &[f64] {
        &self.deriv_wavenumbers
    }

    /// Centered coordinates along one axis.
    pub fn coordinates(&self) -> &[f64] {
        &self.coords
    }

    #[inline]
    pub fn index(&self, i: usize, j: usize, l: usize) -> usize {
        (i * self.n + j) * self.n + l
    }

    #[inline]
    pub fn unflatten(&self, flat: usize) -> [usize; 3] {
        let n = self.n;
        [flat / (n * n), (flat / n) % n, flat % n]
    }

    /// Centered position of a flat index.
    #[inline]
    pub fn position(&self, flat: usize) -> [f64; 3] {
        let [i, j, l] = self.unflatten(flat);
        [self.coords[i], self.coords[j], self.coords[l]]
    }

    /// Full wavevector of a flat spectral index.
    #[inline]
    pub fn wavevector(&self, flat: usize) -> [f64; 3] {
        let [i, j, l] = self.unflatten(flat);
        [self.wavenumbers[i], self.wavenumbers[j], self.wavenumbers[l]]
    }

    /// Wavevector used by first derivatives.
    #[inline]
    pub fn deriv_wavevector(&self, flat: usize) -> [f64; 3] {
        let [i, j, l] = self.unflatten(flat);
        [
            self.deriv_wavenumbers[i],
            self.deriv_wavenumbers[j],
            self.deriv_wavenumbers[l],
        ]
    }

    /// `|k|²` from the full wavevector.
    #[inline]
    pub fn k_squared(&self, flat: usize) -> f64 {
        let k = self.wavevector(flat);
        k[0] * k[0] + k[1] * k[1] + k[2] * k[2]
    }

    /// Two-thirds rule: true iff every `|k_j| < (n/3)·2π/L`.
    #[inline]
    pub fn is_kept(&self, flat: usize) -> bool {
        let [i, j, l] = self.unflatten(flat);
        self.keep[i] && self.keep[j] && self.keep[l]
    }

    /// True iff the mode has an index on a Nyquist plane.
    #[inline]
    pub fn is_nyquist(&self, flat: usize) -> bool {
        let h = self.n / 2;
        let [i, j, l] = self.unflatten(flat);
        i == h || j == h || l == h
    }

    /// Flat index of the mode `−k`.
    #[inline]
    pub fn mirror(&self, flat: usize) -> usize {
        let n = self.n;
        let [i, j, l] = self.unflatten(flat);
        self.index((n - i) % n, (n - j) % n, (n - l) % n)
    }

    pub(crate) fn forward_raw(&self, values: &[f64]) -> Vec<Complex64> {
        let mut data: Vec<Complex64> = values.iter().map(|&v| Complex64::new(v, 0.0)).collect();
        self.fft.process(&mut data, false);
        let scale = 1.0 / self.len() as f64;
        data.iter_mut().for_each(|c| *c *= scale);
        data
    }

    pub(crate) fn inverse_raw(&self, coeffs: &[Complex64]) -> Vec<f64> {
        let mut data = coeffs.to_vec();
        self.fft.process(&mut data, true);
        data.into_iter().map(|c| c.re).collect()
    }

    /// Transforms two real arrays with one complex FFT.
    pub(crate) fn forward_pair_raw(&self, a: &[f64], b: &[f64]) -> (Vec<Complex64>, Vec<Complex64>) {
        let mut data: Vec<Complex64> = a
            .iter()
            .zip(b)
            .map(|(&x, &y)| Complex64::new(x, y))
            .collect();
        self.fft.process(&mut data, false);
        let scale = 0.5 / self.len() as f64;
        let mut fa = vec![Complex64::default(); data.len()];
        let mut fb = vec![Complex64::default(); data.len()];
        for k in 0..data.len() {
            let h = data[k];
            let hm = data[self.mirror(k)].conj();
            fa[k] = (h + hm) * scale;
            // (h − hm) / (2i)
            let d = (h - hm) * scale;
            fb[k] = Complex64::new(d.im, -d.re);
        }
        (fa, fb)
    }

    /// Inverse-transforms two Hermitian spectra with one complex FFT.
    pub(crate) fn inverse_pair_raw(&self, a: &[Complex64], b: &[Complex64]) -> (Vec<f64>, Vec<f64>) {
        let mut data: Vec<Complex64> = a
            .iter()
            .zip(b)
            .map(|(&x, &y)| x + Complex64::new(-y.im, y.re))
            .collect();
        self.fft.process(&mut data, true);
        data.into_iter().map(|c| (c.re, c.im)).unzip()
    }
}

impl SpectralGrid {
    /// Forward transforms of many real arrays, two per complex FFT.
    pub(crate) fn forward_batch(&self, fields: &[&[f64]]) -> Vec<Vec<Complex64>> {
        let mut out = Vec::with_capacity(fields.len());
        let mut chunks = fields.chunks_exact(2);
        for pair in &mut chunks {
            let (a, b) = self.forward_pair_raw(pair[0], pair[1]);
            out.push(a);
            out.push(b);
        }
        if let [last] = chunks.remainder() {
            out.push(self.forward_raw(last));
        }
        out
    }

    /// Inverse transforms of many Hermitian spectra, two per complex FFT.
    pub(crate) fn inverse_batch(&self, spectra: &[&[Complex64]]) -> Vec<Vec<f64>> {
        let mut out = Vec::with_capacity(spectra.len());
        let mut chunks = spectra.chunks_exact(2);
        for pair in &mut chunks {
            let (a, b) = self.inverse_pair_raw(pair[0], pair[1]);
            out.push(a);
            out.push(b);
        }
        if let [last] = chunks.remainder() {
            out.push(self.inverse_raw(last));
        }
        out
    }

    /// Calls `f(p, x)` for every flat index `p` with centered position `x`.
    #[inline]
    pub(crate) fn for_each_point(&self, mut f: impl FnMut(usize, [f64; 3])) {
        let c = &self.coords;
        let mut p = 0;
        for &x1 in c {
            for &x2 in c {
                for &x3 in c {
                    f(p, [x1, x2, x3]);
                    p += 1;
                }
            }
        }
    }
}

/// Checks that two grid handles describe the same discretization.
pub(crate) fn same_grid(a: &Arc<SpectralGrid>, b: &Arc<SpectralGrid>) -> Result<()> {
    if Arc::ptr_eq(a, b) || **a == **b {
        Ok(())
    } else {
        Err(Error::GridMismatch)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn wavenumbers_n8() {
        let g = make_grid(8, 2.0 * std::f64::consts::PI).unwrap();
        let mut ks: Vec<i64> = g.wavenumbers().iter().map(|k| k.round() as i64).collect();
        ks.sort();
        assert_eq!(ks, vec![-4, -3, -2, -1, 0, 1, 2, 3]);
        assert!((g.dx() * 8.0 - g.length()).abs() == 0.0);
    }

    #[test]
    fn dealias_keeps_ten_at_n32() {
        let g = make_grid(32, 2.0 * std::f64::consts::PI).unwrap();
        let kept: Vec<i64> = g
            .wavenumbers()
            .iter()
            .zip(&g.keep)
            .filter(|(_, &k)| k)
            .map(|(w, _)| w.round() as i64)
            .collect();
        assert_eq!(kept.iter().map(|k| k.abs()).max(), Some(10));
        assert_eq!(kept.len(), 21);
    }

    #[test]
    fn rejects_bad_sizes() {
        assert!(make_grid(7, 1.0).is_err());
        assert!(make_grid(6, 1.0).is_err());
        assert!(make_grid(9, 1.0).is_err());
        assert!(make_grid(8, 0.0).is_err());
        assert!(make_grid(8, -1.0).is_err());
        assert!(make_grid(8, f64::NAN).is_err());
    }

    #[test]
    fn mirror_is_involution() {
        let g = make_grid(8, 1.0).unwrap();
        for k in 0..g.len() {
            assert_eq!(g.mirror(g.mirror(k)), k);
        }
    }
}
