use std::ops::{Add, Index, IndexMut, Mul, Neg, Sub};
use std::sync::Arc;

use num_complex::Complex64;

use super::{same_grid, SpectralGrid};
use crate::error::{Error, Result};

/// Real samples of a scalar function on the grid.
#[derive(Clone, Debug)]
pub struct ScalarField {
    grid: Arc<SpectralGrid>,
    data: Vec<f64>,
}

/// Fourier-series coefficients of a real field.
#[derive(Clone, Debug)]
pub struct Spectrum {
    grid: Arc<SpectralGrid>,
    data: Vec<Complex64>,
}

impl ScalarField {
    pub fn zeros(grid: &Arc<SpectralGrid>) -> Self {
        Self {
            grid: grid.clone(),
            data: vec![0.0; grid.len()],
        }
    }

    pub fn constant(grid: &Arc<SpectralGrid>, value: f64) -> Self {
        Self {
            grid: grid.clone(),
            data: vec![value; grid.len()],
        }
    }

    /// Samples `f` at the centered grid positions.
    pub fn from_fn(grid: &Arc<SpectralGrid>, f: impl Fn([f64; 3]) -> f64) -> Self {
        let mut data = vec![0.0; grid.len()];
        grid.for_each_point(|p, x| data[p] = f(x));
        Self {
            grid: grid.clone(),
            data,
        }
    }

    pub fn from_vec(grid: &Arc<SpectralGrid>, data: Vec<f64>) -> Result<Self> {
        if data.len() != grid.len() {
            return Err(Error::InvalidGrid(format!(
                "expected {} samples, got {}",
                grid.len(),
                data.len()
            )));
        }
        Ok(Self {
            grid: grid.clone(),
            data,
        })
    }

    pub(crate) fn from_raw(grid: &Arc<SpectralGrid>, data: Vec<f64>) -> Self {
        debug_assert_eq!(data.len(), grid.len());
        Self {
            grid: grid.clone(),
            data,
        }
    }

    pub fn grid(&self) -> &Arc<SpectralGrid> {
        &self.grid
    }

    pub fn values(&self) -> &[f64] {
        &self.data
    }

    pub fn values_mut(&mut self) -> &mut [f64] {
        &mut self.data
    }

    pub fn into_values(self) -> Vec<f64> {
        self.data
    }

    pub fn check_finite(&self, what: &'static str) -> Result<()> {
        match self.data.iter().position(|v| !v.is_finite()) {
            Some(index) => Err(Error::NonFinite { what, index }),
            None => Ok(()),
        }
    }

    /// Forward transform; rejects non-finite samples.
    pub fn to_spectral(&self) -> Result<Spectrum> {
        self.check_finite("field")?;
        Ok(self.spectral())
    }

    pub(crate) fn spectral(&self) -> Spectrum {
        Spectrum {
            grid: self.grid.clone(),
            data: self.grid.forward_raw(&self.data),
        }
    }

    /// Discrete L² norm `(dx³ Σ f²)^{1/2}`.
    pub fn norm(&self) -> f64 {
        self.norm_squared().sqrt()
    }

    pub fn norm_squared(&self) -> f64 {
        self.grid.cell_volume() * self.data.iter().map(|v| v * v).sum::<f64>()
    }

    /// Discrete L² inner product.
    pub fn inner(&self, other: &Self) -> f64 {
        self.grid.cell_volume()
            * self
                .data
                .iter()
                .zip(&other.data)
                .map(|(a, b)| a * b)
                .sum::<f64>()
    }

    pub fn integral(&self) -> f64 {
        self.grid.cell_volume() * self.data.iter().sum::<f64>()
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    pub fn map(&self, f: impl Fn(f64) -> f64) -> Self {
        Self {
            grid: self.grid.clone(),
            data: self.data.iter().map(|&v| f(v)).collect(),
        }
    }

    /// Pointwise combination of two fields on the same grid.
    pub fn zip_with(&self, other: &Self, f: impl Fn(f64, f64) -> f64) -> Self {
        debug_assert!(same_grid(&self.grid, &other.grid).is_ok());
        Self {
            grid: self.grid.clone(),
            data: self
                .data
                .iter()
                .zip(&other.data)
                .map(|(&a, &b)| f(a, b))
                .collect(),
        }
    }

    /// Pointwise product.
    pub fn mul(&self, other: &Self) -> Self {
        self.zip_with(other, |a, b| a * b)
    }

    pub fn scale(&self, s: f64) -> Self {
        self.map(|v| v * s)
    }

    /// `self += s·other`.
    pub fn axpy(&mut self, s: f64, other: &Self) {
        self.data
            .iter_mut()
            .zip(&other.data)
            .for_each(|(a, b)| *a += s * b);
    }

    /// Multiplies pointwise by a function of position.
    pub fn mul_fn(&self, f: impl Fn([f64; 3]) -> f64) -> Self {
        let mut data = self.data.clone();
        self.grid.for_each_point(|p, x| data[p] *= f(x));
        Self {
            grid: self.grid.clone(),
            data,
        }
    }

    /// Multiplies pointwise by the centered coordinate `x_axis`.
    pub fn mul_coordinate(&self, axis: usize) -> Self {
        self.mul_fn(|x| x[axis])
    }
}

impl Spectrum {
    pub fn zeros(grid: &Arc<SpectralGrid>) -> Self {
        Self {
            grid: grid.clone(),
            data: vec![Complex64::default(); grid.len()],
        }
    }

    pub(crate) fn from_raw(grid: &Arc<SpectralGrid>, data: Vec<Complex64>) -> Self {
        debug_assert_eq!(data.len(), grid.len());
        Self {
            grid: grid.clone(),
            data,
        }
    }

    pub fn grid(&self) -> &Arc<SpectralGrid> {
        &self.grid
    }

    pub fn coefficients(&self) -> &[Complex64] {
        &self.data
    }

    pub fn coefficients_mut(&mut self) -> &mut [Complex64] {
        &mut self.data
    }

    /// Inverse transform to grid samples.
    pub fn to_physical(&self) -> ScalarField {
        ScalarField {
            grid: self.grid.clone(),
            data: self.grid.inverse_raw(&self.data),
        }
    }

    /// Zeroes every mode outside the two-thirds mask.
    pub fn dealias(&self) -> Self {
        let mut out = self.clone();
        out.dealias_in_place();
        out
    }

    pub fn dealias_in_place(&mut self) {
        let grid = self.grid.clone();
        for (k, c) in self.data.iter_mut().enumerate() {
            if !grid.is_kept(k) {
                *c = Complex64::default();
            }
        }
    }

    /// Zeroes the modes on the Nyquist planes.
    pub fn drop_nyquist_in_place(&mut self) {
        let grid = self.grid.clone();
        for (k, c) in self.data.iter_mut().enumerate() {
            if grid.is_nyquist(k) {
                *c = Complex64::default();
            }
        }
    }

    pub fn map_modes(&self, f: impl Fn(usize, Complex64) -> Complex64) -> Self {
        Self {
            grid: self.grid.clone(),
            data: self.data.iter().enumerate().map(|(k, &c)| f(k, c)).collect(),
        }
    }

    /// Spectral `∂/∂x_axis`.
    pub fn partial(&self, axis: usize) -> Self {
        let g = self.grid.clone();
        self.map_modes(|k, c| c * Complex64::new(0.0, g.deriv_wavevector(k)[axis]))
    }

    /// Spectral Laplacian with multiplier `−|k|²`.
    pub fn laplacian(&self) -> Self {
        let g = self.grid.clone();
        self.map_modes(|k, c| c * -g.k_squared(k))
    }

    /// `(L³ Σ |c_k|²)^{1/2}`, equal to the physical discrete L² norm.
    pub fn norm(&self) -> f64 {
        let vol = self.grid.length().powi(3);
        (vol * self.data.iter().map(|c| c.norm_sqr()).sum::<f64>()).sqrt()
    }

    pub fn axpy(&mut self, s: f64, other: &Self) {
        self.data
            .iter_mut()
            .zip(&other.data)
            .for_each(|(a, b)| *a += b * s);
    }

    pub fn scale(&self, s: f64) -> Self {
        self.map_modes(|_, c| c * s)
    }
}

/// Three scalar components.
#[derive(Clone, Debug)]
pub struct VectorField(pub [ScalarField; 3]);

/// Nine scalar components, `self.0[i][j]` is row `i`, column `j`.
#[derive(Clone, Debug)]
pub struct MatrixField(pub [[ScalarField; 3]; 3]);

impl VectorField {
    pub fn zeros(grid: &Arc<SpectralGrid>) -> Self {
        Self(std::array::from_fn(|_| ScalarField::zeros(grid)))
    }

    pub fn from_fn(grid: &Arc<SpectralGrid>, f: impl Fn([f64; 3]) -> [f64; 3]) -> Self {
        Self(std::array::from_fn(|i| ScalarField::from_fn(grid, |x| f(x)[i])))
    }

    pub fn grid(&self) -> &Arc<SpectralGrid> {
        self.0[0].grid()
    }

    pub fn norm(&self) -> f64 {
        self.norm_squared().sqrt()
    }

    pub fn norm_squared(&self) -> f64 {
        self.0.iter().map(ScalarField::norm_squared).sum()
    }

    pub fn inner(&self, other: &Self) -> f64 {
        (0..3).map(|i| self.0[i].inner(&other.0[i])).sum()
    }

    /// Largest pointwise Euclidean length.
    pub fn max_magnitude(&self) -> f64 {
        let n = self.grid().len();
        (0..n)
            .map(|p| self.at(p).iter().map(|v| v * v).sum::<f64>().sqrt())
            .fold(0.0, f64::max)
    }

    pub fn max_abs(&self) -> f64 {
        self.0.iter().map(ScalarField::max_abs).fold(0.0, f64::max)
    }

    #[inline]
    pub fn at(&self, p: usize) -> [f64; 3] {
        std::array::from_fn(|i| self.0[i].values()[p])
    }

    pub fn map(&self, f: impl Fn(&ScalarField) -> ScalarField) -> Self {
        Self(std::array::from_fn(|i| f(&self.0[i])))
    }

    pub fn scale(&self, s: f64) -> Self {
        self.map(|c| c.scale(s))
    }

    pub fn axpy(&mut self, s: f64, other: &Self) {
        for i in 0..3 {
            self.0[i].axpy(s, &other.0[i]);
        }
    }

    pub fn check_finite(&self, what: &'static str) -> Result<()> {
        self.0.iter().try_for_each(|c| c.check_finite(what))
    }
}

impl MatrixField {
    pub fn zeros(grid: &Arc<SpectralGrid>) -> Self {
        Self(std::array::from_fn(|_| {
            std::array::from_fn(|_| ScalarField::zeros(grid))
        }))
    }

    /// Constant multiple of the identity.
    pub fn identity(grid: &Arc<SpectralGrid>, c: f64) -> Self {
        Self(std::array::from_fn(|i| {
            std::array::from_fn(|j| ScalarField::constant(grid, if i == j { c } else { 0.0 }))
        }))
    }

    pub fn from_fn(grid: &Arc<SpectralGrid>, f: impl Fn([f64; 3]) -> [[f64; 3]; 3]) -> Self {
        Self(std::array::from_fn(|i| {
            std::array::from_fn(|j| ScalarField::from_fn(grid, |x| f(x)[i][j]))
        }))
    }

    pub fn grid(&self) -> &Arc<SpectralGrid> {
        self.0[0][0].grid()
    }

    pub fn norm(&self) -> f64 {
        self.norm_squared().sqrt()
    }

    pub fn norm_squared(&self) -> f64 {
        self.components().map(ScalarField::norm_squared).sum()
    }

    pub fn inner(&self, other: &Self) -> f64 {
        let mut s = 0.0;
        for i in 0..3 {
            for j in 0..3 {
                s += self.0[i][j].inner(&other.0[i][j]);
            }
        }
        s
    }

    pub fn max_abs(&self) -> f64 {
        self.components().map(ScalarField::max_abs).fold(0.0, f64::max)
    }

    /// Row-major component iterator.
    pub fn components(&self) -> impl Iterator<Item = &ScalarField> {
        self.0.iter().flat_map(|row| row.iter())
    }

    #[inline]
    pub fn at(&self, p: usize) -> [[f64; 3]; 3] {
        std::array::from_fn(|i| std::array::from_fn(|j| self.0[i][j].values()[p]))
    }

    pub fn transpose(&self) -> Self {
        Self(std::array::from_fn(|i| {
            std::array::from_fn(|j| self.0[j][i].clone())
        }))
    }

    pub fn map(&self, f: impl Fn(&ScalarField) -> ScalarField) -> Self {
        Self(std::array::from_fn(|i| std::array::from_fn(|j| f(&self.0[i][j]))))
    }

    pub fn scale(&self, s: f64) -> Self {
        self.map(|c| c.scale(s))
    }

    pub fn axpy(&mut self, s: f64, other: &Self) {
        for i in 0..3 {
            for j in 0..3 {
                self.0[i][j].axpy(s, &other.0[i][j]);
            }
        }
    }

    pub fn check_finite(&self, what: &'static str) -> Result<()> {
        self.components().try_for_each(|c| c.check_finite(what))
    }
}

impl Index<usize> for VectorField {
    type Output = ScalarField;
    fn index(&self, i: usize) -> &ScalarField {
        &self.0[i]
    }
}

impl IndexMut<usize> for VectorField {
    fn index_mut(&mut self, i: usize) -> &mut ScalarField {
        &mut self.0[i]
    }
}

impl Index<(usize, usize)> for MatrixField {
    type Output = ScalarField;
    fn index(&self, (i, j): (usize, usize)) -> &ScalarField {
        &self.0[i][j]
    }
}

impl IndexMut<(usize, usize)> for MatrixField {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut ScalarField {
        &mut self.0[i][j]
    }
}

macro_rules! impl_linear_ops {
    ($ty:ty, $zip:expr) => {
        impl Add for &$ty {
            type Output = $ty;
            fn add(self, rhs: Self) -> $ty {
                $zip(self, rhs, |a: f64, b: f64| a + b)
            }
        }
        impl Sub for &$ty {
            type Output = $ty;
            fn sub(self, rhs: Self) -> $ty {
                $zip(self, rhs, |a: f64, b: f64| a - b)
            }
        }
        impl Mul<f64> for &$ty {
            type Output = $ty;
            fn mul(self, s: f64) -> $ty {
                self.scale(s)
            }
        }
        impl Neg for &$ty {
            type Output = $ty;
            fn neg(self) -> $ty {
                self.scale(-1.0)
            }
        }
    };
}

fn zip_scalar(a: &ScalarField, b: &ScalarField, f: fn(f64, f64) -> f64) -> ScalarField {
    a.zip_with(b, f)
}

fn zip_vector(a: &VectorField, b: &VectorField, f: fn(f64, f64) -> f64) -> VectorField {
    VectorField(std::array::from_fn(|i| a.0[i].zip_with(&b.0[i], f)))
}

fn zip_matrix(a: &MatrixField, b: &MatrixField, f: fn(f64, f64) -> f64) -> MatrixField {
    MatrixField(std::array::from_fn(|i| {
        std::array::from_fn(|j| a.0[i][j].zip_with(&b.0[i][j], f))
    }))
}

impl_linear_ops!(ScalarField, zip_scalar);
impl_linear_ops!(VectorField, zip_vector);
impl_linear_ops!(MatrixField, zip_matrix);

impl Add for &Spectrum {
    type Output = Spectrum;
    fn add(self, rhs: Self) -> Spectrum {
        let mut out = self.clone();
        out.axpy(1.0, rhs);
        out
    }
}

impl Sub for &Spectrum {
    type Output = Spectrum;
    fn sub(self, rhs: Self) -> Spectrum {
        let mut out = self.clone();
        out.axpy(-1.0, rhs);
        out
    }
}
