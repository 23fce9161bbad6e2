use std::sync::Arc;

use num_complex::Complex64;

use crate::grid::{MatrixField, ScalarField, SpectralGrid, Spectrum, VectorField};

use super::compat::Rank3Field;

/// Rotation generators, `ROTATIONS[l][a][b]` is entry `(a, b)` of `Z_{l+1}`.
///
/// `Z_l x = e_l ∧ x`, so `Ω_l = ⟨Z_l x, ∇⟩` is the `l`-th component of `x ∧ ∇`.
pub const ROTATIONS: [[[f64; 3]; 3]; 3] = [
    [[0.0, 0.0, 0.0], [0.0, 0.0, -1.0], [0.0, 1.0, 0.0]],
    [[0.0, 0.0, 1.0], [0.0, 0.0, 0.0], [-1.0, 0.0, 0.0]],
    [[0.0, -1.0, 0.0], [1.0, 0.0, 0.0], [0.0, 0.0, 0.0]],
];

/// A rank-`r` tensor field held as `3^r` spectra, row-major in its indices.
///
/// The first index transforms contravariantly under rotations, every later
/// index covariantly. Scalars are rank 0, `v` rank 1, `G` rank 2 and the
/// compatibility tensor rank 3.
#[derive(Clone, Debug)]
pub struct Tensor {
    grid: Arc<SpectralGrid>,
    rank: usize,
    comps: Vec<Spectrum>,
}

/// A point-wise term `coef · x_coord · ∂_axis` of a first-order operator.
#[derive(Clone, Copy)]
struct Term {
    axis: usize,
    coord: usize,
    coef: f64,
}

impl Tensor {
    pub fn zeros(grid: &Arc<SpectralGrid>, rank: usize) -> Self {
        Self {
            grid: grid.clone(),
            rank,
            comps: (0..3usize.pow(rank as u32))
                .map(|_| Spectrum::zeros(grid))
                .collect(),
        }
    }

    /// Panics if the number of components is not `3^rank`.
    pub fn from_components(grid: &Arc<SpectralGrid>, rank: usize, comps: Vec<Spectrum>) -> Self {
        assert_eq!(comps.len(), 3usize.pow(rank as u32), "component count");
        Self {
            grid: grid.clone(),
            rank,
            comps,
        }
    }

    /// Transforms physical components, pairing them into complex FFTs.
    pub fn from_physical(rank: usize, fields: &[&ScalarField]) -> Self {
        let grid = fields[0].grid().clone();
        let raw: Vec<&[f64]> = fields.iter().map(|f| f.values()).collect();
        let comps = grid
            .forward_batch(&raw)
            .into_iter()
            .map(|c| Spectrum::from_raw(&grid, c))
            .collect();
        Self::from_components(&grid, rank, comps)
    }

    pub fn to_physical(&self) -> Vec<ScalarField> {
        let raw: Vec<&[Complex64]> = self.comps.iter().map(|c| c.coefficients()).collect();
        self.grid
            .inverse_batch(&raw)
            .into_iter()
            .map(|v| ScalarField::from_raw(&self.grid, v))
            .collect()
    }

    pub fn grid(&self) -> &Arc<SpectralGrid> {
        &self.grid
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    pub fn components(&self) -> &[Spectrum] {
        &self.comps
    }

    pub fn components_mut(&mut self) -> &mut [Spectrum] {
        &mut self.comps
    }

    pub fn into_components(self) -> Vec<Spectrum> {
        self.comps
    }

    /// Flat position of a multi-index.
    pub fn flat_index(idx: &[usize]) -> usize {
        idx.iter().fold(0, |acc, &i| acc * 3 + i)
    }

    /// Multi-index of a flat position.
    pub fn multi_index(rank: usize, mut flat: usize) -> Vec<usize> {
        let mut idx = vec![0; rank];
        for slot in idx.iter_mut().rev() {
            *slot = flat % 3;
            flat /= 3;
        }
        idx
    }

    pub fn component(&self, idx: &[usize]) -> &Spectrum {
        &self.comps[Self::flat_index(idx)]
    }

    pub fn map_components(&self, f: impl Fn(&Spectrum) -> Spectrum) -> Self {
        Self {
            grid: self.grid.clone(),
            rank: self.rank,
            comps: self.comps.iter().map(f).collect(),
        }
    }

    pub fn partial(&self, axis: usize) -> Self {
        self.map_components(|c| c.partial(axis))
    }

    pub fn laplacian(&self) -> Self {
        self.map_components(Spectrum::laplacian)
    }

    /// Appends a derivative index: `(∇T)_{I l} = ∂_l T_I`.
    pub fn gradient(&self) -> Self {
        let comps = self
            .comps
            .iter()
            .flat_map(|c| (0..3).map(move |l| c.partial(l)))
            .collect();
        Self {
            grid: self.grid.clone(),
            rank: self.rank + 1,
            comps,
        }
    }

    /// Componentwise plain rotation `Ω_l` (no index action).
    pub fn omega(&self, l: usize) -> Self {
        let z = &ROTATIONS[l];
        let mut terms = Vec::with_capacity(2);
        for (a, row) in z.iter().enumerate() {
            for (c, &coef) in row.iter().enumerate() {
                if coef != 0.0 {
                    terms.push(Term { axis: a, coord: c, coef });
                }
            }
        }
        self.coordinate_operator(&terms)
    }

    /// The rotational derivative `Ω̃_l` with its index action.
    pub fn omega_tilde(&self, l: usize) -> Self {
        let mut out = self.omega(l);
        self.add_rotation_action(l, -1.0, &mut out);
        for c in &mut out.comps {
            c.drop_nyquist_in_place();
        }
        out
    }

    /// Adds `s·(Z_l acting on the indices)` of `self` to `out`: minus the left
    /// action on the first index, plus the right action on the others.
    pub(crate) fn add_rotation_action(&self, l: usize, s: f64, out: &mut Self) {
        let z = &ROTATIONS[l];
        for flat in 0..self.comps.len() {
            let idx = Self::multi_index(self.rank, flat);
            for m in 0..self.rank {
                for j in 0..3 {
                    let coef = if m == 0 { z[idx[0]][j] } else { -z[j][idx[m]] };
                    if coef != 0.0 {
                        let mut other = idx.clone();
                        other[m] = j;
                        out.comps[flat].axpy(s * coef, &self.comps[Self::flat_index(&other)]);
                    }
                }
            }
        }
    }

    /// The scaling derivative `S₀ = x·∇`, componentwise.
    pub fn s0(&self) -> Self {
        let terms: Vec<Term> = (0..3)
            .map(|a| Term {
                axis: a,
                coord: a,
                coef: 1.0,
            })
            .collect();
        self.coordinate_operator(&terms)
    }

    /// Applies `Σ coef·x_coord·∂_axis` to every component: spectral
    /// derivatives, a point-wise product with the centered coordinates, then
    /// back to spectral space with the Nyquist planes removed.
    fn coordinate_operator(&self, terms: &[Term]) -> Self {
        let grid = &self.grid;
        let mut out = Vec::with_capacity(self.comps.len());
        for chunk in self.comps.chunks(2) {
            let derivs: Vec<Spectrum> = chunk
                .iter()
                .flat_map(|c| terms.iter().map(move |t| c.partial(t.axis)))
                .collect();
            let raw: Vec<&[Complex64]> = derivs.iter().map(|d| d.coefficients()).collect();
            let phys = grid.inverse_batch(&raw);
            let mut combined: Vec<Vec<f64>> = Vec::with_capacity(chunk.len());
            for d in phys.chunks(terms.len()) {
                let mut acc = vec![0.0; grid.len()];
                grid.for_each_point(|p, x| {
                    let mut s = 0.0;
                    for (t, values) in terms.iter().zip(d) {
                        s += t.coef * x[t.coord] * values[p];
                    }
                    acc[p] = s;
                });
                combined.push(acc);
            }
            let raw: Vec<&[f64]> = combined.iter().map(|v| v.as_slice()).collect();
            for c in grid.forward_batch(&raw) {
                let mut s = Spectrum::from_raw(grid, c);
                s.drop_nyquist_in_place();
                out.push(s);
            }
        }
        Self {
            grid: grid.clone(),
            rank: self.rank,
            comps: out,
        }
    }

    /// Multiplies every component point-wise by `w`.
    pub fn multiply(&self, w: &ScalarField) -> Self {
        let phys = self.to_physical();
        let prods: Vec<ScalarField> = phys.iter().map(|f| f.mul(w)).collect();
        let refs: Vec<&ScalarField> = prods.iter().collect();
        Self::from_physical(self.rank, &refs)
    }

    pub fn dealias(&self) -> Self {
        self.map_components(Spectrum::dealias)
    }

    /// Discrete L² norm squared, by Parseval.
    pub fn norm_squared(&self) -> f64 {
        self.comps.iter().map(|c| c.norm().powi(2)).sum()
    }

    pub fn norm(&self) -> f64 {
        self.norm_squared().sqrt()
    }

    /// `Σ |k|²|c_k|²·L³`, the squared L² norm of the gradient.
    pub fn gradient_norm_squared(&self) -> f64 {
        let vol = self.grid.length().powi(3);
        self.comps
            .iter()
            .map(|c| {
                c.coefficients()
                    .iter()
                    .enumerate()
                    .map(|(k, a)| {
                        let kv = self.grid.deriv_wavevector(k);
                        (kv[0] * kv[0] + kv[1] * kv[1] + kv[2] * kv[2]) * a.norm_sqr()
                    })
                    .sum::<f64>()
                    * vol
            })
            .sum()
    }

    pub fn axpy(&mut self, s: f64, other: &Self) {
        debug_assert_eq!(self.rank, other.rank);
        for (a, b) in self.comps.iter_mut().zip(&other.comps) {
            a.axpy(s, b);
        }
    }

    pub fn scale(&self, s: f64) -> Self {
        self.map_components(|c| c.scale(s))
    }
}

/// Physical fields that convert to and from [`Tensor`].
pub trait TensorField: Sized {
    const RANK: usize;

    fn to_tensor(&self) -> Tensor;

    /// Panics if the tensor rank does not match.
    fn from_tensor(t: &Tensor) -> Self;
}

impl TensorField for ScalarField {
    const RANK: usize = 0;

    fn to_tensor(&self) -> Tensor {
        Tensor::from_physical(0, &[self])
    }

    fn from_tensor(t: &Tensor) -> Self {
        assert_eq!(t.rank(), 0);
        t.components()[0].to_physical()
    }
}

impl TensorField for VectorField {
    const RANK: usize = 1;

    fn to_tensor(&self) -> Tensor {
        let refs: Vec<&ScalarField> = self.0.iter().collect();
        Tensor::from_physical(1, &refs)
    }

    fn from_tensor(t: &Tensor) -> Self {
        assert_eq!(t.rank(), 1);
        let mut it = t.to_physical().into_iter();
        VectorField(std::array::from_fn(|_| it.next().unwrap()))
    }
}

impl TensorField for MatrixField {
    const RANK: usize = 2;

    fn to_tensor(&self) -> Tensor {
        let refs: Vec<&ScalarField> = self.components().collect();
        Tensor::from_physical(2, &refs)
    }

    fn from_tensor(t: &Tensor) -> Self {
        assert_eq!(t.rank(), 2);
        let mut it = t.to_physical().into_iter();
        MatrixField(std::array::from_fn(|_| {
            std::array::from_fn(|_| it.next().unwrap())
        }))
    }
}

impl TensorField for Rank3Field {
    const RANK: usize = 3;

    fn to_tensor(&self) -> Tensor {
        let refs: Vec<&ScalarField> = self.components().collect();
        Tensor::from_physical(3, &refs)
    }

    fn from_tensor(t: &Tensor) -> Self {
        assert_eq!(t.rank(), 3);
        let mut it = t.to_physical().into_iter();
        Rank3Field(std::array::from_fn(|_| {
            std::array::from_fn(|_| std::array::from_fn(|_| it.next().unwrap()))
        }))
    }
}
