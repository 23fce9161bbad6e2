use std::ops::Index;
use std::sync::Arc;

use crate::grid::{MatrixField, ScalarField, SpectralGrid};

use super::tensor::{Tensor, TensorField};

/// Twenty-seven scalar components, `self.0[i][j][k]`.
#[derive(Clone, Debug)]
pub struct Rank3Field(pub [[[ScalarField; 3]; 3]; 3]);

impl Rank3Field {
    pub fn zeros(grid: &Arc<SpectralGrid>) -> Self {
        Self(std::array::from_fn(|_| {
            std::array::from_fn(|_| std::array::from_fn(|_| ScalarField::zeros(grid)))
        }))
    }

    pub fn grid(&self) -> &Arc<SpectralGrid> {
        self.0[0][0][0].grid()
    }

    /// Row-major component iterator.
    pub fn components(&self) -> impl Iterator<Item = &ScalarField> {
        self.0.iter().flat_map(|a| a.iter().flat_map(|b| b.iter()))
    }

    pub fn norm(&self) -> f64 {
        self.components()
            .map(ScalarField::norm_squared)
            .sum::<f64>()
            .sqrt()
    }

    pub fn max_abs(&self) -> f64 {
        self.components().map(ScalarField::max_abs).fold(0.0, f64::max)
    }
}

impl Index<(usize, usize, usize)> for Rank3Field {
    type Output = ScalarField;
    fn index(&self, (i, j, k): (usize, usize, usize)) -> &ScalarField {
        &self.0[i][j][k]
    }
}

/// `Q_ijk = G_lj ∂_l G_ik − G_lk ∂_l G_ij`, evaluated point-wise.
///
/// Only `j < k` is computed; the other entries are filled by antisymmetry,
/// so `Q_ijk = −Q_ikj` holds bit-for-bit.
pub fn q_compat(g: &MatrixField) -> Rank3Field {
    let grad = g.to_tensor().gradient().to_physical();
    // grad[(i*3 + k)*3 + l] = ∂_l G_ik
    let d = |i: usize, k: usize, l: usize| grad[(i * 3 + k) * 3 + l].values();
    let grid = g.grid().clone();
    let n = grid.len();
    let mut out = Rank3Field::zeros(&grid);
    for i in 0..3 {
        for (j, k) in [(0, 1), (0, 2), (1, 2)] {
            let mut q = vec![0.0; n];
            for (p, slot) in q.iter_mut().enumerate() {
                let mut a = 0.0;
                let mut b = 0.0;
                for l in 0..3 {
                    a += g.0[l][j].values()[p] * d(i, k, l)[p];
                    b += g.0[l][k].values()[p] * d(i, j, l)[p];
                }
                *slot = a - b;
            }
            let neg: Vec<f64> = q.iter().map(|v| -v).collect();
            out.0[i][j][k] = ScalarField::from_raw(&grid, q);
            out.0[i][k][j] = ScalarField::from_raw(&grid, neg);
        }
    }
    out
}

/// The curl-type combination `∂_k G_ij − ∂_j G_ik` as a spectral rank-3 tensor.
pub(crate) fn curl_g(g_hat: &Tensor) -> Tensor {
    let grad = g_hat.gradient();
    let mut comps = Vec::with_capacity(27);
    for flat in 0..27 {
        let [i, j, k] = [flat / 9, (flat / 3) % 3, flat % 3];
        let mut c = grad.component(&[i, j, k]).clone();
        c.axpy(-1.0, grad.component(&[i, k, j]));
        comps.push(c);
    }
    Tensor::from_components(g_hat.grid(), 3, comps)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::make_grid;

    #[test]
    fn constant_and_zero_give_zero() {
        let g = make_grid(8, 4.0).unwrap();
        assert_eq!(q_compat(&MatrixField::zeros(&g)).max_abs(), 0.0);
        let c = MatrixField::from_fn(&g, |_| [[0.1, 0.2, 0.3], [0.4, 0.5, 0.6], [0.7, 0.8, 0.9]]);
        assert!(q_compat(&c).max_abs() < 1e-14);
    }

    #[test]
    fn antisymmetric_bit_for_bit() {
        let g = make_grid(8, 5.0).unwrap();
        let m = MatrixField::from_fn(&g, |x| {
            std::array::from_fn(|i| {
                std::array::from_fn(|j| ((i + 1) as f64 * x[j]).sin() * 0.1)
            })
        });
        let q = q_compat(&m);
        for i in 0..3 {
            for j in 0..3 {
                for k in 0..3 {
                    let a = q[(i, j, k)].values();
                    let b = q[(i, k, j)].values();
                    assert!(a.iter().zip(b).all(|(x, y)| *x == -*y));
                }
            }
        }
    }
}
