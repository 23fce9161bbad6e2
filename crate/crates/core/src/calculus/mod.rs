//! Differential operators, commuting vector fields, cutoffs, the pressure
//! solve and the compatibility tensor.
//!
//! Axes and generator indices are zero-based: `partial(f, 0)` is `∂₁` and
//! `omega_tilde(0, f)` is `Ω̃₁`. Coordinates are centered at the box midpoint.
//! The coordinate-multiplying operators ([`omega_tilde`], [`s0`]) are only
//! meaningful on fields that vanish near the box faces; callers window first.

mod compat;
mod cutoff;
mod plan;
mod tensor;
mod words;

use num_complex::Complex64;

pub use compat::{q_compat, Rank3Field};
pub(crate) use compat::curl_g;
pub use cutoff::{japanese, psi, psi_prime, CutoffDerivatives, CutoffFamily, Window};
pub(crate) use cutoff::radius;
pub use plan::{Generator, MultiIndexPlan, PlanCaps, Word};
pub use tensor::{Tensor, TensorField, ROTATIONS};
pub use words::{visit_words, FieldPair};

use crate::error::Result;
use crate::grid::{MatrixField, ScalarField, Spectrum, State, VectorField};

pub fn partial(f: &ScalarField, axis: usize) -> ScalarField {
    f.spectral().partial(axis).to_physical()
}

pub fn gradient(f: &ScalarField) -> VectorField {
    VectorField::from_tensor(&f.to_tensor().gradient())
}

/// `∇·v = ∂_i v_i`.
pub fn divergence_vec(v: &VectorField) -> ScalarField {
    let t = v.to_tensor();
    let mut acc = Spectrum::zeros(v.grid());
    for (i, c) in t.components().iter().enumerate() {
        acc.axpy(1.0, &c.partial(i));
    }
    acc.to_physical()
}

/// `(∇·G)_i = ∂_j G_ij`, contracting the column index.
pub fn divergence_mat(g: &MatrixField) -> VectorField {
    VectorField::from_tensor(&row_divergence(&g.to_tensor()))
}

/// `(∇·Gᵀ)_j = ∂_i G_ij`, contracting the row index.
pub fn divergence_transpose(g: &MatrixField) -> VectorField {
    VectorField::from_tensor(&column_divergence(&g.to_tensor()))
}

/// `(∇v)_ij = ∂_j v_i`.
pub fn gradient_vec(v: &VectorField) -> MatrixField {
    MatrixField::from_tensor(&v.to_tensor().gradient())
}

pub fn laplacian(f: &ScalarField) -> ScalarField {
    f.spectral().laplacian().to_physical()
}

pub(crate) fn row_divergence(g: &Tensor) -> Tensor {
    let comps = (0..3)
        .map(|i| {
            let mut acc = Spectrum::zeros(g.grid());
            for j in 0..3 {
                acc.axpy(1.0, &g.component(&[i, j]).partial(j));
            }
            acc
        })
        .collect();
    Tensor::from_components(g.grid(), 1, comps)
}

pub(crate) fn column_divergence(g: &Tensor) -> Tensor {
    let comps = (0..3)
        .map(|j| {
            let mut acc = Spectrum::zeros(g.grid());
            for i in 0..3 {
                acc.axpy(1.0, &g.component(&[i, j]).partial(i));
            }
            acc
        })
        .collect();
    Tensor::from_components(g.grid(), 1, comps)
}

/// Rotational derivative `Ω̃_l` with the matching index action.
pub fn omega_tilde<F: TensorField>(l: usize, f: &F) -> F {
    F::from_tensor(&f.to_tensor().omega_tilde(l))
}

/// Scaling derivative `S₀ = x·∇`, componentwise.
pub fn s0<F: TensorField>(f: &F) -> F {
    F::from_tensor(&f.to_tensor().s0())
}

/// `SU = t·∂ₜU + S₀U` for `U = (G, v)`, with `∂ₜU = (dg, dv)` supplied.
pub fn s_full(state: &State, dg: &MatrixField, dv: &VectorField) -> Result<State> {
    crate::grid::same_grid(state.grid(), dg.grid())?;
    crate::grid::same_grid(state.grid(), dv.grid())?;
    let t = state.t;
    let mut g = s0(&state.g);
    g.axpy(t, dg);
    let mut v = s0(&state.v);
    v.axpy(t, dv);
    State::new(t, g, v)
}

/// Symmetric stress pairs `(i, j)`, `i ≤ j`, in storage order.
pub(crate) const SYM_PAIRS: [(usize, usize); 6] = [(0, 0), (0, 1), (0, 2), (1, 1), (1, 2), (2, 2)];

/// Dealiased spectra of `T_ij = G_ik G_jk − v_i v_j` in [`SYM_PAIRS`] order.
pub(crate) fn stress_spectra(g: &MatrixField, v: &VectorField) -> Vec<Spectrum> {
    let grid = v.grid().clone();
    let n = grid.len();
    let prods: Vec<Vec<f64>> = SYM_PAIRS
        .iter()
        .map(|&(i, j)| {
            let mut out = vec![0.0; n];
            for (p, slot) in out.iter_mut().enumerate() {
                let mut s = -v.0[i].values()[p] * v.0[j].values()[p];
                for k in 0..3 {
                    s += g.0[i][k].values()[p] * g.0[j][k].values()[p];
                }
                *slot = s;
            }
            out
        })
        .collect();
    let raw: Vec<&[f64]> = prods.iter().map(|v| v.as_slice()).collect();
    grid.forward_batch(&raw)
        .into_iter()
        .map(|c| Spectrum::from_raw(&grid, c).dealias())
        .collect()
}

/// `π̂ = k_i k_j T̂_ij / |k|²` with the zero mode set to zero.
pub(crate) fn pressure_from_stress(stress: &[Spectrum]) -> Spectrum {
    let grid = stress[0].grid().clone();
    let mut out = vec![Complex64::default(); grid.len()];
    for (m, slot) in out.iter_mut().enumerate() {
        let k = grid.deriv_wavevector(m);
        let k2 = k[0] * k[0] + k[1] * k[1] + k[2] * k[2];
        if k2 == 0.0 {
            continue;
        }
        let mut s = Complex64::default();
        for (t, &(i, j)) in stress.iter().zip(&SYM_PAIRS) {
            let w = if i == j { 1.0 } else { 2.0 };
            s += t.coefficients()[m] * (w * k[i] * k[j]);
        }
        *slot = s / k2;
    }
    Spectrum::from_raw(&grid, out)
}

/// `π = Δ⁻¹∂_i∂_j[G_ik G_jk − v_i v_j]` with dealiased products and zero mean.
pub fn pressure_solve(g: &MatrixField, v: &VectorField) -> ScalarField {
    pressure_from_stress(&stress_spectra(g, v)).to_physical()
}

/// `‖Δπ − ∂_i∂_j T_ij‖₂` for the dealiased stress of `(G, v)`.
pub fn pressure_residual(g: &MatrixField, v: &VectorField, pi: &ScalarField) -> f64 {
    let stress = stress_spectra(g, v);
    let mut r = pi.spectral().laplacian();
    for (t, &(i, j)) in stress.iter().zip(&SYM_PAIRS) {
        let w = if i == j { 1.0 } else { 2.0 };
        r.axpy(-w, &t.partial(i).partial(j));
    }
    r.norm()
}

/// `∂_r f = ω·∇f`, set to zero at the grid point closest to the origin.
pub fn radial_derivative(f: &ScalarField) -> ScalarField {
    let grad = gradient(f);
    let grid = f.grid().clone();
    let half = 0.5 * grid.dx();
    let mut out = vec![0.0; grid.len()];
    grid.for_each_point(|p, x| {
        let r = radius(x);
        if r >= half {
            out[p] = (0..3).map(|a| x[a] * grad.0[a].values()[p]).sum::<f64>() / r;
        }
    });
    ScalarField::from_raw(&grid, out)
}

/// `∇f − (ω ∂_r f − (ω/r)∧Ωf)`, zero at the origin point.
pub fn gradient_decomposition_residual(f: &ScalarField) -> VectorField {
    let grad = gradient(f);
    let dr = radial_derivative(f);
    let grid = f.grid().clone();
    let half = 0.5 * grid.dx();
    let mut out: [Vec<f64>; 3] = std::array::from_fn(|_| vec![0.0; grid.len()]);
    grid.for_each_point(|p, x| {
        let r = radius(x);
        if r < half {
            return;
        }
        let w = [x[0] / r, x[1] / r, x[2] / r];
        let d = [grad.0[0].values()[p], grad.0[1].values()[p], grad.0[2].values()[p]];
        // Ωf = x ∧ ∇f
        let o = [
            x[1] * d[2] - x[2] * d[1],
            x[2] * d[0] - x[0] * d[2],
            x[0] * d[1] - x[1] * d[0],
        ];
        let cross = [
            w[1] * o[2] - w[2] * o[1],
            w[2] * o[0] - w[0] * o[2],
            w[0] * o[1] - w[1] * o[0],
        ];
        for a in 0..3 {
            out[a][p] = grad.0[a].values()[p] - (w[a] * dr.values()[p] - cross[a] / r);
        }
    });
    let [a, b, c] = out;
    VectorField([
        ScalarField::from_raw(&grid, a),
        ScalarField::from_raw(&grid, b),
        ScalarField::from_raw(&grid, c),
    ])
}
