use num_complex::Complex64;

use crate::calculus::{
    pressure_from_stress, row_divergence, FieldPair, Tensor, SYM_PAIRS,
};
use crate::error::{Error, Result};
use crate::grid::{MatrixField, ScalarField, Spectrum, State, VectorField};

/// Which parts of the system are active, and the viscosity.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Physics {
    pub nu: f64,
    /// Quadratic terms `N₁`, `N₂` and the pressure.
    pub nonlinear: bool,
    /// Elastic forcing of `v` by `G` (`∇·G` and `∇·(GGᵀ)`).
    pub elastic: bool,
}

impl Physics {
    /// The full system.
    pub fn new(nu: f64) -> Self {
        Self {
            nu,
            nonlinear: true,
            elastic: true,
        }
    }

    /// Linear system `∂ₜG = ∇v`, `∂ₜv = ∇·G + νΔv`.
    pub fn linear(nu: f64) -> Self {
        Self {
            nu,
            nonlinear: false,
            elastic: true,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.nu.is_finite() && self.nu >= 0.0) {
            return Err(Error::Config(format!("viscosity must be >= 0, got {}", self.nu)));
        }
        Ok(())
    }
}

/// Time derivative of the state, with the pressure that enforces `∇·v = 0`.
#[derive(Clone, Debug)]
pub struct Rhs {
    pub dg: MatrixField,
    pub dv: VectorField,
    pub pi: ScalarField,
}

/// Right-hand side of the full system at viscosity `nu`.
pub fn rhs(state: &State, nu: f64) -> Result<Rhs> {
    rhs_with(state, &Physics::new(nu))
}

/// Right-hand side with selectable physics.
///
/// `dv` is the Leray projection of `∇·G + N₂` plus `νΔv`; `pi` is the
/// pressure from its closed formula for the active quadratic terms.
pub fn rhs_with(state: &State, physics: &Physics) -> Result<Rhs> {
    physics.validate()?;
    state.check_finite()?;
    let u = FieldPair::from_state(state);
    let mut du = nonviscous(&u, Some(state), physics);
    du.v.axpy(physics.nu, &u.v.laplacian());
    let grid = state.grid();
    let pi = if physics.nonlinear {
        let zero = MatrixField::zeros(grid);
        let g = if physics.elastic { &state.g } else { &zero };
        crate::calculus::pressure_solve(g, &state.v)
    } else {
        ScalarField::zeros(grid)
    };
    let out = du.to_state(state.t);
    Ok(Rhs {
        dg: out.g,
        dv: out.v,
        pi,
    })
}

/// Every term except `νΔv`, projected and dealiased, in spectral form.
///
/// `phys` may carry the physical samples of `u` to save two transforms.
pub(crate) fn nonviscous(u: &FieldPair, phys: Option<&State>, physics: &Physics) -> FieldPair {
    let grid = u.grid().clone();
    let mut dg = u.v.gradient();
    let mut dv = if physics.elastic {
        row_divergence(&u.g)
    } else {
        Tensor::zeros(&grid, 1)
    };

    if physics.nonlinear {
        let owned;
        let state = match phys {
            Some(s) => s,
            None => {
                owned = u.to_state(0.0);
                &owned
            }
        };
        let (n1, n2) = quadratic_terms(u, state, physics.elastic);
        dg.axpy(1.0, &n1);
        dv.axpy(1.0, &n2);
    }

    leray_in_place(&mut dv);
    for c in dv.components_mut() {
        c.coefficients_mut()[0] = Complex64::default();
    }
    FieldPair { g: dg, v: dv }
}

/// Dealiased `N₁ = ∇v G − v·∇G` and `N₂ = ∇·(GGᵀ) − v·∇v` (before projection).
fn quadratic_terms(u: &FieldPair, state: &State, elastic: bool) -> (Tensor, Tensor) {
    let grid = u.grid().clone();
    let n = grid.len();
    let gv = u.v.gradient().to_physical();
    let gg = u.g.gradient().to_physical();
    let g = |i: usize, j: usize| state.g.0[i][j].values();
    let v = |i: usize| state.v.0[i].values();

    let mut products: Vec<Vec<f64>> = Vec::with_capacity(18);
    for i in 0..3 {
        for j in 0..3 {
            let mut out = vec![0.0; n];
            for (p, slot) in out.iter_mut().enumerate() {
                let mut s = 0.0;
                for k in 0..3 {
                    s += gv[i * 3 + k].values()[p] * g(k, j)[p];
                    s -= v(k)[p] * gg[(i * 3 + j) * 3 + k].values()[p];
                }
                *slot = s;
            }
            products.push(out);
        }
    }
    for i in 0..3 {
        let mut out = vec![0.0; n];
        for (p, slot) in out.iter_mut().enumerate() {
            let mut s = 0.0;
            for j in 0..3 {
                s += v(j)[p] * gv[i * 3 + j].values()[p];
            }
            *slot = s;
        }
        products.push(out);
    }
    if elastic {
        for &(i, j) in &SYM_PAIRS {
            let mut out = vec![0.0; n];
            for (p, slot) in out.iter_mut().enumerate() {
                let mut s = 0.0;
                for k in 0..3 {
                    s += g(i, k)[p] * g(j, k)[p];
                }
                *slot = s;
            }
            products.push(out);
        }
    }

    let raw: Vec<&[f64]> = products.iter().map(|v| v.as_slice()).collect();
    let mut spectra: Vec<Spectrum> = grid
        .forward_batch(&raw)
        .into_iter()
        .map(|c| Spectrum::from_raw(&grid, c).dealias())
        .collect();
    let stress: Vec<Spectrum> = spectra.split_off(12);
    let convect: Vec<Spectrum> = spectra.split_off(9);
    let n1 = Tensor::from_components(&grid, 2, spectra);

    let mut n2: Vec<Spectrum> = convect.iter().map(|c| c.scale(-1.0)).collect();
    if elastic {
        for (s, &(i, j)) in stress.iter().zip(&SYM_PAIRS) {
            n2[i].axpy(1.0, &s.partial(j));
            if i != j {
                n2[j].axpy(1.0, &s.partial(i));
            }
        }
    }
    (n1, Tensor::from_components(&grid, 1, n2))
}

/// Removes the gradient part: `ŵ ← ŵ − k(k·ŵ)/|k|²`.
pub(crate) fn leray_in_place(w: &mut Tensor) {
    let grid = w.grid().clone();
    let comps = w.components_mut();
    for m in 0..grid.len() {
        let k = grid.deriv_wavevector(m);
        let k2 = k[0] * k[0] + k[1] * k[1] + k[2] * k[2];
        if k2 == 0.0 {
            continue;
        }
        let dot = (0..3)
            .map(|i| comps[i].coefficients()[m] * k[i])
            .fold(Complex64::default(), |a, b| a + b)
            / k2;
        for (i, c) in comps.iter_mut().enumerate() {
            c.coefficients_mut()[m] -= dot * k[i];
        }
    }
}

/// The non-projected assembly `∇·G + νΔv + N₂ − ∇π` with `π` from its
/// closed formula; agrees with [`Rhs::dv`] on admissible states.
pub fn dv_with_pressure(state: &State, physics: &Physics) -> Result<VectorField> {
    physics.validate()?;
    state.check_finite()?;
    let u = FieldPair::from_state(state);
    let grid = state.grid().clone();
    let mut dv = if physics.elastic {
        row_divergence(&u.g)
    } else {
        Tensor::zeros(&grid, 1)
    };
    dv.axpy(physics.nu, &u.v.laplacian());
    if physics.nonlinear {
        let (_, n2) = quadratic_terms(&u, state, physics.elastic);
        dv.axpy(1.0, &n2);
        let zero = MatrixField::zeros(&grid);
        let g = if physics.elastic { &state.g } else { &zero };
        let pi = pressure_from_stress(&crate::calculus::stress_spectra(g, &state.v));
        for a in 0..3 {
            dv.components_mut()[a].axpy(-1.0, &pi.partial(a));
        }
    }
    Ok(crate::calculus::TensorField::from_tensor(&dv))
}
