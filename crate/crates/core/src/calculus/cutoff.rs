use std::sync::Arc;

use crate::error::{Error, Result};
use crate::grid::{ScalarField, SpectralGrid};

fn bump(u: f64) -> f64 {
    if u > 0.0 {
        (-1.0 / u).exp()
    } else {
        0.0
    }
}

fn bump_prime(u: f64) -> f64 {
    if u > 0.0 {
        (-1.0 / u).exp() / (u * u)
    } else {
        0.0
    }
}

/// Smooth non-increasing transition: `1` for `s ≤ 1/2`, `0` for `s ≥ 1`.
pub fn psi(s: f64) -> f64 {
    let a = bump(2.0 * (1.0 - s));
    let b = bump(2.0 * s - 1.0);
    if b == 0.0 {
        1.0
    } else {
        a / (a + b)
    }
}

/// Derivative of [`psi`].
pub fn psi_prime(s: f64) -> f64 {
    let a = bump(2.0 * (1.0 - s));
    let b = bump(2.0 * s - 1.0);
    if a == 0.0 || b == 0.0 {
        return 0.0;
    }
    let da = -2.0 * bump_prime(2.0 * (1.0 - s));
    let db = 2.0 * bump_prime(2.0 * s - 1.0);
    (da * b - a * db) / ((a + b) * (a + b))
}

/// `⟨t⟩ = (1 + t²)^{1/2}`.
pub fn japanese(t: f64) -> f64 {
    (1.0 + t * t).sqrt()
}

/// The interior cutoff `ζ` and exterior cutoff `η` of aperture `σ`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CutoffFamily {
    sigma: f64,
}

impl Default for CutoffFamily {
    fn default() -> Self {
        Self { sigma: 0.25 }
    }
}

/// Point-wise derivatives of both cutoffs.
#[derive(Clone, Copy, Debug, Default)]
pub struct CutoffDerivatives {
    pub dt_zeta: f64,
    pub dt_eta: f64,
    pub grad_zeta: f64,
    pub grad_eta: f64,
}

impl CutoffFamily {
    pub fn new(sigma: f64) -> Result<Self> {
        if !(sigma.is_finite() && sigma > 0.0) {
            return Err(Error::Config(format!("sigma must be positive, got {sigma}")));
        }
        Ok(Self { sigma })
    }

    pub fn sigma(&self) -> f64 {
        self.sigma
    }

    /// `ζ = ψ(|x|/(σ⟨t⟩))`.
    pub fn zeta(&self, t: f64, x: [f64; 3]) -> f64 {
        psi(radius(x) / (self.sigma * japanese(t)))
    }

    /// `η = 1 − ψ(2|x|/(σ⟨t⟩))`.
    pub fn eta(&self, t: f64, x: [f64; 3]) -> f64 {
        1.0 - psi(2.0 * radius(x) / (self.sigma * japanese(t)))
    }

    /// Time derivatives and gradient magnitudes of `ζ` and `η` at radius `r`.
    pub fn derivatives(&self, t: f64, r: f64) -> CutoffDerivatives {
        let jt = japanese(t);
        let width = self.sigma * jt;
        let s1 = r / width;
        let s2 = 2.0 * r / width;
        let dlog = t / (jt * jt);
        CutoffDerivatives {
            dt_zeta: -psi_prime(s1) * s1 * dlog,
            dt_eta: psi_prime(s2) * s2 * dlog,
            grad_zeta: psi_prime(s1).abs() / width,
            grad_eta: 2.0 * psi_prime(s2).abs() / width,
        }
    }

    /// Sampled supremum of `⟨r+t⟩(|∂ₜζ| + |∂ₜη| + |∇ζ| + |∇η|)`.
    pub fn derivative_constant(&self) -> f64 {
        let mut sup: f64 = 0.0;
        for it in 0..=400 {
            let t = 1e-3 * (1e5f64).powf(it as f64 / 400.0) - 1e-3;
            let width = self.sigma * japanese(t);
            for is in 1..=400 {
                let r = width * is as f64 / 400.0;
                let d = self.derivatives(t, r);
                let w = japanese(r + t);
                sup = sup.max(w * (d.dt_zeta.abs() + d.dt_eta.abs() + d.grad_zeta + d.grad_eta));
            }
        }
        sup
    }

    pub fn zeta_field(&self, grid: &Arc<SpectralGrid>, t: f64) -> ScalarField {
        ScalarField::from_fn(grid, |x| self.zeta(t, x))
    }

    pub fn eta_field(&self, grid: &Arc<SpectralGrid>, t: f64) -> ScalarField {
        ScalarField::from_fn(grid, |x| self.eta(t, x))
    }
}

pub(crate) fn radius(x: [f64; 3]) -> f64 {
    (x[0] * x[0] + x[1] * x[1] + x[2] * x[2]).sqrt()
}

/// Fixed window applied before operators that multiply by coordinates.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Window {
    /// Radial plateau: `1` for `r ≤ inner`, smooth decay to `0` at `r = outer`.
    FlatTop { inner: f64, outer: f64 },
    /// `Π_j cos^{2m}(π x_j / L)`, band-limited to `|k_j| ≤ 2m·(2π/L)/2`.
    CosinePower { m: u32 },
}

impl Window {
    /// Flat top reaching to `L/4` and vanishing before the box faces.
    pub fn default_for(length: f64) -> Self {
        Window::FlatTop {
            inner: 0.25 * length,
            outer: 0.47 * length,
        }
    }

    pub fn value(&self, x: [f64; 3], length: f64) -> f64 {
        match *self {
            Window::FlatTop { inner, outer } => {
                let r = radius(x);
                psi(0.5 + 0.5 * (r - inner) / (outer - inner))
            }
            Window::CosinePower { m } => x
                .iter()
                .map(|xi| (std::f64::consts::PI * xi / length).cos().powi(2 * m as i32))
                .product(),
        }
    }

    pub fn field(&self, grid: &Arc<SpectralGrid>) -> ScalarField {
        let l = grid.length();
        ScalarField::from_fn(grid, |x| self.value(x, l))
    }
}
