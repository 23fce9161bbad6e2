//! Right-hand side assembly, time stepping and initial data.
//!
//! The unknown is `U = (G, v)` with
//!
//! ```text
//! ∂ₜG = ∇v + ∇v G − v·∇G
//! ∂ₜv = ∇·G + νΔv + ∇·(GGᵀ) − v·∇v − ∇π,   ∇·v = 0
//! ```
//!
//! where `(∇v)_ij = ∂_j v_i` and `(∇·G)_i = ∂_j G_ij`. Quadratic products are
//! dealiased with the two-thirds rule and the pressure is applied as a Leray
//! projection. Viscosity is integrated exactly by an integrating factor.

mod initial;
mod integrator;
mod rhs;

pub use initial::{make_initial_data, make_initial_data_with, plan_norm, DataKind, DataSpec};
pub use integrator::{cfl_dt, step, Integrator, IntegratorConfig, Scheme, BLOW_UP_FACTOR};
pub use rhs::{dv_with_pressure, rhs, rhs_with, Physics, Rhs};

#[cfg(test)]
mod tests;
