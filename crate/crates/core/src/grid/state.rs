use std::sync::Arc;

use super::{same_grid, MatrixField, SpectralGrid, VectorField};
use crate::error::Result;

/// Time stamp with displacement gradient `G = F − I` and velocity `v`.
#[derive(Clone, Debug)]
pub struct State {
    pub t: f64,
    pub g: MatrixField,
    pub v: VectorField,
}

impl State {
    pub fn zeros(grid: &Arc<SpectralGrid>, t: f64) -> Self {
        Self {
            t,
            g: MatrixField::zeros(grid),
            v: VectorField::zeros(grid),
        }
    }

    pub fn new(t: f64, g: MatrixField, v: VectorField) -> Result<Self> {
        same_grid(g.grid(), v.grid())?;
        Ok(Self { t, g, v })
    }

    pub fn grid(&self) -> &Arc<SpectralGrid> {
        self.v.grid()
    }

    /// `‖U‖₂ = (‖G‖² + ‖v‖²)^{1/2}`.
    pub fn norm(&self) -> f64 {
        (self.g.norm_squared() + self.v.norm_squared()).sqrt()
    }

    /// Largest absolute component over `G` and `v`.
    pub fn max_abs(&self) -> f64 {
        self.g.max_abs().max(self.v.max_abs())
    }

    pub fn check_finite(&self) -> Result<()> {
        self.g.check_finite("G")?;
        self.v.check_finite("v")
    }

    /// Twelve components in snapshot order: `G` row-major then `v`.
    pub fn components(&self) -> impl Iterator<Item = &super::ScalarField> {
        self.g.components().chain(self.v.0.iter())
    }
}
