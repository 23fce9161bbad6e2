//! Pseudo-spectral simulator for three-dimensional incompressible Hookean
//! viscoelastic flow, with weighted-energy diagnostics and a verification
//! suite for the identities behind them.
//!
//! ```
//! use velab::dynamics::{make_initial_data, DataKind};
//! use velab::grid::make_grid;
//!
//! let grid = make_grid(16, 40.0)?;
//! let state = make_initial_data(&grid, DataKind::TaylorGreen, 0.01, 1)?;
//! assert!((state.v.max_magnitude() - 0.01).abs() < 1e-3);
//! # Ok::<(), velab::Error>(())
//! ```

pub mod calculus;
pub mod diagnostics;
pub mod dynamics;
pub mod error;
pub mod grid;
pub mod lab;
pub mod verify;

pub use error::{Error, Result};

#[cfg(doctest)]
mod book {
    #[doc = include_str!("../../../book/src/introduction.md")]
    mod introduction {}
    #[doc = include_str!("../../../book/src/fields.md")]
    mod fields {}
    #[doc = include_str!("../../../book/src/operators.md")]
    mod operators {}
    #[doc = include_str!("../../../book/src/evolution.md")]
    mod evolution {}
    #[doc = include_str!("../../../book/src/diagnostics.md")]
    mod diagnostics {}
    #[doc = include_str!("../../../book/src/verification.md")]
    mod verification {}
    #[doc = include_str!("../../../book/src/experiments.md")]
    mod experiments {}
}
