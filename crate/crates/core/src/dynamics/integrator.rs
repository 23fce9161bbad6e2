use std::fmt;
use std::str::FromStr;

use crate::calculus::FieldPair;
use crate::error::{Error, Result};
use crate::grid::{Spectrum, State};

use super::rhs::{nonviscous, Physics};

/// Explicit stage scheme wrapped around the exact viscous factor.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum Scheme {
    /// Classical fourth-order Runge–Kutta in integrating-factor form.
    #[default]
    Rk4Exponential,
    /// Three-stage strong-stability-preserving scheme in integrating-factor form.
    Ssprk3Exponential,
}

impl FromStr for Scheme {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "rk4-exponential" => Ok(Scheme::Rk4Exponential),
            "ssprk3-exponential" => Ok(Scheme::Ssprk3Exponential),
            other => Err(Error::Config(format!("unknown scheme {other:?}"))),
        }
    }
}

impl fmt::Display for Scheme {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Scheme::Rk4Exponential => "rk4-exponential",
            Scheme::Ssprk3Exponential => "ssprk3-exponential",
        })
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct IntegratorConfig {
    pub scheme: Scheme,
    /// Safety factor in `(0, 1]`.
    pub cfl: f64,
    pub dt_max: f64,
}

impl Default for IntegratorConfig {
    fn default() -> Self {
        Self {
            scheme: Scheme::Rk4Exponential,
            cfl: 0.5,
            dt_max: 0.05,
        }
    }
}

impl IntegratorConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.cfl > 0.0 && self.cfl <= 1.0) {
            return Err(Error::Config(format!("cfl must lie in (0, 1], got {}", self.cfl)));
        }
        if !(self.dt_max.is_finite() && self.dt_max > 0.0) {
            return Err(Error::Config(format!("dt_max must be positive, got {}", self.dt_max)));
        }
        Ok(())
    }
}

/// Largest admissible step, `cfl·min(dx/(max|v| + 1), dt_max)`.
///
/// The unit in the denominator is the elastic wave speed; viscosity does not
/// restrict the step because it is integrated exactly.
pub fn cfl_dt(state: &State, config: &IntegratorConfig) -> f64 {
    let vmax = state.v.max_magnitude();
    config.cfl * (state.grid().dx() / (vmax + 1.0)).min(config.dt_max)
}

/// Ratio above the initial amplitude at which a run is declared blown up.
pub const BLOW_UP_FACTOR: f64 = 1e3;

/// Advances states with a fixed scheme and physics, optionally guarding
/// against blow-up relative to a reference amplitude.
#[derive(Clone, Debug)]
pub struct Integrator {
    physics: Physics,
    config: IntegratorConfig,
    limit: Option<f64>,
}

impl Integrator {
    pub fn new(physics: Physics, config: IntegratorConfig) -> Result<Self> {
        physics.validate()?;
        config.validate()?;
        Ok(Self {
            physics,
            config,
            limit: None,
        })
    }

    /// Arms the guard at `BLOW_UP_FACTOR × max|U|` of `initial`; a zero
    /// initial state leaves it disarmed.
    pub fn with_guard(mut self, initial: &State) -> Self {
        let m = initial.max_abs();
        self.limit = (m > 0.0).then_some(BLOW_UP_FACTOR * m);
        self
    }

    pub fn physics(&self) -> &Physics {
        &self.physics
    }

    pub fn config(&self) -> &IntegratorConfig {
        &self.config
    }

    pub fn cfl_dt(&self, state: &State) -> f64 {
        cfl_dt(state, &self.config)
    }

    /// One step of size `dt`; the state is first restricted to the retained
    /// modes.
    pub fn step(&self, state: &State, dt: f64) -> Result<State> {
        state.check_finite()?;
        if !(dt > 0.0) {
            return Err(Error::Config(format!("time step must be positive, got {dt}")));
        }
        let limit = self.cfl_dt(state);
        if dt > limit * (1.0 + 1e-12) {
            return Err(Error::StepTooLarge { dt, limit });
        }
        let u = FieldPair::from_state(state).map(|t| t.dealias());
        let next = match self.config.scheme {
            Scheme::Rk4Exponential => self.rk4(&u, dt),
            Scheme::Ssprk3Exponential => self.ssprk3(&u, dt)?,
        };
        let out = next.to_state(state.t + dt);
        out.check_finite()?;
        if let Some(limit) = self.limit {
            let m = out.max_abs();
            if m > limit {
                return Err(Error::BlowUp {
                    t: out.t,
                    max_abs: m,
                    limit,
                });
            }
        }
        Ok(out)
    }

    fn n(&self, u: &FieldPair) -> FieldPair {
        nonviscous(u, None, &self.physics)
    }

    /// Multiplies the velocity modes by `exp(−ν|k|²h)`.
    fn decay(&self, u: &FieldPair, h: f64) -> FieldPair {
        if self.physics.nu == 0.0 || h == 0.0 {
            return u.clone();
        }
        let grid = u.grid().clone();
        let nu = self.physics.nu;
        let factors: Vec<f64> = (0..grid.len())
            .map(|m| (-nu * grid.k_squared(m) * h).exp())
            .collect();
        FieldPair {
            g: u.g.clone(),
            v: u.v.map_components(|c: &Spectrum| c.map_modes(|m, a| a * factors[m])),
        }
    }

    fn rk4(&self, u: &FieldPair, h: f64) -> FieldPair {
        let k1 = self.n(u);
        let mut a = u.clone();
        a.axpy(0.5 * h, &k1);
        let a = self.decay(&a, 0.5 * h);
        let k2 = self.n(&a);
        let mut b = self.decay(u, 0.5 * h);
        b.axpy(0.5 * h, &k2);
        let k3 = self.n(&b);
        let mut c = self.decay(u, h);
        c.axpy(h, &self.decay(&k3, 0.5 * h));
        let k4 = self.n(&c);

        let mut mid = k2;
        mid.axpy(1.0, &k3);
        let mut out = self.decay(u, h);
        out.axpy(h / 6.0, &self.decay(&k1, h));
        out.axpy(h / 3.0, &self.decay(&mid, 0.5 * h));
        out.axpy(h / 6.0, &k4);
        out
    }

    fn ssprk3(&self, u: &FieldPair, h: f64) -> Result<FieldPair> {
        // the second stage undoes half a step of decay; refuse if that
        // amplification would swamp the stage values
        let grid = u.grid();
        let k2max = (0..grid.len())
            .filter(|&m| grid.is_kept(m))
            .map(|m| grid.k_squared(m))
            .fold(0.0, f64::max);
        if self.physics.nu * k2max * 0.5 * h > 30.0 {
            return Err(Error::Config(format!(
                "ssprk3-exponential cannot take dt = {h} at this viscosity; use rk4-exponential"
            )));
        }
        let k1 = self.n(u);
        let mut u1 = u.clone();
        u1.axpy(h, &k1);
        let u1 = self.decay(&u1, h);
        let k2 = self.n(&u1);
        let mut w = u1.clone();
        w.axpy(h, &k2);
        let mut u2 = self.decay(u, 0.5 * h).scale(0.75);
        u2.axpy(0.25, &self.decay(&w, -0.5 * h));
        let k3 = self.n(&u2);
        let mut w = u2;
        w.axpy(h, &k3);
        let mut out = self.decay(u, h).scale(1.0 / 3.0);
        out.axpy(2.0 / 3.0, &self.decay(&w, 0.5 * h));
        Ok(out)
    }
}

/// One step of the full scheme without a blow-up guard.
pub fn step(state: &State, dt: f64, physics: &Physics, config: &IntegratorConfig) -> Result<State> {
    Integrator::new(*physics, *config)?.step(state, dt)
}
