//! Energies over operator words, localized energies, constraint defects and
//! null-structure norms.
//!
//! A [`Monitor`] strings the pieces together for a run: each call to
//! [`Monitor::observe`] produces one [`Row`] of the time series, advancing
//! the trapezoid-rule time integrals by one sample.

mod constraints;
mod energy;

use std::io::Write;

pub use constraints::{
    constraint_residuals, det_identity_plus, null_norms, sobolev_ratio, ConstraintResiduals,
    NullNorms,
};
pub use energy::{
    energy, local_energy, DecayRecord, EnergyEntry, EnergyLedger, LocalEntry, WordEnergy,
    WordSample,
};

use crate::calculus::{CutoffFamily, MultiIndexPlan, PlanCaps, Window};
use crate::dynamics::Rhs;
use crate::error::{Error, Result};
use crate::grid::State;

/// What a [`Monitor`] measures and how.
#[derive(Clone, Debug, PartialEq)]
pub struct DiagnosticsConfig {
    pub plan: MultiIndexPlan,
    pub cutoffs: CutoffFamily,
    /// Applied before words containing rotations or the scaling field.
    pub window: Window,
    /// Weights `⟨t⟩^θ` of the decay integrals; `0` and `1` are always tracked.
    pub thetas: Vec<f64>,
}

impl DiagnosticsConfig {
    /// Plan `(2, 1)`, default cutoffs, the default window for a box of side
    /// `length`, and `θ ∈ {0, ½, 1}`.
    pub fn new(length: f64) -> Self {
        Self {
            plan: MultiIndexPlan::new(2, 1).expect("valid default plan"),
            cutoffs: CutoffFamily::default(),
            window: Window::default_for(length),
            thetas: vec![0.0, 0.5, 1.0],
        }
    }
}

/// Column names of the time series, in order.
pub const CSV_COLUMNS: [&str; 15] = [
    "t", "E00", "Epq", "diss", "Y", "Z", "wY_theta0", "wY_theta1", "div_v", "div_GT", "compat",
    "eta_Gw", "eta_wv", "det_dev", "max_v",
];

/// One diagnostic sample.
///
/// `e00` is `½‖U‖²` and `diss` its dissipation integral `ν∫‖∇v‖²`, so the
/// full `E_{0,0}` is their sum; `epq` is the full `E_{p,q}` of the plan.
/// Constraint defects are relative to `‖U‖₂`.
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct Row {
    pub t: f64,
    pub e00: f64,
    pub epq: f64,
    pub diss: f64,
    pub y: f64,
    pub z: f64,
    pub w_y_theta0: f64,
    pub w_y_theta1: f64,
    pub div_v: f64,
    pub div_gt: f64,
    pub compat: f64,
    pub eta_gw: f64,
    pub eta_wv: f64,
    pub det_dev: f64,
    pub max_v: f64,
}

impl Row {
    pub fn values(&self) -> [f64; 15] {
        [
            self.t,
            self.e00,
            self.epq,
            self.diss,
            self.y,
            self.z,
            self.w_y_theta0,
            self.w_y_theta1,
            self.div_v,
            self.div_gt,
            self.compat,
            self.eta_gw,
            self.eta_wv,
            self.det_dev,
            self.max_v,
        ]
    }

    pub fn from_values(v: [f64; 15]) -> Self {
        Self {
            t: v[0],
            e00: v[1],
            epq: v[2],
            diss: v[3],
            y: v[4],
            z: v[5],
            w_y_theta0: v[6],
            w_y_theta1: v[7],
            div_v: v[8],
            div_gt: v[9],
            compat: v[10],
            eta_gw: v[11],
            eta_wv: v[12],
            det_dev: v[13],
            max_v: v[14],
        }
    }

    /// Comma-separated values with 17 significant digits.
    pub fn to_csv(&self) -> String {
        self.values()
            .iter()
            .map(|x| format!("{x:.16e}"))
            .collect::<Vec<_>>()
            .join(",")
    }

    pub fn parse_csv(line: &str) -> Result<Self> {
        let vals: Vec<f64> = line
            .trim()
            .split(',')
            .map(|s| s.parse::<f64>())
            .collect::<std::result::Result<_, _>>()
            .map_err(|e| Error::Config(format!("bad csv row {line:?}: {e}")))?;
        let arr: [f64; 15] = vals
            .try_into()
            .map_err(|v: Vec<f64>| Error::Config(format!("csv row has {} columns, want 15", v.len())))?;
        Ok(Self::from_values(arr))
    }
}

pub fn write_csv_header<W: Write>(mut w: W) -> Result<()> {
    writeln!(w, "{}", CSV_COLUMNS.join(","))?;
    Ok(())
}

pub fn write_csv_row<W: Write>(mut w: W, row: &Row) -> Result<()> {
    writeln!(w, "{}", row.to_csv())?;
    Ok(())
}

/// Stateful sampler holding the running time integrals of a run.
#[derive(Clone, Debug)]
pub struct Monitor {
    config: DiagnosticsConfig,
    pub(crate) ledger: EnergyLedger,
    pub(crate) decay: DecayRecord,
}

impl Monitor {
    pub fn new(mut config: DiagnosticsConfig, nu: f64) -> Result<Self> {
        config.plan.check_caps(PlanCaps::default())?;
        for th in [0.0, 1.0] {
            if !config.thetas.contains(&th) {
                config.thetas.push(th);
            }
        }
        Ok(Self {
            ledger: EnergyLedger::new(&config.plan, nu),
            decay: DecayRecord::new(nu, &config.thetas),
            config,
        })
    }

    pub fn config(&self) -> &DiagnosticsConfig {
        &self.config
    }

    pub fn ledger(&self) -> &EnergyLedger {
        &self.ledger
    }

    pub fn decay(&self) -> &DecayRecord {
        &self.decay
    }

    /// Samples `state`, whose time derivative is `rhs`.
    pub fn observe(&mut self, state: &State, rhs: &Rhs) -> Result<Row> {
        let cfg = &self.config;
        let (entry, local) =
            energy::word_pass(state, rhs, &cfg.plan, &cfg.window, Some(&cfg.cutoffs))?;
        let null = null_norms(state, &cfg.cutoffs);
        self.ledger.record(&entry)?;
        self.decay.record(&local, &null)?;
        let c = constraint_residuals(state).relative(state.norm());
        let (p, q) = (cfg.plan.p(), cfg.plan.q());
        Ok(Row {
            t: state.t,
            e00: self.ledger.instantaneous(0, 0),
            epq: self.ledger.total(p, q),
            diss: self.ledger.dissipation(0, 0),
            y: local.y,
            z: local.z,
            w_y_theta0: self.decay.weighted(0.0).unwrap_or(f64::NAN),
            w_y_theta1: self.decay.weighted(1.0).unwrap_or(f64::NAN),
            div_v: c.div_v,
            div_gt: c.div_gt,
            compat: c.compat,
            eta_gw: null.eta_gw,
            eta_wv: null.eta_wv,
            det_dev: null.det_dev,
            max_v: state.v.max_magnitude(),
        })
    }
}
