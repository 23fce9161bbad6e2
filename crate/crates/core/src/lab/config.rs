use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use crate::calculus::{CutoffFamily, MultiIndexPlan, PlanCaps, Window};
use crate::diagnostics::DiagnosticsConfig;
use crate::dynamics::{DataKind, DataSpec, IntegratorConfig, Physics};
use crate::error::{Error, Result};
use crate::grid::SpectralGrid;

/// Everything that determines a run.
#[derive(Clone, Debug, PartialEq)]
pub struct RunConfig {
    pub n: usize,
    pub length: f64,
    pub nu: f64,
    /// Elastic modulus; only `1` is accepted.
    pub mu: f64,
    pub epsilon: f64,
    pub data_kind: DataKind,
    pub seed: u64,
    /// Radius `R₀` of the initial data.
    pub radius: f64,
    /// Switches the quadratic terms off for linear runs.
    pub nonlinear: bool,
    pub integrator: IntegratorConfig,
    /// Steps between diagnostic samples.
    pub cadence: usize,
    pub p: usize,
    pub q: usize,
    pub sigma: f64,
    pub thetas: Vec<f64>,
    /// Final time `T`.
    pub horizon: f64,
    /// Where the bundle goes; nothing is written when absent.
    pub output: Option<PathBuf>,
    /// Steps between checkpoints, `0` for none.
    pub checkpoint_every: usize,
}

impl RunConfig {
    /// A `64³` box of side `40` with `R₀ = 5`, `T = 5` and `ν = 0`.
    pub fn new() -> Self {
        Self {
            n: 64,
            length: 40.0,
            nu: 0.0,
            mu: 1.0,
            epsilon: 0.01,
            data_kind: DataKind::RandomSolenoidal,
            seed: 1,
            radius: 5.0,
            nonlinear: true,
            integrator: IntegratorConfig {
                dt_max: 0.1,
                ..IntegratorConfig::default()
            },
            cadence: 5,
            p: 2,
            q: 1,
            sigma: CutoffFamily::default().sigma(),
            thetas: vec![0.0, 0.5, 1.0],
            horizon: 5.0,
            output: None,
            checkpoint_every: 0,
        }
    }

    pub fn validate(&self) -> Result<()> {
        SpectralGrid::new(self.n, self.length).map_err(|e| Error::Config(e.to_string()))?;
        if self.mu != 1.0 {
            return Err(Error::Config(format!("mu is fixed to 1, got {}", self.mu)));
        }
        if !(0.0..=1.0).contains(&self.nu) {
            return Err(Error::Config(format!("nu must lie in [0, 1], got {}", self.nu)));
        }
        if !(self.epsilon.is_finite() && self.epsilon >= 0.0) {
            return Err(Error::Config(format!("epsilon must be >= 0, got {}", self.epsilon)));
        }
        if !(self.radius > 0.0) {
            return Err(Error::Config(format!("radius must be positive, got {}", self.radius)));
        }
        let limit = self.length / 4.0 - self.radius;
        if !(self.horizon > 0.0 && self.horizon <= limit) {
            return Err(Error::Config(format!(
                "horizon T = {} must lie in (0, L/4 - R0] = (0, {limit}]",
                self.horizon
            )));
        }
        self.integrator.validate()?;
        if self.cadence == 0 {
            return Err(Error::Config("cadence must be at least 1".into()));
        }
        MultiIndexPlan::new(self.p, self.q)
            .and_then(|plan| plan.check_caps(PlanCaps::default()))
            .map_err(|e| Error::Config(e.to_string()))?;
        CutoffFamily::new(self.sigma).map_err(|e| Error::Config(e.to_string()))?;
        if self.thetas.iter().any(|t| !t.is_finite() || *t < 0.0) {
            return Err(Error::Config("theta values must be finite and >= 0".into()));
        }
        Ok(())
    }

    pub fn physics(&self) -> Physics {
        Physics {
            nonlinear: self.nonlinear,
            ..Physics::new(self.nu)
        }
    }

    pub fn data_spec(&self) -> Result<DataSpec> {
        Ok(DataSpec {
            radius: self.radius,
            plan: MultiIndexPlan::new(self.p, self.q)?,
            ..DataSpec::new(self.data_kind, self.epsilon, self.seed, self.length)
        })
    }

    pub fn diagnostics(&self) -> Result<DiagnosticsConfig> {
        Ok(DiagnosticsConfig {
            plan: MultiIndexPlan::new(self.p, self.q)?,
            cutoffs: CutoffFamily::new(self.sigma)?,
            window: Window::default_for(self.length),
            thetas: self.thetas.clone(),
        })
    }

    /// Parses `section.key = value` lines; `#` starts a comment. Missing
    /// keys keep the values of [`RunConfig::new`].
    pub fn parse(text: &str) -> Result<Self> {
        let mut map = BTreeMap::new();
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (k, v) = line
                .split_once('=')
                .ok_or_else(|| Error::Config(format!("line {}: expected key = value", lineno + 1)))?;
            let key = k.trim().to_string();
            if map.insert(key.clone(), v.trim().to_string()).is_some() {
                return Err(Error::Config(format!("line {}: duplicate key {key}", lineno + 1)));
            }
        }
        let mut c = Self::new();
        let mut take = |key: &str| map.remove(key);
        fn parse<T: FromStr>(key: &str, v: &str) -> Result<T>
        where
            T::Err: std::fmt::Display,
        {
            v.parse()
                .map_err(|e| Error::Config(format!("{key}: cannot parse {v:?}: {e}")))
        }
        macro_rules! field {
            ($key:literal => $slot:expr) => {
                if let Some(v) = take($key) {
                    $slot = parse($key, &v)?;
                }
            };
        }
        field!("grid.n" => c.n);
        field!("grid.L" => c.length);
        field!("physics.nu" => c.nu);
        field!("physics.mu" => c.mu);
        field!("physics.epsilon" => c.epsilon);
        field!("physics.data_kind" => c.data_kind);
        field!("physics.seed" => c.seed);
        field!("physics.radius" => c.radius);
        field!("physics.nonlinear" => c.nonlinear);
        field!("integrator.scheme" => c.integrator.scheme);
        field!("integrator.cfl" => c.integrator.cfl);
        field!("integrator.dt_max" => c.integrator.dt_max);
        field!("diagnostics.cadence" => c.cadence);
        field!("diagnostics.p" => c.p);
        field!("diagnostics.q" => c.q);
        field!("diagnostics.sigma" => c.sigma);
        field!("run.T" => c.horizon);
        field!("output.checkpoint_every" => c.checkpoint_every);
        if let Some(v) = take("diagnostics.thetas") {
            c.thetas = parse_list("diagnostics.thetas", &v)?;
        }
        if let Some(v) = take("output.dir") {
            c.output = Some(PathBuf::from(v));
        }
        if let Some(key) = map.keys().next() {
            return Err(Error::Config(format!("unknown key {key}")));
        }
        c.validate()?;
        Ok(c)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::Config(format!("{}: {e}", path.display())))?;
        Self::parse(&text)
    }

    /// The config as text that [`RunConfig::parse`] reads back unchanged.
    pub fn to_text(&self) -> String {
        let mut s = String::new();
        let mut put = |k: &str, v: String| {
            let _ = writeln!(s, "{k} = {v}");
        };
        put("grid.n", self.n.to_string());
        put("grid.L", format!("{:?}", self.length));
        put("physics.nu", format!("{:?}", self.nu));
        put("physics.mu", format!("{:?}", self.mu));
        put("physics.epsilon", format!("{:?}", self.epsilon));
        put("physics.data_kind", self.data_kind.to_string());
        put("physics.seed", self.seed.to_string());
        put("physics.radius", format!("{:?}", self.radius));
        put("physics.nonlinear", self.nonlinear.to_string());
        put("integrator.scheme", self.integrator.scheme.to_string());
        put("integrator.cfl", format!("{:?}", self.integrator.cfl));
        put("integrator.dt_max", format!("{:?}", self.integrator.dt_max));
        put("diagnostics.cadence", self.cadence.to_string());
        put("diagnostics.p", self.p.to_string());
        put("diagnostics.q", self.q.to_string());
        put("diagnostics.sigma", format!("{:?}", self.sigma));
        put(
            "diagnostics.thetas",
            self.thetas.iter().map(|t| format!("{t:?}")).collect::<Vec<_>>().join(", "),
        );
        put("run.T", format!("{:?}", self.horizon));
        put("output.checkpoint_every", self.checkpoint_every.to_string());
        if let Some(dir) = &self.output {
            put("output.dir", dir.display().to_string());
        }
        s
    }
}

impl Default for RunConfig {
    fn default() -> Self {
        Self::new()
    }
}

/// Comma-separated numbers.
pub fn parse_list<T: FromStr>(key: &str, v: &str) -> Result<Vec<T>>
where
    T::Err: std::fmt::Display,
{
    v.split(',')
        .map(str::trim)
        .filter(|s| !s.is_empty())
        .map(|s| {
            s.parse()
                .map_err(|e| Error::Config(format!("{key}: cannot parse {s:?}: {e}")))
        })
        .collect()
}
