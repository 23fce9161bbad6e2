use std::fmt;

use rayon::prelude::*;

use crate::error::{Error, Result};

use super::config::RunConfig;
use super::run::{run, RunStatus, Summary};

/// Environment variable capping the number of worker threads.
pub const THREADS_ENV: &str = "VELAB_THREADS";

/// `(ν, ε, seed)` triples sharing a base configuration.
#[derive(Clone, Debug, PartialEq)]
pub struct SweepSpec {
    pub base: RunConfig,
    pub triples: Vec<(f64, f64, u64)>,
}

impl SweepSpec {
    /// Every combination of `nus` and `epsilons` at the base seed.
    pub fn grid(base: RunConfig, nus: &[f64], epsilons: &[f64]) -> Self {
        let seed = base.seed;
        let triples = epsilons
            .iter()
            .flat_map(|&e| nus.iter().map(move |&nu| (nu, e, seed)))
            .collect();
        Self { base, triples }
    }

    pub fn validate(&self) -> Result<()> {
        if self.triples.is_empty() {
            return Err(Error::Config("sweep has no (nu, epsilon, seed) triples".into()));
        }
        for &t in &self.triples {
            self.member(t).validate()?;
        }
        Ok(())
    }

    /// The base config for one triple, writing below `base.output/<label>`.
    pub fn member(&self, (nu, epsilon, seed): (f64, f64, u64)) -> RunConfig {
        let mut c = self.base.clone();
        c.nu = nu;
        c.epsilon = epsilon;
        c.seed = seed;
        c.output = self
            .base
            .output
            .as_ref()
            .map(|d| d.join(format!("nu{nu}_eps{epsilon}_seed{seed}")));
        c
    }
}

/// One line of a sweep table.
#[derive(Clone, Debug)]
pub struct SweepRow {
    pub nu: f64,
    pub epsilon: f64,
    pub seed: u64,
    /// The run summary, or the error that stopped the run.
    pub outcome: std::result::Result<Summary, String>,
}

/// Per-triple summaries and the uniformity metric.
#[derive(Clone, Debug)]
pub struct SweepTable {
    pub rows: Vec<SweepRow>,
}

impl SweepTable {
    /// `max_ν α` at each `ε`, over completed runs with a fitted exponent.
    pub fn uniformity(&self) -> Vec<(f64, Option<f64>)> {
        let mut eps: Vec<f64> = self.rows.iter().map(|r| r.epsilon).collect();
        eps.sort_by(f64::total_cmp);
        eps.dedup();
        eps.into_iter()
            .map(|e| {
                let alphas = self.alphas(e);
                (e, alphas.into_iter().reduce(f64::max))
            })
            .collect()
    }

    /// Fitted exponents of the completed runs at `epsilon`.
    pub fn alphas(&self, epsilon: f64) -> Vec<f64> {
        self.rows
            .iter()
            .filter(|r| r.epsilon == epsilon)
            .filter_map(|r| match &r.outcome {
                Ok(s) if s.status == RunStatus::Completed => s.alpha,
                _ => None,
            })
            .collect()
    }

    pub fn all_succeeded(&self) -> bool {
        self.rows
            .iter()
            .all(|r| matches!(&r.outcome, Ok(s) if s.status == RunStatus::Completed))
    }
}

fn cell(x: Option<f64>) -> String {
    x.map_or_else(|| "n/a".into(), |v| format!("{v:.4e}"))
}

impl fmt::Display for SweepTable {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(
            f,
            "{:>8} {:>10} {:>6} {:>10} {:>11} {:>11} {:>11} {:>11}  status",
            "nu", "epsilon", "seed", "alpha", "null_decay", "max_div_v", "max_compat", "det_dev"
        )?;
        for r in &self.rows {
            write!(f, "{:>8} {:>10} {:>6} ", r.nu, r.epsilon, r.seed)?;
            match &r.outcome {
                Ok(s) => {
                    let status = match s.status {
                        RunStatus::Completed => "completed".to_string(),
                        RunStatus::BlowUp { t } => format!("blow-up at t = {t:.4}"),
                    };
                    writeln!(
                        f,
                        "{:>10} {:>11} {:>11.3e} {:>11.3e} {:>11.3e}  {status}",
                        cell(s.alpha),
                        cell(s.null_decay),
                        s.max_div_v,
                        s.max_compat,
                        s.max_det_dev
                    )?;
                }
                Err(e) => writeln!(f, "failed: {e}")?,
            }
        }
        for (e, a) in self.uniformity() {
            writeln!(f, "uniformity epsilon={e}: max_nu alpha = {}", cell(a))?;
        }
        Ok(())
    }
}

/// Thread count from `VELAB_THREADS`, if set to a positive integer.
pub fn thread_cap() -> Result<Option<usize>> {
    match std::env::var(THREADS_ENV) {
        Ok(v) => match v.trim().parse::<usize>() {
            Ok(n) if n > 0 => Ok(Some(n)),
            _ => Err(Error::Config(format!("{THREADS_ENV} must be a positive integer, got {v:?}"))),
        },
        Err(_) => Ok(None),
    }
}

/// Runs every triple as an independent job. A failing run is recorded in its
/// row and the others carry on.
pub fn sweep(spec: &SweepSpec) -> Result<SweepTable> {
    spec.validate()?;
    let job = |&(nu, epsilon, seed): &(f64, f64, u64)| SweepRow {
        nu,
        epsilon,
        seed,
        outcome: run(&spec.member((nu, epsilon, seed)))
            .map(|o| o.summary)
            .map_err(|e| e.to_string()),
    };
    let threads = thread_cap()?.unwrap_or_else(rayon::current_num_threads);
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build()
        .map_err(|e| Error::Config(format!("thread pool: {e}")))?;
    let rows = pool.install(|| spec.triples.par_iter().map(job).collect());
    Ok(SweepTable { rows })
}
