use std::fmt;
use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};

use crate::diagnostics::{write_csv_header, write_csv_row, Monitor, Row, CSV_COLUMNS};
use crate::dynamics::{make_initial_data_with, rhs_with, Integrator};
use crate::error::{Error, Result};
use crate::grid::{make_grid, State};

use super::checkpoint::{
    checkpoint_load, checkpoint_save, read_progress, sidecar_path, write_progress, Progress,
};
use super::config::RunConfig;

pub const SERIES_FILE: &str = "series.csv";
pub const SUMMARY_FILE: &str = "summary.txt";
pub const CONFIG_FILE: &str = "config.txt";
pub const FINAL_FILE: &str = "final.velab";
pub const CHECKPOINT_DIR: &str = "checkpoints";

/// How a run ended.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum RunStatus {
    Completed,
    /// The blow-up guard tripped at time `t`.
    BlowUp { t: f64 },
}

/// End-of-run report.
#[derive(Clone, Debug, PartialEq)]
pub struct Summary {
    pub status: RunStatus,
    pub steps: usize,
    pub t_final: f64,
    pub samples: usize,
    /// Slope of `log E_{p,q}` against `log⟨t⟩` over `[T/2, T]`.
    pub alpha: Option<f64>,
    /// Slope of `log(‖ηGᵀω‖∞ + ‖ηω·v‖∞)` against `log⟨t⟩` over `[T/2, T]`.
    pub null_decay: Option<f64>,
    pub max_div_v: f64,
    pub max_div_gt: f64,
    pub max_compat: f64,
    pub max_det_dev: f64,
    /// `max |E00 + diss − E00(0)| / E00(0)`.
    pub max_energy_balance: Option<f64>,
}

fn opt(x: Option<f64>) -> String {
    x.map_or_else(|| "n/a".to_string(), |v| format!("{v:.6e}"))
}

impl fmt::Display for Summary {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.status {
            RunStatus::Completed => writeln!(f, "status = completed")?,
            RunStatus::BlowUp { t } => {
                writeln!(f, "status = blow-up")?;
                writeln!(f, "abort_time = {t:.6e}")?;
            }
        }
        writeln!(f, "steps = {}", self.steps)?;
        writeln!(f, "t_final = {:.6e}", self.t_final)?;
        writeln!(f, "samples = {}", self.samples)?;
        writeln!(f, "alpha = {}", opt(self.alpha))?;
        writeln!(f, "null_decay = {}", opt(self.null_decay))?;
        writeln!(f, "max_div_v = {:.6e}", self.max_div_v)?;
        writeln!(f, "max_div_GT = {:.6e}", self.max_div_gt)?;
        writeln!(f, "max_compat = {:.6e}", self.max_compat)?;
        writeln!(f, "max_det_dev = {:.6e}", self.max_det_dev)?;
        writeln!(f, "max_energy_balance = {}", opt(self.max_energy_balance))
    }
}

/// Ordinary least-squares slope of `y` against `x`; `None` with fewer than
/// two distinct abscissae.
pub fn ols_slope(x: &[f64], y: &[f64]) -> Option<f64> {
    let n = x.len().min(y.len());
    if n < 2 {
        return None;
    }
    let mx = x[..n].iter().sum::<f64>() / n as f64;
    let my = y[..n].iter().sum::<f64>() / n as f64;
    let sxx: f64 = x[..n].iter().map(|a| (a - mx).powi(2)).sum();
    let sxy: f64 = x[..n].iter().zip(&y[..n]).map(|(a, b)| (a - mx) * (b - my)).sum();
    (sxx > 0.0).then(|| sxy / sxx)
}

/// Log-log slope of `value(row)` against `⟨t⟩` for rows with
/// `t ≥ t_end / 2`; `None` if any value there is not positive.
pub fn fit_exponent(rows: &[Row], value: impl Fn(&Row) -> f64) -> Option<f64> {
    let t_end = rows.last()?.t;
    let (mut x, mut y) = (Vec::new(), Vec::new());
    for r in rows.iter().filter(|r| r.t >= 0.5 * t_end) {
        let v = value(r);
        if !(v > 0.0 && v.is_finite()) {
            return None;
        }
        x.push(crate::calculus::japanese(r.t).ln());
        y.push(v.ln());
    }
    ols_slope(&x, &y)
}

impl Summary {
    pub fn from_rows(rows: &[Row], status: RunStatus, steps: usize, t_final: f64) -> Self {
        let max = |f: fn(&Row) -> f64| rows.iter().map(f).fold(0.0, f64::max);
        let e0 = rows.first().map_or(0.0, |r| r.e00);
        Self {
            status,
            steps,
            t_final,
            samples: rows.len(),
            alpha: fit_exponent(rows, |r| r.epq),
            null_decay: fit_exponent(rows, |r| r.eta_gw + r.eta_wv),
            max_div_v: max(|r| r.div_v),
            max_div_gt: max(|r| r.div_gt),
            max_compat: max(|r| r.compat),
            max_det_dev: max(|r| r.det_dev),
            max_energy_balance: (e0 > 0.0).then(|| {
                rows.iter()
                    .map(|r| (r.e00 + r.diss - e0).abs() / e0)
                    .fold(0.0, f64::max)
            }),
        }
    }
}

/// What a run leaves in memory.
#[derive(Clone, Debug)]
pub struct RunOutcome {
    pub summary: Summary,
    pub rows: Vec<Row>,
    pub state: State,
}

/// Runs `config` from its initial data.
///
/// With an output directory the bundle holds `series.csv`, `summary.txt`,
/// `config.txt`, `final.velab` and any periodic checkpoints. A tripped
/// blow-up guard ends the run early and is recorded in the summary, not
/// returned as an error.
pub fn run(config: &RunConfig) -> Result<RunOutcome> {
    config.validate()?;
    let grid = make_grid(config.n, config.length)?;
    let state = make_initial_data_with(&grid, &config.data_spec()?)?;
    let monitor = Monitor::new(config.diagnostics()?, config.nu)?;
    let progress = Progress {
        step: 0,
        rows: 0,
        monitor,
    };
    drive(config, state, progress, Vec::new(), None)
}

/// Continues a run from one of its checkpoints. The output directory must
/// be the one that produced the checkpoint; its series is cut back to the
/// checkpoint and rewritten from there.
pub fn resume(config: &RunConfig, checkpoint: &Path) -> Result<RunOutcome> {
    config.validate()?;
    let state = checkpoint_load(checkpoint)?;
    if state.grid().n() != config.n || state.grid().length() != config.length {
        return Err(Error::Config("checkpoint grid does not match the config".into()));
    }
    let monitor = Monitor::new(config.diagnostics()?, config.nu)?;
    let progress = read_progress(&sidecar_path(checkpoint), monitor)?;
    let dir = config
        .output
        .as_ref()
        .ok_or_else(|| Error::Config("resume needs output.dir".into()))?;
    let rows = read_series(&dir.join(SERIES_FILE), progress.rows)?;
    // the guard is armed against the initial amplitude, as in the original run
    let grid = state.grid().clone();
    let initial = make_initial_data_with(&grid, &config.data_spec()?)?;
    drive(config, state, progress, rows, Some(initial))
}

/// The first `count` rows of a series file.
pub fn read_series(path: &Path, count: usize) -> Result<Vec<Row>> {
    let file = File::open(path).map_err(|e| Error::Config(format!("{}: {e}", path.display())))?;
    let mut lines = BufReader::new(file).lines();
    match lines.next() {
        Some(Ok(h)) if h.trim() == CSV_COLUMNS.join(",") => {}
        _ => return Err(Error::Config(format!("{}: missing csv header", path.display()))),
    }
    let mut rows = Vec::with_capacity(count);
    for line in lines.take(count) {
        rows.push(Row::parse_csv(&line?)?);
    }
    if rows.len() != count {
        return Err(Error::Config(format!(
            "{}: expected {count} rows, found {}",
            path.display(),
            rows.len()
        )));
    }
    Ok(rows)
}

struct Bundle {
    dir: PathBuf,
    series: BufWriter<File>,
}

impl Bundle {
    fn open(dir: &Path, config: &RunConfig, rows: &[Row]) -> Result<Self> {
        std::fs::create_dir_all(dir)?;
        std::fs::write(dir.join(CONFIG_FILE), config.to_text())?;
        let mut series = BufWriter::new(File::create(dir.join(SERIES_FILE))?);
        write_csv_header(&mut series)?;
        for r in rows {
            write_csv_row(&mut series, r)?;
        }
        Ok(Self {
            dir: dir.to_path_buf(),
            series,
        })
    }

    fn checkpoint(&mut self, state: &State, progress: &Progress) -> Result<()> {
        self.series.flush()?;
        std::fs::create_dir_all(self.dir.join(CHECKPOINT_DIR))?;
        let path = checkpoint_path(&self.dir, progress.step);
        checkpoint_save(state, &path)?;
        write_progress(&sidecar_path(&path), progress)
    }
}

/// Path of the checkpoint written after `step` steps.
pub fn checkpoint_path(dir: &Path, step: usize) -> PathBuf {
    dir.join(CHECKPOINT_DIR).join(format!("step_{step:08}.velab"))
}

fn drive(
    config: &RunConfig,
    mut state: State,
    mut progress: Progress,
    mut rows: Vec<Row>,
    initial: Option<State>,
) -> Result<RunOutcome> {
    let physics = config.physics();
    let integrator = Integrator::new(physics, config.integrator)?
        .with_guard(initial.as_ref().unwrap_or(&state));
    let mut bundle = match &config.output {
        Some(dir) => Some(Bundle::open(dir, config, &rows)?),
        None => None,
    };
    let observe = |state: &State,
                   progress: &mut Progress,
                   rows: &mut Vec<Row>,
                   bundle: &mut Option<Bundle>|
     -> Result<()> {
        let rhs = rhs_with(state, &physics)?;
        let row = progress.monitor.observe(state, &rhs)?;
        if let Some(b) = bundle.as_mut() {
            write_csv_row(&mut b.series, &row)?;
        }
        rows.push(row);
        progress.rows = rows.len();
        Ok(())
    };

    if progress.step == 0 && rows.is_empty() {
        observe(&state, &mut progress, &mut rows, &mut bundle)?;
    }
    let t_end = config.horizon;
    let mut status = RunStatus::Completed;
    while state.t < t_end * (1.0 - 1e-14) {
        let dt = integrator.cfl_dt(&state).min(t_end - state.t);
        match integrator.step(&state, dt) {
            Ok(next) => state = next,
            Err(Error::BlowUp { t, .. }) => {
                status = RunStatus::BlowUp { t };
                break;
            }
            Err(e) => return Err(e),
        }
        progress.step += 1;
        let last = state.t >= t_end * (1.0 - 1e-14);
        if progress.step % config.cadence == 0 || last {
            observe(&state, &mut progress, &mut rows, &mut bundle)?;
        }
        if config.checkpoint_every > 0 && progress.step % config.checkpoint_every == 0 && !last {
            if let Some(b) = bundle.as_mut() {
                b.checkpoint(&state, &progress)?;
            }
        }
    }

    let summary = Summary::from_rows(&rows, status, progress.step, state.t);
    if let Some(b) = bundle.as_mut() {
        b.series.flush()?;
        std::fs::write(b.dir.join(SUMMARY_FILE), summary.to_string())?;
        checkpoint_save(&state, &b.dir.join(FINAL_FILE))?;
    }
    Ok(RunOutcome {
        summary,
        rows,
        state,
    })
}
