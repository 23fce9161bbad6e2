use std::fmt::Write as _;
use std::fs::File;
use std::io::{BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};

use crate::diagnostics::{LocalEntry, Monitor, NullNorms};
use crate::error::{Error, Result};
use crate::grid::snapshot::{read_state, write_state};
use crate::grid::State;

fn snapshot_error(path: &Path, e: impl std::fmt::Display) -> Error {
    Error::Snapshot {
        path: path.to_path_buf(),
        reason: e.to_string(),
    }
}

/// Writes `state` in the binary snapshot format.
pub fn checkpoint_save(state: &State, path: &Path) -> Result<()> {
    let file = File::create(path).map_err(|e| snapshot_error(path, e))?;
    let mut w = BufWriter::new(file);
    write_state(&mut w, state).map_err(|e| snapshot_error(path, e))?;
    w.flush().map_err(|e| snapshot_error(path, e))
}

pub fn checkpoint_load(path: &Path) -> Result<State> {
    let file = File::open(path).map_err(|e| snapshot_error(path, e))?;
    read_state(BufReader::new(file)).map_err(|e| snapshot_error(path, e))
}

/// Path of the accumulator file stored next to a checkpoint.
pub fn sidecar_path(checkpoint: &Path) -> PathBuf {
    let mut s = checkpoint.as_os_str().to_owned();
    s.push(".meta");
    PathBuf::from(s)
}

/// Loop position and running integrals saved with a checkpoint, so that a
/// resumed run continues bit-for-bit.
#[derive(Clone, Debug)]
pub(crate) struct Progress {
    pub step: usize,
    pub rows: usize,
    pub monitor: Monitor,
}

fn floats(v: &[f64]) -> String {
    v.iter().map(|x| format!("{x:?}")).collect::<Vec<_>>().join(" ")
}

pub(crate) fn write_progress(path: &Path, p: &Progress) -> Result<()> {
    let mut s = String::new();
    let ledger = &p.monitor.ledger;
    let decay = &p.monitor.decay;
    let _ = writeln!(s, "step = {}", p.step);
    let _ = writeln!(s, "rows = {}", p.rows);
    if let Some(t) = ledger.t {
        let _ = writeln!(s, "ledger.t = {t:?}");
    }
    for (i, w) in ledger.words.iter().enumerate() {
        let _ = writeln!(
            s,
            "ledger.word.{i} = {}",
            floats(&[w.half_norm_sq, w.dissipation, w.last_grad_v_sq])
        );
    }
    if let Some(t) = decay.t {
        let _ = writeln!(s, "decay.t = {t:?}");
    }
    let l = &decay.last;
    let _ = writeln!(s, "decay.last = {}", floats(&[l.t, l.y, l.z]));
    let _ = writeln!(s, "decay.integrals = {}", floats(&decay.integrals));
    let nn = &decay.null;
    let _ = writeln!(s, "decay.null = {}", floats(&[nn.eta_gw, nn.eta_wv, nn.det_dev]));
    std::fs::write(path, s).map_err(|e| snapshot_error(path, e))
}

/// Reads progress into a freshly built `monitor` of the same configuration.
pub(crate) fn read_progress(path: &Path, mut monitor: Monitor) -> Result<Progress> {
    let text = std::fs::read_to_string(path).map_err(|e| snapshot_error(path, e))?;
    let bad = |what: &str| snapshot_error(path, format!("bad {what}"));
    let nums = |v: &str, n: usize, what: &str| -> Result<Vec<f64>> {
        let out: Vec<f64> = v
            .split_whitespace()
            .map(str::parse)
            .collect::<std::result::Result<_, _>>()
            .map_err(|_| bad(what))?;
        if n != usize::MAX && out.len() != n {
            return Err(bad(what));
        }
        Ok(out)
    };
    let (mut step, mut rows) = (None, None);
    let mut words_seen = 0;
    for line in text.lines() {
        let (k, v) = line.split_once('=').ok_or_else(|| bad("line"))?;
        let (k, v) = (k.trim(), v.trim());
        match k {
            "step" => step = Some(v.parse().map_err(|_| bad(k))?),
            "rows" => rows = Some(v.parse().map_err(|_| bad(k))?),
            "ledger.t" => monitor.ledger.t = Some(v.parse().map_err(|_| bad(k))?),
            "decay.t" => monitor.decay.t = Some(v.parse().map_err(|_| bad(k))?),
            "decay.last" => {
                let x = nums(v, 3, k)?;
                monitor.decay.last = LocalEntry { t: x[0], y: x[1], z: x[2] };
            }
            "decay.integrals" => {
                let x = nums(v, usize::MAX, k)?;
                if x.len() != monitor.decay.integrals.len() {
                    return Err(bad(k));
                }
                monitor.decay.integrals = x;
            }
            "decay.null" => {
                let x = nums(v, 3, k)?;
                monitor.decay.null = NullNorms {
                    eta_gw: x[0],
                    eta_wv: x[1],
                    det_dev: x[2],
                };
            }
            _ => {
                let i: usize = k
                    .strip_prefix("ledger.word.")
                    .and_then(|i| i.parse().ok())
                    .ok_or_else(|| bad(k))?;
                let x = nums(v, 3, k)?;
                let w = monitor.ledger.words.get_mut(i).ok_or_else(|| bad(k))?;
                w.half_norm_sq = x[0];
                w.dissipation = x[1];
                w.last_grad_v_sq = x[2];
                words_seen += 1;
            }
        }
    }
    if words_seen != monitor.ledger.words.len() {
        return Err(bad("word count"));
    }
    Ok(Progress {
        step: step.ok_or_else(|| bad("step"))?,
        rows: rows.ok_or_else(|| bad("rows"))?,
        monitor,
    })
}
