use std::path::Path;

use super::*;
use crate::dynamics::DataKind;
use crate::grid::{make_grid, ScalarField, State, VectorField};
use crate::error::Error;

/// A 16³ run short enough for unit tests.
fn small() -> RunConfig {
    RunConfig {
        n: 16,
        length: 24.0,
        radius: 3.0,
        horizon: 0.6,
        cadence: 2,
        ..RunConfig::new()
    }
}

fn with_dir(mut c: RunConfig, dir: &Path) -> RunConfig {
    c.output = Some(dir.to_path_buf());
    c
}

#[test]
fn config_text_round_trips() {
    let mut c = small();
    c.thetas = vec![0.0, 0.25, 1.0];
    c.data_kind = DataKind::TaylorGreen;
    c.output = Some("out/a".into());
    assert_eq!(RunConfig::parse(&c.to_text()).unwrap(), c);
}

#[test]
fn config_reads_comments_and_defaults() {
    let text = "# box\ngrid.n = 32   # points\ngrid.L = 40\n\nphysics.nu = 0.1\n";
    let c = RunConfig::parse(text).unwrap();
    assert_eq!((c.n, c.length, c.nu), (32, 40.0, 0.1));
    assert_eq!(c.epsilon, RunConfig::new().epsilon);
}

#[test]
fn config_rejects_bad_input() {
    for text in [
        "grid.nn = 3",
        "physics.mu = 2",
        "physics.nu = 1.5",
        "run.T = 6",
        "grid.n = 15",
        "diagnostics.cadence = 0",
        "diagnostics.q = 2",
        "physics.data_kind = vortex",
        "grid.n = 16\ngrid.n = 32",
        "just words",
    ] {
        assert!(matches!(RunConfig::parse(text), Err(Error::Config(_))), "{text}");
    }
}

#[test]
fn zero_amplitude_gives_zero_series() {
    let c = RunConfig { epsilon: 0.0, ..small() };
    let out = run(&c).unwrap();
    assert!(out.rows.len() > 2);
    for r in &out.rows {
        assert!(r.values()[1..].iter().all(|&v| v == 0.0), "{r:?}");
    }
    assert_eq!(out.summary.alpha, None);
    assert!(out.summary.to_string().contains("alpha = n/a"));
}

#[test]
fn reruns_are_byte_identical() {
    let a = tempfile::tempdir().unwrap();
    let b = tempfile::tempdir().unwrap();
    run(&with_dir(small(), a.path())).unwrap();
    run(&with_dir(small(), b.path())).unwrap();
    for f in [SERIES_FILE, SUMMARY_FILE, FINAL_FILE] {
        let x = std::fs::read(a.path().join(f)).unwrap();
        let y = std::fs::read(b.path().join(f)).unwrap();
        assert!(x == y, "{f} differs");
    }
}

#[test]
fn resume_matches_uninterrupted_run() {
    let full = tempfile::tempdir().unwrap();
    let part = tempfile::tempdir().unwrap();
    let c = RunConfig {
        checkpoint_every: 4,
        ..small()
    };
    let reference = run(&with_dir(c.clone(), full.path())).unwrap();
    let cp = with_dir(c.clone(), part.path());
    run(&cp).unwrap();
    let resumed = resume(&cp, &checkpoint_path(part.path(), 4)).unwrap();
    assert_eq!(resumed.rows, reference.rows);
    let drift = (&resumed.state.v - &reference.state.v).max_abs();
    assert_eq!(drift, 0.0);
    assert_eq!(
        std::fs::read(full.path().join(SERIES_FILE)).unwrap(),
        std::fs::read(part.path().join(SERIES_FILE)).unwrap()
    );
}

#[test]
fn checkpoint_round_trip_is_bitwise() {
    let grid = make_grid(8, 3.0).unwrap();
    let f = ScalarField::from_fn(&grid, |x| (x[0] * 1.3).sin() + x[2] * 1e-17);
    let mut s = State::zeros(&grid, 0.123456789);
    s.v = VectorField([f.clone(), f.scale(-2.0), f.map(f64::exp)]);
    s.g.0[1][2] = f.scale(std::f64::consts::PI);
    let dir = tempfile::tempdir().unwrap();
    let p = dir.path().join("a.velab");
    checkpoint_save(&s, &p).unwrap();
    let back = checkpoint_load(&p).unwrap();
    assert_eq!(back.t.to_bits(), s.t.to_bits());
    for (a, b) in back.components().zip(s.components()) {
        assert!(a.values().iter().zip(b.values()).all(|(x, y)| x.to_bits() == y.to_bits()));
    }
}

#[test]
fn corrupted_checkpoints_are_rejected() {
    let grid = make_grid(8, 1.0).unwrap();
    let dir = tempfile::tempdir().unwrap();
    let p = dir.path().join("a.velab");
    checkpoint_save(&State::zeros(&grid, 0.0), &p).unwrap();
    let mut bytes = std::fs::read(&p).unwrap();
    bytes[0] = b'X';
    std::fs::write(&p, &bytes).unwrap();
    assert!(matches!(checkpoint_load(&p), Err(Error::Snapshot { .. })));
    bytes[0] = b'V';
    bytes.truncate(bytes.len() - 3);
    std::fs::write(&p, &bytes).unwrap();
    assert!(matches!(checkpoint_load(&p), Err(Error::Snapshot { .. })));
    assert!(checkpoint_load(&dir.path().join("missing")).is_err());
}

#[test]
fn ols_recovers_a_power_law() {
    let x: Vec<f64> = (1..6).map(|i| (i as f64).ln()).collect();
    let y: Vec<f64> = x.iter().map(|l| 0.3 - 1.5 * l).collect();
    assert!((ols_slope(&x, &y).unwrap() + 1.5).abs() < 1e-14);
    assert_eq!(ols_slope(&[1.0], &[2.0]), None);
    assert_eq!(ols_slope(&[1.0, 1.0], &[2.0, 3.0]), None);
}

#[test]
fn empty_sweep_is_rejected() {
    let spec = SweepSpec {
        base: small(),
        triples: vec![],
    };
    assert!(matches!(sweep(&spec), Err(Error::Config(_))));
}

#[test]
fn single_triple_sweep_equals_run() {
    let base = RunConfig { horizon: 0.3, ..small() };
    let spec = SweepSpec::grid(base.clone(), &[0.1], &[0.01]);
    let table = sweep(&spec).unwrap();
    let direct = run(&spec.member((0.1, 0.01, base.seed))).unwrap();
    assert_eq!(table.rows.len(), 1);
    assert_eq!(table.rows[0].outcome.as_ref().unwrap(), &direct.summary);
}

#[test]
fn sweep_continues_past_a_failed_run() {
    let dir = tempfile::tempdir().unwrap();
    let base = with_dir(RunConfig { horizon: 0.3, ..small() }, dir.path());
    let spec = SweepSpec::grid(base, &[0.0, 1.0], &[0.01]);
    // a plain file where the first run wants its directory
    let blocked = spec.member(spec.triples[0]).output.unwrap();
    std::fs::write(&blocked, b"x").unwrap();
    let table = sweep(&spec).unwrap();
    assert!(table.rows[0].outcome.is_err());
    assert!(table.rows[1].outcome.is_ok());
    assert!(!table.all_succeeded());
    assert!(table.to_string().contains("failed"));
}
