//! Acceptance suite: one PASS/FAIL line per criterion, non-zero exit if any
//! criterion fails.

use std::f64::consts::PI;
use std::io::Write;
use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use velab::calculus::{laplacian, pressure_residual, pressure_solve};
use velab::dynamics::{DataKind, Integrator, IntegratorConfig, Physics, Scheme};
use velab::grid::{make_grid, MatrixField, ScalarField, SpectralGrid, State, VectorField};
use velab::lab::{self, checkpoint_path, RunConfig, RunOutcome, RunStatus, SERIES_FILE, FINAL_FILE};
use velab::verify;

const SEED: u64 = 2024;

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: String) -> Outcome {
    Outcome { pass, detail }
}

fn report(id: u32, name: &str, o: &Outcome) {
    let mut out = std::io::stdout().lock();
    let _ = writeln!(
        out,
        "criterion {id:>2} {name:<28} {}  {}",
        if o.pass { "PASS" } else { "FAIL" },
        o.detail
    );
    let _ = out.flush();
}

fn identity_suite() -> Outcome {
    let start = Instant::now();
    let reports = match verify::run_all(SEED) {
        Ok(r) => r,
        Err(e) => return outcome(false, format!("error: {e}")),
    };
    let elapsed = start.elapsed();
    for r in &reports {
        println!("    {r}");
    }
    let ok = reports.iter().all(|r| r.pass) && elapsed <= Duration::from_secs(120);
    outcome(ok, format!("{} checks in {:.1} s (limit 120 s)", reports.len(), elapsed.as_secs_f64()))
}

/// Random trigonometric field restricted to the retained modes.
fn random_field(grid: &std::sync::Arc<SpectralGrid>, rng: &mut ChaCha8Rng) -> ScalarField {
    let unit = 2.0 * PI / grid.length();
    let terms: Vec<([f64; 3], f64, f64)> = (0..12)
        .map(|_| {
            let k = std::array::from_fn(|_| rng.gen_range(-8i32..=8) as f64 * unit);
            (k, rng.gen_range(-1.0..1.0), rng.gen_range(0.0..2.0 * PI))
        })
        .collect();
    let f = ScalarField::from_fn(grid, |x| {
        terms
            .iter()
            .map(|(k, a, p)| a * (k[0] * x[0] + k[1] * x[1] + k[2] * x[2] + p).cos())
            .sum()
    });
    f.to_spectral().unwrap().dealias().to_physical()
}

fn pressure_solve_check() -> Outcome {
    let grid = make_grid(32, 2.0 * PI).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(SEED);
    let mut worst: f64 = 0.0;
    for _ in 0..5 {
        let g = MatrixField(std::array::from_fn(|_| {
            std::array::from_fn(|_| random_field(&grid, &mut rng))
        }));
        let v = VectorField(std::array::from_fn(|_| random_field(&grid, &mut rng)));
        let pi = pressure_solve(&g, &v);
        let rel = pressure_residual(&g, &v, &pi) / laplacian(&pi).norm();
        worst = worst.max(rel);
    }
    outcome(worst <= 1e-10, format!("max relative residual {worst:.3e} (limit 1e-10)"))
}

fn acceptance_config(nu: f64) -> RunConfig {
    RunConfig {
        nu,
        epsilon: 0.01,
        seed: SEED,
        ..RunConfig::new()
    }
}

struct Production {
    nu: f64,
    result: velab::Result<RunOutcome>,
    elapsed: Duration,
}

fn production_runs() -> Vec<Production> {
    [0.0, 0.01, 0.1, 1.0]
        .into_iter()
        .map(|nu| {
            let start = Instant::now();
            let result = lab::run(&acceptance_config(nu));
            let elapsed = start.elapsed();
            match &result {
                Ok(o) => println!(
                    "    run nu={nu}: {:.0} s, alpha={:?}, null_decay={:?}, max_div_v={:.2e}, max_div_GT={:.2e}, max_compat={:.2e}, max_det_dev={:.2e}",
                    elapsed.as_secs_f64(),
                    o.summary.alpha,
                    o.summary.null_decay,
                    o.summary.max_div_v,
                    o.summary.max_div_gt,
                    o.summary.max_compat,
                    o.summary.max_det_dev
                ),
                Err(e) => println!("    run nu={nu}: error {e}"),
            }
            Production {
                nu,
                result,
                elapsed,
            }
        })
        .collect()
}

fn completed(p: &Production) -> Option<&RunOutcome> {
    p.result
        .as_ref()
        .ok()
        .filter(|o| o.summary.status == RunStatus::Completed)
}

fn constraint_check(runs: &[Production]) -> Outcome {
    let mut worst: f64 = 0.0;
    let mut slowest = Duration::ZERO;
    let mut ok = true;
    for p in runs.iter().filter(|p| [0.0, 0.1, 1.0].contains(&p.nu)) {
        slowest = slowest.max(p.elapsed);
        match completed(p) {
            Some(o) => {
                let s = &o.summary;
                worst = worst.max(s.max_div_v).max(s.max_div_gt).max(s.max_compat);
            }
            None => ok = false,
        }
    }
    let ok = ok && worst <= 1e-7 && slowest <= Duration::from_secs(15 * 60);
    outcome(
        ok,
        format!(
            "max relative defect {worst:.3e} (limit 1e-7), slowest run {:.0} s (limit 900 s)",
            slowest.as_secs_f64()
        ),
    )
}

fn volume_check(runs: &[Production]) -> Outcome {
    let mut worst: f64 = 0.0;
    let mut ok = true;
    for p in runs.iter().filter(|p| [0.0, 0.1, 1.0].contains(&p.nu)) {
        match completed(p) {
            Some(o) => worst = worst.max(o.summary.max_det_dev),
            None => ok = false,
        }
    }
    outcome(ok && worst <= 1e-6, format!("max|det(I+G) - 1| = {worst:.3e} (limit 1e-6)"))
}

fn energy_balance_check() -> Outcome {
    let config = RunConfig {
        n: 16,
        length: 16.0 * PI,
        nu: 0.5,
        epsilon: 0.01,
        data_kind: DataKind::TaylorGreen,
        nonlinear: false,
        integrator: IntegratorConfig {
            scheme: Scheme::Rk4Exponential,
            cfl: 1.0,
            dt_max: 2e-3,
        },
        cadence: 1,
        p: 0,
        q: 0,
        horizon: 1.0,
        ..RunConfig::new()
    };
    match lab::run(&config) {
        Ok(o) => {
            let worst = o.summary.max_energy_balance.unwrap_or(f64::INFINITY);
            outcome(
                worst <= 1e-8,
                format!("max balance residual {worst:.3e} over {} samples (limit 1e-8)", o.rows.len()),
            )
        }
        Err(e) => outcome(false, format!("error: {e}")),
    }
}

fn heat_kernel_check() -> Outcome {
    let grid = make_grid(16, 2.0 * PI).unwrap();
    let v0 = VectorField::from_fn(&grid, |x| [0.0, 0.0, (2.0 * x[0] + x[1]).sin()]);
    let k2 = 5.0;
    let mut worst: f64 = 0.0;
    for nu in [0.01, 1.0] {
        let physics = Physics {
            nu,
            nonlinear: false,
            elastic: false,
        };
        let cfg = IntegratorConfig {
            scheme: Scheme::Rk4Exponential,
            cfl: 0.9,
            dt_max: 0.1,
        };
        let integ = Integrator::new(physics, cfg).unwrap();
        let mut s = State::new(0.0, MatrixField::zeros(&grid), v0.clone()).unwrap();
        while s.t < 1.0 - 1e-12 {
            let dt = integ.cfl_dt(&s).min(1.0 - s.t);
            s = integ.step(&s, dt).unwrap();
        }
        let expect = v0.scale((-nu * k2 * s.t).exp());
        worst = worst.max((&s.v - &expect).max_abs() / expect.max_abs());
    }
    outcome(worst <= 1e-10, format!("max relative error {worst:.3e} (limit 1e-10)"))
}

fn slow_growth_check(runs: &[Production]) -> Outcome {
    let mut alphas = Vec::new();
    for p in runs {
        match completed(p).and_then(|o| o.summary.alpha) {
            Some(a) => alphas.push(a),
            None => return outcome(false, format!("no fitted exponent at nu = {}", p.nu)),
        }
    }
    let max = alphas.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let min = alphas.iter().cloned().fold(f64::INFINITY, f64::min);
    let listed: Vec<String> = alphas.iter().map(|a| format!("{a:.4}")).collect();
    outcome(
        max <= 0.1 && max - min <= 0.05,
        format!(
            "alpha = [{}] for nu = [0, 0.01, 0.1, 1]; max {max:.4} (limit 0.1), spread {:.4} (limit 0.05)",
            listed.join(", "),
            max - min
        ),
    )
}

fn null_decay_check(runs: &[Production]) -> Outcome {
    let mut rates = Vec::new();
    for p in runs {
        match completed(p).and_then(|o| o.summary.null_decay) {
            Some(a) => rates.push(a),
            None => return outcome(false, format!("no fitted decay at nu = {}", p.nu)),
        }
    }
    let max = rates.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let listed: Vec<String> = rates.iter().map(|a| format!("{a:.3}")).collect();
    outcome(
        max <= -1.0,
        format!("decay exponents [{}]; max {max:.3} (limit -1)", listed.join(", ")),
    )
}

fn terminal_state(dt: f64, t_end: f64) -> State {
    let grid = make_grid(16, 2.0 * PI).unwrap();
    let v = VectorField::from_fn(&grid, |x| {
        let a = 0.3;
        [
            a * x[0].sin() * x[1].cos() * x[2].cos(),
            -a * x[0].cos() * x[1].sin() * x[2].cos(),
            0.0,
        ]
    });
    let g = MatrixField::from_fn(&grid, |x| {
        let s = 0.1 * (x[0] + x[2]).sin();
        [[0.0, 0.0, 0.0], [0.0, 0.0, 0.0], [0.0, s, 0.0]]
    });
    let cfg = IntegratorConfig {
        scheme: Scheme::Rk4Exponential,
        cfl: 1.0,
        dt_max: 1.0,
    };
    let integ = Integrator::new(Physics::new(0.1), cfg).unwrap();
    let mut s = State::new(0.0, g, v).unwrap();
    let steps = (t_end / dt).round() as usize;
    for _ in 0..steps {
        s = integ.step(&s, dt).unwrap();
    }
    s
}

fn integrator_order_check() -> Outcome {
    let t_end = 1.0;
    let dts = [0.1, 0.05, 0.025];
    let reference = terminal_state(dts[2] / 8.0, t_end);
    let mut logs = (Vec::new(), Vec::new());
    let mut errors = Vec::new();
    for &dt in &dts {
        let s = terminal_state(dt, t_end);
        let err = (&s.v - &reference.v).max_abs().max((&s.g - &reference.g).max_abs());
        errors.push(err);
        logs.0.push(dt.ln());
        logs.1.push(err.ln());
    }
    let slope = lab::ols_slope(&logs.0, &logs.1).unwrap_or(f64::NAN);
    let listed: Vec<String> = errors.iter().map(|e| format!("{e:.3e}")).collect();
    outcome(
        slope >= 3.7,
        format!("errors [{}] at dt {dts:?}; slope {slope:.3} (limit 3.7)", listed.join(", ")),
    )
}

fn determinism_check() -> Outcome {
    let base = RunConfig {
        n: 32,
        horizon: 2.0,
        checkpoint_every: 10,
        ..acceptance_config(0.1)
    };
    let dirs: Vec<tempfile::TempDir> = (0..3).map(|_| tempfile::tempdir().unwrap()).collect();
    let cfg = |i: usize| RunConfig {
        output: Some(dirs[i].path().to_path_buf()),
        ..base.clone()
    };
    let run = |i: usize| lab::run(&cfg(i));
    let (a, b) = match (run(0), run(1)) {
        (Ok(a), Ok(b)) => (a, b),
        (Err(e), _) | (_, Err(e)) => return outcome(false, format!("error: {e}")),
    };
    let same_bytes = [SERIES_FILE, FINAL_FILE].iter().all(|f| {
        std::fs::read(dirs[0].path().join(f)).ok() == std::fs::read(dirs[1].path().join(f)).ok()
    });
    if let Err(e) = run(2) {
        return outcome(false, format!("error: {e}"));
    }
    let resumed = match lab::resume(&cfg(2), &checkpoint_path(dirs[2].path(), 20)) {
        Ok(r) => r,
        Err(e) => return outcome(false, format!("error: {e}")),
    };
    let scale = a.state.max_abs();
    let drift = (&resumed.state.v - &a.state.v)
        .max_abs()
        .max((&resumed.state.g - &a.state.g).max_abs())
        / scale;
    let rows_match = resumed.rows == b.rows;
    outcome(
        same_bytes && drift <= 1e-12 && rows_match,
        format!("byte-identical reruns: {same_bytes}; resumed drift {drift:.3e} (limit 1e-12); series match: {rows_match}"),
    )
}

fn main() {
    let start = Instant::now();
    let mut results = Vec::new();
    let mut record = |id: u32, name: &str, o: Outcome| {
        report(id, name, &o);
        results.push(o.pass);
    };

    record(1, "identity suite", identity_suite());
    record(2, "pressure solve", pressure_solve_check());
    record(5, "linear energy balance", energy_balance_check());
    record(6, "heat-kernel exactness", heat_kernel_check());
    record(9, "integrator order", integrator_order_check());
    record(10, "determinism and resume", determinism_check());

    let runs = production_runs();
    record(3, "constraint propagation", constraint_check(&runs));
    record(4, "volume preservation", volume_check(&runs));
    record(7, "slow growth uniform in nu", slow_growth_check(&runs));
    record(8, "null-norm decay", null_decay_check(&runs));

    let failed = results.iter().filter(|p| !**p).count();
    println!(
        "acceptance: {} of {} criteria pass ({:.0} s)",
        results.len() - failed,
        results.len(),
        start.elapsed().as_secs_f64()
    );
    if failed > 0 {
        std::process::exit(1);
    }
}
