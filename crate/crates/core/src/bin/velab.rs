use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

use clap::{Parser, Subcommand};

use velab::diagnostics::{constraint_residuals, det_identity_plus};
use velab::lab::{self, parse_list, RunConfig, RunStatus, SweepSpec};
use velab::{verify, Error};

#[derive(Parser)]
#[command(name = "velab", version, about = "Viscoelastic flow simulator and verification lab")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run one configuration and write its output bundle.
    Run {
        #[arg(long)]
        config: PathBuf,
        /// Continue from a checkpoint of an earlier run of the same config.
        #[arg(long)]
        resume: Option<PathBuf>,
    },
    /// Run every (nu, epsilon) combination of a base configuration.
    Sweep {
        #[arg(long)]
        config: PathBuf,
        /// Comma-separated viscosities.
        #[arg(long)]
        nu_list: String,
        /// Comma-separated amplitudes.
        #[arg(long)]
        eps_list: String,
    },
    /// Check the commutation identities on random ensembles.
    Verify {
        #[arg(long, default_value_t = 2024)]
        seed: u64,
    },
    /// Describe a checkpoint file.
    Info { checkpoint: PathBuf },
}

fn exit_code(e: &Error) -> ExitCode {
    match e {
        Error::Config(_) => ExitCode::from(2),
        _ => ExitCode::from(1),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match execute(cli.command) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            exit_code(&e)
        }
    }
}

fn execute(cmd: Command) -> velab::Result<ExitCode> {
    match cmd {
        Command::Run { config, resume } => {
            let cfg = RunConfig::load(&config)?;
            let out = match resume {
                Some(cp) => lab::resume(&cfg, &cp)?,
                None => lab::run(&cfg)?,
            };
            print!("{}", out.summary);
            Ok(match out.summary.status {
                RunStatus::Completed => ExitCode::SUCCESS,
                RunStatus::BlowUp { .. } => ExitCode::from(1),
            })
        }
        Command::Sweep {
            config,
            nu_list,
            eps_list,
        } => {
            let base = RunConfig::load(&config)?;
            let nus: Vec<f64> = parse_list("--nu-list", &nu_list)?;
            let eps: Vec<f64> = parse_list("--eps-list", &eps_list)?;
            let table = lab::sweep(&SweepSpec::grid(base, &nus, &eps))?;
            print!("{table}");
            Ok(if table.all_succeeded() {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(1)
            })
        }
        Command::Verify { seed } => {
            let start = Instant::now();
            let reports = verify::run_all(seed)?;
            for r in &reports {
                println!("{r}");
            }
            println!("elapsed {:.1} s", start.elapsed().as_secs_f64());
            Ok(if reports.iter().all(|r| r.pass) {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(1)
            })
        }
        Command::Info { checkpoint } => {
            let state = lab::checkpoint_load(&checkpoint)?;
            let grid = state.grid();
            println!("n = {}", grid.n());
            println!("L = {}", grid.length());
            println!("t = {}", state.t);
            println!("max|G| = {:.6e}", state.g.max_abs());
            println!("max|v| = {:.6e}", state.v.max_magnitude());
            println!("norm = {:.6e}", state.norm());
            let c = constraint_residuals(&state).relative(state.norm());
            println!("div_v = {:.3e}", c.div_v);
            println!("div_GT = {:.3e}", c.div_gt);
            println!("compat = {:.3e}", c.compat);
            let det = (0..grid.len())
                .map(|p| (det_identity_plus(&state.g.at(p)) - 1.0).abs())
                .fold(0.0, f64::max);
            println!("det_dev = {det:.3e}");
            Ok(ExitCode::SUCCESS)
        }
    }
}
