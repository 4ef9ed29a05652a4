//! Command-line front end: `run`, `plan`, `verify`, `rates`.
//!
//! Exit codes: 0 success, 1 a check failed, 2 bad config or arguments.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use modelopt::harness::{rates_from_csv, run_experiment, run_suite, ExperimentConfig, Suite};
use modelopt::{plan, Error};

#[derive(Parser)]
#[command(name = "modelopt", version, about = "Gradient methods on inexact models: experiments, planning and checks")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run the seeded experiment described by a TOML config.
    Run { config: PathBuf },
    /// Iteration count and batch size for a target accuracy.
    Plan {
        #[arg(long)]
        eps: f64,
        #[arg(long = "L")]
        l: f64,
        #[arg(long = "R")]
        r: f64,
        #[arg(long)]
        sigma: f64,
        /// 1 for GM, 2 for FGM.
        #[arg(long, default_value_t = 2)]
        p: u32,
    },
    /// Run the built-in acceptance suites.
    Verify {
        /// deterministic | stochastic | models | composite | all
        #[arg(long, default_value = "all")]
        suite: String,
    },
    /// Log-log rate fits of a trace CSV written by `run`.
    Rates {
        trace: PathBuf,
        #[arg(long, num_args = 2, value_names = ["K_MIN", "K_MAX"])]
        window: Option<Vec<usize>>,
    },
}

fn config_error(e: &Error) -> bool {
    matches!(e, Error::Config(_) | Error::Unsupported(_) | Error::Contract(_))
}

fn fail(e: Error) -> ExitCode {
    eprintln!("error: {e}");
    ExitCode::from(if config_error(&e) { 2 } else { 1 })
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match cli.command {
        Command::Run { config } => {
            let cfg = match ExperimentConfig::load(&config) {
                Ok(c) => c,
                Err(e) => return fail(e),
            };
            let (exp, out) = match run_experiment(&cfg) {
                Ok(r) => r,
                Err(e) => return fail(e),
            };
            let mut ok = true;
            for run in &exp.aggregate.runs {
                let check = match run.bound_check {
                    Some(b) if b.holds => "bound PASS".to_string(),
                    Some(b) => {
                        ok = false;
                        format!("bound FAIL (excess {:.3e})", b.max_violation)
                    }
                    None => "bound n/a".to_string(),
                };
                println!(
                    "seed {:>6}  gap {:.6e}  calls {:>8}  {check}{}",
                    run.seed,
                    run.output_gap,
                    run.oracle_calls,
                    run.truncated.as_deref().map(|t| format!("  [{t}]")).unwrap_or_default()
                );
            }
            if let Some(fit) = exp.aggregate.rate_fit {
                println!(
                    "median-curve slope {:.3} on [{}, {}] (r2 {:.4})",
                    fit.slope, fit.window.0, fit.window.1, fit.r_squared
                );
            }
            for p in [out.csv, out.json].into_iter().flatten() {
                println!("wrote {}", p.display());
            }
            if ok {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(1)
            }
        }
        Command::Plan { eps, l, r, sigma, p } => match plan(eps, l, r, sigma, p) {
            Ok(pl) => {
                println!("N={} r={} calls={}", pl.n, pl.r, pl.predicted_calls);
                let d = pl.diagnostics;
                println!(
                    "terms/eps: deterministic {:.3} stochastic {:.3} accumulation {:.3}",
                    d.deterministic, d.stochastic, d.accumulation
                );
                ExitCode::SUCCESS
            }
            Err(e) => fail(Error::Config(e.to_string())),
        },
        Command::Verify { suite } => {
            let suite: Suite = match suite.parse() {
                Ok(s) => s,
                Err(e) => return fail(e),
            };
            let results = run_suite(suite, |r| println!("{r}"));
            let failed = results.iter().filter(|r| !r.passed).count();
            println!("{} passed, {failed} failed", results.len() - failed);
            if failed == 0 {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(1)
            }
        }
        Command::Rates { trace, window } => {
            let window = window.map(|w| (w[0], w[1]));
            match rates_from_csv(&trace, window) {
                Ok(r) => {
                    for (seed, fit) in &r.per_seed {
                        match fit {
                            Ok(f) => println!("seed {seed:>6}  slope {:.4}  r2 {:.4}  window {:?}", f.slope, f.r_squared, f.window),
                            Err(e) => println!("seed {seed:>6}  no fit: {e}"),
                        }
                    }
                    match &r.median {
                        Ok(f) => {
                            println!("median     slope {:.4}  r2 {:.4}  window {:?}", f.slope, f.r_squared, f.window);
                            ExitCode::SUCCESS
                        }
                        Err(e) => {
                            println!("median     no fit: {e}");
                            ExitCode::from(1)
                        }
                    }
                }
                Err(e) => fail(e),
            }
        }
    }
}
