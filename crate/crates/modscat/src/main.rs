use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use modscat::diagnostics::read_column;
use modscat::fit::fit_window;
use modscat::propcheck::{run_suite, Suite};
use modscat::runner::{contrast_experiment, run_experiment, run_sweep, RunOutcome};
use modscat::{ExperimentConfig, RunError};
use modscat_core::solver::Frame;

/// Long-time diagnostics for defocusing nonlinear Schrödinger equations.
#[derive(Parser)]
#[command(name = "modscat", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run a config and write its artifacts.
    Simulate {
        config: PathBuf,
        /// Overrides the configured output directory.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run with and without the phase correction and compare the gaps.
    Contrast {
        config: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run in the compactified frame (t_end is the final τ < 1).
    Pseudoconformal {
        config: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run several configs in parallel (MODSCAT_THREADS caps the threads).
    Sweep { configs: Vec<PathBuf> },
    /// Randomized checks of the pointwise and functional inequalities.
    Propcheck {
        #[arg(long, value_enum, default_value = "all")]
        suite: Suite,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 10_000)]
        samples: u64,
        /// Writes the JSON report here instead of stdout.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Fit `value ≈ c t^{-alpha}` to a CSV column over the window [T/4, T].
    Fit {
        csv: PathBuf,
        #[arg(long, default_value = "linf")]
        column: String,
        #[arg(long, default_value_t = 1)]
        dim: usize,
    },
}

fn load(path: &Path, out: Option<PathBuf>) -> Result<ExperimentConfig, RunError> {
    let mut c = ExperimentConfig::load(path)?;
    if let Some(dir) = out {
        c.output.dir = dir;
    }
    Ok(c)
}

fn report(outcome: &RunOutcome) {
    let s = &outcome.summary;
    println!("run {} ({}) written to {}", outcome.run_id, outcome.config.name, outcome.config.output.dir.display());
    println!("steps {} final time {}", s.steps, s.final_time);
    println!("mass drift {:e}", s.mass_drift);
    if let Some(e) = s.energy_drift {
        println!("energy drift {e:e}");
    }
    if let Some(r) = s.max_cpce_residual {
        println!("pseudoconformal residual {r:e}");
    }
    if let Some(g) = &s.final_gap {
        println!(
            "final profile at t = {} with gap {:e} (dyadic gaps nonincreasing from t = 4: {})",
            g.time, g.achieved_gap, g.dyadic_monotone_after_4
        );
    }
    if s.under_resolved {
        println!("warning: spectral tail exceeded the tolerance; the run is under-resolved");
    }
}

fn run(cli: Cli) -> Result<(), RunError> {
    match cli.command {
        Command::Simulate { config, out } => report(&run_experiment(&load(&config, out)?)?),
        Command::Contrast { config, out } => {
            let r = contrast_experiment(&load(&config, out)?)?;
            report(&r.outcome);
            println!("s,t,corrected,uncorrected,ratio");
            for row in &r.rows {
                println!("{},{},{:e},{:e},{:e}", row.s, row.t, row.corrected, row.uncorrected, row.ratio);
            }
        }
        Command::Pseudoconformal { config, out } => {
            let mut c = load(&config, out)?;
            c.equation.frame = Frame::Pseudoconformal;
            report(&run_experiment(&c)?);
        }
        Command::Sweep { configs } => {
            let loaded = configs.iter().map(|p| load(p, None)).collect::<Result<Vec<_>, _>>()?;
            let mut first_err = None;
            for (path, r) in configs.iter().zip(run_sweep(&loaded)) {
                match r {
                    Ok(o) => report(&o),
                    Err(e) => {
                        eprintln!("{}: {e}", path.display());
                        first_err.get_or_insert(e);
                    }
                }
            }
            if let Some(e) = first_err {
                return Err(e);
            }
        }
        Command::Propcheck { suite, seed, samples, out } => {
            let reports = run_suite(suite, samples, seed)?;
            let json = serde_json::to_string_pretty(&reports)? + "\n";
            match out {
                Some(p) => std::fs::write(p, json)?,
                None => print!("{json}"),
            }
            let failed: Vec<&str> = reports
                .iter()
                .flat_map(|r| &r.reports)
                .filter(|r| !r.passed())
                .map(|r| r.name.as_str())
                .collect();
            if !failed.is_empty() {
                return Err(RunError::invariant("propcheck", failed.join(", ")));
            }
        }
        Command::Fit { csv, column, dim } => {
            let (t, v) = read_column(&csv, &column)?;
            let fit = fit_window(&t, &v, dim)?;
            println!("{}", serde_json::to_string_pretty(&fit)?);
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("modscat: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
