//! `curvedef`: batch front end for the curve-deformation toolkit.
//!
//! One run = one JSON config dispatched to a pipeline (prep, split, distort,
//! cohomology, chart, deform). Artifacts land in the configured output
//! directory next to `report.txt`. Exit codes: 0 success, 2 bad config,
//! 3 numeric failure, 4 I/O.

mod commands;
mod config;
mod expr;
mod report;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::Parser;
use curvedef_core::Error;

use crate::report::Report;

#[derive(Parser)]
#[command(name = "curvedef", version, about = "Curve deformation pipelines")]
struct Cli {
    /// Run configuration (JSON).
    #[arg(long)]
    config: PathBuf,
    /// Patch a config key before the run, e.g. `numeric.tol=1e-10`.
    #[arg(long = "override", value_name = "KEY=VALUE")]
    overrides: Vec<String>,
    /// Seed for randomized check directions.
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

fn exit_code_for(err: &Error) -> u8 {
    match err {
        Error::Io(_) | Error::ParseFormat { .. } => 4,
        Error::Config(_)
        | Error::InvalidAnnulus { .. }
        | Error::InvalidWindow { .. }
        | Error::DomainMismatch { .. }
        | Error::DegreeZero
        | Error::DegreeMismatch { .. }
        | Error::MultiplicityMismatch { .. }
        | Error::UnknownChart { .. }
        | Error::SeparationViolated { .. }
        | Error::TransitionNotNormalized { .. }
        | Error::SingularTransitionFactor { .. } => 2,
        _ => 3,
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let cfg = match config::load_config(&cli.config, &cli.overrides) {
        Ok(cfg) => cfg,
        Err(message) => {
            eprintln!("config error: {message}");
            return ExitCode::from(2);
        }
    };
    if let Err(e) = std::fs::create_dir_all(&cfg.output) {
        eprintln!("cannot create output directory {}: {e}", cfg.output.display());
        return ExitCode::from(4);
    }
    match commands::dispatch(&cfg, cli.seed) {
        Ok(report) => {
            let path = cfg.output.join("report.txt");
            if let Err(e) = std::fs::write(&path, report.render()) {
                eprintln!("cannot write {}: {e}", path.display());
                return ExitCode::from(4);
            }
            println!("{}", path.display());
            ExitCode::SUCCESS
        }
        Err(e) => {
            let code = exit_code_for(&e);
            eprintln!("{} failed: {e}", cfg.command.name());
            let mut report = Report::new(cfg.command.name());
            report.line("error", &e);
            report.line("exit_code", code);
            let _ = std::fs::write(cfg.output.join("report.txt"), report.render());
            ExitCode::from(code)
        }
    }
}
