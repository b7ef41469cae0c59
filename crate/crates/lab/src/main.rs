use std::path::PathBuf;
use std::process::ExitCode;

use beltrami_lab::commands::{self, EXIT_INPUT};
use beltrami_lab::config::{Overrides, RunConfig};
use clap::{Parser, Subcommand};

#[derive(Parser)]
#[command(name = "beltrami", version, about = "Beltrami-equation solver and admissibility checks")]
struct Cli {
    #[command(subcommand)]
    command: Command,
    /// TOML run configuration.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Output directory (overrides output.dir).
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Worker threads (default: logical cores).
    #[arg(long, global = true)]
    threads: Option<usize>,
    /// Grid resolution N (overrides grid.resolution).
    #[arg(long, global = true)]
    resolution: Option<usize>,
    /// Solver tolerance (overrides solver.tol).
    #[arg(long, global = true)]
    tol: Option<f64>,
    /// Seed for generated coefficients (overrides seed).
    #[arg(long, global = true)]
    seed: Option<u64>,
}

#[derive(Subcommand, Clone, Copy)]
enum Command {
    /// Classify the six divergence conditions for [phi].
    CheckPhi,
    /// Admissibility evidence for the coefficient dilatation.
    CheckField,
    /// Solve the Beltrami equation for [coefficients].
    Solve,
    /// Sample the radial oracle for a radial profile.
    Oracle,
}

fn run(cli: &Cli) -> beltrami_lab::Result<i32> {
    let mut cfg = match &cli.config {
        Some(p) => RunConfig::load(p)?,
        None => RunConfig::default(),
    };
    cfg.apply(&Overrides {
        out: cli.out.clone(),
        threads: cli.threads,
        resolution: cli.resolution,
        tol: cli.tol,
        seed: cli.seed,
    });
    cfg.validate()?;
    if let Some(n) = cfg.threads {
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .map_err(|e| beltrami_lab::LabError::input(e.to_string()))?;
    }
    match cli.command {
        Command::CheckPhi => commands::check_phi(&cfg),
        Command::CheckField => commands::check_field(&cfg),
        Command::Solve => commands::solve(&cfg),
        Command::Oracle => commands::oracle(&cfg),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) if e.use_stderr() => {
            let _ = e.print();
            return ExitCode::from(EXIT_INPUT as u8);
        }
        Err(e) => {
            let _ = e.print();
            return ExitCode::SUCCESS;
        }
    };
    match run(&cli) {
        Ok(code) => ExitCode::from(code as u8),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(EXIT_INPUT as u8)
        }
    }
}
