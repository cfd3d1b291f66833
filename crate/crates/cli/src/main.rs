use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use kgnr_core::harness::{emit_outputs, run_experiment, ExperimentConfig, ExperimentKind};
use kgnr_core::KgError;
use kgnr_verify::{all_criteria, CriterionReport};

#[derive(Parser)]
#[command(
    name = "kgnr",
    version,
    about = "Klein-Gordon non-relativistic limit convergence studies"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run the experiment described by a JSON config and write CSV, JSON and a gnuplot script.
    Run {
        config: PathBuf,
        /// Overrides `output_dir` from the config.
        #[arg(long)]
        output_dir: Option<PathBuf>,
    },
    /// List the experiment kinds accepted in configs.
    ListExperiments,
    /// Run the acceptance suite.
    Verify {
        /// Run only these criteria (by number).
        #[arg(long = "criterion", value_name = "N")]
        only: Vec<u32>,
    },
}

const EXIT_CONFIG: u8 = 1;
const EXIT_GUARD: u8 = 2;
const EXIT_ACCEPTANCE: u8 = 3;

fn fail(e: KgError) -> ExitCode {
    eprintln!("error: {e}");
    ExitCode::from(match e {
        KgError::StepRestriction { .. } => EXIT_GUARD,
        _ => EXIT_CONFIG,
    })
}

fn run(config: PathBuf, output_dir: Option<PathBuf>) -> Result<(), KgError> {
    let mut cfg = ExperimentConfig::load(&config)?;
    if let Some(dir) = output_dir {
        cfg.output_dir = dir;
    }
    let table = run_experiment(&cfg)?;
    let files = emit_outputs(&table, &cfg)?;
    println!("{}: {} rows", cfg.experiment.name(), table.rows.len());
    for q in table.quantities() {
        match table.slope(&q) {
            Some(s) => println!("  {q}: slope {s:.3}"),
            None => println!("  {q}"),
        }
    }
    for f in [&files.csv, &files.json, &files.plot] {
        println!("wrote {}", f.display());
    }
    Ok(())
}

fn verify(only: &[u32]) -> ExitCode {
    let mut failed = 0;
    let mut ran = 0;
    for (id, criterion) in all_criteria() {
        if !only.is_empty() && !only.contains(&id) {
            continue;
        }
        ran += 1;
        let report = criterion().unwrap_or_else(|e| CriterionReport {
            id,
            title: "error",
            passed: false,
            detail: e.to_string(),
        });
        println!("{}", report.line());
        failed += usize::from(!report.passed);
    }
    if ran == 0 {
        eprintln!("error: no criterion matches {only:?}");
        return ExitCode::from(EXIT_CONFIG);
    }
    println!("{} passed, {failed} failed", ran - failed);
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(EXIT_ACCEPTANCE)
    }
}

fn main() -> ExitCode {
    match Cli::parse().command {
        Command::Run { config, output_dir } => match run(config, output_dir) {
            Ok(()) => ExitCode::SUCCESS,
            Err(e) => fail(e),
        },
        Command::ListExperiments => {
            for kind in ExperimentKind::ALL {
                println!("{:<26} {}", kind.name(), kind.description());
            }
            ExitCode::SUCCESS
        }
        Command::Verify { only } => verify(&only),
    }
}
