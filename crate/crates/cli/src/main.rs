use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use svpite_cli::output::error_json;
use svpite_cli::runner::RunOptions;
use svpite_cli::spec::Algorithm;
use svpite_cli::sweep::parse_gammas;
use svpite_cli::CliError;

/// Spin-model ground-state workbench: probabilistic imaginary-time
/// evolution in state-vector and shot-based form, a Lanczos reference, and
/// dynamic-structure-factor runs, driven by JSON run specifications.
#[derive(Parser)]
#[command(name = "svpite", version, about)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(clap::Args)]
struct CommonArgs {
    /// Run specification file (JSON).
    #[arg(long)]
    config: PathBuf,
    /// Output directory for result.json and the CSV series.
    #[arg(long)]
    out: PathBuf,
    /// Override the specification's seed.
    #[arg(long)]
    seed: Option<u64>,
    /// Write the final state (run-sv) or ground state (run-ed) in the
    /// SVPT format.
    #[arg(long)]
    dump_state: bool,
}

#[derive(Subcommand)]
enum Command {
    /// State-vector PITE run.
    RunSv(CommonArgs),
    /// Shot-based PITE run.
    RunShot(CommonArgs),
    /// Lanczos ground state.
    RunEd(CommonArgs),
    /// Dynamic structure factor from a prepared ground state.
    RunDsf(CommonArgs),
    /// State-vector runs over a γ grid.
    SweepGamma {
        #[command(flatten)]
        common: CommonArgs,
        /// γ values: "start:stop:step" (inclusive) or a comma list.
        #[arg(long)]
        gammas: Option<String>,
    },
    /// Wall-clock comparison of sequential vs concurrent branch evolution.
    Bench(CommonArgs),
}

fn configure_threads() {
    if let Ok(value) = std::env::var("SVPITE_THREADS") {
        if let Ok(n) = value.trim().parse::<usize>() {
            if n > 0 {
                // Ignore the error if a pool already exists (tests).
                let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
            }
        }
    }
}

fn execute(command: Command) -> Result<(), CliError> {
    let (common, expected, gammas) = match command {
        Command::RunSv(c) => (c, Algorithm::Sv, None),
        Command::RunShot(c) => (c, Algorithm::Shot, None),
        Command::RunEd(c) => (c, Algorithm::Ed, None),
        Command::RunDsf(c) => (c, Algorithm::Dsf, None),
        Command::SweepGamma { common, gammas } => (common, Algorithm::Sweep, gammas),
        Command::Bench(c) => (c, Algorithm::Bench, None),
    };
    let spec = svpite_cli::parse_runspec(&common.config)?;
    if spec.algorithm != expected {
        return Err(CliError::Schema(format!(
            "algorithm: specification says {:?} but the subcommand expects {:?}",
            spec.algorithm.name(),
            expected.name()
        )));
    }
    let opts = RunOptions {
        seed: common.seed,
        gammas: gammas.as_deref().map(parse_gammas).transpose()?,
        dump_state: common.dump_state,
    };
    svpite_cli::run(&spec, &common.out, &opts)
}

fn main() -> ExitCode {
    configure_threads();
    let cli = Cli::parse();
    match execute(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("{}", error_json(&err));
            ExitCode::FAILURE
        }
    }
}
