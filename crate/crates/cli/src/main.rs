//! `lrinv`: tables of exact, perturbative, WKB and grid solutions for driven
//! optical traps.

mod commands;
mod figures;
mod output;
mod scenario;
mod verify;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use output::Sink;
use scenario::{Scenario, ScenarioArgs, UsageError};

#[derive(Debug, Parser)]
#[command(name = "lrinv", version, about = "Invariant-based solutions of driven optical traps")]
struct Cli {
    /// JSON scenario file; flags override its keys
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Directory for output files (default: CSV/JSON to stdout)
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// σ(t), σ̇(t) and the driving field
    Ep(ScenarioArgs),
    /// Coefficients of the quadratic invariant
    Invariant(ScenarioArgs),
    /// Invariant eigenvalues λₙ per method
    Eigen(ScenarioArgs),
    /// ψₙ(x,t) on the lab grid
    Wavefn(ScenarioArgs),
    /// ⟨x⟩, ⟨p⟩, ⟨x²⟩, ⟨p²⟩ and ΔxΔp
    Observables(ScenarioArgs),
    /// Autocorrelation |⟨ψₙ(0)|ψₙ(t)⟩|²
    Autocorr(ScenarioArgs),
    /// Run the self-checks and print a JSON report
    Verify {
        /// Include the Crank–Nicolson propagation check
        #[arg(long)]
        full: bool,
    },
    /// Data for a reference figure
    Figures {
        #[arg(long, value_parser = clap::value_parser!(u8).range(1..=6))]
        id: u8,
    },
}

fn scenario(cli: &Cli, args: &ScenarioArgs) -> anyhow::Result<Scenario> {
    let base = match &cli.config {
        Some(path) => Scenario::load(path)?,
        None => Scenario::default(),
    };
    Ok(base.overlay(args))
}

fn configure_threads() -> anyhow::Result<()> {
    if let Ok(v) = std::env::var("LR_NUM_THREADS") {
        let n: usize = v
            .parse()
            .map_err(|_| UsageError(format!("LR_NUM_THREADS must be a positive integer, got '{v}'")))?;
        rayon::ThreadPoolBuilder::new().num_threads(n).build_global()?;
    }
    Ok(())
}

/// Returns whether every check passed (only `verify` can fail softly).
fn run(cli: &Cli) -> anyhow::Result<bool> {
    configure_threads()?;
    let sink = Sink::new(cli.out.as_deref())?;
    let (name, table) = match &cli.command {
        Command::Ep(a) => ("ep.csv".to_string(), commands::ep_table(&scenario(cli, a)?)?),
        Command::Invariant(a) => ("invariant.csv".to_string(), commands::invariant_table(&scenario(cli, a)?)?),
        Command::Eigen(a) => ("eigen.csv".to_string(), commands::eigen_table(&scenario(cli, a)?)?),
        Command::Wavefn(a) => ("wavefn.csv".to_string(), commands::wavefn_table(&scenario(cli, a)?)?),
        Command::Observables(a) => ("observables.csv".to_string(), commands::observables_table(&scenario(cli, a)?)?),
        Command::Autocorr(a) => ("autocorr.csv".to_string(), commands::autocorr_table(&scenario(cli, a)?)?),
        Command::Figures { id } => (format!("fig{id}.csv"), figures::figure(*id)?),
        Command::Verify { full } => {
            let checks = verify::run(*full)?;
            let ok = checks.iter().all(verify::Check::passed);
            let mut text = serde_json::to_string_pretty(&checks)?;
            text.push('\n');
            sink.text("verify.json", &text)?;
            return Ok(ok);
        }
    };
    sink.table(&name, &table)?;
    Ok(true)
}

/// Bad flags or scenario values, including parameter combinations a solver
/// rejects up front, exit with status 2.
fn is_usage(e: &anyhow::Error) -> bool {
    use lrinv_core::Error as Core;
    e.downcast_ref::<UsageError>().is_some()
        || matches!(
            e.downcast_ref::<Core>(),
            Some(Core::InvalidConfig(_) | Core::Constraint(_) | Core::UnboundedSpectrum(_) | Core::OrderTooLarge { .. })
        )
}

/// A closed downstream pipe (e.g. `| head`) is not an error.
fn is_broken_pipe(e: &anyhow::Error) -> bool {
    let pipe = |io: &std::io::Error| io.kind() == std::io::ErrorKind::BrokenPipe;
    e.chain().any(|c| match (c.downcast_ref::<std::io::Error>(), c.downcast_ref::<csv::Error>()) {
        (Some(io), _) => pipe(io),
        (_, Some(ce)) => matches!(ce.kind(), csv::ErrorKind::Io(io) if pipe(io)),
        _ => false,
    })
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => {
            eprintln!("lrinv: verification failed");
            ExitCode::from(1)
        }
        Err(e) if is_broken_pipe(&e) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("lrinv: {e:#}");
            if is_usage(&e) {
                ExitCode::from(2)
            } else {
                ExitCode::from(1)
            }
        }
    }
}
