use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::Context;
use clap::{Args, Parser, Subcommand};

use teleport_core::report::{
    compare, parse_grid, render_compare, render_sweep, render_verify, run_sweep, verify, write_output, GoldenSet,
    OutputFormat, ProtocolChoice, RunConfig, SweepConfig, VerifyConfig, DEFAULT_MAX_ROUNDS, DEFAULT_SAMPLES,
    DEFAULT_SEED, DEFAULT_TARGET,
};

/// Teleportation protocol simulator.
#[derive(Parser)]
#[command(name = "teleport-sim", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Output {
    #[arg(long, value_enum)]
    format: Option<OutputFormat>,
    /// Write here instead of stdout.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Subcommand)]
enum Command {
    /// Check the register against every golden expansion and the protocol properties.
    Verify {
        #[arg(long, default_value_t = DEFAULT_SEED)]
        seed: u64,
        /// Random inputs per check.
        #[arg(long, default_value_t = DEFAULT_SAMPLES)]
        runs: u64,
        /// Golden expansion file replacing the bundled one.
        #[arg(long)]
        golden: Option<PathBuf>,
        #[command(flatten)]
        output: Output,
    },
    /// Run protocols on random inputs and tabulate fidelity and classical cost.
    Compare {
        #[arg(long, value_enum, default_value = "both")]
        protocol: ProtocolChoice,
        #[arg(long, default_value_t = 1000)]
        runs: u64,
        #[arg(long, default_value_t = DEFAULT_SEED)]
        seed: u64,
        /// Werner fidelity of each shared pair.
        #[arg(long)]
        noise_f: Option<f64>,
        /// Distil pairs up to this fidelity first.
        #[arg(long)]
        distill_target: Option<f64>,
        #[arg(long, default_value_t = DEFAULT_MAX_ROUNDS)]
        max_rounds: u32,
        #[command(flatten)]
        output: Output,
    },
    /// Tabulate recurrence distillation over a grid of pair fidelities.
    Sweep {
        /// START:STOP:STEP, inclusive.
        #[arg(long, conflicts_with = "noise_f", required_unless_present = "noise_f")]
        grid: Option<String>,
        /// A single grid point.
        #[arg(long)]
        noise_f: Option<f64>,
        #[arg(long, default_value_t = DEFAULT_TARGET)]
        distill_target: f64,
        #[arg(long, default_value_t = DEFAULT_MAX_ROUNDS)]
        max_rounds: u32,
        #[arg(long, default_value_t = DEFAULT_SEED)]
        seed: u64,
        #[command(flatten)]
        output: Output,
    },
}

fn execute(cli: Cli) -> anyhow::Result<bool> {
    match cli.command {
        Command::Verify { seed, runs, golden, output } => {
            let golden = match golden {
                Some(path) => GoldenSet::load(&path)?,
                None => GoldenSet::bundled()?,
            };
            let report = verify(&VerifyConfig { seed, samples: runs, golden })?;
            let bytes = render_verify(&report, output.format.unwrap_or(OutputFormat::Text))?;
            write_output(&bytes, output.out.as_deref())?;
            if let Some(bad) = report.first_failure() {
                eprintln!("verification failed: {} (max error {:e})", bad.name, bad.max_error);
                return Ok(false);
            }
            Ok(true)
        }
        Command::Compare { protocol, runs, seed, noise_f, distill_target, max_rounds, output } => {
            let format = output.format.unwrap_or(OutputFormat::Text);
            let cfg = RunConfig {
                protocol,
                n_runs: runs,
                seed,
                noise_f,
                distill_target,
                max_rounds,
                format,
                out: output.out,
            };
            let report = compare(&cfg)?;
            write_output(&render_compare(&report, format)?, cfg.out.as_deref())?;
            Ok(true)
        }
        Command::Sweep { grid, noise_f, distill_target, max_rounds, seed, output } => {
            let grid = match (grid, noise_f) {
                (Some(spec), _) => parse_grid(&spec)?,
                (None, Some(f)) => vec![f],
                (None, None) => unreachable!("clap requires one of --grid and --noise-f"),
            };
            let rows = run_sweep(&SweepConfig { grid, distill_target, max_rounds, seed })
                .context("sweep failed")?;
            write_output(&render_sweep(&rows, output.format.unwrap_or(OutputFormat::Csv))?, output.out.as_deref())?;
            Ok(true)
        }
    }
}

fn main() -> ExitCode {
    match execute(Cli::parse()) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
