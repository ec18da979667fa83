//! `hlc`: singular-series constants for prime tuple patterns, statistics of
//! the correction factor h(n), and sieve censuses against the model
//! predictions.
//!
//! Exit codes: 0 success, 1 usage or parse errors, 2 mathematically invalid
//! input (inadmissible patterns and other domain violations), 3 capacity
//! ceilings exceeded.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::error::ErrorKind;
use clap::{Parser, Subcommand};

mod commands;
mod output;
mod parallel;

use hlc_core::Error;
use output::Format;

#[derive(Parser)]
#[command(
    name = "hlc",
    version,
    about = "Singular series constants, h(n) statistics, and prime tuple censuses"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,

    /// Output format for the data stream (diagnostics go to stderr).
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    format: Format,

    /// Worker threads for scans; defaults to HLC_THREADS or 1. Output is
    /// identical for every thread count.
    #[arg(long, global = true)]
    threads: Option<usize>,
}

#[derive(Subcommand)]
enum Command {
    /// Singular series of a pattern via the truncated Euler product.
    Constant {
        /// Pattern offsets, e.g. "0,2,6,8".
        #[arg(long)]
        pattern: String,
        /// Truncation prime; defaults to max(1e6, first prime above the
        /// diameter).
        #[arg(long)]
        truncation: Option<u64>,
    },
    /// Moments, extremes, and the value distribution of h(n) up to a bound.
    #[command(name = "h-stats")]
    HStats {
        #[arg(long = "n-max")]
        n_max: u64,
        /// Moment orders to scan, e.g. "1,2".
        #[arg(long, default_value = "1,2")]
        moments: String,
        /// Write the exact frequency table (numerator,denominator,frequency)
        /// to this CSV file.
        #[arg(long)]
        distribution: Option<PathBuf>,
    },
    /// Count prime tuples by segmented sieve and compare predictions.
    Census {
        #[arg(long)]
        pattern: String,
        #[arg(long)]
        x: u64,
        /// Intermediate checkpoints, e.g. "10000,100000".
        #[arg(long)]
        checkpoints: Option<String>,
        /// "start": count starts n <= x; "whole": whole tuple below x.
        #[arg(long = "count-mode", default_value = "start")]
        count_mode: String,
    },
    /// Growth of prod (p-1)/(p-2) against ln q, or pair-constant sequences.
    Asymptotics {
        /// "assertion1" or "sequence".
        #[arg(long)]
        mode: String,
        /// Checkpoints for assertion1 mode, e.g. "1000000,10000000".
        #[arg(long = "q-points")]
        q_points: Option<String>,
        /// Sequence for sequence mode: power_of_two, nth_prime, primorial,
        /// linear.
        #[arg(long)]
        sequence: Option<String>,
        #[arg(long = "n-max")]
        n_max: Option<u64>,
    },
    /// Reduce a symmetric pattern pair by pair, reporting each constant.
    #[command(name = "symmetric-table")]
    SymmetricTable {
        #[arg(long)]
        pattern: String,
        /// Offsets to delete in order; each removes its mirror pair, or the
        /// lone center when the offset is the center.
        #[arg(long = "removal-order")]
        removal_order: Option<String>,
    },
}

fn exit_code_for(error: &Error) -> u8 {
    match error {
        Error::Parse { .. } => 1,
        Error::Domain(_) | Error::Inadmissible { .. } => 2,
        Error::Capacity(_) => 3,
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => 0,
                _ => 1,
            };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    let threads = parallel::resolve_threads(cli.threads);
    let result = match &cli.command {
        Command::Constant { pattern, truncation } => commands::constant(pattern, *truncation),
        Command::HStats {
            n_max,
            moments,
            distribution,
        } => commands::h_stats(*n_max, moments, distribution.as_deref(), threads),
        Command::Census {
            pattern,
            x,
            checkpoints,
            count_mode,
        } => commands::census_cmd(pattern, *x, checkpoints.as_deref(), count_mode, threads),
        Command::Asymptotics {
            mode,
            q_points,
            sequence,
            n_max,
        } => commands::asymptotics_cmd(mode, q_points.as_deref(), sequence.as_deref(), *n_max),
        Command::SymmetricTable {
            pattern,
            removal_order,
        } => commands::symmetric_table(pattern, removal_order.as_deref()),
    };
    match result {
        Ok(envelope) => {
            print!("{}", envelope.render(cli.format));
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code_for(&e))
        }
    }
}
