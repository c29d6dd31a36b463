//! `wbslope` — experiment runner for wideband-slope studies of
//! line-of-sight interference channels.
//!
//! One invocation runs one experiment, either from a TOML config file
//! (`wbslope run exp.toml`, which also writes a digest manifest) or from
//! flags (`wbslope two-user-sweep --steps 40 …`). All randomness flows from
//! an explicit seed, so identical inputs always produce byte-identical
//! result files. Exit status: 0 on success, 1 when a computation rejects
//! its inputs or fails, 2 for unusable invocations or configs.

// Config validation writes `!(x > 0.0)` instead of `x <= 0.0` so NaN is
// rejected too.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

mod cli;
mod config;
mod error;
mod plotdata;
mod runner;

use clap::Parser;
use std::process::ExitCode;

fn main() -> ExitCode {
    let args = cli::Cli::parse();
    match runner::execute(args) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
