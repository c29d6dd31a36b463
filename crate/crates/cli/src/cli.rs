use std::path::PathBuf;

use clap::{Parser, Subcommand, ValueEnum};
use wbslope_core::slope::ConstraintKind;

#[derive(Debug, Parser)]
#[command(
    name = "wbslope",
    version,
    about = "Wideband-slope experiments on line-of-sight interference channels"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

/// Power-constraint flag shared by several subcommands.
#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ConstraintArg {
    EqualPower,
    EqualRate,
}

impl From<ConstraintArg> for ConstraintKind {
    fn from(value: ConstraintArg) -> Self {
        match value {
            ConstraintArg::EqualPower => ConstraintKind::EqualPower,
            ConstraintArg::EqualRate => ConstraintKind::EqualRate,
        }
    }
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Run one experiment described by a TOML config file; writes the CSV,
    /// any plot-data recipe, and a digest manifest next to it.
    Run {
        /// Path to the experiment config.
        config: PathBuf,
    },

    /// Inner and outer sum-slope bounds over a grid of symmetric cross
    /// gains.
    TwoUserSweep {
        /// Smallest cross gain on the grid.
        #[arg(long, default_value_t = 0.05)]
        a_min: f64,
        /// Largest cross gain on the grid.
        #[arg(long, default_value_t = 2.0)]
        a_max: f64,
        /// Number of grid points (endpoints included).
        #[arg(long, default_value_t = 40)]
        steps: usize,
        /// Which power constraint the outer bound assumes.
        #[arg(long, value_enum, default_value_t = ConstraintArg::EqualPower)]
        constraint: ConstraintArg,
        /// Output CSV path; stdout when omitted.
        #[arg(long)]
        output: Option<PathBuf>,
    },

    /// Smallest integer bandwidth aligning every cross delay to an odd
    /// sample offset within the tolerance.
    AlignSearch {
        /// TOML file holding the K×K delay matrix (`delays = [[…], …]`).
        #[arg(long)]
        delays: PathBuf,
        /// Alignment tolerance on |τ·b − (2k+1)|, in (0, 1).
        #[arg(long)]
        delta: f64,
        /// First bandwidth to try.
        #[arg(long, default_value_t = 1)]
        b_start: u64,
        /// Search cap; defaults to 10⁷·b_start.
        #[arg(long)]
        b_max: Option<u64>,
        /// Truncation tolerance for the leakage series.
        #[arg(long, default_value_t = 1e-6)]
        leakage_tol: f64,
        /// Output CSV path; stdout when omitted.
        #[arg(long)]
        output: Option<PathBuf>,
    },

    /// Spectral efficiency and Eb/N0 over a bandwidth grid for a channel
    /// file.
    AlignSweep {
        /// Channel instance file (TOML).
        #[arg(long)]
        channel: PathBuf,
        /// Low end of the bandwidth grid.
        #[arg(long)]
        b_min: f64,
        /// High end of the bandwidth grid.
        #[arg(long)]
        b_max: f64,
        /// Number of grid points (endpoints included).
        #[arg(long)]
        steps: usize,
        /// Truncation tolerance for the leakage series.
        #[arg(long, default_value_t = 1e-6)]
        leakage_tol: f64,
        /// Output CSV path; stdout when omitted.
        #[arg(long)]
        output: Option<PathBuf>,
    },

    /// A sequence of aligned bandwidths for a channel file, with the
    /// operating point at each and the measured slope along the sequence.
    AlignPeaks {
        /// Channel instance file (TOML).
        #[arg(long)]
        channel: PathBuf,
        /// Alignment tolerance on |τ·b − (2k+1)|, in (0, 1).
        #[arg(long)]
        delta: f64,
        /// First bandwidth to try.
        #[arg(long, default_value_t = 1)]
        b_start: u64,
        /// How many aligned bandwidths to collect (at least 2).
        #[arg(long)]
        count: usize,
        /// Search cap; defaults to 10⁷·b_start.
        #[arg(long)]
        b_max: Option<u64>,
        /// Truncation tolerance for the leakage series.
        #[arg(long, default_value_t = 1e-6)]
        leakage_tol: f64,
        /// Which power constraint the interference-free reference assumes.
        #[arg(long, value_enum, default_value_t = ConstraintArg::EqualPower)]
        constraint: ConstraintArg,
        /// Output CSV path; stdout when omitted.
        #[arg(long)]
        output: Option<PathBuf>,
    },

    /// Pairing-based outer bound on the sum slope of a channel file.
    KuserOuter {
        /// Channel instance file (TOML).
        #[arg(long)]
        channel: PathBuf,
        /// Pair-detection tolerance ε in (0, 1).
        #[arg(long)]
        epsilon: f64,
        /// Which power constraint the bound assumes.
        #[arg(long, value_enum, default_value_t = ConstraintArg::EqualPower)]
        constraint: ConstraintArg,
        /// Output CSV path; stdout when omitted.
        #[arg(long)]
        output: Option<PathBuf>,
    },

    /// Monte Carlo estimates of how likely random channels pair up, over a
    /// list of user counts.
    PairingMc {
        /// Direct-gain distribution: exp, rayleigh, or const.
        #[arg(long)]
        dist: String,
        /// Comma-separated even user counts, e.g. 10,50,200.
        #[arg(long, value_delimiter = ',')]
        k_list: Vec<usize>,
        /// Pair-detection tolerance ε in (0, 1).
        #[arg(long)]
        epsilon: f64,
        /// Random channel draws per user count.
        #[arg(long)]
        trials: u64,
        /// RNG seed; equal seeds give byte-identical output.
        #[arg(long)]
        seed: u64,
        /// Output CSV path; stdout when omitted.
        #[arg(long)]
        output: Option<PathBuf>,
    },
}
