//! Error type shared across the library.

use thiserror::Error;

/// Errors produced by channel construction, slope estimation, bandwidth
/// search, and bound evaluation.
#[derive(Debug, Clone, Error)]
pub enum Error {
    /// An input violated a documented precondition.
    #[error("invalid input: {0}")]
    InvalidInput(String),

    /// A series tolerance was zero or negative.
    #[error("series tolerance must be positive, got {0}")]
    NonPositiveTolerance(f64),

    /// A rate curve had nonnegative curvature at the origin, so no finite
    /// slope exists.
    #[error("degenerate curvature: second derivative at snr = 0 is {0}, expected negative")]
    DegenerateCurvature(f64),

    /// Too few samples near snr = 0 to estimate derivatives.
    #[error("rate curve too sparse near zero: need {needed} samples below snr = {below}, found {found}")]
    InsufficientResolution {
        needed: usize,
        below: f64,
        found: usize,
    },

    /// The integer bandwidth search hit its cap without a qualifying
    /// bandwidth. Carries the best residual seen so callers can report how
    /// close the search came.
    #[error(
        "bandwidth search exhausted at b = {b_max}: best residual {best_residual} at b = {best_b} (tolerance {delta})"
    )]
    SearchExhausted {
        b_max: u64,
        best_residual: f64,
        best_b: u64,
        delta: f64,
    },

    /// No perfect matching exists; carries a Hall-violating vertex set whose
    /// neighborhood is strictly smaller than itself.
    #[error(
        "bound unavailable: no perfect matching; set {violating_set:?} has only {neighborhood_size} neighbors"
    )]
    BoundUnavailable {
        violating_set: Vec<usize>,
        neighborhood_size: usize,
    },

    /// A gain-distribution name was not recognized.
    #[error("unknown gain distribution: {0}")]
    UnknownDistribution(String),

    /// Reading or writing a channel file failed.
    #[error("channel file: {0}")]
    ChannelFile(String),
}

pub type Result<T> = std::result::Result<T, Error>;
