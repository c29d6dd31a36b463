//! Wideband-slope analysis of line-of-sight interference channels.
//!
//! In the low-power regime a link's energy efficiency is captured by two
//! numbers: the minimum energy per bit `Eb/N0` at which reliable
//! communication is possible at all, and the wideband slope `S0` — how fast
//! spectral efficiency grows per 3 dB of extra energy near that minimum.
//! Interference between users cannot move the minimum energy per bit, but
//! it can destroy the slope. This crate quantifies how much of the slope
//! survives:
//!
//! - [`channel`] models the physical layer: complex link gains and
//!   propagation delays (optionally derived from node geometry), the
//!   decomposition of a delay into integer and fractional sample offsets at
//!   a given bandwidth, and the sinc-series covariance of the interference
//!   that leaks into a receiver's sampling instants.
//! - [`slope`] computes `Eb/N0|min` and `S0` from rate- or power-curve
//!   derivatives, estimates them numerically from sampled curves, and
//!   measures slopes along bandwidth subsequences.
//! - [`two_user`] evaluates the closed-form two-user inner bounds (treating
//!   interference as noise, time sharing, interference decoding) and genie
//!   outer bounds, with their exactness regions.
//! - [`alignment`] searches for integer bandwidths at which every cross
//!   link's delay lands near an odd sample offset, so that sending on every
//!   other sample makes most interference invisible, and sweeps the
//!   resulting rates over bandwidth.
//! - [`kuser`] extends the outer bounds to K users via near-symmetric pair
//!   detection, bipartite pair matching, moment-based asymptotics, and
//!   Monte Carlo pairing-probability trends.
//!
//! Everything is deterministic: random quantities derive from explicit
//! seeds, and equal inputs give bit-equal outputs.

// Input validation deliberately writes `!(x > 0.0)` instead of `x <= 0.0`:
// the negated form also rejects NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod alignment;
pub mod channel;
pub mod error;
pub mod kuser;
pub mod slope;
pub mod two_user;

pub use error::{Error, Result};
