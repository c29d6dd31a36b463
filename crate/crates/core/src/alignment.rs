//! Delay-based interference alignment.
//!
//! A transmitter that sends only on every other sample leaves its
//! interference concentrated in predictable sample positions at other
//! receivers whenever the cross-link propagation delays land near odd
//! sample offsets. This module searches for integer bandwidths that align
//! all cross links at once, evaluates the rates the sampling scheme then
//! achieves (including the residual leaked interference), and sweeps
//! bandwidth to expose the oscillating spectral-efficiency behavior and its
//! peak subsequence.

use crate::channel::{leaked_interference_power, sinc_leakage_covariance, ChannelInstance};
use crate::error::{Error, Result};
use crate::slope::to_db;

/// Controls for the integer bandwidth search.
#[derive(Debug, Clone, PartialEq)]
pub struct AlignmentConfig {
    /// Alignment tolerance on the residual `|τ·b − (2k+1)|`, in `(0, 1)`.
    pub delta: f64,
    /// First integer bandwidth to try (Hz), at least 1.
    pub b_start: u64,
    /// Search cap (Hz); defaults to `10⁷ · b_start` when unset. Delays
    /// stored as floating point are rational, so a qualifying bandwidth is
    /// only guaranteed approximately — the cap turns a would-be infinite
    /// loop into a reportable failure.
    pub b_max: Option<u64>,
    /// Truncation tolerance for the leakage series evaluated on candidates.
    pub leakage_tol: f64,
}

impl AlignmentConfig {
    pub fn new(delta: f64, b_start: u64) -> Result<Self> {
        let cfg = Self {
            delta,
            b_start,
            b_max: None,
            leakage_tol: 1e-6,
        };
        cfg.validate()?;
        Ok(cfg)
    }

    /// Replaces the search cap.
    pub fn with_cap(mut self, b_max: u64) -> Result<Self> {
        self.b_max = Some(b_max);
        self.validate()?;
        Ok(self)
    }

    /// Effective search cap.
    pub fn cap(&self) -> u64 {
        self.b_max
            .unwrap_or_else(|| self.b_start.saturating_mul(10_000_000))
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.delta > 0.0 && self.delta < 1.0) {
            return Err(Error::InvalidInput(format!(
                "alignment tolerance must lie in (0, 1), got {}",
                self.delta
            )));
        }
        if self.b_start < 1 {
            return Err(Error::InvalidInput(
                "search must start at bandwidth ≥ 1 Hz".into(),
            ));
        }
        if self.cap() < self.b_start {
            return Err(Error::InvalidInput(format!(
                "search cap {} is below the starting bandwidth {}",
                self.cap(),
                self.b_start
            )));
        }
        if !(self.leakage_tol > 0.0) {
            return Err(Error::InvalidInput(format!(
                "leakage series tolerance must be positive, got {}",
                self.leakage_tol
            )));
        }
        Ok(())
    }
}

/// An integer bandwidth at which every cross link sits within `delta` of an
/// odd sample offset.
#[derive(Debug, Clone, PartialEq)]
pub struct BandwidthCandidate {
    /// The aligned integer bandwidth in Hz.
    pub b: u64,
    /// Alignment integers `k_ji` (nearest integer to `(τ_ji·b − 1)/2`) for
    /// the off-diagonal entries; diagonal entries are zero and unused.
    pub k: Vec<Vec<i64>>,
    /// Largest off-diagonal residual `|τ_ji·b − 2k_ji − 1|`.
    pub residual_max: f64,
    /// Per-receiver leaked interference power ε_j(b) in watts. Searches
    /// given only a delay matrix evaluate this for unit cross gains and
    /// unit transmit powers; ε is linear in each, so callers can rescale.
    pub leakage: Vec<f64>,
}

/// Result of asking for several aligned bandwidths in a row: the candidates
/// found, plus a warning when the search cap cut the list short.
#[derive(Debug, Clone, PartialEq)]
pub struct PeakSequence {
    pub candidates: Vec<BandwidthCandidate>,
    pub warning: Option<String>,
}

/// One bandwidth sample of a spectral-efficiency sweep.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepPoint {
    /// Bandwidth in Hz (sweeps may sample non-integer bandwidths).
    pub b: f64,
    /// Transmitted energy per information bit over `N0`, in dB.
    pub ebno_db: f64,
    /// Sum spectral efficiency in bits/s/Hz.
    pub spectral_efficiency: f64,
    /// Total leaked interference power across receivers, in watts.
    pub leakage_total: f64,
}

fn validate_delay_matrix(delays: &[Vec<f64>]) -> Result<usize> {
    let k = delays.len();
    if k < 2 {
        return Err(Error::InvalidInput(
            "delay matrix needs at least two users".into(),
        ));
    }
    for (j, row) in delays.iter().enumerate() {
        if row.len() != k {
            return Err(Error::InvalidInput(format!(
                "delay matrix must be square: row {j} has {} entries, expected {k}",
                row.len()
            )));
        }
        for (i, &tau) in row.iter().enumerate() {
            if !tau.is_finite() {
                return Err(Error::InvalidInput(format!(
                    "delay ({j}, {i}) is not finite"
                )));
            }
            if i != j && !(tau > 0.0) {
                return Err(Error::InvalidInput(format!(
                    "off-diagonal delay ({j}, {i}) must be positive, got {tau}"
                )));
            }
        }
    }
    Ok(k)
}

/// Alignment integers and worst residual at bandwidth `b`. Receiver timing
/// is normalized to the desired signal, so diagonal entries never count.
fn residual_matrix(delays: &[Vec<f64>], b: f64) -> (Vec<Vec<i64>>, f64) {
    let k = delays.len();
    let mut ks = vec![vec![0i64; k]; k];
    let mut worst = 0.0f64;
    for j in 0..k {
        for i in 0..k {
            if i == j {
                continue;
            }
            let t = delays[j][i] * b;
            let kji = ((t - 1.0) / 2.0 + 0.5).floor();
            ks[j][i] = kji as i64;
            worst = worst.max((t - 2.0 * kji - 1.0).abs());
        }
    }
    (ks, worst)
}

/// Per-receiver leakage of a unit-gain, unit-power channel with the given
/// delays, sampled on the desired signal's even slots at bandwidth `b`.
fn unit_leakage(delays: &[Vec<f64>], b: f64, tol: f64) -> Result<Vec<f64>> {
    let k = delays.len();
    let mut eps = vec![0.0; k];
    for j in 0..k {
        for (i, &tau) in delays[j].iter().enumerate() {
            if i == j {
                continue;
            }
            let t = tau * b;
            let n = (t + 0.5).floor();
            let delta = t - n;
            eps[j] += sinc_leakage_covariance(n as i64, n as i64, delta, 1.0, tol)?;
        }
    }
    Ok(eps)
}

/// Smallest integer bandwidth in `[b_start, cap]` whose off-diagonal delays
/// all land within `delta` of an odd sample offset. On failure reports the
/// best bandwidth seen so the caller can judge how close the search came.
pub fn search_bandwidth(delays: &[Vec<f64>], cfg: &AlignmentConfig) -> Result<BandwidthCandidate> {
    cfg.validate()?;
    validate_delay_matrix(delays)?;
    let mut best = (f64::INFINITY, cfg.b_start);
    for b in cfg.b_start..=cfg.cap() {
        let (ks, worst) = residual_matrix(delays, b as f64);
        if worst <= cfg.delta {
            return Ok(BandwidthCandidate {
                b,
                k: ks,
                residual_max: worst,
                leakage: unit_leakage(delays, b as f64, cfg.leakage_tol)?,
            });
        }
        if worst < best.0 {
            best = (worst, b);
        }
    }
    Err(Error::SearchExhausted {
        b_max: cfg.cap(),
        best_residual: best.0,
        best_b: best.1,
        delta: cfg.delta,
    })
}

/// Per-user rates (bits/s/Hz) of the every-other-sample scheme at bandwidth
/// `b`, with the leaked interference treated as extra noise:
/// `R_j = ½·log2(1 + (|C_jj|²·2P_j/(b·N0)) / (1 + ε_j(b)/(b·N0)))`.
/// The factor 2 is the burst power of signaling on half the samples;
/// `leakage` must come from the same bandwidth.
pub fn achievable_rate_with_leakage(
    chan: &ChannelInstance,
    b: f64,
    leakage: &[f64],
) -> Result<Vec<f64>> {
    if !(b > 0.0) {
        return Err(Error::InvalidInput(format!(
            "bandwidth must be positive, got {b}"
        )));
    }
    if leakage.len() != chan.k {
        return Err(Error::InvalidInput(format!(
            "leakage vector has {} entries for a {}-user channel",
            leakage.len(),
            chan.k
        )));
    }
    let noise = b * chan.noise_density;
    leakage
        .iter()
        .enumerate()
        .map(|(j, &eps)| {
            if !(eps >= 0.0) {
                return Err(Error::InvalidInput(format!(
                    "leakage power for receiver {j} must be nonnegative, got {eps}"
                )));
            }
            let signal = chan.power_gain(j, j) * 2.0 * chan.powers[j] / noise;
            Ok(0.5 * (1.0 + signal / (1.0 + eps / noise)).log2())
        })
        .collect()
}

/// Sweeps the scheme over a bandwidth grid with the given per-user transmit
/// powers (overriding the channel's stored budgets). Each point carries the
/// sum spectral efficiency, the transmitted energy per information bit, and
/// the total leaked power — the raw material of the oscillation plots.
pub fn sweep_bandwidth(
    chan: &ChannelInstance,
    b_grid: &[f64],
    powers: &[f64],
    leakage_tol: f64,
) -> Result<Vec<SweepPoint>> {
    if b_grid.is_empty() {
        return Err(Error::InvalidInput("bandwidth grid is empty".into()));
    }
    if !(b_grid[0] > 0.0) || b_grid.windows(2).any(|w| !(w[1] > w[0])) {
        return Err(Error::InvalidInput(
            "bandwidth grid must be positive and strictly ascending".into(),
        ));
    }
    if powers.len() != chan.k {
        return Err(Error::InvalidInput(format!(
            "got {} powers for a {}-user channel",
            powers.len(),
            chan.k
        )));
    }
    if powers.iter().any(|&p| !(p >= 0.0)) || powers.iter().all(|&p| p == 0.0) {
        return Err(Error::InvalidInput(
            "powers must be nonnegative with at least one user transmitting".into(),
        ));
    }
    let mut chan = chan.clone();
    chan.powers = powers.to_vec();
    b_grid
        .iter()
        .map(|&b| {
            let eps = leaked_interference_power(&chan, b, leakage_tol)?;
            let rates = achievable_rate_with_leakage(&chan, b, &eps)?;
            let noise = b * chan.noise_density;
            let snr_total: f64 = powers.iter().map(|&p| p / noise).sum();
            let rate_total: f64 = rates.iter().sum();
            Ok(SweepPoint {
                b,
                ebno_db: to_db(snr_total / rate_total),
                spectral_efficiency: rate_total,
                leakage_total: eps.iter().sum(),
            })
        })
        .collect()
}

/// The first `count` aligned bandwidths at or above `cfg.b_start`, restarting
/// the search just past each hit. Candidates carry the channel's own leakage
/// (gains and powers included). Hitting the cap early yields the partial
/// list plus a warning instead of an error.
pub fn peak_sequence(
    chan: &ChannelInstance,
    cfg: &AlignmentConfig,
    count: usize,
) -> Result<PeakSequence> {
    cfg.validate()?;
    if count < 2 {
        return Err(Error::InvalidInput(format!(
            "a peak sequence needs at least 2 candidates, got {count}"
        )));
    }
    validate_delay_matrix(&chan.delays)?;
    let mut candidates = Vec::with_capacity(count);
    let mut best = (f64::INFINITY, cfg.b_start);
    for b in cfg.b_start..=cfg.cap() {
        let (ks, worst) = residual_matrix(&chan.delays, b as f64);
        if worst <= cfg.delta {
            candidates.push(BandwidthCandidate {
                b,
                k: ks,
                residual_max: worst,
                leakage: leaked_interference_power(chan, b as f64, cfg.leakage_tol)?,
            });
            if candidates.len() == count {
                return Ok(PeakSequence {
                    candidates,
                    warning: None,
                });
            }
        } else if worst < best.0 {
            best = (worst, b);
        }
    }
    Ok(PeakSequence {
        warning: Some(format!(
            "search cap {} reached with {} of {count} candidates; best remaining residual {:.6} at b = {}",
            cfg.cap(),
            candidates.len(),
            best.0,
            best.1
        )),
        candidates,
    })
}
