//! K-user outer bounds on the sum wideband slope.
//!
//! For more than two users the genie arguments act on near-symmetric pairs:
//! two users whose mutual interference sits within a factor `1−ε` of the
//! interfered direct links. This module detects those pairs, evaluates the
//! equal-rate and equal-power outer bounds a pairing implies for one channel
//! instance, decides pairability of the even split via bipartite matching
//! with Hall-witness reporting, provides the asymptotic (moment-based) form
//! of the equal-power bound, and estimates how likely random channels are to
//! pair up as the user count grows.

use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::channel::ChannelInstance;
use crate::error::{Error, Result};
use crate::slope::{ebnomin_closed_form, interference_free_slope, ConstraintKind, SlopeResult};

/// Which users interfere with each other almost as strongly as they hear
/// themselves, at tolerance ε.
#[derive(Debug, Clone, PartialEq)]
pub struct PairGraph {
    pub k: usize,
    /// The tolerance the graph was built at, in `(0, 1)`.
    pub epsilon: f64,
    /// Unordered pairs `(i, j)`, `i < j`, where both cross ratios
    /// `g_ji/g_ii` and `g_ij/g_jj` lie in `[1−ε, 1)`.
    pub strong_pairs: Vec<(usize, usize)>,
    /// Pairs where at least one of the two ratios lies in `[1−ε, 1)`;
    /// always a superset of `strong_pairs`.
    pub weak_pairs: Vec<(usize, usize)>,
}

impl PairGraph {
    /// Flags users that belong to at least one strong pair.
    pub fn strongly_paired(&self) -> Vec<bool> {
        let mut paired = vec![false; self.k];
        for &(i, j) in &self.strong_pairs {
            paired[i] = true;
            paired[j] = true;
        }
        paired
    }

    pub fn has_weak(&self, i: usize, j: usize) -> bool {
        let key = (i.min(j), i.max(j));
        self.weak_pairs.binary_search(&key).is_ok()
    }

    /// Adjacency of weak pairs across the even index split: left class
    /// `{0..M−1}`, right class `{M..K−1}`, for `K = 2M`.
    pub fn weak_split_adjacency(&self) -> Result<Vec<Vec<bool>>> {
        if !self.k.is_multiple_of(2) {
            return Err(Error::InvalidInput(format!(
                "the index split needs an even user count, got {}",
                self.k
            )));
        }
        let m = self.k / 2;
        Ok((0..m)
            .map(|l| (0..m).map(|r| self.has_weak(l, m + r)).collect())
            .collect())
    }
}

/// Pair detection on a matrix of power gains `g[j][i] = |C_ji|²`.
pub fn detect_pairs_in_gains(gains: &[Vec<f64>], epsilon: f64) -> Result<PairGraph> {
    if !(epsilon > 0.0 && epsilon < 1.0) {
        return Err(Error::InvalidInput(format!(
            "pair tolerance must lie in (0, 1), got {epsilon}"
        )));
    }
    let k = gains.len();
    if k < 2 || gains.iter().any(|row| row.len() != k) {
        return Err(Error::InvalidInput(
            "pair detection needs a square gain matrix with at least two users".into(),
        ));
    }
    if (0..k).any(|j| !(gains[j][j] > 0.0)) {
        return Err(Error::InvalidInput(
            "direct power gains must be positive".into(),
        ));
    }
    let near_unit = |ratio: f64| ratio >= 1.0 - epsilon && ratio < 1.0;
    let mut strong = Vec::new();
    let mut weak = Vec::new();
    for i in 0..k {
        for j in (i + 1)..k {
            let into_j = near_unit(gains[j][i] / gains[i][i]);
            let into_i = near_unit(gains[i][j] / gains[j][j]);
            if into_j && into_i {
                strong.push((i, j));
            }
            if into_j || into_i {
                weak.push((i, j));
            }
        }
    }
    Ok(PairGraph {
        k,
        epsilon,
        strong_pairs: strong,
        weak_pairs: weak,
    })
}

/// Pair detection on a channel instance (ratios of `|C_ji|²`).
pub fn detect_pairs(chan: &ChannelInstance, epsilon: f64) -> Result<PairGraph> {
    let gains: Vec<Vec<f64>> = (0..chan.k)
        .map(|j| (0..chan.k).map(|i| chan.power_gain(j, i)).collect())
        .collect();
    detect_pairs_in_gains(&gains, epsilon)
}

/// Equal-rate outer bound for one channel instance: each strongly paired
/// user's minimum power picks up the paired curvature penalty
/// `(4−3ε)/(2−ε)` relative to an interference-free user, while unpaired
/// users contribute the interference-free term; the slope follows from the
/// aggregated power curve. With `θ` the unpaired share of `Σ 1/g_jj`, the
/// normalized slope is `(2−ε) / ((4−3ε)(1−θ) + (2−ε)θ)`.
pub fn equal_rate_outer_sample(chan: &ChannelInstance, epsilon: f64) -> Result<SlopeResult> {
    let graph = detect_pairs(chan, epsilon)?;
    let paired = graph.strongly_paired();
    let k = chan.k as f64;
    let total: f64 = (0..chan.k).map(|j| 1.0 / chan.power_gain(j, j)).sum();
    let paired_mass: f64 = (0..chan.k)
        .filter(|&j| paired[j])
        .map(|j| 1.0 / chan.power_gain(j, j))
        .sum();
    let pair_penalty = (4.0 - 3.0 * epsilon) / (2.0 - epsilon);
    let penalized = paired_mass * pair_penalty + (total - paired_mass);
    // Evaluated as 2K·(Σ1/g)/(penalized Σ1/g) so that a channel with no
    // detected pairs reproduces the interference-free slope bit for bit.
    let s0 = 2.0 * k * (total / penalized);
    Ok(
        SlopeResult::from_ebno_s0(ebnomin_closed_form(chan, ConstraintKind::EqualRate), s0)
            .with_baseline(interference_free_slope(chan, ConstraintKind::EqualRate)),
    )
}

/// Equal-power outer bound for one channel instance. Users split by index
/// into two halves; a perfect matching of weak pairs across the split must
/// exist (its absence is reported with the Hall witness). Each matched pair
/// `(a, b)` contributes the pair-genie curvature
/// `g_aa² + g_bb² + 2(1−ε)·g_aa·g_bb`, giving
/// `s0 ≤ 2(Σ g_jj)² / Σ_pairs(…)`.
pub fn equal_power_outer_sample(chan: &ChannelInstance, epsilon: f64) -> Result<SlopeResult> {
    if !chan.k.is_multiple_of(2) {
        return Err(Error::InvalidInput(format!(
            "the equal-power pairing bound needs an even user count, got {}",
            chan.k
        )));
    }
    let graph = detect_pairs(chan, epsilon)?;
    let adjacency = graph.weak_split_adjacency()?;
    let matching = hall_perfect_matching(&adjacency);
    let Some(pairs) = matching.matched else {
        let witness = matching.violating_set;
        let mut neighbors = vec![false; chan.k / 2];
        for &l in &witness {
            for (r, &edge) in adjacency[l].iter().enumerate() {
                if edge {
                    neighbors[r] = true;
                }
            }
        }
        return Err(Error::BoundUnavailable {
            violating_set: witness,
            neighborhood_size: neighbors.iter().filter(|&&x| x).count(),
        });
    };
    let m = chan.k / 2;
    let direct = chan.direct_power_gains();
    let gain_sum: f64 = direct.iter().sum();
    let curvature: f64 = pairs
        .iter()
        .map(|&(l, r)| {
            let (ga, gb) = (direct[l], direct[m + r]);
            ga * ga + gb * gb + 2.0 * (1.0 - epsilon) * ga * gb
        })
        .sum();
    let s0 = 2.0 * gain_sum * gain_sum / curvature;
    Ok(
        SlopeResult::from_ebno_s0(ebnomin_closed_form(chan, ConstraintKind::EqualPower), s0)
            .with_baseline(interference_free_slope(chan, ConstraintKind::EqualPower)),
    )
}

/// Outcome of a perfect-matching attempt on a balanced bipartite graph.
#[derive(Debug, Clone, PartialEq)]
pub struct MatchingResult {
    /// `(left, right)` index pairs covering both classes, when a perfect
    /// matching exists.
    pub matched: Option<Vec<(usize, usize)>>,
    /// When no perfect matching exists: a set `S` of left vertices with
    /// `|N(S)| < |S|`, certifying the failure. Empty otherwise.
    pub violating_set: Vec<usize>,
}

/// Maximum bipartite matching by augmenting paths; `adj[l][r]` connects
/// left vertex `l` to right vertex `r`. Either returns a perfect matching
/// or a Hall-violating left set built from the vertices reachable by
/// alternating paths out of an unmatched left vertex.
///
/// # Panics
/// When the adjacency matrix is not square (unequal vertex classes).
pub fn hall_perfect_matching(adj: &[Vec<bool>]) -> MatchingResult {
    let m = adj.len();
    for row in adj {
        assert_eq!(row.len(), m, "bipartite vertex classes must match in size");
    }

    fn augment(
        l: usize,
        adj: &[Vec<bool>],
        visited: &mut [bool],
        match_of_right: &mut [Option<usize>],
    ) -> bool {
        for r in 0..adj.len() {
            if adj[l][r] && !visited[r] {
                visited[r] = true;
                let free = match match_of_right[r] {
                    None => true,
                    Some(owner) => augment(owner, adj, visited, match_of_right),
                };
                if free {
                    match_of_right[r] = Some(l);
                    return true;
                }
            }
        }
        false
    }

    let mut match_of_right: Vec<Option<usize>> = vec![None; m];
    let mut stuck_left = None;
    for l in 0..m {
        if !augment(l, adj, &mut vec![false; m], &mut match_of_right) && stuck_left.is_none() {
            stuck_left = Some(l);
        }
    }

    match stuck_left {
        None => {
            let mut pairs: Vec<(usize, usize)> = match_of_right
                .iter()
                .enumerate()
                .map(|(r, owner)| (owner.expect("perfect matching fills every right"), r))
                .collect();
            pairs.sort_unstable();
            MatchingResult {
                matched: Some(pairs),
                violating_set: Vec::new(),
            }
        }
        Some(start) => {
            // Alternating BFS from the unmatched vertex: every right vertex
            // reached is matched (otherwise an augmenting path existed), so
            // the reached left set exceeds its neighborhood by one.
            let mut in_set = vec![false; m];
            let mut right_seen = vec![false; m];
            in_set[start] = true;
            let mut queue = vec![start];
            while let Some(l) = queue.pop() {
                for r in 0..m {
                    if adj[l][r] && !right_seen[r] {
                        right_seen[r] = true;
                        let owner = match_of_right[r]
                            .expect("reached right vertex must be matched");
                        if !in_set[owner] {
                            in_set[owner] = true;
                            queue.push(owner);
                        }
                    }
                }
            }
            MatchingResult {
                matched: None,
                violating_set: (0..m).filter(|&l| in_set[l]).collect(),
            }
        }
    }
}

/// Central moments of the direct-gain amplitude distribution: mean,
/// variance, skewness, and plain (non-excess) kurtosis `E[(X−μ)⁴]/σ⁴`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CentralMoments {
    pub mean: f64,
    pub variance: f64,
    pub skewness: f64,
    pub kurtosis: f64,
}

/// Second and fourth raw moments of the direct-gain amplitude, together
/// with the equivalent central description.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MomentSummary {
    /// `E[|C_jj|²]`.
    pub m2: f64,
    /// `E[|C_jj|⁴]`.
    pub m4: f64,
    pub central: CentralMoments,
}

impl MomentSummary {
    /// Builds the summary from the first four raw amplitude moments
    /// `m_k = E[|C_jj|^k]`.
    pub fn from_amplitude_raw_moments(m1: f64, m2: f64, m3: f64, m4: f64) -> Result<Self> {
        for (name, m) in [("m1", m1), ("m2", m2), ("m3", m3), ("m4", m4)] {
            if !m.is_finite() || m < 0.0 {
                return Err(Error::InvalidInput(format!(
                    "amplitude moment {name} must be finite and nonnegative, got {m}"
                )));
            }
        }
        if m4 < m2 * m2 {
            return Err(Error::InvalidInput(format!(
                "moments violate E[X⁴] ≥ E[X²]²: m4 = {m4}, m2² = {}",
                m2 * m2
            )));
        }
        let variance = m2 - m1 * m1;
        let third_central = m3 - 3.0 * m1 * m2 + 2.0 * m1 * m1 * m1;
        let fourth_central = m4 - 4.0 * m1 * m3 + 6.0 * m1 * m1 * m2 - 3.0 * m1 * m1 * m1 * m1;
        let sigma = variance.max(0.0).sqrt();
        let (skewness, kurtosis) = if sigma > 0.0 {
            (
                third_central / (sigma * sigma * sigma),
                fourth_central / (variance * variance),
            )
        } else {
            (0.0, 0.0)
        };
        Ok(Self {
            m2,
            m4,
            central: CentralMoments {
                mean: m1,
                variance,
                skewness,
                kurtosis,
            },
        })
    }

    /// Amplitude of a unit-mean exponential power gain: `|C|² ~ Exp(1)`,
    /// so `E[|C|^k] = Γ(1 + k/2)`.
    pub fn exponential_unit_mean_power() -> Self {
        let sqrt_pi = std::f64::consts::PI.sqrt();
        Self::from_amplitude_raw_moments(sqrt_pi / 2.0, 1.0, 0.75 * sqrt_pi, 2.0)
            .expect("exponential moments are consistent")
    }

    /// Deterministic unit amplitude (`|C_jj| = 1` for every user).
    pub fn constant_unit() -> Self {
        Self::from_amplitude_raw_moments(1.0, 1.0, 1.0, 1.0)
            .expect("constant moments are consistent")
    }
}

/// Large-K limit of the normalized equal-power outer bound over i.i.d.
/// direct gains: `ΔS0 ≤ 1 / (m2²/m4 + 1)`. Evaluates both the raw-moment
/// and the central-moment expression and insists they agree to within
/// 1e-12 relative, as they must algebraically.
pub fn asymptotic_equal_power_bound(moments: &MomentSummary) -> Result<f64> {
    if !(moments.m4 > 0.0) {
        return Err(Error::DegenerateCurvature(moments.m4));
    }
    let raw = 1.0 / (moments.m2 * moments.m2 / moments.m4 + 1.0);
    let c = &moments.central;
    let mu2 = c.mean * c.mean;
    let power_mean_sq = (mu2 + c.variance) * (mu2 + c.variance);
    let fourth = mu2 * mu2
        + 6.0 * mu2 * c.variance
        + 4.0 * c.skewness * c.mean * c.variance * c.variance.sqrt()
        + c.kurtosis * c.variance * c.variance;
    let central = 1.0 / (power_mean_sq / fourth + 1.0);
    if (raw - central).abs() > 1e-12 * raw.abs().max(1.0) {
        return Err(Error::InvalidInput(format!(
            "inconsistent moment summary: raw form gives {raw}, central form gives {central}"
        )));
    }
    Ok(raw)
}

/// Distribution the Monte Carlo trials draw i.i.d. power gains from.
#[derive(Debug, Clone, PartialEq)]
pub enum GainDist {
    /// Unit-mean exponential power gains.
    ExpUnitMean,
    /// Rayleigh-distributed power gains scaled to unit mean.
    RayleighUnitMean,
    /// All gains exactly 1 (degenerate; no ratio ever falls below 1).
    Const,
    /// A fixed K×K gain table reused on every trial.
    Fixed(Vec<Vec<f64>>),
}

impl FromStr for GainDist {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "exp" => Ok(Self::ExpUnitMean),
            "rayleigh" => Ok(Self::RayleighUnitMean),
            "const" => Ok(Self::Const),
            other => Err(Error::UnknownDistribution(other.to_string())),
        }
    }
}

impl GainDist {
    /// Draws a K×K power-gain matrix, row-major, one draw per entry.
    /// Inverse-transform sampling keeps the draw count per entry fixed, so
    /// trial streams stay aligned across distributions.
    fn sample_matrix(&self, k: usize, rng: &mut ChaCha8Rng) -> Result<Vec<Vec<f64>>> {
        match self {
            Self::Const => Ok(vec![vec![1.0; k]; k]),
            Self::Fixed(table) => {
                if table.len() != k || table.iter().any(|row| row.len() != k) {
                    return Err(Error::InvalidInput(format!(
                        "fixed gain table must be {k}×{k}"
                    )));
                }
                Ok(table.clone())
            }
            Self::ExpUnitMean | Self::RayleighUnitMean => {
                let rayleigh_scale = (2.0 / std::f64::consts::PI).sqrt();
                let mut gains = vec![vec![0.0; k]; k];
                for row in gains.iter_mut() {
                    for cell in row.iter_mut() {
                        let u: f64 = rng.gen();
                        *cell = match self {
                            Self::ExpUnitMean => -(1.0 - u).ln(),
                            _ => rayleigh_scale * (-2.0 * (1.0 - u).ln()).sqrt(),
                        };
                    }
                }
                Ok(gains)
            }
        }
    }
}

/// Estimated pairing probabilities with Wilson 95% confidence intervals.
#[derive(Debug, Clone, PartialEq)]
pub struct PairingEstimate {
    pub k: usize,
    pub epsilon: f64,
    pub trials: u64,
    /// Fraction of trials where every user strong-pairs with someone.
    pub p_pair: f64,
    pub p_pair_ci: (f64, f64),
    /// Fraction of trials where a perfect weak-pair matching exists across
    /// the even index split.
    pub p_matching: f64,
    pub p_matching_ci: (f64, f64),
}

/// Wilson score interval at 95% confidence.
pub fn wilson_interval(successes: u64, trials: u64) -> (f64, f64) {
    assert!(trials > 0, "interval needs at least one trial");
    let z = 1.96_f64;
    let n = trials as f64;
    let phat = successes as f64 / n;
    let denom = 1.0 + z * z / n;
    let center = (phat + z * z / (2.0 * n)) / denom;
    let half = z * (phat * (1.0 - phat) / n + z * z / (4.0 * n * n)).sqrt() / denom;
    (center - half, center + half)
}

/// One Monte Carlo trial: draws gains from `(seed, trial_index)` and
/// reports (every-user-strongly-paired, perfect-weak-matching-exists).
/// Trials are independent of evaluation order, so schedules can't change
/// results.
pub fn pairing_trial(
    dist: &GainDist,
    k: usize,
    epsilon: f64,
    seed: u64,
    trial_index: u64,
) -> Result<(bool, bool)> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(trial_index);
    let gains = dist.sample_matrix(k, &mut rng)?;
    let graph = detect_pairs_in_gains(&gains, epsilon)?;
    let all_strong = graph.strongly_paired().iter().all(|&p| p);
    let matched = hall_perfect_matching(&graph.weak_split_adjacency()?)
        .matched
        .is_some();
    Ok((all_strong, matched))
}

/// Estimates, over `trials` random channels, the probability that every
/// user strong-pairs with someone and the probability that the even split
/// admits a perfect weak-pair matching.
pub fn monte_carlo_pairing(
    dist: &GainDist,
    k: usize,
    epsilon: f64,
    trials: u64,
    seed: u64,
) -> Result<PairingEstimate> {
    if k < 2 || !k.is_multiple_of(2) {
        return Err(Error::InvalidInput(format!(
            "pairing trials need an even user count of at least 2, got {k}"
        )));
    }
    if trials == 0 {
        return Err(Error::InvalidInput("need at least one trial".into()));
    }
    let mut strong_hits = 0u64;
    let mut matching_hits = 0u64;
    for t in 0..trials {
        let (all_strong, matched) = pairing_trial(dist, k, epsilon, seed, t)?;
        strong_hits += u64::from(all_strong);
        matching_hits += u64::from(matched);
    }
    Ok(PairingEstimate {
        k,
        epsilon,
        trials,
        p_pair: strong_hits as f64 / trials as f64,
        p_pair_ci: wilson_interval(strong_hits, trials),
        p_matching: matching_hits as f64 / trials as f64,
        p_matching_ci: wilson_interval(matching_hits, trials),
    })
}
