//! Two-user sum-slope bounds.
//!
//! Closed-form inner and outer bounds on the sum wideband slope of the
//! two-user interference channel, parameterized by the four link power
//! gains. Inner bounds come from three transmission schemes — treating
//! interference as noise, orthogonal time sharing, and decoding the
//! interference before the desired message — each expanded symbolically to
//! second order at zero snr. Outer bounds come from the Z-channel genie
//! argument under both power constraints, plus the exact low-snr optimality
//! region where treating interference as noise is unbeatable. Everything
//! here depends on gains only; propagation delays never enter.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::slope::{ConstraintKind, LN_2};

/// Relative tolerance for detecting first-order ties between rate
/// constraints in the interference-decoding expansion.
const TIE_TOL: f64 = 1e-12;

/// Link power gains of a two-user channel: `g_ji = |C_ji|²` from
/// transmitter `i` to receiver `j`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TwoUserGains {
    pub g11: f64,
    pub g12: f64,
    pub g21: f64,
    pub g22: f64,
}

impl TwoUserGains {
    /// Validates and builds: direct gains positive, cross gains nonnegative.
    pub fn new(g11: f64, g12: f64, g21: f64, g22: f64) -> Result<Self> {
        if !(g11 > 0.0) || !(g22 > 0.0) {
            return Err(Error::InvalidInput(
                "direct power gains must be positive".into(),
            ));
        }
        if !(g12 >= 0.0) || !(g21 >= 0.0) {
            return Err(Error::InvalidInput(
                "cross power gains must be nonnegative".into(),
            ));
        }
        Ok(Self { g11, g12, g21, g22 })
    }

    /// Canonical symmetric channel: unit direct gains, both cross gains `a`.
    pub fn symmetric(a: f64) -> Result<Self> {
        Self::new(1.0, a, a, 1.0)
    }
}

/// Scheme or bound a record refers to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Scheme {
    Tin,
    Tdma,
    InterferenceDecoding,
    KramerEqualPower,
    KramerEqualRate,
    NoisyExact,
}

impl std::fmt::Display for Scheme {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let name = match self {
            Scheme::Tin => "tin",
            Scheme::Tdma => "tdma",
            Scheme::InterferenceDecoding => "interference-decoding",
            Scheme::KramerEqualPower => "kramer-equal-power",
            Scheme::KramerEqualRate => "kramer-equal-rate",
            Scheme::NoisyExact => "noisy-exact",
        };
        write!(f, "{name}")
    }
}

/// One evaluated bound: which scheme, whether its applicability condition
/// holds, and the sum slope when it does.
#[derive(Debug, Clone, PartialEq)]
pub struct BoundRecord {
    pub scheme: Scheme,
    /// Sum slope; absent exactly when `valid` is false.
    pub s0: Option<f64>,
    pub valid: bool,
    /// Human-readable statement of the applicability condition and how the
    /// instance met or failed it.
    pub condition_detail: String,
}

impl BoundRecord {
    fn invalid(scheme: Scheme, detail: String) -> Self {
        Self {
            scheme,
            s0: None,
            valid: false,
            condition_detail: detail,
        }
    }

    fn valid(scheme: Scheme, s0: f64, detail: String) -> Self {
        Self {
            scheme,
            s0: Some(s0),
            valid: true,
            condition_detail: detail,
        }
    }
}

/// Sum slope of treating interference as noise.
fn tin_slope(g: &TwoUserGains, kind: ConstraintKind) -> f64 {
    let direct = g.g11 + g.g22;
    match kind {
        // R(snr) = Σ_j ln(1 + g_jj·snr/(1 + g_jī·snr)) to second order.
        ConstraintKind::EqualPower => {
            2.0 * direct * direct
                / (g.g11 * g.g11 + g.g22 * g.g22 + 2.0 * (g.g11 * g.g12 + g.g22 * g.g21))
        }
        // Minimum total power at equal per-user rate, expanded to second
        // order in the sum rate.
        ConstraintKind::EqualRate => 4.0 * direct / (direct + 2.0 * (g.g12 + g.g21)),
    }
}

/// Sum slope of orthogonal time sharing (each user bursts at double power
/// in its own half of the time).
fn tdma_slope(g: &TwoUserGains, kind: ConstraintKind) -> f64 {
    match kind {
        ConstraintKind::EqualPower => {
            let direct = g.g11 + g.g22;
            direct * direct / (g.g11 * g.g11 + g.g22 * g.g22)
        }
        ConstraintKind::EqualRate => 2.0,
    }
}

/// Sum slope of decoding the interference first, valid when each cross link
/// is at least as strong as the interferer's own direct link
/// (`g21 ≥ g11` and `g12 ≥ g22`). Returns `None` outside that region.
///
/// Every rate constraint of the scheme — per-message decodability at both
/// receivers and the joint-decoding sum constraint at each receiver — is a
/// smooth curve in snr; the achieved sum rate is their pointwise minimum, so
/// the slope follows from the worst second-order coefficient among the
/// constraints whose first-order coefficients tie.
fn id_slope(g: &TwoUserGains, kind: ConstraintKind) -> Option<f64> {
    if !(g.g21 >= g.g11 && g.g12 >= g.g22) {
        return None;
    }
    let mac1 = g.g11 + g.g12;
    let mac2 = g.g21 + g.g22;
    match kind {
        ConstraintKind::EqualPower => {
            let r1 = g.g11 + g.g22;
            // Interference-free branch curvature, then any receiver whose
            // joint-decoding constraint ties at first order.
            let mut curvature = g.g11 * g.g11 + g.g22 * g.g22;
            for mac in [mac1, mac2] {
                if mac <= r1 * (1.0 + TIE_TOL) {
                    curvature = curvature.max(mac * mac);
                }
            }
            Some(2.0 * r1 * r1 / curvature)
        }
        ConstraintKind::EqualRate => {
            let kappa = 1.0 / g.g11 + 1.0 / g.g22;
            // h_j is the first-order power cost ratio of receiver j's joint
            // constraint against the direct-link minimum (own-link term
            // normalized to 1); ties force extra power that grows
            // quadratically in rate, priced by a tiny LP.
            let h1 = 1.0 + g.g12 / g.g22;
            let h2 = g.g21 / g.g11 + 1.0;
            let tied: Vec<(f64, f64)> = [(h1, (g.g11, g.g12)), (h2, (g.g21, g.g22))]
                .into_iter()
                .filter(|&(h, _)| h <= 2.0 * (1.0 + TIE_TOL))
                .map(|(_, coeffs)| coeffs)
                .collect();
            let lambda = min_cost_cover(&tied);
            Some(4.0 * kappa / (kappa + 2.0 * lambda))
        }
    }
}

/// Minimum of `e1 + e2` over `e ≥ 0` with `a·e1 + b·e2 ≥ 1` for every row
/// `(a, b)`; zero when there are no rows.
fn min_cost_cover(rows: &[(f64, f64)]) -> f64 {
    match rows {
        [] => 0.0,
        [(a, b)] => 1.0 / a.max(*b),
        [(a1, b1), (a2, b2)] => {
            let mut best = (1.0 / a1.min(*a2)).min(1.0 / b1.min(*b2));
            let det = a1 * b2 - a2 * b1;
            if det != 0.0 {
                let e1 = (b2 - b1) / det;
                let e2 = (a1 - a2) / det;
                if e1 >= 0.0 && e2 >= 0.0 {
                    best = best.min(e1 + e2);
                }
            }
            best
        }
        _ => unreachable!("two receivers yield at most two rows"),
    }
}

/// Best achievable sum slope over the three schemes under the given
/// constraint. The winning scheme is reported; on value ties the
/// interference-decoding label wins (it is the scheme that stays exact into
/// the strong-interference region).
pub fn inner_bound_slope(g: &TwoUserGains, kind: ConstraintKind) -> BoundRecord {
    let mut candidates: Vec<(Scheme, f64)> = Vec::new();
    if let Some(s0) = id_slope(g, kind) {
        candidates.push((Scheme::InterferenceDecoding, s0));
    }
    candidates.push((Scheme::Tdma, tdma_slope(g, kind)));
    candidates.push((Scheme::Tin, tin_slope(g, kind)));
    let (scheme, s0) = candidates
        .iter()
        .copied()
        .fold(candidates[0], |best, cand| {
            if cand.1 > best.1 {
                cand
            } else {
                best
            }
        });
    BoundRecord::valid(
        scheme,
        s0,
        format!("best of {} candidate schemes under {kind}", candidates.len()),
    )
}

/// Z-channel genie outer bound on the sum slope under equal power. Each
/// orientation applies when its cross link is weaker than the interfered
/// direct link; when both apply the tighter value is taken.
pub fn kramer_outer_equal_power(g: &TwoUserGains) -> BoundRecord {
    let direct = g.g11 + g.g22;
    let numerator = 2.0 * direct * direct;
    let mut best: Option<f64> = None;
    if g.g21 < g.g11 {
        let v = numerator / (2.0 * g.g21 * g.g22 + g.g11 * g.g11 + g.g22 * g.g22);
        best = Some(v);
    }
    if g.g12 < g.g22 {
        let v = numerator / (2.0 * g.g12 * g.g11 + g.g11 * g.g11 + g.g22 * g.g22);
        best = Some(best.map_or(v, |b| b.min(v)));
    }
    match best {
        Some(s0) => BoundRecord::valid(
            Scheme::KramerEqualPower,
            s0,
            "at least one cross link weaker than the direct link it interferes with".into(),
        ),
        None => BoundRecord::invalid(
            Scheme::KramerEqualPower,
            format!(
                "needs g21 < g11 or g12 < g22; got g21 = {}, g11 = {}, g12 = {}, g22 = {}",
                g.g21, g.g11, g.g12, g.g22
            ),
        ),
    }
}

/// Whether the equal-rate genie bound applies: both cross links weak, and
/// the two genie constraints jointly binding at the minimizing power
/// allocation (dual feasibility of the two-constraint vertex), which
/// requires `g12 ≤ g11` and `g21 ≤ g22`. Outside that region the minimizing
/// allocation silences one user and the closed form stops being the true
/// minimum, so no bound is emitted.
fn equal_rate_bound_applies(g: &TwoUserGains) -> std::result::Result<(), String> {
    if !(g.g21 < g.g11 && g.g12 < g.g22) {
        return Err(format!(
            "needs both cross links weak (g21 < g11 and g12 < g22); got g21 = {}, g11 = {}, g12 = {}, g22 = {}",
            g.g21, g.g11, g.g12, g.g22
        ));
    }
    if !(g.g12 <= g.g11 && g.g21 <= g.g22) {
        return Err(format!(
            "power-minimizing allocation would silence one user (needs g12 ≤ g11 and g21 ≤ g22); got g12 = {}, g11 = {}, g21 = {}, g22 = {}",
            g.g12, g.g11, g.g21, g.g22
        ));
    }
    Ok(())
}

/// Z-channel genie outer bound on the sum slope under equal rate.
pub fn kramer_outer_equal_rate(g: &TwoUserGains) -> BoundRecord {
    if let Err(detail) = equal_rate_bound_applies(g) {
        return BoundRecord::invalid(Scheme::KramerEqualRate, detail);
    }
    let q1 = g.g21 / g.g11;
    let q2 = g.g12 / g.g22;
    let beta = q1 * q2;
    let direct = g.g11 + g.g22;
    let s0 = 4.0 * direct * (1.0 - beta)
        / (direct + g.g21 * (2.0 - 3.0 * q2) + g.g12 * (2.0 - 3.0 * q1));
    BoundRecord::valid(
        Scheme::KramerEqualRate,
        s0,
        "both cross links weak and vertex allocation optimal".into(),
    )
}

/// Minimum-power operating point `(snr1, snr2)` that meets the equal-rate
/// genie constraints at sum rate `rs` bits/s/Hz — the power curve whose
/// second-order expansion yields [`kramer_outer_equal_rate`].
pub fn equal_rate_lp_optimum(g: &TwoUserGains, rs: f64) -> Result<(f64, f64)> {
    if let Err(detail) = equal_rate_bound_applies(g) {
        return Err(Error::InvalidInput(detail));
    }
    if !(rs >= 0.0) {
        return Err(Error::InvalidInput(format!(
            "sum rate must be nonnegative, got {rs}"
        )));
    }
    let w = (rs / 2.0 * LN_2).exp_m1();
    let q1 = g.g21 / g.g11;
    let q2 = g.g12 / g.g22;
    let beta = q1 * q2;
    let snr1 = w * ((w + 1.0) * q2 * (1.0 - q1) + (1.0 - q2)) / (g.g11 * (1.0 - beta));
    let snr2 = w * ((w + 1.0) * q1 * (1.0 - q2) + (1.0 - q1)) / (g.g22 * (1.0 - beta));
    Ok((snr1, snr2))
}

/// Noisy-interference test: when
/// `√(g12/g22)·(1+g21·snr1) + √(g21/g11)·(1+g12·snr2) ≤ 1`, treating
/// interference as noise achieves the exact sum slope under equal power, and
/// the record carries that value. At `snr → 0` the condition reduces to
/// `√(g12/g22) + √(g21/g11) ≤ 1` (cross gain ≤ 1/4 of direct in the
/// symmetric channel).
pub fn noisy_interference(g: &TwoUserGains, snr1: f64, snr2: f64) -> BoundRecord {
    if snr1 < 0.0 || snr2 < 0.0 {
        return BoundRecord::invalid(Scheme::NoisyExact, "snr values must be nonnegative".into());
    }
    let lhs = (g.g12 / g.g22).sqrt() * (1.0 + g.g21 * snr1)
        + (g.g21 / g.g11).sqrt() * (1.0 + g.g12 * snr2);
    if lhs <= 1.0 {
        BoundRecord::valid(
            Scheme::NoisyExact,
            tin_slope(g, ConstraintKind::EqualPower),
            format!("noisy-interference condition holds ({lhs:.6} ≤ 1); slope is exact"),
        )
    } else {
        BoundRecord::invalid(
            Scheme::NoisyExact,
            format!("noisy-interference condition fails ({lhs:.6} > 1)"),
        )
    }
}

/// One grid point of the symmetric-channel sum-slope sweep.
#[derive(Debug, Clone, PartialEq)]
pub struct Fig2Row {
    /// Cross power gain of the canonical symmetric channel.
    pub a: f64,
    pub inner_s0: f64,
    pub inner_scheme: Scheme,
    pub outer_s0: f64,
    /// True where inner and outer meet: the noisy-interference region
    /// `a ≤ 1/4` and the strong-interference region `a ≥ 1`.
    pub exact: bool,
}

/// Sum-slope inner/outer sweep over symmetric cross gains under equal
/// power. The outer column is the genie bound `4/(1+a)` below `a = 1` and
/// the strong-interference value above (`4` strictly above, `2` exactly at
/// the boundary, where joint decoding's sum constraint ties).
pub fn fig2_sweep(a_grid: &[f64]) -> Result<Vec<Fig2Row>> {
    let mut rows = Vec::with_capacity(a_grid.len());
    for &a in a_grid {
        if !(a > 0.0) {
            return Err(Error::InvalidInput(format!(
                "cross gains in the sweep must be positive, got {a}"
            )));
        }
        let g = TwoUserGains::symmetric(a)?;
        let inner = inner_bound_slope(&g, ConstraintKind::EqualPower);
        let outer_s0 = if a < 1.0 {
            kramer_outer_equal_power(&g)
                .s0
                .expect("both orientations weak below a = 1")
        } else if a == 1.0 {
            2.0
        } else {
            4.0
        };
        rows.push(Fig2Row {
            a,
            inner_s0: inner.s0.expect("inner bound always valid"),
            inner_scheme: inner.scheme,
            outer_s0,
            exact: a <= 0.25 || a >= 1.0,
        });
    }
    Ok(rows)
}

/// Implied minimum energy per bit of the equal-rate genie bound, from the
/// first-order growth of its minimum power curve. Used to confirm emitted
/// bounds keep the interference-free minimum.
pub fn equal_rate_genie_implied_ebnomin(g: &TwoUserGains) -> Result<f64> {
    let rs = 1e-6;
    let (a1, a2) = equal_rate_lp_optimum(g, rs)?;
    let (b1, b2) = equal_rate_lp_optimum(g, 2.0 * rs)?;
    // Second-order Richardson step: snr'(0) ≈ (2σ(rs) − σ(2rs)/... ) — the
    // plain forward difference at rs and 2rs extrapolated linearly.
    let d_rs = (a1 + a2) / rs;
    let d_2rs = (b1 + b2) / (2.0 * rs);
    Ok(2.0 * d_rs - d_2rs)
}
