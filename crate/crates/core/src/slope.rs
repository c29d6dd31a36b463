//! Minimum energy per bit and wideband slope.
//!
//! The two numbers that characterize a rate curve `R(snr)` at low snr are
//! the minimum energy per bit `Eb/N0|min` and the slope `S0` of spectral
//! efficiency versus `Eb/N0` in dB at that minimum. Both come from the first
//! two derivatives of the curve at `snr = 0` — either of the rate as a
//! function of power, or of the inverse (power as a function of rate). This
//! module provides the closed-form conversions, a numeric estimator for
//! sampled curves, and the interference-free baselines used to normalize
//! slopes into `ΔS0 = S0 / S0_no_interference`.

use serde::{Deserialize, Serialize};

use crate::channel::ChannelInstance;
use crate::error::{Error, Result};

/// Natural log of 2; rates are handled internally in nats and converted at
/// the boundary.
pub const LN_2: f64 = std::f64::consts::LN_2;

/// Which power constraint a result was computed under.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ConstraintKind {
    /// All users transmit the same power.
    EqualPower,
    /// All users transmit the same rate.
    EqualRate,
}

impl std::fmt::Display for ConstraintKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            ConstraintKind::EqualPower => write!(f, "equal-power"),
            ConstraintKind::EqualRate => write!(f, "equal-rate"),
        }
    }
}

/// Converts a linear power ratio to decibels.
pub fn to_db(x: f64) -> f64 {
    10.0 * x.log10()
}

/// Minimum energy per bit and wideband slope of one rate curve.
#[derive(Debug, Clone, PartialEq)]
pub struct SlopeResult {
    /// `Eb/N0` at zero spectral efficiency, linear scale.
    pub ebno_min_linear: f64,
    /// Same minimum in dB.
    pub ebno_min_db: f64,
    /// Wideband slope in bits/s/Hz per 3 dB.
    pub s0: f64,
    /// Slope normalized by the interference-free slope of the same channel,
    /// when a baseline applies.
    pub delta_s0: Option<f64>,
    /// Estimated numerical error on `s0` for numerically estimated curves.
    pub error_estimate: Option<f64>,
}

impl SlopeResult {
    pub(crate) fn from_ebno_s0(ebno_min_linear: f64, s0: f64) -> Self {
        Self {
            ebno_min_linear,
            ebno_min_db: to_db(ebno_min_linear),
            s0,
            delta_s0: None,
            error_estimate: None,
        }
    }

    /// Attaches the interference-free baseline, setting
    /// `delta_s0 = s0 / baseline_s0`.
    pub fn with_baseline(mut self, baseline_s0: f64) -> Self {
        self.delta_s0 = Some(self.s0 / baseline_s0);
        self
    }
}

/// Slope and minimum energy per bit from the rate-curve derivatives at zero
/// snr, with the rate measured in nats: `Eb/N0|min = ln 2 / Ṙ(0)` and
/// `S0 = −2·Ṙ(0)² / R̈(0)`.
pub fn slope_from_rate_derivatives(rdot0: f64, rddot0: f64) -> Result<SlopeResult> {
    if !(rdot0 > 0.0) {
        return Err(Error::InvalidInput(format!(
            "first derivative at snr = 0 must be positive, got {rdot0}"
        )));
    }
    if !(rddot0 < 0.0) {
        return Err(Error::DegenerateCurvature(rddot0));
    }
    Ok(SlopeResult::from_ebno_s0(
        LN_2 / rdot0,
        -2.0 * rdot0 * rdot0 / rddot0,
    ))
}

/// Slope and minimum energy per bit from the inverse curve `snr(R)` (total
/// power as a function of rate in bits): `Eb/N0|min = snr'(0)` and
/// `S0 = 2·snr'(0)/snr''(0)·ln 2`.
pub fn slope_from_power_derivatives(dsnr_dr0: f64, d2snr_dr2_0: f64) -> Result<SlopeResult> {
    if !(dsnr_dr0 > 0.0) {
        return Err(Error::InvalidInput(format!(
            "dsnr/dR at R = 0 must be positive, got {dsnr_dr0}"
        )));
    }
    if !(d2snr_dr2_0 > 0.0) {
        return Err(Error::DegenerateCurvature(d2snr_dr2_0));
    }
    Ok(SlopeResult::from_ebno_s0(
        dsnr_dr0,
        2.0 * dsnr_dr0 / d2snr_dr2_0 * LN_2,
    ))
}

/// A sampled rate curve: `(snr, rate)` pairs with rate in bits/s/Hz,
/// strictly increasing in snr, all snr positive.
#[derive(Debug, Clone)]
pub struct RateCurve {
    samples: Vec<(f64, f64)>,
}

impl RateCurve {
    /// Validates ordering and monotonicity and builds the curve.
    pub fn new(samples: Vec<(f64, f64)>) -> Result<Self> {
        if samples.is_empty() || samples[0].0 <= 0.0 {
            return Err(Error::InvalidInput(
                "rate curve needs samples at snr > 0".into(),
            ));
        }
        for pair in samples.windows(2) {
            if pair[1].0 <= pair[0].0 {
                return Err(Error::InvalidInput(
                    "rate curve snr values must be strictly increasing".into(),
                ));
            }
            if pair[1].1 < pair[0].1 {
                return Err(Error::InvalidInput(
                    "rate curve rates must be nondecreasing".into(),
                ));
            }
        }
        if samples.iter().any(|&(_, r)| r < 0.0) {
            return Err(Error::InvalidInput("rates must be nonnegative".into()));
        }
        Ok(Self { samples })
    }

    /// The validated `(snr, rate)` samples, ascending in snr.
    pub fn samples(&self) -> &[(f64, f64)] {
        &self.samples
    }
}

/// Samples below this snr count as "near zero" for derivative estimation.
const NEAR_ZERO_SNR: f64 = 1e-2;
/// Minimum number of near-zero samples the estimator needs.
const MIN_NEAR_SAMPLES: usize = 6;

/// First and second derivatives at 0 of the polynomial through the given
/// `(x, y)` points, by Newton divided differences. Returns
/// `(d1, d2, last_d1_term, last_d2_term)`; the last-term magnitudes measure
/// how much the final node moved each derivative.
fn newton_derivatives(xs: &[f64], ys: &[f64]) -> (f64, f64, f64, f64) {
    let n = xs.len();
    let mut coef = ys.to_vec();
    for level in 1..n {
        for i in (level..n).rev() {
            coef[i] = (coef[i] - coef[i - 1]) / (xs[i] - xs[i - level]);
        }
    }
    // Newton basis N_k(x) = Π_{i<k}(x − x_i), tracked with its first two
    // derivatives at x = 0.
    let (mut nb, mut nb1, mut nb2) = (1.0f64, 0.0f64, 0.0f64);
    let (mut d1, mut d2) = (0.0, 0.0);
    let (mut last1, mut last2) = (0.0, 0.0);
    for k in 0..n {
        if k > 0 {
            let xk = xs[k - 1];
            let nb2_next = -xk * nb2 + 2.0 * nb1;
            let nb1_next = -xk * nb1 + nb;
            nb *= -xk;
            nb1 = nb1_next;
            nb2 = nb2_next;
        }
        last1 = coef[k] * nb1;
        last2 = coef[k] * nb2;
        d1 += last1;
        d2 += last2;
    }
    (d1, d2, last1.abs(), last2.abs())
}

/// Derivatives at the origin of the polynomial through `(0, 0)` and the
/// given nodes, plus error gauges: the last Newton corrections (truncation)
/// and the summed absolute sensitivity of each derivative to the node
/// values (how much machine-epsilon noise on the rates can move it).
fn derivatives_at_origin(nodes: &[(f64, f64)]) -> (f64, f64, f64, f64, f64, f64) {
    let mut xs = vec![0.0];
    let mut ys = vec![0.0];
    xs.extend(nodes.iter().map(|p| p.0));
    ys.extend(nodes.iter().map(|p| p.1));
    let (d1, d2, last1, last2) = newton_derivatives(&xs, &ys);
    // The derivatives are linear in the node values; probing with unit
    // vectors yields the weights. The origin value is exact by construction
    // and carries no noise.
    let mut amp1 = 0.0;
    let mut amp2 = 0.0;
    let mut unit = vec![0.0; xs.len()];
    for k in 1..xs.len() {
        unit[k] = 1.0;
        let (w1, w2, _, _) = newton_derivatives(&xs, &unit);
        unit[k] = 0.0;
        amp1 += w1.abs();
        amp2 += w2.abs();
    }
    (d1, d2, last1, last2, amp1, amp2)
}

/// Estimates `Eb/N0|min` and `S0` from a sampled rate curve.
///
/// The polynomial through the origin and the six smallest near-zero samples
/// is differentiated at zero — divided differences anchored at the origin,
/// which on dyadic grids reproduces Richardson extrapolation with step
/// halvings. The attached error estimate combines the last extrapolation
/// corrections with a floating-point noise floor; it is deliberately
/// conservative.
pub fn numeric_slope_estimate(curve: &RateCurve) -> Result<SlopeResult> {
    let near: Vec<(f64, f64)> = curve
        .samples()
        .iter()
        .filter(|&&(snr, _)| snr < NEAR_ZERO_SNR)
        .map(|&(snr, rate)| (snr, rate * LN_2))
        .collect();
    if near.len() < MIN_NEAR_SAMPLES {
        return Err(Error::InsufficientResolution {
            needed: MIN_NEAR_SAMPLES,
            below: NEAR_ZERO_SNR,
            found: near.len(),
        });
    }
    let nodes = &near[..MIN_NEAR_SAMPLES];
    let (d1, d2, corr1, corr2, amp1, amp2) = derivatives_at_origin(nodes);
    if !(d1 > 0.0) {
        return Err(Error::InvalidInput(format!(
            "estimated rate curve is not increasing at snr = 0 (Ṙ(0) = {d1})"
        )));
    }
    if !(d2 < 0.0) {
        return Err(Error::DegenerateCurvature(d2));
    }
    let s0 = -2.0 * d1 * d1 / d2;
    // Two error sources: truncation (gauged by the last Newton correction)
    // and rate roundoff (machine epsilon per sample, amplified by the
    // differentiation weights — dominant when the nodes sit very close
    // together). Both enter the slope through 2·δd1/d1 + δd2/d2.
    let noise1 = f64::EPSILON * amp1;
    let noise2 = f64::EPSILON * amp2;
    let relative = 2.0 * (corr1 + noise1) / d1.abs() + (corr2 + noise2) / d2.abs();
    let error_estimate = 4.0 * s0.abs() * relative + 1e-9 * (1.0 + s0.abs());
    let mut result = SlopeResult::from_ebno_s0(LN_2 / d1, s0);
    result.error_estimate = Some(error_estimate);
    Ok(result)
}

/// Minimum energy per bit the channel allows under the given constraint,
/// linear scale: `ln 2·(Σ_j |C_jj|⁻²)/K` at equal rate, `K·ln 2 / Σ_j |C_jj|²`
/// at equal power.
pub fn ebnomin_closed_form(chan: &ChannelInstance, kind: ConstraintKind) -> f64 {
    let g = chan.direct_power_gains();
    let k = g.len() as f64;
    match kind {
        ConstraintKind::EqualRate => LN_2 * g.iter().map(|x| 1.0 / x).sum::<f64>() / k,
        ConstraintKind::EqualPower => k * LN_2 / g.iter().sum::<f64>(),
    }
}

/// Sum slope of the same channel with all cross links removed:
/// `2(Σ|C_jj|²)²/Σ|C_jj|⁴` at equal power, `2K` at equal rate.
pub fn interference_free_slope(chan: &ChannelInstance, kind: ConstraintKind) -> f64 {
    let g = chan.direct_power_gains();
    match kind {
        ConstraintKind::EqualPower => {
            let s1: f64 = g.iter().sum();
            let s2: f64 = g.iter().map(|x| x * x).sum();
            2.0 * s1 * s1 / s2
        }
        ConstraintKind::EqualRate => 2.0 * g.len() as f64,
    }
}

/// Measured slope along a sequence of operating points `(Eb/N0 linear, sum
/// rate bits/s/Hz)`: the steepest chord from the minimum-energy point,
/// `max_i rate_i · 10·log10(2) / (ebno_db_i − ebno_min_db)`. Returns `None`
/// if no point sits strictly above the minimum.
pub fn measured_slope_along(points: &[(f64, f64)], ebno_min_linear: f64) -> Option<f64> {
    let min_db = to_db(ebno_min_linear);
    let three_db = 10.0 * std::f64::consts::LOG10_2;
    points
        .iter()
        .filter(|&&(ebno, _)| ebno > ebno_min_linear)
        .map(|&(ebno, rate)| rate * three_db / (to_db(ebno) - min_db))
        .fold(None, |acc: Option<f64>, chord| {
            Some(acc.map_or(chord, |best| best.max(chord)))
        })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::channel::channel_from_power_gains;
    use approx::assert_relative_eq;

    fn unit_channel(direct: &[f64]) -> ChannelInstance {
        let k = direct.len();
        let mut gains = vec![vec![0.0; k]; k];
        for (j, &g) in direct.iter().enumerate() {
            gains[j][j] = g;
        }
        channel_from_power_gains(&gains, vec![vec![0.0; k]; k], 1.0, vec![1.0; k]).unwrap()
    }

    fn dyadic_curve<F: Fn(f64) -> f64>(rate_bits: F, halvings: usize) -> RateCurve {
        let mut samples: Vec<(f64, f64)> = (0..=halvings)
            .map(|k| {
                let snr = 1e-2 / f64::powi(2.0, k as i32);
                (snr, rate_bits(snr))
            })
            .collect();
        samples.reverse();
        RateCurve::new(samples).unwrap()
    }

    #[test]
    fn awgn_reference_point() {
        let r = slope_from_rate_derivatives(1.0, -1.0).unwrap();
        assert_relative_eq!(r.ebno_min_linear, LN_2);
        assert_relative_eq!(r.ebno_min_db, -1.5917, epsilon = 1e-4);
        assert_relative_eq!(r.s0, 2.0);
    }

    #[test]
    fn doubled_curvature_halves_slope() {
        // Also the single-user half of orthogonal sharing: R = ½ln(1+2·snr).
        let r = slope_from_rate_derivatives(1.0, -2.0).unwrap();
        assert_relative_eq!(r.s0, 1.0);
    }

    #[test]
    fn rate_derivative_preconditions() {
        assert!(slope_from_rate_derivatives(0.0, -1.0).is_err());
        assert!(matches!(
            slope_from_rate_derivatives(1.0, 0.0),
            Err(Error::DegenerateCurvature(_))
        ));
    }

    #[test]
    fn power_derivatives_match_awgn_inverse() {
        // snr(R) = 2^R − 1 inverts the AWGN curve.
        let r = slope_from_power_derivatives(LN_2, LN_2 * LN_2).unwrap();
        assert_relative_eq!(r.ebno_min_linear, LN_2);
        assert_relative_eq!(r.s0, 2.0, max_relative = 1e-12);
    }

    #[test]
    fn rate_and_power_routes_agree_on_log_laws() {
        // R(snr) = α·ln(1+β·snr) nats has inverse snr(R_bits) =
        // (e^{R·ln2/α} − 1)/β.
        for &(alpha, beta) in &[(0.5, 2.0), (3.0, 0.1), (1.7, 4.2)] {
            let via_rate = slope_from_rate_derivatives(alpha * beta, -alpha * beta * beta).unwrap();
            let via_power =
                slope_from_power_derivatives(LN_2 / (alpha * beta), LN_2 * LN_2 / (alpha * alpha * beta))
                    .unwrap();
            assert_relative_eq!(via_rate.s0, via_power.s0, max_relative = 1e-9);
            assert_relative_eq!(
                via_rate.ebno_min_linear,
                via_power.ebno_min_linear,
                max_relative = 1e-9
            );
        }
    }

    #[test]
    fn curve_validation() {
        assert!(RateCurve::new(vec![]).is_err());
        assert!(RateCurve::new(vec![(0.0, 0.0), (1.0, 1.0)]).is_err());
        assert!(RateCurve::new(vec![(2.0, 1.0), (1.0, 2.0)]).is_err());
        assert!(RateCurve::new(vec![(1.0, 2.0), (2.0, 1.0)]).is_err());
        assert!(RateCurve::new(vec![(1.0, 1.0), (2.0, 2.0)]).is_ok());
    }

    #[test]
    fn numeric_estimate_awgn() {
        let curve = dyadic_curve(|snr| (1.0 + snr).ln() / LN_2, 10);
        let r = numeric_slope_estimate(&curve).unwrap();
        assert_relative_eq!(r.s0, 2.0, epsilon = 1e-3);
        assert_relative_eq!(r.ebno_min_linear, LN_2, epsilon = 1e-3);
        assert!(r.error_estimate.unwrap() < 1e-3);
    }

    #[test]
    fn numeric_estimate_interference_as_noise_curve() {
        // Symmetric two-user sum rate with cross power gain 0.2, equal power.
        let curve = dyadic_curve(|snr| 2.0 * (1.0 + snr / (1.0 + 0.2 * snr)).ln() / LN_2, 10);
        let r = numeric_slope_estimate(&curve).unwrap();
        assert_relative_eq!(r.s0, 4.0 / 1.4, epsilon = 1e-3);
    }

    #[test]
    fn numeric_estimate_matches_leakage_curve_taylor_coefficients() {
        // R = ½log2(1 + 2·snr/(1 + 0.3·snr)) has nats-derivatives
        // Ṙ(0) = 1 and R̈(0) = −2.6.
        let curve = dyadic_curve(|snr| 0.5 * (1.0 + 2.0 * snr / (1.0 + 0.3 * snr)).ln() / LN_2, 10);
        let r = numeric_slope_estimate(&curve).unwrap();
        let d1 = LN_2 / r.ebno_min_linear;
        let d2 = -2.0 * d1 * d1 / r.s0;
        assert_relative_eq!(d1, 1.0, max_relative = 1e-6);
        assert_relative_eq!(d2, -2.6, max_relative = 1e-6);
        assert_relative_eq!(r.s0, 2.0 / 2.6, max_relative = 1e-6);
    }

    #[test]
    fn numeric_estimate_halving_stays_within_error() {
        let laws: Vec<Box<dyn Fn(f64) -> f64>> = vec![
            Box::new(|snr: f64| (1.0 + snr).ln() / LN_2),
            Box::new(|snr: f64| 2.0 * (1.0 + snr / (1.0 + 0.2 * snr)).ln() / LN_2),
            Box::new(|snr: f64| 0.5 * (1.0 + 2.0 * snr / (1.0 + 0.3 * snr)).ln() / LN_2),
        ];
        for law in laws {
            let base = dyadic_curve(&*law, 10);
            let refined = dyadic_curve(&*law, 11);
            let a = numeric_slope_estimate(&base).unwrap();
            let b = numeric_slope_estimate(&refined).unwrap();
            // Each estimate bounds its own distance to the true slope, so
            // the two estimates together must bound the disagreement.
            let budget = a.error_estimate.unwrap() + b.error_estimate.unwrap();
            assert!(
                (a.s0 - b.s0).abs() < budget,
                "halving moved s0 by {} but estimate was {}",
                (a.s0 - b.s0).abs(),
                budget
            );
        }
    }

    #[test]
    fn numeric_estimate_needs_enough_near_zero_samples() {
        let samples: Vec<(f64, f64)> = (1..=5)
            .map(|k| {
                let snr = 1e-3 * k as f64;
                (snr, (1.0 + snr).ln() / LN_2)
            })
            .collect();
        let curve = RateCurve::new(samples).unwrap();
        assert!(matches!(
            numeric_slope_estimate(&curve),
            Err(Error::InsufficientResolution { found: 5, .. })
        ));
    }

    #[test]
    fn ebnomin_symmetric_two_user() {
        let chan = unit_channel(&[1.0, 1.0]);
        for kind in [ConstraintKind::EqualPower, ConstraintKind::EqualRate] {
            assert_relative_eq!(ebnomin_closed_form(&chan, kind), LN_2);
        }
    }

    #[test]
    fn ebnomin_three_user_mixed_gains() {
        let chan = unit_channel(&[1.0, 2.0, 4.0]);
        assert_relative_eq!(
            ebnomin_closed_form(&chan, ConstraintKind::EqualPower),
            3.0 * LN_2 / 7.0
        );
        assert_relative_eq!(
            ebnomin_closed_form(&chan, ConstraintKind::EqualRate),
            LN_2 * (1.0 + 0.5 + 0.25) / 3.0
        );
    }

    #[test]
    fn interference_free_slopes() {
        let chan = unit_channel(&[1.0, 1.0, 1.0]);
        assert_relative_eq!(
            interference_free_slope(&chan, ConstraintKind::EqualPower),
            6.0
        );
        let skewed = unit_channel(&[1.0, 3.0]);
        assert_relative_eq!(
            interference_free_slope(&skewed, ConstraintKind::EqualPower),
            3.2
        );
        assert_relative_eq!(
            interference_free_slope(&skewed, ConstraintKind::EqualRate),
            4.0
        );
    }

    #[test]
    fn baseline_against_itself_is_one() {
        let chan = unit_channel(&[1.0, 2.0]);
        let s0 = interference_free_slope(&chan, ConstraintKind::EqualPower);
        let r = SlopeResult::from_ebno_s0(LN_2, s0).with_baseline(s0);
        assert_eq!(r.delta_s0, Some(1.0));
    }

    #[test]
    fn measured_slope_picks_steepest_chord() {
        let rate = |snr: f64| (1.0 + snr).ln() / LN_2;
        let points: Vec<(f64, f64)> = [1e-3, 1e-4]
            .iter()
            .map(|&snr| {
                let r = rate(snr);
                (snr / r, r)
            })
            .collect();
        let measured = measured_slope_along(&points, LN_2).unwrap();
        let chord_small = {
            let (ebno, r) = points[1];
            r * 10.0 * std::f64::consts::LOG10_2 / (to_db(ebno) - to_db(LN_2))
        };
        assert_relative_eq!(measured, chord_small, max_relative = 1e-12);
        assert!(measured > 1.9 && measured < 2.0);
        assert!(measured_slope_along(&[], LN_2).is_none());
    }
}
