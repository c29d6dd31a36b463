//! Line-of-sight interference channel instances.
//!
//! A channel is a set of `K` transmitter/receiver pairs with complex link
//! gains `C_ji` (receiver `j`, transmitter `i`), propagation delays `τ_ji`,
//! a noise density, and per-user power budgets. At a given bandwidth `B`
//! each delay splits into an integer sample offset `n_ji` and a fractional
//! part `δ_ji ∈ [−1/2, 1/2)`; the fractional part controls how much of an
//! even-slot-only transmission leaks into the other parity's sample slots
//! through the sinc interpolation kernel.

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

use crate::error::{Error, Result};

/// A `K`-user line-of-sight interference channel.
///
/// `gains[j][i]` is the complex amplitude gain from transmitter `i` to
/// receiver `j`; `delays[j][i]` the corresponding propagation delay in
/// seconds. Instances are immutable after construction.
#[derive(Debug, Clone, PartialEq)]
pub struct ChannelInstance {
    /// Number of transmitter/receiver pairs (`K ≥ 2`).
    pub k: usize,
    /// Complex amplitude gains, receiver-major: `gains[j][i] = C_ji`.
    pub gains: Vec<Vec<Complex64>>,
    /// Propagation delays in seconds, same indexing as `gains`.
    pub delays: Vec<Vec<f64>>,
    /// One-sided noise power spectral density `N0` in watts/Hz.
    pub noise_density: f64,
    /// Per-user transmit power budgets in watts.
    pub powers: Vec<f64>,
}

impl ChannelInstance {
    /// Validates and builds a channel instance.
    pub fn new(
        gains: Vec<Vec<Complex64>>,
        delays: Vec<Vec<f64>>,
        noise_density: f64,
        powers: Vec<f64>,
    ) -> Result<Self> {
        let k = gains.len();
        if k < 2 {
            return Err(Error::InvalidInput(format!(
                "need at least 2 users, got {k}"
            )));
        }
        if gains.iter().any(|row| row.len() != k) {
            return Err(Error::InvalidInput("gain matrix is not K×K".into()));
        }
        if delays.len() != k || delays.iter().any(|row| row.len() != k) {
            return Err(Error::InvalidInput("delay matrix is not K×K".into()));
        }
        if powers.len() != k {
            return Err(Error::InvalidInput(format!(
                "expected {k} powers, got {}",
                powers.len()
            )));
        }
        for (j, row) in gains.iter().enumerate() {
            if row[j].norm_sqr() == 0.0 {
                return Err(Error::InvalidInput(format!(
                    "direct gain C_{j}{j} must be nonzero"
                )));
            }
        }
        if delays.iter().flatten().any(|d| !d.is_finite() || *d < 0.0) {
            return Err(Error::InvalidInput(
                "delays must be finite and nonnegative".into(),
            ));
        }
        if !(noise_density > 0.0) {
            return Err(Error::InvalidInput(format!(
                "noise density must be positive, got {noise_density}"
            )));
        }
        if powers.iter().any(|p| !(*p >= 0.0)) {
            return Err(Error::InvalidInput("powers must be nonnegative".into()));
        }
        Ok(Self {
            k,
            gains,
            delays,
            noise_density,
            powers,
        })
    }

    /// Power gain `|C_ji|²` of the link from transmitter `i` to receiver `j`.
    pub fn power_gain(&self, j: usize, i: usize) -> f64 {
        self.gains[j][i].norm_sqr()
    }

    /// Direct-link power gains `|C_jj|²` for all users.
    pub fn direct_power_gains(&self) -> Vec<f64> {
        (0..self.k).map(|j| self.power_gain(j, j)).collect()
    }

    /// Serializes the channel to a TOML document. Gains are stored as
    /// separate real/imaginary matrices so the file stays plain-text
    /// editable; floats round-trip exactly.
    pub fn to_toml_string(&self) -> Result<String> {
        let file = ChannelFile {
            k: self.k,
            noise_density: self.noise_density,
            powers: self.powers.clone(),
            gains_re: self
                .gains
                .iter()
                .map(|row| row.iter().map(|c| c.re).collect())
                .collect(),
            gains_im: self
                .gains
                .iter()
                .map(|row| row.iter().map(|c| c.im).collect())
                .collect(),
            delays: self.delays.clone(),
        };
        toml::to_string(&file).map_err(|e| Error::ChannelFile(e.to_string()))
    }

    /// Parses a channel from the TOML format written by
    /// [`to_toml_string`](Self::to_toml_string).
    pub fn from_toml_str(text: &str) -> Result<Self> {
        let file: ChannelFile =
            toml::from_str(text).map_err(|e| Error::ChannelFile(e.to_string()))?;
        if file.gains_re.len() != file.k
            || file.gains_im.len() != file.k
            || file
                .gains_re
                .iter()
                .zip(&file.gains_im)
                .any(|(re, im)| re.len() != file.k || im.len() != file.k)
        {
            return Err(Error::ChannelFile(
                "gain matrices do not match declared user count".into(),
            ));
        }
        let gains = file
            .gains_re
            .iter()
            .zip(&file.gains_im)
            .map(|(re_row, im_row)| {
                re_row
                    .iter()
                    .zip(im_row)
                    .map(|(&re, &im)| Complex64::new(re, im))
                    .collect()
            })
            .collect();
        Self::new(gains, file.delays, file.noise_density, file.powers)
    }
}

#[derive(Serialize, Deserialize)]
struct ChannelFile {
    k: usize,
    noise_density: f64,
    powers: Vec<f64>,
    gains_re: Vec<Vec<f64>>,
    gains_im: Vec<Vec<f64>>,
    delays: Vec<Vec<f64>>,
}

/// Integer/fractional decomposition of all delays at one bandwidth:
/// `n_ji = floor(τ_ji·B + 1/2)` and `δ_ji = τ_ji·B − n_ji ∈ [−1/2, 1/2)`.
#[derive(Debug, Clone, PartialEq)]
pub struct DiscretizedDelays {
    /// The bandwidth the decomposition was taken at, in Hz.
    pub bandwidth: f64,
    /// Integer sample offsets `n_ji`.
    pub n: Vec<Vec<i64>>,
    /// Fractional offsets `δ_ji ∈ [−1/2, 1/2)`.
    pub delta: Vec<Vec<f64>>,
}

/// Splits every delay into its nearest-integer sample offset and fractional
/// remainder at bandwidth `b`. Ties at exactly +1/2 round up (the remainder
/// stays in `[−1/2, 1/2)`).
pub fn discretize(chan: &ChannelInstance, b: f64) -> Result<DiscretizedDelays> {
    if !(b > 0.0) {
        return Err(Error::InvalidInput(format!(
            "bandwidth must be positive, got {b}"
        )));
    }
    let mut n = vec![vec![0i64; chan.k]; chan.k];
    let mut delta = vec![vec![0f64; chan.k]; chan.k];
    for j in 0..chan.k {
        for i in 0..chan.k {
            let x = chan.delays[j][i] * b;
            let nearest = (x + 0.5).floor();
            n[j][i] = nearest as i64;
            delta[j][i] = x - nearest;
        }
    }
    Ok(DiscretizedDelays {
        bandwidth: b,
        n,
        delta,
    })
}

/// Geometry description from which gains and delays are derived:
/// `τ_ji = d_ji / c` and `|C_ji| = d_ji^{−α/2}` (so the power gain follows a
/// `d^{−α}` law), with phases drawn i.i.d. uniform from the seeded generator.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct GeometryConfig {
    /// Transmitter coordinates in meters (2 or 3 components each).
    pub positions_tx: Vec<Vec<f64>>,
    /// Receiver coordinates in meters (2 or 3 components each).
    pub positions_rx: Vec<Vec<f64>>,
    /// Pathloss exponent `α > 0` applied to power.
    pub pathloss_exponent: f64,
    /// Propagation speed in m/s.
    pub wave_speed: f64,
    /// Seed for the phase draws; equal seeds give equal channels.
    pub rng_seed: u64,
}

fn point_distance(a: &[f64], b: &[f64]) -> f64 {
    let dims = a.len().max(b.len());
    (0..dims)
        .map(|d| {
            let ad = a.get(d).copied().unwrap_or(0.0);
            let bd = b.get(d).copied().unwrap_or(0.0);
            (ad - bd) * (ad - bd)
        })
        .sum::<f64>()
        .sqrt()
}

/// Builds a channel from geometry. Distances set both the delay and the
/// amplitude; link phases are folded into the complex gains at construction
/// so downstream code never handles them separately.
pub fn channel_from_geometry(
    geom: &GeometryConfig,
    noise_density: f64,
    powers: Vec<f64>,
) -> Result<ChannelInstance> {
    let k = geom.positions_tx.len();
    if k < 2 || geom.positions_rx.len() != k {
        return Err(Error::InvalidInput(
            "need matching transmitter/receiver position lists with K ≥ 2".into(),
        ));
    }
    for p in geom.positions_tx.iter().chain(&geom.positions_rx) {
        if p.len() < 2 || p.len() > 3 || p.iter().any(|c| !c.is_finite()) {
            return Err(Error::InvalidInput(
                "positions must be finite 2D or 3D coordinates".into(),
            ));
        }
    }
    if !(geom.pathloss_exponent > 0.0) || !(geom.wave_speed > 0.0) {
        return Err(Error::InvalidInput(
            "pathloss exponent and wave speed must be positive".into(),
        ));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(geom.rng_seed);
    let mut gains = vec![vec![Complex64::new(0.0, 0.0); k]; k];
    let mut delays = vec![vec![0f64; k]; k];
    for j in 0..k {
        for i in 0..k {
            let d = point_distance(&geom.positions_rx[j], &geom.positions_tx[i]);
            if d == 0.0 {
                return Err(Error::InvalidInput(format!(
                    "transmitter {i} and receiver {j} are coincident"
                )));
            }
            let amplitude = d.powf(-geom.pathloss_exponent / 2.0);
            let phase = rng.gen::<f64>() * 2.0 * PI;
            gains[j][i] = Complex64::from_polar(amplitude, phase);
            delays[j][i] = d / geom.wave_speed;
        }
    }
    ChannelInstance::new(gains, delays, noise_density, powers)
}

/// Normalized sinc kernel `sin(πx)/(πx)`.
fn sinc(x: f64) -> f64 {
    if x == 0.0 {
        1.0
    } else {
        let px = PI * x;
        px.sin() / px
    }
}

/// Covariance of an even-slot i.i.d. input process observed through the sinc
/// interpolator at two sample offsets, summed over a fixed window:
/// `Σ_{m=lo−w}^{hi+w} 2P·sinc(n1−2m+δ)·sinc(n2−2m+δ)` with
/// `lo/hi = min/max(n1,n2)/2`. Exposed so the window can be varied directly;
/// prefer [`sinc_leakage_covariance`], which sizes the window from a
/// tolerance.
pub fn sinc_leakage_covariance_windowed(
    n1: i64,
    n2: i64,
    delta: f64,
    power: f64,
    half_width: i64,
) -> f64 {
    let lo = n1.min(n2).div_euclid(2) - half_width;
    let hi = (n1.max(n2) + 1).div_euclid(2) + half_width;
    let mut sum = 0.0;
    for m in lo..=hi {
        let a = (n1 - 2 * m) as f64 + delta;
        let b = (n2 - 2 * m) as f64 + delta;
        sum += sinc(a) * sinc(b);
    }
    2.0 * power * sum
}

/// Covariance between two sample offsets of an even-slot-only transmission
/// (i.i.d. symbols of variance `2·power`) after sinc interpolation.
///
/// The infinite series is truncated where its Weierstrass comparison tail
/// `Σ_{t>w} 1/(2t−1)² ≤ 1/(2(2w−1))` drops below `tol`; the kernel product
/// is evaluated term by term, so the returned value is the truncated series
/// itself, not a closed form. The value is real because the kernel is real
/// and the symbols are proper complex with real pair covariance.
pub fn sinc_leakage_covariance(
    n1: i64,
    n2: i64,
    delta: f64,
    power: f64,
    tol: f64,
) -> Result<f64> {
    if !(tol > 0.0) {
        return Err(Error::NonPositiveTolerance(tol));
    }
    if !(delta.abs() <= 0.5) {
        return Err(Error::InvalidInput(format!(
            "fractional delay must lie in [−1/2, 1/2], got {delta}"
        )));
    }
    // 1/(2(2w−1)) ≤ tol  ⇔  w ≥ (1/(2·tol) + 1)/2.
    let half_width = ((0.5 / tol + 1.0) / 2.0).ceil() as i64 + 1;
    Ok(sinc_leakage_covariance_windowed(
        n1, n2, delta, power, half_width,
    ))
}

/// Leaked interference power `ε_j(B)` at each receiver when every user
/// transmits even-slot-only at bandwidth `b`: the sum over interferers of
/// `|C_ji|²` times the variance their interpolated process shows at receiver
/// `j`'s sampling slots.
pub fn leaked_interference_power(chan: &ChannelInstance, b: f64, tol: f64) -> Result<Vec<f64>> {
    let disc = discretize(chan, b)?;
    let mut eps = vec![0.0; chan.k];
    for (j, eps_j) in eps.iter_mut().enumerate() {
        for i in 0..chan.k {
            if i == j {
                continue;
            }
            let variance = sinc_leakage_covariance(
                disc.n[j][i],
                disc.n[j][i],
                disc.delta[j][i],
                chan.powers[i],
                tol,
            )?;
            *eps_j += chan.power_gain(j, i) * variance;
        }
    }
    Ok(eps)
}

/// Convenience constructor used widely in tests and sweeps: real gains from
/// power-gain matrix entries (amplitude `√g`), explicit delays.
pub fn channel_from_power_gains(
    power_gains: &[Vec<f64>],
    delays: Vec<Vec<f64>>,
    noise_density: f64,
    powers: Vec<f64>,
) -> Result<ChannelInstance> {
    let gains = power_gains
        .iter()
        .map(|row| {
            row.iter()
                .map(|&g| Complex64::new(g.max(0.0).sqrt(), 0.0))
                .collect()
        })
        .collect();
    ChannelInstance::new(gains, delays, noise_density, powers)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn unit_two_user() -> ChannelInstance {
        channel_from_power_gains(
            &[vec![1.0, 0.0], vec![0.0, 1.0]],
            vec![vec![0.0, 0.3], vec![0.4, 0.0]],
            1.0,
            vec![1.0, 1.0],
        )
        .unwrap()
    }

    #[test]
    fn discretize_exact_integer_product() {
        let chan = channel_from_power_gains(
            &[vec![1.0, 1.0], vec![1.0, 1.0]],
            vec![vec![1.0; 2]; 2],
            1.0,
            vec![1.0; 2],
        )
        .unwrap();
        let d = discretize(&chan, 3.0).unwrap();
        assert_eq!(d.n[0][0], 3);
        assert_eq!(d.delta[0][0], 0.0);
    }

    #[test]
    fn discretize_rounds_to_nearest() {
        let chan = channel_from_power_gains(
            &[vec![1.0, 1.0], vec![1.0, 1.0]],
            vec![vec![1.0; 2]; 2],
            1.0,
            vec![1.0; 2],
        )
        .unwrap();
        let d = discretize(&chan, 3.4).unwrap();
        assert_eq!(d.n[0][0], 3);
        assert_relative_eq!(d.delta[0][0], 0.4, max_relative = 1e-12);
        let d = discretize(&chan, 3.6).unwrap();
        assert_eq!(d.n[0][0], 4);
        assert_relative_eq!(d.delta[0][0], -0.4, max_relative = 1e-12);
    }

    #[test]
    fn discretize_reconstructs_product() {
        let chan = channel_from_power_gains(
            &[vec![1.0, 1.0], vec![1.0, 1.0]],
            vec![
                vec![0.1414213562373095, std::f64::consts::E],
                vec![137.035999, 0.5772156649],
            ],
            1.0,
            vec![1.0; 2],
        )
        .unwrap();
        for &b in &[0.37, 11.0, 104729.5] {
            let d = discretize(&chan, b).unwrap();
            for j in 0..2 {
                for i in 0..2 {
                    let rebuilt = d.n[j][i] as f64 + d.delta[j][i];
                    assert_relative_eq!(rebuilt, chan.delays[j][i] * b, max_relative = 1e-12);
                    assert!(d.delta[j][i] >= -0.5 && d.delta[j][i] < 0.5);
                }
            }
        }
    }

    #[test]
    fn covariance_even_offset_zero_delta_is_full_power() {
        let v = sinc_leakage_covariance(0, 0, 0.0, 1.0, 1e-7).unwrap();
        assert_relative_eq!(v, 2.0, epsilon = 1e-12);
    }

    #[test]
    fn covariance_odd_offset_zero_delta_vanishes() {
        // The kernel hits only exact zero crossings at odd offsets.
        let v = sinc_leakage_covariance(1, 1, 0.0, 1.0, 1e-7).unwrap();
        assert!(v.abs() < 1e-12, "got {v}");
    }

    #[test]
    fn covariance_matches_long_window_reference() {
        // Reference values computed by brute-force summation over
        // m ∈ [−10⁶, 10⁶].
        let v = sinc_leakage_covariance(1, 1, 0.2, 1.0, 1e-8).unwrap();
        assert_relative_eq!(v, 0.19098300562505255, epsilon = 1e-6);
        let v = sinc_leakage_covariance(0, 0, 0.2, 1.0, 1e-8).unwrap();
        assert_relative_eq!(v, 1.8090169943749475, epsilon = 1e-6);
        let v = sinc_leakage_covariance(0, 1, 0.3, 1.0, 1e-8).unwrap();
        assert_relative_eq!(v, -0.5150362148004839, epsilon = 1e-6);
    }

    #[test]
    fn covariance_scales_with_power() {
        let v1 = sinc_leakage_covariance(1, 1, 0.2, 1.0, 1e-6).unwrap();
        let v3 = sinc_leakage_covariance(1, 1, 0.2, 3.0, 1e-6).unwrap();
        assert_relative_eq!(v3, 3.0 * v1, max_relative = 1e-12);
    }

    #[test]
    fn covariance_window_doubling_changes_little() {
        for &(n1, n2, d) in &[(0, 0, 0.2), (1, 1, 0.41), (3, 8, -0.27)] {
            let tol = 1e-5_f64;
            let w = ((0.5 / tol + 1.0) / 2.0).ceil() as i64 + 1;
            let narrow = sinc_leakage_covariance_windowed(n1, n2, d, 1.0, w);
            let wide = sinc_leakage_covariance_windowed(n1, n2, d, 1.0, 2 * w);
            assert!(
                (narrow - wide).abs() < tol,
                "window doubling moved ({n1},{n2},{d}) by {}",
                (narrow - wide).abs()
            );
        }
    }

    #[test]
    fn covariance_never_exceeds_input_power() {
        // Interpolating a Nyquist-rate process cannot create power.
        for n in -5i64..=6 {
            for step in 0..10 {
                let d = -0.5 + step as f64 * 0.1;
                let v = sinc_leakage_covariance(n, n, d, 1.3, 1e-6).unwrap();
                assert!(v <= 2.0 * 1.3 + 1e-6, "n={n} δ={d} gave {v}");
                assert!(v >= -1e-9);
            }
        }
    }

    #[test]
    fn covariance_continuous_in_delta() {
        let base = sinc_leakage_covariance(1, 1, 0.2, 1.0, 1e-7).unwrap();
        let coarse = (sinc_leakage_covariance(1, 1, 0.2 + 1e-3, 1.0, 1e-7).unwrap() - base).abs();
        let fine = (sinc_leakage_covariance(1, 1, 0.2 + 1e-6, 1.0, 1e-7).unwrap() - base).abs();
        assert!(fine < coarse && coarse < 1e-2, "coarse={coarse} fine={fine}");
    }

    #[test]
    fn covariance_rejects_bad_tolerance() {
        assert!(matches!(
            sinc_leakage_covariance(0, 0, 0.0, 1.0, 0.0),
            Err(Error::NonPositiveTolerance(_))
        ));
    }

    #[test]
    fn leakage_zero_without_cross_gains() {
        let chan = unit_two_user();
        let eps = leaked_interference_power(&chan, 7.3, 1e-6).unwrap();
        assert!(eps.iter().all(|&e| e == 0.0));
    }

    #[test]
    fn leakage_vanishes_at_odd_integer_products() {
        // τ·B = 1 exactly for both cross links: interference lands entirely
        // in the discarded slots.
        let chan = channel_from_power_gains(
            &[vec![1.0, 0.8], vec![0.8, 1.0]],
            vec![vec![0.0, 0.5], vec![0.5, 0.0]],
            1.0,
            vec![1.0, 1.0],
        )
        .unwrap();
        let eps = leaked_interference_power(&chan, 2.0, 1e-7).unwrap();
        assert!(eps.iter().all(|&e| e.abs() < 1e-10), "{eps:?}");
    }

    #[test]
    fn leakage_applies_cross_power_gains() {
        let g = 0.37;
        let chan = channel_from_power_gains(
            &[vec![1.0, g], vec![g, 1.0]],
            vec![vec![0.0, 0.3], vec![0.3, 0.0]],
            1.0,
            vec![2.0, 2.0],
        )
        .unwrap();
        let eps = leaked_interference_power(&chan, 1.0, 1e-6).unwrap();
        let var = sinc_leakage_covariance(0, 0, 0.3, 2.0, 1e-6).unwrap();
        assert_relative_eq!(eps[0], g * var, max_relative = 1e-12);
        assert_relative_eq!(eps[1], g * var, max_relative = 1e-12);
    }

    #[test]
    fn geometry_unit_distance() {
        let geom = GeometryConfig {
            positions_tx: vec![vec![0.0, 0.0], vec![10.0, 0.0]],
            positions_rx: vec![vec![1.0, 0.0], vec![11.0, 0.0]],
            pathloss_exponent: 2.0,
            wave_speed: 1.0,
            rng_seed: 9,
        };
        let chan = channel_from_geometry(&geom, 1.0, vec![1.0, 1.0]).unwrap();
        assert_relative_eq!(chan.delays[0][0], 1.0);
        assert_relative_eq!(chan.gains[0][0].norm(), 1.0, max_relative = 1e-12);
    }

    #[test]
    fn geometry_is_deterministic_per_seed() {
        let geom = GeometryConfig {
            positions_tx: vec![vec![0.0, 0.0], vec![5.0, 1.0]],
            positions_rx: vec![vec![1.0, 2.0], vec![6.0, 3.0]],
            pathloss_exponent: 3.0,
            wave_speed: 2.0,
            rng_seed: 1234,
        };
        let a = channel_from_geometry(&geom, 1.0, vec![1.0, 1.0]).unwrap();
        let b = channel_from_geometry(&geom, 1.0, vec![1.0, 1.0]).unwrap();
        assert_eq!(a, b);
        let mut geom2 = geom.clone();
        geom2.rng_seed = 1235;
        let c = channel_from_geometry(&geom2, 1.0, vec![1.0, 1.0]).unwrap();
        assert_ne!(a.gains, c.gains);
        assert_eq!(a.delays, c.delays);
    }

    #[test]
    fn geometry_three_user_delays_distinct() {
        let geom = GeometryConfig {
            positions_tx: vec![vec![0.0, 0.0], vec![3.1, 0.2], vec![1.7, 4.3]],
            positions_rx: vec![vec![0.9, 1.1], vec![4.0, 2.2], vec![2.5, 5.9]],
            pathloss_exponent: 2.0,
            wave_speed: 1.0,
            rng_seed: 5,
        };
        let chan = channel_from_geometry(&geom, 1.0, vec![1.0; 3]).unwrap();
        let mut all: Vec<f64> = chan.delays.iter().flatten().copied().collect();
        all.sort_by(f64::total_cmp);
        for pair in all.windows(2) {
            assert!(pair[1] > pair[0], "delays not pairwise distinct: {all:?}");
        }
    }

    #[test]
    fn geometry_rejects_coincident_nodes() {
        let geom = GeometryConfig {
            positions_tx: vec![vec![0.0, 0.0], vec![1.0, 1.0]],
            positions_rx: vec![vec![0.0, 0.0], vec![2.0, 2.0]],
            pathloss_exponent: 2.0,
            wave_speed: 1.0,
            rng_seed: 0,
        };
        assert!(channel_from_geometry(&geom, 1.0, vec![1.0, 1.0]).is_err());
    }

    #[test]
    fn channel_rejects_single_user_and_dead_direct_links() {
        assert!(ChannelInstance::new(
            vec![vec![Complex64::new(1.0, 0.0)]],
            vec![vec![0.0]],
            1.0,
            vec![1.0],
        )
        .is_err());
        assert!(channel_from_power_gains(
            &[vec![0.0, 1.0], vec![1.0, 1.0]],
            vec![vec![0.0; 2]; 2],
            1.0,
            vec![1.0; 2],
        )
        .is_err());
    }

    #[test]
    fn toml_round_trip_is_exact() {
        let chan = channel_from_power_gains(
            &[vec![1.0, 0.8], vec![0.7, 1.2]],
            vec![
                vec![0.0, 0.1414213562373095],
                vec![0.22360679774997896, 0.0],
            ],
            4.0e-21,
            vec![0.1, 0.2],
        )
        .unwrap();
        let text = chan.to_toml_string().unwrap();
        let back = ChannelInstance::from_toml_str(&text).unwrap();
        assert_eq!(chan, back);
    }
}
