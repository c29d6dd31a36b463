use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use wbslope_core::slope::ConstraintKind;

use crate::error::{CliError, Result};

fn default_constraint() -> ConstraintKind {
    ConstraintKind::EqualPower
}

fn default_b_start() -> u64 {
    1
}

fn default_leakage_tol() -> f64 {
    1e-6
}

/// Top-level experiment config file: which experiment, where its artifacts
/// go, the explicit seed, and an experiment-specific parameter block.
#[derive(Debug, Clone, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub experiment: ExperimentKind,
    pub output_path: PathBuf,
    /// Always explicit, even for experiments that draw nothing: ambient
    /// entropy would silently break reproducibility.
    pub seed: u64,
    #[serde(default)]
    pub parameters: toml::Table,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum ExperimentKind {
    TwoUserSweep,
    AlignSearch,
    AlignSweep,
    AlignPeaks,
    KuserOuter,
    PairingMc,
}

impl ExperimentKind {
    pub fn name(&self) -> &'static str {
        match self {
            ExperimentKind::TwoUserSweep => "two-user-sweep",
            ExperimentKind::AlignSearch => "align-search",
            ExperimentKind::AlignSweep => "align-sweep",
            ExperimentKind::AlignPeaks => "align-peaks",
            ExperimentKind::KuserOuter => "kuser-outer",
            ExperimentKind::PairingMc => "pairing-mc",
        }
    }
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TwoUserSweepParams {
    pub a_min: f64,
    pub a_max: f64,
    pub steps: usize,
    #[serde(default = "default_constraint")]
    pub constraint: ConstraintKind,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AlignSearchParams {
    /// Delay matrix, inline or in a separate TOML file; exactly one of the
    /// two must be given.
    pub delays: Option<Vec<Vec<f64>>>,
    pub delays_path: Option<PathBuf>,
    pub delta: f64,
    #[serde(default = "default_b_start")]
    pub b_start: u64,
    pub b_max: Option<u64>,
    #[serde(default = "default_leakage_tol")]
    pub leakage_tol: f64,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AlignSweepParams {
    pub channel_path: PathBuf,
    pub b_min: f64,
    pub b_max: f64,
    pub steps: usize,
    #[serde(default = "default_leakage_tol")]
    pub leakage_tol: f64,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AlignPeaksParams {
    pub channel_path: PathBuf,
    pub delta: f64,
    #[serde(default = "default_b_start")]
    pub b_start: u64,
    pub count: usize,
    pub b_max: Option<u64>,
    #[serde(default = "default_leakage_tol")]
    pub leakage_tol: f64,
    #[serde(default = "default_constraint")]
    pub constraint: ConstraintKind,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct KuserOuterParams {
    pub channel_path: PathBuf,
    pub epsilon: f64,
    #[serde(default = "default_constraint")]
    pub constraint: ConstraintKind,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PairingMcParams {
    pub dist: String,
    pub k_list: Vec<usize>,
    pub epsilon: f64,
    pub trials: u64,
}

/// A fully validated experiment request, shared by the config and the flag
/// entry points.
#[derive(Debug, Clone)]
pub enum ExperimentRequest {
    TwoUserSweep(TwoUserSweepParams),
    AlignSearch(AlignSearchParams),
    AlignSweep(AlignSweepParams),
    AlignPeaks(AlignPeaksParams),
    KuserOuter(KuserOuterParams),
    PairingMc(PairingMcParams),
}

/// Parses and validates a config file into a runnable request.
pub fn load_config(path: &Path) -> Result<(ExperimentConfig, ExperimentRequest)> {
    let text = std::fs::read_to_string(path).map_err(|e| {
        CliError::Usage(format!("cannot read config {}: {e}", path.display()))
    })?;
    let config: ExperimentConfig = toml::from_str(&text)
        .map_err(|e| CliError::Usage(format!("config {}: {e}", path.display())))?;
    let request = build_request(&config)?;
    Ok((config, request))
}

fn params<T: serde::de::DeserializeOwned>(config: &ExperimentConfig) -> Result<T> {
    config.parameters.clone().try_into().map_err(|e| {
        CliError::Usage(format!(
            "parameters for {}: {e}",
            config.experiment.name()
        ))
    })
}

fn build_request(config: &ExperimentConfig) -> Result<ExperimentRequest> {
    let request = match config.experiment {
        ExperimentKind::TwoUserSweep => ExperimentRequest::TwoUserSweep(params(config)?),
        ExperimentKind::AlignSearch => ExperimentRequest::AlignSearch(params(config)?),
        ExperimentKind::AlignSweep => ExperimentRequest::AlignSweep(params(config)?),
        ExperimentKind::AlignPeaks => ExperimentRequest::AlignPeaks(params(config)?),
        ExperimentKind::KuserOuter => ExperimentRequest::KuserOuter(params(config)?),
        ExperimentKind::PairingMc => ExperimentRequest::PairingMc(params(config)?),
    };
    validate_request(&request)?;
    Ok(request)
}

/// Request-level sanity checks that do not need file contents. Anything
/// caught here is a config problem (exit 2); deeper validation is left to
/// the computation itself (exit 1).
pub fn validate_request(request: &ExperimentRequest) -> Result<()> {
    let usage = |msg: String| Err(CliError::Usage(msg));
    match request {
        ExperimentRequest::TwoUserSweep(p) => {
            if !(p.a_min > 0.0) || !(p.a_max >= p.a_min) {
                return usage(format!(
                    "cross-gain grid must satisfy 0 < a_min ≤ a_max, got [{}, {}]",
                    p.a_min, p.a_max
                ));
            }
            if p.steps == 0 {
                return usage("steps must be at least 1".into());
            }
        }
        ExperimentRequest::AlignSearch(p) => {
            match (&p.delays, &p.delays_path) {
                (None, None) => {
                    return usage("align-search needs `delays` or `delays_path`".into())
                }
                (Some(_), Some(_)) => {
                    return usage("give either `delays` or `delays_path`, not both".into())
                }
                _ => {}
            }
            alignment_ranges(p.delta, p.leakage_tol)?;
        }
        ExperimentRequest::AlignSweep(p) => {
            if !(p.b_min > 0.0) || !(p.b_max >= p.b_min) {
                return usage(format!(
                    "bandwidth grid must satisfy 0 < b_min ≤ b_max, got [{}, {}]",
                    p.b_min, p.b_max
                ));
            }
            if p.steps == 0 {
                return usage("steps must be at least 1".into());
            }
        }
        ExperimentRequest::AlignPeaks(p) => {
            if p.count < 2 {
                return usage(format!(
                    "a peak sequence needs at least 2 candidates, got {}",
                    p.count
                ));
            }
            alignment_ranges(p.delta, p.leakage_tol)?;
        }
        ExperimentRequest::KuserOuter(p) => {
            if !(p.epsilon > 0.0 && p.epsilon < 1.0) {
                return usage(format!(
                    "epsilon must lie in (0, 1), got {}",
                    p.epsilon
                ));
            }
        }
        ExperimentRequest::PairingMc(p) => {
            if p.k_list.is_empty() {
                return usage("k_list must not be empty".into());
            }
            if let Some(k) = p.k_list.iter().find(|&&k| k < 2 || k % 2 != 0) {
                return usage(format!("user counts must be even and at least 2, got {k}"));
            }
            if !(p.epsilon > 0.0 && p.epsilon < 1.0) {
                return usage(format!(
                    "epsilon must lie in (0, 1), got {}",
                    p.epsilon
                ));
            }
            if p.trials == 0 {
                return usage("trials must be at least 1".into());
            }
            if !matches!(p.dist.as_str(), "exp" | "rayleigh" | "const") {
                return usage(format!(
                    "unknown distribution `{}` (expected exp, rayleigh, or const)",
                    p.dist
                ));
            }
        }
    }
    Ok(())
}

fn alignment_ranges(delta: f64, leakage_tol: f64) -> Result<()> {
    if !(delta > 0.0 && delta < 1.0) {
        return Err(CliError::Usage(format!(
            "delta must lie in (0, 1), got {delta}"
        )));
    }
    if !(leakage_tol > 0.0) {
        return Err(CliError::Usage(format!(
            "leakage_tol must be positive, got {leakage_tol}"
        )));
    }
    Ok(())
}

/// What `run` records next to the artifacts: enough to re-run the
/// experiment and to verify the outputs were not altered since.
#[derive(Debug, Serialize)]
pub struct RunManifest {
    pub tool: String,
    pub experiment: String,
    pub seed: u64,
    pub duration_ms: u128,
    pub config: ExperimentConfig,
    pub outputs: Vec<ArtifactDigest>,
}

#[derive(Debug, Serialize)]
pub struct ArtifactDigest {
    pub path: String,
    pub bytes: usize,
    pub sha256: String,
}
