use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::time::Instant;

use sha2::{Digest, Sha256};
use wbslope_core::alignment::{
    achievable_rate_with_leakage, peak_sequence, search_bandwidth, sweep_bandwidth,
    AlignmentConfig,
};
use wbslope_core::channel::ChannelInstance;
use wbslope_core::kuser::{equal_power_outer_sample, equal_rate_outer_sample, GainDist};
use wbslope_core::slope::{
    ebnomin_closed_form, measured_slope_along, to_db, ConstraintKind, SlopeResult,
};
use wbslope_core::two_user::{
    fig2_sweep, inner_bound_slope, kramer_outer_equal_rate, TwoUserGains,
};

use crate::cli::{Cli, Command};
use crate::config::{
    load_config, validate_request, AlignPeaksParams, AlignSearchParams, AlignSweepParams,
    ArtifactDigest, ExperimentRequest, KuserOuterParams, PairingMcParams, RunManifest,
    TwoUserSweepParams,
};
use crate::error::{CliError, Result};
use crate::plotdata;

/// Environment variable that redirects relative output paths into another
/// directory without touching configs.
pub const OUTPUT_DIR_VAR: &str = "WBSLOPE_OUTPUT_DIR";

/// Everything one experiment produces, before any of it touches disk.
struct Produced {
    csv: String,
    plot: Option<String>,
    warning: Option<String>,
}

pub fn execute(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Run { config } => run_config(&config),
        Command::TwoUserSweep {
            a_min,
            a_max,
            steps,
            constraint,
            output,
        } => run_flags(
            ExperimentRequest::TwoUserSweep(TwoUserSweepParams {
                a_min,
                a_max,
                steps,
                constraint: constraint.into(),
            }),
            0,
            output,
        ),
        Command::AlignSearch {
            delays,
            delta,
            b_start,
            b_max,
            leakage_tol,
            output,
        } => run_flags(
            ExperimentRequest::AlignSearch(AlignSearchParams {
                delays: None,
                delays_path: Some(delays),
                delta,
                b_start,
                b_max,
                leakage_tol,
            }),
            0,
            output,
        ),
        Command::AlignSweep {
            channel,
            b_min,
            b_max,
            steps,
            leakage_tol,
            output,
        } => run_flags(
            ExperimentRequest::AlignSweep(AlignSweepParams {
                channel_path: channel,
                b_min,
                b_max,
                steps,
                leakage_tol,
            }),
            0,
            output,
        ),
        Command::AlignPeaks {
            channel,
            delta,
            b_start,
            count,
            b_max,
            leakage_tol,
            constraint,
            output,
        } => run_flags(
            ExperimentRequest::AlignPeaks(AlignPeaksParams {
                channel_path: channel,
                delta,
                b_start,
                count,
                b_max,
                leakage_tol,
                constraint: constraint.into(),
            }),
            0,
            output,
        ),
        Command::KuserOuter {
            channel,
            epsilon,
            constraint,
            output,
        } => run_flags(
            ExperimentRequest::KuserOuter(KuserOuterParams {
                channel_path: channel,
                epsilon,
                constraint: constraint.into(),
            }),
            0,
            output,
        ),
        Command::PairingMc {
            dist,
            k_list,
            epsilon,
            trials,
            seed,
            output,
        } => run_flags(
            ExperimentRequest::PairingMc(PairingMcParams {
                dist,
                k_list,
                epsilon,
                trials,
            }),
            seed,
            output,
        ),
    }
}

/// Config entry point: produces the artifacts, writes them, and records a
/// manifest with content digests next to the primary output.
fn run_config(config_path: &Path) -> Result<()> {
    let started = Instant::now();
    let (config, request) = load_config(config_path)?;
    let base = config_path.parent().map(Path::to_path_buf);
    let produced = produce(&request, config.seed, base.as_deref())?;
    if let Some(w) = &produced.warning {
        eprintln!("warning: {w}");
    }

    let csv_path = resolve_output(&config.output_path);
    write_file(&csv_path, &produced.csv)?;
    let mut outputs = vec![digest_entry(&csv_path, &produced.csv)];
    if let Some(plot) = &produced.plot {
        let plot_path = csv_path.with_extension("plot.json");
        write_file(&plot_path, plot)?;
        outputs.push(digest_entry(&plot_path, plot));
    }

    let manifest = RunManifest {
        tool: format!("wbslope {}", env!("CARGO_PKG_VERSION")),
        experiment: config.experiment.name().into(),
        seed: config.seed,
        duration_ms: started.elapsed().as_millis(),
        config: config.clone(),
        outputs,
    };
    let manifest_text = {
        let mut t = serde_json::to_string_pretty(&manifest)
            .map_err(|e| CliError::Usage(format!("manifest serialization failed: {e}")))?;
        t.push('\n');
        t
    };
    write_file(&csv_path.with_extension("manifest.json"), &manifest_text)
}

/// Flag entry point: same computations, CSV to the given path or stdout,
/// no manifest.
fn run_flags(request: ExperimentRequest, seed: u64, output: Option<PathBuf>) -> Result<()> {
    validate_request(&request)?;
    let produced = produce(&request, seed, None)?;
    if let Some(w) = &produced.warning {
        eprintln!("warning: {w}");
    }
    match output {
        None => {
            print!("{}", produced.csv);
            Ok(())
        }
        Some(path) => write_file(&resolve_output(&path), &produced.csv),
    }
}

fn produce(request: &ExperimentRequest, seed: u64, base: Option<&Path>) -> Result<Produced> {
    match request {
        ExperimentRequest::TwoUserSweep(p) => two_user_sweep(p),
        ExperimentRequest::AlignSearch(p) => align_search(p, base),
        ExperimentRequest::AlignSweep(p) => align_sweep(p, base),
        ExperimentRequest::AlignPeaks(p) => align_peaks(p, base),
        ExperimentRequest::KuserOuter(p) => kuser_outer(p, base),
        ExperimentRequest::PairingMc(p) => pairing_mc(p, seed),
    }
}

fn two_user_sweep(p: &TwoUserSweepParams) -> Result<Produced> {
    let grid = linear_grid(p.a_min, p.a_max, p.steps);
    let mut csv = String::from("a,inner_s0,inner_scheme,outer_s0,exact_flag\n");
    match p.constraint {
        ConstraintKind::EqualPower => {
            let rows = fig2_sweep(&grid)?;
            for r in &rows {
                writeln!(
                    csv,
                    "{},{},{},{},{}",
                    r.a, r.inner_s0, r.inner_scheme, r.outer_s0, r.exact
                )
                .unwrap();
            }
            Ok(Produced {
                csv,
                plot: Some(plotdata::two_user_bounds(&rows).to_json()),
                warning: None,
            })
        }
        ConstraintKind::EqualRate => {
            for &a in &grid {
                let g = TwoUserGains::symmetric(a)?;
                let inner = inner_bound_slope(&g, ConstraintKind::EqualRate);
                let inner_s0 = inner.s0.expect("the best scheme always has a slope");
                let outer = kramer_outer_equal_rate(&g);
                let (outer_cell, exact) = match outer.s0 {
                    Some(s) => (
                        format!("{s}"),
                        (s - inner_s0).abs() <= 1e-12 * s.max(1.0),
                    ),
                    None => (String::new(), false),
                };
                writeln!(
                    csv,
                    "{},{},{},{},{}",
                    a, inner_s0, inner.scheme, outer_cell, exact
                )
                .unwrap();
            }
            Ok(Produced {
                csv,
                plot: None,
                warning: None,
            })
        }
    }
}

fn align_search(p: &AlignSearchParams, base: Option<&Path>) -> Result<Produced> {
    let delays = match (&p.delays, &p.delays_path) {
        (Some(inline), None) => inline.clone(),
        (None, Some(path)) => load_delays(&rebase(path, base))?,
        _ => return Err(CliError::Usage("exactly one delay source required".into())),
    };
    let cfg = alignment_config(p.delta, p.b_start, p.b_max, p.leakage_tol)?;
    let c = search_bandwidth(&delays, &cfg)?;
    let mut csv = String::from("b,residual_max,leakage_total");
    for j in 0..c.leakage.len() {
        write!(csv, ",leakage_rx{}", j + 1).unwrap();
    }
    csv.push('\n');
    write!(
        csv,
        "{},{},{}",
        c.b,
        c.residual_max,
        c.leakage.iter().sum::<f64>()
    )
    .unwrap();
    for v in &c.leakage {
        write!(csv, ",{v}").unwrap();
    }
    csv.push('\n');
    Ok(Produced {
        csv,
        plot: None,
        warning: None,
    })
}

fn align_sweep(p: &AlignSweepParams, base: Option<&Path>) -> Result<Produced> {
    let chan = load_channel(&rebase(&p.channel_path, base))?;
    let grid = linear_grid(p.b_min, p.b_max, p.steps);
    let powers = chan.powers.clone();
    let points = sweep_bandwidth(&chan, &grid, &powers, p.leakage_tol)?;
    let mut csv = String::from("b,ebno_db,spectral_efficiency,leakage_total\n");
    for pt in &points {
        writeln!(
            csv,
            "{},{},{},{}",
            pt.b, pt.ebno_db, pt.spectral_efficiency, pt.leakage_total
        )
        .unwrap();
    }
    Ok(Produced {
        csv,
        plot: Some(plotdata::bandwidth_sweep(&points).to_json()),
        warning: None,
    })
}

fn align_peaks(p: &AlignPeaksParams, base: Option<&Path>) -> Result<Produced> {
    let chan = load_channel(&rebase(&p.channel_path, base))?;
    let cfg = alignment_config(p.delta, p.b_start, p.b_max, p.leakage_tol)?;
    let seq = peak_sequence(&chan, &cfg, p.count)?;

    let mut csv = String::from(
        "row,b,ebno_db,spectral_efficiency,leakage_total,residual_max,s0_measured\n",
    );
    let mut operating_points = Vec::with_capacity(seq.candidates.len());
    for c in &seq.candidates {
        let b = c.b as f64;
        let rates = achievable_rate_with_leakage(&chan, b, &c.leakage)?;
        let efficiency: f64 = rates.iter().sum();
        let snr_total: f64 = chan
            .powers
            .iter()
            .map(|&pw| pw / (b * chan.noise_density))
            .sum();
        let ebno = snr_total / efficiency;
        operating_points.push((ebno, efficiency));
        writeln!(
            csv,
            "candidate,{},{},{},{},{},",
            c.b,
            to_db(ebno),
            efficiency,
            c.leakage.iter().sum::<f64>(),
            c.residual_max
        )
        .unwrap();
    }
    let ebno_min = ebnomin_closed_form(&chan, p.constraint);
    let measured = measured_slope_along(&operating_points, ebno_min);
    let slope_cell = measured.map(|s| format!("{s}")).unwrap_or_default();
    writeln!(csv, "slope,,{},,,,{}", to_db(ebno_min), slope_cell).unwrap();

    let db_points: Vec<(f64, f64)> = operating_points
        .iter()
        .map(|&(e, se)| (to_db(e), se))
        .collect();
    let plot = plotdata::peak_points(&db_points, to_db(ebno_min), measured).to_json();
    Ok(Produced {
        csv,
        plot: Some(plot),
        warning: seq.warning,
    })
}

fn kuser_outer(p: &KuserOuterParams, base: Option<&Path>) -> Result<Produced> {
    let chan = load_channel(&rebase(&p.channel_path, base))?;
    let r = match p.constraint {
        ConstraintKind::EqualRate => equal_rate_outer_sample(&chan, p.epsilon)?,
        ConstraintKind::EqualPower => equal_power_outer_sample(&chan, p.epsilon)?,
    };
    Ok(Produced {
        csv: slope_result_csv(p.constraint, &r),
        plot: None,
        warning: None,
    })
}

fn pairing_mc(p: &PairingMcParams, seed: u64) -> Result<Produced> {
    let dist: GainDist = p
        .dist
        .parse()
        .map_err(|e| CliError::Usage(format!("{e}")))?;
    let mut csv = String::from(
        "K,p_pair,p_pair_ci_lo,p_pair_ci_hi,p_matching,p_matching_ci_lo,p_matching_ci_hi\n",
    );
    for &k in &p.k_list {
        let est = wbslope_core::kuser::monte_carlo_pairing(&dist, k, p.epsilon, p.trials, seed)?;
        writeln!(
            csv,
            "{},{},{},{},{},{},{}",
            est.k,
            est.p_pair,
            est.p_pair_ci.0,
            est.p_pair_ci.1,
            est.p_matching,
            est.p_matching_ci.0,
            est.p_matching_ci.1
        )
        .unwrap();
    }
    Ok(Produced {
        csv,
        plot: None,
        warning: None,
    })
}

/// One-row CSV for a slope bound, optional cells left empty.
fn slope_result_csv(constraint: ConstraintKind, r: &SlopeResult) -> String {
    let delta = r.delta_s0.map(|d| format!("{d}")).unwrap_or_default();
    let err = r
        .error_estimate
        .map(|e| format!("{e}"))
        .unwrap_or_default();
    format!(
        "constraint,ebno_min_db,s0,delta_s0,error_estimate\n{},{},{},{},{}\n",
        constraint, r.ebno_min_db, r.s0, delta, err
    )
}

fn linear_grid(min: f64, max: f64, steps: usize) -> Vec<f64> {
    if steps <= 1 {
        return vec![min];
    }
    (0..steps)
        .map(|i| min + (max - min) * i as f64 / (steps - 1) as f64)
        .collect()
}

fn alignment_config(
    delta: f64,
    b_start: u64,
    b_max: Option<u64>,
    leakage_tol: f64,
) -> Result<AlignmentConfig> {
    let mut cfg = AlignmentConfig::new(delta, b_start)?;
    cfg.b_max = b_max;
    cfg.leakage_tol = leakage_tol;
    cfg.validate()?;
    Ok(cfg)
}

#[derive(serde::Deserialize)]
#[serde(deny_unknown_fields)]
struct DelaysFile {
    delays: Vec<Vec<f64>>,
}

fn load_delays(path: &Path) -> Result<Vec<Vec<f64>>> {
    let text = std::fs::read_to_string(path)
        .map_err(CliError::io(format!("cannot read delays {}", path.display())))?;
    let file: DelaysFile = toml::from_str(&text)
        .map_err(|e| CliError::Usage(format!("delays {}: {e}", path.display())))?;
    Ok(file.delays)
}

fn load_channel(path: &Path) -> Result<ChannelInstance> {
    let text = std::fs::read_to_string(path)
        .map_err(CliError::io(format!("cannot read channel {}", path.display())))?;
    Ok(ChannelInstance::from_toml_str(&text)?)
}

/// Paths inside a config resolve relative to the config file itself.
fn rebase(path: &Path, base: Option<&Path>) -> PathBuf {
    match base {
        Some(dir) if path.is_relative() => dir.join(path),
        _ => path.to_path_buf(),
    }
}

/// Relative output paths honor the output-directory override.
fn resolve_output(path: &Path) -> PathBuf {
    match std::env::var_os(OUTPUT_DIR_VAR) {
        Some(dir) if path.is_relative() => PathBuf::from(dir).join(path),
        _ => path.to_path_buf(),
    }
}

fn write_file(path: &Path, content: &str) -> Result<()> {
    if let Some(parent) = path.parent() {
        if !parent.as_os_str().is_empty() {
            std::fs::create_dir_all(parent).map_err(CliError::io(format!(
                "cannot create {}",
                parent.display()
            )))?;
        }
    }
    std::fs::write(path, content)
        .map_err(CliError::io(format!("cannot write {}", path.display())))
}

fn digest_entry(path: &Path, content: &str) -> ArtifactDigest {
    let mut hasher = Sha256::new();
    hasher.update(content.as_bytes());
    let sha256 = hasher
        .finalize()
        .iter()
        .map(|b| format!("{b:02x}"))
        .collect::<String>();
    ArtifactDigest {
        path: path.display().to_string(),
        bytes: content.len(),
        sha256,
    }
}
