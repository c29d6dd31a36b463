//! End-to-end tests of the `wbslope` binary: exit codes, determinism,
//! manifest digests, and output routing.

use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use sha2::{Digest, Sha256};
use tempfile::tempdir;

fn wbslope() -> Command {
    Command::new(env!("CARGO_BIN_EXE_wbslope"))
}

fn sha256_hex(bytes: &[u8]) -> String {
    let mut h = Sha256::new();
    h.update(bytes);
    h.finalize().iter().map(|b| format!("{b:02x}")).collect()
}

fn assert_exit(output: &Output, code: i32) {
    assert_eq!(
        output.status.code(),
        Some(code),
        "stdout: {}\nstderr: {}",
        String::from_utf8_lossy(&output.stdout),
        String::from_utf8_lossy(&output.stderr)
    );
}

fn write_two_user_channel(dir: &Path) -> std::path::PathBuf {
    let path = dir.join("chan.toml");
    fs::write(
        &path,
        "k = 2\n\
         gains_re = [[1.0, 0.8], [0.8, 1.0]]\n\
         gains_im = [[0.0, 0.0], [0.0, 0.0]]\n\
         delays = [[0.0, 0.3], [0.7, 0.0]]\n\
         noise_density = 1.0\n\
         powers = [1.0, 1.0]\n",
    )
    .unwrap();
    path
}

#[test]
fn run_is_reproducible_and_manifest_digests_are_real() {
    let work = tempdir().unwrap();
    let config_path = work.path().join("exp.toml");
    fs::write(
        &config_path,
        "experiment = \"two-user-sweep\"\n\
         output_path = \"fig.csv\"\n\
         seed = 3\n\n\
         [parameters]\n\
         a_min = 0.05\n\
         a_max = 2.0\n\
         steps = 40\n",
    )
    .unwrap();

    let out_a = tempdir().unwrap();
    let out_b = tempdir().unwrap();
    for dir in [out_a.path(), out_b.path()] {
        let output = wbslope()
            .arg("run")
            .arg(&config_path)
            .env("WBSLOPE_OUTPUT_DIR", dir)
            .output()
            .unwrap();
        assert_exit(&output, 0);
    }

    let csv_a = fs::read(out_a.path().join("fig.csv")).unwrap();
    let csv_b = fs::read(out_b.path().join("fig.csv")).unwrap();
    assert_eq!(csv_a, csv_b, "same config must give byte-identical CSV");
    let plot_a = fs::read(out_a.path().join("fig.plot.json")).unwrap();
    let plot_b = fs::read(out_b.path().join("fig.plot.json")).unwrap();
    assert_eq!(plot_a, plot_b);

    let manifest: serde_json::Value =
        serde_json::from_slice(&fs::read(out_a.path().join("fig.manifest.json")).unwrap())
            .unwrap();
    assert_eq!(manifest["experiment"], "two-user-sweep");
    assert_eq!(manifest["seed"], 3);
    assert_eq!(manifest["config"]["parameters"]["steps"], 40);
    let outputs = manifest["outputs"].as_array().unwrap();
    assert_eq!(outputs.len(), 2);
    for entry in outputs {
        let path = entry["path"].as_str().unwrap();
        let bytes = fs::read(path).unwrap();
        assert_eq!(entry["bytes"].as_u64().unwrap(), bytes.len() as u64);
        assert_eq!(entry["sha256"].as_str().unwrap(), sha256_hex(&bytes));
    }
}

#[test]
fn flag_output_file_matches_stdout() {
    let work = tempdir().unwrap();
    let args = [
        "two-user-sweep",
        "--a-min",
        "0.1",
        "--a-max",
        "1.5",
        "--steps",
        "8",
    ];
    let stdout_run = wbslope().args(args).output().unwrap();
    assert_exit(&stdout_run, 0);

    let file = work.path().join("sweep.csv");
    let file_run = wbslope()
        .args(args)
        .arg("--output")
        .arg(&file)
        .output()
        .unwrap();
    assert_exit(&file_run, 0);
    assert!(file_run.stdout.is_empty());
    assert_eq!(fs::read(&file).unwrap(), stdout_run.stdout);

    let text = String::from_utf8(stdout_run.stdout).unwrap();
    assert!(text.starts_with("a,inner_s0,inner_scheme,outer_s0,exact_flag\n"));
    assert_eq!(text.lines().count(), 9, "header plus one row per grid point");
}

#[test]
fn output_dir_override_applies_to_flag_outputs() {
    let work = tempdir().unwrap();
    let output = wbslope()
        .args(["two-user-sweep", "--steps", "3", "--output", "nested/dir/s.csv"])
        .env("WBSLOPE_OUTPUT_DIR", work.path())
        .output()
        .unwrap();
    assert_exit(&output, 0);
    assert!(work.path().join("nested/dir/s.csv").exists());
}

#[test]
fn usage_problems_exit_two() {
    let work = tempdir().unwrap();

    let unknown = wbslope().arg("no-such-command").output().unwrap();
    assert_exit(&unknown, 2);

    let bad_flag = wbslope()
        .args(["two-user-sweep", "--frobnicate"])
        .output()
        .unwrap();
    assert_exit(&bad_flag, 2);

    let bad_range = wbslope()
        .args(["two-user-sweep", "--a-min", "0.5", "--a-max", "0.1"])
        .output()
        .unwrap();
    assert_exit(&bad_range, 2);

    let chan = write_two_user_channel(work.path());
    let bad_delta = wbslope()
        .arg("align-peaks")
        .arg("--channel")
        .arg(&chan)
        .args(["--delta", "1.5", "--count", "3"])
        .output()
        .unwrap();
    assert_exit(&bad_delta, 2);

    // Config problems: unreadable, unknown keys, missing parameters.
    let missing = wbslope()
        .arg("run")
        .arg(work.path().join("absent.toml"))
        .output()
        .unwrap();
    assert_exit(&missing, 2);

    let config = work.path().join("bad.toml");
    fs::write(
        &config,
        "experiment = \"pairing-mc\"\noutput_path = \"x.csv\"\nseed = 1\nsurprise = true\n",
    )
    .unwrap();
    let unknown_key = wbslope().arg("run").arg(&config).output().unwrap();
    assert_exit(&unknown_key, 2);

    fs::write(
        &config,
        "experiment = \"pairing-mc\"\noutput_path = \"x.csv\"\nseed = 1\n\n\
         [parameters]\ndist = \"exp\"\nk_list = [3]\nepsilon = 0.5\ntrials = 10\n",
    )
    .unwrap();
    let odd_k = wbslope().arg("run").arg(&config).output().unwrap();
    assert_exit(&odd_k, 2);
}

#[test]
fn module_failures_exit_one() {
    let work = tempdir().unwrap();
    let chan3 = work.path().join("chan3.toml");
    fs::write(
        &chan3,
        "k = 3\n\
         gains_re = [[1.0, 0.5, 0.5], [0.5, 1.0, 0.5], [0.5, 0.5, 1.0]]\n\
         gains_im = [[0.0, 0.0, 0.0], [0.0, 0.0, 0.0], [0.0, 0.0, 0.0]]\n\
         delays = [[0.0, 0.3, 0.4], [0.3, 0.0, 0.5], [0.4, 0.5, 0.0]]\n\
         noise_density = 1.0\n\
         powers = [1.0, 1.0, 1.0]\n",
    )
    .unwrap();

    // The pairing bound needs an even user count.
    let odd = wbslope()
        .arg("kuser-outer")
        .arg("--channel")
        .arg(&chan3)
        .args(["--epsilon", "0.4", "--constraint", "equal-power"])
        .output()
        .unwrap();
    assert_exit(&odd, 1);
    assert!(String::from_utf8_lossy(&odd.stderr).starts_with("error: "));

    let gone = wbslope()
        .arg("kuser-outer")
        .arg("--channel")
        .arg(work.path().join("gone.toml"))
        .args(["--epsilon", "0.4", "--constraint", "equal-power"])
        .output()
        .unwrap();
    assert_exit(&gone, 1);
}

#[test]
fn pairing_runs_are_seeded_not_ambient() {
    let base = [
        "pairing-mc",
        "--dist",
        "exp",
        "--k-list",
        "6",
        "--epsilon",
        "0.6",
        "--trials",
        "300",
    ];
    let first = wbslope().args(base).args(["--seed", "11"]).output().unwrap();
    let again = wbslope().args(base).args(["--seed", "11"]).output().unwrap();
    let other = wbslope().args(base).args(["--seed", "12"]).output().unwrap();
    assert_exit(&first, 0);
    assert_eq!(first.stdout, again.stdout, "same seed, same estimates");
    assert_ne!(first.stdout, other.stdout, "the seed must actually matter");
}

#[test]
fn align_search_accepts_inline_and_file_delays() {
    let work = tempdir().unwrap();
    let delays = work.path().join("delays.toml");
    fs::write(&delays, "delays = [[0.0, 0.3], [0.7, 0.0]]\n").unwrap();
    let from_file = wbslope()
        .arg("align-search")
        .arg("--delays")
        .arg(&delays)
        .args(["--delta", "0.2"])
        .output()
        .unwrap();
    assert_exit(&from_file, 0);
    let text = String::from_utf8(from_file.stdout).unwrap();
    let row = text.lines().nth(1).unwrap();
    assert!(
        row.starts_with("10,0,"),
        "delays 0.3 and 0.7 align exactly at b = 10, got {row}"
    );

    let config = work.path().join("search.toml");
    fs::write(
        &config,
        "experiment = \"align-search\"\noutput_path = \"b.csv\"\nseed = 0\n\n\
         [parameters]\ndelays = [[0.0, 0.3], [0.7, 0.0]]\ndelta = 0.2\n",
    )
    .unwrap();
    let inline = wbslope()
        .arg("run")
        .arg(&config)
        .env("WBSLOPE_OUTPUT_DIR", work.path())
        .output()
        .unwrap();
    assert_exit(&inline, 0);
    let written = fs::read_to_string(work.path().join("b.csv")).unwrap();
    assert_eq!(written, text);
}

#[test]
fn channel_paths_resolve_relative_to_the_config_file() {
    let work = tempdir().unwrap();
    write_two_user_channel(work.path());
    let config = work.path().join("outer.toml");
    fs::write(
        &config,
        "experiment = \"kuser-outer\"\noutput_path = \"outer.csv\"\nseed = 0\n\n\
         [parameters]\nchannel_path = \"chan.toml\"\nepsilon = 0.4\nconstraint = \"equal-power\"\n",
    )
    .unwrap();

    // Run from a different working directory; the relative channel path must
    // still resolve against the config's own directory.
    let out = tempdir().unwrap();
    let output = wbslope()
        .arg("run")
        .arg(&config)
        .current_dir(out.path())
        .env("WBSLOPE_OUTPUT_DIR", out.path())
        .output()
        .unwrap();
    assert_exit(&output, 0);
    let csv = fs::read_to_string(out.path().join("outer.csv")).unwrap();
    let row = csv.lines().nth(1).unwrap();
    assert!(
        row.starts_with("equal-power,-1.591745389548616,2.5,0.625,"),
        "pair priced at ratio 0.6 gives s0 = 8/3.2, got {row}"
    );
}
