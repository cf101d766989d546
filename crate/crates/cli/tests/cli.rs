use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use entcont::random::{random_separable_state, rng_from_seed};
use entcont::state_file::write_state;
use entcont::states::{phi_plus_state, werner};
use entcont::DensityMatrix;

fn scratch(name: &str) -> PathBuf {
    let dir = PathBuf::from(env!("CARGO_TARGET_TMPDIR")).join("cli").join(name);
    std::fs::create_dir_all(&dir).unwrap();
    dir
}

fn state_file(dir: &Path, name: &str, rho: &DensityMatrix) -> PathBuf {
    let path = dir.join(name);
    write_state(&path, rho).unwrap();
    path
}

fn entcont(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_entcont")).args(args).output().expect("binary runs")
}

fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).unwrap()
}

fn json(out: &Output) -> serde_json::Value {
    serde_json::from_slice(&out.stdout).expect("JSON output")
}

/// Data rows of a CSV output, header included, comments dropped.
fn csv_rows(text: &str) -> Vec<Vec<String>> {
    text.lines().filter(|l| !l.starts_with('#')).map(|l| l.split(',').map(str::to_string).collect()).collect()
}

#[test]
fn measure_on_phi_plus() {
    let dir = scratch("measure");
    let phi = state_file(&dir, "phi.json", &phi_plus_state());
    let out = entcont(&["--format", "json", "measure", phi.to_str().unwrap(), "log-negativity"]);
    assert_eq!(out.status.code(), Some(0));
    let doc = json(&out);
    assert!((doc["result"]["value"].as_f64().unwrap() - 1.0).abs() < 1e-10);
    assert_eq!(doc["result"]["kind"], "exact");
    assert_eq!(doc["result"]["method"], "log_negativity");
    assert_eq!(doc["seed"], 0);
    assert_eq!(doc["invocation"][0], "--format");

    let out = entcont(&["measure", phi.to_str().unwrap(), "entropy-of-entanglement"]);
    let rows = csv_rows(&stdout(&out));
    assert_eq!(rows[0], ["value", "kind", "method"]);
    assert!((rows[1][0].parse::<f64>().unwrap() - 1.0).abs() < 1e-10);
}

#[test]
fn measure_on_separable_state_and_bad_input() {
    let dir = scratch("measure-sep");
    let sep = state_file(&dir, "sep.json", &random_separable_state(2, 2, 3, &mut rng_from_seed(1)));
    let out = entcont(&["--format", "json", "measure", sep.to_str().unwrap(), "eof2x2"]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(json(&out)["result"]["value"].as_f64().unwrap(), 0.0);

    let bad = dir.join("bad.json");
    std::fs::write(&bad, "{\"dim_a\": 2, \"dim_b\": 2, \"entries\": [[1]]").unwrap();
    assert_eq!(entcont(&["measure", bad.to_str().unwrap(), "eof2x2"]).status.code(), Some(2));

    // Hermitian but with trace 2: rejected unless forced
    let doubled = DensityMatrix::new_unchecked(2, 2, phi_plus_state().matrix().scale(2.0));
    let path = state_file(&dir, "doubled.json", &doubled);
    let out = entcont(&["measure", path.to_str().unwrap(), "log-negativity"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("trace"));
    assert_eq!(entcont(&["measure", path.to_str().unwrap(), "log-negativity", "--force"]).status.code(), Some(0));

    let qutrits = state_file(&dir, "q.json", &DensityMatrix::maximally_mixed(3, 3));
    assert_eq!(entcont(&["measure", qutrits.to_str().unwrap(), "concurrence"]).status.code(), Some(2));
}

#[test]
fn mixing_verify_exit_codes() {
    let dir = scratch("mixing");
    let rho = state_file(&dir, "rho.json", &phi_plus_state());
    let sigma = state_file(&dir, "sigma.json", &DensityMatrix::maximally_mixed(2, 2));
    let (r, s) = (rho.to_str().unwrap(), sigma.to_str().unwrap());

    let out = entcont(&["--format", "json", "mixing-verify", r, s, "--p", "0.5", "--n", "4", "--half-width", "0"]);
    assert_eq!(out.status.code(), Some(0));
    let doc = json(&out);
    assert!(doc["result"]["trace_distance"].as_f64().unwrap() <= 0.625);
    assert_eq!(doc["result"]["pass"], true);

    let out = entcont(&["--format", "json", "mixing-verify", r, s, "--p", "0.3", "--n", "3", "--half-width", "10"]);
    assert!(json(&out)["result"]["trace_distance"].as_f64().unwrap() <= 1e-10);

    let out = entcont(&["mixing-verify", r, s, "--p", "0.5", "--n", "10"]);
    assert_eq!(out.status.code(), Some(3));

    // a zero tolerance still passes; the bound has genuine room here
    let out = entcont(&["--tolerance", "0", "mixing-verify", r, s, "--p", "0.5", "--n", "4", "--half-width", "0"]);
    assert_eq!(out.status.code(), Some(0));
}

#[test]
fn ball_scan_outputs_and_certification() {
    let dir = scratch("ball");
    let center = state_file(&dir, "center.json", &werner(0.95).unwrap());
    let c = center.to_str().unwrap();
    let stem = dir.join("scan");
    let out = entcont(&[
        "--seed",
        "5",
        "--out",
        stem.to_str().unwrap(),
        "ball-scan",
        c,
        "--epsilon",
        "1e-3",
        "--samples",
        "30",
        "--p-points",
        "5",
    ]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let csv = std::fs::read_to_string(dir.join("scan.csv")).unwrap();
    assert!(csv.starts_with("# entcont --seed 5 --out"));
    assert!(csv.contains("# seed: 5"));
    let rows = csv_rows(&csv);
    assert_eq!(rows.len(), 1 + 4 * 5);
    assert!(rows[1..].iter().all(|r| r.last().unwrap() == "true"));
    let samples = csv_rows(&std::fs::read_to_string(dir.join("scan.samples.csv")).unwrap());
    assert_eq!(samples.len(), 1 + 34);
    let doc: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(dir.join("scan.json")).unwrap()).unwrap();
    assert_eq!(doc["seed"], 5);
    assert_eq!(doc["result"]["constants"]["ed_method"], "hashing_after_twirl");
    assert_eq!(doc["result"]["constants"]["mode"], "sampled");

    let out = entcont(&["ball-scan", c, "--epsilon", "0.5", "--samples", "20"]);
    assert_eq!(out.status.code(), Some(4));
    assert!(String::from_utf8_lossy(&out.stderr).contains("sample"));

    assert_eq!(entcont(&["ball-scan", c, "--epsilon", "1e-3", "--samples", "0"]).status.code(), Some(2));
    let sep = state_file(&dir, "sep.json", &werner(0.2).unwrap());
    assert_eq!(entcont(&["ball-scan", sep.to_str().unwrap(), "--epsilon", "1e-3"]).status.code(), Some(4));
}

#[test]
fn border_scans() {
    let out = entcont(&["border-scan", "--system", "2x2", "--family", "werner", "--grid", "200"]);
    assert_eq!(out.status.code(), Some(0));
    let rows = csv_rows(&stdout(&out));
    assert_eq!(rows[0], ["param", "eof", "log_neg", "ppt_margin"]);
    for row in &rows[1..] {
        let v: Vec<f64> = row.iter().map(|x| x.parse().unwrap()).collect();
        assert_eq!(v[0] <= 1.0 / 3.0, v[1] == 0.0 && v[2] == 0.0, "{row:?}");
    }

    let out = entcont(&["border-scan", "--system", "2x3", "--family", "isotropic", "--grid", "41"]);
    for row in &csv_rows(&stdout(&out))[1..] {
        let (log_neg, margin): (f64, f64) = (row[1].parse().unwrap(), row[2].parse().unwrap());
        assert_eq!(log_neg == 0.0, margin >= -1e-9);
    }

    assert_eq!(
        entcont(&["border-scan", "--system", "2x2", "--family", "werner", "--grid", "0"]).status.code(),
        Some(2)
    );
    assert_eq!(entcont(&["border-scan", "--system", "2x3", "--family", "werner"]).status.code(), Some(2));
    assert_eq!(entcont(&["border-scan", "--system", "2x2", "--family", "segment"]).status.code(), Some(2));
}

#[test]
fn border_scan_along_a_segment() {
    let dir = scratch("segment");
    let from = state_file(&dir, "from.json", &DensityMatrix::maximally_mixed(2, 2));
    let to = state_file(&dir, "to.json", &phi_plus_state());
    let out = entcont(&[
        "border-scan",
        "--system",
        "2x2",
        "--family",
        "segment",
        "--from",
        from.to_str().unwrap(),
        "--to",
        to.to_str().unwrap(),
        "--grid",
        "4",
    ]);
    assert_eq!(out.status.code(), Some(0));
    let rows = csv_rows(&stdout(&out));
    assert_eq!(rows.len(), 5);
    assert_eq!(rows[4][1].parse::<f64>().unwrap().round(), 1.0);
}

#[test]
fn protocol_commands() {
    let out = entcont(&["--format", "json", "concentration", "--lambda", "0.5,0.5", "--n", "2,65536"]);
    let doc = json(&out);
    let points = doc["result"]["points"].as_array().unwrap();
    assert!((points[0]["yield_per_copy"].as_f64().unwrap() - 0.25).abs() < 1e-12);
    assert!((0.98..=1.0).contains(&points[1]["yield_per_copy"].as_f64().unwrap()));
    assert_eq!(entcont(&["concentration", "--lambda", "0.5,0.6", "--n", "4"]).status.code(), Some(2));

    let out = entcont(&["--format", "json", "eta-scan"]);
    let rows = json(&out)["result"]["rows"].as_array().unwrap().clone();
    assert_eq!(rows.len(), 20);
    assert!(rows.windows(2).all(|w| w[1]["certified_yield"].as_f64() <= w[0]["certified_yield"].as_f64()));

    let out = entcont(&["--format", "json", "catalytic", "--delta", "0.1", "--ec", "0.5", "--ed", "0.25"]);
    let doc = json(&out);
    assert!((doc["result"]["factor"].as_f64().unwrap() - 0.8).abs() < 1e-12);
    assert!((doc["result"]["k"].as_f64().unwrap() + 2.0).abs() < 1e-12);
    assert_eq!(entcont(&["catalytic", "--delta", "0", "--ec", "1", "--ed", "1"]).status.code(), Some(2));
}

#[test]
fn tail_scan_reports_hoeffding_column() {
    let out = entcont(&["tail-scan", "--p", "0.5", "--n", "10,100,1000"]);
    assert_eq!(out.status.code(), Some(0));
    let rows = csv_rows(&stdout(&out));
    assert_eq!(rows[0], ["n", "window_lo", "window_hi", "tail_mass", "hoeffding_bound"]);
    assert_eq!(rows.len(), 4);
}

#[test]
fn out_file_is_written_whole() {
    let dir = scratch("out");
    let path = dir.join("werner.csv");
    let out = entcont(&["--out", path.to_str().unwrap(), "border-scan", "--system", "2x2", "--family", "werner"]);
    assert_eq!(out.status.code(), Some(0));
    assert!(out.stdout.is_empty());
    let text = std::fs::read_to_string(&path).unwrap();
    assert_eq!(csv_rows(&text).len(), 201);
    let leftovers: Vec<_> = std::fs::read_dir(&dir)
        .unwrap()
        .filter_map(|e| e.ok())
        .filter(|e| e.file_name().to_string_lossy().contains(".tmp-"))
        .collect();
    assert!(leftovers.is_empty());
}
