use std::path::Path;
use std::process::{Command, Output};

use chanapprox::cli::ResultRecord;

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_chanapprox")).args(args).output().expect("binary runs")
}

fn stdout(args: &[&str]) -> String {
    let out = run(args);
    assert!(out.status.success(), "{args:?}: {}", String::from_utf8_lossy(&out.stderr));
    String::from_utf8(out.stdout).unwrap()
}

fn record(args: &[&str]) -> ResultRecord {
    serde_json::from_str(&stdout(args)).unwrap()
}

fn csv(text: &str) -> (Vec<String>, Vec<Vec<f64>>) {
    let mut lines = text.lines();
    let header = lines.next().unwrap().split(',').map(str::to_string).collect();
    let rows = lines.map(|l| l.split(',').map(|c| c.parse().unwrap()).collect()).collect();
    (header, rows)
}

fn col(header: &[String], name: &str) -> usize {
    header.iter().position(|h| h == name).unwrap()
}

const IDENTITY: &str = r#"{"kind":"pauli","p":[1,0,0,0]}"#;
const PHASE_Z: &str = r#"{"kind":"pauli","p":[0,0,0,1]}"#;

#[test]
fn diamond_examples() {
    let r = record(&["diamond", r#"{"kind":"unitary","alpha":0,"beta":0,"delta":0}"#, IDENTITY]);
    assert!(r.distance.abs() < 1e-6);
    let r = record(&["diamond", r#"{"kind":"unitary","alpha":0,"beta":0.5235987755982988,"delta":0}"#, IDENTITY]);
    assert!((r.distance - 1.0).abs() < 1e-6);
    assert!((r.quantities["discrimination_probability"] - 0.75).abs() < 1e-6);
    assert!(r.gap <= 1e-7);
    assert_eq!(r.convention, chanapprox::cli::CONVENTION);
    let r = record(&["diamond", r#"{"kind":"damping","q":1,"gamma":0.5}"#, r#"{"kind":"pauli","p":[0.75,0.125,0.125,0]}"#]);
    let (lo, hi) = chanapprox::approx::damping_bounds(1.0, 0.5).unwrap();
    assert!(lo - 1e-7 <= r.distance && r.distance <= hi + 1e-7);
}

#[test]
fn approx_examples() {
    let target = r#"{"kind":"unitary","alpha":0,"beta":0.5235987755982988,"delta":0}"#;
    let r = record(&["approx", target, IDENTITY, PHASE_Z]);
    assert!((r.distance - 3f64.sqrt() / 2.0).abs() < 1e-5);
    assert!((r.weights.as_ref().unwrap()[0] - 0.75).abs() < 1e-3);
    assert!(r.bounds["lower_bound_choi"] <= r.distance + 1e-7);
    assert!(r.distance <= r.bounds["upper_bound_single"] + 1e-7);

    let pauli_set = r#"[{"kind":"pauli","p":[1,0,0,0]},{"kind":"pauli","p":[0,1,0,0]},{"kind":"pauli","p":[0,0,1,0]},{"kind":"pauli","p":[0,0,0,1]}]"#;
    let q = std::f64::consts::FRAC_PI_4.to_string();
    let worst = format!(r#"{{"kind":"unitary","alpha":{q},"beta":{q},"delta":{q}}}"#);
    let r = record(&["approx", &worst, pauli_set]);
    assert!((r.distance - 1.5).abs() < 1e-4);
    assert!(r.weights.unwrap().iter().all(|w| (w - 0.25).abs() < 1e-3));

    let single = record(&["approx", target, IDENTITY]);
    let direct = record(&["diamond", target, IDENTITY]);
    assert!((single.distance - direct.distance).abs() < 2e-7);
}

#[test]
fn csv_output_for_single_records() {
    let text = stdout(&["diamond", "--format", "csv", IDENTITY, PHASE_Z]);
    let (header, rows) = csv(&text);
    assert_eq!(header[0], "distance");
    assert!((rows[0][0] - 2.0).abs() < 1e-6);
}

#[test]
fn fig1_rows_and_determinism() {
    let a = stdout(&["fig1", "--grid", "11"]);
    let b = stdout(&["fig1", "--grid", "11"]);
    let c = stdout(&["fig1", "--grid", "11", "--parallel"]);
    assert_eq!(a, b);
    assert_eq!(a, c);
    let (h, rows) = csv(&a);
    assert_eq!(h, ["x", "D_C_analytic", "p_opt", "D_C_sdp", "p_sdp", "gap"]);
    assert_eq!(rows.len(), 11);
    assert_eq!(&rows[0][..3], &[0.0, 0.0, 0.0]);
    assert!(rows[0][3].abs() < 1e-6);
    let last = &rows[10];
    assert_eq!(last[0], 2.0);
    assert!((last[1] - 4.0 / 3.0).abs() < 1e-9 && last[2] == 1.0);
    for r in &rows {
        assert!((r[1] - r[3]).abs() < 1e-5 && r[5] <= 1e-7);
    }
}

#[test]
fn fig1_matches_golden_file() {
    let golden = std::fs::read_to_string(Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/golden/fig1_grid5.csv")).unwrap();
    let fresh = stdout(&["fig1", "--grid", "5"]);
    let (gh, grows) = csv(&golden);
    let (fh, frows) = csv(&fresh);
    assert_eq!(gh, fh);
    // closed-form columns are reproduced digit for digit, solver columns to their tolerance
    let exact = |t: &str| -> Vec<String> {
        t.lines().skip(1).map(|l| l.split(',').take(3).collect::<Vec<_>>().join(",")).collect()
    };
    assert_eq!(exact(&golden), exact(&fresh));
    for (g, f) in grows.iter().zip(&frows) {
        assert!((g[3] - f[3]).abs() < 1e-6 && (g[4] - f[4]).abs() < 1e-4);
    }
}

#[test]
fn fig2_anchors_and_symmetry() {
    let (h, rows) = csv(&stdout(&["fig2", "--grid", "5x5"]));
    let d = col(&h, "D_P");
    assert!(rows[0][d].abs() < 1e-6, "identity row {:?}", rows[0]);
    for i in 0..5 {
        for j in 0..5 {
            let (a, b) = (rows[i * 5 + j][d], rows[i * 5 + 4 - j][d]);
            assert!((a - b).abs() <= 2e-7, "beta mirror at ({i},{j}): {a} vs {b}");
        }
    }
    let q = std::f64::consts::FRAC_PI_4.to_string();
    let (_, rows) = csv(&stdout(&["fig2", "--grid", "3x3", "--delta", &q]));
    assert!((rows[4][d] - 1.5).abs() < 1e-4, "{:?}", rows[4]);
}

#[test]
fn fig3_and_fig4_respect_bounds() {
    let (h, rows) = csv(&stdout(&["fig3", "--grid", "5x3"]));
    let (q, g, d, lo, hi) = (col(&h, "q"), col(&h, "gamma"), col(&h, "D_P"), col(&h, "lower"), col(&h, "upper"));
    assert_eq!(rows.len(), 15);
    for (i, r) in rows.iter().enumerate() {
        if r[g] == 0.0 {
            assert!(r[d].abs() < 1e-6);
        }
        assert!(r[lo] - 2e-7 <= r[d] && r[d] <= r[hi] + 2e-7);
        let mirror = &rows[(4 - i / 3) * 3 + i % 3];
        assert!((mirror[q] - (1.0 - r[q])).abs() < 1e-12 && (mirror[d] - r[d]).abs() <= 2e-7);
    }

    let (h, rows) = csv(&stdout(&["fig4", "--grid", "21"]));
    let (d, lo, hi) = (col(&h, "D_P"), col(&h, "lower"), col(&h, "upper"));
    for w in rows.windows(2) {
        assert!(w[0][hi] - w[0][lo] <= w[1][hi] - w[1][lo] + 1e-12, "bound gap not monotone: {w:?}");
    }
    assert!(rows.iter().all(|r| r[lo] - 2e-7 <= r[d] && r[d] <= r[hi] + 2e-7));
}

#[test]
fn json_sweep_has_one_record_per_point() {
    let text = stdout(&["fig4", "--grid", "3", "--format", "json"]);
    let recs: Vec<ResultRecord> = serde_json::from_str(&text).unwrap();
    assert_eq!(recs.len(), 3);
    assert!(recs.iter().all(|r| r.command == "fig4" && r.bounds.contains_key("lower") && r.weights.is_some()));
}

#[test]
fn specs_from_files_and_output_files() {
    let dir = tempfile::tempdir().unwrap();
    let spec = dir.path().join("target.json");
    std::fs::write(&spec, r#"{"kind":"damping","q":0.7,"gamma":0.5}"#).unwrap();
    let out = dir.path().join("r.json");
    let status = run(&["diamond", spec.to_str().unwrap(), IDENTITY, "--out", out.to_str().unwrap()]);
    assert!(status.status.success());
    assert!(status.stdout.is_empty());
    let r: ResultRecord = serde_json::from_str(&std::fs::read_to_string(out).unwrap()).unwrap();
    assert!(r.distance > 0.0);
}

#[test]
fn exit_codes_for_bad_input() {
    assert_eq!(run(&["diamond", "{not json", IDENTITY]).status.code(), Some(2));
    assert_eq!(run(&["diamond", r#"{"kind":"pauli","p":[0.6,0.6,0,0]}"#, IDENTITY]).status.code(), Some(2));
    assert_eq!(run(&["diamond", "/nonexistent/spec.json", IDENTITY]).status.code(), Some(2));
    assert_eq!(run(&["fig1", "--grid", "1"]).status.code(), Some(2));
    assert_eq!(run(&["fig1", "--grid", "3x3"]).status.code(), Some(2));
    assert_eq!(run(&["fig1", "--tol", "1e-12"]).status.code(), Some(2));
    assert_eq!(run(&["fig4", "--q", "1.5", "--grid", "3"]).status.code(), Some(2));
    assert_eq!(run(&["bogus"]).status.code(), Some(2));
}
