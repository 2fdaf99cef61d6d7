//! End-to-end tests of the compiled binary: artifact formats, config
//! precedence, and the documented exit-code classes.

use std::fs;
use std::path::Path;
use std::process::{Command, Output};

fn bin() -> &'static str {
    env!("CARGO_BIN_EXE_touchbench")
}

fn run_in(dir: &Path, args: &[&str]) -> Output {
    Command::new(bin())
        .args(args)
        .current_dir(dir)
        .output()
        .expect("binary runs")
}

fn run_ok(dir: &Path, args: &[&str]) {
    let out = run_in(dir, args);
    assert!(
        out.status.success(),
        "{args:?} exited {:?}: {}",
        out.status.code(),
        String::from_utf8_lossy(&out.stderr)
    );
}

fn synth_features(dir: &Path) {
    run_ok(dir, &["synth", "--users", "3", "--strokes", "30", "--seed", "5", "--out", "raw.csv"]);
    run_ok(dir, &["extract", "--input", "raw.csv", "--out", "features.csv"]);
}

#[test]
fn usage_error_exits_2() {
    let dir = tempfile::tempdir().unwrap();
    let out = run_in(dir.path(), &["no-such-subcommand"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn missing_input_file_exits_3() {
    let dir = tempfile::tempdir().unwrap();
    let out = run_in(dir.path(), &["extract", "--input", "absent.csv", "--out", "f.csv"]);
    assert_eq!(out.status.code(), Some(3));
    let stderr = String::from_utf8_lossy(&out.stderr);
    assert!(stderr.contains("absent.csv"), "{stderr}");
}

#[test]
fn empty_raw_file_exits_3_and_names_the_file() {
    let dir = tempfile::tempdir().unwrap();
    fs::write(dir.path().join("empty.csv"), "").unwrap();
    let out = run_in(dir.path(), &["extract", "--input", "empty.csv", "--out", "f.csv"]);
    assert_eq!(out.status.code(), Some(3));
    assert!(String::from_utf8_lossy(&out.stderr).contains("empty.csv"));
}

#[test]
fn unknown_config_key_exits_3() {
    let dir = tempfile::tempdir().unwrap();
    fs::write(dir.path().join("cfg.txt"), "users=2\nbogus_key=1\n").unwrap();
    let out = run_in(dir.path(), &["synth", "--config", "cfg.txt"]);
    assert_eq!(out.status.code(), Some(3));
    assert!(String::from_utf8_lossy(&out.stderr).contains("bogus_key"));
}

#[test]
fn invalid_user_count_exits_3() {
    let dir = tempfile::tempdir().unwrap();
    let out = run_in(dir.path(), &["synth", "--users", "1"]);
    assert_eq!(out.status.code(), Some(3));
}

#[test]
fn flag_overrides_config_file() {
    let dir = tempfile::tempdir().unwrap();
    fs::write(dir.path().join("cfg.txt"), "users=2\nstrokes=4\nseed=1\nout=a.csv\n").unwrap();
    run_ok(dir.path(), &["synth", "--config", "cfg.txt", "--users", "4"]);
    let text = fs::read_to_string(dir.path().join("a.csv")).unwrap();
    // resolved config echoed as comments reflects the flag value
    assert!(text.contains("# cfg users=4"), "{text}");
    assert!(text.contains("# cfg strokes=4"));
}

#[test]
fn synth_artifact_embeds_resolved_config_and_is_deterministic() {
    let dir = tempfile::tempdir().unwrap();
    run_ok(dir.path(), &["synth", "--users", "2", "--strokes", "5", "--seed", "9", "--out", "a.csv"]);
    run_ok(dir.path(), &["synth", "--users", "2", "--strokes", "5", "--seed", "9", "--out", "b.csv"]);
    let a = fs::read_to_string(dir.path().join("a.csv")).unwrap();
    let b = fs::read_to_string(dir.path().join("b.csv")).unwrap();
    assert!(a.contains("# cfg seed=9"));
    assert_eq!(
        a.replace("out=a.csv", "out=?"),
        b.replace("out=b.csv", "out=?")
    );
}

#[test]
fn extract_row_count_matches_accepted_strokes() {
    let dir = tempfile::tempdir().unwrap();
    run_ok(dir.path(), &["synth", "--users", "2", "--strokes", "5", "--seed", "3", "--out", "raw.csv"]);
    let out = run_in(dir.path(), &["extract", "--input", "raw.csv", "--out", "features.csv"]);
    assert!(out.status.success());
    let stdout = String::from_utf8_lossy(&out.stdout);
    assert!(stdout.contains("10 strokes"), "{stdout}");
    let features = fs::read_to_string(dir.path().join("features.csv")).unwrap();
    let data_rows = features
        .lines()
        .filter(|l| !l.starts_with('#') && !l.starts_with("inter_stroke_time"))
        .count();
    assert_eq!(data_rows, 10);
}

#[test]
fn correlate_output_is_symmetric() {
    let dir = tempfile::tempdir().unwrap();
    synth_features(dir.path());
    run_ok(dir.path(), &["correlate", "--input", "features.csv", "--out", "corr.csv"]);
    let text = fs::read_to_string(dir.path().join("corr.csv")).unwrap();
    let rows: Vec<Vec<&str>> = text
        .lines()
        .filter(|l| !l.starts_with('#'))
        .skip(1)
        .map(|l| l.split(',').skip(1).collect())
        .collect();
    let d = rows.len();
    assert!(d >= 2);
    for i in 0..d {
        for j in 0..d {
            assert_eq!(rows[i][j], rows[j][i], "asymmetry at ({i}, {j})");
        }
    }
}

#[test]
fn select_trace_rows_equal_generations_and_reruns_match() {
    let dir = tempfile::tempdir().unwrap();
    synth_features(dir.path());
    let select = |mask: &str, trace: &str| {
        run_ok(
            dir.path(),
            &[
                "select", "--input", "features.csv", "--out", mask, "--trace", trace,
                "--population", "8", "--generations", "1", "--seed", "11",
            ],
        );
    };
    select("m1.txt", "t1.csv");
    select("m2.txt", "t2.csv");
    let t1 = fs::read_to_string(dir.path().join("t1.csv")).unwrap();
    let trace_rows = t1
        .lines()
        .filter(|l| !l.starts_with('#') && !l.starts_with("generation"))
        .count();
    assert_eq!(trace_rows, 1);
    let m1 = fs::read_to_string(dir.path().join("m1.txt")).unwrap();
    let m2 = fs::read_to_string(dir.path().join("m2.txt")).unwrap();
    assert_eq!(
        m1.replace("out=m1.txt", "?").replace("trace=t1.csv", "?"),
        m2.replace("out=m2.txt", "?").replace("trace=t2.csv", "?")
    );
    assert!(m1.contains("mask_bits "));
    assert!(m1.contains("mask_hex "));
}

#[test]
fn benchmark_writes_all_artifacts_with_config() {
    let dir = tempfile::tempdir().unwrap();
    synth_features(dir.path());
    run_ok(
        dir.path(),
        &[
            "benchmark", "--input", "features.csv", "--classifiers", "knn,cart",
            "--out", "r.json", "--table", "r.txt", "--series", "r.csv", "--seed", "4",
        ],
    );
    let json: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(dir.path().join("r.json")).unwrap()).unwrap();
    assert_eq!(json["config"]["seed"], "4");
    assert_eq!(json["report"]["protocol"]["seed"], 4);
    assert_eq!(json["report"]["reports"][0]["classifier"], "knn");
    assert!(json["report"]["reports"][0]["accuracy"].is_number());
    let table = fs::read_to_string(dir.path().join("r.txt")).unwrap();
    assert!(table.contains("# cfg seed=4"));
    assert!(table.contains("Decision Tree (CART)"));
    let series = fs::read_to_string(dir.path().join("r.csv")).unwrap();
    assert!(series.lines().any(|l| l == "classifier,all_features"));
}

#[test]
fn benchmark_with_mask_records_it_in_protocol() {
    let dir = tempfile::tempdir().unwrap();
    synth_features(dir.path());
    run_ok(
        dir.path(),
        &[
            "select", "--input", "features.csv", "--out", "mask.txt", "--trace", "t.csv",
            "--population", "8", "--generations", "2", "--seed", "11",
        ],
    );
    run_ok(
        dir.path(),
        &[
            "benchmark", "--input", "features.csv", "--mask", "mask.txt",
            "--classifiers", "knn", "--out", "masked.json", "--table", "m.txt",
            "--series", "m.csv",
        ],
    );
    run_ok(
        dir.path(),
        &[
            "benchmark", "--input", "features.csv", "--classifiers", "knn",
            "--out", "plain.json", "--table", "p.txt", "--series", "p.csv",
        ],
    );
    let masked: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(dir.path().join("masked.json")).unwrap()).unwrap();
    let plain: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(dir.path().join("plain.json")).unwrap()).unwrap();
    assert!(masked["report"]["protocol"]["mask_hex"].is_string());
    assert!(plain["report"]["protocol"]["mask_hex"].is_null());
}

#[test]
fn mask_of_wrong_width_exits_3() {
    let dir = tempfile::tempdir().unwrap();
    synth_features(dir.path());
    fs::write(dir.path().join("bad_mask.txt"), "mask_bits 101\n").unwrap();
    let out = run_in(
        dir.path(),
        &[
            "benchmark", "--input", "features.csv", "--mask", "bad_mask.txt",
            "--classifiers", "knn", "--out", "r.json", "--table", "r.txt", "--series", "r.csv",
        ],
    );
    assert_eq!(out.status.code(), Some(3));
}

#[test]
fn unknown_classifier_exits_3() {
    let dir = tempfile::tempdir().unwrap();
    synth_features(dir.path());
    let out = run_in(
        dir.path(),
        &["benchmark", "--input", "features.csv", "--classifiers", "xgboost"],
    );
    assert_eq!(out.status.code(), Some(3));
}
