use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use merosub::literal::format_meromorphic;
use merosub::verifier::random_sigma_function;
use serde_json::Value;

fn merosub(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_merosub"))
        .args(args)
        .env("MEROSUB_THREADS", "1")
        .output()
        .expect("binary runs")
}

fn code(args: &[&str]) -> i32 {
    merosub(args).status.code().expect("exit code")
}

fn read_json(path: &Path) -> Value {
    serde_json::from_str(&fs::read_to_string(path).unwrap()).unwrap()
}

#[test]
fn documented_exit_codes() {
    assert_eq!(code(&["verify", "--theorem", "3.5", "--preset", "cor-3.7", "--seed", "7"]), 0);
    assert_eq!(code(&["verify", "--theorem", "bogus"]), 2);
    let out = ["fuzz", "--theorem", "3.8", "--preset", "cor-3.10", "--trials", "200", "--seed", "1", "--mutate-conclusion"];
    assert_eq!(code(&out), 1);
}

#[test]
fn unknown_flag_prints_usage_to_stderr() {
    let out = merosub(&["fuzz", "--bogus-flag"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("Usage"));
    assert!(out.stdout.is_empty());
}

#[test]
fn bad_thread_setting_is_a_usage_error() {
    let out = Command::new(env!("CARGO_BIN_EXE_merosub"))
        .args(["fuzz", "--preset", "cor-3.7", "--trials", "2"])
        .env("MEROSUB_THREADS", "many")
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn io_failure_exits_three() {
    let dir = tempfile::tempdir().unwrap();
    let blocked = dir.path().join("missing").join("report.json");
    assert_eq!(code(&["verify", "--preset", "cor-3.7", "--out", blocked.to_str().unwrap()]), 3);
    let absent = dir.path().join("absent.txt");
    assert_eq!(code(&["verify", "--preset", "cor-3.7", "--input", absent.to_str().unwrap()]), 3);
}

#[test]
fn operator_eval_reports_both_paths() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("op.json");
    let args = ["op", "eval", "--alpha", "0.5", "--beta", "3", "--seed", "4", "--amplitude", "0.2", "--order", "16"];
    let mut with_out = args.to_vec();
    with_out.extend(["--out", path.to_str().unwrap()]);
    assert_eq!(code(&with_out), 0);
    let doc = read_json(&path);
    let eval = &doc["payload"]["operator_eval"];
    assert_eq!(eval["samples"].as_array().unwrap().len(), 16);
    assert!(eval["max_residual"].as_f64().unwrap() < 1e-8);
    assert!(eval["samples"][0]["quadrature"].is_array() && eval["samples"][0]["series"].is_array());
    assert_eq!(code(&["op", "eval", "--radius", "0.95"]), 2);
}

#[test]
fn literal_input_matches_the_seeded_function() {
    let dir = tempfile::tempdir().unwrap();
    let f = random_sigma_function(21, 64, 0.1).unwrap();
    let lit = dir.path().join("f.txt");
    fs::write(&lit, format_meromorphic(&f)).unwrap();
    let (a, b) = (dir.path().join("a.json"), dir.path().join("b.json"));
    let base = ["verify", "--preset", "cor-3.2", "--seed", "21"];
    let mut seeded = base.to_vec();
    seeded.extend(["--out", a.to_str().unwrap()]);
    let mut given = base.to_vec();
    given.extend(["--input", lit.to_str().unwrap(), "--out", b.to_str().unwrap()]);
    assert_eq!(code(&seeded), 0);
    assert_eq!(code(&given), 0);
    let (ra, rb) = (read_json(&a), read_json(&b));
    let (ta, tb) = (&ra["payload"]["trial"], &rb["payload"]["trial"]);
    assert_eq!(ta["generator"], "Random");
    assert_eq!(tb["generator"], "Given");
    for key in ["hypotheses", "premise", "conclusion", "classification"] {
        assert_eq!(ta[key], tb[key], "{key}");
    }
}

#[test]
fn echoed_command_reproduces_the_report() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("r.json");
    let args = ["fuzz", "--preset", "lem-2.6", "--trials", "12", "--seed", "5", "--out", path.to_str().unwrap()];
    assert_eq!(code(&args), 0);
    let first = fs::read_to_string(&path).unwrap();
    let doc: Value = serde_json::from_str(&first).unwrap();
    let echoed: Vec<String> = doc["command"].as_array().unwrap().iter().map(|v| v.as_str().unwrap().to_string()).collect();
    fs::remove_file(&path).unwrap();
    let replay: Vec<&str> = echoed[1..].iter().map(String::as_str).collect();
    assert_eq!(code(&replay), 0);
    assert_eq!(fs::read_to_string(&path).unwrap(), first);
    assert!(doc["wall_time"].is_null());
    assert_eq!(doc["payload"]["fuzz"]["trials"], 12);
}

#[test]
fn timing_is_opt_in() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("t.json");
    let args = ["fuzz", "--preset", "cor-3.7", "--trials", "2", "--timing", "--out", path.to_str().unwrap()];
    assert_eq!(code(&args), 0);
    assert!(read_json(&path)["wall_time"].as_f64().unwrap() > 0.0);
}

#[test]
fn counterexample_reports_carry_reproduction_data() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("neg.json");
    let args = [
        "fuzz", "--preset", "cor-3.7", "--trials", "20", "--seed", "2", "--mutate-conclusion", "--out",
        path.to_str().unwrap(),
    ];
    assert_eq!(code(&args), 1);
    let doc = read_json(&path);
    let ces = doc["payload"]["fuzz"]["counterexamples"].as_array().unwrap();
    assert!(!ces.is_empty());
    for ce in ces {
        let w = &ce["conclusion"]["witness"];
        assert!(w["z"].is_array() && w["value"].is_array() && w["partner"].is_array());
        assert!(ce["function"].as_array().unwrap().len() == 64);
        assert!(ce["params"].is_object() && ce["seed"].is_u64());
    }
}

#[test]
fn presets_listing_and_report() {
    let out = merosub(&["presets"]);
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8(out.stdout).unwrap();
    for id in ["cor-3.2", "cor-3.3", "cor-3.4", "cor-3.6", "cor-3.7", "cor-3.9", "cor-3.10", "cor-4.2", "cor-4.4", "cor-4.5"] {
        assert!(text.lines().any(|l| l.starts_with(id)), "{id}");
    }
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("p.json");
    assert_eq!(code(&["presets", "--out", path.to_str().unwrap()]), 0);
    assert_eq!(read_json(&path)["payload"]["presets"].as_array().unwrap().len(), 13);
}

#[test]
fn curves_overlay_matches_the_verdict() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("curves");
    let args = ["curves", "--preset", "cor-3.6", "--seed", "3", "--grid-n", "512", "--out", out.to_str().unwrap()];
    assert_eq!(code(&args), 0);
    let q = fs::read_to_string(out.join("q.csv")).unwrap();
    let k = fs::read_to_string(out.join("principal.csv")).unwrap();
    for text in [&q, &k] {
        let mut lines = text.lines();
        assert_eq!(lines.next(), Some("theta,re,im"));
        assert_eq!(lines.count(), 512);
    }
    // q = (1 + z/2)/(1 - z/2) maps the disk into the right half-plane.
    assert!(q.lines().skip(1).all(|l| l.split(',').nth(1).unwrap().parse::<f64>().unwrap() > 0.0));
    let doc = read_json(&out.join("curves.json"));
    assert_eq!(doc["payload"]["curves"]["subordination"]["status"], "Holds");
    assert_eq!(code(&["curves", "--preset", "cor-3.6", "--radius", "0.99", "--out", out.to_str().unwrap()]), 2);
}

#[test]
fn as_written_mode_moves_the_base_point() {
    // The printed quotient gives k(0) = lambda^(-mu) != q(0), so the same
    // trial that holds in convex mode is refuted as written.
    assert_eq!(code(&["verify", "--preset", "cor-3.2", "--mode", "convex"]), 0);
    let out = merosub(&["verify", "--preset", "cor-3.2", "--mode", "as-written"]);
    assert_eq!(out.status.code(), Some(1));
    let doc: Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(doc["payload"]["trial"]["classification"], "Counterexample");
    assert_eq!(doc["payload"]["trial"]["mode"], "AsWritten");
}
