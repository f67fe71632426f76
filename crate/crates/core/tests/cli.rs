use std::path::Path;
use std::process::Command;

use diqkd::cli::run;
use diqkd::games::{chsh_spec, Behavior};
use serde_json::Value;

struct Output {
    code: i32,
    stdout: String,
    stderr: String,
}

fn diqkd(args: &[&str]) -> Output {
    let mut out = Vec::new();
    let mut err = Vec::new();
    let code = run(std::iter::once("diqkd").chain(args.iter().copied()), &mut out, &mut err);
    Output {
        code,
        stdout: String::from_utf8(out).unwrap(),
        stderr: String::from_utf8(err).unwrap(),
    }
}

fn json(o: &Output) -> Value {
    assert_eq!(o.code, 0, "stderr: {}", o.stderr);
    serde_json::from_str(&o.stdout).unwrap()
}

fn csv_value(csv: &str, quantity: &str) -> f64 {
    csv.lines()
        .find(|l| l.starts_with(&format!("{quantity},")))
        .and_then(|l| l.rsplit(',').next())
        .unwrap()
        .parse()
        .unwrap()
}

#[test]
fn winprob_reference_values() {
    let omega = |args: &[&str]| json(&diqkd(args))["omega"].as_f64().unwrap();
    assert!((omega(&["winprob", "--game", "mpg", "--strategy", "optimal"]) - 1.0).abs() < 1e-12);
    let mixed = omega(&["winprob", "--game", "mpg", "--strategy", "optimal", "--visibility", "0"]);
    assert!((mixed - 0.5).abs() < 1e-12);
    let chsh = omega(&["winprob", "--game", "chsh", "--eps", "0.5", "--strategy", "optimal"]);
    assert!((chsh - (2.0 + 2f64.sqrt()) / 4.0).abs() < 1e-12);
    assert!((omega(&["winprob", "--game", "mpg", "--strategy", "classical"]) - 8.0 / 9.0).abs() < 1e-12);
    let iso = omega(&["winprob", "--game", "mpg", "--q", "0.96"]);
    assert!((iso - 0.98).abs() < 1e-12);
}

#[test]
fn winprob_json_and_csv_carry_the_same_numbers() {
    let args = ["winprob", "--game", "mpg", "--visibility", "0.97", "--efficiency", "0.99"];
    let j = json(&diqkd(&args));
    let c = diqkd(&[&args[..], &["--format", "csv"]].concat());
    assert_eq!(c.code, 0);
    assert_eq!(csv_value(&c.stdout, "omega"), j["omega"].as_f64().unwrap());
    assert_eq!(csv_value(&c.stdout, "qber"), j["qber"].as_f64().unwrap());
    let pairs = j["pairs"].as_array().unwrap();
    assert_eq!(pairs.len(), 9);
    for (line, p) in c.stdout.lines().filter(|l| l.starts_with("pair,")).zip(pairs) {
        let v: f64 = line.rsplit(',').next().unwrap().parse().unwrap();
        assert_eq!(v, p["winning"].as_f64().unwrap());
    }
}

#[test]
fn usage_errors_exit_with_two() {
    let cases: &[&[&str]] = &[
        &[],
        &["frobnicate"],
        &["winprob", "--bogus"],
        &["winprob", "--visibility", "1.5"],
        &["winprob", "--game", "chsh", "--eps", "1"],
        &["winprob", "--game", "chsh", "--strategy", "table-one"],
        &["simulate", "--omega-exp", "0.9"],
        &["simulate", "--omega-exp", "0.9", "--seed", "1", "--n", "0"],
        &["entropy", "--score", "0.95", "--level", "3"],
        &["entropy", "--score", "0.95", "--m", "1"],
        &["entropy", "--game", "chsh", "--score", "0.8", "--key-pair", "1,1"],
        &["keyrate-sweep", "--axis", "visibility"],
        &["keyrate-sweep", "--axis", "score", "--grid", "0.2"],
        &["winprob", "-g", "mpg"],
    ];
    for args in cases {
        let o = diqkd(args);
        assert_eq!(o.code, 2, "{args:?}: stdout {} stderr {}", o.stdout, o.stderr);
        assert!(o.stdout.is_empty(), "{args:?}");
    }
}

#[test]
fn help_goes_to_stdout_with_success() {
    let o = diqkd(&["--help"]);
    assert_eq!(o.code, 0);
    for sub in ["winprob", "entropy", "keyrate-sweep", "simulate"] {
        assert!(o.stdout.contains(sub));
    }
}

#[test]
fn supra_quantum_behavior_is_a_computation_failure() {
    let g = chsh_spec(0.5, 0.9).unwrap();
    // PR box on {0,1}², perfectly correlated on the key input
    let pr = Behavior::from_fn(&g, |x, y, a, b| {
        let target = if y == 2 { 0 } else { x & y };
        if (a ^ b) == target {
            0.5
        } else {
            0.0
        }
    })
    .unwrap();
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("pr.json");
    std::fs::write(&path, pr.to_json()).unwrap();
    let o = diqkd(&[
        "entropy",
        "--game",
        "chsh",
        "--mode",
        "full-statistics",
        "--m",
        "3",
        "--behavior",
        path.to_str().unwrap(),
    ]);
    assert_eq!(o.code, 1, "stdout {} stderr {}", o.stdout, o.stderr);
    assert!(o.stdout.is_empty());
}

#[test]
fn missing_behavior_file_is_a_computation_failure() {
    let o = diqkd(&["winprob", "--behavior", "/nonexistent/behavior.json"]);
    assert_eq!(o.code, 1);
}

#[test]
fn simulate_is_byte_identical_for_a_fixed_seed() {
    let args = [
        "simulate", "--protocol", "mpg", "--n", "100000", "--gamma", "0.9", "--omega-exp", "0.99", "--q", "0.98",
        "--seed", "7",
    ];
    let a = diqkd(&args);
    let b = diqkd(&args);
    assert_eq!(a.code, 0);
    assert_eq!(a.stdout, b.stdout);
    let v: Value = serde_json::from_str(&a.stdout).unwrap();
    let r = &v["result"];
    // q = 0.98 puts the mean score exactly at the threshold 0.99
    let tests = r["test_rounds"].as_f64().unwrap();
    let sigma = (0.99 * 0.01 / tests).sqrt();
    assert!((r["estimated_score"].as_f64().unwrap() - 0.99).abs() < 3.0 * sigma);
    assert_eq!(
        r["aborted"].as_bool().unwrap(),
        r["estimated_score"].as_f64().unwrap() < 0.99
    );
}

#[test]
fn simulate_aborts_when_the_threshold_is_out_of_reach() {
    let o = diqkd(&["simulate", "--omega-exp", "1.0", "--q", "0.9", "--seed", "1"]);
    let v = json(&o);
    assert_eq!(v["result"]["aborted"], Value::Bool(true));
    assert_eq!(v["result"]["raw_key_length"].as_u64(), Some(0));
}

#[test]
fn simulate_csv_matches_json() {
    let args = ["simulate", "--protocol", "chsh", "--n", "20000", "--i-exp", "0.8", "--seed", "3"];
    let j = json(&diqkd(&args));
    let c = diqkd(&[&args[..], &["--format", "csv"]].concat());
    let lines: Vec<&str> = c.stdout.lines().collect();
    assert_eq!(lines.len(), 2);
    let header: Vec<&str> = lines[0].split(',').collect();
    let row: Vec<&str> = lines[1].split(',').collect();
    let field = |name: &str| row[header.iter().position(|h| *h == name).unwrap()];
    let r = &j["result"];
    assert_eq!(field("estimated_score").parse::<f64>().unwrap(), r["estimated_score"].as_f64().unwrap());
    assert_eq!(field("raw_key_length").parse::<u64>().unwrap(), r["raw_key_length"].as_u64().unwrap());
    assert_eq!(field("aborted"), r["aborted"].as_bool().unwrap().to_string());
}

#[test]
fn simulate_writes_transcript_and_keys() {
    let dir = tempfile::tempdir().unwrap();
    let t = dir.path().join("rounds.jsonl");
    let o = diqkd(&[
        "simulate", "--n", "500", "--omega-exp", "0.9", "--seed", "2", "--keys", "--transcript",
        t.to_str().unwrap(),
    ]);
    let v = json(&o);
    let text = std::fs::read_to_string(&t).unwrap();
    assert_eq!(text.lines().count(), 500);
    let first: Value = serde_json::from_str(text.lines().next().unwrap()).unwrap();
    assert_eq!(first["a_bits"].as_array().unwrap().len(), 3);
    let key = v["result"]["alice_key"].as_str().unwrap();
    assert_eq!(key.len(), 450);
    assert!(key.chars().all(|c| c == '0' || c == '1'));
}

fn files_with_extension(dir: &Path, ext: &str) -> usize {
    std::fs::read_dir(dir)
        .unwrap()
        .filter(|e| e.as_ref().unwrap().path().extension().is_some_and(|x| x == ext))
        .count()
}

#[test]
fn sdpa_export_writes_one_file_per_node() {
    let dir = tempfile::tempdir().unwrap();
    for m in [2, 5, 8] {
        let sub = dir.path().join(format!("m{m}"));
        let o = diqkd(&[
            "entropy", "--game", "chsh", "--score", "0.8", "--m", &m.to_string(), "--export-sdpa",
            sub.to_str().unwrap(), "--export-only",
        ]);
        assert_eq!(o.code, 0, "{}", o.stderr);
        assert!(o.stdout.is_empty());
        assert_eq!(files_with_extension(&sub, "dat-s"), m - 1);
        let manifest: Value =
            serde_json::from_str(&std::fs::read_to_string(sub.join("pair02_manifest.json")).unwrap()).unwrap();
        assert_eq!(manifest["nodes"].as_array().unwrap().len(), m - 1);
    }
}

#[test]
fn entropy_json_and_csv_agree_and_progress_goes_to_stderr() {
    let args = ["entropy", "--game", "chsh", "--score", "0.82"];
    let o = diqkd(&args);
    let j = json(&o);
    assert_eq!(o.stderr.lines().count(), 7, "{}", o.stderr);
    assert!(o.stderr.lines().all(|l| l.contains("node")));
    let c = diqkd(&[&args[..], &["--format", "csv"]].concat());
    let row: Vec<&str> = c.stdout.lines().nth(1).unwrap().split(',').collect();
    assert_eq!(row[3].parse::<f64>().unwrap(), j["bounds"][0]["value"].as_f64().unwrap());
    let v = j["bounds"][0]["value"].as_f64().unwrap();
    assert!(v > 0.4 && v < 0.6, "{v}");
}

#[test]
fn magic_square_score_near_classical_certifies_nothing() {
    let j = json(&diqkd(&["entropy", "--game", "mpg", "--score", "0.90"]));
    let b = &j["bounds"][0];
    assert_eq!(b["value"].as_f64().unwrap(), 0.0);
    assert!(b["raw"].as_f64().unwrap() <= 0.0);
}

#[test]
fn chsh_visibility_sweep_is_monotone() {
    let o = diqkd(&[
        "keyrate-sweep", "--protocol", "chsh", "--axis", "visibility", "--grid", "1.0,0.99,0.98,0.97,0.96",
        "--jobs", "2",
    ]);
    assert_eq!(o.code, 0, "{}", o.stderr);
    let lines: Vec<&str> = o.stdout.lines().collect();
    assert_eq!(lines[0], diqkd::keyrate::Sweep::CSV_HEADER);
    let rates: Vec<f64> = lines[1..].iter().map(|l| l.split(',').nth(4).unwrap().parse().unwrap()).collect();
    assert_eq!(rates.len(), 5);
    for w in rates.windows(2) {
        assert!(w[1] <= w[0] + 1e-7, "{rates:?}");
    }
}

#[test]
fn chsh_ideal_rates_approach_their_ceilings() {
    for eps in ["0.2", "0.5", "0.8"] {
        let o = diqkd(&[
            "keyrate-sweep", "--protocol", "chsh", "--eps", eps, "--axis", "visibility", "--grid", "1.0", "--format",
            "json",
        ]);
        let j = json(&o);
        let e: f64 = eps.parse().unwrap();
        let ceiling = 0.9 * (1.0 - e) / 2.0;
        let r = j["points"][0]["rate"].as_f64().unwrap();
        assert!(r <= ceiling && r >= 0.95 * ceiling, "ε = {eps}: {r} vs {ceiling}");
    }
}

#[test]
fn output_dir_variable_sets_where_files_go() {
    let dir = tempfile::tempdir().unwrap();
    let status = Command::new(env!("CARGO_BIN_EXE_diqkd"))
        .args(["winprob", "--output", "nested/omega.json"])
        .env("DIQKD_OUTPUT_DIR", dir.path())
        .output()
        .unwrap();
    assert_eq!(status.status.code(), Some(0));
    assert!(status.stdout.is_empty());
    let v: Value = serde_json::from_str(&std::fs::read_to_string(dir.path().join("nested/omega.json")).unwrap()).unwrap();
    assert!((v["omega"].as_f64().unwrap() - 1.0).abs() < 1e-12);
}

#[test]
fn binary_reports_exit_codes() {
    let bin = env!("CARGO_BIN_EXE_diqkd");
    let code = |args: &[&str]| Command::new(bin).args(args).output().unwrap().status.code();
    assert_eq!(code(&["winprob"]), Some(0));
    assert_eq!(code(&["simulate", "--omega-exp", "0.9"]), Some(2));
    assert_eq!(code(&["winprob", "--behavior", "/nonexistent.json"]), Some(1));
}
