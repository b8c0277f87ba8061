//! End-to-end tests of the command line binary: exit codes, report
//! determinism, seed plumbing, and the optimize-vs-uniform guarantee.

use std::path::PathBuf;
use std::process::{Command, Output};

use pathineq::report::{parse, Json};

fn bin() -> Command {
    let mut c = Command::new(env!("CARGO_BIN_EXE_pathineq"));
    c.env_remove("INEQ_SEED");
    c
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary should spawn")
}

fn stdout_str(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).expect("stdout should be UTF-8")
}

/// The report body with the volatile timestamp line removed.
fn stable_lines(text: &str) -> String {
    text.lines()
        .filter(|l| !l.contains("\"timestamp\""))
        .collect::<Vec<_>>()
        .join("\n")
}

fn tmp_file(name: &str, contents: &str) -> PathBuf {
    let path = std::env::temp_dir().join(format!("pathineq-cli-{}-{name}", std::process::id()));
    std::fs::write(&path, contents).expect("temp file should be writable");
    path
}

fn entry_value(doc: &Json, name: &str) -> f64 {
    let entries = doc
        .get("entries")
        .and_then(|e| e.as_arr())
        .expect("bounds report should carry entries");
    for e in entries {
        if e.get("name").and_then(|n| n.as_str()) == Some(name) {
            return e
                .get("value")
                .and_then(|v| v.as_f64())
                .expect("entry value should be numeric");
        }
    }
    panic!("no entry named {name}");
}

#[test]
fn reports_are_deterministic_modulo_timestamp() {
    let a = run(&["bounds", "gallery:complete:4", "--seed", "7"]);
    let b = run(&["bounds", "gallery:complete:4", "--seed", "7"]);
    assert_eq!(a.status.code(), Some(0));
    assert_eq!(b.status.code(), Some(0));
    let sa = stable_lines(&stdout_str(&a));
    let sb = stable_lines(&stdout_str(&b));
    assert!(!sa.is_empty());
    assert_eq!(
        sa, sb,
        "two identical runs should agree up to the timestamp"
    );
}

#[test]
fn usage_and_input_errors_exit_one() {
    assert_eq!(run(&[]).status.code(), Some(1), "missing subcommand");
    assert_eq!(
        run(&["bounds", "/no/such/file.json"]).status.code(),
        Some(1),
        "missing graph file"
    );
    assert_eq!(
        run(&["exact", "gallery:complete:3", "--quantity", "bogus"])
            .status
            .code(),
        Some(1),
        "unknown quantity"
    );
    assert_eq!(
        run(&["bounds", "gallery:cycle:5", "--paths", "tree"])
            .status
            .code(),
        Some(1),
        "tree paths on a graph with a cycle"
    );
    assert_eq!(
        run(&["bounds", "gallery:complete:99999"]).status.code(),
        Some(1),
        "a gallery size beyond the desk-scale ceiling"
    );

    let out = bin()
        .args(["bounds", "gallery:complete:3"])
        .env("INEQ_SEED", "notanumber")
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(1), "unparseable INEQ_SEED");

    let config = tmp_file(
        "zero-trials.json",
        r#"{"graph": "gallery:complete:3", "g": {"v0": 1.0}, "t": 5.0, "r_list": [0.5], "trials": 0}"#,
    );
    assert_eq!(
        run(&["simulate", "--config", config.to_str().unwrap()])
            .status
            .code(),
        Some(1),
        "zero trials"
    );
    std::fs::remove_file(config).ok();
}

#[test]
fn help_exits_zero() {
    assert_eq!(run(&["--help"]).status.code(), Some(0));
    assert_eq!(run(&["bounds", "--help"]).status.code(), Some(0));
}

#[test]
fn env_seed_is_recorded_and_flag_overrides_it() {
    let out = bin()
        .args(["bounds", "gallery:complete:3"])
        .env("INEQ_SEED", "123")
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(0));
    let doc = parse(&stdout_str(&out)).unwrap();
    let seed = doc
        .get("manifest")
        .and_then(|m| m.get("seed"))
        .and_then(|s| s.as_f64());
    assert_eq!(seed, Some(123.0));

    let out = bin()
        .args(["bounds", "gallery:complete:3", "--seed", "9"])
        .env("INEQ_SEED", "123")
        .output()
        .unwrap();
    let doc = parse(&stdout_str(&out)).unwrap();
    let seed = doc
        .get("manifest")
        .and_then(|m| m.get("seed"))
        .and_then(|s| s.as_f64());
    assert_eq!(seed, Some(9.0), "--seed should beat the environment");
}

#[test]
fn optimized_lengths_never_lose_to_uniform() {
    let uniform = run(&["bounds", "gallery:path:5", "--w", "uniform", "--seed", "11"]);
    let optimized = run(&[
        "bounds",
        "gallery:path:5",
        "--w",
        "optimize",
        "--seed",
        "11",
    ]);
    assert_eq!(uniform.status.code(), Some(0));
    assert_eq!(optimized.status.code(), Some(0));
    let du = parse(&stdout_str(&uniform)).unwrap();
    let do_ = parse(&stdout_str(&optimized)).unwrap();
    for name in ["poincare_weighted", "log_sobolev", "k_constant"] {
        let u = entry_value(&du, name);
        let o = entry_value(&do_, name);
        assert!(
            o <= u + 1e-9,
            "{name}: optimized {o} should not exceed uniform {u}"
        );
    }
}

#[test]
fn exact_cp_value_matches_the_closed_form() {
    let out = run(&["exact", "gallery:complete:3", "--quantity", "cp"]);
    assert_eq!(out.status.code(), Some(0));
    let doc = parse(&stdout_str(&out)).unwrap();
    let v = doc.get("value").and_then(|v| v.as_f64()).unwrap();
    assert!((v - 2.0 / 3.0).abs() <= 1e-10, "cp on the triangle: {v}");
}

#[test]
fn out_file_duplicates_stdout() {
    let path = std::env::temp_dir().join(format!("pathineq-cli-{}-out.json", std::process::id()));
    let out = run(&[
        "bounds",
        "gallery:star:3",
        "--seed",
        "3",
        "--out",
        path.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(0));
    let file = std::fs::read(&path).expect("--out should write the report");
    assert_eq!(file, out.stdout, "--out bytes should equal stdout bytes");
    std::fs::remove_file(path).ok();
}

#[test]
fn unknown_label_in_a_measure_file_is_an_input_error() {
    let nu = tmp_file("bad-nu.json", r#"{"nowhere": 1.0}"#);
    let out = run(&[
        "exact",
        "gallery:complete:3",
        "--quantity",
        "w1",
        "--nu",
        nu.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(1));
    std::fs::remove_file(nu).ok();
}

#[test]
fn simulate_round_trips_a_small_config() {
    let config = tmp_file(
        "small-sim.json",
        r#"{"graph": "gallery:complete:3", "g": {"v0": 1.0}, "t": 5.0, "r_list": [0.5, 2.0], "trials": 200, "seed": 3}"#,
    );
    let out = run(&["simulate", "--config", config.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    let doc = parse(&stdout_str(&out)).unwrap();
    let results = doc.get("results").and_then(|r| r.as_arr()).unwrap();
    assert_eq!(results.len(), 2, "one result row per r");
    for row in results {
        assert!(
            row.get("pass").is_some(),
            "each row should carry a pass flag"
        );
        let freq = row
            .get("tail_frequency")
            .and_then(|f| f.as_f64())
            .expect("tail frequency should be numeric");
        assert!((0.0..=1.0).contains(&freq));
    }
    std::fs::remove_file(config).ok();
}
