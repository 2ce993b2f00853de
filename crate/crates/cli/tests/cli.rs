use std::process::{Command, Output};

use serde_json::Value;

fn stabsep(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_stabsep"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).unwrap_or_else(|e| {
        panic!(
            "bad JSON ({e}): {}\nstderr: {}",
            String::from_utf8_lossy(&out.stdout),
            String::from_utf8_lossy(&out.stderr)
        )
    })
}

#[test]
fn enumerate_counts() {
    for (n, d, want) in [
        ("1", "2", 6),
        ("2", "2", 60),
        ("1", "3", 12),
        ("2", "3", 360),
    ] {
        let out = stabsep(&["enumerate", "-n", n, "-d", d]);
        assert_eq!(out.status.code(), Some(0));
        let v = json(&out);
        assert_eq!(v["count"], want);
        assert_eq!(v["schema"], "v1");
        assert!(v.get("states").is_none());
    }
    let out = stabsep(&["enumerate", "-n", "2", "-d", "2", "--orthogonal-to-zero"]);
    assert_eq!(json(&out)["count"], 15);
}

#[test]
fn usage_and_cap_errors_exit_2() {
    for args in [
        vec!["enumerate", "-n", "9", "-d", "2"],
        vec!["enumerate", "-n", "1", "-d", "4"],
        vec!["certify-csp", "--builtin", "nonsense", "-n", "1", "-d", "2"],
        vec!["certify-csp", "--builtin", "lambda", "-n", "3", "-d", "2"],
        vec!["certify-csp", "/nonexistent/channel.json"],
        vec!["enumerate", "-n", "2", "-d", "2", "--dense-cap", "0"],
    ] {
        let out = stabsep(&args);
        assert_eq!(out.status.code(), Some(2), "{args:?}");
        assert!(out.stdout.is_empty(), "{args:?}");
    }
}

#[test]
fn malformed_files_exit_2() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("bad.json");
    std::fs::write(&path, "{\"schema\": \"v1\", \"d\": 2").unwrap();
    let p = path.to_str().unwrap();
    assert_eq!(stabsep(&["certify-csp", p]).status.code(), Some(2));
    assert_eq!(stabsep(&["polar", p]).status.code(), Some(2));
}

#[test]
fn csp_verdicts() {
    let out = stabsep(&["certify-csp", "--builtin", "identity", "-n", "1", "-d", "2"]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(json(&out)["verdict"], "feasible");
    let out = stabsep(&[
        "certify-csp",
        "--builtin",
        "lambda",
        "-n",
        "2",
        "-d",
        "2",
        "--lambda-candidates",
    ]);
    assert_eq!(out.status.code(), Some(0));
    let out = stabsep(&[
        "certify-csp",
        "--builtin",
        "measure00-hadamard",
        "-n",
        "2",
        "-d",
        "2",
        "--lambda-candidates",
    ]);
    assert_eq!(out.status.code(), Some(3));
    assert_eq!(json(&out)["verdict"], "infeasible");
    assert_eq!(json(&out)["functional"]["exhaustive"], false);
}

#[test]
fn separation_fields() {
    let out = stabsep(&["separation", "-n", "2", "-d", "2"]);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    assert_eq!(v["so_ad_bound"], "5/12");
    assert_eq!(v["margin"], "1/12");
    let v = json(&stabsep(&["separation", "-n", "1", "-d", "2"]));
    assert_eq!(v["margin"], "0");
}

#[test]
fn polar_of_listed_state() {
    let listed = json(&stabsep(&["enumerate", "-n", "2", "-d", "3", "--list"]));
    let states = listed["states"].as_array().unwrap();
    assert_eq!(states.len(), 360);
    let dir = tempfile::tempdir().unwrap();
    for (i, s) in states.iter().enumerate().step_by(37) {
        let path = dir.path().join(format!("s{i}.json"));
        std::fs::write(&path, serde_json::to_string(s).unwrap()).unwrap();
        let out = stabsep(&["polar", path.to_str().unwrap()]);
        assert_eq!(out.status.code(), Some(0), "{s}");
        let v = json(&out);
        assert_eq!(v["n"], 1);
        assert_eq!(v["d"], 3);
    }
}

#[test]
fn output_is_byte_identical() {
    let dir = tempfile::tempdir().unwrap();
    let file = dir.path().join("sep.json");
    let args = ["separation", "-n", "2", "-d", "3"];
    let first = stabsep(&args).stdout;
    assert_eq!(first, stabsep(&args).stdout);
    let single = Command::new(env!("CARGO_BIN_EXE_stabsep"))
        .args(args)
        .env("STABSEP_THREADS", "1")
        .output()
        .unwrap();
    assert_eq!(first, single.stdout);
    let out = stabsep(&[
        "separation",
        "-n",
        "2",
        "-d",
        "3",
        "-o",
        file.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(0));
    assert!(out.stdout.is_empty());
    assert_eq!(std::fs::read(&file).unwrap(), first);
    let probe = ["csp1", "-d", "2", "--objectives", "8", "--seed", "4"];
    assert_eq!(stabsep(&probe).stdout, stabsep(&probe).stdout);
}
