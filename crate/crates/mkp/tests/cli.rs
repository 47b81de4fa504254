//! End-to-end runs of the `mkp` binary: exit codes, file round trips,
//! and the bench table contract.

use std::path::Path;
use std::process::{Command, Output};

fn mkp(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_mkp"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn mkp_env(args: &[&str], env: &[(&str, &str)]) -> Output {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_mkp"));
    cmd.args(args);
    for (k, v) in env {
        cmd.env(k, v);
    }
    cmd.output().expect("binary runs")
}

fn code(out: &Output) -> i32 {
    out.status.code().expect("no signal")
}

fn stdout_json(out: &Output) -> serde_json::Value {
    serde_json::from_slice(&out.stdout).expect("stdout is a JSON document")
}

fn gen_instance(dir: &Path, name: &str, n: u32, t: u32, seed: u32) -> String {
    let path = dir.join(name).to_string_lossy().into_owned();
    let out = mkp(&[
        "gen",
        "random",
        "--n",
        &n.to_string(),
        "--t",
        &t.to_string(),
        "--seed",
        &seed.to_string(),
        "--out",
        &path,
    ]);
    assert_eq!(code(&out), 0, "gen: {}", String::from_utf8_lossy(&out.stderr));
    path
}

#[test]
fn solve_then_verify_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let inst = gen_instance(dir.path(), "a.json", 5, 3, 7);
    let res = dir.path().join("res.json").to_string_lossy().into_owned();

    let out = mkp(&["solve", "--instance", &inst, "--algo", "dp", "--out", &res]);
    assert_eq!(code(&out), 0);
    let doc: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(&res).unwrap()).unwrap();
    assert_eq!(doc["algorithm"], "dp");
    let value = doc["value"].as_u64().unwrap();

    // the result document doubles as a schedule file
    let out = mkp(&["verify", "--instance", &inst, "--schedule", &res]);
    assert_eq!(code(&out), 0);
    let report = stdout_json(&out);
    assert_eq!(report["feasible"], true);
    assert_eq!(report["breakdown"]["total"].as_u64().unwrap(), value);
}

#[test]
fn verify_rejects_overloaded_schedule() {
    let dir = tempfile::tempdir().unwrap();
    let inst = gen_instance(dir.path(), "a.json", 4, 2, 3);
    let sched = dir.path().join("sched.txt");
    std::fs::write(&sched, "1111\n1111\n").unwrap();
    let out = mkp(&[
        "verify",
        "--instance",
        &inst,
        "--schedule",
        &sched.to_string_lossy(),
    ]);
    let report = stdout_json(&out);
    if report["feasible"] == serde_json::Value::Bool(true) {
        // everything fit; not the case for this seed, but keep the
        // assertion meaningful either way
        assert_eq!(code(&out), 0);
    } else {
        assert_eq!(code(&out), 1);
        assert!(report["first_violation"].as_u64().is_some());
    }
}

#[test]
fn parse_errors_exit_2() {
    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.json");
    std::fs::write(&bad, "{ not json").unwrap();
    let out = mkp(&["solve", "--instance", &bad.to_string_lossy(), "--algo", "dp"]);
    assert_eq!(code(&out), 2);

    let missing = dir.path().join("nope.json");
    let out = mkp(&["solve", "--instance", &missing.to_string_lossy(), "--algo", "dp"]);
    assert_eq!(code(&out), 2);

    // ptas without --epsilon
    let inst = gen_instance(dir.path(), "a.json", 3, 2, 1);
    let out = mkp(&["solve", "--instance", &inst, "--algo", "ptas"]);
    assert_eq!(code(&out), 2);
}

#[test]
fn guard_refusals_exit_3_and_env_overrides_apply() {
    let dir = tempfile::tempdir().unwrap();
    let inst = gen_instance(dir.path(), "big.json", 8, 3, 5);

    // 24 decision bits exceed the default brute guard of 20
    let out = mkp(&["solve", "--instance", &inst, "--algo", "brute"]);
    assert_eq!(code(&out), 3);

    // env var relaxes the default
    let out = mkp_env(
        &["solve", "--instance", &inst, "--algo", "brute"],
        &[("MKP_BRUTE_GUARD", "24")],
    );
    assert_eq!(code(&out), 0);

    // explicit flag wins over env
    let out = mkp_env(
        &["solve", "--instance", &inst, "--algo", "brute", "--brute-guard", "10"],
        &[("MKP_BRUTE_GUARD", "24")],
    );
    assert_eq!(code(&out), 3);

    let out = mkp(&["solve", "--instance", &inst, "--algo", "dp", "--dp-table-guard", "1"]);
    assert_eq!(code(&out), 3);
}

#[test]
fn solver_outputs_agree_on_one_instance() {
    let dir = tempfile::tempdir().unwrap();
    let inst = gen_instance(dir.path(), "a.json", 5, 2, 11);
    let dp = stdout_json(&mkp(&["solve", "--instance", &inst, "--algo", "dp"]));
    let brute = stdout_json(&mkp(&["solve", "--instance", &inst, "--algo", "brute"]));
    assert_eq!(dp["value"], brute["value"]);
    let ptas = stdout_json(&mkp(&[
        "solve", "--instance", &inst, "--algo", "ptas", "--epsilon", "0.5",
    ]));
    assert!(ptas["value"].as_u64().unwrap() <= dp["value"].as_u64().unwrap());
    let general = stdout_json(&mkp(&[
        "solve", "--instance", &inst, "--algo", "ptas-general", "--epsilon", "0.5",
        "--inner", "dp",
    ]));
    assert!(general["value"].as_u64().unwrap() <= dp["value"].as_u64().unwrap());
}

#[test]
fn gen_families_produce_parseable_instances() {
    let dir = tempfile::tempdir().unwrap();
    let graph = dir.path().join("g.txt");
    std::fs::write(&graph, "3 3\n1 2\n2 3\n1 3\n").unwrap();
    let out_path = dir.path().join("is.json").to_string_lossy().into_owned();
    let out = mkp(&[
        "gen", "independent-set", "--graph", &graph.to_string_lossy(), "--out", &out_path,
    ]);
    assert_eq!(code(&out), 0);
    let doc: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(&out_path).unwrap()).unwrap();
    assert_eq!(doc["T"], 3);
    assert_eq!(doc["n"], 3);
    assert_eq!(doc["bonuses"][0][0], 18);

    let kp = dir.path().join("kp.txt");
    std::fs::write(&kp, "3\n1 2 3\n3 2 1\n4 4\n").unwrap();
    let out_path = dir.path().join("kp.json").to_string_lossy().into_owned();
    let out = mkp(&["gen", "two-kp", "--input", &kp.to_string_lossy(), "--out", &out_path]);
    assert_eq!(code(&out), 0);
    let doc: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(&out_path).unwrap()).unwrap();
    assert_eq!(doc["T"], 2);
    assert_eq!(doc["capacities"], serde_json::json!([4, 4]));

    // bad graph file is a validation error
    std::fs::write(&graph, "3 1\n0 2\n").unwrap();
    let out = mkp(&[
        "gen", "independent-set", "--graph", &graph.to_string_lossy(), "--out", &out_path,
    ]);
    assert_eq!(code(&out), 2);
}

#[test]
fn bench_table_reports_rows_and_survives_failures() {
    let dir = tempfile::tempdir().unwrap();
    let inst = gen_instance(dir.path(), "a.json", 4, 2, 9);
    let manifest = dir.path().join("manifest.txt");
    std::fs::write(
        &manifest,
        format!(
            "# comment line\n{inst} dp\n{inst} lp-bound\n{inst} round-lp\n{inst} ptas 0.5\nmissing.json dp\n"
        ),
    )
    .unwrap();
    let table_path = dir.path().join("table.tsv").to_string_lossy().into_owned();
    let out = mkp(&[
        "bench", "--manifest", &manifest.to_string_lossy(), "--out", &table_path,
    ]);
    // the missing instance row fails, the run still completes
    assert_eq!(code(&out), 1);
    let table = std::fs::read_to_string(&table_path).unwrap();
    let lines: Vec<&str> = table.lines().collect();
    assert_eq!(lines[0], "instance\talgorithm\tepsilon\tvalue\tratio_dp\tratio_lp\terror");
    assert_eq!(lines.len(), 6);
    assert!(lines[5].starts_with("missing.json\tdp"));
    assert!(!lines[5].ends_with("\t-"), "error column must be populated");
    // dp row ratio against itself is 1
    assert!(lines[1].contains("\t1.000000\t"));

    // all-good manifest exits 0
    std::fs::write(&manifest, format!("{inst} dp\n{inst} ptas 0.5\n")).unwrap();
    let out = mkp(&[
        "bench", "--manifest", &manifest.to_string_lossy(), "--out", &table_path,
    ]);
    assert_eq!(code(&out), 0);

    // empty manifest produces just the header
    std::fs::write(&manifest, "").unwrap();
    let out = mkp(&[
        "bench", "--manifest", &manifest.to_string_lossy(), "--out", &table_path,
    ]);
    assert_eq!(code(&out), 0);
    assert_eq!(std::fs::read_to_string(&table_path).unwrap().lines().count(), 1);
}

#[test]
fn timings_are_opt_in() {
    let dir = tempfile::tempdir().unwrap();
    let inst = gen_instance(dir.path(), "a.json", 4, 2, 2);
    let doc = stdout_json(&mkp(&["solve", "--instance", &inst, "--algo", "dp"]));
    assert!(doc["stats"].get("wall_ms").is_none());
    let doc = stdout_json(&mkp(&[
        "solve", "--instance", &inst, "--algo", "dp", "--timings",
    ]));
    assert!(doc["stats"]["wall_ms"].is_u64());
}
