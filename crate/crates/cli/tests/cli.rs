use std::path::PathBuf;
use std::process::{Command, Output};

use serde_json::Value;

fn fixture(name: &str) -> String {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../fixtures").join(name).to_string_lossy().into_owned()
}

fn ugt(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_ugt")).args(args).output().expect("binary runs")
}

fn code(o: &Output) -> i32 {
    o.status.code().unwrap()
}

fn stdout_json(o: &Output) -> Value {
    serde_json::from_slice(&o.stdout).expect("stdout is JSON")
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

fn tmp(name: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("ugt-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    dir.join(name)
}

#[test]
fn validate_accepts_fixtures() {
    for name in ["std1.ugt", "ex1.ugt", "ex1_discovered.ugt", "pennies.ugt", "diamond.ugt"] {
        let o = ugt(&["validate", &fixture(name)]);
        assert_eq!(code(&o), 0, "{name}: {}", stderr(&o));
        let v = stdout_json(&o);
        assert_eq!(v["schema"], "ugt.validation/1");
        assert_eq!(v["ok"], true);
    }
    let o = ugt(&["validate", &fixture("std1.ugt"), "--format", "text"]);
    assert_eq!(String::from_utf8_lossy(&o.stdout), "ok\n");
}

#[test]
fn validate_rejects_broken_axioms() {
    let text = std::fs::read_to_string(fixture("ex1.ugt")).unwrap();
    let broken = format!("{text}\ninfoset player 2 at Tbar.d = {{ Tbar.d, T.d }}\n");
    let path = tmp("broken.ugt");
    std::fs::write(&path, broken).unwrap();
    let o = ugt(&["validate", path.to_str().unwrap()]);
    assert_eq!(code(&o), 1);
    let v = stdout_json(&o);
    assert_eq!(v["ok"], false);
    assert_eq!(v["violations"][0]["axiom"], "U0");
    let o = ugt(&["efr", path.to_str().unwrap()]);
    assert_eq!(code(&o), 2);
    assert!(stderr(&o).contains("U0"));
}

#[test]
fn input_errors_are_located() {
    let path = tmp("empty.ugt");
    std::fs::write(&path, "").unwrap();
    let o = ugt(&["validate", path.to_str().unwrap()]);
    assert_eq!(code(&o), 2);
    assert!(stderr(&o).contains("empty.ugt:1:1: missing header"), "{}", stderr(&o));

    let o = ugt(&["validate", "/nonexistent/game.ugt"]);
    assert_eq!(code(&o), 2);
    assert!(stderr(&o).contains("/nonexistent/game.ugt"));

    let o = ugt(&["pipeline", &fixture("ex1.ugt"), "--policy", "bogus"]);
    assert_eq!(code(&o), 2);

    let o = ugt(&["dot", &fixture("ex1.ugt"), "--format", "json"]);
    assert_eq!(code(&o), 2);

    let bad = tmp("bad_profile.json");
    std::fs::write(&bad, r#"{"schema": "ugt.profile/1", "players": {"1": {"T.root": [["zz", "1"]]}}}"#).unwrap();
    let o = ugt(&["sce", &fixture("ex1.ugt"), "--profile", bad.to_str().unwrap()]);
    assert_eq!(code(&o), 2);
    assert!(stderr(&o).contains("bad_profile.json"));
}

#[test]
fn caps_exit_with_three() {
    let o = ugt(&["efr", &fixture("ex1.ugt"), "--strategy-cap", "2"]);
    assert_eq!(code(&o), 3);
    assert!(stderr(&o).contains("exceeds cap"));
    let o = ugt(&["discover", &fixture("ex1.ugt"), "--max-steps", "1", "--policy", "efr-lex-first"]);
    assert_eq!(code(&o), 0);
}

#[test]
fn efr_renders_round_table() {
    let o = ugt(&["efr", &fixture("ex1.ugt")]);
    assert_eq!(code(&o), 0);
    let out = String::from_utf8_lossy(&o.stdout).into_owned();
    assert!(out.starts_with("game ex1: fixpoint at k=1"));
    let row = out.lines().find(|l| l.contains("Tbar.d=m2 T.d=r2")).unwrap();
    assert!(row.ends_with("+   +"), "{row}");
    let row = out.lines().find(|l| l.contains("T.root=r1")).unwrap();
    assert!(row.ends_with(".   ."), "{row}");

    let o = ugt(&["efr", &fixture("ex1.ugt"), "--format", "json"]);
    let v = stdout_json(&o);
    assert_eq!(v["schema"], "ugt.efr/1");
    assert_eq!(v["rationalizable"]["1"][0]["choices"]["T.root"], "l1");
}

#[test]
fn sce_on_ex1_cites_condition_zero() {
    let o = ugt(&["sce", &fixture("ex1.ugt"), "--profile", &fixture("ex1_efr_profile.json")]);
    assert_eq!(code(&o), 1);
    let v = stdout_json(&o);
    assert_eq!(v["schema"], "ugt.sce/1");
    assert_eq!(v["verdict"], false);
    assert_eq!(v["players"]["1"]["condition0"]["holds"], false);

    let o = ugt(&["sce", &fixture("ex1_discovered.ugt"), "--profile", &fixture("ex1_discovered_rsce.json"), "--format", "text"]);
    assert_eq!(code(&o), 0);
    assert!(String::from_utf8_lossy(&o.stdout).starts_with("game ex1: self-confirming"));
}

#[test]
fn rsce_certifies_the_discovered_equilibrium() {
    let o = ugt(&["rsce", &fixture("ex1_discovered.ugt"), "--profile", &fixture("ex1_discovered_rsce.json")]);
    assert_eq!(code(&o), 0);
    let v = stdout_json(&o);
    assert_eq!(v["schema"], "ugt.rsce/1");
    assert_eq!(v["verdict"], true);
    assert_eq!(v["certificate"]["1"][0]["choices"]["Tbar.root"], "r1");

    let o = ugt(&["rsce", &fixture("ex1.ugt"), "--profile", &fixture("ex1_efr_profile.json"), "--format", "text"]);
    assert_eq!(code(&o), 1);
    assert!(String::from_utf8_lossy(&o.stdout).contains("not a rationalizable"));
}

#[test]
fn discover_writes_trace_and_final_game() {
    let trace = tmp("trace.json");
    let o = ugt(&["discover", &fixture("ex1.ugt"), "--policy", "efr-lex-first", "--seed", "3", "--trace", trace.to_str().unwrap()]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    let golden = std::fs::read_to_string(fixture("ex1_discovered.ugt")).unwrap();
    assert_eq!(String::from_utf8_lossy(&o.stdout), golden);
    let v: Value = serde_json::from_str(&std::fs::read_to_string(&trace).unwrap()).unwrap();
    assert_eq!(v["schema"], "ugt.trace/1");
    assert_eq!(v["absorbing"], true);
    assert_eq!(v["steps"].as_array().unwrap().len(), 1);

    let o = ugt(&["discover", &fixture("ex1.ugt"), "--format", "text"]);
    assert!(String::from_utf8_lossy(&o.stdout).contains("absorbed after 1 step(s)"));
    let o = ugt(&["discover", &fixture("ex1.ugt"), "--format", "dot"]);
    assert!(String::from_utf8_lossy(&o.stdout).starts_with("digraph"));
    let o = ugt(&["discover", &fixture("ex1.ugt"), "--policy", "efr-uniform"]);
    assert_eq!(stdout_json(&o)["schema"], "ugt.trace/1");
}

#[test]
fn pipeline_on_ex1() {
    let o = ugt(&["pipeline", &fixture("ex1.ugt"), "--policy", "efr-lex-first"]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    let v = stdout_json(&o);
    assert_eq!(v["schema"], "ugt.pipeline/1");
    assert_eq!(v["trace"]["steps"].as_array().unwrap().len(), 1);
    let eq = &v["equilibrium"]["players"];
    assert_eq!(eq["1"]["Tbar.root"], serde_json::json!([["r1", "1"]]));
    assert_eq!(eq["2"]["Tbar.d"], serde_json::json!([["m2", "1"]]));

    let o = ugt(&["pipeline", &fixture("pennies.ugt"), "--policy", "efr-uniform", "--format", "text", "--max-denominator", "2"]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    assert!(String::from_utf8_lossy(&o.stdout).contains("equilibrium:"));
}

#[test]
fn dot_marks_cross_tree_sets() {
    let o = ugt(&["dot", &fixture("ex1.ugt")]);
    assert_eq!(code(&o), 0);
    let a = String::from_utf8_lossy(&o.stdout).into_owned();
    let o = ugt(&["dot", &fixture("ex1_discovered.ugt")]);
    let b = String::from_utf8_lossy(&o.stdout).into_owned();
    assert!(a.contains("subgraph \"cluster_Tbar\"") && a.contains("subgraph \"cluster_T\""));
    assert!(ugt_core::dot::cross_tree_arrows(&a) > ugt_core::dot::cross_tree_arrows(&b));
}

#[test]
fn output_flag_writes_file() {
    let path = tmp("report.json");
    let o = ugt(&["validate", &fixture("std1.ugt"), "--output", path.to_str().unwrap()]);
    assert_eq!(code(&o), 0);
    assert!(o.stdout.is_empty());
    let v: Value = serde_json::from_str(&std::fs::read_to_string(&path).unwrap()).unwrap();
    assert_eq!(v["ok"], true);
}

#[test]
fn stdout_is_byte_stable() {
    let runs: &[&[&str]] = &[
        &["efr", "ex1.ugt", "--format", "json"],
        &["pipeline", "ex1.ugt", "--policy", "efr-uniform", "--seed", "5"],
        &["discover", "ex1.ugt", "--policy", "efr-uniform", "--seed", "9"],
        &["dot", "ex1.ugt"],
    ];
    for args in runs {
        let args: Vec<String> = args.iter().map(|a| if a.ends_with(".ugt") { fixture(a) } else { a.to_string() }).collect();
        let args: Vec<&str> = args.iter().map(String::as_str).collect();
        let first = ugt(&args).stdout;
        assert_eq!(first, ugt(&args).stdout);
        let threaded = Command::new(env!("CARGO_BIN_EXE_ugt")).args(&args).env("UGT_THREADS", "1").output().unwrap();
        assert_eq!(first, threaded.stdout, "{args:?}");
    }
}

#[test]
fn help_exits_zero() {
    let o = ugt(&["--help"]);
    assert_eq!(code(&o), 0);
    for cmd in ["validate", "efr", "sce", "rsce", "discover", "pipeline", "dot"] {
        assert!(String::from_utf8_lossy(&o.stdout).contains(cmd));
    }
}
