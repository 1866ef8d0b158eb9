use std::io::Write;
use std::process::{Command, Output, Stdio};

use serde_json::Value;

fn mil(args: &[&str], stdin: Option<&str>) -> Output {
    let mut child = Command::new(env!("CARGO_BIN_EXE_mil"))
        .args(args)
        .stdin(Stdio::piped())
        .stdout(Stdio::piped())
        .stderr(Stdio::piped())
        .spawn()
        .unwrap();
    let mut pipe = child.stdin.take().unwrap();
    pipe.write_all(stdin.unwrap_or("").as_bytes()).unwrap();
    drop(pipe);
    child.wait_with_output().unwrap()
}

fn json(o: &Output) -> Value {
    serde_json::from_slice(&o.stdout).unwrap()
}

const CLAW_BLACK: &str = r#"{"vertices":["c","a","b","d"],"edges":[["c","a"],["c","b"],["c","d"]],
"colors":{"c":"black","a":"black","b":"black","d":"black"}}"#;

#[test]
fn black_gadget_has_nine_vertices_and_edges() {
    let o = mil(&["gadget", "black-gadget"], None);
    assert_eq!(o.status.code(), Some(0));
    let v = json(&o);
    assert_eq!(v["vertices"].as_array().unwrap().len(), 9);
    assert_eq!(v["edges"].as_array().unwrap().len(), 9);
}

#[test]
fn fig6_representation_validates() {
    let o = mil(
        &["validate", "--graph", "fig6-graph", "--rep", "fig6-rep", "--require", "unit,colored"],
        None,
    );
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stdout));
}

#[test]
fn failed_requirement_exits_one() {
    let o = mil(
        &["validate", "--graph", "fig6-graph", "--rep", "fig6-rep", "--require", "depth=1"],
        None,
    );
    assert_eq!(o.status.code(), Some(1));
    assert!(!json(&o)["class_violations"].as_array().unwrap().is_empty());
}

#[test]
fn black_claw_is_rejected_by_both_oracles() {
    let o = mil(&["recognize", "--oracle", "both", "--colored"], Some(CLAW_BLACK));
    assert_eq!(o.status.code(), Some(1));
    let v = json(&o);
    assert_eq!(v["order"]["answer"], "no");
    assert_eq!(v["splits"]["answer"], "no");
    assert_eq!(v["agree"], true);
}

#[test]
fn white_claw_has_a_family() {
    let white = CLAW_BLACK.replace("black", "white");
    let o = mil(&["recognize", "--colored"], Some(&white));
    assert_eq!(o.status.code(), Some(0));
    let v = json(&o);
    assert_eq!(v["splits"]["answer"], "yes");
    assert!(v["order"]["family"]["intervals"].is_object());
}

#[test]
fn forbidden_exits_one_on_a_certificate() {
    let o = mil(&["forbidden"], Some(CLAW_BLACK));
    assert_eq!(o.status.code(), Some(1));
    assert_eq!(json(&o)["certificate"]["kind"], "claw");
    let path = r#"{"vertices":["a","b","c"],"edges":[["a","b"],["b","c"]]}"#;
    assert_eq!(mil(&["forbidden"], Some(path)).status.code(), Some(0));
}

#[test]
fn empty_pipeline_exits_zero() {
    let o = mil(&["pipeline", "--count", "0"], None);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(json(&o)["summary"]["instances"], 0);
}

#[test]
fn pipeline_output_is_reproducible() {
    let dir = tempfile::tempdir().unwrap();
    let run = |name: &str, jobs: &str| {
        let p = dir.path().join(name);
        let args = ["pipeline", "--seed", "3", "--count", "5", "--oracle", "order", "--jobs", jobs, "--output"];
        let o = mil(&[&args[..], &[p.to_str().unwrap()]].concat(), None);
        assert_eq!(o.status.code(), Some(0));
        std::fs::read(p).unwrap()
    };
    assert_eq!(run("a.json", "1"), run("b.json", "3"));
}

#[test]
fn reduce_reads_dimacs() {
    let cnf = mil(&["gadget", "padding-block-cnf"], None);
    let o = mil(&["reduce"], Some(std::str::from_utf8(&cnf.stdout).unwrap()));
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let v = json(&o);
    assert_eq!(v["vertex_roles"].as_object().unwrap().len(), 24);
    assert_eq!(v["size_stats"]["edges"], 51);
}

#[test]
fn input_errors_exit_two() {
    assert_eq!(mil(&["reduce"], Some("p cnf 2 1\n1 x 0\n")).status.code(), Some(2));
    assert_eq!(mil(&["gadget", "nope"], None).status.code(), Some(2));
    assert_eq!(mil(&["recognize", "--input", "/no/such/file"], None).status.code(), Some(2));
    assert_eq!(mil(&["frobnicate"], None).status.code(), Some(2));
}

#[test]
fn exhausted_budget_exits_three() {
    // with the center listed last the lifted claw takes minutes to decide
    let claw = r#"{"vertices":["a","b","d","e","c"],"edges":[["c","a"],["c","b"],["c","d"],["c","e"]]}"#;
    let lifted = json(&mil(&["lift", "--d", "3"], Some(claw)))["graph"].to_string();
    let o = mil(&["recognize", "--d", "3", "--oracle", "order", "--unbounded", "--budget-ms", "50"], Some(&lifted));
    assert_eq!(o.status.code(), Some(3), "{}", String::from_utf8_lossy(&o.stderr));
    assert_eq!(json(&o)["order"]["answer"], "budget_exhausted");
}

#[test]
fn depth_of_a_representation() {
    let o = mil(&["depth", "--input", "fig9-rep"], None);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(json(&o)["depth"], 4);
}

#[test]
fn lift_adds_a_gadget_per_vertex() {
    let o = mil(&["lift", "--d", "3"], Some(r#"{"vertices":["a","b"],"edges":[["a","b"]]}"#));
    assert_eq!(o.status.code(), Some(0));
    let v = json(&o);
    // two hubs with five leaves each
    assert_eq!(v["added_vertices"], 24);
    assert_eq!(v["graph"]["vertices"].as_array().unwrap().len(), 26);
}

#[test]
fn default_pipeline_is_equisatisfiable() {
    let o = mil(&["pipeline", "--seed", "1", "--count", "50", "--max-vars", "4"], None);
    assert_eq!(o.status.code(), Some(0));
    let v = json(&o);
    let records = v["records"].as_array().unwrap();
    assert_eq!(records.len(), 50);
    assert!(records.iter().all(|r| r["equisatisfiable"] == true && r["dimacs_round_trip"] == true));
    assert_eq!(v["summary"]["failed"], 0);
}

#[test]
fn padding_block_agrees_in_the_pipeline() {
    let o = mil(&["pipeline", "--count", "0", "--input", "padding-block-cnf"], None);
    assert_eq!(o.status.code(), Some(0));
    let r = &json(&o)["records"][0];
    assert_eq!(r["id"], "padding-block-cnf");
    assert_eq!(r["check"]["order"], "yes");
    assert_eq!(r["check"]["agree"], true);
}
