use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;

fn tim(args: &[&str], dir: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_tim"))
        .args(args)
        .current_dir(dir)
        .env_remove("TIM_SEED")
        .output()
        .expect("run tim")
}

fn fixture(name: &str) -> String {
    let p: PathBuf = [env!("CARGO_MANIFEST_DIR"), "..", "core", "fixtures", name].iter().collect();
    p.display().to_string()
}

fn scheme_fixture() -> String {
    let p: PathBuf = [env!("CARGO_MANIFEST_DIR"), "tests", "data", "ex5_scheme.json"].iter().collect();
    p.display().to_string()
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

fn records(text: &str) -> Vec<Value> {
    text.lines().map(|l| serde_json::from_str(l).unwrap()).collect()
}

#[test]
fn gen_validates_and_handles_empty_sets() {
    let dir = tempfile::tempdir().unwrap();
    let bad = tim(&["gen", "er", "--k", "6", "--p", "1.5", "--out", "bad"], dir.path());
    assert_eq!(bad.status.code(), Some(2), "{}", stderr(&bad));

    let empty = tim(&["gen", "er", "--k", "6", "--p", "0.4", "--count", "0", "--out", "empty"], dir.path());
    assert!(empty.status.success());
    let manifest: Value = serde_json::from_str(&std::fs::read_to_string(dir.path().join("empty/manifest.json")).unwrap()).unwrap();
    assert_eq!(manifest["count"], 0);

    // An empty dataset solves to a header-only table.
    let solved = tim(&["solve", "empty", "--out", "r.jsonl"], dir.path());
    assert!(solved.status.success());
    assert_eq!(stdout(&solved).lines().count(), 1);
}

#[test]
fn gen_is_reproducible_from_the_seed() {
    let dir = tempfile::tempdir().unwrap();
    for out in ["a", "b"] {
        let o = tim(&["gen", "er", "--k", "6", "--p", "0.4", "--count", "5", "--seed", "7", "--out", out], dir.path());
        assert!(o.status.success());
    }
    let o = Command::new(env!("CARGO_BIN_EXE_tim"))
        .args(["gen", "er", "--k", "6", "--p", "0.4", "--count", "5", "--out", "c"])
        .current_dir(dir.path())
        .env("TIM_SEED", "7")
        .output()
        .unwrap();
    assert!(o.status.success());
    let read = |d: &str| std::fs::read_to_string(dir.path().join(d).join("instance_00004.json")).unwrap();
    assert_eq!(read("a"), read("b"));
    assert_eq!(read("a"), read("c"));
}

#[test]
fn solve_reproduces_the_worked_examples() {
    let dir = tempfile::tempdir().unwrap();
    let names = ["ex2", "ex3", "ex4", "ex5", "ex6", "ex9", "ex10"];
    let paths: Vec<String> = names.iter().map(|n| fixture(&format!("{n}.json"))).collect();
    let mut args = vec!["solve", "--out", "-"];
    args.extend(paths.iter().map(String::as_str));
    let o = tim(&args, dir.path());
    assert!(o.status.success(), "{}", stderr(&o));
    let recs = records(&stdout(&o));
    assert!(recs[0].get("config").is_some());
    let got: Vec<(&str, &str)> = recs[1..].iter().map(|r| (r["dof"].as_str().unwrap(), r["method"].as_str().unwrap())).collect();
    assert_eq!(
        got,
        [("1/2", "OSIA"), ("1/3", "OSIA"), ("2/5", "OVIA"), ("1/3", "SSIA"), ("1/3", "OSIA"), ("1/3", "SSIA"), ("1/3", "SSIA")]
    );
    for n in ["2", "3"] {
        let o = tim(&["solve", "--n", n, "--out", "-", &fixture("ex7.json")], dir.path());
        let want = if n == "2" { "1/4" } else { "1/3" };
        assert_eq!(records(&stdout(&o))[1]["dof"], want);
    }
}

#[test]
fn unreadable_instances_become_error_rows() {
    let dir = tempfile::tempdir().unwrap();
    std::fs::write(dir.path().join("broken.json"), "{\"nodes\": 2, \"edges\": [[1, 3]]}").unwrap();
    let o = tim(&["solve", "broken.json", &fixture("ex2.json"), "--out", "r.jsonl", "--table", "t.csv"], dir.path());
    assert!(o.status.success());
    let recs = records(&std::fs::read_to_string(dir.path().join("r.jsonl")).unwrap());
    assert!(recs[1]["error"].as_str().unwrap().contains("unknown node 3"));
    assert_eq!(recs[2]["dof"], "1/2");
    let table = std::fs::read_to_string(dir.path().join("t.csv")).unwrap();
    assert!(table.lines().nth(1).unwrap().starts_with("broken.json,1,1,"));
}

#[test]
fn job_count_does_not_change_records() {
    let dir = tempfile::tempdir().unwrap();
    assert!(tim(&["gen", "er", "--k", "6", "--p", "0.4", "--count", "12", "--out", "d"], dir.path()).status.success());
    let run = |jobs: &str| {
        let o = tim(&["solve", "d", "--jobs", jobs, "--out", "-"], dir.path());
        assert!(o.status.success());
        stdout(&o).lines().skip(1).map(str::to_string).collect::<Vec<_>>()
    };
    assert_eq!(run("1"), run("3"));
}

#[test]
fn proportions_partition_each_row() {
    let dir = tempfile::tempdir().unwrap();
    assert!(tim(&["gen", "er", "--k", "6", "--p", "0.5", "--count", "30", "--out", "d"], dir.path()).status.success());
    let o = tim(&["solve", "d", "--methods", "osia,ovia,ssia", "--out", "r.jsonl", "--table", "t.csv"], dir.path());
    assert!(o.status.success());
    let table = std::fs::read_to_string(dir.path().join("t.csv")).unwrap();
    let mut lines = table.lines();
    assert_eq!(lines.next().unwrap(), "source,instances,errors,TDMA,OSIA,OVIA,SSIA,reach_bound");
    let row: Vec<f64> = lines.next().unwrap().split(',').skip(3).map(|x| x.parse().unwrap()).collect();
    assert!((row[..4].iter().sum::<f64>() - 1.0).abs() < 1e-3);
}

#[test]
fn bound_prints_fraction_and_witness() {
    let dir = tempfile::tempdir().unwrap();
    let o = tim(&["bound", &fixture("ex8.json")], dir.path());
    let r = &records(&stdout(&o))[0];
    assert_eq!(r["bound"], "1/3");
    assert_eq!(r["witness"].as_array().unwrap().len(), 3);
}

#[test]
fn verify_accepts_ex5_and_rejects_a_corruption() {
    let dir = tempfile::tempdir().unwrap();
    let ok = tim(&["verify", "--instance", &fixture("ex5.json"), "--scheme", &scheme_fixture()], dir.path());
    assert_eq!(ok.status.code(), Some(0), "{}", stderr(&ok));
    assert_eq!(records(&stdout(&ok))[0]["valid"], true);

    let mut scheme: Value = serde_json::from_str(&std::fs::read_to_string(scheme_fixture()).unwrap()).unwrap();
    scheme["assignment"]["4"] = scheme["assignment"]["1"].clone();
    std::fs::write(dir.path().join("bad.json"), scheme.to_string()).unwrap();
    let bad = tim(&["verify", "--instance", &fixture("ex5.json"), "--scheme", "bad.json"], dir.path());
    assert_eq!(bad.status.code(), Some(1));
    assert!(stderr(&bad).contains("node(s) 4"), "{}", stderr(&bad));

    let missing = tim(&["verify", "--instance", "nope.json", "--scheme", "bad.json"], dir.path());
    assert_eq!(missing.status.code(), Some(2));
}

#[test]
fn export_is_byte_identical() {
    let dir = tempfile::tempdir().unwrap();
    let args = ["export", "--instance", &fixture("ex5.json"), "--scheme", &scheme_fixture()];
    let (a, b) = (tim(&args, dir.path()), tim(&args, dir.path()));
    assert!(a.status.success());
    assert_eq!(a.stdout, b.stdout);
    assert!(stdout(&a).contains("4 [label=\"4: [1 0 0]\"];"));

    std::fs::write(dir.path().join("col.json"), r#"{"colors": {"1": 1, "2": 2, "3": 3, "4": 4}, "palette": 4, "local_width": 4}"#).unwrap();
    let c = tim(&["export", "--instance", &fixture("ex5.json"), "--coloring", "col.json", "--json", "e.json"], dir.path());
    assert!(c.status.success());
    assert!(stdout(&c).contains("2 [label=\"2: color 2\"];"));
    assert!(dir.path().join("e.json").is_file());
}

#[test]
fn untrained_checkpoint_evaluates_and_best_of_is_monotone() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    assert!(tim(&["gen", "er-chi", "--k", "8", "--chi", "3", "--count", "12", "--seed", "1", "--out", "g"], d).status.success());
    let t = tim(&["train", "g", "--iterations", "0", "--hidden", "8", "--checkpoint", "c.json", "--log", "log.csv"], d);
    assert!(t.status.success(), "{}", stderr(&t));
    let ratio = |k: &str| {
        let out = format!("r{k}.json");
        let o = tim(&["eval", "g", "--checkpoint", "c.json", "--rollouts", k, "--out", &out], d);
        assert!(o.status.success(), "{}", stderr(&o));
        let r: Value = serde_json::from_str(&std::fs::read_to_string(d.join(out)).unwrap()).unwrap();
        r["results"][0]["ratio"].as_f64().unwrap()
    };
    let (one, twenty) = (ratio("1"), ratio("20"));
    assert!(twenty >= one, "{twenty} < {one}");

    let mismatch = tim(&["eval", "g", "--checkpoint", "c.json", "--colors", "4"], d);
    assert_eq!(mismatch.status.code(), Some(2));
}

#[test]
fn usage_errors_exit_two() {
    let dir = tempfile::tempdir().unwrap();
    assert_eq!(tim(&["frobnicate"], dir.path()).status.code(), Some(2));
    assert_eq!(tim(&["solve", "missing-dir"], dir.path()).status.code(), Some(2));
    assert_eq!(tim(&["--help"], dir.path()).status.code(), Some(0));
}
