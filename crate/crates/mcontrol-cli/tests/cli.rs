use mcontrol::reductions::{partition_to_borda_ccav_mf, PartitionInstance};
use mcontrol_cli::doc::{parse_instance, serialize_instance};
use mcontrol_cli::gen::{for_each_exhaustive, random_instance, Bounds};
use mcontrol::{ControlType, Mode, Rule};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde_json::Value;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

const CCDV: &str = r#"{
  "format_version": 1,
  "system": "plurality",
  "candidates": ["a", "b", "p"],
  "distinguished": "p",
  "control": { "type": "CCDV", "limit": 1 },
  "scenario": { "goal": "constructive", "mode": "M+", "revoting": false },
  "voters": [
    { "ballot": ["a", "p", "b"] },
    { "ballot": ["a", "b", "p"] },
    { "ballot": ["p", "a", "b"] },
    { "ballot": ["b", "p", "a"] }
  ]
}"#;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_mcontrol"))
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().unwrap()
}

fn tmp(name: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("mcontrol-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    dir.join(name)
}

fn write(name: &str, text: &str) -> PathBuf {
    let p = tmp(name);
    std::fs::write(&p, text).unwrap();
    p
}

fn json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).unwrap()
}

fn path(p: &Path) -> &str {
    p.to_str().unwrap()
}

#[test]
fn minimal_document_parses() {
    let inst = parse_instance(CCDV).unwrap();
    assert_eq!(inst.rule, Rule::Plurality);
    assert_eq!(inst.names, ["a", "b", "p"]);
    assert_eq!(inst.p, 2);
    assert_eq!(inst.limit, 1);
    assert_eq!(inst.voters.len(), 4);
}

#[test]
fn manipulator_with_ballot_is_rejected_with_path() {
    let bad = CCDV.replace(r#"{ "ballot": ["b", "p", "a"] }"#, r#"{ "ballot": ["b", "p", "a"], "manipulator": true }"#);
    let err = parse_instance(&bad).unwrap_err().to_string();
    assert!(err.contains("voters[3].ballot"), "{err}");
}

#[test]
fn syntax_and_unknown_field_errors_carry_positions() {
    let err = parse_instance("{\n  \"format_version\": 1,\n  oops").unwrap_err().to_string();
    assert!(err.contains("line 3"), "{err}");
    let extra = CCDV.replace("\"distinguished\"", "\"colour\": 1, \"distinguished\"");
    assert!(parse_instance(&extra).unwrap_err().to_string().contains("colour"));
}

#[test]
fn goal_must_match_type_and_limit_must_be_present() {
    let wrong = CCDV.replace("constructive", "destructive");
    assert!(parse_instance(&wrong).unwrap_err().to_string().contains("scenario.goal"));
    let nolimit = CCDV.replace(", \"limit\": 1", "");
    assert!(parse_instance(&nolimit).unwrap_err().to_string().contains("control.limit"));
}

#[test]
fn partition_image_round_trips() {
    for w in [vec![1, 1], vec![1, 3], vec![2, 2, 4]] {
        let inst = partition_to_borda_ccav_mf(&PartitionInstance::new(w).unwrap()).unwrap();
        assert_eq!(parse_instance(&serialize_instance(&inst)).unwrap(), inst);
    }
}

#[test]
fn generated_instances_round_trip() {
    let bounds: Bounds = "c=3,v=3,m=1,w=2".parse().unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for rule in [Rule::Plurality, Rule::Approval, Rule::Condorcet, Rule::Veto] {
        for ctype in ControlType::ALL {
            for mode in Mode::ALL {
                let mut n = 0;
                for_each_exhaustive(rule, ctype, mode, &bounds, &mut |inst| {
                    if n % 37 == 0 {
                        assert_eq!(parse_instance(&serialize_instance(&inst)).unwrap(), inst);
                    }
                    n += 1;
                });
                let inst = random_instance(&mut rng, rule, ctype, mode, &bounds).unwrap();
                assert_eq!(parse_instance(&serialize_instance(&inst)).unwrap(), inst);
            }
        }
    }
}

#[test]
fn bounds_parse_and_print() {
    let b: Bounds = "c=2, v=3,m=1,w=4".parse().unwrap();
    assert_eq!(b.to_string(), "c=2,v=3,m=1,w=4");
    assert!("c=3,x=1".parse::<Bounds>().is_err());
    assert!("c".parse::<Bounds>().is_err());
}

#[test]
fn solve_both_agrees_on_zero_manipulator_ccdv() {
    // Deleting one a-voter leaves a three-way tie.
    let p = write("ccdv.json", CCDV);
    let out = run(&["solve", path(&p), "--method", "both", "--format", "json"]);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    assert_eq!(v["agreement"], Value::Bool(true));
    assert_eq!(v["answer"], Value::Bool(true));
    assert!(v["timings"].is_object());
}

#[test]
fn solve_exit_codes() {
    let no = CCDV.replace("\"limit\": 1", "\"limit\": 0");
    let p = write("ccdv0.json", &no);
    assert_eq!(run(&["solve", path(&p)]).status.code(), Some(1));
    assert_eq!(run(&["solve", "/nonexistent/file.json"]).status.code(), Some(2));
    let g = write("garbage.json", "not json");
    assert_eq!(run(&["solve", path(&g)]).status.code(), Some(2));
    // Veto has no CCDV solver in the cooperative mode.
    let veto = CCDV.replace("plurality", "veto");
    let v = write("veto.json", &veto);
    assert_eq!(run(&["solve", path(&v), "--method", "direct"]).status.code(), Some(2));
    assert_eq!(run(&["solve", path(&v), "--method", "oracle"]).status.code(), Some(0));
    let o = run(&["solve", path(&p), "--method", "oracle", "--budget", "0"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("budget"));
}

#[test]
fn reduce_partition_borda() {
    let f = tmp("pb11.json");
    let out = run(&["reduce", "partition-borda", "1", "1", "--out", path(&f)]);
    assert_eq!(out.status.code(), Some(0));
    assert!(String::from_utf8_lossy(&out.stderr).contains("expected answer: false"));
    let s = run(&["solve", path(&f), "--method", "oracle", "--format", "json", "--no-timings"]);
    assert_eq!(s.status.code(), Some(1));
    assert_eq!(json(&s)["answer"], Value::Bool(false));

    let odd = run(&["reduce", "partition-borda", "1", "2"]);
    assert_eq!(odd.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&odd.stderr).contains("odd"));
}

#[test]
fn reduce_qbf2_nonpartition_yes_image() {
    let f = tmp("ccac.json");
    let out = run(&["reduce", "qbf2-nonpartition", "CCAC", "CF", "(or x1 (not x2))", "--out", path(&f)]);
    assert_eq!(out.status.code(), Some(0));
    assert!(String::from_utf8_lossy(&out.stderr).contains("source: true"));
    assert_eq!(run(&["solve", path(&f), "--method", "oracle"]).status.code(), Some(0));
}

#[test]
fn reduce_qbf2_ccpv_and_qbf3_revoting() {
    let out = run(&["reduce", "qbf2-ccpv", "TP", "MF", "(and x1 x2)"]);
    assert_eq!(out.status.code(), Some(0));
    assert!(String::from_utf8_lossy(&out.stderr).contains("source: false"));
    let f = write("ccpv.json", &String::from_utf8(out.stdout).unwrap());
    assert_eq!(run(&["solve", path(&f), "--method", "oracle"]).status.code(), Some(1));

    let out = run(&["reduce", "qbf3-revoting", "(or x1 x2 (not x3))"]);
    assert_eq!(out.status.code(), Some(0));
    let f = write("rev.json", &String::from_utf8(out.stdout).unwrap());
    assert_eq!(run(&["solve", path(&f), "--method", "oracle"]).status.code(), Some(0));
}

#[test]
fn reduce_inheritance() {
    let src = write("src.json", CCDV);
    let f = tmp("inh.json");
    let out = run(&["reduce", "inherit-control", path(&src), "CF", "--out", path(&f)]);
    assert_eq!(out.status.code(), Some(0));
    assert!(String::from_utf8_lossy(&out.stderr).contains("source: true"));
    assert_eq!(run(&["solve", path(&f)]).status.code(), Some(0));

    let manip = CCDV.replace(r#"{ "ballot": ["b", "p", "a"] }"#, r#"{ "ballot": null, "manipulator": true }"#);
    let src = write("manip.json", &manip);
    let out = run(&["reduce", "inherit-manip", path(&src), "DCDV", "MF", "--out", path(&f)]);
    assert_eq!(out.status.code(), Some(0));
    let err = String::from_utf8_lossy(&out.stderr).to_string();
    assert!(err.contains("complement: true") && err.contains("expected answer: false"), "{err}");
    assert_eq!(run(&["solve", path(&f), "--method", "oracle"]).status.code(), Some(1));
}

#[test]
fn enumerate_lists_actions() {
    let p = write("enum.json", CCDV);
    let out = run(&["enumerate", path(&p), "--format", "json"]);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    assert_eq!(v["action_count"], "5");
    assert_eq!(v["profile_count"], "1");
    assert_eq!(v["actions"].as_array().unwrap().len(), 5);
    assert_eq!(v["actions"][1]["delete_voters"][0], "voters[0]");
}

#[test]
fn fuzz_empty_bounds_give_empty_report() {
    let out = run(&["fuzz", "--bounds", "c=0", "--exhaustive", "--format", "json", "--no-timings"]);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    assert_eq!(v["total_instances"], 0);
    assert!(v.get("elapsed_ms").is_none());
}

#[test]
fn injected_fault_is_caught_and_replayable() {
    let dir = tmp("mismatches");
    let out = run(&[
        "fuzz", "--rules", "plurality", "--types", "CCDV", "--modes", "CF", "--bounds", "c=2,v=2,m=1", "--exhaustive",
        "--inject-fault", "--max-reported", "3", "--save-mismatches", path(&dir), "--format", "json",
    ]);
    assert_eq!(out.status.code(), Some(1));
    let v = json(&out);
    assert!(v["total_mismatches"].as_u64().unwrap() >= 1);
    assert_eq!(v["mismatches"].as_array().unwrap().len(), 3);
    let mut files: Vec<_> = std::fs::read_dir(&dir).unwrap().map(|e| e.unwrap().path()).collect();
    files.sort();
    assert_eq!(files.len(), 3);
    // The saved file replays: its oracle answer is the reported one.
    let oracle = v["mismatches"][0]["oracle"].as_bool().unwrap();
    let s = run(&["solve", path(&files[0]), "--method", "oracle"]);
    assert_eq!(s.status.code(), Some(if oracle { 0 } else { 1 }));
}

#[test]
fn fuzz_sampled_run_is_clean() {
    let out = run(&["fuzz", "--count", "30", "--seed", "5", "--bounds", "c=3,v=4,m=2,w=3", "--no-timings"]);
    let text = String::from_utf8_lossy(&out.stdout).to_string();
    assert!(text.contains("mismatches=0 incomplete=false"), "{text}");
    assert_eq!(out.status.code(), Some(0));
}
