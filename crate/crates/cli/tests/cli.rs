use std::collections::BTreeSet;
use std::path::Path;
use std::process::Command as Process;

use crossed_cube::DiagnosisModel;
use crossed_cube_cli::{run, Campaign, Command, DiagnoseMode, ExitStatus, ExportFormat};
use serde_json::Value;

fn campaign(command: Command, n: u32) -> Campaign {
    Campaign {
        command,
        n,
        out: None,
        workers: 2,
        seed: 0,
        budget: None,
        checkpoint: None,
        resume: None,
        halt_after: None,
    }
}

fn report(c: &Campaign) -> (ExitStatus, Value) {
    let outcome = run(c).unwrap();
    (outcome.status, serde_json::from_str(&outcome.report).unwrap())
}

fn without_timing(mut v: Value) -> Value {
    v.as_object_mut().unwrap().remove("elapsed_ms");
    v
}

fn cqnet(args: &[&str]) -> (i32, String) {
    let out = Process::new(env!("CARGO_BIN_EXE_cqnet")).args(args).output().unwrap();
    (out.status.code().unwrap(), String::from_utf8(out.stdout).unwrap())
}

#[test]
fn classify_cq4_six_faults_is_clean() {
    let (status, v) = report(&campaign(Command::Classify { size: 6 }, 4));
    assert_eq!(status, ExitStatus::Ok);
    assert_eq!(v["complete"], true);
    assert_eq!(v["violation_count"], 0);
    assert_eq!(v["total_subsets"], 8008);
    let sum: u64 = v["condition_histogram"].as_object().unwrap().values().map(|x| x.as_u64().unwrap()).sum();
    assert_eq!(sum, 8008);
}

#[test]
fn extra_conn_cq4_reports_exact_value_with_valid_witness() {
    let (status, v) = report(&campaign(Command::ExtraConn { g: 3 }, 4));
    assert_eq!(status, ExitStatus::Ok);
    assert_eq!(v["status"], "exact");
    let labels: Vec<u32> = serde_json::from_value(v["witness_decimal"].clone()).unwrap();
    assert_eq!(labels.len() as u64, v["value"].as_u64().unwrap());
    let cube = crossed_cube::CrossedCube::new(4).unwrap();
    let set = crossed_cube::VertexSet::from_labels(cube.dim(), labels).unwrap();
    assert!(crossed_cube::structure::is_g_extra_cut(&cube, &set, 3).unwrap());
}

#[test]
fn under_budget_extra_conn_is_refused_with_bracket() {
    let mut c = campaign(Command::ExtraConn { g: 3 }, 5);
    c.budget = Some(1000);
    let (status, v) = report(&c);
    assert_eq!(status, ExitStatus::Incomplete);
    assert_eq!(v["status"], "refused");
    assert!(v["lower"].as_u64().unwrap() <= 11);
    assert!(v["upper"].as_u64().unwrap() >= 11);
}

#[test]
fn witness_cq7_has_expected_sizes() {
    let (status, v) = report(&campaign(Command::Witness, 7));
    assert_eq!(status, ExitStatus::Ok);
    assert_eq!(v["na_size"], 19);
    assert_eq!(v["f2_size"], 23);
    let f1: BTreeSet<String> = serde_json::from_value(v["f1"].clone()).unwrap();
    let f2: BTreeSet<String> = serde_json::from_value(v["f2"].clone()).unwrap();
    let a: BTreeSet<String> = serde_json::from_value(v["a"].clone()).unwrap();
    assert!(f1.is_subset(&f2));
    assert_eq!(f2.difference(&f1).cloned().collect::<BTreeSet<_>>(), a);
}

#[test]
fn exhaustive_diagnose_returns_counterexample_pair() {
    let c = campaign(
        Command::Diagnose { g: 3, t: Some(11), model: DiagnosisModel::Pmc, mode: DiagnoseMode::Exhaustive },
        4,
    );
    let (status, v) = report(&c);
    assert_eq!(status, ExitStatus::Counterexample);
    assert_eq!(v["verdict"], "not-diagnosable");
    assert_eq!(v["witness"]["first_size"], 7);
    assert_eq!(v["witness"]["second_size"], 11);
    assert_eq!(v["syndrome_check"]["oracle_shared_syndrome"], true);
}

#[test]
fn reports_are_deterministic_apart_from_timing() {
    let c = campaign(
        Command::Diagnose { g: 3, t: Some(20), model: DiagnosisModel::MmStar, mode: DiagnoseMode::Witness },
        6,
    );
    let (_, a) = report(&c);
    let mut c2 = c.clone();
    c2.workers = 1;
    let (_, b) = report(&c2);
    assert_eq!(without_timing(a), without_timing(b));
}

#[test]
fn halted_census_resumes_to_uninterrupted_result() {
    let dir = tempfile::tempdir().unwrap();
    let cp = dir.path().join("census.json");
    let full = campaign(Command::MinCuts { g: 0, size: 8 }, 5);
    let (status, whole) = report(&full);
    assert_eq!(status, ExitStatus::Ok);

    let mut halted = full.clone();
    halted.checkpoint = Some(cp.clone());
    halted.halt_after = Some(1);
    let (status, partial) = report(&halted);
    assert_eq!(status, ExitStatus::Incomplete);
    assert_eq!(partial["complete"], false);
    assert!(cp.exists());

    let mut resumed = full.clone();
    resumed.resume = Some(cp.clone());
    resumed.workers = 1;
    let (status, finished) = report(&resumed);
    assert_eq!(status, ExitStatus::Ok);
    assert_eq!(without_timing(finished), without_timing(whole));
}

#[test]
fn resume_rejects_mismatched_checkpoint() {
    let dir = tempfile::tempdir().unwrap();
    let cp = dir.path().join("census.json");
    let mut halted = campaign(Command::MinCuts { g: 0, size: 8 }, 5);
    halted.checkpoint = Some(cp.clone());
    halted.halt_after = Some(1);
    report(&halted);
    let mut other = campaign(Command::MinCuts { g: 1, size: 8 }, 5);
    other.resume = Some(cp);
    assert!(run(&other).is_err());
}

#[test]
fn out_file_receives_report() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("topology.json");
    let mut c = campaign(Command::VerifyTopology, 6);
    c.out = Some(path.clone());
    let outcome = run(&c).unwrap();
    assert_eq!(outcome.status, ExitStatus::Ok);
    let v: Value = serde_json::from_str(&std::fs::read_to_string(&path).unwrap()).unwrap();
    assert_eq!(v["passed"], true);
    assert_eq!(v["flat_edges"], 192);
}

#[test]
fn edge_export_matches_json_descriptor() {
    let edges = run(&campaign(Command::Gen { format: ExportFormat::Edges }, 4)).unwrap().report;
    let json: Value =
        serde_json::from_str(&run(&campaign(Command::Gen { format: ExportFormat::Json }, 4)).unwrap().report).unwrap();
    let from_text: Vec<[u32; 2]> = edges
        .lines()
        .map(|l| {
            let mut it = l.split_whitespace().map(|x| x.parse().unwrap());
            [it.next().unwrap(), it.next().unwrap()]
        })
        .collect();
    let from_json: Vec<[u32; 2]> = serde_json::from_value(json["edges"].clone()).unwrap();
    assert_eq!(from_text.len(), 32);
    assert_eq!(from_text, from_json);
    let dot = run(&campaign(Command::Gen { format: ExportFormat::Dot }, 4)).unwrap().report;
    assert_eq!(dot.matches(" -- ").count(), 32);
}

#[test]
fn binary_exit_codes() {
    assert_eq!(cqnet(&["--n", "4", "witness"]).0, 0);
    assert_eq!(cqnet(&["--n", "4", "diagnose", "--t", "11", "--mode", "witness"]).0, 1);
    assert_eq!(cqnet(&["--n", "5", "extra-conn", "--budget", "10"]).0, 2);
    assert_eq!(cqnet(&["bogus"]).0, 3);
    assert_eq!(cqnet(&["--n", "9", "diagnose", "--t", "3"]).0, 3);
    assert_eq!(cqnet(&["--n", "5", "classify", "--size", "4"]).0, 3);
    assert_eq!(cqnet(&["--help"]).0, 0);
}

#[test]
fn binary_writes_out_file_and_keeps_stdout_empty() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("w.json");
    let (code, stdout) = cqnet(&["--n", "5", "witness", "--out", path.to_str().unwrap()]);
    assert_eq!(code, 0);
    assert!(stdout.is_empty());
    let v: Value = serde_json::from_str(&std::fs::read_to_string(Path::new(&path)).unwrap()).unwrap();
    assert_eq!(v["n"], 5);
}
