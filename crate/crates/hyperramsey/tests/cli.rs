use std::path::Path;
use std::process::{Command, Output};

use hyperramsey::format::{read_coloring, write_coloring, Layout};
use hyperramsey_core::model::ColorId;
use serde_json::Value;

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_hyperramsey")).args(args).output().expect("binary runs")
}

fn code(out: &Output) -> i32 {
    out.status.code().expect("exited normally")
}

fn stdout(out: &Output) -> String {
    String::from_utf8_lossy(&out.stdout).into_owned()
}

fn read_json(path: &Path) -> Value {
    serde_json::from_str(&std::fs::read_to_string(path).unwrap()).unwrap()
}

fn p(path: &Path) -> &str {
    path.to_str().unwrap()
}

#[test]
fn extract_on_constant_coloring_succeeds_and_reverifies() {
    let dir = tempfile::tempdir().unwrap();
    let report = dir.path().join("report.json");
    let witness = dir.path().join("witness.json");
    let out = run(&[
        "extract", "--gen", "constant", "--n-vertices", "32", "--colors", "2", "--d", "3", "--part-size", "2",
        "--mode", "adaptive", "--report", p(&report), "--witness", p(&witness),
    ]);
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    let json = read_json(&report);
    assert_eq!(json["outcome"]["status"], "success");
    assert_eq!(json["witness"]["kind"], "multipartite");
    let parts = json["witness"]["parts"].as_array().unwrap();
    assert_eq!(parts.len(), 3);
    assert!(parts.iter().all(|p| p.as_array().unwrap().len() == 2));
    assert_eq!(json["census"]["total"], 20);
    assert!(json["trace"]["rounds"].as_array().is_some());
    for w in [&report, &witness] {
        let v = run(&["verify", "--witness", p(w)]);
        assert_eq!(code(&v), 0, "{}", stdout(&v));
        assert!(stdout(&v).starts_with("valid"));
    }
}

#[test]
fn verify_reports_a_flipped_triple() {
    let dir = tempfile::tempdir().unwrap();
    let file = dir.path().join("c.tc3");
    let report = dir.path().join("report.json");
    let out = run(&[
        "gen", "--gen", "blockmix", "--n-vertices", "48", "--colors", "2", "--seed", "3", "--blocks", "2",
        "--explicit", "--out", p(&file),
    ]);
    assert_eq!(code(&out), 0);
    assert!(std::fs::read_to_string(&file).unwrap().starts_with("tc3 1 explicit N=48 l=2\n"));
    let out = run(&["extract", "--in", p(&file), "--d", "3", "--part-size", "1", "--report", p(&report)]);
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    assert_eq!(code(&run(&["verify", "--in", p(&file), "--witness", p(&report)])), 0);

    let json = read_json(&report);
    let parts: Vec<u32> = json["witness"]["parts"]
        .as_array()
        .unwrap()
        .iter()
        .map(|part| part[0].as_u64().unwrap() as u32)
        .collect();
    let color = json["witness"]["color"].as_u64().unwrap() as u8;
    let coloring = read_coloring(&file).unwrap();
    let flipped = coloring.with_recolored([parts[0], parts[1], parts[2]], ColorId(1 - color)).unwrap();
    let bad = dir.path().join("flipped.tc3");
    write_coloring(&flipped, Layout::Native, &bad).unwrap();

    let out = run(&["verify", "--in", p(&bad), "--witness", p(&report)]);
    assert_eq!(code(&out), 4);
    let mut sorted = parts.clone();
    sorted.sort();
    let expected = format!("({}, {}, {})", sorted[0], sorted[1], sorted[2]);
    assert!(stdout(&out).contains(&expected), "{}", stdout(&out));
}

#[test]
fn discrepancy_experiment_stays_within_bound() {
    let dir = tempfile::tempdir().unwrap();
    let report = dir.path().join("d.json");
    let out = run(&[
        "experiment", "discrepancy", "--n-vertices", "2048", "--colors", "2", "--subset-size", "32", "--samples",
        "10000", "--seed", "9", "--report", p(&report),
    ]);
    assert_eq!(code(&out), 0);
    let json = read_json(&report);
    let dev = json["result"]["max_deviation"].as_f64().unwrap();
    assert!(dev <= 0.1, "{dev}");
    assert_eq!(json["result"]["samples"], 10000);
}

fn strip_volatile(mut v: Value) -> Value {
    let obj = v.as_object_mut().unwrap();
    obj.remove("wall_time_secs");
    obj.remove("peak_memory_bytes");
    v
}

#[test]
fn identical_runs_give_identical_reports() {
    let args = [
        "almost-mono", "--gen", "uniform", "--n-vertices", "200", "--colors", "2", "--seed", "7", "--epsilon", "1",
    ];
    let a = run(&args);
    let b = run(&args);
    assert_eq!(code(&a), 0, "{}", String::from_utf8_lossy(&a.stderr));
    let va: Value = serde_json::from_slice(&a.stdout).unwrap();
    let vb: Value = serde_json::from_slice(&b.stdout).unwrap();
    assert_eq!(strip_volatile(va.clone()), strip_volatile(vb));
    // field order is stable
    let text = stdout(&a);
    let keys = ["\"command\"", "\"config\"", "\"outcome\"", "\"witness\"", "\"result\"", "\"census\"", "\"trace\""];
    let at: Vec<usize> = keys.iter().map(|k| text.find(k).unwrap()).collect();
    assert!(at.windows(2).all(|w| w[0] < w[1]));
    assert_eq!(va["result"]["d"], 3);
}

#[test]
fn almost_mono_report_reverifies() {
    let dir = tempfile::tempdir().unwrap();
    let report = dir.path().join("r.json");
    let out = run(&[
        "almost-mono", "--gen", "blockmix", "--n-vertices", "300", "--colors", "3", "--seed", "1", "--blocks", "3",
        "--epsilon", "1", "--report", p(&report),
    ]);
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    assert_eq!(read_json(&report)["witness"]["kind"], "almost_mono");
    assert_eq!(code(&run(&["verify", "--witness", p(&report)])), 0);
}

#[test]
fn failures_are_structured() {
    let dir = tempfile::tempdir().unwrap();
    let report = dir.path().join("fail.json");
    // parts of 10 exhaust a 40-vertex uniform coloring
    let out = run(&[
        "extract", "--gen", "uniform", "--n-vertices", "40", "--colors", "2", "--seed", "1", "--d", "3",
        "--part-size", "10", "--report", p(&report),
    ]);
    assert_eq!(code(&out), 3);
    let json = read_json(&report);
    assert_eq!(json["outcome"]["status"], "failure");
    assert!(json["outcome"]["kind"].is_string());
    assert!(json["trace"]["rounds"].is_array());
    assert!(json["witness"].is_null());
}

#[test]
fn usage_errors_exit_2() {
    let dir = tempfile::tempdir().unwrap();
    let file = dir.path().join("c.tc3");
    assert_eq!(code(&run(&["extract", "--in", p(&file), "--gen", "uniform", "--d", "3"])), 2);
    assert_eq!(code(&run(&["extract", "--in", p(&file), "--d", "3"])), 2);
    assert_eq!(code(&run(&["gen", "--gen", "blockmix", "--n-vertices", "9", "--colors", "2", "--out", p(&file)])), 2);
    assert_eq!(code(&run(&["frobnicate"])), 2);
    assert_eq!(code(&run(&["almost-mono", "--gen", "uniform", "--n-vertices", "9", "--colors", "2", "--epsilon", "0"])), 2);
    std::fs::write(&file, "tc3 1 explicit N=3 l=2\nz\n").unwrap();
    let out = run(&["extract", "--in", p(&file), "--d", "3"]);
    assert_eq!(code(&out), 2);
    assert!(String::from_utf8_lossy(&out.stderr).contains("byte offset 23"));
    assert_eq!(code(&run(&["--help"])), 0);
}

#[test]
fn oracle_commands() {
    let dir = tempfile::tempdir().unwrap();
    let table = dir.path().join("r2.txt");
    let out = run(&["oracle", "r2", "--k", "3", "--colors", "2", "--table-out", p(&table)]);
    assert_eq!(code(&out), 0);
    let json: Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(json["result"]["value"], 6);
    assert_eq!(json["result"]["witness_order"], 5);
    assert_eq!(std::fs::read_to_string(&table).unwrap(), "r2 k=3 l=2 value=6 proof=exhaustive seed-independent\n");

    let out = run(&["oracle", "r2", "--k", "3", "--colors", "3", "--max-subsets", "1000"]);
    assert_eq!(code(&out), 3);

    let out = run(&[
        "oracle", "max-almost-mono", "--gen", "uniform", "--n-vertices", "9", "--colors", "2", "--seed", "1",
        "--cross-check",
    ]);
    assert_eq!(code(&out), 0);
    let json: Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(json["result"]["paths_agree"], true);
    assert!(json["result"]["size"].as_u64().unwrap() >= 3);

    // strict rounds come from the table: d = 4 needs r_2(3; 2) = 6, so n = floor(2^-6 sqrt(8)) = 0
    let out = run(&[
        "extract", "--gen", "constant", "--n-vertices", "256", "--colors", "2", "--d", "4", "--mode", "strict",
        "--r2-table", p(&table),
    ]);
    assert_eq!(code(&out), 3);
    let json: Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(json["config"]["request"]["r_cap"], 6);
    assert_eq!(json["outcome"]["kind"], "strict_size_underflow");
}
