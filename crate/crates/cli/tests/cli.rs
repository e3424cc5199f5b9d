use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use tempfile::TempDir;

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_clique-qml"))
        .args(args)
        .env_remove("CLIQUE_QML_OUT_DIR")
        .output()
        .expect("binary runs")
}

fn code(out: &Output) -> i32 {
    out.status.code().expect("exit code")
}

fn stderr(out: &Output) -> String {
    String::from_utf8_lossy(&out.stderr).into_owned()
}

fn p(path: &Path) -> &str {
    path.to_str().unwrap()
}

const SMALL_TRAIN: &[&str] =
    &["--epochs", "2", "--seeds", "2", "--repetitions", "2", "--train-size", "10", "--batch-size", "5"];

#[test]
fn gen_data_writes_a_balanced_dataset() {
    let dir = TempDir::new().unwrap();
    let path = dir.path().join("data.jsonl");
    let out = run(&["gen-data", "--qubits", "6", "--clique", "4", "--size", "200", "--seed", "1", "--out", p(&path)]);
    assert_eq!(code(&out), 0, "{}", stderr(&out));
    assert!(String::from_utf8_lossy(&out.stdout).contains("100 with clique, 100 without"));
    let text = fs::read_to_string(&path).unwrap();
    assert_eq!(text.lines().count(), 201);
    assert!(text.lines().next().unwrap().contains("\"clique-dataset\""));

    let again = dir.path().join("again.jsonl");
    run(&["gen-data", "--qubits", "6", "--clique", "4", "--size", "200", "--seed", "1", "--out", p(&again)]);
    assert_eq!(fs::read(&path).unwrap(), fs::read(&again).unwrap());
}

#[test]
fn train_writes_curve_seed_table_and_manifest() {
    let dir = TempDir::new().unwrap();
    let out_dir = dir.path().join("res");
    let mut args = vec!["train", "--ansatz", "perm", "--qubits", "5", "--clique", "3", "--dataset-size", "30"];
    args.extend_from_slice(SMALL_TRAIN);
    args.extend_from_slice(&["--out-dir", p(&out_dir)]);
    let out = run(&args);
    assert_eq!(code(&out), 0, "{}", stderr(&out));

    let curve = fs::read_to_string(out_dir.join("Accuracy_Sn_Average_5_qubits.csv")).unwrap();
    let lines: Vec<&str> = curve.lines().collect();
    assert_eq!(lines[0], "Epoch,Node_Avg,Node_Avg_Error");
    assert_eq!(lines.len(), 3);
    assert!(lines[1].starts_with("1,") && lines[2].starts_with("2,"));

    let seeds = fs::read_to_string(out_dir.join("Accuracy_Sn_Average_5_qubits_seeds.csv")).unwrap();
    assert_eq!(seeds.lines().next(), Some("Epoch,Seed,Node_Avg"));
    assert_eq!(seeds.lines().count(), 5);

    let manifest: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(out_dir.join("Accuracy_Sn_Average_5_qubits.manifest.json")).unwrap())
            .unwrap();
    assert_eq!(manifest["config"]["repetitions"], 2);
    assert_eq!(manifest["artifacts"].as_array().unwrap().len(), 2);
}

#[test]
fn manifest_reruns_reproduce_the_curve() {
    let dir = TempDir::new().unwrap();
    let data = dir.path().join("data.jsonl");
    assert_eq!(code(&run(&["gen-data", "--qubits", "5", "--clique", "3", "--size", "40", "--out", p(&data)])), 0);

    let first = dir.path().join("first");
    let mut args = vec!["train", "--ansatz", "cyclic", "--dataset", p(&data)];
    args.extend_from_slice(SMALL_TRAIN);
    args.extend_from_slice(&["--out-dir", p(&first)]);
    let out = run(&args);
    assert_eq!(code(&out), 0, "{}", stderr(&out));

    let second = dir.path().join("second");
    let manifest = first.join("Accuracy_Cn_Average_5_qubits.manifest.json");
    let out = run(&["train", "--from-manifest", p(&manifest), "--out-dir", p(&second)]);
    assert_eq!(code(&out), 0, "{}", stderr(&out));
    let name = "Accuracy_Cn_Average_5_qubits.csv";
    assert_eq!(fs::read(first.join(name)).unwrap(), fs::read(second.join(name)).unwrap());
}

#[test]
fn report_merges_curves_and_warns_on_length_mismatch() {
    let dir = TempDir::new().unwrap();
    let a = dir.path().join("a.csv");
    let b = dir.path().join("b.csv");
    fs::write(&a, "Epoch,Node_Avg,Node_Avg_Error\n1,0.5,0.1\n2,0.6,0.05\n3,0.7,0.01\n").unwrap();
    fs::write(&b, "Epoch,Node_Avg,Node_Avg_Error\n1,0.4,0\n2,0.45,0\n").unwrap();
    let merged = dir.path().join("merged.csv");
    let out = run(&["report", p(&a), p(&b), "--out", p(&merged)]);
    assert_eq!(code(&out), 0, "{}", stderr(&out));
    assert!(stderr(&out).contains("warning"));
    let stdout = String::from_utf8_lossy(&out.stdout);
    assert!(stdout.contains("0.6000 ± 0.0500") && stdout.contains("0.4500 ± 0.0000"), "{stdout}");
    assert_eq!(
        fs::read_to_string(&merged).unwrap(),
        "Epoch,a_Node_Avg,a_Node_Avg_Error,b_Node_Avg,b_Node_Avg_Error\n1,0.5,0.1,0.4,0\n2,0.6,0.05,0.45,0\n"
    );
}

#[test]
fn malformed_curve_is_a_data_error_naming_the_row() {
    let dir = TempDir::new().unwrap();
    let bad = dir.path().join("bad.csv");
    fs::write(&bad, "Epoch,Node_Avg,Node_Avg_Error\n1,0.5,0.1\n2,oops,0.1\n").unwrap();
    let out = run(&["report", p(&bad)]);
    assert_eq!(code(&out), 2);
    assert!(stderr(&out).contains("line 3"), "{}", stderr(&out));
}

#[test]
fn exit_codes_follow_the_error_class() {
    let dir = TempDir::new().unwrap();
    let out_dir = dir.path().join("x");
    let o = p(&out_dir);
    // usage and configuration
    assert_eq!(code(&run(&["train", "--ansatz", "bogus", "--out-dir", o])), 1);
    assert_eq!(code(&run(&["train", "--ansatz", "cyclic", "--qubits", "4", "--clique", "3", "--out-dir", o])), 1);
    assert_eq!(code(&run(&["train", "--ansatz", "perm", "--clique", "7", "--out-dir", o])), 1);
    assert_eq!(code(&run(&["train", "--ansatz", "perm", "--lr", "-1", "--out-dir", o])), 1);
    assert_eq!(code(&run(&["train", "--out-dir", o])), 1);
    assert_eq!(code(&run(&["frobnicate"])), 1);
    // data and generation
    let data = dir.path().join("d.jsonl");
    let gen = run(&["gen-data", "--qubits", "5", "--clique", "5", "--size", "4", "--edge-prob-range", "0,0", "--out", p(&data)]);
    assert_eq!(code(&gen), 2, "{}", stderr(&gen));
    assert_eq!(code(&run(&["report", p(&dir.path().join("missing.csv"))])), 2);
    fs::write(&data, "{not json\n").unwrap();
    assert_eq!(code(&run(&["train", "--ansatz", "perm", "--dataset", p(&data), "--out-dir", o])), 2);
    // help
    assert_eq!(code(&run(&["--help"])), 0);
    assert!(!out_dir.exists());
}
