use std::path::Path;
use std::process::{Command, Output};

use tempfile::TempDir;

fn antclust(dir: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_antclust"))
        .current_dir(dir)
        .args(args)
        .output()
        .expect("binary runs")
}

fn write_matrix(dir: &Path, name: &str, text: &str) {
    std::fs::write(dir.join(name), text).unwrap();
}

const FOUR_ITEMS: &str = "4\n1 0.99 0.01 0\n0.99 1 0.02 0.01\n0.01 0.02 1 0.99\n0 0.01 0.99 1\n";

#[test]
fn cluster_writes_one_row_per_item() {
    let dir = TempDir::new().unwrap();
    write_matrix(dir.path(), "m.txt", FOUR_ITEMS);
    let out = antclust(dir.path(), &["cluster", "--matrix", "m.txt", "--seed", "7", "--out", "labels.csv"]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let text = std::fs::read_to_string(dir.path().join("labels.csv")).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines.len(), 5);
    assert_eq!(lines[0], "item,label");
    assert!(lines[1].starts_with("0,"));
}

#[test]
fn unknown_flag_is_usage_error() {
    let dir = TempDir::new().unwrap();
    let out = antclust(dir.path(), &["cluster", "--bogus"]);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn missing_input_is_usage_error() {
    let dir = TempDir::new().unwrap();
    let out = antclust(dir.path(), &["cluster", "--out", "x.csv"]);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn asymmetric_matrix_is_data_error_naming_the_cell() {
    let dir = TempDir::new().unwrap();
    write_matrix(dir.path(), "bad.txt", "2\n1 0.5\n0.4 1\n");
    let out = antclust(dir.path(), &["cluster", "--matrix", "bad.txt", "--out", "x.csv"]);
    assert_eq!(out.status.code(), Some(2));
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("(0, 1)"), "{err}");
    assert!(!dir.path().join("x.csv").exists());
}

#[test]
fn out_of_range_matrix_is_data_error() {
    let dir = TempDir::new().unwrap();
    write_matrix(dir.path(), "bad.txt", "2\n1 1.5\n1.5 1\n");
    let out = antclust(dir.path(), &["cluster", "--matrix", "bad.txt", "--out", "x.csv"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn gen_data_cluster_ari_round_trip() {
    let dir = TempDir::new().unwrap();
    let gen = antclust(dir.path(), &["gen-data", "--clusters", "3", "--tuples", "8", "--seed", "5", "--out", "d.csv"]);
    assert!(gen.status.success());
    assert!(dir.path().join("d_truth.csv").exists());

    let cl = antclust(dir.path(), &["cluster", "--csv", "d.csv", "--seed", "1", "--out", "l.csv"]);
    assert!(cl.status.success(), "{}", String::from_utf8_lossy(&cl.stderr));

    let ari = antclust(dir.path(), &["ari", "d_truth.csv", "l.csv"]);
    assert!(ari.status.success());
    let score: f64 = String::from_utf8_lossy(&ari.stdout).trim().parse().unwrap();
    assert!((-1.0..=1.0).contains(&score));
}

#[test]
fn ari_of_identical_files_is_one() {
    let dir = TempDir::new().unwrap();
    std::fs::write(dir.path().join("a.csv"), "item,label\n0,3\n1,3\n2,5\n").unwrap();
    let out = antclust(dir.path(), &["ari", "a.csv", "a.csv"]);
    assert_eq!(String::from_utf8_lossy(&out.stdout).trim(), "1");
}

#[test]
fn config_file_with_flag_override() {
    let dir = TempDir::new().unwrap();
    write_matrix(dir.path(), "m.txt", FOUR_ITEMS);
    std::fs::write(
        dir.path().join("run.conf"),
        "# engine settings\nmatrix = m.txt\nseed = 7\nout = from_config.csv\n",
    )
    .unwrap();
    let a = antclust(dir.path(), &["cluster", "--config", "run.conf"]);
    assert!(a.status.success(), "{}", String::from_utf8_lossy(&a.stderr));
    assert!(dir.path().join("from_config.csv").exists());

    let b = antclust(dir.path(), &["cluster", "--config", "run.conf", "--out", "from_flag.csv"]);
    assert!(b.status.success());
    assert!(dir.path().join("from_flag.csv").exists());
    assert_eq!(
        std::fs::read(dir.path().join("from_config.csv")).unwrap(),
        std::fs::read(dir.path().join("from_flag.csv")).unwrap()
    );
}

#[test]
fn unknown_config_key_is_rejected() {
    let dir = TempDir::new().unwrap();
    write_matrix(dir.path(), "m.txt", FOUR_ITEMS);
    std::fs::write(dir.path().join("run.conf"), "matrix = m.txt\ncolour = blue\n").unwrap();
    let out = antclust(dir.path(), &["cluster", "--config", "run.conf", "--out", "x.csv"]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("colour"));
}

#[test]
fn baseline_dbscan_separates_blocks() {
    let dir = TempDir::new().unwrap();
    write_matrix(dir.path(), "m.txt", FOUR_ITEMS);
    let out = antclust(dir.path(), &["baseline-dbscan", "--matrix", "m.txt", "--out", "db.csv"]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let text = std::fs::read_to_string(dir.path().join("db.csv")).unwrap();
    assert_eq!(text, "item,label\n0,0\n1,0\n2,1\n3,1\n");
}

#[test]
fn small_benchmark_writes_csv_and_summary() {
    let dir = TempDir::new().unwrap();
    let out = antclust(
        dir.path(),
        &["benchmark", "--clusters", "2..3", "--tuples", "3..4", "--reps", "2", "--jobs", "1", "--out", "grid.csv"],
    );
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let csv = std::fs::read_to_string(dir.path().join("grid.csv")).unwrap();
    assert_eq!(csv.lines().count(), 1 + 2 * 2 * 2);
    let json: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(dir.path().join("grid.json")).unwrap()).unwrap();
    assert_eq!(json["cells"].as_array().unwrap().len(), 4);
}

#[test]
fn descriptor_hex_input() {
    let dir = TempDir::new().unwrap();
    let hex = "00ff00ff 00ff00fe\n00ff00ff\nff00ff00 ff00ff01\n";
    std::fs::write(dir.path().join("d.hex"), hex).unwrap();
    let out = antclust(dir.path(), &["cluster", "--descriptors-hex", "d.hex", "--seed", "2", "--out", "l.csv"]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    assert_eq!(std::fs::read_to_string(dir.path().join("l.csv")).unwrap().lines().count(), 4);
}
