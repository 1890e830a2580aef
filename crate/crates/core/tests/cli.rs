use std::path::Path;
use std::process::{Command, Output};

const BIN: &str = env!("CARGO_BIN_EXE_teleport-sim");

fn sim(args: &[&str]) -> Output {
    Command::new(BIN).args(args).output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

#[test]
fn verify_default_passes() {
    let o = sim(&["verify"]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let text = stdout(&o);
    assert!(text.contains("17/17 checks passed"));
    for name in ["sqtp.regrouped", "kak.post_second_xor", "kak.simplified"] {
        assert!(text.contains(name));
    }
}

#[test]
fn verify_json_is_reproducible() {
    let dir = tempfile::tempdir().unwrap();
    let (a, b) = (dir.path().join("a.json"), dir.path().join("b.json"));
    for p in [&a, &b] {
        let o = sim(&["verify", "--seed", "42", "--format", "json", "--out", p.to_str().unwrap()]);
        assert!(o.status.success());
    }
    assert_eq!(std::fs::read(&a).unwrap(), std::fs::read(&b).unwrap());
}

#[test]
fn corrupted_golden_file_fails() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("golden.json");
    let bundled = teleport_core::report::BUNDLED;
    let corrupted = bundled.replace("|11>(a|1> - b|0>)", "|11>(a|1> + b|0>)");
    assert_ne!(bundled, corrupted, "corruption target not found");
    std::fs::write(&path, corrupted).unwrap();
    let o = sim(&["verify", "--golden", path.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&o.stderr).contains("sqtp.regrouped"));
    assert!(stdout(&o).contains("FAIL"));
}

#[test]
fn unreadable_golden_file_is_an_error() {
    let o = sim(&["verify", "--golden", "/nonexistent/golden.json"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn compare_ideal_table() {
    let o = sim(&["compare", "--protocol", "both", "--runs", "50", "--seed", "3"]);
    assert!(o.status.success());
    let text = stdout(&o);
    let rows: Vec<Vec<&str>> = text.lines().skip(1).map(|l| l.split_whitespace().collect()).collect();
    assert_eq!(rows[0][0], "sqtp");
    assert_eq!(rows[0][4..], ["2", "2"]);
    assert_eq!(rows[1][0], "kak");
    assert_eq!(rows[1][4..], ["1", "1"]);
}

#[test]
fn compare_json_is_reproducible() {
    let args = ["compare", "--runs", "40", "--seed", "7", "--noise-f", "0.8", "--distill-target", "0.9", "--format", "json"];
    let (a, b) = (sim(&args), sim(&args));
    assert!(a.status.success());
    assert_eq!(a.stdout, b.stdout);
    let v: serde_json::Value = serde_json::from_slice(&a.stdout).unwrap();
    assert_eq!(v["per_run"].as_array().unwrap().len(), 80);
    assert!(v["summary"]["kak"]["locc_bits"].as_u64().unwrap() > 0);
}

#[test]
fn compare_rejects_bad_config() {
    for args in [
        &["compare", "--runs", "0"][..],
        &["compare", "--noise-f", "1.5"],
        &["compare", "--distill-target", "0.9"],
    ] {
        assert_eq!(sim(args).status.code(), Some(2), "{args:?}");
    }
}

#[test]
fn sweep_csv() {
    let o = sim(&["sweep", "--grid", "0.55:0.95:0.1", "--seed", "1"]);
    assert!(o.status.success());
    let text = stdout(&o);
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines[0], "F_in,success_prob,F_out,rounds_to_target,locc_bits,total_bits_sqtp,total_bits_kak");
    assert_eq!(lines.len(), 6);
}

#[test]
fn sweep_single_perfect_point() {
    let o = sim(&["sweep", "--noise-f", "1"]);
    assert!(o.status.success());
    let text = stdout(&o);
    let row: Vec<&str> = text.lines().nth(1).unwrap().split(',').collect();
    for field in &row[..3] {
        assert!((field.parse::<f64>().unwrap() - 1.0).abs() < 1e-12, "{row:?}");
    }
    assert_eq!(row[3..], ["0", "0", "2", "1"]);
}

#[test]
fn empty_grid_writes_nothing() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("sweep.csv");
    let o = sim(&["sweep", "--grid", "0.9:0.5:0.1", "--out", out.to_str().unwrap()]);
    assert_ne!(o.status.code(), Some(0));
    assert!(!Path::new(&out).exists());
}

#[test]
fn unwritable_output_names_path() {
    let o = sim(&["compare", "--runs", "1", "--out", "/nonexistent/dir/report.txt"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("/nonexistent/dir/report.txt"));
}
