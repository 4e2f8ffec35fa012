//! End-to-end checks of the binary: output shapes and exit codes.

use std::path::Path;
use std::process::Command;

fn untwist() -> Command {
    Command::new(env!("CARGO_BIN_EXE_untwist"))
}

fn data(name: &str) -> String {
    Path::new(env!("CARGO_MANIFEST_DIR"))
        .join("../../data")
        .join(name)
        .display()
        .to_string()
}

#[test]
fn torus_subcommand_prints_invariants() {
    let out = untwist().args(["torus", "7", "8"]).output().unwrap();
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.contains("genus       = 21"));
    assert!(
        text.contains("V           = [6, 6, 6, 6, 6, 5, 4, 3, 3, 3"),
        "{text}"
    );
}

#[test]
fn torus_rejects_bad_parameters() {
    let out = untwist().args(["torus", "2", "4"]).output().unwrap();
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn lens_json_uses_rational_encoding() {
    let out = untwist()
        .args(["lens", "23", "17", "--format", "json"])
        .output()
        .unwrap();
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    let v: serde_json::Value = serde_json::from_str(&text).unwrap();
    assert_eq!(v["d"][0], "-29/46");
}

#[test]
fn forms_lists_both_classes_for_21() {
    let out = untwist()
        .args([
            "forms",
            "--det",
            "21",
            "--parity",
            "odd",
            "--definite",
            "pos",
        ])
        .output()
        .unwrap();
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.contains("[[5,2],[2,5]]"));
    assert!(text.contains("[[11,10],[10,11]]"));
}

#[test]
fn analyze_reports_json() {
    let out = untwist()
        .args([
            "analyze",
            "--data",
            &data("knots_8.json"),
            "--knot",
            "7_7",
            "--format",
            "json",
        ])
        .output()
        .unwrap();
    assert!(out.status.success());
    let v: serde_json::Value =
        serde_json::from_str(&String::from_utf8(out.stdout).unwrap()).unwrap();
    assert_eq!(v["knot"], "7_7");
    assert_eq!(v["possible"][0], "2+");
}

#[test]
fn analyze_unknown_knot_is_an_input_error() {
    let out = untwist()
        .args(["analyze", "--data", &data("knots_8.json"), "--knot", "0_0"])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn table_check_exits_two_on_any_mismatch() {
    // the bundled expected table differs from the engine on the 8_7 row
    // (its stored unknown column is inconsistent with the Arf rule), so the
    // check reports a diff
    let out = untwist()
        .args([
            "table",
            "--data",
            &data("knots_8.json"),
            "--check",
            &data("expected_table.txt"),
        ])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(2));
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.contains("35 rows, 1 mismatching, 0 missing"), "{text}");
    assert!(text.contains("DIFF 8_7"), "{text}");
}

#[test]
fn table_check_passes_on_consistent_subset() {
    // restricting the expected table to every row the engine reproduces
    // verbatim must exit 0
    let full = std::fs::read_to_string(data("expected_table.txt")).unwrap();
    let subset: String = full
        .lines()
        .filter(|l| !l.trim_start().starts_with("8_7"))
        .collect::<Vec<_>>()
        .join("\n");
    let dir = std::env::temp_dir().join("untwist-cli-test");
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join("expected_34.txt");
    std::fs::write(&path, subset).unwrap();
    let out = untwist()
        .args([
            "table",
            "--data",
            &data("knots_8.json"),
            "--check",
            path.to_str().unwrap(),
        ])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.contains("34 rows, 0 mismatching, 0 missing"), "{text}");
}
