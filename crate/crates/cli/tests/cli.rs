use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use tempfile::TempDir;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_tree-idioms"))
}

fn run(dir: &Path, args: &[&str]) -> Output {
    bin().current_dir(dir).args(args).output().expect("binary runs")
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

fn ok(dir: &Path, args: &[&str]) -> Output {
    let o = run(dir, args);
    assert!(o.status.success(), "{args:?} failed: {}", stderr(&o));
    o
}

fn mini(args: &[&str]) -> Vec<String> {
    let mut v: Vec<String> = args.iter().map(|s| s.to_string()).collect();
    v.extend(["--grammar".to_string(), "builtin:mini".to_string()]);
    v
}

fn ok_mini(dir: &Path, args: &[&str]) -> Output {
    let v = mini(args);
    ok(dir, &v.iter().map(String::as_str).collect::<Vec<_>>())
}

fn run_mini(dir: &Path, args: &[&str]) -> Output {
    let v = mini(args);
    run(dir, &v.iter().map(String::as_str).collect::<Vec<_>>())
}

/// Demo corpus of `count` programs parsed to `c.trees`, idioms mined to `i.json`.
fn pipeline(count: &str, n: &str) -> TempDir {
    let dir = TempDir::new().unwrap();
    let d = dir.path();
    ok(d, &["demo-corpus", "--count", count, "-o", "c.txt"]);
    ok_mini(d, &["parse", "c.txt", "-o", "c.trees"]);
    ok_mini(d, &["extract", "c.trees", "-n", n, "-o", "i.json"]);
    dir
}

fn read(dir: &Path, name: &str) -> String {
    fs::read_to_string(dir.join(name)).unwrap()
}

#[test]
fn one_program_gives_one_line() {
    let dir = TempDir::new().unwrap();
    let d = dir.path();
    fs::write(d.join("p.txt"), "x = 1 ;\n").unwrap();
    ok_mini(d, &["parse", "p.txt", "-o", "p.trees"]);
    let out = read(d, "p.trees");
    assert_eq!(out.lines().count(), 1);
    assert!(out.starts_with("(Program@0 "));
}

#[test]
fn bad_program_is_reported_with_position_and_others_still_written() {
    let dir = TempDir::new().unwrap();
    let d = dir.path();
    fs::write(d.join("p.txt"), "x = 1 ;\n%%\ny = 2 ;\nif ( y { }\n%%\nz = 3 ;\n").unwrap();
    let o = run_mini(d, &["parse", "p.txt", "-o", "p.trees"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).contains("p.txt:4:8: expected )"), "{}", stderr(&o));
    assert_eq!(read(d, "p.trees").lines().count(), 2);

    let o = run_mini(d, &["parse", "p.txt", "--strict", "-o", "strict.trees"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(!d.join("strict.trees").exists());
}

#[test]
fn new_spellings_need_a_grammar_out() {
    let dir = TempDir::new().unwrap();
    let d = dir.path();
    fs::write(d.join("p.txt"), "quux = 7 ;\n%%\nquux = 7 ;\n").unwrap();
    let o = run_mini(d, &["parse", "p.txt", "-o", "p.trees"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).contains("--grammar-out"));

    ok_mini(d, &["parse", "p.txt", "--grammar-out", "g.json", "-o", "p.trees"]);
    ok(d, &["extract", "p.trees", "--grammar", "g.json", "-o", "i.json"]);
    // The saved grammar can itself be extended further.
    fs::write(d.join("q.txt"), "zork = 8 ;\n").unwrap();
    ok(d, &["parse", "q.txt", "--grammar", "g.json", "--grammar-out", "g2.json", "-o", "q.trees"]);
    // Idioms mined under g.json are refused under the builtin grammar.
    let o = run_mini(d, &["compress", "p.trees", "--idioms", "i.json", "-o", "x.trees"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("fingerprint mismatch"), "{}", stderr(&o));
}

#[test]
fn parse_is_bit_identical_across_runs() {
    let dir = TempDir::new().unwrap();
    let d = dir.path();
    ok(d, &["demo-corpus", "-o", "c.txt"]);
    ok_mini(d, &["parse", "c.txt", "-o", "a.trees"]);
    ok_mini(d, &["--workers", "4", "parse", "c.txt", "-o", "b.trees"]);
    let a = read(d, "a.trees");
    assert_eq!(a.lines().count(), 500);
    assert_eq!(a, read(d, "b.trees"));
}

#[test]
fn zero_budget_extracts_nothing() {
    let dir = pipeline("20", "0");
    let d = dir.path();
    let o = ok_mini(d, &["extract", "c.trees", "-n", "0", "-o", "empty.json"]);
    assert!(stderr(&o).starts_with("0 idioms"));
    let o = ok_mini(d, &["catalog", "--idioms", "empty.json"]);
    assert!(o.stdout.is_empty());
}

#[test]
fn extraction_reruns_are_byte_identical() {
    let dir = pipeline("100", "50");
    let d = dir.path();
    ok_mini(d, &["--workers", "3", "extract", "c.trees", "-n", "50", "-o", "again.json"]);
    assert_eq!(read(d, "i.json"), read(d, "again.json"));
    let json = read(d, "i.json");
    assert!(json.contains("\"format_version\": 1"));
    assert!(json.contains("\"grammar_fingerprint\""));
}

#[test]
fn k_zero_leaves_trees_alone() {
    let dir = pipeline("30", "20");
    let d = dir.path();
    ok_mini(d, &["compress", "c.trees", "--idioms", "i.json", "--k", "0", "-o", "s.trees", "--report", "r.json"]);
    assert_eq!(read(d, "s.trees"), read(d, "c.trees"));
    let report = read(d, "r.json");
    assert!(report.contains("\"mean_ratio\": 0.0"), "{report}");
    assert_eq!(report.matches("\"ratio\": 0.0").count(), 30);

    let o = run_mini(d, &["compress", "c.trees", "--idioms", "i.json", "--k", "21", "-o", "s.trees"]);
    assert_eq!(o.status.code(), Some(2));
    let o = run_mini(d, &["compress", "c.trees", "--idioms", "i.json", "--sweep", "10,5"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn forged_rule_id_is_named_with_its_line() {
    let dir = pipeline("10", "10");
    let d = dir.path();
    ok_mini(d, &["compress", "c.trees", "--idioms", "i.json", "-o", "s.trees"]);
    let mut lines: Vec<String> = read(d, "s.trees").lines().map(String::from).collect();
    let at = lines[2].find('@').unwrap();
    let end = at + 1 + lines[2][at + 1..].find(' ').unwrap();
    lines[2].replace_range(at + 1..end, "9999");
    fs::write(d.join("forged.trees"), lines.join("\n")).unwrap();
    let o = run_mini(d, &["expand", "forged.trees", "--idioms", "i.json", "-o", "e.trees"]);
    assert_eq!(o.status.code(), Some(1));
    let err = stderr(&o);
    assert!(err.contains("forged.trees:3") && err.contains("9999"), "{err}");
}

#[test]
fn empty_input_expands_to_empty_output() {
    let dir = pipeline("10", "5");
    let d = dir.path();
    fs::write(d.join("empty.trees"), "").unwrap();
    ok_mini(d, &["expand", "empty.trees", "--idioms", "i.json", "-o", "e.trees"]);
    assert_eq!(read(d, "e.trees"), "");
}

#[test]
fn verify_catches_a_wrong_original() {
    let dir = pipeline("10", "10");
    let d = dir.path();
    ok_mini(d, &["compress", "c.trees", "--idioms", "i.json", "-o", "s.trees"]);
    let o = ok_mini(d, &["expand", "s.trees", "--idioms", "i.json", "--verify", "c.trees"]);
    assert!(stderr(&o).contains("0 mismatches"));
    let original = read(d, "c.trees");
    let mut lines: Vec<&str> = original.lines().collect();
    lines.swap(0, 1);
    fs::write(d.join("swapped.trees"), lines.join("\n")).unwrap();
    let o = run_mini(d, &["expand", "s.trees", "--idioms", "i.json", "--verify", "swapped.trees"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).contains("2 mismatches"), "{}", stderr(&o));
}

#[test]
fn catalog_entries_are_two_lines() {
    let dir = pipeline("50", "5");
    let d = dir.path();
    let o = ok_mini(d, &["catalog", "--idioms", "i.json", "--top", "1"]);
    let text = String::from_utf8(o.stdout).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines.len(), 2);
    assert!(lines[0].starts_with("#1 (support "));
    // A rank-1 template is exactly two base rules.
    assert_eq!(lines[1].matches('@').count(), 2, "{}", lines[1]);
}

#[test]
fn unsupported_format_version_is_a_usage_error() {
    let dir = pipeline("10", "5");
    let d = dir.path();
    let json = read(d, "i.json").replace("\"format_version\": 1", "\"format_version\": 7");
    fs::write(d.join("v7.json"), json).unwrap();
    let o = run_mini(d, &["catalog", "--idioms", "v7.json"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("format_version 7"));
}

#[test]
fn usage_errors_exit_two() {
    let dir = TempDir::new().unwrap();
    let d = dir.path();
    assert_eq!(run(d, &["extract"]).status.code(), Some(2));
    assert_eq!(run(d, &["--workers", "0", "demo-corpus"]).status.code(), Some(2));
    assert_eq!(run_mini(d, &["extract", "x", "--min-count", "0"]).status.code(), Some(2));
    assert_eq!(run(d, &["catalog", "--grammar", "builtin:java", "--idioms", "i.json"]).status.code(), Some(2));
}

#[test]
fn oracle_is_hidden_but_runs() {
    let dir = TempDir::new().unwrap();
    let d = dir.path();
    let help = String::from_utf8(ok(d, &["--help"]).stdout).unwrap();
    assert!(help.contains("extract") && !help.contains("oracle"));
    let o = ok(d, &["oracle", "--seeds", "3"]);
    let text = String::from_utf8(o.stdout).unwrap();
    assert_eq!(text.lines().count(), 3);
    assert!(!text.contains("MISMATCH"));
}
