use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn root() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../..")
}

fn fixture(name: &str) -> String {
    root().join("fixtures").join(name).to_string_lossy().into_owned()
}

fn fakb(args: &[&str]) -> Output {
    fakb_env(args, &[])
}

fn fakb_env(args: &[&str], env: &[(&str, &str)]) -> Output {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_fakb"));
    for var in [
        "FAKB_EPSILON",
        "FAKB_MAX_ITER",
        "FAKB_THETA",
        "FAKB_SEMANTICS",
        "FAKB_FORMAT",
        "FAKB_EXPORT_GRAPH",
    ] {
        cmd.env_remove(var);
    }
    cmd.args(args).envs(env.iter().copied()).output().expect("run fakb")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn stderr(o: &Output) -> String {
    String::from_utf8(o.stderr.clone()).unwrap()
}

fn code(o: &Output) -> i32 {
    o.status.code().expect("exit code")
}

/// Compares against `tests/golden/<name>`; `UPDATE_GOLDEN=1` rewrites it.
fn golden(name: &str, actual: &str) {
    let path = Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/golden").join(name);
    if std::env::var_os("UPDATE_GOLDEN").is_some() {
        fs::write(&path, actual).unwrap();
        return;
    }
    let expected = fs::read_to_string(&path).unwrap_or_else(|e| panic!("{}: {e}", path.display()));
    assert_eq!(actual, expected, "golden {name}");
}

#[test]
fn extract_reproduces_the_debate_fixtures() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().to_str().unwrap();
    let o = fakb(&["extract", &fixture("debate.json"), "--out-dir", out]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    for (produced, expected) in [
        ("source.fabox", "debate_source.fabox"),
        ("updated.fabox", "debate_updated.fabox"),
    ] {
        let a = fs::read(dir.path().join(produced)).unwrap();
        let b = fs::read(fixture(expected)).unwrap();
        assert!(a == b, "{produced} differs from {expected}");
    }
    let summary = stdout(&o);
    assert!(
        summary.starts_with("arguments: 3\nattacks: 1\nsupports: 1\n"),
        "{summary}"
    );
}

#[test]
fn extract_json_writes_json_faboxes() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().to_str().unwrap();
    let o = fakb(&["--format", "json", "extract", &fixture("debate.json"), "-o", out]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    let summary: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(summary["arguments"], 3);
    for name in ["source.json", "updated.json"] {
        let text = fs::read_to_string(dir.path().join(name)).unwrap();
        serde_json::from_str::<serde_json::Value>(&text).unwrap();
    }
}

#[test]
fn extract_high_theta_drops_relations() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().to_str().unwrap();
    let o = fakb(&["extract", &fixture("debate.json"), "-o", out, "--theta", "0.5"]);
    assert_eq!(code(&o), 0);
    assert!(stdout(&o).contains("attacks: 0\nsupports: 0\n"));
}

#[test]
fn extract_exports_graph() {
    let dir = tempfile::tempdir().unwrap();
    let graph = dir.path().join("graph.json");
    let o = fakb(&[
        "extract",
        &fixture("debate.json"),
        "-o",
        dir.path().to_str().unwrap(),
        "--export-graph",
        graph.to_str().unwrap(),
    ]);
    assert_eq!(code(&o), 0);
    let g: serde_json::Value = serde_json::from_str(&fs::read_to_string(graph).unwrap()).unwrap();
    let a1 = g["nodes"].as_array().unwrap().iter().find(|n| n["id"] == "a1").unwrap();
    assert_eq!(a1["type"], "argument");
    assert_eq!(a1["initial"], 0.7);
    assert!((a1["strength"].as_f64().unwrap() - 71.0 / 101.0).abs() < 1e-12);
    let edges = g["edges"].as_array().unwrap();
    assert!(edges
        .iter()
        .any(|e| e["type"] == "att" && e["source"] == "a2" && e["target"] == "a1"));
    assert!(edges
        .iter()
        .any(|e| e["type"] == "instance" && e["target"] == "concept:Left"));
}

#[test]
fn extract_bad_fixture_reports_the_field() {
    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.json");
    let mut doc: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(fixture("debate.json")).unwrap()).unwrap();
    doc["prompted_strengths"][1] = serde_json::json!("high");
    fs::write(&bad, doc.to_string()).unwrap();
    let o = fakb(&["extract", bad.to_str().unwrap(), "-o", dir.path().to_str().unwrap()]);
    assert_eq!(code(&o), 2);
    assert!(stderr(&o).contains("prompted_strengths[1]"), "{}", stderr(&o));
}

#[test]
fn check_debate_is_consistent() {
    let o = fakb(&["check", &fixture("debate_updated.fabox"), &fixture("debate.tbox")]);
    assert_eq!(code(&o), 0);
    golden("check_debate.txt", &stdout(&o));
}

#[test]
fn check_reports_the_violated_inclusion() {
    let o = fakb(&["check", &fixture("debate_conflict.fabox"), &fixture("debate.tbox")]);
    assert_eq!(code(&o), 1);
    golden("check_conflict.txt", &stdout(&o));

    let o = fakb(&[
        "--format",
        "tsv",
        "check",
        &fixture("debate_conflict.fabox"),
        &fixture("debate.tbox"),
    ]);
    assert_eq!(code(&o), 1);
    assert_eq!(stdout(&o), "kb\tLeft <= not Right\tg\t1.000000\t1.000000\n");

    let o = fakb(&[
        "--format",
        "json",
        "check",
        &fixture("debate_conflict.fabox"),
        &fixture("debate.tbox"),
    ]);
    let doc: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(doc["consistent"], false);
    assert_eq!(doc["kb"]["violations"][0]["witnesses"][0]["individuals"][0], "g");
}

#[test]
fn check_without_tbox_is_structural_only() {
    let o = fakb(&["check", &fixture("debate_conflict.fabox")]);
    assert_eq!(code(&o), 0);
    assert_eq!(stdout(&o), "fabox: consistent\n");
}

#[test]
fn check_missing_file_is_a_usage_error() {
    let o = fakb(&["check", &fixture("does-not-exist.fabox")]);
    assert_eq!(code(&o), 2);
    assert!(stderr(&o).starts_with("error: cannot read"));
}

#[test]
fn strengths_of_the_debate() {
    let o = fakb(&["strengths", &fixture("debate_source.fabox")]);
    assert_eq!(code(&o), 0);
    golden("strengths_debate.txt", &stdout(&o));
}

#[test]
fn strengths_of_a_cycle() {
    let o = fakb(&["strengths", "--format", "tsv", &fixture("cycle.fabox")]);
    assert_eq!(code(&o), 0);
    golden("strengths_cycle.tsv", &stdout(&o));
}

#[test]
fn strengths_not_converging_exit_one() {
    let o = fakb(&["strengths", "--max-iter", "1", &fixture("cycle.fabox")]);
    assert_eq!(code(&o), 1);
    assert!(stderr(&o).contains("did not converge"));
    assert!(stdout(&o).contains("converged: false"));
}

#[test]
fn environment_overrides_defaults_and_flags_override_environment() {
    let o = fakb_env(&["strengths", &fixture("cycle.fabox")], &[("FAKB_MAX_ITER", "1")]);
    assert_eq!(code(&o), 1);
    let o = fakb_env(
        &["strengths", "--max-iter", "100", &fixture("cycle.fabox")],
        &[("FAKB_MAX_ITER", "1")],
    );
    assert_eq!(code(&o), 0);
    let o = fakb_env(&["strengths", &fixture("cycle.fabox")], &[("FAKB_FORMAT", "json")]);
    let doc: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(doc["converged"], true);
}

#[test]
fn invalid_settings_are_usage_errors() {
    for args in [
        vec!["--epsilon", "0", "strengths"],
        vec!["--theta", "1.5", "strengths"],
        vec!["--semantics", "nope", "strengths"],
        vec!["--format", "xml", "strengths"],
    ] {
        let mut args = args;
        let f = fixture("cycle.fabox");
        args.push(&f);
        assert_eq!(code(&fakb(&args)), 2, "{args:?}");
    }
    assert_eq!(code(&fakb(&[])), 2);
}

#[test]
fn query_threshold() {
    let o = fakb(&[
        "query",
        &fixture("debate_updated.fabox"),
        &fixture("debate.tbox"),
        "Arg(?x) > 0.75",
    ]);
    assert_eq!(code(&o), 0);
    assert_eq!(stdout(&o), "a3\t0.800000\n");
}

#[test]
fn query_uses_the_tbox() {
    let o = fakb(&[
        "query",
        &fixture("debate_updated.fabox"),
        &fixture("debate.tbox"),
        "Party(?x)",
    ]);
    assert_eq!(code(&o), 0);
    golden("query_party.tsv", &stdout(&o));
}

#[test]
fn query_json_carries_exact_degrees() {
    let o = fakb(&[
        "--format",
        "json",
        "query",
        &fixture("debate_updated.fabox"),
        &fixture("debate.tbox"),
        "Arg(?x) >= 0.7",
    ]);
    assert_eq!(code(&o), 0);
    let doc: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    let text = doc.to_string();
    assert!(text.contains("0.7029702970297029"), "{text}");
}

#[test]
fn query_refuses_inconsistent_kb() {
    let o = fakb(&[
        "query",
        &fixture("debate_conflict.fabox"),
        &fixture("debate.tbox"),
        "Arg(?x)",
    ]);
    assert_eq!(code(&o), 1);
    assert!(stdout(&o).is_empty());
    assert!(stderr(&o).contains("Left <= not Right"));
}

#[test]
fn query_parse_error_is_a_usage_error() {
    let o = fakb(&[
        "query",
        &fixture("debate_updated.fabox"),
        &fixture("debate.tbox"),
        "Arg(?x",
    ]);
    assert_eq!(code(&o), 2);
    assert!(stderr(&o).starts_with("error: query"));
}

#[test]
fn rewrite_lists_disjuncts() {
    let o = fakb(&["rewrite", &fixture("debate.tbox"), "q(?x) := Party(?x)"]);
    assert_eq!(code(&o), 0);
    golden("rewrite_party.txt", &stdout(&o));

    let o = fakb(&[
        "--format",
        "json",
        "rewrite",
        &fixture("debate.tbox"),
        "q(?x) := Party(?x)",
    ]);
    let lines: Vec<String> = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(
        lines.join("\n") + "\n",
        fs::read_to_string(Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/golden/rewrite_party.txt")).unwrap()
    );
}

#[test]
fn rewrite_rejects_graph_export() {
    let o = fakb(&[
        "rewrite",
        &fixture("debate.tbox"),
        "Party(?x)",
        "--export-graph",
        "g.json",
    ]);
    assert_eq!(code(&o), 2);
    assert!(!Path::new("g.json").exists());
}
