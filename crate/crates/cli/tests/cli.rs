//! End-to-end command-line behavior: exit codes, determinism, round
//! trips, entity errors.

use std::process::{Command, Output};

fn prplab(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_prplab"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).expect("utf8 output")
}

#[test]
fn emm_on_bin_prints_the_unique_measure() {
    let out = prplab(&["emm", "BIN"]);
    assert!(out.status.success());
    let text = stdout(&out);
    assert!(text.contains("(1/3, 2/3)"), "output: {text}");
    assert!(text.contains("unique = true"));
}

#[test]
fn structured_reports_are_byte_identical_across_runs() {
    let a = prplab(&["scenario", "ftap", "BIN", "--format", "structured"]);
    let b = prplab(&["scenario", "ftap", "BIN", "--format", "structured"]);
    assert!(a.status.success());
    assert_eq!(stdout(&a), stdout(&b));
    let parsed: serde_json::Value = serde_json::from_str(&stdout(&a)).expect("valid json");
    assert_eq!(parsed["verdict"], "pass");
    assert_eq!(parsed["scenario"], "ftap");
}

#[test]
fn scenario_list_names_thirteen() {
    let out = prplab(&["scenario", "--list"]);
    assert!(out.status.success());
    let text = stdout(&out);
    for name in [
        "prop1",
        "thm2",
        "lemma1",
        "thm3",
        "cor1",
        "prop2",
        "thm4",
        "cor3",
        "remark-product-law",
        "thm5",
        "cor4",
        "ftap",
        "immersion",
    ] {
        assert!(text.contains(name), "missing scenario {name} in listing");
    }
}

#[test]
fn scenario_flag_grammar_also_works() {
    let out = prplab(&["scenario", "TAU", "--scenario", "thm2"]);
    assert!(out.status.success());
    assert!(stdout(&out).contains("scenario: thm2  (model: TAU)"));
}

#[test]
fn unknown_target_is_an_input_error() {
    let out = prplab(&["represent", "BIN", "H", "--integrators", "X"]);
    assert_eq!(out.status.code(), Some(2));
    let err = String::from_utf8(out.stderr).unwrap();
    assert!(err.contains("unknown entity"), "stderr: {err}");
}

#[test]
fn unknown_model_is_an_input_error() {
    let out = prplab(&["emm", "/nonexistent/model.toml"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn unknown_scenario_is_an_input_error() {
    let out = prplab(&["scenario", "thm9"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn malformed_probability_is_an_input_error() {
    let dir = std::env::temp_dir().join("prplab-cli-test");
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join("bad.toml");
    std::fs::write(
        &path,
        r#"
[space]
outcomes = ["u", "d"]
probabilities = ["1/0", "1/2"]
horizon = 1

[processes]
X = [["1", "2"], ["1", "1/2"]]
"#,
    )
    .unwrap();
    let out = prplab(&["emm", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn violated_conclusion_exits_one() {
    // Two extremal points sharing a support outcome: the singularity
    // conclusion fails under passing hypotheses, which is a mathematical
    // verdict failure.
    let dir = std::env::temp_dir().join("prplab-cli-test");
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join("overlap.toml");
    std::fs::write(
        &path,
        r#"
[space]
outcomes = ["a", "b", "c"]
probabilities = ["1/3", "1/3", "1/3"]
horizon = 1

[processes]
X = [["1", "0"], ["1", "2"], ["1", "3"]]
"#,
    )
    .unwrap();
    let out = prplab(&["scenario", "cor4", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(1));
    let text = stdout(&out);
    assert!(text.contains("verdict: fail"));
    assert!(text.contains("[FAIL] extremal points are pairwise singular"));
}

#[test]
fn ftap_scenario_on_tri_reports_the_incomplete_side() {
    let out = prplab(&["scenario", "ftap", "TRI"]);
    assert!(out.status.success());
    let text = stdout(&out);
    assert!(text.contains("unique = false"));
    assert!(text.contains("complete = false"));
    assert!(text.contains("[ok] uniqueness and completeness verdicts agree"));
    assert!(text.contains("verdict: pass"));
}

#[test]
fn represent_terminal_value_on_bin() {
    let out = prplab(&["represent", "BIN", "X", "--integrators", "X"]);
    assert!(out.status.success());
    let text = stdout(&out);
    assert!(text.contains("constant = 1"));
    assert!(text.contains("representable = true"));
}

#[test]
fn covariation_integrators_parse() {
    let out = prplab(&["complete", "COIN2", "--integrators", "M,N,QC(M,N)"]);
    assert!(out.status.success());
    let text = stdout(&out);
    assert!(text.contains("complete = true"));
    assert!(text.contains("span_dimension = 3"));
}

#[test]
fn enlarge_reports_first_strict_time() {
    let out = prplab(&["enlarge", "TAU", "--tau", "tau"]);
    assert!(out.status.success());
    let text = stdout(&out);
    assert!(text.contains("u = 1"));
    assert!(text.contains("strict_times = [1, 2]"));
}

#[test]
fn decompose_on_bin_drift() {
    let out = prplab(&["decompose", "BIN-DRIFT", "--process", "X"]);
    assert!(out.status.success());
    let text = stdout(&out);
    assert!(text.contains("martingale_part = [0, 1/2 ; 0, -1]"));
    assert!(text.contains("drift_part = [0, 1/2 ; 0, 1/2]"));
}

#[test]
fn doleans_on_bin_drift() {
    let out = prplab(&["doleans", "BIN-DRIFT", "--process", "X"]);
    assert!(out.status.success());
    let text = stdout(&out);
    assert!(text.contains("density_process = [1, 1/2 ; 1, 2]"));
    assert!(text.contains("reweighted_measure = (1/3, 2/3)"));
}

#[test]
fn density_measure_flag_reweights() {
    // Under the Doléans density of BIN-DRIFT the process becomes a
    // martingale, so the decomposition under that measure has no drift.
    let dir = std::env::temp_dir().join("prplab-cli-test");
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join("bin-drift-density.toml");
    std::fs::write(
        &path,
        r#"
[space]
outcomes = ["u", "d"]
probabilities = ["2/3", "1/3"]
horizon = 1

[filtration]
natural = ["X"]

[processes]
L = [["1", "1/2"], ["1", "2"]]
X = [["1", "2"], ["1", "1/2"]]
"#,
    )
    .unwrap();
    let out = prplab(&[
        "decompose",
        path.to_str().unwrap(),
        "--process",
        "X",
        "--measure",
        "density:L",
    ]);
    assert!(out.status.success());
    let text = stdout(&out);
    assert!(text.contains("drift_part = [0, 0 ; 0, 0]"), "output: {text}");
}

#[test]
fn immersion_command_on_tau() {
    let out = prplab(&["immersion", "TAU", "--tau", "tau"]);
    assert!(out.status.success());
    let text = stdout(&out);
    assert!(text.contains("[ok] the two characterizations agree"));
    assert!(text.contains("immersion = true"));
}
