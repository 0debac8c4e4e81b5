//! End-to-end tests of the `qnit` binary: output contracts, exit codes,
//! determinism, and the file round trips the subcommands promise.

use std::path::PathBuf;
use std::process::{Command, Output};

fn qnit(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_qnit"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).expect("utf-8 stdout")
}

fn stderr(out: &Output) -> String {
    String::from_utf8(out.stderr.clone()).expect("utf-8 stderr")
}

fn exit_code(out: &Output) -> i32 {
    out.status.code().expect("no signal")
}

/// A scratch file under the system temp dir, unique per test name.
fn scratch_file(name: &str, contents: &str) -> PathBuf {
    let path = std::env::temp_dir().join(format!("qnit-cli-test-{}-{name}", std::process::id()));
    std::fs::write(&path, contents).expect("scratch file writes");
    path
}

const DUPLICATE_PARTITION: &str =
    r#"{"n":3,"k":2,"partitions":[[[1,2,3],[4,5,6],[7,8,9]],[[1,2,3],[4,5,6],[7,8,9]]]}"#;
const UNBALANCED: &str =
    r#"{"n":3,"k":2,"partitions":[[[1,2,3,4],[5,6],[7,8,9]],[[1,4,7],[2,5,8],[3,6,9]]]}"#;
const COUNTERDIAGONAL: &str =
    r#"{"n":3,"k":2,"partitions":[[[1,5,9],[2,6,7],[3,4,8]],[[1,6,8],[2,4,9],[3,5,7]]]}"#;

#[test]
fn construct_prints_the_canonical_set() {
    let out = qnit(&["construct", "--n", "3", "--k", "2"]);
    assert_eq!(exit_code(&out), 0);
    let set: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert_eq!(set["n"], 3);
    assert_eq!(set["k"], 2);
    assert_eq!(
        set["partitions"],
        serde_json::json!([
            [[1, 2, 3], [4, 5, 6], [7, 8, 9]],
            [[1, 4, 7], [2, 5, 8], [3, 6, 9]]
        ])
    );
}

#[test]
fn writing_a_read_set_is_byte_identical() {
    let first = qnit(&["construct", "--n", "3", "--k", "2"]);
    let path = scratch_file("roundtrip.json", &stdout(&first));
    let second = qnit(&[
        "permute",
        "--input",
        path.to_str().unwrap(),
        "--perm",
        "(1)",
    ]);
    assert_eq!(exit_code(&second), 0);
    assert_eq!(stdout(&first), stdout(&second));
}

#[test]
fn enumerate_count_only_prints_a_bare_count() {
    let out = qnit(&["enumerate", "--n", "2", "--k", "2", "--count-only"]);
    assert_eq!(exit_code(&out), 0);
    assert_eq!(stdout(&out), "3\n");
}

#[test]
fn enumerate_streams_one_canonical_set_per_line() {
    let out = qnit(&["enumerate", "--n", "2", "--k", "2"]);
    assert_eq!(exit_code(&out), 0);
    let text = stdout(&out);
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines.len(), 3);
    assert_eq!(
        lines[0],
        r#"{"n":2,"k":2,"partitions":[[[1,2],[3,4]],[[1,3],[2,4]]]}"#
    );
    for line in &lines {
        let set: serde_json::Value = serde_json::from_str(line).unwrap();
        assert_eq!(set["n"], 2);
    }
}

#[test]
fn enumerate_limit_truncates_the_stream() {
    let out = qnit(&["enumerate", "--n", "2", "--k", "2", "--limit", "2"]);
    assert_eq!(exit_code(&out), 0);
    assert_eq!(stdout(&out).lines().count(), 2);
}

#[test]
fn enumerate_output_is_independent_of_job_count() {
    let single = qnit(&["enumerate", "--n", "2", "--k", "3", "--jobs", "1"]);
    let sharded = qnit(&["enumerate", "--n", "2", "--k", "3", "--jobs", "4"]);
    assert_eq!(exit_code(&single), 0);
    assert_eq!(exit_code(&sharded), 0);
    assert_eq!(stdout(&single), stdout(&sharded));
    assert_eq!(stdout(&single).lines().count(), 840);
}

#[test]
fn enumerate_refuses_sweeps_over_budget() {
    let out = qnit(&["enumerate", "--n", "3", "--k", "3"]);
    assert_eq!(exit_code(&out), 1);
    assert!(stderr(&out).contains("budget"));
    assert!(stdout(&out).is_empty());
}

#[test]
fn budget_flag_bounds_the_sweep_exactly() {
    let enough = qnit(&[
        "enumerate",
        "--n",
        "2",
        "--k",
        "2",
        "--budget",
        "24",
        "--count-only",
    ]);
    assert_eq!(exit_code(&enough), 0);
    assert_eq!(stdout(&enough), "3\n");
    let short = qnit(&[
        "enumerate",
        "--n",
        "2",
        "--k",
        "2",
        "--budget",
        "23",
        "--count-only",
    ]);
    assert_eq!(exit_code(&short), 1);
    assert!(stderr(&short).contains("budget"));
}

#[test]
fn permuted_canonical_sets_always_pass_verify() {
    let permuted = qnit(&[
        "permute",
        "--n",
        "3",
        "--k",
        "2",
        "--perm",
        "(1)(2,5,6,7,3,9,8,4)",
    ]);
    assert_eq!(exit_code(&permuted), 0);
    let path = scratch_file("permuted.json", &stdout(&permuted));
    let verified = qnit(&["verify", "--input", path.to_str().unwrap()]);
    assert_eq!(exit_code(&verified), 0);
    let report: serde_json::Value = serde_json::from_str(&stdout(&verified)).unwrap();
    assert_eq!(report["valid"], true);
}

#[test]
fn permute_rejects_bad_cycle_text() {
    let out = qnit(&["permute", "--n", "3", "--k", "2", "--perm", "(1,2"]);
    assert_eq!(exit_code(&out), 1);
    assert!(stderr(&out).contains("cycle"));
}

#[test]
fn verify_reports_separation_violations_with_exit_1() {
    let path = scratch_file("dup.json", DUPLICATE_PARTITION);
    let out = qnit(&["verify", "--input", path.to_str().unwrap()]);
    assert_eq!(exit_code(&out), 1);
    let report: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert_eq!(report["valid"], false);
    assert_eq!(report["structural"].as_array().unwrap().len(), 0);
    assert!(!report["separation"].as_array().unwrap().is_empty());
}

#[test]
fn verify_reports_unbalanced_blocks_with_exit_1() {
    let path = scratch_file("unbalanced.json", UNBALANCED);
    let out = qnit(&["verify", "--input", path.to_str().unwrap()]);
    assert_eq!(exit_code(&out), 1);
    let report: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert_eq!(report["valid"], false);
    assert_eq!(report["structural"][0]["kind"], "unbalanced_block");
}

#[test]
fn verify_rejects_malformed_json_with_a_location() {
    let path = scratch_file("malformed.json", r#"{"n":3,"k":2, busted"#);
    let out = qnit(&["verify", "--input", path.to_str().unwrap()]);
    assert_eq!(exit_code(&out), 1);
    assert!(stderr(&out).contains("line"));
}

#[test]
fn context_uses_the_first_primes_by_default() {
    let out = qnit(&["context", "--n", "2", "--k", "2"]);
    assert_eq!(exit_code(&out), 0);
    let context: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert_eq!(context["entries"], serde_json::json!([10, 14, 15, 21]));
}

#[test]
fn context_accepts_a_flat_prime_list() {
    let out = qnit(&[
        "context",
        "--n",
        "3",
        "--k",
        "2",
        "--primes",
        "2,3,5,7,11,13",
    ]);
    assert_eq!(exit_code(&out), 0);
    let context: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert_eq!(
        context["entries"],
        serde_json::json!([14, 22, 26, 21, 33, 39, 35, 55, 65])
    );
    assert_eq!(
        context["decode_table"][8]["blocks"],
        serde_json::json!([3, 3])
    );
}

#[test]
fn context_rejects_a_short_prime_list() {
    let out = qnit(&["context", "--n", "3", "--k", "2", "--primes", "2,3"]);
    assert_eq!(exit_code(&out), 1);
    assert!(stderr(&out).contains("6 values"));
}

#[test]
fn w_demo_passes_all_checks() {
    let out = qnit(&["w-demo"]);
    assert_eq!(exit_code(&out), 0);
    let text = stdout(&out);
    assert!(text.contains("diag(2, 2, 2, 2, 3, 3, 3, 3)"));
    assert!(text.contains("110 130 154 182 165 195 231 273"));
    assert!(text.contains("check eigenvectors: pass"));
    assert!(text.contains("check commutators: pass"));
    assert!(text.contains("check eigenvalues: pass"));
    assert!(text.contains("check decode: pass"));
    assert!(text.contains("result: all checks passed"));
}

#[test]
fn tessellate_ascii_shows_both_channels_in_one_grid() {
    let out = qnit(&["tessellate", "--n", "3", "--k", "2"]);
    assert_eq!(exit_code(&out), 0);
    let text = stdout(&out);
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines[0], "A(1) A[2] A{3}");
    assert_eq!(lines[1], "B(4) B[5] B{6}");
    assert_eq!(lines[2], "C(7) C[8] C{9}");
    assert!(text.contains("A = {1, 2, 3}"));
    assert!(text.contains("(.) = {1, 4, 7}"));
}

#[test]
fn tessellate_ascii_traces_diagonals_for_the_counterdiagonal_family() {
    let path = scratch_file("diagonal.json", COUNTERDIAGONAL);
    let out = qnit(&["tessellate", "--input", path.to_str().unwrap()]);
    assert_eq!(exit_code(&out), 0);
    let text = stdout(&out);
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines[0], "A(1) B[2] C{3}");
    assert_eq!(lines[1], "C[4] A{5} B(6)");
    assert_eq!(lines[2], "B{7} C(8) A[9]");
    assert!(text.contains("A = {1, 5, 9}"));
    assert!(text.contains("(.) = {1, 6, 8}"));
}

#[test]
fn tessellate_rejects_three_particles() {
    let out = qnit(&["tessellate", "--n", "2", "--k", "3"]);
    assert_eq!(exit_code(&out), 1);
    assert!(stderr(&out).contains("2 partitions"));
}

#[test]
fn tessellate_rejects_invalid_sets() {
    let path = scratch_file("dup-tessellate.json", DUPLICATE_PARTITION);
    let out = qnit(&["tessellate", "--input", path.to_str().unwrap()]);
    assert_eq!(exit_code(&out), 1);
}

/// Minimal well-formedness scan: every opened element is closed in order,
/// attributes stay inside quoted strings, and the prolog is the only
/// processing instruction.
fn assert_wellformed_xml(text: &str) {
    let mut stack: Vec<String> = Vec::new();
    let mut rest = text;
    assert!(rest.starts_with("<?xml"), "must start with the XML prolog");
    rest = &rest[rest.find("?>").expect("prolog closes") + 2..];
    while let Some(start) = rest.find('<') {
        let end = start
            + rest[start..]
                .find('>')
                .expect("every tag closes before the text ends");
        let tag = &rest[start + 1..end];
        assert!(!tag.contains('<'), "nested angle bracket in {tag:?}");
        if let Some(name) = tag.strip_prefix('/') {
            let open = stack.pop().unwrap_or_else(|| {
                panic!("closing </{name}> without an open element");
            });
            assert_eq!(open, name, "mismatched element nesting");
        } else if !tag.ends_with('/') {
            let name: String = tag
                .chars()
                .take_while(|c| !c.is_whitespace() && *c != '>')
                .collect();
            stack.push(name);
        }
        rest = &rest[end + 1..];
    }
    assert!(stack.is_empty(), "unclosed elements: {stack:?}");
}

#[test]
fn tessellate_svg_is_wellformed_and_byte_stable() {
    let first = qnit(&["tessellate", "--n", "3", "--k", "2", "--format", "svg"]);
    let second = qnit(&["tessellate", "--n", "3", "--k", "2", "--format", "svg"]);
    assert_eq!(exit_code(&first), 0);
    assert_eq!(stdout(&first), stdout(&second));
    let text = stdout(&first);
    assert_wellformed_xml(&text);
    assert!(text.contains("first partition"));
    assert!(text.contains("second partition"));
    assert!(text.contains("combined"));
    assert_eq!(text.matches("<g transform").count(), 3);
    assert_eq!(text.matches("<text").count(), 3 + 27);
}

#[test]
fn tessellate_svg_renders_two_by_two_grids_too() {
    let out = qnit(&["tessellate", "--n", "2", "--k", "2", "--format", "svg"]);
    assert_eq!(exit_code(&out), 0);
    assert_wellformed_xml(&stdout(&out));
}

#[test]
fn urn_sessions_are_seed_deterministic() {
    let args = [
        "urn", "--n", "3", "--k", "2", "--draws", "50", "--seed", "9",
    ];
    let first = qnit(&args);
    let second = qnit(&args);
    assert_eq!(exit_code(&first), 0);
    assert_eq!(stdout(&first), stdout(&second));
    let tally: serde_json::Value = serde_json::from_str(&stdout(&first)).unwrap();
    assert_eq!(tally["draws"], 50);
    assert_eq!(tally["lens"]["color"], "blue");
    for result in tally["results"].as_array().unwrap() {
        assert_eq!(result["kind"], "symbol");
    }
}

#[test]
fn urn_foreign_lens_modes_change_the_tally_kind() {
    let mono = qnit(&[
        "urn", "--n", "3", "--k", "2", "--draws", "40", "--lens", "green",
    ]);
    let tally: serde_json::Value = serde_json::from_str(&stdout(&mono)).unwrap();
    let results = tally["results"].as_array().unwrap();
    assert_eq!(results.len(), 1);
    assert_eq!(results[0]["kind"], "no_answer");
    assert_eq!(results[0]["count"], 40);

    let broad = qnit(&[
        "urn",
        "--n",
        "3",
        "--k",
        "2",
        "--draws",
        "40",
        "--lens",
        "green",
        "--mode",
        "broadened",
    ]);
    let tally: serde_json::Value = serde_json::from_str(&stdout(&broad)).unwrap();
    for result in tally["results"].as_array().unwrap() {
        assert_eq!(result["kind"], "symbol_set");
        assert_eq!(result["glyphs"].as_array().unwrap().len(), 2);
    }
}

#[test]
fn usage_errors_exit_2() {
    assert_eq!(exit_code(&qnit(&["bogus"])), 2);
    assert_eq!(exit_code(&qnit(&["construct", "--n", "3"])), 2);
    assert_eq!(exit_code(&qnit(&["verify"])), 2);
    let path = scratch_file("conflict.json", COUNTERDIAGONAL);
    assert_eq!(
        exit_code(&qnit(&[
            "verify",
            "--input",
            path.to_str().unwrap(),
            "--n",
            "3",
            "--k",
            "2"
        ])),
        2
    );
    assert_eq!(exit_code(&qnit(&["enumerate", "--n", "1", "--k", "2"])), 1);
}
