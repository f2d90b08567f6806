//! End-to-end tests of the `delzant` binary: exit codes, output formats,
//! determinism, and the canonical file round trip.

use std::fs;
use std::io::Write;
use std::process::{Command, Output, Stdio};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_delzant"))
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary runs")
}

fn run_with_stdin(args: &[&str], input: &str) -> Output {
    let mut child = bin()
        .args(args)
        .stdin(Stdio::piped())
        .stdout(Stdio::piped())
        .stderr(Stdio::piped())
        .spawn()
        .expect("binary spawns");
    child
        .stdin
        .as_mut()
        .expect("stdin piped")
        .write_all(input.as_bytes())
        .expect("stdin written");
    child.wait_with_output().expect("binary exits")
}

fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).expect("utf-8 stdout")
}

fn stderr(out: &Output) -> String {
    String::from_utf8(out.stderr.clone()).expect("utf-8 stderr")
}

fn code(out: &Output) -> i32 {
    out.status.code().expect("exit code")
}

/// A valid plane polytope file, written deliberately out of canonical
/// order and with a reducible offset.
const SCRAMBLED_TRIANGLE: &str = r#"{
    "facets": [
        { "id": "f2", "X": [0, 1], "lambda": "2/4" },
        { "id": "f0", "X": [-1, -1], "lambda": 1 },
        { "id": "f1", "X": [1, 0], "lambda": 0 }
    ],
    "dim": 2
}"#;

/// The triangle with vertices (0,0), (1,0), (0,2): simple but not Delzant.
const NON_UNIMODULAR_TRIANGLE: &str = r#"{
    "dim": 2,
    "facets": [
        { "id": "f0", "X": [1, 0], "lambda": 0 },
        { "id": "f1", "X": [0, 1], "lambda": 0 },
        { "id": "f2", "X": [-2, -1], "lambda": 2 }
    ]
}"#;

fn write_file(dir: &tempfile::TempDir, name: &str, content: &str) -> String {
    let path = dir.path().join(name);
    fs::write(&path, content).expect("fixture written");
    path.to_string_lossy().into_owned()
}

// ---------------------------------------------------------------------------
// validate / example
// ---------------------------------------------------------------------------

#[test]
fn example_output_validates_through_stdin() {
    let example = run(&["example", "simplex", "--n", "2", "--lambda", "1,0,0"]);
    assert_eq!(code(&example), 0, "{}", stderr(&example));
    let table = run_with_stdin(&["validate", "-"], &stdout(&example));
    assert_eq!(code(&table), 0, "{}", stderr(&table));
    let text = stdout(&table);
    assert!(text.contains("dimension 2, 3 facets, 3 vertices"), "{text}");
}

#[test]
fn canonical_round_trip_is_byte_identical() {
    let dir = tempfile::tempdir().expect("tempdir");
    let path = write_file(&dir, "scrambled.json", SCRAMBLED_TRIANGLE);
    let first = run(&["validate", &path, "--emit"]);
    assert_eq!(code(&first), 0, "{}", stderr(&first));
    let canonical = stdout(&first);
    // Canonicalization sorts facets and reduces offsets.
    assert!(canonical.contains("\"lambda\": \"1/2\""), "{canonical}");
    let f0 = canonical.find("f0").expect("f0 present");
    let f2 = canonical.find("f2").expect("f2 present");
    assert!(f0 < f2, "facets sorted by id:\n{canonical}");
    let second = run_with_stdin(&["validate", "-", "--emit"], &canonical);
    assert_eq!(code(&second), 0, "{}", stderr(&second));
    assert_eq!(stdout(&second), canonical, "re-emission is byte-identical");
}

#[test]
fn vertex_table_reports_positions_facets_and_determinants() {
    let dir = tempfile::tempdir().expect("tempdir");
    let path = write_file(&dir, "triangle.json", SCRAMBLED_TRIANGLE);
    let out = run(&["validate", &path]);
    assert_eq!(code(&out), 0, "{}", stderr(&out));
    let text = stdout(&out);
    assert!(text.contains("position (0, 1), facets {f0, f1}"), "{text}");
    assert!(
        text.contains("position (3/2, -1/2), facets {f0, f2}"),
        "{text}"
    );
    assert!(text.contains("basis determinant"), "{text}");
}

#[test]
fn malformed_file_exits_one_with_location() {
    let out = run_with_stdin(&["validate", "-"], "{\"dim\": 2, \"facets\": 7}");
    assert_eq!(code(&out), 1);
    let err = stderr(&out);
    assert!(err.contains("$.facets"), "{err}");

    let dir = tempfile::tempdir().expect("tempdir");
    let path = write_file(&dir, "broken.json", "not json at all");
    let out = run(&["validate", &path]);
    assert_eq!(code(&out), 1);
    assert!(stderr(&out).contains(&path), "diagnostic names the file");
}

#[test]
fn non_unimodular_triangle_exits_two_with_violation() {
    let out = run_with_stdin(&["validate", "-"], NON_UNIMODULAR_TRIANGLE);
    assert_eq!(code(&out), 2);
    let err = stderr(&out);
    assert!(err.contains("determinant 2"), "{err}");
    assert!(err.contains("(1, 0)"), "{err}");
}

#[test]
fn degenerate_example_request_exits_two() {
    // Twist 2 with unit offsets collapses the bottom edge to length zero.
    let out = run(&["example", "hirzebruch", "--m", "2", "--lambda", "1,1,1,1"]);
    assert_eq!(code(&out), 2);
    assert!(stderr(&out).contains("not positive"), "{}", stderr(&out));
}

#[test]
fn example_flag_errors_exit_one() {
    let bad_count = run(&["example", "simplex", "--n", "2", "--lambda", "1,0"]);
    assert_eq!(code(&bad_count), 1);
    let bad_rational = run(&["example", "simplex", "--n", "1", "--lambda", "1,x"]);
    assert_eq!(code(&bad_rational), 1);
    let zero_denominator = run(&["example", "simplex", "--n", "1", "--lambda", "1,1/0"]);
    assert_eq!(code(&zero_denominator), 1);
}

// ---------------------------------------------------------------------------
// atlas / eval
// ---------------------------------------------------------------------------

fn cp2_file(dir: &tempfile::TempDir) -> String {
    let example = run(&["example", "simplex", "--n", "2", "--lambda", "1,0,0"]);
    assert_eq!(code(&example), 0);
    write_file(dir, "cp2.json", &stdout(&example))
}

#[test]
fn atlas_prints_base_changes_and_laurent_exponents() {
    let example = run(&["example", "simplex", "--n", "1", "--lambda", "1/2,1/2"]);
    assert_eq!(code(&example), 0);
    let dir = tempfile::tempdir().expect("tempdir");
    let path = write_file(&dir, "segment.json", &stdout(&example));
    let out = run(&["atlas", "--polytope", &path]);
    assert_eq!(code(&out), 0, "{}", stderr(&out));
    let text = stdout(&out);
    assert!(text.contains("v0 -> v1: base change"), "{text}");
    assert!(text.contains("v0 -> v1: Laurent exponents"), "{text}");
    // The two one-facet charts differ by the single exponent -1.
    assert!(text.contains("f0: [-1]"), "{text}");
    assert!(text.contains("f1: [-1]"), "{text}");
}

#[test]
fn eval_momentum_matches_hand_value_exactly() {
    let dir = tempfile::tempdir().expect("tempdir");
    let poly = cp2_file(&dir);
    let point = write_file(
        &dir,
        "pt.json",
        r#"{"vertex": "v2", "coords": {"f1": [1.0, 0.0], "f2": [0.5, -0.5]}}"#,
    );
    let out = run(&["eval", "mu", "--polytope", &poly, "--vertex", "v2", "--point", &point]);
    assert_eq!(code(&out), 0, "{}", stderr(&out));
    // v2 is the origin vertex with basis normals e1, e2, so the momentum
    // value is (|z1|^2 / 2, |z2|^2 / 2) = (1/2, 1/4) exactly.
    assert_eq!(
        stdout(&out),
        "{\"xi\": [5.0000000000000000e-1, 2.5000000000000000e-1]}\n"
    );
}

#[test]
fn eval_is_bit_exact_across_invocations() {
    let dir = tempfile::tempdir().expect("tempdir");
    let poly = cp2_file(&dir);
    let point = write_file(
        &dir,
        "pt.json",
        r#"{"vertex": "v2", "coords": {"f1": [0.31, 0.77], "f2": [0.5, -0.43]}}"#,
    );
    let args = [
        "eval", "phi", "--polytope", &poly, "--vertex", "v2", "--to", "v0", "--point", &point,
    ];
    let first = run(&args);
    let second = run(&args);
    assert_eq!(code(&first), 0, "{}", stderr(&first));
    assert_eq!(stdout(&first), stdout(&second));
    assert!(stdout(&first).contains("\"vertex\": \"v0\""));
}

#[test]
fn eval_round_trips_theta_through_stdin() {
    let dir = tempfile::tempdir().expect("tempdir");
    let poly = cp2_file(&dir);
    let point = write_file(
        &dir,
        "pt.json",
        r#"{"vertex": "v2", "coords": {"f1": [0.6, 0.0], "f2": [0.2, -0.1]}}"#,
    );
    let forward = run(&["eval", "theta", "--polytope", &poly, "--vertex", "v2", "--point", &point]);
    assert_eq!(code(&forward), 0, "{}", stderr(&forward));
    let back = run_with_stdin(
        &["eval", "theta-inv", "--polytope", &poly, "--vertex", "v2", "--point", "-"],
        &stdout(&forward),
    );
    assert_eq!(code(&back), 0, "{}", stderr(&back));
    let text = stdout(&back);
    // Coordinates come back to the written values within solver accuracy.
    let parsed: serde_json::Value = serde_json::from_str(&text).expect("chart-point JSON");
    let coord = |f: &str, i: usize| parsed["coords"][f][i].as_f64().expect("coordinate");
    for (f, want) in [("f1", [0.6, 0.0]), ("f2", [0.2, -0.1])] {
        for (i, w) in want.into_iter().enumerate() {
            assert!((coord(f, i) - w).abs() < 1e-10, "{f}[{i}] in {text}");
        }
    }
}

#[test]
fn eval_r_prints_a_bare_float() {
    let dir = tempfile::tempdir().expect("tempdir");
    let poly = cp2_file(&dir);
    let out = run_with_stdin(
        &["eval", "r", "--polytope", &poly, "--facet", "f0", "--point", "-"],
        r#"{"xi": [0.25, 0.25]}"#,
    );
    assert_eq!(code(&out), 0, "{}", stderr(&out));
    // 2 * (1 - 1/4 - 1/4) = 1, so the radial value is exactly 1.
    assert_eq!(stdout(&out), "1.0000000000000000e0\n");
}

#[test]
fn eval_stratum_lists_vanishing_facets() {
    let dir = tempfile::tempdir().expect("tempdir");
    let poly = cp2_file(&dir);
    let out = run_with_stdin(
        &["eval", "stratum", "--polytope", &poly, "--vertex", "v2", "--point", "-"],
        r#"{"vertex": "v2", "coords": {"f1": [0.0, 0.0], "f2": [0.5, -0.5]}}"#,
    );
    assert_eq!(code(&out), 0, "{}", stderr(&out));
    assert_eq!(stdout(&out), "{\"facets\":[\"f1\"]}\n");
}

#[test]
fn eval_usage_problems_exit_one() {
    let dir = tempfile::tempdir().expect("tempdir");
    let poly = cp2_file(&dir);
    let point = write_file(
        &dir,
        "pt.json",
        r#"{"vertex": "v2", "coords": {"f1": [1.0, 0.0], "f2": [0.5, -0.5]}}"#,
    );
    // Missing --vertex.
    let out = run(&["eval", "theta", "--polytope", &poly, "--point", &point]);
    assert_eq!(code(&out), 1);
    assert!(stderr(&out).contains("--vertex"), "{}", stderr(&out));
    // Point file written at a different chart than --vertex.
    let out = run(&["eval", "mu", "--polytope", &poly, "--vertex", "v0", "--point", &point]);
    assert_eq!(code(&out), 1);
    // Missing --to for a transition.
    let out = run(&["eval", "phi", "--polytope", &poly, "--vertex", "v2", "--point", &point]);
    assert_eq!(code(&out), 1);
    assert!(stderr(&out).contains("--to"), "{}", stderr(&out));
    // Unknown subcommand and unknown op are clap usage errors.
    assert_eq!(code(&run(&["frobnicate"])), 1);
    assert_eq!(
        code(&run(&["eval", "nonsense", "--polytope", &poly, "--point", &point])),
        1
    );
}

#[test]
fn eval_domain_violation_exits_one_with_reason() {
    let dir = tempfile::tempdir().expect("tempdir");
    let poly = cp2_file(&dir);
    // |z|^2/2 sums to 2, far past the excluded facet of the unit simplex.
    let out = run_with_stdin(
        &["eval", "theta", "--polytope", &poly, "--vertex", "v2", "--point", "-"],
        r#"{"vertex": "v2", "coords": {"f1": [2.0, 0.0], "f2": [0.0, 0.0]}}"#,
    );
    assert_eq!(code(&out), 1);
    assert!(stderr(&out).contains("error"), "{}", stderr(&out));
}

// ---------------------------------------------------------------------------
// verify / sample
// ---------------------------------------------------------------------------

#[test]
fn verify_writes_full_report_and_exits_zero() {
    let dir = tempfile::tempdir().expect("tempdir");
    let poly = cp2_file(&dir);
    let report = dir.path().join("report.ndjson");
    let report_path = report.to_string_lossy().into_owned();
    let out = run(&[
        "verify", "--polytope", &poly, "--samples", "10", "--seed", "5", "--report", &report_path,
    ]);
    assert_eq!(code(&out), 0, "{}", stderr(&out));
    let lines: Vec<String> = fs::read_to_string(&report)
        .expect("report written")
        .lines()
        .map(str::to_string)
        .collect();
    // 27 cocycle triples + 9 pairs x 5 pairwise checks + 3 vertices x 4
    // chart checks + the final self-audit.
    assert_eq!(lines.len(), 85, "{}", lines.join("\n"));
    assert!(lines.last().expect("nonempty").contains("\"check\":\"self_audit\""));
    for line in &lines {
        let parsed: serde_json::Value = serde_json::from_str(line).expect("valid JSON line");
        assert_eq!(parsed["pass"], serde_json::Value::Bool(true), "{line}");
    }
}

#[test]
fn verify_reports_to_stdout_without_report_flag() {
    let dir = tempfile::tempdir().expect("tempdir");
    let example = run(&["example", "simplex", "--n", "1", "--lambda", "1,0"]);
    let poly = write_file(&dir, "segment.json", &stdout(&example));
    let out = run(&["verify", "--polytope", &poly, "--samples", "5", "--seed", "1"]);
    assert_eq!(code(&out), 0, "{}", stderr(&out));
    let text = stdout(&out);
    assert!(text.lines().count() > 10, "{text}");
    assert!(text.lines().all(|l| l.starts_with("{\"check\":")), "{text}");
}

#[test]
fn verify_with_impossible_tolerance_exits_three() {
    let dir = tempfile::tempdir().expect("tempdir");
    let poly = cp2_file(&dir);
    let out = run(&[
        "verify", "--polytope", &poly, "--samples", "5", "--seed", "1", "--tol", "1e-30",
    ]);
    assert_eq!(code(&out), 3);
    assert!(stderr(&out).contains("verification FAILED"), "{}", stderr(&out));
}

#[test]
fn verify_is_deterministic_for_fixed_seed() {
    let dir = tempfile::tempdir().expect("tempdir");
    let poly = cp2_file(&dir);
    let args = ["verify", "--polytope", &poly, "--samples", "8", "--seed", "42"];
    let first = run(&args);
    let second = run(&args);
    assert_eq!(code(&first), 0);
    assert_eq!(stdout(&first), stdout(&second), "identical report bytes");
}

#[test]
fn sample_emits_csv_inside_the_polytope() {
    let dir = tempfile::tempdir().expect("tempdir");
    let poly = cp2_file(&dir);
    let out = run(&[
        "sample", "--polytope", &poly, "--vertex", "v2", "--count", "25", "--seed", "3",
    ]);
    assert_eq!(code(&out), 0, "{}", stderr(&out));
    let text = stdout(&out);
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("xi1,xi2"));
    let rows: Vec<&str> = lines.collect();
    assert_eq!(rows.len(), 25);
    for row in rows {
        let cols: Vec<f64> = row
            .split(',')
            .map(|c| c.parse().expect("numeric CSV cell"))
            .collect();
        assert_eq!(cols.len(), 2);
        // Interior of the unit simplex: positive coordinates, sum below 1.
        assert!(cols[0] > 0.0 && cols[1] > 0.0 && cols[0] + cols[1] < 1.0, "{row}");
    }
}

#[test]
fn help_and_version_exit_zero() {
    assert_eq!(code(&run(&["--help"])), 0);
    assert_eq!(code(&run(&["--version"])), 0);
    assert_eq!(code(&run(&["eval", "--help"])), 0);
}
