//! End-to-end tests driving the compiled binary over temp files.

use std::path::Path;
use std::process::{Command, Output};

use tempfile::TempDir;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_funalg"))
}

fn run_in(dir: &Path, args: &[&str]) -> Output {
    bin()
        .current_dir(dir)
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(out: &Output) -> String {
    String::from_utf8_lossy(&out.stdout).to_string()
}

fn stderr(out: &Output) -> String {
    String::from_utf8_lossy(&out.stderr).to_string()
}

fn write(dir: &Path, name: &str, content: &str) {
    std::fs::write(dir.join(name), content).unwrap();
}

const QUOTIENT: &str = "quotient v1\ncarrier 3\nprojection 0 0 1\nend\n";
const POSET: &str = "poset v1\npoints 3\nle 0 1\nincompatible 1 2\nend\n";
const MORPHISM: &str =
    "morphism v1\nsource 0 0 1\ntarget 0 1 1\nmap 0 1\nmap 1 2\nmap 2 0\nend\n";
/// Two-element table where difference constantly returns the other
/// element, breaking the first equation.
const BROKEN_ALGEBRA: &str =
    "algebra v1\nsize 2\nminus\n1 1\n1 1\nrestrict\n0 0\n0 0\nend\n";

#[test]
fn duality_round_trip_through_files() {
    let tmp = TempDir::new().unwrap();
    let dir = tmp.path();
    write(dir, "pi.quot", QUOTIENT);

    let dual = run_in(dir, &["dual-algebra", "pi.quot"]);
    assert!(dual.status.success(), "{}", stderr(&dual));
    let algebra_text = stdout(&dual);
    assert!(algebra_text.starts_with("algebra v1"));
    write(dir, "a.alg", &algebra_text);

    let axioms = run_in(dir, &["check-axioms", "a.alg"]);
    assert_eq!(axioms.status.code(), Some(0));
    assert!(stdout(&axioms).contains("AXIOMS PASS"));

    let back = run_in(dir, &["dualize", "a.alg"]);
    assert!(back.status.success(), "{}", stderr(&back));
    assert_eq!(stdout(&back), QUOTIENT);
}

#[test]
fn atoms_of_a_section_algebra_are_its_points() {
    let tmp = TempDir::new().unwrap();
    let dir = tmp.path();
    write(dir, "pi.quot", QUOTIENT);
    let dual = run_in(dir, &["dual-algebra", "pi.quot"]);
    write(dir, "a.alg", &stdout(&dual));

    let atoms = run_in(dir, &["atoms", "a.alg"]);
    assert_eq!(atoms.status.code(), Some(0));
    assert!(stdout(&atoms).starts_with("3 atoms"));
}

#[test]
fn broken_table_fails_with_a_witness_and_exit_one() {
    let tmp = TempDir::new().unwrap();
    let dir = tmp.path();
    write(dir, "broken.alg", BROKEN_ALGEBRA);

    let axioms = run_in(dir, &["check-axioms", "broken.alg"]);
    assert_eq!(axioms.status.code(), Some(1));
    assert!(stdout(&axioms).contains("AX1 FAIL at"));
}

#[test]
fn completion_output_is_itself_a_valid_algebra_file() {
    let tmp = TempDir::new().unwrap();
    let dir = tmp.path();
    write(dir, "pi.quot", QUOTIENT);
    let dual = run_in(dir, &["dual-algebra", "pi.quot"]);
    write(dir, "a.alg", &stdout(&dual));

    let complete = run_in(dir, &["complete", "a.alg"]);
    assert_eq!(complete.status.code(), Some(0));
    let text = stdout(&complete);
    assert!(text.contains("# embedding 0 -> "));
    write(dir, "c.alg", &text);

    let axioms = run_in(dir, &["check-axioms", "c.alg"]);
    assert_eq!(axioms.status.code(), Some(0));
}

#[test]
fn adjunction_check_accepts_both_file_kinds() {
    let tmp = TempDir::new().unwrap();
    let dir = tmp.path();
    write(dir, "pi.quot", QUOTIENT);
    let dual = run_in(dir, &["dual-algebra", "pi.quot"]);
    write(dir, "a.alg", &stdout(&dual));

    let on_quotient = run_in(dir, &["check-adjunction", "pi.quot"]);
    assert_eq!(on_quotient.status.code(), Some(0));
    assert!(stdout(&on_quotient).contains("side: quotient"));

    let on_algebra = run_in(dir, &["check-adjunction", "a.alg"]);
    assert_eq!(on_algebra.status.code(), Some(0));
    assert!(stdout(&on_algebra).contains("side: algebra"));
    assert!(stdout(&on_algebra).contains("triangle identity: pass"));
}

#[test]
fn representation_search_reports_its_witness() {
    let tmp = TempDir::new().unwrap();
    let dir = tmp.path();
    write(dir, "pi.quot", QUOTIENT);
    let dual = run_in(dir, &["dual-algebra", "pi.quot"]);
    write(dir, "a.alg", &stdout(&dual));

    let found = run_in(dir, &["represent", "a.alg", "--max-base", "3"]);
    assert_eq!(found.status.code(), Some(0), "{}", stderr(&found));
    assert!(stdout(&found).contains("representation found"));
}

#[test]
fn morphism_and_poset_files_validate() {
    let tmp = TempDir::new().unwrap();
    let dir = tmp.path();
    write(dir, "phi.morph", MORPHISM);
    write(dir, "p.poset", POSET);

    let morph = run_in(dir, &["check-morphism", "phi.morph"]);
    assert_eq!(morph.status.code(), Some(0), "{}", stderr(&morph));
    assert!(stdout(&morph).contains("counit naturality: pass"));

    let poset = run_in(dir, &["embed-poset", "p.poset"]);
    assert_eq!(poset.status.code(), Some(0));
    assert!(stdout(&poset).contains("embedded 3 points"));
}

#[test]
fn bad_inputs_exit_with_code_two() {
    let tmp = TempDir::new().unwrap();
    let dir = tmp.path();
    write(dir, "bad.alg", "algebra v1\nsize 2\nminus\n9 9\n9 9\nend\n");

    let missing = run_in(dir, &["check-axioms", "nope.alg"]);
    assert_eq!(missing.status.code(), Some(2));

    let unparseable = run_in(dir, &["check-axioms", "bad.alg"]);
    assert_eq!(unparseable.status.code(), Some(2));

    let unknown = run_in(dir, &["run-suite", "bogus"]);
    assert_eq!(unknown.status.code(), Some(2));
    assert!(stderr(&unknown).contains("unknown suite"));
}

#[test]
fn json_format_emits_parseable_objects() {
    let tmp = TempDir::new().unwrap();
    let dir = tmp.path();
    write(dir, "pi.quot", QUOTIENT);
    let dual = run_in(dir, &["dual-algebra", "pi.quot"]);
    write(dir, "a.alg", &stdout(&dual));

    let axioms = run_in(dir, &["--format", "json", "check-axioms", "a.alg"]);
    let v: serde_json::Value = serde_json::from_str(&stdout(&axioms)).unwrap();
    assert_eq!(v["status"], "pass");

    let suite = run_in(
        dir,
        &["--format", "json", "run-suite", "completeness-fixture"],
    );
    assert_eq!(suite.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_str(&stdout(&suite)).unwrap();
    assert_eq!(v[0]["suite"], "completeness-fixture");
    assert_eq!(v[0]["passed"], true);
}

#[test]
fn suite_runs_are_deterministic_and_job_independent() {
    let tmp = TempDir::new().unwrap();
    let dir = tmp.path();
    let args = ["run-suite", "dual-cardinality", "--iters", "5", "--seed", "9"];
    let first = run_in(dir, &args);
    let second = run_in(dir, &args);
    assert_eq!(first.status.code(), Some(0), "{}", stderr(&first));
    assert_eq!(stdout(&first), stdout(&second));

    let parallel = run_in(
        dir,
        &[
            "run-suite",
            "dual-cardinality",
            "--iters",
            "5",
            "--seed",
            "9",
            "--jobs",
            "4",
        ],
    );
    assert_eq!(stdout(&first), stdout(&parallel));
}

#[test]
fn run_suite_reports_each_check() {
    let tmp = TempDir::new().unwrap();
    let dir = tmp.path();
    let out = run_in(dir, &["run-suite", "axioms", "--iters", "5"]);
    assert_eq!(out.status.code(), Some(0), "{}", stderr(&out));
    let text = stdout(&out);
    assert!(text.contains("suite axioms: pass"));
    assert!(text.contains("random-concrete-algebras: 5 instances, 0 failures"));
    assert!(text.contains("fault-injection: 5 instances, 0 failures"));
}
