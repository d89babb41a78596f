//! Acceptance gate: each criterion runs one named suite at its pinned
//! scale (seed 0, default instance counts) and prints a single pass/fail
//! line. Run with `--nocapture` to see the lines as they complete.

use funalg::suites::{
    suite_adjunction, suite_axioms, suite_completeness_fixture, suite_completion,
    suite_distributivity, suite_dual_cardinality, suite_operators, suite_poset_embedding,
    suite_representation, SuiteConfig, SuiteReport,
};

fn pinned() -> SuiteConfig {
    SuiteConfig {
        seed: 0,
        iterations: None,
        max_size: None,
        jobs: std::thread::available_parallelism()
            .map(|n| n.get())
            .unwrap_or(1)
            .min(8),
        artifact_dir: None,
    }
}

fn gate(number: usize, report: SuiteReport) {
    let ok = report.passed();
    println!(
        "criterion {number} ({}): {}",
        report.suite,
        if ok { "pass" } else { "FAIL" }
    );
    assert!(ok, "criterion {number} failed:\n{report}");
}

#[test]
fn criterion_1_axiom_soundness_and_fault_injection() {
    gate(1, suite_axioms(&pinned()));
}

#[test]
fn criterion_2_completeness_fixture() {
    gate(2, suite_completeness_fixture(&pinned()));
}

#[test]
fn criterion_3_dual_cardinality() {
    gate(3, suite_dual_cardinality(&pinned()));
}

#[test]
fn criterion_4_adjunction_identities() {
    gate(4, suite_adjunction(&pinned()));
}

#[test]
fn criterion_5_completion_uniqueness() {
    gate(5, suite_completion(&pinned()));
}

#[test]
fn criterion_6_completion_distributivity() {
    gate(6, suite_distributivity(&pinned()));
}

#[test]
fn criterion_7_operator_duality() {
    gate(7, suite_operators(&pinned()));
}

#[test]
fn criterion_8_poset_embedding() {
    gate(8, suite_poset_embedding(&pinned()));
}

#[test]
fn criterion_9_representation_search() {
    gate(9, suite_representation(&pinned()));
}
