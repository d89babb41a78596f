//! Named property suites: seeded runs over generated instances, each
//! producing a machine-readable report. Failing instances are dumped as
//! files the parsers can re-load, so every counterexample can be replayed
//! in isolation.

use std::fmt;
use std::fs;
use std::path::{Path, PathBuf};

use rand::seq::SliceRandom;
use rand::Rng;
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::algebra::{AbstractAlgebra, AxiomCheck};
use crate::compat_poset::{
    embed, enumerate_compat_relations, enumerate_posets, verify_embedding, CompatibilityPoset,
};
use crate::completion::{
    compatible_completion, completion_is_idempotent, completion_isomorphism,
    count_extension_homs, distributivity_violation, UNIQUENESS_BRUTE_CAP,
};
use crate::concrete::{ConcreteAlgebra, ConcreteOperator, DEFAULT_CLOSURE_CAP};
use crate::duality::{
    check_counit_naturality, check_f_composition, check_f_identity, check_g_composition,
    check_g_identity, check_triangle_f, check_triangle_g, check_unit_naturality, counit,
    f_object, g_object, unit, CompleteHom,
};
use crate::files::{
    emit_algebra, emit_morphism, emit_poset, emit_quotient, AlgebraFile, QuotientFile,
};
use crate::gen::{
    random_concrete_algebra, random_morphism, random_operator_algebra, random_poset,
    random_quotient, random_relation, random_section_algebra, random_section_subalgebra, stream,
    GeneratorConfig,
};
use crate::operators::{
    back_violation, counit_relation_round_trip, forth_violation, g_signed,
    operation_from_relation, relation_from_operation, unit_operator_round_trip,
    validate_operator, Antidomain, Converse, OperatorError, OperatorTable, Override,
    QuotientRelation, SignedAlgebra, SignedQuotient,
};
use crate::oracle::{
    brute_force_representation, enumerate_partial_sections, unit_representation,
    validate_representation, RepresentationOutcome, SearchBudget,
};
use crate::pfun::{PartialFunction, PfError};
use crate::setq::{quotients_isomorphic, QuotientMorphism, SetQuotient};
use crate::util::par_map;

/// Random concrete algebras checked against the axioms.
pub const AXIOM_INSTANCES: usize = 500;
/// Random quotients checked for dual cardinality and completeness.
pub const DUAL_CARDINALITY_INSTANCES: usize = 200;
/// Random algebra/quotient pairs checked for the adjunction identities.
pub const ADJUNCTION_INSTANCES: usize = 100;
/// Composable pairs checked for the functor composition laws.
pub const FUNCTOR_LAW_PAIRS: usize = 50;
/// Random algebras run through the completion checks.
pub const COMPLETION_INSTANCES: usize = 100;
/// Leading completion instances forced small enough for brute-force
/// uniqueness counting.
pub const COMPLETION_TINY_INSTANCES: usize = 20;
/// Random completions probed for the distributive laws.
pub const DISTRIBUTIVITY_INSTANCES: usize = 100;
/// Compatible set pairs sampled per completion.
pub const DISTRIBUTIVITY_SAMPLES: usize = 20;
/// Random operator-closed algebras checked per operator suite run.
pub const OPERATOR_INSTANCES: usize = 50;
/// Sampled posets checked for the embedding.
pub const POSET_SAMPLE_INSTANCES: usize = 500;
/// Posets up to this many points are swept exhaustively.
pub const POSET_EXHAUSTIVE_MAX: usize = 3;
/// Random algebras cross-checked against the representation search.
pub const REPRESENTATION_INSTANCES: usize = 100;

/// Duals computed inside the suites are kept at or below this many
/// sections, so triangle and completion checks stay at desk scale.
const SUITE_SECTION_CAP: usize = 512;
/// Failures printed per check before the report elides the rest.
const DISPLAY_FAILURE_CAP: usize = 8;

/// The suite names `run_suite` accepts, in canonical order.
pub const SUITE_NAMES: [&str; 9] = [
    "axioms",
    "completeness-fixture",
    "dual-cardinality",
    "adjunction",
    "completion",
    "distributivity",
    "operators",
    "poset-embedding",
    "representation",
];

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum SuiteError {
    #[error("unknown suite `{0}`; known suites are axioms, completeness-fixture, dual-cardinality, adjunction, completion, distributivity, operators, poset-embedding, representation, and all")]
    UnknownSuite(String),
}

/// Shared knobs for a suite run. Defaults reproduce the pinned check
/// counts; `iterations` and `max_size` scale them, `jobs` only changes the
/// worker count, never the outcome.
#[derive(Clone, Debug)]
pub struct SuiteConfig {
    pub seed: u64,
    pub iterations: Option<usize>,
    pub max_size: Option<usize>,
    pub jobs: usize,
    /// Where failing instances are written; `None` disables artifacts.
    pub artifact_dir: Option<PathBuf>,
}

impl Default for SuiteConfig {
    fn default() -> Self {
        SuiteConfig {
            seed: 0,
            iterations: None,
            max_size: None,
            jobs: 1,
            artifact_dir: None,
        }
    }
}

/// One failed instance of one check.
#[derive(Clone, Debug)]
pub struct Failure {
    /// Generated-instance index, or `None` for a pinned fixture.
    pub instance: Option<usize>,
    pub message: String,
    /// Re-loadable counterexample file, when an artifact directory is set.
    pub artifact: Option<PathBuf>,
}

/// Aggregate result of one named check across all instances.
#[derive(Clone, Debug)]
pub struct CheckOutcome {
    pub name: &'static str,
    pub instances: usize,
    pub failures: Vec<Failure>,
}

/// Result of one suite run.
#[derive(Clone, Debug)]
pub struct SuiteReport {
    pub suite: &'static str,
    pub checks: Vec<CheckOutcome>,
}

impl SuiteReport {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.failures.is_empty())
    }
}

impl fmt::Display for SuiteReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(
            f,
            "suite {}: {}",
            self.suite,
            if self.passed() { "pass" } else { "FAIL" }
        )?;
        for check in &self.checks {
            writeln!(
                f,
                "  {}: {} instances, {} failures",
                check.name,
                check.instances,
                check.failures.len()
            )?;
            for fail in check.failures.iter().take(DISPLAY_FAILURE_CAP) {
                let who = match fail.instance {
                    Some(i) => format!("instance {i}"),
                    None => "fixture".to_string(),
                };
                write!(f, "    {who}: {}", fail.message)?;
                if let Some(path) = &fail.artifact {
                    write!(f, " [artifact: {}]", path.display())?;
                }
                writeln!(f)?;
            }
            if check.failures.len() > DISPLAY_FAILURE_CAP {
                writeln!(
                    f,
                    "    ... and {} more",
                    check.failures.len() - DISPLAY_FAILURE_CAP
                )?;
            }
        }
        Ok(())
    }
}

/// Runs one suite by name, or every suite for `"all"`, in canonical order.
pub fn run_suite(name: &str, cfg: &SuiteConfig) -> Result<Vec<SuiteReport>, SuiteError> {
    if name == "all" {
        return Ok(SUITE_NAMES.iter().map(|n| run_named(n, cfg)).collect());
    }
    if SUITE_NAMES.contains(&name) {
        Ok(vec![run_named(name, cfg)])
    } else {
        Err(SuiteError::UnknownSuite(name.to_string()))
    }
}

fn run_named(name: &str, cfg: &SuiteConfig) -> SuiteReport {
    match name {
        "axioms" => suite_axioms(cfg),
        "completeness-fixture" => suite_completeness_fixture(cfg),
        "dual-cardinality" => suite_dual_cardinality(cfg),
        "adjunction" => suite_adjunction(cfg),
        "completion" => suite_completion(cfg),
        "distributivity" => suite_distributivity(cfg),
        "operators" => suite_operators(cfg),
        "poset-embedding" => suite_poset_embedding(cfg),
        "representation" => suite_representation(cfg),
        _ => unreachable!("run_suite validates the name"),
    }
}

// ---------------------------------------------------------------------
// instance plumbing

struct RawFailure {
    check: &'static str,
    message: String,
    /// file extension and content for the counterexample, if any
    artifact: Option<(&'static str, String)>,
}

/// Per-instance scratch: which checks ran and which failed.
struct Probe {
    ran: Vec<&'static str>,
    failures: Vec<RawFailure>,
}

impl Probe {
    fn new() -> Self {
        Probe {
            ran: Vec::new(),
            failures: Vec::new(),
        }
    }

    fn pass(&mut self, check: &'static str) {
        self.ran.push(check);
    }

    fn assert(
        &mut self,
        check: &'static str,
        ok: bool,
        detail: impl FnOnce() -> (String, Option<(&'static str, String)>),
    ) {
        self.ran.push(check);
        if !ok {
            let (message, artifact) = detail();
            self.failures.push(RawFailure {
                check,
                message,
                artifact,
            });
        }
    }

    fn fail(
        &mut self,
        check: &'static str,
        message: String,
        artifact: Option<(&'static str, String)>,
    ) {
        self.ran.push(check);
        self.failures.push(RawFailure {
            check,
            message,
            artifact,
        });
    }
}

/// Runs the fixture block once and the instance body `count` times across
/// the worker pool, then folds everything into a report in canonical
/// order.
fn collect(
    suite: &'static str,
    checks: &'static [&'static str],
    cfg: &SuiteConfig,
    count: usize,
    body: impl Fn(usize, &mut Probe) + Sync,
    fixtures: impl FnOnce(&mut Probe),
) -> SuiteReport {
    let mut outcomes: Vec<CheckOutcome> = checks
        .iter()
        .map(|&name| CheckOutcome {
            name,
            instances: 0,
            failures: Vec::new(),
        })
        .collect();
    let mut fixture_probe = Probe::new();
    fixtures(&mut fixture_probe);
    let probes = par_map(cfg.jobs, count, |i| {
        let mut probe = Probe::new();
        body(i, &mut probe);
        probe
    });

    let mut fixture_seq = 0usize;
    let labeled = std::iter::once((None, fixture_probe))
        .chain(probes.into_iter().enumerate().map(|(i, p)| (Some(i), p)));
    for (instance, probe) in labeled {
        for name in probe.ran {
            if let Some(outcome) = outcomes.iter_mut().find(|o| o.name == name) {
                outcome.instances += 1;
            }
        }
        for raw in probe.failures {
            let mut message = raw.message;
            let mut artifact = None;
            if let (Some(dir), Some((ext, content))) =
                (cfg.artifact_dir.as_deref(), raw.artifact)
            {
                let label = match instance {
                    Some(i) => format!("{i:04}"),
                    None => {
                        let label = format!("fixture{fixture_seq}");
                        fixture_seq += 1;
                        label
                    }
                };
                match write_artifact(dir, suite, raw.check, &label, ext, &content) {
                    Ok(path) => artifact = Some(path),
                    Err(e) => message.push_str(&format!(" (artifact write failed: {e})")),
                }
            }
            if let Some(outcome) = outcomes.iter_mut().find(|o| o.name == raw.check) {
                outcome.failures.push(Failure {
                    instance,
                    message,
                    artifact,
                });
            }
        }
    }
    SuiteReport {
        suite,
        checks: outcomes,
    }
}

fn write_artifact(
    dir: &Path,
    suite: &str,
    check: &str,
    label: &str,
    ext: &str,
    content: &str,
) -> Result<PathBuf, String> {
    fs::create_dir_all(dir).map_err(|e| e.to_string())?;
    let path = dir.join(format!("{suite}-{check}-{label}.{ext}"));
    fs::write(&path, content).map_err(|e| e.to_string())?;
    Ok(path)
}

fn instances(cfg: &SuiteConfig, default: usize) -> usize {
    cfg.iterations.unwrap_or(default)
}

fn size_cap(cfg: &SuiteConfig, default: usize) -> usize {
    cfg.max_size.unwrap_or(default).max(1)
}

fn instance_rng(cfg: &SuiteConfig, suite_index: u64, instance: usize) -> ChaCha8Rng {
    stream(
        &GeneratorConfig::with_seed(cfg.seed),
        (suite_index << 32) | instance as u64,
    )
}

// ---------------------------------------------------------------------
// artifact builders

fn concrete_artifact(conc: &ConcreteAlgebra) -> Option<(&'static str, String)> {
    Some(("alg", emit_algebra(&AlgebraFile::from_concrete(conc.clone()))))
}

fn table_artifact(a: &AbstractAlgebra) -> Option<(&'static str, String)> {
    Some(("alg", emit_algebra(&AlgebraFile::from_algebra(a.clone()))))
}

fn operators_artifact(
    conc: &ConcreteAlgebra,
    tables: &[OperatorTable],
) -> Option<(&'static str, String)> {
    let file = AlgebraFile::from_concrete(conc.clone()).with_operators(tables.to_vec());
    Some(("alg", emit_algebra(&file)))
}

fn quotient_artifact(pi: &SetQuotient) -> Option<(&'static str, String)> {
    Some(("quot", emit_quotient(&QuotientFile::from_quotient(pi.clone()))))
}

fn relation_artifact(
    pi: &SetQuotient,
    rel: &QuotientRelation,
) -> Option<(&'static str, String)> {
    let file = QuotientFile::from_quotient(pi.clone()).with_relations(vec![rel.clone()]);
    Some(("quot", emit_quotient(&file)))
}

fn morphism_artifact(phi: &QuotientMorphism) -> Option<(&'static str, String)> {
    Some(("morph", emit_morphism(phi)))
}

fn poset_artifact(poset: &CompatibilityPoset) -> Option<(&'static str, String)> {
    Some(("poset", emit_poset(poset)))
}

// ---------------------------------------------------------------------
// shared generators

/// Atom count and section count of the dual, when the algebra has one.
fn dual_profile(a: &AbstractAlgebra) -> Option<(usize, usize)> {
    f_object(a)
        .ok()
        .map(|d| (d.atoms.len(), d.quotient.section_count()))
}

/// A random valid algebra whose dual section space fits under `dual_cap`,
/// drawn half from concrete closures and half from section subalgebras.
fn random_small_valid_algebra(
    rng: &mut ChaCha8Rng,
    max_elements: usize,
    dual_cap: usize,
) -> AbstractAlgebra {
    for _ in 0..64 {
        let conc = if rng.gen_bool(0.5) {
            random_concrete_algebra(rng, 4, max_elements)
        } else {
            let sa = random_section_algebra(rng, 4, max_elements.max(2));
            random_section_subalgebra(rng, &sa, max_elements)
        };
        let a = conc.to_abstract();
        if dual_profile(&a).is_some_and(|(_, s)| s <= dual_cap) {
            return a;
        }
    }
    // Base-2 closures have at most four atoms, so their duals always fit.
    random_concrete_algebra(rng, 2, max_elements.min(8).max(1)).to_abstract()
}

/// The three-element algebra of two disjoint singletons over a
/// three-point base.
fn disjoint_singletons_algebra() -> ConcreteAlgebra {
    let elements = vec![
        PartialFunction::empty(3),
        PartialFunction::new(3, vec![(1, 1)]).expect("one pair is functional"),
        PartialFunction::new(3, vec![(2, 2)]).expect("one pair is functional"),
    ];
    ConcreteAlgebra::from_closed_elements(3, elements)
        .expect("differences and restrictions of disjoint singletons stay in the set")
}

/// Injective partial functions closed under converse: two points mapping
/// into a sink, the sink mapping back out.
fn converse_fixture() -> ConcreteAlgebra {
    let pf = |pairs: Vec<(usize, usize)>| PartialFunction::new(3, pairs).expect("functional");
    ConcreteAlgebra::from_closed_elements(
        3,
        vec![
            pf(vec![]),
            pf(vec![(0, 2)]),
            pf(vec![(1, 2)]),
            pf(vec![(2, 0)]),
            pf(vec![(2, 1)]),
        ],
    )
    .expect("the converse fixture is closed under both operations")
}

/// One deliberately corrupted table per axiom, paired with the axiom it
/// must be caught violating.
fn corrupted_axiom_fixtures() -> Vec<(u8, AbstractAlgebra)> {
    let two = |minus: [usize; 4], restrict: [usize; 4]| {
        AbstractAlgebra::from_tables(2, minus.to_vec(), restrict.to_vec())
            .expect("tables are total and in range")
    };
    let three = |minus: [usize; 9], restrict: [usize; 9]| {
        AbstractAlgebra::from_tables(3, minus.to_vec(), restrict.to_vec())
            .expect("tables are total and in range")
    };
    vec![
        // a - (b - a) never returns a
        (1, two([1, 1, 1, 1], [0, 0, 0, 0])),
        // difference ignores its right argument, so the meet loses symmetry
        (2, two([0, 0, 1, 1], [0, 0, 0, 0])),
        // one rogue entry makes subtracting b then c order-sensitive
        (3, three([0, 0, 0, 1, 0, 1, 2, 1, 0], [0, 0, 0, 0, 0, 0, 0, 0, 0])),
        // valid difference tables with one corrupted restriction entry
        (
            4,
            three(
                [0, 0, 0, 1, 0, 1, 2, 2, 0],
                [0, 0, 0, 0, 1, 2, 0, 0, 2],
            ),
        ),
        // restriction no longer fixes an element below its own domain
        (
            5,
            three(
                [0, 0, 0, 1, 0, 1, 2, 2, 0],
                [0, 0, 0, 0, 0, 0, 0, 0, 2],
            ),
        ),
    ]
}

// ---------------------------------------------------------------------
// the suites

/// Random concrete algebras satisfy every axiom; corrupted tables are
/// caught with a witness.
pub fn suite_axioms(cfg: &SuiteConfig) -> SuiteReport {
    let count = instances(cfg, AXIOM_INSTANCES);
    let cap = size_cap(cfg, 64);
    collect(
        "axioms",
        &["random-concrete-algebras", "fault-injection"],
        cfg,
        count,
        move |i, p| {
            let mut rng = instance_rng(cfg, 1, i);
            let conc = random_concrete_algebra(&mut rng, 5, cap);
            let check = conc.to_abstract().check_axioms();
            p.assert("random-concrete-algebras", check.is_pass(), || {
                let witness = match check {
                    AxiomCheck::Fail(w) => w.to_string(),
                    AxiomCheck::Pass => unreachable!("guarded by is_pass"),
                };
                (
                    format!("a concrete algebra violates an axiom: {witness}"),
                    concrete_artifact(&conc),
                )
            });
        },
        |p| {
            for (axiom, alg) in corrupted_axiom_fixtures() {
                let caught = alg
                    .axiom_witness(axiom)
                    .is_some_and(|w| w.axiom == axiom)
                    && !alg.check_axioms().is_pass();
                p.assert("fault-injection", caught, || {
                    (
                        format!("corrupted table for axiom {axiom} was not flagged"),
                        table_artifact(&alg),
                    )
                });
            }
        },
    )
}

/// The two-disjoint-singletons algebra has every meet, lacks a compatible
/// join, and has exactly two atoms.
pub fn suite_completeness_fixture(cfg: &SuiteConfig) -> SuiteReport {
    collect(
        "completeness-fixture",
        &["meet-complete", "compatibly-incomplete", "atoms"],
        cfg,
        0,
        |_, _| {},
        |p| {
            let conc = disjoint_singletons_algebra();
            let a = conc.to_abstract();
            let ord = match a.order() {
                Ok(ord) => ord,
                Err(e) => {
                    let msg = format!("order construction failed: {e}");
                    p.fail("meet-complete", msg.clone(), concrete_artifact(&conc));
                    p.fail("compatibly-incomplete", msg.clone(), concrete_artifact(&conc));
                    p.fail("atoms", msg, concrete_artifact(&conc));
                    return;
                }
            };

            let meet = a.meet_completeness_witness(&ord, 16);
            p.assert("meet-complete", matches!(meet, Ok(None)), || {
                (
                    format!("expected every nonempty subset to have a meet, got {meet:?}"),
                    concrete_artifact(&conc),
                )
            });

            let joinless = a.compatible_completeness_witness(&ord, 16);
            let pair = conc.compatible_pair_without_union();
            let incomplete = matches!(&joinless, Ok(Some(_))) && pair == Some((1, 2));
            p.assert("compatibly-incomplete", incomplete, || {
                (
                    format!(
                        "expected the two singletons to lack a join, got {joinless:?} / {pair:?}"
                    ),
                    concrete_artifact(&conc),
                )
            });

            let atoms = ord.atoms();
            p.assert("atoms", atoms.len() == 2 && ord.is_atomic(), || {
                (
                    format!("expected exactly 2 atoms and atomicity, got atoms {atoms:?}"),
                    concrete_artifact(&conc),
                )
            });
        },
    )
}

/// Section algebras have exactly the predicted size, singleton atoms, and
/// compatible completeness.
pub fn suite_dual_cardinality(cfg: &SuiteConfig) -> SuiteReport {
    let count = instances(cfg, DUAL_CARDINALITY_INSTANCES);
    let carrier_cap = size_cap(cfg, 6);
    collect(
        "dual-cardinality",
        &["section-count", "atoms-are-singletons", "compatibly-complete"],
        cfg,
        count,
        move |i, p| {
            let mut rng = instance_rng(cfg, 3, i);
            let pi = random_quotient(&mut rng, carrier_cap);
            let expected: usize = pi.fiber_sizes().iter().map(|&s| s + 1).product();
            let sa = match g_object(&pi) {
                Ok(sa) => sa,
                Err(e) => {
                    let msg = format!("section algebra construction failed: {e}");
                    p.fail("section-count", msg.clone(), quotient_artifact(&pi));
                    p.fail("atoms-are-singletons", msg.clone(), quotient_artifact(&pi));
                    p.fail("compatibly-complete", msg, quotient_artifact(&pi));
                    return;
                }
            };

            let listed = enumerate_partial_sections(&pi, 4096);
            let count_ok = sa.concrete.len() == expected
                && matches!(&listed, Ok(v) if v.as_slice() == sa.concrete.elements());
            p.assert("section-count", count_ok, || {
                (
                    format!(
                        "expected {expected} sections, functor built {}, independent enumeration {:?}",
                        sa.concrete.len(),
                        listed.map(|v| v.len())
                    ),
                    quotient_artifact(&pi),
                )
            });

            let a = sa.algebra();
            match a.order() {
                Ok(ord) => {
                    let atoms = ord.atoms();
                    let singleton_ok = atoms.len() == pi.carrier()
                        && atoms
                            .iter()
                            .all(|&x| sa.concrete.elements()[x].pairs().count() == 1);
                    p.assert("atoms-are-singletons", singleton_ok, || {
                        (
                            format!(
                                "expected {} singleton atoms, got {:?}",
                                pi.carrier(),
                                atoms
                            ),
                            quotient_artifact(&pi),
                        )
                    });

                    let complete = sa.concrete.is_compatibly_complete()
                        && (a.size() > 12
                            || matches!(
                                a.compatible_completeness_witness(&ord, 12),
                                Ok(None)
                            ));
                    p.assert("compatibly-complete", complete, || {
                        (
                            "a compatible pair of sections has no join".to_string(),
                            quotient_artifact(&pi),
                        )
                    });
                }
                Err(e) => {
                    let msg = format!("order construction failed: {e}");
                    p.fail("atoms-are-singletons", msg.clone(), quotient_artifact(&pi));
                    p.fail("compatibly-complete", msg, quotient_artifact(&pi));
                }
            }
        },
        |_| {},
    )
}

/// Triangle identities, naturality squares, the double-dual quotient, and
/// the functor laws.
pub fn suite_adjunction(cfg: &SuiteConfig) -> SuiteReport {
    let count = instances(cfg, ADJUNCTION_INSTANCES);
    let law_pairs = FUNCTOR_LAW_PAIRS.min(count);
    let element_cap = size_cap(cfg, 64);
    collect(
        "adjunction",
        &[
            "triangle-f",
            "triangle-g",
            "unit-naturality",
            "counit-naturality",
            "double-dual-quotient",
            "functor-identity",
            "functor-composition",
        ],
        cfg,
        count,
        move |i, p| {
            let mut rng = instance_rng(cfg, 4, i);

            // quotient side
            let pi = random_quotient(&mut rng, 6);
            let tri_g = check_triangle_g(&pi);
            p.assert("triangle-g", matches!(tri_g, Ok(true)), || {
                (
                    format!("quotient-side triangle identity failed: {tri_g:?}"),
                    quotient_artifact(&pi),
                )
            });

            let phi = random_morphism(&mut rng, &pi);
            let nat_counit = check_counit_naturality(&phi);
            p.assert("counit-naturality", matches!(nat_counit, Ok(true)), || {
                (
                    format!("counit naturality square failed: {nat_counit:?}"),
                    morphism_artifact(&phi),
                )
            });

            let double_ok = match g_object(&pi).and_then(|sa| f_object(&sa.algebra())) {
                Ok(d) => quotients_isomorphic(&d.quotient, &pi).is_some(),
                Err(_) => false,
            };
            p.assert("double-dual-quotient", double_ok, || {
                (
                    "applying both functors did not return an isomorphic quotient"
                        .to_string(),
                    quotient_artifact(&pi),
                )
            });

            // algebra side: a section algebra and a closed subalgebra of it
            let ambient = random_section_algebra(&mut rng, 5, element_cap.max(32));
            let ambient_alg = ambient.algebra();
            let sub_raw = random_section_subalgebra(&mut rng, &ambient, element_cap);
            let sub = if dual_profile(&sub_raw.to_abstract())
                .is_some_and(|(_, s)| s <= SUITE_SECTION_CAP)
            {
                sub_raw
            } else {
                ambient.concrete.clone()
            };
            let sub_alg = sub.to_abstract();

            let a = if i % 2 == 0 {
                ambient_alg.clone()
            } else {
                sub_alg.clone()
            };
            let tri_f = check_triangle_f(&a);
            p.assert("triangle-f", matches!(tri_f, Ok(true)), || {
                (
                    format!("algebra-side triangle identity failed: {tri_f:?}"),
                    table_artifact(&a),
                )
            });

            let identity_ok = matches!(check_f_identity(&a), Ok(true))
                && matches!(check_g_identity(&pi), Ok(true));
            p.assert("functor-identity", identity_ok, || {
                (
                    "a functor does not fix an identity morphism".to_string(),
                    quotient_artifact(&pi),
                )
            });

            let inclusion: Vec<usize> = sub
                .elements()
                .iter()
                .map(|e| {
                    ambient
                        .concrete
                        .index_of(e)
                        .expect("subalgebra elements are ambient sections")
                })
                .collect();
            match CompleteHom::validate(&sub_alg, &ambient_alg, inclusion) {
                Ok(h) => {
                    let nat_unit = check_unit_naturality(&h);
                    p.assert("unit-naturality", matches!(nat_unit, Ok(true)), || {
                        (
                            format!("unit naturality square failed: {nat_unit:?}"),
                            table_artifact(&sub_alg),
                        )
                    });
                    if i < law_pairs {
                        let phi2 = random_morphism(&mut rng, phi.target());
                        let g_comp = check_g_composition(&phi, &phi2);
                        let seeds: Vec<PartialFunction> = sub
                            .elements()
                            .iter()
                            .filter(|_| rng.gen_bool(0.4))
                            .take(2)
                            .cloned()
                            .collect();
                        let sub1 = ConcreteAlgebra::close_under_ops(
                            sub.base_size(),
                            seeds,
                            &[],
                            DEFAULT_CLOSURE_CAP,
                        )
                        .expect("closing inside a closed algebra stays within it");
                        let map1: Vec<usize> = sub1
                            .elements()
                            .iter()
                            .map(|e| {
                                sub.index_of(e)
                                    .expect("the closure stays inside the subalgebra")
                            })
                            .collect();
                        let comp_ok = match CompleteHom::validate(
                            &sub1.to_abstract(),
                            &sub_alg,
                            map1,
                        ) {
                            Ok(h1) => {
                                matches!(check_f_composition(&h1, &h), Ok(true))
                                    && matches!(g_comp, Ok(true))
                            }
                            Err(_) => false,
                        };
                        p.assert("functor-composition", comp_ok, || {
                            (
                                "a functor does not commute with composition".to_string(),
                                quotient_artifact(&pi),
                            )
                        });
                    }
                }
                Err(e) => {
                    p.fail(
                        "unit-naturality",
                        format!("the inclusion is not a complete hom: {e}"),
                        table_artifact(&sub_alg),
                    );
                }
            }
        },
        |_| {},
    )
}

/// The compatible completion embeds, is idempotent, and is unique up to a
/// unique isomorphism.
pub fn suite_completion(cfg: &SuiteConfig) -> SuiteReport {
    let count = instances(cfg, COMPLETION_INSTANCES);
    let tiny_cut = COMPLETION_TINY_INSTANCES.min(count);
    let element_cap = size_cap(cfg, 16);
    collect(
        "completion",
        &[
            "unit-embedding",
            "idempotent",
            "uniqueness-iso",
            "uniqueness-brute",
        ],
        cfg,
        count,
        move |i, p| {
            let mut rng = instance_rng(cfg, 5, i);
            let a = if i < tiny_cut {
                // small enough that the completion stays within the
                // brute-force uniqueness cap
                random_concrete_algebra(&mut rng, 2, 4).to_abstract()
            } else {
                random_small_valid_algebra(&mut rng, element_cap, SUITE_SECTION_CAP)
            };
            let w = match compatible_completion(&a) {
                Ok(w) => {
                    p.pass("unit-embedding");
                    w
                }
                Err(e) => {
                    p.fail(
                        "unit-embedding",
                        format!("completion rejected: {e}"),
                        table_artifact(&a),
                    );
                    return;
                }
            };

            let idem = completion_is_idempotent(&w);
            p.assert("idempotent", matches!(idem, Ok(true)), || {
                (
                    format!("completing the completion moved it: {idem:?}"),
                    table_artifact(&a),
                )
            });

            // relabel the completion to fake an independently built one
            let c = w.sections.algebra();
            let n = c.size();
            let mut sigma: Vec<usize> = (0..n).collect();
            sigma.shuffle(&mut rng);
            let mut minus = vec![0usize; n * n];
            let mut restrict = vec![0usize; n * n];
            for x in 0..n {
                for y in 0..n {
                    minus[sigma[x] * n + sigma[y]] = sigma[c.minus(x, y)];
                    restrict[sigma[x] * n + sigma[y]] = sigma[c.restrict(x, y)];
                }
            }
            let c2 = AbstractAlgebra::from_tables(n, minus, restrict)
                .expect("a relabeling keeps tables total and in range");
            let map2: Vec<usize> = w.hom.map().iter().map(|&v| sigma[v]).collect();
            match CompleteHom::validate(&a, &c2, map2) {
                Ok(into_c2) => {
                    let theta = completion_isomorphism(&w.hom, &into_c2);
                    let theta_ok = matches!(&theta, Ok(t) if t.map() == sigma.as_slice());
                    p.assert("uniqueness-iso", theta_ok, || {
                        (
                            format!(
                                "isomorphism between two completions missing or wrong: {:?}",
                                theta.as_ref().err()
                            ),
                            table_artifact(&a),
                        )
                    });
                    if n <= UNIQUENESS_BRUTE_CAP {
                        let homs =
                            count_extension_homs(&w.hom, &into_c2, UNIQUENESS_BRUTE_CAP);
                        p.assert("uniqueness-brute", matches!(homs, Ok(1)), || {
                            (
                                format!("expected exactly one extension hom, got {homs:?}"),
                                table_artifact(&a),
                            )
                        });
                    }
                }
                Err(e) => {
                    p.fail(
                        "uniqueness-iso",
                        format!("relabeled completion rejected as a hom: {e}"),
                        table_artifact(&a),
                    );
                }
            }
        },
        |_| {},
    )
}

/// In completions, restriction distributes over joins and difference turns
/// right-hand joins into meets.
pub fn suite_distributivity(cfg: &SuiteConfig) -> SuiteReport {
    let count = instances(cfg, DISTRIBUTIVITY_INSTANCES);
    let element_cap = size_cap(cfg, 16);
    collect(
        "distributivity",
        &["completion-distributivity"],
        cfg,
        count,
        move |i, p| {
            let mut rng = instance_rng(cfg, 6, i);
            let a = random_small_valid_algebra(&mut rng, element_cap, SUITE_SECTION_CAP);
            match compatible_completion(&a) {
                Ok(w) => {
                    let alg = w.sections.algebra();
                    let violation =
                        distributivity_violation(&alg, DISTRIBUTIVITY_SAMPLES, rng.gen());
                    p.assert(
                        "completion-distributivity",
                        matches!(violation, Ok(None)),
                        || (format!("{violation:?}"), table_artifact(&alg)),
                    );
                }
                Err(e) => {
                    p.fail(
                        "completion-distributivity",
                        format!("completion rejected: {e}"),
                        table_artifact(&a),
                    );
                }
            }
        },
        |_| {},
    )
}

/// Catalog operators pass both operator checks, the known non-examples are
/// rejected with witnesses, and operations and relations survive their
/// round trips through the signed duality.
pub fn suite_operators(cfg: &SuiteConfig) -> SuiteReport {
    let count = instances(cfg, OPERATOR_INSTANCES);
    let element_cap = size_cap(cfg, 64);
    collect(
        "operators",
        &[
            "catalog-positive",
            "operation-round-trip",
            "relation-round-trip",
            "signed-triangles",
            "rejection-witnesses",
        ],
        cfg,
        count,
        move |i, p| {
            let mut rng = instance_rng(cfg, 7, i);
            let (conc, tables) = random_operator_algebra(&mut rng, 3, element_cap);
            let alg = conc.to_abstract();
            let rejected: Vec<String> = tables
                .iter()
                .filter_map(|t| {
                    validate_operator(&alg, t)
                        .err()
                        .map(|e| format!("{}: {e}", t.name))
                })
                .collect();
            p.assert("catalog-positive", rejected.is_empty(), || {
                (
                    format!("catalog operators rejected: {}", rejected.join("; ")),
                    operators_artifact(&conc, &tables),
                )
            });

            // the unit round trip needs a small dual, so fall back to a
            // base-2 closure (at most four atoms) when this one is big
            let (small_conc, small_tables) = match dual_profile(&alg) {
                Some((atoms, sections)) if atoms <= 5 && sections <= 32 => (conc, tables),
                _ => random_operator_algebra(&mut rng, 2, element_cap.max(9)),
            };
            let signed = SignedAlgebra {
                algebra: small_conc.to_abstract(),
                operators: small_tables,
            };
            let round = unit_operator_round_trip(&signed);
            p.assert("operation-round-trip", matches!(round, Ok(None)), || {
                (
                    format!("operation did not survive the round trip: {round:?}"),
                    operators_artifact(&small_conc, &signed.operators),
                )
            });

            let pi = random_quotient(&mut rng, 4);
            let rel = random_relation(&mut rng, &pi, if i % 2 == 0 { 2 } else { 3 }, "r");
            let round2 = counit_relation_round_trip(&pi, &rel);
            p.assert("relation-round-trip", matches!(round2, Ok(true)), || {
                (
                    format!("relation did not survive the round trip: {round2:?}"),
                    relation_artifact(&pi, &rel),
                )
            });

            let triangles = signed_triangle_outcome(&pi, &rel);
            p.assert("signed-triangles", triangles.is_ok(), || {
                (
                    triangles.expect_err("guarded by is_ok"),
                    relation_artifact(&pi, &rel),
                )
            });
        },
        |p| {
            // override and antidomain break complete additivity
            let full =
                ConcreteAlgebra::from_closed_elements(2, PartialFunction::enumerate_all(2))
                    .expect("the full function algebra is closed");
            let full_alg = full.to_abstract();
            for op in [
                &Override as &dyn ConcreteOperator,
                &Antidomain as &dyn ConcreteOperator,
            ] {
                let name = op.name().to_string();
                let table = OperatorTable::from_concrete(&full, op)
                    .expect("the full algebra is closed under the operator");
                let verdict = validate_operator(&full_alg, &table);
                p.assert(
                    "rejection-witnesses",
                    matches!(verdict, Err(OperatorError::NotAdditive(_))),
                    || {
                        (
                            format!("expected an additivity rejection for {name}, got {verdict:?}"),
                            concrete_artifact(&full),
                        )
                    },
                );
            }

            // converse preserves joins but not compatibility
            let conv = converse_fixture();
            let table = OperatorTable::from_concrete(&conv, &Converse)
                .expect("the fixture is closed under converse");
            let verdict = validate_operator(&conv.to_abstract(), &table);
            p.assert(
                "rejection-witnesses",
                matches!(verdict, Err(OperatorError::NotCompatPreserving(_))),
                || {
                    (
                        format!("expected a compatibility rejection for converse, got {verdict:?}"),
                        concrete_artifact(&conv),
                    )
                },
            );

            // converse refuses a non-injective argument outright
            let fork = PartialFunction::new(3, vec![(0, 2), (1, 2)]).expect("functional");
            let refused = Converse.apply(3, &[&fork]);
            p.assert(
                "rejection-witnesses",
                matches!(refused, Err(PfError::NotInjective { .. })),
                || {
                    (
                        format!("expected converse to refuse a non-injective input, got {refused:?}"),
                        None,
                    )
                },
            );
        },
    )
}

/// Both signed triangle identities over one quotient-with-relation: the
/// counit is a signed morphism (forth and back), and the unit commutes
/// with the operation the relation induces.
fn signed_triangle_outcome(pi: &SetQuotient, rel: &QuotientRelation) -> Result<(), String> {
    if !matches!(check_triangle_g(pi), Ok(true)) {
        return Err("underlying quotient-side triangle identity failed".to_string());
    }
    let cw = counit(pi).map_err(|e| e.to_string())?;
    let op = operation_from_relation(&cw.sections, rel).map_err(|e| e.to_string())?;
    let rel2 =
        relation_from_operation(&cw.dual, &cw.sections.algebra(), &op).map_err(|e| e.to_string())?;
    if let Some(v) = forth_violation(&cw.morphism, rel, &rel2) {
        return Err(format!("forth condition fails: {v:?}"));
    }
    if let Some(v) = back_violation(&cw.morphism, rel, &rel2) {
        return Err(format!("back condition fails: {v:?}"));
    }
    let (sa, signed_alg) = g_signed(&SignedQuotient {
        quotient: pi.clone(),
        relations: vec![rel.clone()],
    })
    .map_err(|e| e.to_string())?;
    if !matches!(check_triangle_f(&sa.algebra()), Ok(true)) {
        return Err("underlying algebra-side triangle identity failed".to_string());
    }
    match unit_operator_round_trip(&signed_alg) {
        Ok(None) => Ok(()),
        Ok(Some(m)) => Err(format!(
            "unit does not commute with the induced operation: {m:?}"
        )),
        Err(e) => Err(e.to_string()),
    }
}

/// Posets with compatibility embed into partial functions, preserving and
/// reflecting both relations: exhaustively for small sizes, sampled at
/// five points.
pub fn suite_poset_embedding(cfg: &SuiteConfig) -> SuiteReport {
    let count = instances(cfg, POSET_SAMPLE_INSTANCES);
    let points = size_cap(cfg, 5);
    collect(
        "poset-embedding",
        &["exhaustive-small", "sampled"],
        cfg,
        count,
        move |i, p| {
            let mut rng = instance_rng(cfg, 8, i);
            let poset = random_poset(&mut rng, points);
            let verdict = verify_embedding(&poset, &embed(&poset));
            p.assert("sampled", verdict.is_ok(), || {
                (
                    format!("embedding violated: {}", verdict.unwrap_err()),
                    poset_artifact(&poset),
                )
            });
        },
        |p| {
            for size in 0..=POSET_EXHAUSTIVE_MAX {
                for leq in enumerate_posets(size) {
                    for compat in enumerate_compat_relations(size, &leq) {
                        let poset = CompatibilityPoset::new(size, &leq, &compat)
                            .expect("enumerated relations are valid");
                        let verdict = verify_embedding(&poset, &embed(&poset));
                        p.assert("exhaustive-small", verdict.is_ok(), || {
                            (
                                format!("embedding violated: {}", verdict.unwrap_err()),
                                poset_artifact(&poset),
                            )
                        });
                    }
                }
            }
        },
    )
}

/// The backtracking search finds a representation at base equal to the
/// atom count, the witness validates independently, and the unit embedding
/// read as a representation validates too.
pub fn suite_representation(cfg: &SuiteConfig) -> SuiteReport {
    let count = instances(cfg, REPRESENTATION_INSTANCES);
    let element_cap = size_cap(cfg, 16);
    collect(
        "representation",
        &["search-succeeds", "witness-validates", "unit-validates"],
        cfg,
        count,
        move |i, p| {
            let mut rng = instance_rng(cfg, 9, i);
            let a = random_small_valid_algebra(&mut rng, element_cap, SUITE_SECTION_CAP);
            let atom_count = a.order().map(|o| o.atoms().len()).unwrap_or(0);
            let budget = SearchBudget {
                max_base: atom_count,
                max_nodes: 1_000_000,
                seed: 0,
            };
            let outcome = brute_force_representation(&a, &budget);
            match outcome {
                RepresentationOutcome::Found(w) => {
                    p.pass("search-succeeds");
                    let verdict = validate_representation(&a, &w);
                    p.assert("witness-validates", verdict.is_ok(), || {
                        (
                            format!("search produced an invalid witness: {verdict:?}"),
                            table_artifact(&a),
                        )
                    });
                }
                other => {
                    p.fail(
                        "search-succeeds",
                        format!("search at base {atom_count} ended with {other:?}"),
                        table_artifact(&a),
                    );
                }
            }

            match unit(&a) {
                Ok(uw) => {
                    let w2 = unit_representation(&uw);
                    let verdict = validate_representation(&a, &w2);
                    p.assert("unit-validates", verdict.is_ok(), || {
                        (
                            format!("the unit embedding is not a representation: {verdict:?}"),
                            table_artifact(&a),
                        )
                    });
                }
                Err(e) => {
                    p.fail(
                        "unit-validates",
                        format!("unit construction failed: {e}"),
                        table_artifact(&a),
                    );
                }
            }
        },
        |_| {},
    )
}

#[cfg(test)]
mod tests {
    use super::*;

    fn tiny(seed: u64, iters: usize) -> SuiteConfig {
        SuiteConfig {
            seed,
            iterations: Some(iters),
            max_size: None,
            jobs: 2,
            artifact_dir: None,
        }
    }

    #[test]
    fn every_suite_passes_at_small_scale() {
        for name in SUITE_NAMES {
            let reports = run_suite(name, &tiny(11, 4)).unwrap();
            assert!(
                reports.iter().all(|r| r.passed()),
                "{name}:\n{}",
                reports
                    .iter()
                    .map(|r| r.to_string())
                    .collect::<String>()
            );
        }
    }

    #[test]
    fn unknown_suites_are_rejected() {
        let err = run_suite("nope", &SuiteConfig::default()).unwrap_err();
        assert_eq!(err, SuiteError::UnknownSuite("nope".to_string()));
    }

    #[test]
    fn all_runs_every_suite_in_canonical_order() {
        let reports = run_suite("all", &tiny(3, 1)).unwrap();
        let names: Vec<&str> = reports.iter().map(|r| r.suite).collect();
        assert_eq!(names, SUITE_NAMES.to_vec());
        assert!(reports.iter().all(|r| r.passed()));
    }

    #[test]
    fn failures_write_artifacts_that_reload() {
        let dir = std::env::temp_dir().join(format!("funalg-suite-artifacts-{}", std::process::id()));
        let cfg = SuiteConfig {
            artifact_dir: Some(dir.clone()),
            ..SuiteConfig::default()
        };
        let report = collect(
            "demo",
            &["always-fails"],
            &cfg,
            1,
            |_, p| {
                let pi = SetQuotient::new(vec![0, 0, 1]).unwrap();
                p.fail("always-fails", "deliberate".to_string(), quotient_artifact(&pi));
            },
            |_| {},
        );
        assert!(!report.passed());
        let failure = &report.checks[0].failures[0];
        let path = failure.artifact.clone().expect("artifact was written");
        let text = std::fs::read_to_string(&path).unwrap();
        let parsed = crate::files::parse_quotient(&text).unwrap();
        assert_eq!(parsed.quotient.carrier(), 3);
        std::fs::remove_dir_all(&dir).ok();
    }

    #[test]
    fn reports_render_one_line_per_check() {
        let report = suite_completeness_fixture(&SuiteConfig::default());
        assert!(report.passed());
        let text = report.to_string();
        assert!(text.contains("suite completeness-fixture: pass"));
        assert!(text.contains("meet-complete: 1 instances, 0 failures"));
        assert!(text.contains("compatibly-incomplete"));
        assert!(text.contains("atoms"));
    }

    #[test]
    fn reports_are_deterministic_and_job_count_independent() {
        let a = suite_dual_cardinality(&tiny(5, 6));
        let b = suite_dual_cardinality(&tiny(5, 6));
        assert_eq!(a.to_string(), b.to_string());
        let parallel = SuiteConfig {
            jobs: 4,
            ..tiny(5, 6)
        };
        assert_eq!(a.to_string(), suite_dual_cardinality(&parallel).to_string());
    }
}
