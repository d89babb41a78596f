//! Command-line driver: file-based verbs over algebras, quotients,
//! morphisms, and posets, plus the seeded property-suite runner.
//!
//! Exit codes: 0 pass, 1 property failure, 2 input error, 3 budget or
//! cap exceeded.

use std::fs;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand, ValueEnum};
use serde_json::json;

use funalg::algebra::{AxiomCheck, StructureError};
use funalg::compat_poset::{embed, verify_embedding};
use funalg::completion::{compatible_completion, CompletionError};
use funalg::concrete::ConcreteError;
use funalg::duality::{
    check_counit_naturality, check_f_identity, check_g_identity, check_triangle_f,
    check_triangle_g, f_object, g_object, DualityError,
};
use funalg::files::{
    emit_algebra, emit_quotient, parse_algebra, parse_morphism, parse_poset, parse_quotient,
    AlgebraFile, QuotientFile,
};
use funalg::operators::{f_signed, g_signed, OperatorError, SignedAlgebra, SignedQuotient};
use funalg::oracle::{
    brute_force_representation, validate_representation, RepresentationOutcome, SearchBudget,
};
use funalg::suites::{run_suite, SuiteConfig, SuiteReport};

const EXIT_PASS: i32 = 0;
const EXIT_PROPERTY_FAILURE: i32 = 1;
const EXIT_INPUT_ERROR: i32 = 2;
const EXIT_BUDGET: i32 = 3;

#[derive(Parser)]
#[command(
    name = "funalg",
    version,
    about = "Workbench for difference-restriction algebras of partial functions"
)]
struct Cli {
    /// Seed for every randomized command
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,

    /// Cap on generated instance sizes
    #[arg(long, global = true)]
    max_size: Option<usize>,

    /// Output format for reporting verbs (file-emitting verbs always
    /// print their file format)
    #[arg(long, global = true, value_enum, default_value = "text")]
    format: Format,

    /// Worker threads for suite fan-out; never changes results
    #[arg(long, global = true, default_value_t = 1)]
    jobs: usize,

    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Text,
    Json,
}

#[derive(Subcommand)]
enum Command {
    /// Check the five defining equations of an algebra file
    CheckAxioms { algebra: PathBuf },
    /// List the atoms of an algebra file
    Atoms { algebra: PathBuf },
    /// Emit the dual quotient of an atomic algebra (operators become
    /// relations)
    Dualize { algebra: PathBuf },
    /// Emit the section algebra of a quotient (relations become
    /// operators)
    DualAlgebra { quotient: PathBuf },
    /// Validate a morphism file and its counit naturality square
    CheckMorphism { morphism: PathBuf },
    /// Check the triangle and identity laws over an algebra or quotient
    /// file
    CheckAdjunction { file: PathBuf },
    /// Emit the compatible completion of an algebra file, with the
    /// embedding
    Complete { algebra: PathBuf },
    /// Search for a faithful assignment of partial functions
    Represent {
        algebra: PathBuf,
        /// Largest base size the search may try (default: twice the
        /// algebra size)
        #[arg(long)]
        max_base: Option<usize>,
        /// Search node budget
        #[arg(long, default_value_t = 1_000_000)]
        max_nodes: u64,
    },
    /// Embed a poset-with-compatibility into partial functions
    EmbedPoset { poset: PathBuf },
    /// Run a named property suite, or "all"
    RunSuite {
        suite: String,
        /// Override the pinned instance count of every check
        #[arg(long)]
        iters: Option<usize>,
        /// Directory where failing instances are dumped as re-loadable
        /// files
        #[arg(long, default_value = "counterexamples")]
        artifacts: PathBuf,
    },
}

/// A fatal error carrying the exit code it maps to.
struct Abort {
    code: i32,
    message: String,
}

type CliResult<T> = Result<T, Abort>;

fn abort(code: i32, message: impl Into<String>) -> Abort {
    Abort {
        code,
        message: message.into(),
    }
}

fn main() {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(code) => std::process::exit(code),
        Err(a) => {
            eprintln!("error: {}", a.message);
            std::process::exit(a.code);
        }
    }
}

fn run(cli: &Cli) -> CliResult<i32> {
    match &cli.command {
        Command::CheckAxioms { algebra } => cmd_check_axioms(cli, algebra),
        Command::Atoms { algebra } => cmd_atoms(cli, algebra),
        Command::Dualize { algebra } => cmd_dualize(algebra),
        Command::DualAlgebra { quotient } => cmd_dual_algebra(quotient),
        Command::CheckMorphism { morphism } => cmd_check_morphism(cli, morphism),
        Command::CheckAdjunction { file } => cmd_check_adjunction(cli, file),
        Command::Complete { algebra } => cmd_complete(algebra),
        Command::Represent {
            algebra,
            max_base,
            max_nodes,
        } => cmd_represent(cli, algebra, *max_base, *max_nodes),
        Command::EmbedPoset { poset } => cmd_embed_poset(cli, poset),
        Command::RunSuite {
            suite,
            iters,
            artifacts,
        } => cmd_run_suite(cli, suite, *iters, artifacts),
    }
}

// ---------------------------------------------------------------------
// error classification

fn structure_code(e: &StructureError) -> i32 {
    match e {
        StructureError::SubsetCapExceeded { .. } | StructureError::TooManyAtoms { .. } => {
            EXIT_BUDGET
        }
        _ => EXIT_INPUT_ERROR,
    }
}

fn concrete_code(e: &ConcreteError) -> i32 {
    match e {
        ConcreteError::ClosureCapExceeded { .. } => EXIT_BUDGET,
        _ => EXIT_INPUT_ERROR,
    }
}

fn duality_code(e: &DualityError) -> i32 {
    match e {
        DualityError::SectionSpaceTooLarge { .. } => EXIT_BUDGET,
        DualityError::Structure(inner) => structure_code(inner),
        DualityError::Sections(inner) => concrete_code(inner),
        _ => EXIT_INPUT_ERROR,
    }
}

fn completion_code(e: &CompletionError) -> i32 {
    match e {
        CompletionError::SizeAboveCap { .. } => EXIT_BUDGET,
        CompletionError::Structure(inner) => structure_code(inner),
        CompletionError::Duality(inner) => duality_code(inner),
        _ => EXIT_INPUT_ERROR,
    }
}

fn operator_code(e: &OperatorError) -> i32 {
    match e {
        OperatorError::CarrierTooLarge { .. } => EXIT_BUDGET,
        OperatorError::Structure(inner) => structure_code(inner),
        OperatorError::Duality(inner) => duality_code(inner),
        OperatorError::Concrete(inner) => concrete_code(inner),
        _ => EXIT_INPUT_ERROR,
    }
}

// ---------------------------------------------------------------------
// input plumbing

fn read_input(path: &Path) -> CliResult<String> {
    fs::read_to_string(path)
        .map_err(|e| abort(EXIT_INPUT_ERROR, format!("cannot read {}: {e}", path.display())))
}

fn load_algebra(path: &Path) -> CliResult<AlgebraFile> {
    parse_algebra(&read_input(path)?)
        .map_err(|e| abort(EXIT_INPUT_ERROR, format!("{}: {e}", path.display())))
}

fn load_quotient(path: &Path) -> CliResult<QuotientFile> {
    parse_quotient(&read_input(path)?)
        .map_err(|e| abort(EXIT_INPUT_ERROR, format!("{}: {e}", path.display())))
}

// ---------------------------------------------------------------------
// verbs

fn cmd_check_axioms(cli: &Cli, path: &Path) -> CliResult<i32> {
    let file = load_algebra(path)?;
    match file.algebra.check_axioms() {
        AxiomCheck::Pass => {
            match cli.format {
                Format::Text => println!("AXIOMS PASS"),
                Format::Json => println!("{}", json!({ "status": "pass" })),
            }
            Ok(EXIT_PASS)
        }
        AxiomCheck::Fail(w) => {
            match cli.format {
                Format::Text => println!("{w}"),
                Format::Json => println!(
                    "{}",
                    json!({
                        "status": "fail",
                        "axiom": w.axiom,
                        "a": w.a,
                        "b": w.b,
                        "c": w.c,
                    })
                ),
            }
            Ok(EXIT_PROPERTY_FAILURE)
        }
    }
}

fn cmd_atoms(cli: &Cli, path: &Path) -> CliResult<i32> {
    let file = load_algebra(path)?;
    let ord = file
        .algebra
        .order()
        .map_err(|e| abort(structure_code(&e), e.to_string()))?;
    let atoms = ord.atoms();
    match cli.format {
        Format::Text => {
            println!("{} atoms", atoms.len());
            for &a in &atoms {
                match &file.concrete {
                    Some(conc) => println!("atom {a}: {}", conc.elements()[a]),
                    None => println!("atom {a}"),
                }
            }
        }
        Format::Json => {
            let list: Vec<serde_json::Value> = atoms
                .iter()
                .map(|&a| match &file.concrete {
                    Some(conc) => json!({ "index": a, "function": conc.elements()[a].to_string() }),
                    None => json!({ "index": a }),
                })
                .collect();
            println!("{}", json!({ "atoms": list }));
        }
    }
    Ok(EXIT_PASS)
}

fn cmd_dualize(path: &Path) -> CliResult<i32> {
    let file = load_algebra(path)?;
    let out = if file.operators.is_empty() {
        let dual = f_object(&file.algebra)
            .map_err(|e| abort(duality_code(&e), e.to_string()))?;
        QuotientFile::from_quotient(dual.quotient)
    } else {
        let signed = SignedAlgebra {
            algebra: file.algebra,
            operators: file.operators,
        };
        let (_, dual) = f_signed(&signed)
            .map_err(|e| abort(operator_code(&e), e.to_string()))?;
        QuotientFile::from_quotient(dual.quotient).with_relations(dual.relations)
    };
    print!("{}", emit_quotient(&out));
    Ok(EXIT_PASS)
}

fn cmd_dual_algebra(path: &Path) -> CliResult<i32> {
    let file = load_quotient(path)?;
    let out = if file.relations.is_empty() {
        let sections = g_object(&file.quotient)
            .map_err(|e| abort(duality_code(&e), e.to_string()))?;
        AlgebraFile::from_concrete(sections.concrete)
    } else {
        let signed = SignedQuotient {
            quotient: file.quotient,
            relations: file.relations,
        };
        let (sections, algebra) = g_signed(&signed)
            .map_err(|e| abort(operator_code(&e), e.to_string()))?;
        AlgebraFile::from_concrete(sections.concrete).with_operators(algebra.operators)
    };
    print!("{}", emit_algebra(&out));
    Ok(EXIT_PASS)
}

fn cmd_check_morphism(cli: &Cli, path: &Path) -> CliResult<i32> {
    let phi = parse_morphism(&read_input(path)?)
        .map_err(|e| abort(EXIT_INPUT_ERROR, format!("{}: {e}", path.display())))?;
    let natural = check_counit_naturality(&phi)
        .map_err(|e| abort(duality_code(&e), e.to_string()))?;
    match cli.format {
        Format::Text => {
            println!(
                "morphism valid: {} classes -> {} classes",
                phi.source().classes(),
                phi.target().classes()
            );
            println!(
                "counit naturality: {}",
                if natural { "pass" } else { "FAIL" }
            );
        }
        Format::Json => println!(
            "{}",
            json!({
                "valid": true,
                "source_classes": phi.source().classes(),
                "target_classes": phi.target().classes(),
                "counit_naturality": natural,
            })
        ),
    }
    Ok(if natural {
        EXIT_PASS
    } else {
        EXIT_PROPERTY_FAILURE
    })
}

fn sniff_kind(text: &str) -> Option<&'static str> {
    for line in text.lines() {
        let t = line.trim();
        if t.is_empty() || t.starts_with('#') {
            continue;
        }
        if t.starts_with("algebra") {
            return Some("algebra");
        }
        if t.starts_with("quotient") {
            return Some("quotient");
        }
        return None;
    }
    None
}

fn cmd_check_adjunction(cli: &Cli, path: &Path) -> CliResult<i32> {
    let text = read_input(path)?;
    let (side, triangle, identity) = match sniff_kind(&text) {
        Some("algebra") => {
            let file = parse_algebra(&text)
                .map_err(|e| abort(EXIT_INPUT_ERROR, format!("{}: {e}", path.display())))?;
            let tri = check_triangle_f(&file.algebra)
                .map_err(|e| abort(duality_code(&e), e.to_string()))?;
            let id = check_f_identity(&file.algebra)
                .map_err(|e| abort(duality_code(&e), e.to_string()))?;
            ("algebra", tri, id)
        }
        Some("quotient") => {
            let file = parse_quotient(&text)
                .map_err(|e| abort(EXIT_INPUT_ERROR, format!("{}: {e}", path.display())))?;
            let tri = check_triangle_g(&file.quotient)
                .map_err(|e| abort(duality_code(&e), e.to_string()))?;
            let id = check_g_identity(&file.quotient)
                .map_err(|e| abort(duality_code(&e), e.to_string()))?;
            ("quotient", tri, id)
        }
        _ => {
            return Err(abort(
                EXIT_INPUT_ERROR,
                format!("{}: neither an algebra file nor a quotient file", path.display()),
            ))
        }
    };
    match cli.format {
        Format::Text => {
            println!("side: {side}");
            println!("triangle identity: {}", if triangle { "pass" } else { "FAIL" });
            println!("identity functor law: {}", if identity { "pass" } else { "FAIL" });
        }
        Format::Json => println!(
            "{}",
            json!({ "side": side, "triangle": triangle, "identity_law": identity })
        ),
    }
    Ok(if triangle && identity {
        EXIT_PASS
    } else {
        EXIT_PROPERTY_FAILURE
    })
}

fn cmd_complete(path: &Path) -> CliResult<i32> {
    let file = load_algebra(path)?;
    let w = compatible_completion(&file.algebra)
        .map_err(|e| abort(completion_code(&e), e.to_string()))?;
    // Comment lines keep the output parseable as the completion algebra.
    println!("# compatible completion; embedding of the input follows");
    for (a, &c) in w.hom.map().iter().enumerate() {
        println!("# embedding {a} -> {c}");
    }
    print!(
        "{}",
        emit_algebra(&AlgebraFile::from_concrete(w.sections.concrete))
    );
    Ok(EXIT_PASS)
}

fn cmd_represent(
    cli: &Cli,
    path: &Path,
    max_base: Option<usize>,
    max_nodes: u64,
) -> CliResult<i32> {
    let file = load_algebra(path)?;
    let budget = SearchBudget {
        max_base: max_base.unwrap_or(2 * file.algebra.size()),
        max_nodes,
        seed: cli.seed,
    };
    match brute_force_representation(&file.algebra, &budget) {
        RepresentationOutcome::Found(w) => {
            validate_representation(&file.algebra, &w)
                .map_err(|e| abort(EXIT_PROPERTY_FAILURE, format!("search returned an invalid witness: {e}")))?;
            match cli.format {
                Format::Text => {
                    println!("representation found: base {}", w.base_size);
                    for (i, f) in w.assignment.iter().enumerate() {
                        println!("element {i}: {f}");
                    }
                }
                Format::Json => {
                    let images: Vec<String> =
                        w.assignment.iter().map(|f| f.to_string()).collect();
                    println!(
                        "{}",
                        json!({ "found": true, "base": w.base_size, "assignment": images })
                    );
                }
            }
            Ok(EXIT_PASS)
        }
        RepresentationOutcome::ExhaustedSpace => {
            match cli.format {
                Format::Text => println!(
                    "no representation with base <= {}",
                    budget.max_base
                ),
                Format::Json => println!(
                    "{}",
                    json!({ "found": false, "reason": "exhausted", "max_base": budget.max_base })
                ),
            }
            Ok(EXIT_PROPERTY_FAILURE)
        }
        RepresentationOutcome::BudgetExceeded => Err(abort(
            EXIT_BUDGET,
            format!("search budget of {max_nodes} nodes exceeded"),
        )),
    }
}

fn cmd_embed_poset(cli: &Cli, path: &Path) -> CliResult<i32> {
    let poset = parse_poset(&read_input(path)?)
        .map_err(|e| abort(EXIT_INPUT_ERROR, format!("{}: {e}", path.display())))?;
    let embedding = embed(&poset);
    let verdict = verify_embedding(&poset, &embedding);
    match cli.format {
        Format::Text => {
            println!(
                "embedded {} points into partial functions on base {}",
                poset.size(),
                embedding.base_size
            );
            for (p, f) in embedding.images.iter().enumerate() {
                println!("point {p}: {f}");
            }
            if let Err(v) = &verdict {
                println!("verification FAIL: {v}");
            }
        }
        Format::Json => {
            let images: Vec<String> =
                embedding.images.iter().map(|f| f.to_string()).collect();
            println!(
                "{}",
                json!({
                    "base": embedding.base_size,
                    "images": images,
                    "verified": verdict.is_ok(),
                })
            );
        }
    }
    Ok(if verdict.is_ok() {
        EXIT_PASS
    } else {
        EXIT_PROPERTY_FAILURE
    })
}

fn suite_json(report: &SuiteReport) -> serde_json::Value {
    json!({
        "suite": report.suite,
        "passed": report.passed(),
        "checks": report.checks.iter().map(|c| json!({
            "name": c.name,
            "instances": c.instances,
            "failures": c.failures.iter().map(|f| json!({
                "instance": f.instance,
                "message": f.message,
                "artifact": f.artifact.as_ref().map(|p| p.display().to_string()),
            })).collect::<Vec<_>>(),
        })).collect::<Vec<_>>(),
    })
}

fn cmd_run_suite(
    cli: &Cli,
    suite: &str,
    iters: Option<usize>,
    artifacts: &Path,
) -> CliResult<i32> {
    let cfg = SuiteConfig {
        seed: cli.seed,
        iterations: iters,
        max_size: cli.max_size,
        jobs: cli.jobs.max(1),
        artifact_dir: Some(artifacts.to_path_buf()),
    };
    let reports = run_suite(suite, &cfg)
        .map_err(|e| abort(EXIT_INPUT_ERROR, e.to_string()))?;
    let all_passed = reports.iter().all(|r| r.passed());
    match cli.format {
        Format::Text => {
            for report in &reports {
                print!("{report}");
            }
        }
        Format::Json => {
            let list: Vec<serde_json::Value> = reports.iter().map(suite_json).collect();
            println!("{}", json!(list));
        }
    }
    Ok(if all_passed {
        EXIT_PASS
    } else {
        EXIT_PROPERTY_FAILURE
    })
}
