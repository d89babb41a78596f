//! Independent brute-force engines: representation search over assignments
//! of partial functions, a self-contained section enumerator, and algebra
//! isomorphism search. These are the ground truth the constructive modules
//! are tested against, so they share no code paths with them.

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::algebra::{AbstractAlgebra, AxiomCheck};
use crate::duality::UnitWitness;
use crate::pfun::{PartialFunction, PfError};
use crate::setq::SetQuotient;

/// Isomorphism search refuses algebras above this size.
pub const ISO_SIZE_CAP: usize = 64;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum OracleError {
    #[error("{count} sections exceed the cap of {cap}")]
    SectionSpaceTooLarge { count: u128, cap: usize },
    #[error("algebra size {size} exceeds the isomorphism-search cap of {cap}")]
    IsoSizeCap { size: usize, cap: usize },
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum WitnessError {
    #[error("assignment has {got} functions, expected {want}")]
    LengthMismatch { got: usize, want: usize },
    #[error("the function for element {element} lives on base {got}, expected {want}")]
    WitnessBase { element: usize, got: usize, want: usize },
    #[error("elements {i} and {j} map to the same function")]
    NotInjectiveWitness { i: usize, j: usize },
    #[error("difference table broken at ({i}, {j})")]
    MinusMismatch { i: usize, j: usize },
    #[error("restriction table broken at ({i}, {j})")]
    RestrictMismatch { i: usize, j: usize },
    #[error("concrete operation failed: {0}")]
    Pf(#[from] PfError),
}

/// A concrete realization of a table algebra: one partial function per
/// element, matching both tables exactly.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RepresentationWitness {
    pub base_size: usize,
    pub assignment: Vec<PartialFunction>,
}

/// Limits for the representation search. `max_nodes` counts candidate
/// placements; a base whose whole function space already exceeds the
/// remaining budget is not attempted. A nonzero `seed` shuffles candidate
/// order (the search stays exhaustive, and deterministic given the seed).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SearchBudget {
    pub max_base: usize,
    pub max_nodes: u64,
    pub seed: u64,
}

impl SearchBudget {
    /// Default budget for an algebra: bases up to twice the element count.
    /// That bound is a pragmatic choice, not a theorem; "exhausted" means
    /// exhausted within it.
    pub fn for_algebra(a: &AbstractAlgebra) -> Self {
        SearchBudget {
            max_base: 2 * a.size(),
            max_nodes: 1_000_000,
            seed: 0,
        }
    }
}

/// How a representation search ended. `ExhaustedSpace` is a proof that no
/// representation exists on any base within `max_base`; `BudgetExceeded`
/// only says the search gave up.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum RepresentationOutcome {
    Found(RepresentationWitness),
    ExhaustedSpace,
    BudgetExceeded,
}

/// Checks a witness against the algebra, independently of how it was
/// produced: injectivity plus both operation tables, entry by entry.
pub fn validate_representation(
    a: &AbstractAlgebra,
    w: &RepresentationWitness,
) -> Result<(), WitnessError> {
    let n = a.size();
    if w.assignment.len() != n {
        return Err(WitnessError::LengthMismatch {
            got: w.assignment.len(),
            want: n,
        });
    }
    for (element, f) in w.assignment.iter().enumerate() {
        if f.base_size() != w.base_size {
            return Err(WitnessError::WitnessBase {
                element,
                got: f.base_size(),
                want: w.base_size,
            });
        }
    }
    for i in 0..n {
        for j in i + 1..n {
            if w.assignment[i] == w.assignment[j] {
                return Err(WitnessError::NotInjectiveWitness { i, j });
            }
        }
    }
    for i in 0..n {
        for j in 0..n {
            let diff = w.assignment[i].relative_complement(&w.assignment[j])?;
            if diff != w.assignment[a.minus(i, j)] {
                return Err(WitnessError::MinusMismatch { i, j });
            }
            let rest = w.assignment[i].domain_restriction(&w.assignment[j])?;
            if rest != w.assignment[a.restrict(i, j)] {
                return Err(WitnessError::RestrictMismatch { i, j });
            }
        }
    }
    Ok(())
}

/// Fast path for algebras that pass the axioms and are atomistic: send each
/// atom to a singleton pair whose domain point names its domain-equivalence
/// class and whose value separates atoms within the class, then send every
/// element to the union over the atoms below it. Falls back to `None`
/// whenever any step fails, leaving the raw search to decide.
fn atomistic_witness(a: &AbstractAlgebra) -> Option<RepresentationWitness> {
    if !matches!(a.check_axioms(), AxiomCheck::Pass) {
        return None;
    }
    let ord = a.order().ok()?;
    if !ord.is_atomic() || !ord.is_atomistic() {
        return None;
    }
    let atoms = ord.atoms();
    // group atoms by mutual domain order
    let mut classes: Vec<Vec<usize>> = Vec::new();
    for &atom in &atoms {
        match classes
            .iter_mut()
            .find(|c| a.domain_leq(atom, c[0]) && a.domain_leq(c[0], atom))
        {
            Some(class) => class.push(atom),
            None => classes.push(vec![atom]),
        }
    }
    let max_class = classes.iter().map(|c| c.len()).max().unwrap_or(0);
    let base = classes.len().max(max_class);
    let mut pair = vec![(0usize, 0usize); a.size()];
    for (d, class) in classes.iter().enumerate() {
        for (v, &atom) in class.iter().enumerate() {
            pair[atom] = (d, v);
        }
    }
    let mut assignment = Vec::with_capacity(a.size());
    for e in 0..a.size() {
        let pairs = atoms.iter().filter(|&&x| ord.leq(x, e)).map(|&x| pair[x]);
        assignment.push(PartialFunction::new(base, pairs).ok()?);
    }
    let w = RepresentationWitness {
        base_size: base,
        assignment,
    };
    validate_representation(a, &w).ok()?;
    Some(w)
}

enum Step {
    Done(Vec<PartialFunction>),
    Exhausted,
    Budget,
}

struct RawSearch<'a> {
    a: &'a AbstractAlgebra,
    candidates: Vec<PartialFunction>,
    /// Element forced to the empty function, when every `x − x` agrees.
    zero: Option<usize>,
    nodes_left: u64,
}

impl RawSearch<'_> {
    fn consistent(&self, assignment: &[Option<PartialFunction>], pos: usize) -> bool {
        for q in 0..=pos {
            for (i, j) in [(pos, q), (q, pos)] {
                let f = assignment[i].as_ref().unwrap();
                let g = assignment[j].as_ref().unwrap();
                let m = self.a.minus(i, j);
                if let Some(expected) = assignment.get(m).and_then(|o| o.as_ref()) {
                    let diff = f
                        .relative_complement(g)
                        .expect("candidates share one base");
                    if diff != *expected {
                        return false;
                    }
                }
                let r = self.a.restrict(i, j);
                if let Some(expected) = assignment.get(r).and_then(|o| o.as_ref()) {
                    let rest = f
                        .domain_restriction(g)
                        .expect("candidates share one base");
                    if rest != *expected {
                        return false;
                    }
                }
            }
        }
        true
    }

    fn assign(&mut self, assignment: &mut Vec<Option<PartialFunction>>, pos: usize) -> Step {
        if pos == assignment.len() {
            return Step::Done(
                assignment
                    .iter()
                    .map(|o| o.clone().unwrap())
                    .collect(),
            );
        }
        for c in 0..self.candidates.len() {
            if self.nodes_left == 0 {
                return Step::Budget;
            }
            self.nodes_left -= 1;
            let f = &self.candidates[c];
            if self.zero == Some(pos) && f.pairs().next().is_some() {
                continue;
            }
            if assignment[..pos].iter().any(|o| o.as_ref() == Some(f)) {
                continue;
            }
            assignment[pos] = Some(f.clone());
            if self.consistent(assignment, pos) {
                match self.assign(assignment, pos + 1) {
                    Step::Exhausted => {}
                    done_or_budget => return done_or_budget,
                }
            }
            assignment[pos] = None;
        }
        Step::Exhausted
    }
}

/// Exhaustive backtracking over all assignments of partial functions on
/// bases `0..=max_base`, smallest base first. No structure is assumed of
/// the tables.
pub(crate) fn raw_representation_search(
    a: &AbstractAlgebra,
    budget: &SearchBudget,
) -> RepresentationOutcome {
    let n = a.size();
    let z = a.minus(0, 0);
    let zero = (0..n).all(|x| a.minus(x, x) == z).then_some(z);
    let mut nodes_left = budget.max_nodes;
    for base in 0..=budget.max_base {
        let Some(space) = (base as u128 + 1).checked_pow(base as u32) else {
            return RepresentationOutcome::BudgetExceeded;
        };
        if space > nodes_left as u128 {
            return RepresentationOutcome::BudgetExceeded;
        }
        let mut candidates = PartialFunction::enumerate_all(base);
        if budget.seed != 0 {
            let mut rng = ChaCha8Rng::seed_from_u64(budget.seed.wrapping_add(base as u64));
            candidates.shuffle(&mut rng);
        }
        let mut search = RawSearch {
            a,
            candidates,
            zero,
            nodes_left,
        };
        let mut assignment = vec![None; n];
        match search.assign(&mut assignment, 0) {
            Step::Done(functions) => {
                let w = RepresentationWitness {
                    base_size: base,
                    assignment: functions,
                };
                debug_assert!(validate_representation(a, &w).is_ok());
                return RepresentationOutcome::Found(w);
            }
            Step::Budget => return RepresentationOutcome::BudgetExceeded,
            Step::Exhausted => nodes_left = search.nodes_left,
        }
    }
    RepresentationOutcome::ExhaustedSpace
}

/// Searches for a representation: the atomistic fast path first, raw
/// backtracking otherwise. Works on any pair of tables; only full
/// exhaustion of every base within the budget earns `ExhaustedSpace`.
pub fn brute_force_representation(
    a: &AbstractAlgebra,
    budget: &SearchBudget,
) -> RepresentationOutcome {
    if let Some(w) = atomistic_witness(a) {
        if w.base_size <= budget.max_base {
            return RepresentationOutcome::Found(w);
        }
    }
    raw_representation_search(a, budget)
}

/// Reads a unit embedding as a representation witness: each element is
/// realized by the section its image selects.
pub fn unit_representation(w: &UnitWitness) -> RepresentationWitness {
    RepresentationWitness {
        base_size: w.sections.concrete.base_size(),
        assignment: w
            .hom
            .map()
            .iter()
            .map(|&s| w.sections.concrete.elements()[s].clone())
            .collect(),
    }
}

/// All partial sections of a quotient over the merged base (classes first,
/// then carrier points), in ascending order. Built by direct recursion on
/// classes — deliberately not sharing code with the functor that computes
/// the same set.
pub fn enumerate_partial_sections(
    pi: &SetQuotient,
    cap: usize,
) -> Result<Vec<PartialFunction>, OracleError> {
    let count = pi
        .fiber_sizes()
        .iter()
        .try_fold(1u128, |acc, &s| acc.checked_mul(s as u128 + 1))
        .unwrap_or(u128::MAX);
    if count > cap as u128 {
        return Err(OracleError::SectionSpaceTooLarge { count, cap });
    }
    let base = pi.classes() + pi.carrier();
    let mut out = Vec::with_capacity(count as usize);
    let mut pairs: Vec<(usize, usize)> = Vec::new();
    fn extend(
        pi: &SetQuotient,
        base: usize,
        class: usize,
        pairs: &mut Vec<(usize, usize)>,
        out: &mut Vec<PartialFunction>,
    ) {
        if class == pi.classes() {
            out.push(
                PartialFunction::new(base, pairs.iter().copied())
                    .expect("distinct classes give distinct domain points"),
            );
            return;
        }
        extend(pi, base, class + 1, pairs, out);
        for &x in pi.fiber(class) {
            pairs.push((class, pi.classes() + x));
            extend(pi, base, class + 1, pairs, out);
            pairs.pop();
        }
    }
    extend(pi, base, 0, &mut pairs, &mut out);
    out.sort();
    Ok(out)
}

fn iso_invariants(a: &AbstractAlgebra) -> Vec<[usize; 8]> {
    let n = a.size();
    let ord = a.order().ok();
    (0..n)
        .map(|x| {
            let mut inv = [0usize; 8];
            inv[0] = usize::from(a.minus(x, x) == x);
            inv[1] = usize::from(a.restrict(x, x) == x);
            for y in 0..n {
                inv[2] += usize::from(a.minus(x, y) == x);
                inv[3] += usize::from(a.minus(y, x) == y);
                inv[4] += usize::from(a.restrict(x, y) == y);
                inv[5] += usize::from(a.restrict(y, x) == x);
                inv[6] += usize::from(a.restrict(x, y) == x);
            }
            if let Some(ord) = &ord {
                inv[7] = ord.below_mask(x).iter_ones().count();
            }
            inv
        })
        .collect()
}

fn iso_assign(
    a: &AbstractAlgebra,
    b: &AbstractAlgebra,
    inv_a: &[[usize; 8]],
    inv_b: &[[usize; 8]],
    map: &mut Vec<Option<usize>>,
    used: &mut Vec<bool>,
    pos: usize,
) -> bool {
    let n = a.size();
    if pos == n {
        return true;
    }
    'candidate: for t in 0..n {
        if used[t] || inv_a[pos] != inv_b[t] {
            continue;
        }
        map[pos] = Some(t);
        used[t] = true;
        for q in 0..=pos {
            for (i, j) in [(pos, q), (q, pos)] {
                let (bi, bj) = (map[i].unwrap(), map[j].unwrap());
                for (ra, rb) in [
                    (a.minus(i, j), b.minus(bi, bj)),
                    (a.restrict(i, j), b.restrict(bi, bj)),
                ] {
                    match map[ra] {
                        Some(mapped) if mapped != rb => {
                            map[pos] = None;
                            used[t] = false;
                            continue 'candidate;
                        }
                        // the b-side result is already claimed by a
                        // different source element
                        None if used[rb] => {
                            map[pos] = None;
                            used[t] = false;
                            continue 'candidate;
                        }
                        _ => {}
                    }
                }
            }
        }
        if iso_assign(a, b, inv_a, inv_b, map, used, pos + 1) {
            return true;
        }
        map[pos] = None;
        used[t] = false;
    }
    false
}

/// Searches for a table isomorphism by backtracking, pruning on cheap
/// per-element invariants. Returns the element map when one exists.
pub fn algebra_isomorphic(
    a: &AbstractAlgebra,
    b: &AbstractAlgebra,
) -> Result<Option<Vec<usize>>, OracleError> {
    let size = a.size().max(b.size());
    if size > ISO_SIZE_CAP {
        return Err(OracleError::IsoSizeCap {
            size,
            cap: ISO_SIZE_CAP,
        });
    }
    if a.size() != b.size() {
        return Ok(None);
    }
    let inv_a = iso_invariants(a);
    let inv_b = iso_invariants(b);
    let mut sorted_a = inv_a.clone();
    let mut sorted_b = inv_b.clone();
    sorted_a.sort();
    sorted_b.sort();
    if sorted_a != sorted_b {
        return Ok(None);
    }
    let n = a.size();
    let mut map = vec![None; n];
    let mut used = vec![false; n];
    if iso_assign(a, b, &inv_a, &inv_b, &mut map, &mut used, 0) {
        let found: Vec<usize> = map.into_iter().map(|o| o.unwrap()).collect();
        debug_assert!((0..n).all(|i| {
            (0..n).all(|j| {
                found[a.minus(i, j)] == b.minus(found[i], found[j])
                    && found[a.restrict(i, j)] == b.restrict(found[i], found[j])
            })
        }));
        Ok(Some(found))
    } else {
        Ok(None)
    }
}
