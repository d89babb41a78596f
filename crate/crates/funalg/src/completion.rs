//! Compatible completions. The unit embedding of the duality realizes, for
//! each valid algebra, a join-dense embedding into a compatibly complete
//! algebra; this module verifies that description, extends embeddings along
//! it, and proves it unique up to unique isomorphism on concrete instances.
//!
//! Several checks here lean on facts that hold in every algebra satisfying
//! the axioms (joins are atom-set unions; bounded pairwise-compatible sets
//! have joins; pairwise joins force joins of all pairwise-compatible sets).
//! Callers are expected to have checked the axioms first; the test suites
//! cross-check these shortcuts against exhaustive search on small cases.

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::algebra::{AbstractAlgebra, AtomMasks, Order, StructureError};
use crate::duality::{
    g_object, unit, unit_join_density_violation, CompleteHom, DualityError, HomError, UnitWitness,
};
use crate::setq::{QuotientError, SetQuotient};

/// Brute-force uniqueness counting is feasible up to this completion size.
pub const UNIQUENESS_BRUTE_CAP: usize = 8;
/// Sampled distributivity subsets are trimmed to this many elements.
pub const DISTRIBUTIVITY_SET_CAP: usize = 12;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum CompletionError {
    #[error("order: {0}")]
    Structure(#[from] StructureError),
    #[error("duality: {0}")]
    Duality(#[from] DualityError),
    #[error("hom: {0}")]
    Hom(#[from] HomError),
    #[error("quotient: {0}")]
    Quotient(#[from] QuotientError),
    #[error("the two embeddings start from different algebras")]
    SourceMismatch,
    #[error("embedding is not injective")]
    EmbeddingNotInjective,
    #[error("image is not join-dense: element {element} is not a join of image elements")]
    NotJoinDense { element: usize },
    #[error("not compatibly complete: {a} and {b} are compatible but have no join")]
    NotCompatiblyComplete { a: usize, b: usize },
    #[error("extension disagrees with the target embedding at {at}")]
    ExtensionDisagrees { at: usize },
    #[error("extensions are not mutually inverse")]
    NotMutuallyInverse,
    #[error("size {size} exceeds the brute-force cap {cap}")]
    SizeAboveCap { size: usize, cap: usize },
}

/// Order plus atom-mask bookkeeping for one algebra.
struct AtomView {
    ord: Order,
    masks: AtomMasks,
}

impl AtomView {
    fn new(a: &AbstractAlgebra) -> Result<Self, CompletionError> {
        let ord = a.order()?;
        let masks = AtomMasks::new(a, &ord)?;
        Ok(AtomView { ord, masks })
    }

    fn join_by_atoms(&self, elements: impl IntoIterator<Item = usize>) -> Option<usize> {
        self.masks.join_by_atoms(elements)
    }
}

/// A compatible pair with no join, if one exists. Sound for algebras
/// satisfying the axioms, where pairwise joins decide compatible
/// completeness.
pub fn compatible_pair_without_join(
    a: &AbstractAlgebra,
) -> Result<Option<(usize, usize)>, CompletionError> {
    let view = AtomView::new(a)?;
    for x in 0..a.size() {
        for y in x + 1..a.size() {
            if a.compatible(x, y) && view.join_by_atoms([x, y]).is_none() {
                return Ok(Some((x, y)));
            }
        }
    }
    Ok(None)
}

/// The compatible completion of `a`: the unit embedding into the section
/// algebra of its dual, checked to be an injective, join-dense complete
/// embedding into a compatibly complete algebra.
pub fn compatible_completion(a: &AbstractAlgebra) -> Result<UnitWitness, CompletionError> {
    let w = unit(a)?;
    if !w.hom.is_injective() {
        return Err(CompletionError::EmbeddingNotInjective);
    }
    if let Some((i, j)) = w.sections.concrete.compatible_pair_without_union() {
        return Err(CompletionError::NotCompatiblyComplete { a: i, b: j });
    }
    if let Some(g) = unit_join_density_violation(&w)? {
        return Err(CompletionError::NotJoinDense { element: g });
    }
    Ok(w)
}

/// The extension lemma. Given `into_c : A → C` injective with join-dense
/// image into a compatibly complete `C`, and `into_b : A → B` complete
/// into a compatibly complete `B`, there is exactly one complete hom
/// `θ : C → B` with `θ ∘ into_c = into_b`, namely
/// `θ(c) = ⋁{into_b(a) : into_c(a) ≤ c}`. Builds it, verifies the
/// hypotheses, and validates the result.
pub fn key_embedding(
    into_c: &CompleteHom,
    into_b: &CompleteHom,
) -> Result<CompleteHom, CompletionError> {
    if into_c.source() != into_b.source() {
        return Err(CompletionError::SourceMismatch);
    }
    if !into_c.is_injective() {
        return Err(CompletionError::EmbeddingNotInjective);
    }
    let c_alg = into_c.target();
    let b_alg = into_b.target();
    let view_c = AtomView::new(c_alg)?;
    let view_b = AtomView::new(b_alg)?;
    for (alg, view) in [(c_alg, &view_c), (b_alg, &view_b)] {
        for x in 0..alg.size() {
            for y in x + 1..alg.size() {
                if alg.compatible(x, y) && view.join_by_atoms([x, y]).is_none() {
                    return Err(CompletionError::NotCompatiblyComplete { a: x, b: y });
                }
            }
        }
    }
    let n_a = into_c.source().size();
    // join density of the image of into_c
    for c in 0..c_alg.size() {
        let below: Vec<usize> = (0..n_a)
            .map(|a| into_c.apply(a))
            .filter(|&img| view_c.ord.leq(img, c))
            .collect();
        if view_c.ord.join_of(&below) != Some(c) {
            return Err(CompletionError::NotJoinDense { element: c });
        }
    }
    let mut theta = Vec::with_capacity(c_alg.size());
    for c in 0..c_alg.size() {
        let images = (0..n_a)
            .filter(|&a| view_c.ord.leq(into_c.apply(a), c))
            .map(|a| into_b.apply(a));
        let join = view_b
            .join_by_atoms(images)
            .expect("images of a bounded set stay bounded, hence join");
        theta.push(join);
    }
    let theta = CompleteHom::validate(c_alg, b_alg, theta)?;
    for a in 0..n_a {
        if theta.apply(into_c.apply(a)) != into_b.apply(a) {
            return Err(CompletionError::ExtensionDisagrees { at: a });
        }
    }
    Ok(theta)
}

/// Any two join-dense complete embeddings of `A` into compatibly complete
/// algebras are linked by an isomorphism commuting with the embeddings.
pub fn completion_isomorphism(
    into_c1: &CompleteHom,
    into_c2: &CompleteHom,
) -> Result<CompleteHom, CompletionError> {
    let theta = key_embedding(into_c1, into_c2)?;
    let theta_inv = key_embedding(into_c2, into_c1)?;
    let back = CompleteHom::compose(&theta_inv, &theta)?;
    let forth = CompleteHom::compose(&theta, &theta_inv)?;
    if back != CompleteHom::identity(into_c1.target())
        || forth != CompleteHom::identity(into_c2.target())
    {
        return Err(CompletionError::NotMutuallyInverse);
    }
    Ok(theta)
}

/// Counts every complete hom `θ : C1 → C2` with `θ ∘ into_c1 = into_c2` by
/// brute force; uniqueness means this returns 1. Feasible only for small
/// completions.
pub fn count_extension_homs(
    into_c1: &CompleteHom,
    into_c2: &CompleteHom,
    cap: usize,
) -> Result<usize, CompletionError> {
    if into_c1.source() != into_c2.source() {
        return Err(CompletionError::SourceMismatch);
    }
    let c1 = into_c1.target();
    let c2 = into_c2.target();
    let n = c1.size();
    if n > cap {
        return Err(CompletionError::SizeAboveCap { size: n, cap });
    }
    let mut forced: Vec<Option<usize>> = vec![None; n];
    for a in 0..into_c1.source().size() {
        let pos = into_c1.apply(a);
        let val = into_c2.apply(a);
        if forced[pos].is_some_and(|v| v != val) {
            return Ok(0);
        }
        forced[pos] = Some(val);
    }
    // positions are assigned in order, so slots up to `pos` are all Some
    fn locally_consistent(
        c1: &AbstractAlgebra,
        c2: &AbstractAlgebra,
        assign: &[Option<usize>],
        pos: usize,
    ) -> bool {
        let v = assign[pos].unwrap();
        for j in 0..=pos {
            let w = assign[j].unwrap();
            for (x, y, fx, fy) in [(pos, j, v, w), (j, pos, w, v)] {
                let m = c1.minus(x, y);
                if m <= pos && assign[m].unwrap() != c2.minus(fx, fy) {
                    return false;
                }
                let r = c1.restrict(x, y);
                if r <= pos && assign[r].unwrap() != c2.restrict(fx, fy) {
                    return false;
                }
            }
        }
        true
    }
    fn walk(
        c1: &AbstractAlgebra,
        c2: &AbstractAlgebra,
        forced: &[Option<usize>],
        assign: &mut Vec<Option<usize>>,
        pos: usize,
    ) -> usize {
        if pos == c1.size() {
            let map: Vec<usize> = assign.iter().map(|v| v.unwrap()).collect();
            let exhaustive = c1.size();
            return CompleteHom::validate_with_budget(c1, c2, map, exhaustive, 0, 0).is_ok()
                as usize;
        }
        let candidates: Vec<usize> = match forced[pos] {
            Some(v) => vec![v],
            None => (0..c2.size()).collect(),
        };
        let mut total = 0;
        for v in candidates {
            assign[pos] = Some(v);
            if locally_consistent(c1, c2, assign, pos) {
                total += walk(c1, c2, forced, assign, pos + 1);
            }
        }
        assign[pos] = None;
        total
    }
    let mut assign = vec![None; n];
    Ok(walk(c1, c2, &forced, &mut assign, 0))
}

/// The completion is idempotent: completing a completion is a bijection.
pub fn completion_is_idempotent(w: &UnitWitness) -> Result<bool, CompletionError> {
    let again = unit(&w.sections.algebra())?;
    Ok(again.hom.is_bijective())
}

/// Adjoins one fresh singleton class to a quotient and returns the induced
/// embedding of section algebras — a complete, injective, non-dense
/// enlargement.
pub fn adjoin_identity_atom(
    pi: &SetQuotient,
) -> Result<(SetQuotient, CompleteHom), CompletionError> {
    let mut projection = pi.projection().to_vec();
    projection.push(pi.classes());
    let pi2 = SetQuotient::new(projection)?;
    let sa = g_object(pi)?;
    let sa2 = g_object(&pi2)?;
    let mut map = Vec::with_capacity(sa.concrete.len());
    for f in sa.concrete.elements() {
        let pairs: Vec<(usize, usize)> = f
            .pairs()
            .map(|(c, p)| (c, p + 1)) // one extra class shifts carrier points
            .collect();
        let g = crate::pfun::PartialFunction::new(sa2.concrete.base_size(), pairs)
            .expect("reindexed sections stay functional");
        map.push(
            sa2.concrete
                .index_of(&g)
                .expect("reindexed sections are sections of the enlargement"),
        );
    }
    let hom = CompleteHom::validate(&sa.algebra(), &sa2.algebra(), map)?;
    Ok((pi2, hom))
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DistributivityViolation {
    pub law: &'static str,
    pub s: Vec<usize>,
    pub t: Vec<usize>,
    pub expected: Option<usize>,
    pub got: Option<usize>,
}

/// Samples pairwise-compatible subsets (as subsets of principal downsets,
/// which always have joins in a valid algebra) and checks that restriction
/// distributes over joins in both arguments and that difference turns
/// right-hand joins into meets.
pub fn distributivity_violation(
    alg: &AbstractAlgebra,
    samples: usize,
    seed: u64,
) -> Result<Option<DistributivityViolation>, CompletionError> {
    let ord = alg.order()?;
    let n = alg.size();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let pick_bounded = |rng: &mut ChaCha8Rng| -> Vec<usize> {
        let u = rng.gen_range(0..n);
        let below: Vec<usize> = ord.below_mask(u).iter_ones().collect();
        let mut set: Vec<usize> = below
            .iter()
            .copied()
            .filter(|_| rng.gen_bool(0.5))
            .collect();
        if set.is_empty() {
            set.push(u);
        }
        set.truncate(DISTRIBUTIVITY_SET_CAP);
        set
    };
    for _ in 0..samples {
        let s = pick_bounded(&mut rng);
        let t = pick_bounded(&mut rng);
        let js = ord.join_of(&s).expect("bounded sets have joins");
        let jt = ord.join_of(&t).expect("bounded sets have joins");
        // ⋁S ▷ ⋁T = ⋁{s ▷ t}
        let pointwise: Vec<usize> = s
            .iter()
            .flat_map(|&x| t.iter().map(move |&y| alg.restrict(x, y)))
            .collect();
        let got = ord.join_of(&pointwise);
        if got != Some(alg.restrict(js, jt)) {
            return Ok(Some(DistributivityViolation {
                law: "restrict-distributes-over-joins",
                s,
                t,
                expected: Some(alg.restrict(js, jt)),
                got,
            }));
        }
        // ⋁S − w = ⋁{s − w}
        let w = rng.gen_range(0..n);
        let diffs: Vec<usize> = s.iter().map(|&x| alg.minus(x, w)).collect();
        let got = ord.join_of(&diffs);
        if got != Some(alg.minus(js, w)) {
            return Ok(Some(DistributivityViolation {
                law: "difference-distributes-on-the-left",
                s,
                t: vec![w],
                expected: Some(alg.minus(js, w)),
                got,
            }));
        }
        // w − ⋁S = ⋀{w − s}
        let diffs: Vec<usize> = s.iter().map(|&x| alg.minus(w, x)).collect();
        let got = ord.meet_of(&diffs);
        if got != Some(alg.minus(w, js)) {
            return Ok(Some(DistributivityViolation {
                law: "difference-turns-right-joins-into-meets",
                s,
                t: vec![w],
                expected: Some(alg.minus(w, js)),
                got,
            }));
        }
    }
    Ok(None)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::concrete::tests::disjoint_singletons;

    fn q(projection: &[usize]) -> SetQuotient {
        SetQuotient::new(projection.to_vec()).unwrap()
    }

    #[test]
    fn completing_the_disjoint_singletons_adds_their_union() {
        let a = disjoint_singletons().to_abstract();
        let w = compatible_completion(&a).unwrap();
        assert_eq!(w.sections.concrete.len(), 4);
        assert!(w.hom.is_injective());
        assert!(!w.hom.is_bijective());
        assert!(completion_is_idempotent(&w).unwrap());
        // the pairwise witness agrees with the exhaustive one on the original
        assert_eq!(compatible_pair_without_join(&a).unwrap(), Some((1, 2)));
        let completed = w.sections.algebra();
        assert_eq!(compatible_pair_without_join(&completed).unwrap(), None);
    }

    #[test]
    fn key_embedding_extends_into_an_enlargement() {
        let a = disjoint_singletons().to_abstract();
        let w = compatible_completion(&a).unwrap();
        let (_pi2, adjoin) = adjoin_identity_atom(&w.dual.quotient).unwrap();
        let into_b = CompleteHom::compose(&adjoin, &w.hom).unwrap();
        let theta = key_embedding(&w.hom, &into_b).unwrap();
        assert_eq!(theta, adjoin);
        assert!(theta.is_injective());
    }

    #[test]
    fn reverse_extension_embeds_dense_supersets_into_the_completion() {
        // a join-dense compatibly complete extension maps back into the
        // canonical completion
        let a = disjoint_singletons().to_abstract();
        let w = compatible_completion(&a).unwrap();
        let theta = key_embedding(&w.hom, &w.hom).unwrap();
        assert_eq!(theta, CompleteHom::identity(&w.sections.algebra()));
    }

    #[test]
    fn completions_are_unique_up_to_unique_isomorphism() {
        let a = disjoint_singletons().to_abstract();
        let w = compatible_completion(&a).unwrap();
        let c = w.sections.algebra();
        // permute the completion's elements to fake a second completion
        let sigma = [2, 0, 3, 1];
        let mut minus = vec![0; 16];
        let mut restrict = vec![0; 16];
        for x in 0..4 {
            for y in 0..4 {
                minus[sigma[x] * 4 + sigma[y]] = sigma[c.minus(x, y)];
                restrict[sigma[x] * 4 + sigma[y]] = sigma[c.restrict(x, y)];
            }
        }
        let c2 = AbstractAlgebra::from_tables(4, minus, restrict).unwrap();
        let map2: Vec<usize> = w.hom.map().iter().map(|&v| sigma[v]).collect();
        let into_c2 = CompleteHom::validate(&a, &c2, map2).unwrap();
        let theta = completion_isomorphism(&w.hom, &into_c2).unwrap();
        assert_eq!(theta.map(), &sigma[..]);
        assert_eq!(count_extension_homs(&w.hom, &into_c2, 8).unwrap(), 1);
        assert_eq!(
            count_extension_homs(&w.hom, &w.hom, 8).unwrap(),
            1,
            "the identity is the only self-extension"
        );
    }

    #[test]
    fn brute_force_cap_is_reported() {
        let big = g_object(&q(&[0, 1, 2, 3])).unwrap().algebra();
        let id = CompleteHom::identity(&big);
        let err = count_extension_homs(&id, &id, 8).unwrap_err();
        assert_eq!(err, CompletionError::SizeAboveCap { size: 16, cap: 8 });
    }

    #[test]
    fn distributivity_holds_in_section_algebras() {
        for proj in [vec![0, 0, 1], vec![0, 1, 1, 2], vec![0, 0, 0]] {
            let alg = g_object(&q(&proj)).unwrap().algebra();
            assert_eq!(distributivity_violation(&alg, 50, 7).unwrap(), None);
        }
    }

    #[test]
    fn distributivity_holds_in_incomplete_valid_algebras_too() {
        // bounded sampling keeps every sampled join existent even here
        let a = disjoint_singletons().to_abstract();
        assert_eq!(distributivity_violation(&a, 50, 11).unwrap(), None);
    }

    #[test]
    fn enlargement_is_complete_but_not_dense() {
        let pi = q(&[0, 0, 1]);
        let (pi2, hom) = adjoin_identity_atom(&pi).unwrap();
        assert_eq!(pi2.classes(), 3);
        assert!(hom.is_injective());
        // the new singleton-class atom is not under the image
        let err = key_embedding(&hom, &hom).unwrap_err();
        assert!(matches!(err, CompletionError::NotJoinDense { .. }));
    }
}
