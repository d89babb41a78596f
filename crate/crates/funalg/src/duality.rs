//! The duality between finite algebras and set quotients: atoms under
//! domain equivalence form a quotient, partial sections of a quotient form
//! a concrete algebra, and the two constructions are contravariant
//! functors linked by a unit and counit.

use std::collections::BTreeMap;

use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::algebra::{AbstractAlgebra, Order, StructureError};
use crate::concrete::{ConcreteAlgebra, ConcreteError};
use crate::pfun::{PartialFunction, PfError};
use crate::setq::{
    compose_morphisms, validate_morphism, MorphismError, QuotientError, QuotientMorphism,
    SetQuotient,
};
use crate::util::BitSet;

/// Join preservation is checked over every subset up to this source size.
pub const HOM_EXHAUSTIVE_CAP: usize = 16;
/// Beyond the exhaustive cap, this many random subsets are checked.
pub const HOM_SAMPLE_COUNT: usize = 2048;
/// Default bound on how many sections a quotient may generate.
pub const DEFAULT_SECTION_CAP: usize = 4096;

const HOM_CHECK_SEED: u64 = 0x5eed_0001;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum HomError {
    #[error("map has {got} entries but the source has {want} elements")]
    MapLengthMismatch { got: usize, want: usize },
    #[error("map sends {arg} to {value}, outside the target")]
    MapOutOfRange { arg: usize, value: usize },
    #[error("difference not preserved at ({a},{b})")]
    MinusNotPreserved { a: usize, b: usize },
    #[error("restriction not preserved at ({a},{b})")]
    RestrictNotPreserved { a: usize, b: usize },
    #[error("the image of {subset:?} has no join in the target")]
    TargetJoinMissing { subset: Vec<usize> },
    #[error("join of {subset:?} maps to {mapped_join}, but the image joins to {image_join}")]
    JoinNotPreserved {
        subset: Vec<usize>,
        mapped_join: usize,
        image_join: usize,
    },
    #[error("source order: {0}")]
    SourceOrder(StructureError),
    #[error("target order: {0}")]
    TargetOrder(StructureError),
    #[error("endpoint mismatch: the first hom ends at a different algebra than the second starts")]
    EndpointMismatch,
}

/// A validated complete homomorphism: preserves difference, restriction,
/// and every join that exists in the source.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CompleteHom {
    source: AbstractAlgebra,
    target: AbstractAlgebra,
    map: Vec<usize>,
}

impl CompleteHom {
    pub fn validate(
        source: &AbstractAlgebra,
        target: &AbstractAlgebra,
        map: Vec<usize>,
    ) -> Result<Self, HomError> {
        Self::validate_with_budget(
            source,
            target,
            map,
            HOM_EXHAUSTIVE_CAP,
            HOM_SAMPLE_COUNT,
            HOM_CHECK_SEED,
        )
    }

    pub fn validate_with_budget(
        source: &AbstractAlgebra,
        target: &AbstractAlgebra,
        map: Vec<usize>,
        exhaustive_cap: usize,
        samples: usize,
        seed: u64,
    ) -> Result<Self, HomError> {
        let n = source.size();
        if map.len() != n {
            return Err(HomError::MapLengthMismatch {
                got: map.len(),
                want: n,
            });
        }
        if let Some(arg) = map.iter().position(|&v| v >= target.size()) {
            return Err(HomError::MapOutOfRange {
                arg,
                value: map[arg],
            });
        }
        for a in 0..n {
            for b in 0..n {
                if map[source.minus(a, b)] != target.minus(map[a], map[b]) {
                    return Err(HomError::MinusNotPreserved { a, b });
                }
                if map[source.restrict(a, b)] != target.restrict(map[a], map[b]) {
                    return Err(HomError::RestrictNotPreserved { a, b });
                }
            }
        }
        let src_ord = source.order().map_err(HomError::SourceOrder)?;
        let tgt_ord = target.order().map_err(HomError::TargetOrder)?;
        let check = |mask: &BitSet| -> Result<(), HomError> {
            let Some(j) = src_ord.join_of_mask(mask) else {
                return Ok(());
            };
            let mut img = BitSet::new(target.size());
            for s in mask.iter_ones() {
                img.insert(map[s]);
            }
            match tgt_ord.join_of_mask(&img) {
                None => Err(HomError::TargetJoinMissing {
                    subset: mask.iter_ones().collect(),
                }),
                Some(tj) if tj == map[j] => Ok(()),
                Some(tj) => Err(HomError::JoinNotPreserved {
                    subset: mask.iter_ones().collect(),
                    mapped_join: map[j],
                    image_join: tj,
                }),
            }
        };
        if n <= exhaustive_cap {
            let mut mask = BitSet::new(n);
            for m in 0u64..(1u64 << n) {
                for i in 0..n {
                    if m >> i & 1 == 1 {
                        mask.insert(i);
                    } else {
                        mask.remove(i);
                    }
                }
                check(&mask)?;
            }
        } else {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            // every atom-downset, since elements should be joins of atoms
            let atom_masks: Vec<BitSet> = (0..n)
                .map(|u| {
                    let mut mask = BitSet::new(n);
                    for a in src_ord.atoms() {
                        if src_ord.leq(a, u) {
                            mask.insert(a);
                        }
                    }
                    mask
                })
                .collect();
            for mask in &atom_masks {
                check(mask)?;
            }
            // pairs: all of them when feasible, a sample otherwise
            let mut pair_mask = BitSet::new(n);
            if n <= 64 {
                for a in 0..n {
                    for b in a + 1..n {
                        pair_mask.insert(a);
                        pair_mask.insert(b);
                        check(&pair_mask)?;
                        pair_mask.remove(a);
                        pair_mask.remove(b);
                    }
                }
            } else {
                for _ in 0..samples {
                    let a = rng.gen_range(0..n);
                    let b = rng.gen_range(0..n);
                    pair_mask.insert(a);
                    pair_mask.insert(b);
                    check(&pair_mask)?;
                    pair_mask.remove(a);
                    pair_mask.remove(b);
                }
            }
            // random subsets, alternating arbitrary and bounded
            for round in 0..samples {
                let mut mask = BitSet::new(n);
                if round % 2 == 0 {
                    for i in 0..n {
                        if rng.gen_bool(0.5) {
                            mask.insert(i);
                        }
                    }
                } else {
                    let u = rng.gen_range(0..n);
                    for i in src_ord.below_mask(u).iter_ones() {
                        if rng.gen_bool(0.5) {
                            mask.insert(i);
                        }
                    }
                }
                check(&mask)?;
            }
        }
        Ok(CompleteHom {
            source: source.clone(),
            target: target.clone(),
            map,
        })
    }

    pub fn source(&self) -> &AbstractAlgebra {
        &self.source
    }

    pub fn target(&self) -> &AbstractAlgebra {
        &self.target
    }

    pub fn map(&self) -> &[usize] {
        &self.map
    }

    pub fn apply(&self, a: usize) -> usize {
        self.map[a]
    }

    pub fn identity(a: &AbstractAlgebra) -> Self {
        CompleteHom {
            source: a.clone(),
            target: a.clone(),
            map: (0..a.size()).collect(),
        }
    }

    /// Composite `after ∘ first`. Valid homs compose to valid homs, so no
    /// re-validation happens here.
    pub fn compose(after: &CompleteHom, first: &CompleteHom) -> Result<CompleteHom, HomError> {
        if first.target != after.source {
            return Err(HomError::EndpointMismatch);
        }
        Ok(CompleteHom {
            source: first.source.clone(),
            target: after.target.clone(),
            map: first.map.iter().map(|&b| after.map[b]).collect(),
        })
    }

    pub fn is_injective(&self) -> bool {
        let mut seen = BitSet::new(self.target.size());
        for &v in &self.map {
            if seen.contains(v) {
                return false;
            }
            seen.insert(v);
        }
        true
    }

    pub fn is_bijective(&self) -> bool {
        self.source.size() == self.target.size() && self.is_injective()
    }
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum DualityError {
    #[error("order: {0}")]
    Structure(#[from] StructureError),
    #[error("{count} sections exceed the cap of {cap}")]
    SectionSpaceTooLarge { count: usize, cap: usize },
    #[error("section algebra: {0}")]
    Sections(#[from] ConcreteError),
    #[error("atom quotient: {0}")]
    Quotient(#[from] QuotientError),
    #[error("dual map ill-defined at atom {y}: witnesses {x1} and {x2} disagree")]
    DualMapIllDefined { y: usize, x1: usize, x2: usize },
    #[error("dual map sends atom {y} to {x}, which is not an atom")]
    DualMapNotAtom { y: usize, x: usize },
    #[error("dual map sends atom {y} to {x}, whose image does not bound {y}")]
    DualMapNotBelow { y: usize, x: usize },
    #[error("dual morphism: {0}")]
    Morphism(#[from] MorphismError),
    #[error("dual hom: {0}")]
    Hom(#[from] HomError),
    #[error("unit image of element {element} is not a section: {source}")]
    UnitImageNotSection { element: usize, source: PfError },
    #[error("counit is not a bijection on carriers")]
    CounitNotBijective,
}

/// The dual quotient of an algebra: carrier point `i` is the `i`-th atom
/// (in element order), projected onto its domain-equivalence class.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AtomDual {
    pub quotient: SetQuotient,
    /// Atom element indices; position `i` in the quotient carrier stands
    /// for `atoms[i]`.
    pub atoms: Vec<usize>,
}

impl AtomDual {
    pub fn atom_position(&self, element: usize) -> Option<usize> {
        self.atoms.iter().position(|&x| x == element)
    }
}

/// The dual quotient: atoms under mutual domain comparability, classes
/// numbered by first occurrence.
pub fn f_object(a: &AbstractAlgebra) -> Result<AtomDual, DualityError> {
    let ord = a.order()?;
    let atoms = ord.atoms();
    let mut projection = Vec::with_capacity(atoms.len());
    let mut reps: Vec<usize> = Vec::new();
    for &x in &atoms {
        match reps
            .iter()
            .position(|&r| a.domain_leq(x, r) && a.domain_leq(r, x))
        {
            Some(c) => projection.push(c),
            None => {
                projection.push(reps.len());
                reps.push(x);
            }
        }
    }
    Ok(AtomDual {
        quotient: SetQuotient::new(projection)?,
        atoms,
    })
}

/// The dual algebra of a quotient `π`: all partial sections of `π`,
/// realized as partial functions on the disjoint union of classes and
/// carrier. A section maps class `c` to `classes + x` for some `x` in the
/// fiber of `c`.
#[derive(Clone, Debug)]
pub struct SectionAlgebra {
    pub quotient: SetQuotient,
    pub concrete: ConcreteAlgebra,
}

impl SectionAlgebra {
    pub fn algebra(&self) -> AbstractAlgebra {
        self.concrete.to_abstract()
    }

    /// Element index of the singleton section through carrier point `x`.
    pub fn point_atom(&self, x: usize) -> usize {
        let pair = (self.quotient.class_of(x), self.quotient.classes() + x);
        let pf = PartialFunction::new(self.concrete.base_size(), vec![pair])
            .expect("a single pair is functional");
        self.concrete
            .index_of(&pf)
            .expect("singleton sections are sections")
    }
}

pub fn g_object(pi: &SetQuotient) -> Result<SectionAlgebra, DualityError> {
    g_object_with_cap(pi, DEFAULT_SECTION_CAP)
}

pub fn g_object_with_cap(pi: &SetQuotient, cap: usize) -> Result<SectionAlgebra, DualityError> {
    let count = pi.section_count();
    if count > cap {
        return Err(DualityError::SectionSpaceTooLarge { count, cap });
    }
    let base = pi.classes() + pi.carrier();
    let mut sections = Vec::with_capacity(count);
    // odometer over per-class choices: 0 = undefined, k = k-th fiber point
    let mut choice = vec![0usize; pi.classes()];
    'outer: loop {
        let pairs: Vec<(usize, usize)> = choice
            .iter()
            .enumerate()
            .filter(|&(_, &k)| k > 0)
            .map(|(c, &k)| (c, pi.classes() + pi.fiber(c)[k - 1]))
            .collect();
        sections.push(PartialFunction::new(base, pairs).expect("sections are functional"));
        let mut i = 0;
        loop {
            if i == choice.len() {
                break 'outer;
            }
            choice[i] += 1;
            if choice[i] <= pi.fiber(i).len() {
                continue 'outer;
            }
            choice[i] = 0;
            i += 1;
        }
    }
    let concrete = ConcreteAlgebra::from_closed_elements(base, sections)?;
    Ok(SectionAlgebra {
        quotient: pi.clone(),
        concrete,
    })
}

/// The dual of a complete hom `h : A → B` is a quotient morphism
/// `F(B) → F(A)`: an atom `y` of `B` with `y ≤ h(a)` for some `a` goes to
/// the meet of every element below such an `a` whose image bounds `y`.
/// The meet is checked to be independent of the chosen `a`, an atom, and
/// a bound witness for `y`.
pub fn f_morphism(h: &CompleteHom) -> Result<QuotientMorphism, DualityError> {
    let a = h.source();
    let b = h.target();
    let dual_a = f_object(a)?;
    let dual_b = f_object(b)?;
    let atom_pos_a: BTreeMap<usize, usize> = dual_a
        .atoms
        .iter()
        .enumerate()
        .map(|(i, &x)| (x, i))
        .collect();
    let mut map = Vec::new();
    for (y_pos, &y) in dual_b.atoms.iter().enumerate() {
        let candidates: Vec<usize> = (0..a.size()).filter(|&e| b.leq(y, h.apply(e))).collect();
        if candidates.is_empty() {
            continue;
        }
        let mut result: Option<usize> = None;
        for &e in &candidates {
            let mut acc: Option<usize> = None;
            for &c in &candidates {
                if a.leq(c, e) {
                    acc = Some(match acc {
                        None => c,
                        Some(m) => a.meet(m, c),
                    });
                }
            }
            let x = acc.expect("e itself qualifies");
            match result {
                None => result = Some(x),
                Some(x0) if x0 == x => {}
                Some(x0) => return Err(DualityError::DualMapIllDefined { y, x1: x0, x2: x }),
            }
        }
        let x = result.unwrap();
        let Some(x_pos) = atom_pos_a.get(&x) else {
            return Err(DualityError::DualMapNotAtom { y, x });
        };
        if !b.leq(y, h.apply(x)) {
            return Err(DualityError::DualMapNotBelow { y, x });
        }
        map.push((y_pos, *x_pos));
    }
    Ok(validate_morphism(&dual_b.quotient, &dual_a.quotient, map)?)
}

/// The dual of a quotient morphism `φ : π → ρ` is the complete hom
/// `G(ρ) → G(π)` pulling a section `g` back to
/// `{(π(x), x) : φ(x) defined and (ρ(φ(x)), φ(x)) ∈ g}`.
pub fn g_morphism(phi: &QuotientMorphism) -> Result<CompleteHom, DualityError> {
    g_morphism_with_cap(phi, DEFAULT_SECTION_CAP)
}

pub fn g_morphism_with_cap(
    phi: &QuotientMorphism,
    cap: usize,
) -> Result<CompleteHom, DualityError> {
    let pi = phi.source();
    let rho = phi.target();
    let sa_pi = g_object_with_cap(pi, cap)?;
    let sa_rho = g_object_with_cap(rho, cap)?;
    let mut map = Vec::with_capacity(sa_rho.concrete.len());
    for g in sa_rho.concrete.elements() {
        let pairs: Vec<(usize, usize)> = phi
            .map()
            .iter()
            .filter(|&(_, &y)| g.contains_pair(rho.class_of(y), rho.classes() + y))
            .map(|(&x, _)| (pi.class_of(x), pi.classes() + x))
            .collect();
        let pf = PartialFunction::new(sa_pi.concrete.base_size(), pairs)
            .expect("the pullback of a section is a section");
        map.push(
            sa_pi
                .concrete
                .index_of(&pf)
                .expect("the pullback section is present"),
        );
    }
    Ok(CompleteHom::validate(
        &sa_rho.algebra(),
        &sa_pi.algebra(),
        map,
    )?)
}

/// The unit at `A`: the embedding of `A` into the section algebra of its
/// dual quotient, sending `e` to the section selecting every atom below
/// `e`.
#[derive(Clone, Debug)]
pub struct UnitWitness {
    /// `F(A)`.
    pub dual: AtomDual,
    /// `G(F(A))`.
    pub sections: SectionAlgebra,
    /// `η : A → G(F(A))`, as a hom onto the section algebra's tables.
    pub hom: CompleteHom,
}

pub fn unit(a: &AbstractAlgebra) -> Result<UnitWitness, DualityError> {
    unit_with_cap(a, DEFAULT_SECTION_CAP)
}

pub fn unit_with_cap(a: &AbstractAlgebra, cap: usize) -> Result<UnitWitness, DualityError> {
    let ord = a.order()?;
    let dual = f_object(a)?;
    let sections = g_object_with_cap(&dual.quotient, cap)?;
    let classes = dual.quotient.classes();
    let mut map = Vec::with_capacity(a.size());
    for e in 0..a.size() {
        let pairs: Vec<(usize, usize)> = dual
            .atoms
            .iter()
            .enumerate()
            .filter(|&(_, &x)| ord.leq(x, e))
            .map(|(i, _)| (dual.quotient.class_of(i), classes + i))
            .collect();
        let pf = PartialFunction::new(sections.concrete.base_size(), pairs)
            .map_err(|source| DualityError::UnitImageNotSection { element: e, source })?;
        map.push(
            sections
                .concrete
                .index_of(&pf)
                .expect("atom selections are sections"),
        );
    }
    let hom = CompleteHom::validate(a, &sections.algebra(), map)?;
    Ok(UnitWitness {
        dual,
        sections,
        hom,
    })
}

/// The counit at `π`: the carrier bijection identifying `π` with the dual
/// quotient of its section algebra, via singleton sections.
#[derive(Clone, Debug)]
pub struct CounitWitness {
    /// `G(π)`.
    pub sections: SectionAlgebra,
    /// `F(G(π))`.
    pub dual: AtomDual,
    /// `λ : π → F(G(π))`.
    pub morphism: QuotientMorphism,
}

pub fn counit(pi: &SetQuotient) -> Result<CounitWitness, DualityError> {
    counit_with_cap(pi, DEFAULT_SECTION_CAP)
}

pub fn counit_with_cap(pi: &SetQuotient, cap: usize) -> Result<CounitWitness, DualityError> {
    let sections = g_object_with_cap(pi, cap)?;
    let alg = sections.algebra();
    let dual = f_object(&alg)?;
    let mut map = Vec::with_capacity(pi.carrier());
    for x in 0..pi.carrier() {
        let atom_elem = sections.point_atom(x);
        let pos = dual
            .atom_position(atom_elem)
            .expect("singleton sections are atoms");
        map.push((x, pos));
    }
    let morphism = validate_morphism(pi, &dual.quotient, map)?;
    if !morphism.is_bijection() {
        return Err(DualityError::CounitNotBijective);
    }
    Ok(CounitWitness {
        sections,
        dual,
        morphism,
    })
}

/// First triangle identity: `F(η_A) ∘ λ_{F(A)}` is the identity on `F(A)`.
pub fn check_triangle_f(a: &AbstractAlgebra) -> Result<bool, DualityError> {
    let u = unit(a)?;
    let f_eta = f_morphism(&u.hom)?;
    let lambda = counit(&u.dual.quotient)?;
    let comp = compose_morphisms(&f_eta, &lambda.morphism)?;
    Ok(comp.is_identity())
}

/// Second triangle identity: `G(λ_π) ∘ η_{G(π)}` is the identity on
/// `G(π)`.
pub fn check_triangle_g(pi: &SetQuotient) -> Result<bool, DualityError> {
    let cw = counit(pi)?;
    let alg = cw.sections.algebra();
    let u = unit(&alg)?;
    let g_lambda = g_morphism(&cw.morphism)?;
    let comp = CompleteHom::compose(&g_lambda, &u.hom)?;
    Ok(comp == CompleteHom::identity(&alg))
}

/// Unit naturality: `G(F(h)) ∘ η_A = η_B ∘ h` for `h : A → B`.
pub fn check_unit_naturality(h: &CompleteHom) -> Result<bool, DualityError> {
    let ua = unit(h.source())?;
    let ub = unit(h.target())?;
    let gf_h = g_morphism(&f_morphism(h)?)?;
    let left = CompleteHom::compose(&gf_h, &ua.hom)?;
    let right = CompleteHom::compose(&ub.hom, h)?;
    Ok(left == right)
}

/// Counit naturality: `F(G(φ)) ∘ λ_π = λ_ρ ∘ φ` for `φ : π → ρ`.
pub fn check_counit_naturality(phi: &QuotientMorphism) -> Result<bool, DualityError> {
    let lp = counit(phi.source())?;
    let lr = counit(phi.target())?;
    let fg_phi = f_morphism(&g_morphism(phi)?)?;
    let left = compose_morphisms(&fg_phi, &lp.morphism)?;
    let right = compose_morphisms(&lr.morphism, phi)?;
    Ok(left == right)
}

/// Contravariant functor law on algebras: `F(h2 ∘ h1) = F(h1) ∘ F(h2)`.
pub fn check_f_composition(h1: &CompleteHom, h2: &CompleteHom) -> Result<bool, DualityError> {
    let comp = CompleteHom::compose(h2, h1)?;
    let lhs = f_morphism(&comp)?;
    let rhs = compose_morphisms(&f_morphism(h1)?, &f_morphism(h2)?)?;
    Ok(lhs == rhs)
}

/// Contravariant functor law on quotients: `G(φ2 ∘ φ1) = G(φ1) ∘ G(φ2)`.
pub fn check_g_composition(
    phi1: &QuotientMorphism,
    phi2: &QuotientMorphism,
) -> Result<bool, DualityError> {
    let comp = compose_morphisms(phi2, phi1)?;
    let lhs = g_morphism(&comp)?;
    let rhs = CompleteHom::compose(&g_morphism(phi1)?, &g_morphism(phi2)?)?;
    Ok(lhs == rhs)
}

/// `F` sends identities to identities.
pub fn check_f_identity(a: &AbstractAlgebra) -> Result<bool, DualityError> {
    Ok(f_morphism(&CompleteHom::identity(a))?.is_identity())
}

/// `G` sends identities to identities.
pub fn check_g_identity(pi: &SetQuotient) -> Result<bool, DualityError> {
    let g = g_morphism(&QuotientMorphism::identity(pi))?;
    let alg = g_object(pi)?.algebra();
    Ok(g == CompleteHom::identity(&alg))
}

/// Every section must be the join of the unit images below it. Returns a
/// violating section index, or None.
pub fn unit_join_density_violation(w: &UnitWitness) -> Result<Option<usize>, DualityError> {
    let alg = w.sections.algebra();
    let ord = alg.order()?;
    for g in 0..alg.size() {
        let mut mask = BitSet::new(alg.size());
        for e in 0..w.hom.source().size() {
            let img = w.hom.apply(e);
            if ord.leq(img, g) {
                mask.insert(img);
            }
        }
        if ord.join_of_mask(&mask) != Some(g) {
            return Ok(Some(g));
        }
    }
    Ok(None)
}

/// Convenience: the order of an algebra, for callers that already
/// validated it.
pub fn order_of(a: &AbstractAlgebra) -> Result<Order, DualityError> {
    Ok(a.order()?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::concrete::tests::disjoint_singletons;

    fn q(projection: &[usize]) -> SetQuotient {
        SetQuotient::new(projection.to_vec()).unwrap()
    }

    #[test]
    fn dual_of_the_disjoint_singleton_algebra() {
        let a = disjoint_singletons().to_abstract();
        let dual = f_object(&a).unwrap();
        assert_eq!(dual.atoms, vec![1, 2]);
        // the two singletons have incomparable domains: two classes
        assert_eq!(dual.quotient.carrier(), 2);
        assert_eq!(dual.quotient.classes(), 2);
        assert_eq!(dual.quotient.projection(), &[0, 1]);
    }

    #[test]
    fn section_algebra_counts_and_structure() {
        let pi = q(&[0, 0, 1]);
        let sa = g_object(&pi).unwrap();
        assert_eq!(sa.concrete.len(), 6); // (1+2)(1+1)
        assert_eq!(sa.concrete.base_size(), 5); // 2 classes + 3 points
        assert!(sa.concrete.is_compatibly_complete());
        let ord = sa.algebra().order().unwrap();
        assert_eq!(ord.atoms().len(), 3);
        // the empty quotient still has its empty section
        let sa0 = g_object(&q(&[])).unwrap();
        assert_eq!(sa0.concrete.len(), 1);
    }

    #[test]
    fn section_cap_is_enforced() {
        let pi = q(&[0; 13]); // 14 sections > cap 8
        let err = g_object_with_cap(&pi, 8).unwrap_err();
        assert_eq!(
            err,
            DualityError::SectionSpaceTooLarge { count: 14, cap: 8 }
        );
    }

    #[test]
    fn counit_identifies_a_quotient_with_its_double_dual() {
        for proj in [vec![0, 0, 1], vec![0, 1, 2], vec![0, 0, 0, 1, 1]] {
            let pi = q(&proj);
            let cw = counit(&pi).unwrap();
            assert!(cw.morphism.is_bijection());
            assert_eq!(cw.dual.quotient.classes(), pi.classes());
        }
    }

    #[test]
    fn unit_embeds_and_is_join_dense() {
        let a = disjoint_singletons().to_abstract();
        let w = unit(&a).unwrap();
        assert!(w.hom.is_injective());
        // the completion adds the missing union: 4 sections
        assert_eq!(w.sections.concrete.len(), 4);
        assert_eq!(unit_join_density_violation(&w).unwrap(), None);
        // on an already compatibly complete algebra the unit is bijective
        let b = g_object(&q(&[0, 0, 1])).unwrap().algebra();
        let wb = unit(&b).unwrap();
        assert!(wb.hom.is_bijective());
    }

    #[test]
    fn triangle_identities_hold_on_fixtures() {
        let a = disjoint_singletons().to_abstract();
        assert!(check_triangle_f(&a).unwrap());
        let b = g_object(&q(&[0, 1, 1])).unwrap().algebra();
        assert!(check_triangle_f(&b).unwrap());
        for proj in [vec![0, 0, 1], vec![0, 1], vec![0, 0, 0]] {
            assert!(check_triangle_g(&q(&proj)).unwrap());
        }
    }

    #[test]
    fn functors_preserve_identities() {
        let a = disjoint_singletons().to_abstract();
        assert!(check_f_identity(&a).unwrap());
        assert!(check_g_identity(&q(&[0, 0, 1])).unwrap());
    }

    #[test]
    fn dual_of_an_inclusion_hom_is_a_partial_surjection() {
        // the 3-element algebra inside the full algebra on base 3
        let small = disjoint_singletons();
        let big = ConcreteAlgebra::from_closed_elements(3, PartialFunction::enumerate_all(3))
            .unwrap();
        let map: Vec<usize> = small
            .elements()
            .iter()
            .map(|f| big.index_of(f).unwrap())
            .collect();
        let h = CompleteHom::validate(&small.to_abstract(), &big.to_abstract(), map).unwrap();
        let dual = f_morphism(&h).unwrap();
        // big has 9 atoms; only those matching the two singletons map back
        assert_eq!(dual.source().carrier(), 9);
        assert_eq!(dual.target().carrier(), 2);
        assert_eq!(dual.map().len(), 2);
        assert!(check_unit_naturality(&h).unwrap());
    }

    #[test]
    fn naturality_of_the_counit_on_a_small_morphism() {
        let pi = q(&[0, 0, 1]);
        let rho = q(&[0, 1]);
        let phi = validate_morphism(&pi, &rho, [(0, 0), (2, 1)]).unwrap();
        assert!(check_counit_naturality(&phi).unwrap());
        let id = QuotientMorphism::identity(&pi);
        assert!(check_counit_naturality(&id).unwrap());
        // functor law on a composable pair
        let tau = q(&[0]);
        let psi = validate_morphism(&rho, &tau, [(0, 0)]).unwrap();
        assert!(check_g_composition(&phi, &psi).unwrap());
    }

    #[test]
    fn hom_validation_rejects_broken_maps() {
        let diamond = g_object(&q(&[0, 1])).unwrap().algebra();
        // collapsing the top onto zero breaks difference preservation
        let err =
            CompleteHom::validate(&diamond, &diamond, vec![0, 1, 2, 0]).unwrap_err();
        assert!(matches!(err, HomError::MinusNotPreserved { .. }));
        let err = CompleteHom::validate(&diamond, &diamond, vec![0, 1, 2, 9]).unwrap_err();
        assert_eq!(err, HomError::MapOutOfRange { arg: 3, value: 9 });
    }

    #[test]
    fn hom_validation_rejects_join_breakers() {
        // hand-made tables: a diamond 0 < {1,2} < 3 whose operations are
        // consistent with the order but admit a map that skips the join
        let src = AbstractAlgebra::from_tables(
            4,
            vec![0, 0, 0, 0, 1, 0, 1, 0, 2, 2, 0, 0, 3, 3, 3, 0],
            vec![0, 0, 0, 0, 0, 1, 0, 1, 0, 0, 2, 2, 0, 0, 0, 3],
        )
        .unwrap();
        // the same diamond with an extra top 4 above 3
        let tgt = AbstractAlgebra::from_tables(
            5,
            vec![
                0, 0, 0, 0, 0, 1, 0, 1, 0, 0, 2, 2, 0, 0, 0, 3, 3, 3, 0, 0, 4, 4, 4, 4, 0,
            ],
            vec![
                0, 0, 0, 0, 0, 0, 1, 0, 1, 1, 0, 0, 2, 2, 2, 0, 0, 0, 3, 3, 0, 0, 0, 0, 4,
            ],
        )
        .unwrap();
        // sending the source top to the new top preserves both operations
        // but not the join of the two atoms
        let err = CompleteHom::validate(&src, &tgt, vec![0, 1, 2, 4]).unwrap_err();
        assert_eq!(
            err,
            HomError::JoinNotPreserved {
                subset: vec![1, 2],
                mapped_join: 4,
                image_join: 3
            }
        );
    }

    #[test]
    fn unit_on_the_one_element_algebra() {
        let a = AbstractAlgebra::from_tables(1, vec![0], vec![0]).unwrap();
        let w = unit(&a).unwrap();
        assert!(w.hom.is_bijective());
        assert_eq!(w.dual.quotient.carrier(), 0);
        assert!(check_triangle_f(&a).unwrap());
    }
}
