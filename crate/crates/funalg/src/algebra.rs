//! Abstract algebras presented by total operation tables for relative
//! complement and domain restriction, together with everything derived from
//! them: the five defining axioms, the natural partial order, atoms, the
//! domain preorder and its classes, compatibility, and the two
//! completeness predicates.

use std::collections::BTreeMap;
use std::fmt;

use thiserror::Error;

use crate::util::BitSet;

pub const DEFAULT_SUBSET_CAP: usize = 20;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum TableError {
    #[error("table has {got} entries, expected {expected}")]
    WrongLength { got: usize, expected: usize },
    #[error("table entry {entry} out of range for size {size}")]
    EntryOutOfRange { entry: usize, size: usize },
    #[error("algebra must have at least one element")]
    Empty,
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum StructureError {
    #[error("order is not reflexive at {0}")]
    NotReflexive(usize),
    #[error("order is not antisymmetric: {0} and {1} are below each other")]
    NotAntisymmetric(usize, usize),
    #[error("order is not transitive at {0} ≤ {1} ≤ {2}")]
    NotTransitive(usize, usize, usize),
    #[error("no least element")]
    NoLeastElement,
    #[error("domain preorder is not transitive at {0} ⪯ {1} ⪯ {2}")]
    DomainPreorderNotTransitive(usize, usize, usize),
    #[error("domain class of the least element also contains {0}")]
    ZeroClassNotTrivial(usize),
    #[error(
        "class meet ill-defined: representatives ({p1},{q1}) and ({p2},{q2}) give different classes"
    )]
    ClassMeetIllDefined {
        p1: usize,
        q1: usize,
        p2: usize,
        q2: usize,
    },
    #[error("size {size} exceeds the exhaustive subset cap {cap}")]
    SubsetCapExceeded { size: usize, cap: usize },
    #[error("{count} atoms exceed the 64-atom mask limit")]
    TooManyAtoms { count: usize },
    #[error("not atomistic: element {element} is not the join of the atoms below it")]
    NotAtomistic { element: usize },
}

/// An algebra `({0..size-1}, -, ▷)` given by row-major operation tables.
#[derive(Clone, PartialEq, Eq)]
pub struct AbstractAlgebra {
    size: usize,
    minus: Vec<usize>,
    restrict: Vec<usize>,
}

/// Which axiom a witness violates. Values are the conventional numbering:
/// 1: a-(b-a)=a, 2: a⋏b=b⋏a, 3: (a-b)-c=(a-c)-b,
/// 4: (a▷c)⋏(b▷c)=(a▷b)▷c, 5: (a⋏b)▷a=a⋏b.
pub type AxiomId = u8;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AxiomWitness {
    pub axiom: AxiomId,
    pub a: usize,
    pub b: usize,
    pub c: Option<usize>,
}

impl fmt::Display for AxiomWitness {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.c {
            Some(c) => write!(
                f,
                "AX{} FAIL at (a={},b={},c={})",
                self.axiom, self.a, self.b, c
            ),
            None => write!(f, "AX{} FAIL at (a={},b={})", self.axiom, self.a, self.b),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum AxiomCheck {
    Pass,
    Fail(AxiomWitness),
}

impl AxiomCheck {
    pub fn is_pass(&self) -> bool {
        matches!(self, AxiomCheck::Pass)
    }
}

impl fmt::Display for AxiomCheck {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            AxiomCheck::Pass => write!(f, "AXIOMS PASS"),
            AxiomCheck::Fail(w) => write!(f, "{w}"),
        }
    }
}

/// Domain classes: the partition induced by mutual domain comparability,
/// with the induced meet-semilattice table on classes.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DomainClasses {
    pub class_of: Vec<usize>,
    pub members: Vec<Vec<usize>>,
    /// Row-major class-level meet table: `[a] ∧ [b] = [a ▷ b]`, verified
    /// independent of the chosen representatives.
    pub meet: Vec<usize>,
}

impl AbstractAlgebra {
    pub fn from_tables(
        size: usize,
        minus: Vec<usize>,
        restrict: Vec<usize>,
    ) -> Result<Self, TableError> {
        if size == 0 {
            return Err(TableError::Empty);
        }
        for table in [&minus, &restrict] {
            if table.len() != size * size {
                return Err(TableError::WrongLength {
                    got: table.len(),
                    expected: size * size,
                });
            }
            if let Some(&entry) = table.iter().find(|&&e| e >= size) {
                return Err(TableError::EntryOutOfRange { entry, size });
            }
        }
        Ok(AbstractAlgebra {
            size,
            minus,
            restrict,
        })
    }

    pub fn size(&self) -> usize {
        self.size
    }

    pub fn minus(&self, a: usize, b: usize) -> usize {
        self.minus[a * self.size + b]
    }

    pub fn restrict(&self, a: usize, b: usize) -> usize {
        self.restrict[a * self.size + b]
    }

    pub fn minus_table(&self) -> &[usize] {
        &self.minus
    }

    pub fn restrict_table(&self) -> &[usize] {
        &self.restrict
    }

    /// Derived meet `a ⋏ b = a - (a - b)`.
    pub fn meet(&self, a: usize, b: usize) -> usize {
        self.minus(a, self.minus(a, b))
    }

    /// Natural order `a ≤ b ⟺ a ⋏ b = a`.
    pub fn leq(&self, a: usize, b: usize) -> bool {
        self.meet(a, b) == a
    }

    /// The least element, meaningful once the axioms hold: `a - a` is then
    /// the same element for every `a`.
    pub fn zero(&self) -> usize {
        self.minus(0, 0)
    }

    /// Domain preorder `a ⪯ b ⟺ a ≤ b ▷ a`.
    pub fn domain_leq(&self, a: usize, b: usize) -> bool {
        self.leq(a, self.restrict(b, a))
    }

    /// Compatibility `a ⌣ b ⟺ a ▷ b = b ▷ a`.
    pub fn compatible(&self, a: usize, b: usize) -> bool {
        self.restrict(a, b) == self.restrict(b, a)
    }

    /// First axiom violation in canonical order (axiom number major, then
    /// lexicographic on the variable tuple), or `Pass`.
    pub fn check_axioms(&self) -> AxiomCheck {
        for axiom in 1..=5 {
            if let Some(w) = self.axiom_witness(axiom) {
                return AxiomCheck::Fail(w);
            }
        }
        AxiomCheck::Pass
    }

    /// First violation of one specific axiom, in lexicographic order.
    pub fn axiom_witness(&self, axiom: AxiomId) -> Option<AxiomWitness> {
        let n = self.size;
        let two = |holds: &dyn Fn(usize, usize) -> bool| {
            for a in 0..n {
                for b in 0..n {
                    if !holds(a, b) {
                        return Some(AxiomWitness {
                            axiom,
                            a,
                            b,
                            c: None,
                        });
                    }
                }
            }
            None
        };
        let three = |holds: &dyn Fn(usize, usize, usize) -> bool| {
            for a in 0..n {
                for b in 0..n {
                    for c in 0..n {
                        if !holds(a, b, c) {
                            return Some(AxiomWitness {
                                axiom,
                                a,
                                b,
                                c: Some(c),
                            });
                        }
                    }
                }
            }
            None
        };
        match axiom {
            1 => two(&|a, b| self.minus(a, self.minus(b, a)) == a),
            2 => two(&|a, b| self.meet(a, b) == self.meet(b, a)),
            3 => three(&|a, b, c| {
                self.minus(self.minus(a, b), c) == self.minus(self.minus(a, c), b)
            }),
            4 => three(&|a, b, c| {
                self.meet(self.restrict(a, c), self.restrict(b, c))
                    == self.restrict(self.restrict(a, b), c)
            }),
            5 => two(&|a, b| {
                let m = self.meet(a, b);
                self.restrict(m, a) == m
            }),
            other => panic!("no axiom numbered {other}"),
        }
    }

    /// Validates that `≤` is a partial order and packages it as bitmasks.
    pub fn order(&self) -> Result<Order, StructureError> {
        let n = self.size;
        let mut below = vec![BitSet::new(n); n];
        let mut above = vec![BitSet::new(n); n];
        for a in 0..n {
            for b in 0..n {
                if self.leq(a, b) {
                    below[b].insert(a);
                    above[a].insert(b);
                }
            }
        }
        for a in 0..n {
            if !below[a].contains(a) {
                return Err(StructureError::NotReflexive(a));
            }
            for b in 0..n {
                if a != b && below[a].contains(b) && below[b].contains(a) {
                    return Err(StructureError::NotAntisymmetric(a.min(b), a.max(b)));
                }
            }
        }
        for b in 0..n {
            for a in below[b].clone().iter_ones() {
                if !below[a].is_subset(&below[b]) {
                    let c = below[a]
                        .iter_ones()
                        .find(|&c| !below[b].contains(c))
                        .expect("subset check failed");
                    return Err(StructureError::NotTransitive(c, a, b));
                }
            }
        }
        Ok(Order { below, above })
    }

    /// Compatibility masks: `mask[a]` is the set of elements compatible
    /// with `a`.
    pub fn compat_masks(&self) -> Vec<BitSet> {
        let n = self.size;
        let mut masks = vec![BitSet::new(n); n];
        for a in 0..n {
            for b in 0..n {
                if self.compatible(a, b) {
                    masks[a].insert(b);
                }
            }
        }
        masks
    }

    /// Partitions by the equivalence of the domain preorder and derives the
    /// class meet table, verifying it is representative-independent and
    /// that the least element sits alone in its class.
    pub fn domain_classes(&self, ord: &Order) -> Result<DomainClasses, StructureError> {
        let n = self.size;
        // ⪯ as masks for the transitivity check
        let mut dom_below = vec![BitSet::new(n); n];
        for a in 0..n {
            for b in 0..n {
                if self.domain_leq(a, b) {
                    dom_below[b].insert(a);
                }
            }
        }
        for a in 0..n {
            if !dom_below[a].contains(a) {
                return Err(StructureError::NotReflexive(a));
            }
        }
        for b in 0..n {
            for a in dom_below[b].clone().iter_ones() {
                if !dom_below[a].is_subset(&dom_below[b]) {
                    let c = dom_below[a]
                        .iter_ones()
                        .find(|&c| !dom_below[b].contains(c))
                        .expect("subset check failed");
                    return Err(StructureError::DomainPreorderNotTransitive(c, a, b));
                }
            }
        }

        let mut class_of = vec![usize::MAX; n];
        let mut members: Vec<Vec<usize>> = Vec::new();
        for a in 0..n {
            if class_of[a] != usize::MAX {
                continue;
            }
            let id = members.len();
            let mut group = Vec::new();
            for b in a..n {
                if dom_below[b].contains(a) && dom_below[a].contains(b) {
                    class_of[b] = id;
                    group.push(b);
                }
            }
            members.push(group);
        }

        let zero = ord.least().ok_or(StructureError::NoLeastElement)?;
        if members[class_of[zero]].len() != 1 {
            let other = members[class_of[zero]]
                .iter()
                .copied()
                .find(|&m| m != zero)
                .expect("class has another member");
            return Err(StructureError::ZeroClassNotTrivial(other));
        }

        let k = members.len();
        let mut meet = vec![usize::MAX; k * k];
        for p in 0..k {
            for q in 0..k {
                let mut expected: Option<(usize, usize, usize)> = None;
                for &a in &members[p] {
                    for &b in &members[q] {
                        let got = class_of[self.restrict(a, b)];
                        match expected {
                            None => expected = Some((got, a, b)),
                            Some((e, a0, b0)) if e != got => {
                                return Err(StructureError::ClassMeetIllDefined {
                                    p1: a0,
                                    q1: b0,
                                    p2: a,
                                    q2: b,
                                })
                            }
                            _ => {}
                        }
                    }
                }
                meet[p * k + q] = expected.expect("classes are nonempty").0;
            }
        }
        Ok(DomainClasses {
            class_of,
            members,
            meet,
        })
    }

    /// Witness that some nonempty subset has no meet, if one exists.
    /// Exhaustive over all subsets; errors above the cap.
    pub fn meet_completeness_witness(
        &self,
        ord: &Order,
        cap: usize,
    ) -> Result<Option<Vec<usize>>, StructureError> {
        let n = self.size;
        if n > cap || n > 63 {
            return Err(StructureError::SubsetCapExceeded { size: n, cap });
        }
        for mask in 1u64..(1 << n) {
            let subset: Vec<usize> = (0..n).filter(|&i| mask & (1 << i) != 0).collect();
            if ord.meet_of(&subset).is_none() {
                return Ok(Some(subset));
            }
        }
        Ok(None)
    }

    /// Witness that some pairwise-compatible subset has no join, if one
    /// exists. Walks exactly the pairwise-compatible subsets; errors above
    /// the cap.
    pub fn compatible_completeness_witness(
        &self,
        ord: &Order,
        cap: usize,
    ) -> Result<Option<Vec<usize>>, StructureError> {
        let n = self.size;
        if n > cap || n > 63 {
            return Err(StructureError::SubsetCapExceeded { size: n, cap });
        }
        if ord.least().is_none() {
            // the empty subset already has no join
            return Ok(Some(Vec::new()));
        }
        let compat = self.compat_masks();
        let mut stack = Vec::new();
        fn walk(
            from: usize,
            n: usize,
            compat: &[BitSet],
            ord: &Order,
            stack: &mut Vec<usize>,
        ) -> Option<Vec<usize>> {
            for v in from..n {
                if stack.iter().any(|&u| !compat[u].contains(v)) {
                    continue;
                }
                stack.push(v);
                if ord.join_of(stack).is_none() {
                    return Some(stack.clone());
                }
                if let Some(w) = walk(v + 1, n, compat, ord, stack) {
                    return Some(w);
                }
                stack.pop();
            }
            None
        }
        Ok(walk(0, n, &compat, ord, &mut stack))
    }
}

impl fmt::Debug for AbstractAlgebra {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "AbstractAlgebra(size {})", self.size)
    }
}

/// The natural order of an algebra, validated and packed into bitmasks.
#[derive(Clone, Debug)]
pub struct Order {
    below: Vec<BitSet>,
    above: Vec<BitSet>,
}

impl Order {
    pub fn size(&self) -> usize {
        self.below.len()
    }

    pub fn leq(&self, a: usize, b: usize) -> bool {
        self.below[b].contains(a)
    }

    pub fn below_mask(&self, b: usize) -> &BitSet {
        &self.below[b]
    }

    pub fn least(&self) -> Option<usize> {
        let n = self.below.len();
        (0..n).find(|&z| self.above[z].count() == n)
    }

    /// Least upper bound of a subset; `join_of(&[])` is the least element.
    /// Panics if the "order" admits two least upper bounds, which a
    /// validated partial order cannot.
    pub fn join_of(&self, subset: &[usize]) -> Option<usize> {
        let mut mask = BitSet::new(self.below.len());
        for &s in subset {
            mask.insert(s);
        }
        self.join_of_mask(&mask)
    }

    /// `join_of` for a subset already packed as a bitmask.
    pub fn join_of_mask(&self, mask: &BitSet) -> Option<usize> {
        let n = self.below.len();
        let mut ub = BitSet::new(n);
        for u in 0..n {
            if mask.is_subset(&self.below[u]) {
                ub.insert(u);
            }
        }
        let mut found = None;
        for u in ub.iter_ones() {
            if ub.is_subset(&self.above[u]) {
                assert!(found.is_none(), "two least upper bounds");
                found = Some(u);
            }
        }
        found
    }

    /// Greatest lower bound of a nonempty subset.
    pub fn meet_of(&self, subset: &[usize]) -> Option<usize> {
        assert!(!subset.is_empty(), "meet of the empty subset is not defined");
        let n = self.below.len();
        let mut lb = BitSet::new(n);
        for l in 0..n {
            if subset.iter().all(|&s| self.below[s].contains(l)) {
                lb.insert(l);
            }
        }
        let mut found = None;
        for l in lb.iter_ones() {
            if lb.is_subset(&self.below[l]) {
                assert!(found.is_none(), "two greatest lower bounds");
                found = Some(l);
            }
        }
        found
    }

    /// Minimal nonzero elements, ascending.
    pub fn atoms(&self) -> Vec<usize> {
        let z = match self.least() {
            Some(z) => z,
            None => return Vec::new(),
        };
        (0..self.below.len())
            .filter(|&a| a != z && self.below[a].count() == 2)
            .collect()
    }

    /// Every nonzero element has an atom below it.
    pub fn is_atomic(&self) -> bool {
        let z = match self.least() {
            Some(z) => z,
            None => return false,
        };
        let atoms = self.atoms();
        (0..self.below.len())
            .all(|a| a == z || atoms.iter().any(|&x| self.leq(x, a)))
    }

    /// Every element is the join of the atoms below it.
    pub fn is_atomistic(&self) -> bool {
        if self.least().is_none() {
            return false;
        }
        let atoms = self.atoms();
        (0..self.below.len()).all(|a| {
            let under: Vec<usize> = atoms
                .iter()
                .copied()
                .filter(|&x| self.leq(x, a))
                .collect();
            self.join_of(&under) == Some(a)
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::concrete::ConcreteAlgebra;
    use crate::pfun::PartialFunction;

    fn pf(base: usize, pairs: &[(usize, usize)]) -> PartialFunction {
        PartialFunction::new(base, pairs.iter().copied()).unwrap()
    }

    /// Abstract form of the closure of {[(1,1)], [(2,2)]} on base 3:
    /// elements 0=[], 1=[(1,1)], 2=[(2,2)].
    fn disjoint_singletons() -> AbstractAlgebra {
        ConcreteAlgebra::close_under_ops(
            3,
            [pf(3, &[(1, 1)]), pf(3, &[(2, 2)])],
            &[],
            64,
        )
        .unwrap()
        .to_abstract()
    }

    fn all_partial_functions(base: usize) -> AbstractAlgebra {
        ConcreteAlgebra::from_closed_elements(base, PartialFunction::enumerate_all(base))
            .unwrap()
            .to_abstract()
    }

    #[test]
    fn concrete_closures_satisfy_the_axioms() {
        assert!(disjoint_singletons().check_axioms().is_pass());
        assert!(all_partial_functions(2).check_axioms().is_pass());
        assert!(all_partial_functions(3).check_axioms().is_pass());
    }

    #[test]
    fn axiom_witness_rendering_matches_the_documented_format() {
        let w = AxiomWitness {
            axiom: 3,
            a: 2,
            b: 0,
            c: Some(1),
        };
        assert_eq!(w.to_string(), "AX3 FAIL at (a=2,b=0,c=1)");
        let w2 = AxiomWitness {
            axiom: 1,
            a: 0,
            b: 0,
            c: None,
        };
        assert_eq!(w2.to_string(), "AX1 FAIL at (a=0,b=0)");
    }

    // Hand-built failing tables, one per axiom. Each is verified to
    // violate the named axiom at the frozen witness.

    #[test]
    fn constant_one_minus_violates_axiom_1() {
        let alg = AbstractAlgebra::from_tables(2, vec![1; 4], vec![0; 4]).unwrap();
        assert_eq!(
            alg.axiom_witness(1),
            Some(AxiomWitness {
                axiom: 1,
                a: 0,
                b: 0,
                c: None
            })
        );
        assert!(matches!(alg.check_axioms(), AxiomCheck::Fail(w) if w.axiom == 1));
    }

    #[test]
    fn first_projection_minus_violates_axiom_2() {
        // a - b = a passes axiom 1 but breaks commutativity of the meet
        let minus = vec![0, 0, 1, 1];
        let alg = AbstractAlgebra::from_tables(2, minus, vec![0; 4]).unwrap();
        assert!(alg.axiom_witness(1).is_none());
        assert_eq!(
            alg.axiom_witness(2),
            Some(AxiomWitness {
                axiom: 2,
                a: 0,
                b: 1,
                c: None
            })
        );
        assert!(matches!(alg.check_axioms(), AxiomCheck::Fail(w) if w.axiom == 2));
    }

    #[test]
    fn asymmetric_two_element_minus_violates_axiom_3() {
        // 0-0=0, 0-1=1, 1-0=0, 1-1=0: (0-0)-1 = 1 but (0-1)-0 = 0
        let minus = vec![0, 1, 0, 0];
        let alg = AbstractAlgebra::from_tables(2, minus, vec![0; 4]).unwrap();
        assert_eq!(
            alg.axiom_witness(3),
            Some(AxiomWitness {
                axiom: 3,
                a: 0,
                b: 0,
                c: Some(1)
            })
        );
        assert!(matches!(alg.check_axioms(), AxiomCheck::Fail(w) if w.axiom <= 3));
    }

    #[test]
    fn corrupted_restriction_violates_axiom_4() {
        // start from the disjoint-singletons algebra and corrupt 1 ▷ 2 to 2;
        // axioms 1-3 only involve minus and still pass
        let good = disjoint_singletons();
        let mut restrict = good.restrict_table().to_vec();
        restrict[1 * 3 + 2] = 2;
        let alg =
            AbstractAlgebra::from_tables(3, good.minus_table().to_vec(), restrict).unwrap();
        assert!(alg.axiom_witness(1).is_none());
        assert!(alg.axiom_witness(2).is_none());
        assert!(alg.axiom_witness(3).is_none());
        assert_eq!(
            alg.axiom_witness(4),
            Some(AxiomWitness {
                axiom: 4,
                a: 2,
                b: 1,
                c: Some(2)
            })
        );
        assert!(matches!(alg.check_axioms(), AxiomCheck::Fail(w) if w.axiom == 4));
    }

    #[test]
    fn corrupted_self_restriction_violates_axiom_5() {
        // corrupt 1 ▷ 1 to 0: axiom 4 happens to survive, axiom 5 fails at
        // a = b = 1
        let good = disjoint_singletons();
        let mut restrict = good.restrict_table().to_vec();
        restrict[1 * 3 + 1] = 0;
        let alg =
            AbstractAlgebra::from_tables(3, good.minus_table().to_vec(), restrict).unwrap();
        for ax in 1..=4 {
            assert!(alg.axiom_witness(ax).is_none(), "axiom {ax} should pass");
        }
        assert_eq!(
            alg.axiom_witness(5),
            Some(AxiomWitness {
                axiom: 5,
                a: 1,
                b: 1,
                c: None
            })
        );
        assert!(matches!(alg.check_axioms(), AxiomCheck::Fail(w) if w.axiom == 5));
    }

    #[test]
    fn order_of_all_partial_functions_is_pair_inclusion() {
        let conc = ConcreteAlgebra::from_closed_elements(2, PartialFunction::enumerate_all(2))
            .unwrap();
        let alg = conc.to_abstract();
        let ord = alg.order().unwrap();
        for (i, f) in conc.elements().iter().enumerate() {
            for (j, g) in conc.elements().iter().enumerate() {
                assert_eq!(ord.leq(i, j), f.subset_of(g));
            }
        }
        assert_eq!(ord.least(), Some(0));
    }

    #[test]
    fn restriction_stays_below_its_second_argument() {
        let alg = all_partial_functions(2);
        for a in 0..alg.size() {
            for b in 0..alg.size() {
                assert!(alg.leq(alg.restrict(a, b), b));
            }
        }
    }

    #[test]
    fn atoms_of_all_partial_functions_are_the_singletons() {
        let conc = ConcreteAlgebra::from_closed_elements(2, PartialFunction::enumerate_all(2))
            .unwrap();
        let alg = conc.to_abstract();
        let ord = alg.order().unwrap();
        let atoms = ord.atoms();
        assert_eq!(atoms.len(), 4);
        for &x in &atoms {
            assert_eq!(conc.element(x).len(), 1);
        }
        assert!(ord.is_atomic());
        assert!(ord.is_atomistic());
    }

    #[test]
    fn domain_preorder_is_domain_inclusion_concretely() {
        let conc = ConcreteAlgebra::from_closed_elements(2, PartialFunction::enumerate_all(2))
            .unwrap();
        let alg = conc.to_abstract();
        for (i, f) in conc.elements().iter().enumerate() {
            for (j, g) in conc.elements().iter().enumerate() {
                let dom_incl = f
                    .domain()
                    .all(|x| g.is_defined_at(x));
                assert_eq!(alg.domain_leq(i, j), dom_incl);
                // order is contained in the domain preorder
                if alg.leq(i, j) {
                    assert!(alg.domain_leq(i, j));
                }
            }
        }
    }

    #[test]
    fn domain_classes_of_all_partial_functions_group_by_domain() {
        let conc = ConcreteAlgebra::from_closed_elements(2, PartialFunction::enumerate_all(2))
            .unwrap();
        let alg = conc.to_abstract();
        let ord = alg.order().unwrap();
        let dc = alg.domain_classes(&ord).unwrap();
        // domains over base 2: {}, {0}, {1}, {0,1} — four classes
        assert_eq!(dc.members.len(), 4);
        for (i, f) in conc.elements().iter().enumerate() {
            for (j, g) in conc.elements().iter().enumerate() {
                let same_domain = f.domain().collect::<Vec<_>>() == g.domain().collect::<Vec<_>>();
                assert_eq!(dc.class_of[i] == dc.class_of[j], same_domain);
            }
        }
        // the class-level meet is domain intersection; check idempotence
        for p in 0..4 {
            assert_eq!(dc.meet[p * 4 + p], p);
        }
    }

    #[test]
    fn joins_and_meets_scan_correctly() {
        let alg = all_partial_functions(2);
        let conc = ConcreteAlgebra::from_closed_elements(2, PartialFunction::enumerate_all(2))
            .unwrap();
        let ord = alg.order().unwrap();
        // join of the empty set is the least element
        assert_eq!(ord.join_of(&[]), Some(0));
        // two incompatible singletons have no join
        let a = conc.index_of(&pf(2, &[(0, 0)])).unwrap();
        let b = conc.index_of(&pf(2, &[(0, 1)])).unwrap();
        assert_eq!(ord.join_of(&[a, b]), None);
        // two compatible singletons join at their union
        let c = conc.index_of(&pf(2, &[(1, 0)])).unwrap();
        let u = conc.index_of(&pf(2, &[(0, 0), (1, 0)])).unwrap();
        assert_eq!(ord.join_of(&[a, c]), Some(u));
        // meet of everything is the least element
        let everything: Vec<usize> = (0..alg.size()).collect();
        assert_eq!(ord.meet_of(&everything), Some(0));
    }

    #[test]
    fn disjoint_singletons_algebra_is_meet_complete_but_not_compatibly_complete() {
        let alg = disjoint_singletons();
        let ord = alg.order().unwrap();
        assert_eq!(
            alg.meet_completeness_witness(&ord, DEFAULT_SUBSET_CAP).unwrap(),
            None
        );
        let witness = alg
            .compatible_completeness_witness(&ord, DEFAULT_SUBSET_CAP)
            .unwrap()
            .expect("the two singletons have no join");
        // first witness in walk order; 0 is compatible with everything and
        // the two singletons still have no upper bound
        assert_eq!(witness, vec![0, 1, 2]);
        assert_eq!(ord.atoms(), vec![1, 2]);
        assert!(ord.is_atomic());
    }

    #[test]
    fn full_function_algebra_is_compatibly_complete() {
        let alg = all_partial_functions(2);
        let ord = alg.order().unwrap();
        assert_eq!(
            alg.compatible_completeness_witness(&ord, DEFAULT_SUBSET_CAP)
                .unwrap(),
            None
        );
        assert_eq!(
            alg.meet_completeness_witness(&ord, DEFAULT_SUBSET_CAP).unwrap(),
            None
        );
    }

    #[test]
    fn subset_cap_is_reported() {
        let alg = all_partial_functions(2);
        let ord = alg.order().unwrap();
        assert!(matches!(
            alg.meet_completeness_witness(&ord, 4),
            Err(StructureError::SubsetCapExceeded { size: 9, cap: 4 })
        ));
    }

    #[test]
    fn atomic_and_atomistic_coincide_on_axiomatic_algebras() {
        for alg in [disjoint_singletons(), all_partial_functions(2)] {
            assert!(alg.check_axioms().is_pass());
            let ord = alg.order().unwrap();
            assert_eq!(ord.is_atomic(), ord.is_atomistic());
        }
    }

    #[test]
    fn singleton_algebra_is_vacuously_atomic() {
        let alg = AbstractAlgebra::from_tables(1, vec![0], vec![0]).unwrap();
        assert!(alg.check_axioms().is_pass());
        let ord = alg.order().unwrap();
        assert_eq!(ord.atoms(), Vec::<usize>::new());
        assert!(ord.is_atomic());
        assert!(ord.is_atomistic());
    }

    #[test]
    fn broken_orders_are_detected() {
        // minus table where meet is not idempotent-compatible: a ⋏ a ≠ a
        let alg = AbstractAlgebra::from_tables(2, vec![1, 1, 1, 1], vec![0; 4]).unwrap();
        assert!(matches!(
            alg.order(),
            Err(StructureError::NotReflexive(_))
        ));
    }
}

/// Atom bookkeeping for an atomistic algebra: each element is identified
/// with the set of atoms below it, packed into a 64-bit mask. In a valid
/// algebra an element is the join of a subset exactly when its atom mask
/// is the union of theirs, which turns join queries into mask lookups.
#[derive(Clone, Debug)]
pub struct AtomMasks {
    pub atoms: Vec<usize>,
    pub mask_of: Vec<u64>,
    element_of: BTreeMap<u64, usize>,
}

impl AtomMasks {
    pub fn new(a: &AbstractAlgebra, ord: &Order) -> Result<Self, StructureError> {
        let atoms = ord.atoms();
        if atoms.len() > 64 {
            return Err(StructureError::TooManyAtoms {
                count: atoms.len(),
            });
        }
        let mut mask_of = vec![0u64; a.size()];
        let mut element_of = BTreeMap::new();
        for e in 0..a.size() {
            let below: Vec<usize> = atoms.iter().copied().filter(|&x| ord.leq(x, e)).collect();
            if ord.join_of(&below) != Some(e) {
                return Err(StructureError::NotAtomistic { element: e });
            }
            let mut mask = 0u64;
            for (i, &x) in atoms.iter().enumerate() {
                if ord.leq(x, e) {
                    mask |= 1 << i;
                }
            }
            mask_of[e] = mask;
            element_of.insert(mask, e);
        }
        Ok(AtomMasks {
            atoms,
            mask_of,
            element_of,
        })
    }

    /// The element whose atom set is the union over `elements`, if any —
    /// in a valid algebra, exactly their join.
    pub fn join_by_atoms(&self, elements: impl IntoIterator<Item = usize>) -> Option<usize> {
        let mut mask = 0u64;
        for e in elements {
            mask |= self.mask_of[e];
        }
        self.element_of.get(&mask).copied()
    }

    pub fn element_of_mask(&self, mask: u64) -> Option<usize> {
        self.element_of.get(&mask).copied()
    }

    /// Positions (into `atoms`) of the atoms below `e`.
    pub fn atom_positions(&self, e: usize) -> impl Iterator<Item = usize> + '_ {
        let mask = self.mask_of[e];
        (0..self.atoms.len()).filter(move |i| mask >> i & 1 == 1)
    }
}
