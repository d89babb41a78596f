//! Concrete algebras: finite, canonically ordered sets of partial functions
//! on a common base, closed under relative complement and domain
//! restriction, with the operation tables derived from the elements.

use std::collections::{BTreeMap, BTreeSet};

use thiserror::Error;

use crate::algebra::AbstractAlgebra;
use crate::pfun::{PartialFunction, PfError};
use crate::util::for_each_tuple;

pub const DEFAULT_CLOSURE_CAP: usize = 4096;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ConcreteError {
    #[error(transparent)]
    Pf(#[from] PfError),
    #[error("closure exceeded cap of {cap} elements")]
    ClosureCapExceeded { cap: usize },
    #[error("element list is not closed: {f} {op} {g} = {result}, which is missing")]
    NotClosed {
        op: &'static str,
        f: String,
        g: String,
        result: String,
    },
    #[error("operator {op} leaves the algebra: arguments {args:?} give {result}, which is missing")]
    OperatorNotClosed {
        op: String,
        args: Vec<String>,
        result: String,
    },
    #[error("duplicate element {0}")]
    Duplicate(String),
}

/// A named operation on partial functions over a fixed base, used to close
/// algebras under extra signature operations and to derive their tables.
pub trait ConcreteOperator: Sync {
    fn name(&self) -> &str;
    fn arity(&self) -> usize;
    fn apply(&self, base_size: usize, args: &[&PartialFunction])
        -> Result<PartialFunction, PfError>;
}

#[derive(Clone, PartialEq, Eq)]
pub struct ConcreteAlgebra {
    base_size: usize,
    elements: Vec<PartialFunction>,
    index: BTreeMap<PartialFunction, usize>,
    minus: Vec<usize>,
    restrict: Vec<usize>,
}

impl ConcreteAlgebra {
    /// Builds the algebra from an already-closed element list, validating
    /// closure under both operations. The empty function must be present.
    pub fn from_closed_elements(
        base_size: usize,
        elements: impl IntoIterator<Item = PartialFunction>,
    ) -> Result<Self, ConcreteError> {
        let mut sorted: Vec<PartialFunction> = Vec::new();
        let mut index = BTreeMap::new();
        for f in elements {
            if f.base_size() != base_size {
                return Err(PfError::BaseMismatch {
                    left: base_size,
                    right: f.base_size(),
                }
                .into());
            }
            if index.contains_key(&f) {
                return Err(ConcreteError::Duplicate(f.to_string()));
            }
            index.insert(f.clone(), sorted.len());
            sorted.push(f);
        }
        sorted.sort();
        for (i, f) in sorted.iter().enumerate() {
            index.insert(f.clone(), i);
        }
        let n = sorted.len();
        let mut minus = vec![0usize; n * n];
        let mut restrict = vec![0usize; n * n];
        for i in 0..n {
            for j in 0..n {
                for (table, op, name) in [
                    (&mut minus, sorted[i].relative_complement(&sorted[j])?, "-"),
                    (&mut restrict, sorted[i].domain_restriction(&sorted[j])?, "▷"),
                ] {
                    match index.get(&op) {
                        Some(&k) => table[i * n + j] = k,
                        None => {
                            return Err(ConcreteError::NotClosed {
                                op: name,
                                f: sorted[i].to_string(),
                                g: sorted[j].to_string(),
                                result: op.to_string(),
                            })
                        }
                    }
                }
            }
        }
        if n == 0 || !sorted[0].is_empty() {
            // closure under f - f forces the empty function into any
            // nonempty closed list; an empty list is rejected here
            return Err(ConcreteError::NotClosed {
                op: "-",
                f: "[]".into(),
                g: "[]".into(),
                result: "[]".into(),
            });
        }
        Ok(ConcreteAlgebra {
            base_size,
            elements: sorted,
            index,
            minus,
            restrict,
        })
    }

    /// Closes the seed set under `-`, `▷`, and the extra operators, then
    /// builds the algebra. The empty function is always included.
    pub fn close_under_ops(
        base_size: usize,
        seeds: impl IntoIterator<Item = PartialFunction>,
        extra: &[&dyn ConcreteOperator],
        cap: usize,
    ) -> Result<Self, ConcreteError> {
        let mut set: BTreeSet<PartialFunction> = BTreeSet::new();
        set.insert(PartialFunction::empty(base_size));
        for f in seeds {
            if f.base_size() != base_size {
                return Err(PfError::BaseMismatch {
                    left: base_size,
                    right: f.base_size(),
                }
                .into());
            }
            set.insert(f);
        }
        if set.len() > cap {
            return Err(ConcreteError::ClosureCapExceeded { cap });
        }

        // worklist closure: each round only combines tuples that touch an
        // element added since the previous round
        let mut known: Vec<PartialFunction> = set.iter().cloned().collect();
        let mut fresh_from = 0usize;
        loop {
            let round_len = known.len();
            let mut new: BTreeSet<PartialFunction> = BTreeSet::new();
            {
                let mut consider = |f: PartialFunction| {
                    if !set.contains(&f) {
                        new.insert(f);
                    }
                };
                for i in 0..round_len {
                    for j in 0..round_len {
                        if i < fresh_from && j < fresh_from {
                            continue;
                        }
                        consider(known[i].relative_complement(&known[j])?);
                        consider(known[i].domain_restriction(&known[j])?);
                    }
                }
                for op in extra {
                    let k = op.arity();
                    let res: Option<Result<(), PfError>> =
                        for_each_tuple(round_len, k, |tuple| {
                            if fresh_from > 0 && tuple.iter().all(|&t| t < fresh_from) {
                                return None;
                            }
                            let args: Vec<&PartialFunction> =
                                tuple.iter().map(|&t| &known[t]).collect();
                            match op.apply(base_size, &args) {
                                Ok(f) => {
                                    consider(f);
                                    None
                                }
                                Err(e) => Some(Err(e)),
                            }
                        });
                    if let Some(r) = res {
                        r?;
                    }
                }
            }
            if new.is_empty() {
                break;
            }
            if set.len() + new.len() > cap {
                return Err(ConcreteError::ClosureCapExceeded { cap });
            }
            fresh_from = round_len;
            for f in new {
                set.insert(f.clone());
                known.push(f);
            }
        }
        Self::from_closed_elements(base_size, set)
    }

    pub fn base_size(&self) -> usize {
        self.base_size
    }

    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }

    pub fn elements(&self) -> &[PartialFunction] {
        &self.elements
    }

    pub fn element(&self, i: usize) -> &PartialFunction {
        &self.elements[i]
    }

    pub fn index_of(&self, f: &PartialFunction) -> Option<usize> {
        self.index.get(f).copied()
    }

    pub fn minus(&self, i: usize, j: usize) -> usize {
        self.minus[i * self.elements.len() + j]
    }

    pub fn restrict(&self, i: usize, j: usize) -> usize {
        self.restrict[i * self.elements.len() + j]
    }

    /// Extracts the operation tables, forgetting the concrete elements.
    pub fn to_abstract(&self) -> AbstractAlgebra {
        AbstractAlgebra::from_tables(
            self.elements.len(),
            self.minus.clone(),
            self.restrict.clone(),
        )
        .expect("derived tables of a concrete algebra are well formed")
    }

    /// The table of a named operator over this algebra's elements; errors
    /// if some result falls outside the algebra.
    pub fn operator_table(
        &self,
        op: &dyn ConcreteOperator,
    ) -> Result<Vec<usize>, ConcreteError> {
        let n = self.elements.len();
        let k = op.arity();
        let mut table = vec![0usize; n.pow(k as u32)];
        let mut slot = 0usize;
        let out: Option<Result<(), ConcreteError>> = for_each_tuple(n, k, |tuple| {
            let args: Vec<&PartialFunction> = tuple.iter().map(|&t| &self.elements[t]).collect();
            let res = match op.apply(self.base_size, &args) {
                Ok(f) => f,
                Err(e) => return Some(Err(e.into())),
            };
            match self.index_of(&res) {
                Some(i) => {
                    table[slot] = i;
                    slot += 1;
                    None
                }
                None => Some(Err(ConcreteError::OperatorNotClosed {
                    op: op.name().to_string(),
                    args: args.iter().map(|f| f.to_string()).collect(),
                    result: res.to_string(),
                })),
            }
        });
        if let Some(r) = out {
            r?;
        }
        Ok(table)
    }

    /// Compatible completeness, decided by the pair rule: a closed concrete
    /// algebra has joins of all pairwise-compatible subsets exactly when the
    /// union of every compatible pair is an element. (Unions of larger
    /// compatible sets are folds of pair unions, and any join must be the
    /// union because `u - ((u - f) - g)` recovers `f ∪ g` from any upper
    /// bound `u`.) Returns a violating pair as witness.
    pub fn compatible_pair_without_union(&self) -> Option<(usize, usize)> {
        let n = self.elements.len();
        for i in 0..n {
            for j in i + 1..n {
                let f = &self.elements[i];
                let g = &self.elements[j];
                if f.compatible(g).expect("same base") {
                    let u = f.union(g).expect("compatible union is functional");
                    if self.index_of(&u).is_none() {
                        return Some((i, j));
                    }
                }
            }
        }
        None
    }

    pub fn is_compatibly_complete(&self) -> bool {
        self.compatible_pair_without_union().is_none()
    }
}

impl std::fmt::Debug for ConcreteAlgebra {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(
            f,
            "ConcreteAlgebra(base {}, {} elements)",
            self.base_size,
            self.elements.len()
        )
    }
}

#[cfg(test)]
pub(crate) mod tests {
    use super::*;

    fn pf(base: usize, pairs: &[(usize, usize)]) -> PartialFunction {
        PartialFunction::new(base, pairs.iter().copied()).unwrap()
    }

    /// The two disjoint singletons on base 3; their closure adds only the
    /// empty function.
    pub(crate) fn disjoint_singletons() -> ConcreteAlgebra {
        ConcreteAlgebra::close_under_ops(
            3,
            [pf(3, &[(1, 1)]), pf(3, &[(2, 2)])],
            &[],
            DEFAULT_CLOSURE_CAP,
        )
        .unwrap()
    }

    #[test]
    fn closure_of_disjoint_singletons_has_three_elements() {
        let alg = disjoint_singletons();
        assert_eq!(alg.len(), 3);
        assert_eq!(alg.element(0), &PartialFunction::empty(3));
        assert_eq!(alg.element(1), &pf(3, &[(1, 1)]));
        assert_eq!(alg.element(2), &pf(3, &[(2, 2)]));
    }

    #[test]
    fn closure_of_all_singletons_on_base_two_adds_only_empty() {
        // both operations return subsets of their arguments' pair sets, so
        // a closure never grows beyond the seeds' downsets: the 4 singleton
        // seeds close at 5 elements
        let seeds: Vec<PartialFunction> = (0..2)
            .flat_map(|x| (0..2).map(move |y| pf(2, &[(x, y)])))
            .collect();
        let alg =
            ConcreteAlgebra::close_under_ops(2, seeds, &[], DEFAULT_CLOSURE_CAP).unwrap();
        assert_eq!(alg.len(), 5);
    }

    #[test]
    fn closure_of_all_total_functions_on_base_two_is_everything() {
        // the 4 total functions generate all 9 partial functions on base 2
        let seeds = [
            pf(2, &[(0, 0), (1, 1)]),
            pf(2, &[(0, 1), (1, 0)]),
            pf(2, &[(0, 0), (1, 0)]),
            pf(2, &[(0, 1), (1, 1)]),
        ];
        let alg =
            ConcreteAlgebra::close_under_ops(2, seeds, &[], DEFAULT_CLOSURE_CAP).unwrap();
        assert_eq!(alg.len(), 9);
        assert_eq!(
            alg.elements().to_vec(),
            PartialFunction::enumerate_all(2)
        );
    }

    #[test]
    fn closure_always_contains_empty() {
        let alg = ConcreteAlgebra::close_under_ops(
            4,
            [pf(4, &[(0, 1), (2, 3)])],
            &[],
            DEFAULT_CLOSURE_CAP,
        )
        .unwrap();
        assert_eq!(alg.index_of(&PartialFunction::empty(4)), Some(0));
        // empty seed list gives the one-element algebra {[]}
        let trivial =
            ConcreteAlgebra::close_under_ops(2, [], &[], DEFAULT_CLOSURE_CAP).unwrap();
        assert_eq!(trivial.len(), 1);
    }

    #[test]
    fn closure_cap_is_enforced() {
        let seeds: Vec<PartialFunction> = (0..2)
            .flat_map(|x| (0..2).map(move |y| pf(2, &[(x, y)])))
            .collect();
        let err = ConcreteAlgebra::close_under_ops(2, seeds, &[], 3).unwrap_err();
        assert!(matches!(err, ConcreteError::ClosureCapExceeded { cap: 3 }));
    }

    #[test]
    fn non_closed_list_is_rejected_with_the_missing_element() {
        let err = ConcreteAlgebra::from_closed_elements(
            3,
            [
                PartialFunction::empty(3),
                pf(3, &[(1, 1), (2, 2)]),
                pf(3, &[(1, 1)]),
            ],
        )
        .unwrap_err();
        match err {
            ConcreteError::NotClosed { op, result, .. } => {
                assert_eq!(op, "-");
                assert_eq!(result, "[(2,2)]");
            }
            other => panic!("unexpected error {other}"),
        }
    }

    #[test]
    fn tables_match_direct_computation() {
        let alg = disjoint_singletons();
        let a = alg.index_of(&pf(3, &[(1, 1)])).unwrap();
        let b = alg.index_of(&pf(3, &[(2, 2)])).unwrap();
        let zero = alg.index_of(&PartialFunction::empty(3)).unwrap();
        assert_eq!(alg.minus(a, b), a);
        assert_eq!(alg.minus(a, a), zero);
        assert_eq!(alg.restrict(a, b), zero);
        assert_eq!(alg.restrict(b, b), b);
    }

    #[test]
    fn disjoint_singletons_are_not_compatibly_complete() {
        // the two singletons are compatible but their union is missing
        let alg = disjoint_singletons();
        assert!(!alg.is_compatibly_complete());
        let (i, j) = alg.compatible_pair_without_union().unwrap();
        assert_eq!(
            (alg.element(i).to_string(), alg.element(j).to_string()),
            ("[(1,1)]".to_string(), "[(2,2)]".to_string())
        );
        // adding the union fixes it
        let full = ConcreteAlgebra::from_closed_elements(
            3,
            [
                PartialFunction::empty(3),
                pf(3, &[(1, 1)]),
                pf(3, &[(2, 2)]),
                pf(3, &[(1, 1), (2, 2)]),
            ],
        )
        .unwrap();
        assert!(full.is_compatibly_complete());
    }
}
