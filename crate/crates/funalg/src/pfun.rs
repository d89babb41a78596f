//! Partial functions on a finite base `{0, .., base_size-1}` and the two
//! fundamental operations: relative complement and domain restriction.

use std::collections::BTreeMap;
use std::fmt;

use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum PfError {
    #[error("point {point} out of range for base size {base_size}")]
    PointOutOfRange { point: usize, base_size: usize },
    #[error("not functional: {x} maps to both {y1} and {y2}")]
    NotFunctional { x: usize, y1: usize, y2: usize },
    #[error("base size mismatch: {left} vs {right}")]
    BaseMismatch { left: usize, right: usize },
    #[error("converse of a non-injective function: {y} has preimages {x1} and {x2}")]
    NotInjective { y: usize, x1: usize, x2: usize },
}

/// A partial function, stored as a sorted map from domain point to value.
/// Ordering on the type is lexicographic on the pair list, which is the
/// canonical element order used everywhere else.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct PartialFunction {
    base_size: usize,
    map: BTreeMap<usize, usize>,
}

impl PartialFunction {
    pub fn new(
        base_size: usize,
        pairs: impl IntoIterator<Item = (usize, usize)>,
    ) -> Result<Self, PfError> {
        let mut map = BTreeMap::new();
        for (x, y) in pairs {
            for point in [x, y] {
                if point >= base_size {
                    return Err(PfError::PointOutOfRange { point, base_size });
                }
            }
            if let Some(&prev) = map.get(&x) {
                if prev != y {
                    return Err(PfError::NotFunctional { x, y1: prev, y2: y });
                }
            }
            map.insert(x, y);
        }
        Ok(PartialFunction { base_size, map })
    }

    pub fn empty(base_size: usize) -> Self {
        PartialFunction {
            base_size,
            map: BTreeMap::new(),
        }
    }

    /// The identity function on the whole base.
    pub fn identity(base_size: usize) -> Self {
        PartialFunction {
            base_size,
            map: (0..base_size).map(|x| (x, x)).collect(),
        }
    }

    pub fn base_size(&self) -> usize {
        self.base_size
    }

    pub fn len(&self) -> usize {
        self.map.len()
    }

    pub fn is_empty(&self) -> bool {
        self.map.is_empty()
    }

    pub fn apply(&self, x: usize) -> Option<usize> {
        self.map.get(&x).copied()
    }

    pub fn is_defined_at(&self, x: usize) -> bool {
        self.map.contains_key(&x)
    }

    pub fn pairs(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.map.iter().map(|(&x, &y)| (x, y))
    }

    pub fn domain(&self) -> impl Iterator<Item = usize> + '_ {
        self.map.keys().copied()
    }

    pub fn image(&self) -> impl Iterator<Item = usize> + '_ {
        self.map.values().copied()
    }

    pub fn contains_pair(&self, x: usize, y: usize) -> bool {
        self.map.get(&x) == Some(&y)
    }

    fn check_base(&self, other: &Self) -> Result<(), PfError> {
        if self.base_size != other.base_size {
            return Err(PfError::BaseMismatch {
                left: self.base_size,
                right: other.base_size,
            });
        }
        Ok(())
    }

    /// Relative complement `f - g`: the pairs of `f` not in `g`.
    pub fn relative_complement(&self, other: &Self) -> Result<Self, PfError> {
        self.check_base(other)?;
        let map = self
            .map
            .iter()
            .filter(|(&x, &y)| !other.contains_pair(x, y))
            .map(|(&x, &y)| (x, y))
            .collect();
        Ok(PartialFunction {
            base_size: self.base_size,
            map,
        })
    }

    /// Domain restriction `f ▷ g`: the pairs of `g` whose first coordinate
    /// lies in the domain of `f`.
    pub fn domain_restriction(&self, other: &Self) -> Result<Self, PfError> {
        self.check_base(other)?;
        let map = other
            .map
            .iter()
            .filter(|(&x, _)| self.is_defined_at(x))
            .map(|(&x, &y)| (x, y))
            .collect();
        Ok(PartialFunction {
            base_size: self.base_size,
            map,
        })
    }

    /// Derived meet `f ⋏ g = f - (f - g)`, cross-checked against the pair
    /// intersection it must equal.
    pub fn meet(&self, other: &Self) -> Result<Self, PfError> {
        let via_minus = self.relative_complement(&self.relative_complement(other)?)?;
        let intersection: BTreeMap<usize, usize> = self
            .map
            .iter()
            .filter(|(&x, &y)| other.contains_pair(x, y))
            .map(|(&x, &y)| (x, y))
            .collect();
        assert_eq!(
            via_minus.map, intersection,
            "f - (f - g) disagrees with pair intersection"
        );
        Ok(via_minus)
    }

    /// Set union of the pair sets; errors if the result is not functional.
    pub fn union(&self, other: &Self) -> Result<Self, PfError> {
        self.check_base(other)?;
        PartialFunction::new(
            self.base_size,
            self.pairs().chain(other.pairs()),
        )
    }

    /// Subset order on pair sets: the natural order of every algebra here.
    pub fn subset_of(&self, other: &Self) -> bool {
        self.map
            .iter()
            .all(|(&x, &y)| other.contains_pair(x, y))
    }

    /// Compatibility: agreement on the shared domain, cross-checked against
    /// the equivalent commutation `f ▷ g = g ▷ f`.
    pub fn compatible(&self, other: &Self) -> Result<bool, PfError> {
        self.check_base(other)?;
        let agree = self
            .map
            .iter()
            .all(|(&x, &y)| other.apply(x).map_or(true, |y2| y2 == y));
        let commute =
            self.domain_restriction(other)? == other.domain_restriction(self)?;
        assert_eq!(agree, commute, "agreement disagrees with ▷-commutation");
        Ok(agree)
    }

    /// All partial functions on the given base, in canonical order.
    /// There are `(base_size + 1) ^ base_size` of them.
    pub fn enumerate_all(base_size: usize) -> Vec<PartialFunction> {
        // odometer over value choices per point: 0 = undefined, v+1 = value v
        let mut out = Vec::new();
        let mut choice = vec![0usize; base_size];
        loop {
            let map: BTreeMap<usize, usize> = choice
                .iter()
                .enumerate()
                .filter(|(_, &c)| c > 0)
                .map(|(x, &c)| (x, c - 1))
                .collect();
            out.push(PartialFunction { base_size, map });
            let mut pos = base_size;
            loop {
                if pos == 0 {
                    out.sort();
                    return out;
                }
                pos -= 1;
                choice[pos] += 1;
                if choice[pos] <= base_size {
                    break;
                }
                choice[pos] = 0;
            }
        }
    }

    /// Parses the canonical rendering, e.g. `[(0,1),(2,2)]`.
    pub fn parse(base_size: usize, text: &str) -> Result<Self, String> {
        let s = text.trim();
        let inner = s
            .strip_prefix('[')
            .and_then(|s| s.strip_suffix(']'))
            .ok_or_else(|| format!("expected [..] around pair list, got {s:?}"))?;
        let mut pairs = Vec::new();
        let mut rest = inner.trim();
        while !rest.is_empty() {
            let body = rest
                .strip_prefix('(')
                .ok_or_else(|| format!("expected ( in pair list at {rest:?}"))?;
            let (pair, tail) = body
                .split_once(')')
                .ok_or_else(|| format!("unclosed pair at {rest:?}"))?;
            let (x, y) = pair
                .split_once(',')
                .ok_or_else(|| format!("expected x,y in pair at {pair:?}"))?;
            let x: usize = x.trim().parse().map_err(|e| format!("bad point {x:?}: {e}"))?;
            let y: usize = y.trim().parse().map_err(|e| format!("bad point {y:?}: {e}"))?;
            pairs.push((x, y));
            rest = tail.trim().strip_prefix(',').unwrap_or(tail).trim();
        }
        PartialFunction::new(base_size, pairs).map_err(|e| e.to_string())
    }
}

impl fmt::Display for PartialFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[")?;
        for (i, (x, y)) in self.pairs().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "({x},{y})")?;
        }
        write!(f, "]")
    }
}

impl fmt::Debug for PartialFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "pf{}", self)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn pf(base: usize, pairs: &[(usize, usize)]) -> PartialFunction {
        PartialFunction::new(base, pairs.iter().copied()).unwrap()
    }

    #[test]
    fn constructor_rejects_non_functional_pairs() {
        let err = PartialFunction::new(3, [(0, 1), (0, 2)]).unwrap_err();
        assert_eq!(err, PfError::NotFunctional { x: 0, y1: 1, y2: 2 });
    }

    #[test]
    fn constructor_rejects_out_of_range_points() {
        let err = PartialFunction::new(2, [(0, 5)]).unwrap_err();
        assert!(matches!(err, PfError::PointOutOfRange { point: 5, .. }));
    }

    #[test]
    fn complement_of_self_is_empty() {
        let f = pf(3, &[(0, 1), (2, 2)]);
        assert_eq!(
            f.relative_complement(&f).unwrap(),
            PartialFunction::empty(3)
        );
    }

    #[test]
    fn restriction_by_empty_is_empty() {
        let f = pf(3, &[(0, 1), (2, 2)]);
        let e = PartialFunction::empty(3);
        assert_eq!(e.domain_restriction(&f).unwrap(), e);
        assert_eq!(f.domain_restriction(&e).unwrap(), e);
    }

    #[test]
    fn restriction_by_self_is_identity_on_element() {
        let f = pf(3, &[(0, 1), (2, 2)]);
        assert_eq!(f.domain_restriction(&f).unwrap(), f);
    }

    #[test]
    fn restriction_keeps_pairs_over_shared_domain() {
        // f ▷ g keeps the pairs of g over dom(f), regardless of values
        let f = pf(4, &[(0, 3), (1, 1)]);
        let g = pf(4, &[(0, 0), (2, 2)]);
        assert_eq!(f.domain_restriction(&g).unwrap(), pf(4, &[(0, 0)]));
        assert_eq!(g.domain_restriction(&f).unwrap(), pf(4, &[(0, 3)]));
    }

    #[test]
    fn meet_is_intersection() {
        let f = pf(4, &[(0, 1), (1, 1), (2, 3)]);
        let g = pf(4, &[(0, 1), (1, 2), (2, 3)]);
        assert_eq!(f.meet(&g).unwrap(), pf(4, &[(0, 1), (2, 3)]));
    }

    #[test]
    fn disjoint_domains_are_compatible() {
        let f = pf(3, &[(1, 1)]);
        let g = pf(3, &[(2, 2)]);
        assert!(f.compatible(&g).unwrap());
    }

    #[test]
    fn conflicting_values_are_incompatible() {
        let f = pf(3, &[(0, 1)]);
        let g = pf(3, &[(0, 2)]);
        assert!(!f.compatible(&g).unwrap());
    }

    #[test]
    fn base_mismatch_is_an_error() {
        let f = pf(2, &[(0, 0)]);
        let g = pf(3, &[(0, 0)]);
        assert!(matches!(
            f.relative_complement(&g),
            Err(PfError::BaseMismatch { left: 2, right: 3 })
        ));
    }

    #[test]
    fn enumeration_counts_match_formula() {
        // (base+1)^base partial functions on a base
        assert_eq!(PartialFunction::enumerate_all(0).len(), 1);
        assert_eq!(PartialFunction::enumerate_all(1).len(), 2);
        assert_eq!(PartialFunction::enumerate_all(2).len(), 9);
        assert_eq!(PartialFunction::enumerate_all(3).len(), 64);
        let all = PartialFunction::enumerate_all(2);
        let mut dedup = all.clone();
        dedup.dedup();
        assert_eq!(dedup.len(), all.len(), "enumeration has no duplicates");
        assert!(all.windows(2).all(|w| w[0] < w[1]), "canonical order");
    }

    #[test]
    fn display_and_parse_round_trip() {
        let f = pf(4, &[(0, 1), (2, 2)]);
        assert_eq!(f.to_string(), "[(0,1),(2,2)]");
        assert_eq!(PartialFunction::parse(4, "[(0,1),(2,2)]").unwrap(), f);
        assert_eq!(
            PartialFunction::parse(4, "[]").unwrap(),
            PartialFunction::empty(4)
        );
        assert!(PartialFunction::parse(2, "[(0,1),(0,0)]").is_err());
    }
}
