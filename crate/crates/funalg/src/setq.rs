//! Set quotients — surjections from a finite carrier onto a class set —
//! and their morphisms: partial maps that induce class maps, act
//! injectively on fibers, and cover the target fibers they hit.

use std::collections::BTreeMap;

use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum QuotientError {
    #[error("projection hits class {0} but class {1} is empty")]
    MissingClass(usize, usize),
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum MorphismError {
    #[error("map point ({x},{y}) out of range")]
    PointOutOfRange { x: usize, y: usize },
    #[error("class coherence fails: {x1} and {x2} share a source class but their images do not share a target class")]
    ClassCoherence { x1: usize, x2: usize },
    #[error("fiber injectivity fails: {x1} and {x2} share a source class and an image")]
    FiberInjectivity { x1: usize, x2: usize },
    #[error("fiber surjectivity fails: class pair ({source_class},{target_class}) misses target point {missing}")]
    FiberSurjectivity {
        source_class: usize,
        target_class: usize,
        missing: usize,
    },
    #[error("endpoint mismatch: first morphism ends at a different quotient than the second starts")]
    EndpointMismatch,
}

/// A surjection `π : {0..carrier-1} ↠ {0..classes-1}`.
#[derive(Clone, PartialEq, Eq)]
pub struct SetQuotient {
    projection: Vec<usize>,
    classes: usize,
    fibers: Vec<Vec<usize>>,
}

impl SetQuotient {
    /// Classes are inferred as `max(projection) + 1`; every class below
    /// that must be hit.
    pub fn new(projection: Vec<usize>) -> Result<Self, QuotientError> {
        let classes = projection.iter().copied().max().map_or(0, |m| m + 1);
        let mut fibers = vec![Vec::new(); classes];
        for (x, &c) in projection.iter().enumerate() {
            fibers[c].push(x);
        }
        if let Some(empty) = fibers.iter().position(|f| f.is_empty()) {
            return Err(QuotientError::MissingClass(classes - 1, empty));
        }
        Ok(SetQuotient {
            projection,
            classes,
            fibers,
        })
    }

    pub fn carrier(&self) -> usize {
        self.projection.len()
    }

    pub fn classes(&self) -> usize {
        self.classes
    }

    pub fn class_of(&self, x: usize) -> usize {
        self.projection[x]
    }

    pub fn projection(&self) -> &[usize] {
        &self.projection
    }

    pub fn fiber(&self, class: usize) -> &[usize] {
        &self.fibers[class]
    }

    pub fn fiber_sizes(&self) -> Vec<usize> {
        self.fibers.iter().map(|f| f.len()).collect()
    }

    /// Number of partial sections: `∏ (1 + |fiber|)`.
    pub fn section_count(&self) -> usize {
        self.fibers.iter().map(|f| 1 + f.len()).product()
    }
}

impl std::fmt::Debug for SetQuotient {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(
            f,
            "SetQuotient({} points over {} classes)",
            self.carrier(),
            self.classes
        )
    }
}

/// A validated morphism of set quotients: a partial map on carriers.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct QuotientMorphism {
    source: SetQuotient,
    target: SetQuotient,
    map: BTreeMap<usize, usize>,
}

impl QuotientMorphism {
    pub fn source(&self) -> &SetQuotient {
        &self.source
    }

    pub fn target(&self) -> &SetQuotient {
        &self.target
    }

    pub fn map(&self) -> &BTreeMap<usize, usize> {
        &self.map
    }

    pub fn apply(&self, x: usize) -> Option<usize> {
        self.map.get(&x).copied()
    }

    pub fn identity(q: &SetQuotient) -> Self {
        QuotientMorphism {
            source: q.clone(),
            target: q.clone(),
            map: (0..q.carrier()).map(|x| (x, x)).collect(),
        }
    }

    pub fn is_identity(&self) -> bool {
        self.source == self.target
            && self.map.len() == self.source.carrier()
            && self.map.iter().all(|(&x, &y)| x == y)
    }

    pub fn is_total(&self) -> bool {
        self.map.len() == self.source.carrier()
    }

    pub fn is_bijection(&self) -> bool {
        if !self.is_total() || self.source.carrier() != self.target.carrier() {
            return false;
        }
        let mut hit = vec![false; self.target.carrier()];
        for &y in self.map.values() {
            if hit[y] {
                return false;
            }
            hit[y] = true;
        }
        true
    }

    /// The induced partial map on classes.
    pub fn induced_class_map(&self) -> BTreeMap<usize, usize> {
        self.map
            .iter()
            .map(|(&x, &y)| (self.source.class_of(x), self.target.class_of(y)))
            .collect()
    }
}

/// Validates the three morphism conditions, returning the first violation
/// in a canonical order: class coherence, fiber injectivity, fiber
/// surjectivity.
pub fn validate_morphism(
    source: &SetQuotient,
    target: &SetQuotient,
    map: impl IntoIterator<Item = (usize, usize)>,
) -> Result<QuotientMorphism, MorphismError> {
    let map: BTreeMap<usize, usize> = map.into_iter().collect();
    for (&x, &y) in &map {
        if x >= source.carrier() || y >= target.carrier() {
            return Err(MorphismError::PointOutOfRange { x, y });
        }
    }
    let defined: Vec<usize> = map.keys().copied().collect();
    for (i, &x1) in defined.iter().enumerate() {
        for &x2 in &defined[i + 1..] {
            if source.class_of(x1) != source.class_of(x2) {
                continue;
            }
            if target.class_of(map[&x1]) != target.class_of(map[&x2]) {
                return Err(MorphismError::ClassCoherence { x1, x2 });
            }
            if map[&x1] == map[&x2] {
                return Err(MorphismError::FiberInjectivity { x1, x2 });
            }
        }
    }
    // fiber surjectivity: each hit target fiber is hit entirely
    let mut seen: BTreeMap<(usize, usize), Vec<usize>> = BTreeMap::new();
    for (&x, &y) in &map {
        seen.entry((source.class_of(x), target.class_of(y)))
            .or_default()
            .push(y);
    }
    for ((source_class, target_class), hit) in seen {
        for &y in target.fiber(target_class) {
            if !hit.contains(&y) {
                return Err(MorphismError::FiberSurjectivity {
                    source_class,
                    target_class,
                    missing: y,
                });
            }
        }
    }
    Ok(QuotientMorphism {
        source: source.clone(),
        target: target.clone(),
        map,
    })
}

/// Composite `after ∘ first`; the endpoints must agree. The composite of
/// valid morphisms is valid again; this is re-checked.
pub fn compose_morphisms(
    after: &QuotientMorphism,
    first: &QuotientMorphism,
) -> Result<QuotientMorphism, MorphismError> {
    if first.target != after.source {
        return Err(MorphismError::EndpointMismatch);
    }
    let map = first
        .map
        .iter()
        .filter_map(|(&x, &y)| after.apply(y).map(|z| (x, z)));
    let composed = validate_morphism(&first.source, &after.target, map)
        .expect("composite of valid morphisms is valid");
    Ok(composed)
}

/// An isomorphism witness between quotients: a carrier bijection and the
/// class bijection it induces.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct QuotientIso {
    pub point_map: Vec<usize>,
    pub class_map: Vec<usize>,
}

/// Quotients are isomorphic exactly when their fiber-size multisets agree;
/// the witness maps fibers in sorted-size order.
pub fn quotients_isomorphic(a: &SetQuotient, b: &SetQuotient) -> Option<QuotientIso> {
    if a.carrier() != b.carrier() || a.classes() != b.classes() {
        return None;
    }
    let key = |q: &SetQuotient| {
        let mut sizes: Vec<(usize, usize)> = q
            .fiber_sizes()
            .into_iter()
            .enumerate()
            .map(|(c, s)| (s, c))
            .collect();
        sizes.sort();
        sizes
    };
    let ka = key(a);
    let kb = key(b);
    if ka.iter().map(|&(s, _)| s).ne(kb.iter().map(|&(s, _)| s)) {
        return None;
    }
    let mut point_map = vec![0usize; a.carrier()];
    let mut class_map = vec![0usize; a.classes()];
    for (&(_, ca), &(_, cb)) in ka.iter().zip(&kb) {
        class_map[ca] = cb;
        for (&xa, &xb) in a.fiber(ca).iter().zip(b.fiber(cb)) {
            point_map[xa] = xb;
        }
    }
    debug_assert!((0..a.carrier())
        .all(|x| b.class_of(point_map[x]) == class_map[a.class_of(x)]));
    Some(QuotientIso {
        point_map,
        class_map,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(projection: &[usize]) -> SetQuotient {
        SetQuotient::new(projection.to_vec()).unwrap()
    }

    #[test]
    fn quotient_basics() {
        let pi = q(&[0, 0, 1]);
        assert_eq!(pi.carrier(), 3);
        assert_eq!(pi.classes(), 2);
        assert_eq!(pi.fiber(0), &[0, 1]);
        assert_eq!(pi.section_count(), 6);
        // degenerate empty quotient
        let empty = q(&[]);
        assert_eq!(empty.classes(), 0);
        assert_eq!(empty.section_count(), 1);
    }

    #[test]
    fn missing_class_is_rejected() {
        let err = SetQuotient::new(vec![0, 2]).unwrap_err();
        assert_eq!(err, QuotientError::MissingClass(2, 1));
    }

    #[test]
    fn class_coherence_violation_is_caught() {
        let pi = q(&[0, 0]);
        let rho = q(&[0, 1]);
        let err = validate_morphism(&pi, &rho, [(0, 0), (1, 1)]).unwrap_err();
        assert_eq!(err, MorphismError::ClassCoherence { x1: 0, x2: 1 });
    }

    #[test]
    fn fiber_injectivity_violation_is_caught() {
        let pi = q(&[0, 0]);
        let rho = q(&[0]);
        let err = validate_morphism(&pi, &rho, [(0, 0), (1, 0)]).unwrap_err();
        assert_eq!(err, MorphismError::FiberInjectivity { x1: 0, x2: 1 });
    }

    #[test]
    fn fiber_surjectivity_violation_is_caught() {
        let pi = q(&[0]);
        let rho = q(&[0, 0]);
        let err = validate_morphism(&pi, &rho, [(0, 0)]).unwrap_err();
        assert_eq!(
            err,
            MorphismError::FiberSurjectivity {
                source_class: 0,
                target_class: 0,
                missing: 1
            }
        );
    }

    #[test]
    fn partial_maps_within_fibers_are_fine() {
        // defined on only part of a source fiber, covering the whole
        // target fiber
        let pi = q(&[0, 0]);
        let rho = q(&[0]);
        let m = validate_morphism(&pi, &rho, [(0, 0)]).unwrap();
        assert_eq!(m.induced_class_map(), BTreeMap::from([(0, 0)]));
        // and the empty map is always a morphism
        validate_morphism(&pi, &rho, []).unwrap();
    }

    #[test]
    fn composition_works_and_checks_endpoints() {
        let pi = q(&[0, 0, 1]);
        let rho = q(&[0, 1]);
        let tau = q(&[0]);
        let phi = validate_morphism(&pi, &rho, [(0, 0), (2, 1)]).unwrap();
        let psi = validate_morphism(&rho, &tau, [(0, 0)]).unwrap();
        let comp = compose_morphisms(&psi, &phi).unwrap();
        assert_eq!(comp.map(), &BTreeMap::from([(0, 0)]));
        assert!(matches!(
            compose_morphisms(&phi, &psi),
            Err(MorphismError::EndpointMismatch)
        ));
        // identities are neutral
        let id_pi = QuotientMorphism::identity(&pi);
        let id_rho = QuotientMorphism::identity(&rho);
        assert_eq!(compose_morphisms(&phi, &id_pi).unwrap(), phi);
        assert_eq!(compose_morphisms(&id_rho, &phi).unwrap(), phi);
    }

    #[test]
    fn isomorphism_is_decided_by_fiber_multisets() {
        let a = q(&[0, 0, 1]);
        let b = q(&[0, 1, 1]);
        let iso = quotients_isomorphic(&a, &b).unwrap();
        // fibers of size 2 and 1 match up
        assert_eq!(iso.class_map, vec![1, 0]);
        let c = q(&[0, 1, 2]);
        assert!(quotients_isomorphic(&a, &c).is_none());
        let d = q(&[0, 0, 0]);
        assert!(quotients_isomorphic(&a, &d).is_none());
    }

    #[test]
    fn singleton_carriers_have_a_unique_total_morphism() {
        let pi = q(&[0]);
        let rho = q(&[0]);
        let m = validate_morphism(&pi, &rho, [(0, 0)]).unwrap();
        assert!(m.is_bijection());
    }
}
