//! Extra operations carried across the duality: completely additive,
//! compatibility-preserving operations on an algebra correspond to
//! relations on its dual quotient, and back. Includes the catalog of
//! standard operations on partial functions, with the ones that fail the
//! preconditions kept as rejection fixtures.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use thiserror::Error;

use crate::algebra::{AbstractAlgebra, AtomMasks, StructureError};
use crate::concrete::{ConcreteAlgebra, ConcreteError, ConcreteOperator};
use crate::duality::{counit, g_object, unit, AtomDual, DualityError, SectionAlgebra};
use crate::pfun::{PartialFunction, PfError};
use crate::setq::{QuotientMorphism, SetQuotient};
use crate::util::{for_each_tuple, tuple_index, BitSet};

/// Exhaustive additivity/compatibility sweeps run up to this algebra size;
/// beyond it the atom-level routes take over.
pub const OPERATOR_EXHAUSTIVE_CAP: usize = 12;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AdditivityViolation {
    pub operator: String,
    pub coordinate: usize,
    /// Full argument tuple, with the offending join plugged into the
    /// coordinate.
    pub args: Vec<usize>,
    pub subset: Vec<usize>,
    pub expected: Option<usize>,
    pub got: usize,
}

impl fmt::Display for AdditivityViolation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{} at {:?}, coordinate {}: value {} but the subset {:?} joins pointwise to {:?}",
            self.operator, self.args, self.coordinate, self.got, self.subset, self.expected
        )
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CompatViolation {
    pub operator: String,
    pub xs: Vec<usize>,
    pub ys: Vec<usize>,
}

impl fmt::Display for CompatViolation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{}: compatible argument tuples {:?} and {:?} give incompatible results",
            self.operator, self.xs, self.ys
        )
    }
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum OperatorError {
    #[error("operator {name}: table has {got} entries, expected {want}")]
    TableLength { name: String, got: usize, want: usize },
    #[error("operator {name}: entry {value} is out of range")]
    TableRange { name: String, value: usize },
    #[error("not completely additive: {0}")]
    NotAdditive(AdditivityViolation),
    #[error("not compatibility-preserving: {0}")]
    NotCompatPreserving(CompatViolation),
    #[error("relation {name}: tuple {tuple:?} has arity {got}, expected {want}")]
    RelationArity {
        name: String,
        tuple: Vec<usize>,
        got: usize,
        want: usize,
    },
    #[error("relation {name}: point {point} is outside the carrier")]
    RelationRange { name: String, point: usize },
    #[error(
        "relation {name} lacks the compatibility property: tuples {tuple1:?} and {tuple2:?}"
    )]
    RelationNotCompat {
        name: String,
        tuple1: Vec<usize>,
        tuple2: Vec<usize>,
    },
    #[error("carrier of {carrier} points exceeds the 64-point mask limit")]
    CarrierTooLarge { carrier: usize },
    #[error("structure: {0}")]
    Structure(#[from] StructureError),
    #[error("duality: {0}")]
    Duality(#[from] DualityError),
    #[error("concrete: {0}")]
    Concrete(#[from] ConcreteError),
}

/// A named `arity`-ary operation on an abstract algebra, as a row-major
/// table with `size^arity` entries.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct OperatorTable {
    pub name: String,
    pub arity: usize,
    pub table: Vec<usize>,
}

impl OperatorTable {
    pub fn validate(&self, size: usize) -> Result<(), OperatorError> {
        let want = size.pow(self.arity as u32);
        if self.table.len() != want {
            return Err(OperatorError::TableLength {
                name: self.name.clone(),
                got: self.table.len(),
                want,
            });
        }
        if let Some(&value) = self.table.iter().find(|&&v| v >= size) {
            return Err(OperatorError::TableRange {
                name: self.name.clone(),
                value,
            });
        }
        Ok(())
    }

    pub fn apply(&self, size: usize, args: &[usize]) -> usize {
        debug_assert_eq!(args.len(), self.arity);
        self.table[tuple_index(size, args)]
    }

    /// Tabulates a concrete operator over a closed concrete algebra.
    pub fn from_concrete(
        conc: &ConcreteAlgebra,
        op: &dyn ConcreteOperator,
    ) -> Result<Self, OperatorError> {
        Ok(OperatorTable {
            name: op.name().to_string(),
            arity: op.arity(),
            table: conc.operator_table(op)?,
        })
    }
}

/// A named `arity`-ary relation on a quotient's carrier; for operator
/// duality the last coordinate is the output.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct QuotientRelation {
    pub name: String,
    pub arity: usize,
    pub tuples: BTreeSet<Vec<usize>>,
}

impl QuotientRelation {
    pub fn validate(&self, carrier: usize) -> Result<(), OperatorError> {
        for tuple in &self.tuples {
            if tuple.len() != self.arity {
                return Err(OperatorError::RelationArity {
                    name: self.name.clone(),
                    tuple: tuple.clone(),
                    got: tuple.len(),
                    want: self.arity,
                });
            }
            if let Some(&point) = tuple.iter().find(|&&p| p >= carrier) {
                return Err(OperatorError::RelationRange {
                    name: self.name.clone(),
                    point,
                });
            }
        }
        Ok(())
    }
}

/// An algebra together with extra operations.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SignedAlgebra {
    pub algebra: AbstractAlgebra,
    pub operators: Vec<OperatorTable>,
}

/// A quotient together with relations.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SignedQuotient {
    pub quotient: SetQuotient,
    pub relations: Vec<QuotientRelation>,
}

/// Complete additivity, checked coordinate by coordinate over every subset
/// with a join. Exhaustive; use only on small algebras.
pub fn additivity_violation_exhaustive(
    alg: &AbstractAlgebra,
    op: &OperatorTable,
) -> Result<Option<AdditivityViolation>, OperatorError> {
    op.validate(alg.size())?;
    let n = alg.size();
    let ord = alg.order()?;
    for coordinate in 0..op.arity {
        let hit = for_each_tuple(n, op.arity - 1, |rest| {
            let mut mask = BitSet::new(n);
            let mut args = Vec::with_capacity(op.arity);
            for m in 0u64..(1u64 << n) {
                for i in 0..n {
                    if m >> i & 1 == 1 {
                        mask.insert(i);
                    } else {
                        mask.remove(i);
                    }
                }
                let Some(j) = ord.join_of_mask(&mask) else {
                    continue;
                };
                args.clear();
                args.extend_from_slice(&rest[..coordinate]);
                args.push(j);
                args.extend_from_slice(&rest[coordinate..]);
                let got = op.apply(n, &args);
                let mut image = BitSet::new(n);
                for s in mask.iter_ones() {
                    args[coordinate] = s;
                    image.insert(op.apply(n, &args));
                }
                args[coordinate] = j;
                let expected = ord.join_of_mask(&image);
                if expected != Some(got) {
                    return Some(AdditivityViolation {
                        operator: op.name.clone(),
                        coordinate,
                        args,
                        subset: mask.iter_ones().collect(),
                        expected,
                        got,
                    });
                }
            }
            None
        });
        if hit.is_some() {
            return Ok(hit);
        }
    }
    Ok(None)
}

/// Complete additivity via atoms: in an atomistic valid algebra an
/// operation is completely additive exactly when, in each coordinate, its
/// value is the join of its values at the atoms below that coordinate
/// (zero arguments included, giving zero).
pub fn additivity_violation_reduced(
    alg: &AbstractAlgebra,
    op: &OperatorTable,
) -> Result<Option<AdditivityViolation>, OperatorError> {
    op.validate(alg.size())?;
    let n = alg.size();
    let ord = alg.order()?;
    let masks = AtomMasks::new(alg, &ord)?;
    for coordinate in 0..op.arity {
        let hit = for_each_tuple(n, op.arity - 1, |rest| {
            let mut args = Vec::with_capacity(op.arity);
            for u in 0..n {
                args.clear();
                args.extend_from_slice(&rest[..coordinate]);
                args.push(u);
                args.extend_from_slice(&rest[coordinate..]);
                let got = op.apply(n, &args);
                let atoms_below: Vec<usize> = masks
                    .atom_positions(u)
                    .map(|i| masks.atoms[i])
                    .collect();
                let mut atom_mask = 0u64;
                for &x in &atoms_below {
                    args[coordinate] = x;
                    atom_mask |= masks.mask_of[op.apply(n, &args)];
                }
                args[coordinate] = u;
                let expected = masks.element_of_mask(atom_mask);
                if expected != Some(got) {
                    return Some(AdditivityViolation {
                        operator: op.name.clone(),
                        coordinate,
                        args,
                        subset: atoms_below,
                        expected,
                        got,
                    });
                }
            }
            None
        });
        if hit.is_some() {
            return Ok(hit);
        }
    }
    Ok(None)
}

/// Routes to the exhaustive check on small algebras, the atom route beyond.
pub fn additivity_violation(
    alg: &AbstractAlgebra,
    op: &OperatorTable,
) -> Result<Option<AdditivityViolation>, OperatorError> {
    if alg.size() <= OPERATOR_EXHAUSTIVE_CAP {
        additivity_violation_exhaustive(alg, op)
    } else {
        additivity_violation_reduced(alg, op)
    }
}

/// Compatibility preservation, checked over every pair of coordinatewise
/// compatible argument tuples. Exhaustive; use only on small algebras.
pub fn compat_violation_exhaustive(
    alg: &AbstractAlgebra,
    op: &OperatorTable,
) -> Result<Option<CompatViolation>, OperatorError> {
    op.validate(alg.size())?;
    let n = alg.size();
    let hit = for_each_tuple(n, op.arity, |xs| {
        for_each_tuple(n, op.arity, |ys| {
            if !xs.iter().zip(ys).all(|(&x, &y)| alg.compatible(x, y)) {
                return None;
            }
            if alg.compatible(op.apply(n, xs), op.apply(n, ys)) {
                return None;
            }
            Some(CompatViolation {
                operator: op.name.clone(),
                xs: xs.to_vec(),
                ys: ys.to_vec(),
            })
        })
    });
    Ok(hit)
}

/// Compatibility preservation via atoms: for a completely additive
/// operation on a valid algebra it is enough to test argument tuples of
/// atoms.
pub fn compat_violation_reduced(
    alg: &AbstractAlgebra,
    op: &OperatorTable,
) -> Result<Option<CompatViolation>, OperatorError> {
    op.validate(alg.size())?;
    let n = alg.size();
    let ord = alg.order()?;
    let atoms = ord.atoms();
    let k = atoms.len();
    let hit = for_each_tuple(k, op.arity, |xp| {
        for_each_tuple(k, op.arity, |yp| {
            let xs: Vec<usize> = xp.iter().map(|&i| atoms[i]).collect();
            let ys: Vec<usize> = yp.iter().map(|&i| atoms[i]).collect();
            if !xs.iter().zip(&ys).all(|(&x, &y)| alg.compatible(x, y)) {
                return None;
            }
            if alg.compatible(op.apply(n, &xs), op.apply(n, &ys)) {
                return None;
            }
            Some(CompatViolation {
                operator: op.name.clone(),
                xs,
                ys,
            })
        })
    });
    Ok(hit)
}

/// Routes to the exhaustive check on small algebras, the atom route beyond.
pub fn compat_violation(
    alg: &AbstractAlgebra,
    op: &OperatorTable,
) -> Result<Option<CompatViolation>, OperatorError> {
    if alg.size() <= OPERATOR_EXHAUSTIVE_CAP {
        compat_violation_exhaustive(alg, op)
    } else {
        compat_violation_reduced(alg, op)
    }
}

/// Both preconditions for crossing the duality, first violation wins.
pub fn validate_operator(alg: &AbstractAlgebra, op: &OperatorTable) -> Result<(), OperatorError> {
    if let Some(v) = additivity_violation(alg, op)? {
        return Err(OperatorError::NotAdditive(v));
    }
    if let Some(v) = compat_violation(alg, op)? {
        return Err(OperatorError::NotCompatPreserving(v));
    }
    Ok(())
}

/// The dual relation of an operation: carrier positions
/// `(p₁, …, pₙ, p')` such that the operation applied to the atoms at
/// `p₁…pₙ` bounds the atom at `p'`.
pub fn relation_from_operation(
    dual: &AtomDual,
    alg: &AbstractAlgebra,
    op: &OperatorTable,
) -> Result<QuotientRelation, OperatorError> {
    op.validate(alg.size())?;
    let k = dual.atoms.len();
    let mut tuples = BTreeSet::new();
    for_each_tuple::<()>(k, op.arity, |positions| {
        let args: Vec<usize> = positions.iter().map(|&p| dual.atoms[p]).collect();
        let value = op.apply(alg.size(), &args);
        for (p_out, &atom) in dual.atoms.iter().enumerate() {
            if alg.leq(atom, value) {
                let mut tuple = positions.to_vec();
                tuple.push(p_out);
                tuples.insert(tuple);
            }
        }
        None
    });
    Ok(QuotientRelation {
        name: op.name.clone(),
        arity: op.arity + 1,
        tuples,
    })
}

/// The compatibility property a relation needs to induce an operation on
/// sections: coordinatewise compatible input points force compatible
/// output points. Two carrier points are compatible when they are equal or
/// lie in different classes.
pub fn relation_compat_violation(
    pi: &SetQuotient,
    rel: &QuotientRelation,
) -> Result<Option<(Vec<usize>, Vec<usize>)>, OperatorError> {
    rel.validate(pi.carrier())?;
    let compat = |x: usize, y: usize| x == y || pi.class_of(x) != pi.class_of(y);
    for t1 in &rel.tuples {
        for t2 in &rel.tuples {
            let n = rel.arity - 1;
            if t1[..n].iter().zip(&t2[..n]).all(|(&x, &y)| compat(x, y))
                && !compat(t1[n], t2[n])
            {
                return Ok(Some((t1.clone(), t2.clone())));
            }
        }
    }
    Ok(None)
}

/// The operation induced on a section algebra by a relation with the
/// compatibility property: the output section selects every point some
/// relation tuple reaches from points the argument sections select.
pub fn operation_from_relation(
    sa: &SectionAlgebra,
    rel: &QuotientRelation,
) -> Result<OperatorTable, OperatorError> {
    let pi = &sa.quotient;
    if let Some((tuple1, tuple2)) = relation_compat_violation(pi, rel)? {
        return Err(OperatorError::RelationNotCompat {
            name: rel.name.clone(),
            tuple1,
            tuple2,
        });
    }
    if pi.carrier() > 64 {
        return Err(OperatorError::CarrierTooLarge {
            carrier: pi.carrier(),
        });
    }
    let m = sa.concrete.len();
    let n = rel.arity - 1;
    // selected-point mask of each section, and the reverse lookup
    let selected: Vec<u64> = sa
        .concrete
        .elements()
        .iter()
        .map(|f| {
            let mut mask = 0u64;
            for x in 0..pi.carrier() {
                if f.contains_pair(pi.class_of(x), pi.classes() + x) {
                    mask |= 1 << x;
                }
            }
            mask
        })
        .collect();
    let section_of_mask: BTreeMap<u64, usize> = selected
        .iter()
        .enumerate()
        .map(|(i, &mask)| (mask, i))
        .collect();
    let mut table = Vec::with_capacity(m.pow(n as u32));
    for_each_tuple::<()>(m, n, |gs| {
        let mut out = 0u64;
        for tuple in &rel.tuples {
            if tuple[..n]
                .iter()
                .zip(gs)
                .all(|(&x, &g)| selected[g] >> x & 1 == 1)
            {
                out |= 1 << tuple[n];
            }
        }
        table.push(
            *section_of_mask
                .get(&out)
                .expect("the compatibility property keeps outputs functional"),
        );
        None
    });
    Ok(OperatorTable {
        name: rel.name.clone(),
        arity: n,
        table,
    })
}

/// The dual of a signed algebra: its dual quotient with one relation per
/// operator. Every operator must pass both preconditions.
pub fn f_signed(signed: &SignedAlgebra) -> Result<(AtomDual, SignedQuotient), OperatorError> {
    let dual = crate::duality::f_object(&signed.algebra)?;
    let mut relations = Vec::with_capacity(signed.operators.len());
    for op in &signed.operators {
        validate_operator(&signed.algebra, op)?;
        relations.push(relation_from_operation(&dual, &signed.algebra, op)?);
    }
    let quotient = dual.quotient.clone();
    Ok((dual, SignedQuotient {
        quotient,
        relations,
    }))
}

/// The dual of a signed quotient: its section algebra with one operation
/// per relation. Every relation must have the compatibility property.
pub fn g_signed(signed: &SignedQuotient) -> Result<(SectionAlgebra, SignedAlgebra), OperatorError> {
    let sa = g_object(&signed.quotient)?;
    let mut operators = Vec::with_capacity(signed.relations.len());
    for rel in &signed.relations {
        operators.push(operation_from_relation(&sa, rel)?);
    }
    let algebra = sa.algebra();
    Ok((sa, SignedAlgebra { algebra, operators }))
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ForthViolation {
    pub xs: Vec<usize>,
    pub x: usize,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BackViolation {
    pub x: usize,
    pub ys: Vec<usize>,
}

/// Forth condition for a morphism between signed quotients: a source
/// tuple whose inputs are all defined must have a defined output, and its
/// image must be in the target relation.
pub fn forth_violation(
    phi: &QuotientMorphism,
    rel_source: &QuotientRelation,
    rel_target: &QuotientRelation,
) -> Option<ForthViolation> {
    let n = rel_source.arity - 1;
    for tuple in &rel_source.tuples {
        let Some(image): Option<Vec<usize>> =
            tuple[..n].iter().map(|&x| phi.apply(x)).collect()
        else {
            continue;
        };
        let violation = ForthViolation {
            xs: tuple[..n].to_vec(),
            x: tuple[n],
        };
        let Some(fx) = phi.apply(tuple[n]) else {
            return Some(violation);
        };
        let mut image_tuple = image;
        image_tuple.push(fx);
        if !rel_target.tuples.contains(&image_tuple) {
            return Some(violation);
        }
    }
    None
}

/// Back condition: every target tuple ending at the image of a defined
/// point must be witnessed by a source tuple through defined points.
pub fn back_violation(
    phi: &QuotientMorphism,
    rel_source: &QuotientRelation,
    rel_target: &QuotientRelation,
) -> Option<BackViolation> {
    let n = rel_target.arity - 1;
    for (&x, &fx) in phi.map() {
        for tuple in &rel_target.tuples {
            if tuple[n] != fx {
                continue;
            }
            let witnessed = rel_source.tuples.iter().any(|src| {
                src[n] == x
                    && src[..n]
                        .iter()
                        .zip(&tuple[..n])
                        .all(|(&sx, &ty)| phi.apply(sx) == Some(ty))
            });
            if !witnessed {
                return Some(BackViolation {
                    x,
                    ys: tuple[..n].to_vec(),
                });
            }
        }
    }
    None
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OperatorMismatch {
    pub name: String,
    pub args: Vec<usize>,
    pub left: usize,
    pub right: usize,
}

/// The unit identification of operators: pushing an operation through the
/// dual relation and back onto sections commutes with the unit embedding.
pub fn unit_operator_round_trip(
    signed: &SignedAlgebra,
) -> Result<Option<OperatorMismatch>, OperatorError> {
    let alg = &signed.algebra;
    let w = unit(alg)?;
    let salg = w.sections.algebra();
    for op in &signed.operators {
        let rel = relation_from_operation(&w.dual, alg, op)?;
        let op2 = operation_from_relation(&w.sections, &rel)?;
        let mismatch = for_each_tuple(alg.size(), op.arity, |args| {
            let left = w.hom.apply(op.apply(alg.size(), args));
            let mapped: Vec<usize> = args.iter().map(|&a| w.hom.apply(a)).collect();
            let right = op2.apply(salg.size(), &mapped);
            (left != right).then(|| OperatorMismatch {
                name: op.name.clone(),
                args: args.to_vec(),
                left,
                right,
            })
        });
        if mismatch.is_some() {
            return Ok(mismatch);
        }
    }
    Ok(None)
}

/// The counit identification of relations: inducing an operation on
/// sections and dualizing it back recovers the original relation along the
/// counit bijection.
pub fn counit_relation_round_trip(
    pi: &SetQuotient,
    rel: &QuotientRelation,
) -> Result<bool, OperatorError> {
    let cw = counit(pi)?;
    let op = operation_from_relation(&cw.sections, rel)?;
    let rel2 = relation_from_operation(&cw.dual, &cw.sections.algebra(), &op)?;
    let mut inv = vec![0usize; pi.carrier()];
    for (&x, &p) in cw.morphism.map() {
        inv[p] = x;
    }
    let translated: BTreeSet<Vec<usize>> = rel2
        .tuples
        .iter()
        .map(|t| t.iter().map(|&p| inv[p]).collect())
        .collect();
    Ok(translated == rel.tuples)
}

// ---------------------------------------------------------------------
// the operator catalog
// ---------------------------------------------------------------------

/// Left-to-right composition: `(f ; g)(x) = g(f(x))`.
pub struct Compose;

impl ConcreteOperator for Compose {
    fn name(&self) -> &str {
        "compose"
    }
    fn arity(&self) -> usize {
        2
    }
    fn apply(
        &self,
        base_size: usize,
        args: &[&PartialFunction],
    ) -> Result<PartialFunction, PfError> {
        PartialFunction::new(
            base_size,
            args[0]
                .pairs()
                .filter_map(|(x, y)| args[1].apply(y).map(|z| (x, z))),
        )
    }
}

/// The identity on the domain of `f`.
pub struct DomainOp;

impl ConcreteOperator for DomainOp {
    fn name(&self) -> &str {
        "domain"
    }
    fn arity(&self) -> usize {
        1
    }
    fn apply(
        &self,
        base_size: usize,
        args: &[&PartialFunction],
    ) -> Result<PartialFunction, PfError> {
        PartialFunction::new(base_size, args[0].domain().map(|x| (x, x)))
    }
}

/// The identity on the image of `f`.
pub struct RangeOp;

impl ConcreteOperator for RangeOp {
    fn name(&self) -> &str {
        "range"
    }
    fn arity(&self) -> usize {
        1
    }
    fn apply(
        &self,
        base_size: usize,
        args: &[&PartialFunction],
    ) -> Result<PartialFunction, PfError> {
        PartialFunction::new(base_size, args[0].image().map(|y| (y, y)))
    }
}

/// The identity on the fixed points of `f`.
pub struct Fixset;

impl ConcreteOperator for Fixset {
    fn name(&self) -> &str {
        "fixset"
    }
    fn arity(&self) -> usize {
        1
    }
    fn apply(
        &self,
        base_size: usize,
        args: &[&PartialFunction],
    ) -> Result<PartialFunction, PfError> {
        PartialFunction::new(
            base_size,
            args[0].pairs().filter(|&(x, y)| x == y),
        )
    }
}

/// The constant total identity.
pub struct One;

impl ConcreteOperator for One {
    fn name(&self) -> &str {
        "one"
    }
    fn arity(&self) -> usize {
        0
    }
    fn apply(
        &self,
        base_size: usize,
        _args: &[&PartialFunction],
    ) -> Result<PartialFunction, PfError> {
        Ok(PartialFunction::identity(base_size))
    }
}

/// Range restriction: the pairs of `g` whose value lies in the image of
/// `f`.
pub struct RangeRestrict;

impl ConcreteOperator for RangeRestrict {
    fn name(&self) -> &str {
        "range-restrict"
    }
    fn arity(&self) -> usize {
        2
    }
    fn apply(
        &self,
        base_size: usize,
        args: &[&PartialFunction],
    ) -> Result<PartialFunction, PfError> {
        let image: BTreeSet<usize> = args[0].image().collect();
        PartialFunction::new(
            base_size,
            args[1].pairs().filter(|(_, y)| image.contains(y)),
        )
    }
}

/// Override: `f` wherever defined, `g` elsewhere. Fails complete
/// additivity (it is not even normal in its second argument); kept as a
/// rejection fixture.
pub struct Override;

impl ConcreteOperator for Override {
    fn name(&self) -> &str {
        "override"
    }
    fn arity(&self) -> usize {
        2
    }
    fn apply(
        &self,
        base_size: usize,
        args: &[&PartialFunction],
    ) -> Result<PartialFunction, PfError> {
        let pairs = args[0].pairs().chain(
            args[1]
                .pairs()
                .filter(|&(x, _)| !args[0].is_defined_at(x)),
        );
        PartialFunction::new(base_size, pairs)
    }
}

/// Antidomain: the identity off the domain of `f`. Not normal; kept as a
/// rejection fixture.
pub struct Antidomain;

impl ConcreteOperator for Antidomain {
    fn name(&self) -> &str {
        "antidomain"
    }
    fn arity(&self) -> usize {
        1
    }
    fn apply(
        &self,
        base_size: usize,
        args: &[&PartialFunction],
    ) -> Result<PartialFunction, PfError> {
        PartialFunction::new(
            base_size,
            (0..base_size)
                .filter(|&x| !args[0].is_defined_at(x))
                .map(|x| (x, x)),
        )
    }
}

/// Converse of an injective function; errors on non-injective input.
/// Completely additive where defined, but does not preserve compatibility;
/// kept as a rejection fixture.
pub struct Converse;

impl ConcreteOperator for Converse {
    fn name(&self) -> &str {
        "converse"
    }
    fn arity(&self) -> usize {
        1
    }
    fn apply(
        &self,
        base_size: usize,
        args: &[&PartialFunction],
    ) -> Result<PartialFunction, PfError> {
        let mut seen: BTreeMap<usize, usize> = BTreeMap::new();
        for (x, y) in args[0].pairs() {
            if let Some(&x1) = seen.get(&y) {
                return Err(PfError::NotInjective { y, x1, x2: x });
            }
            seen.insert(y, x);
        }
        PartialFunction::new(base_size, seen.into_iter())
    }
}

/// The operations that satisfy both duality preconditions on every closed
/// algebra.
pub fn positive_catalog() -> Vec<Box<dyn ConcreteOperator>> {
    vec![
        Box::new(Compose),
        Box::new(DomainOp),
        Box::new(RangeOp),
        Box::new(Fixset),
        Box::new(One),
        Box::new(RangeRestrict),
    ]
}
