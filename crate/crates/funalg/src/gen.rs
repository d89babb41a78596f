//! Seeded random instance generators. Every generator draws from a
//! caller-supplied ChaCha stream, so identical configuration yields
//! identical instances; invalid raw samples are repaired or retried until
//! the validating constructors accept them.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::compat_poset::CompatibilityPoset;
use crate::concrete::{ConcreteAlgebra, ConcreteError, ConcreteOperator};
use crate::duality::{g_object_with_cap, SectionAlgebra};
use crate::operators::{
    relation_compat_violation, Compose, DomainOp, Fixset, One, OperatorTable, QuotientRelation,
    RangeRestrict,
};
use crate::pfun::PartialFunction;
use crate::setq::{validate_morphism, QuotientMorphism, SetQuotient};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GeneratorConfig {
    pub seed: u64,
    /// Largest carrier for generated quotients.
    pub max_carrier: usize,
    /// Element cap for generated closed algebras.
    pub max_elements: usize,
}

impl GeneratorConfig {
    pub fn with_seed(seed: u64) -> Self {
        GeneratorConfig {
            seed,
            max_carrier: 6,
            max_elements: 64,
        }
    }
}

/// One independent random stream of a configuration. Distinct stream
/// numbers never collide, so suites can draw per-test streams from one
/// seed.
pub fn stream(config: &GeneratorConfig, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    rng.set_stream(stream);
    rng
}

/// A random surjection: composition-style blocks over a shuffled carrier.
pub fn random_quotient(rng: &mut ChaCha8Rng, max_carrier: usize) -> SetQuotient {
    let carrier = rng.gen_range(1..=max_carrier.max(1));
    let mut blocks = Vec::new();
    let mut class = 0usize;
    for position in 0..carrier {
        blocks.push(class);
        if position + 1 < carrier && rng.gen_bool(0.5) {
            class += 1;
        }
    }
    let mut points: Vec<usize> = (0..carrier).collect();
    points.shuffle(rng);
    let mut projection = vec![0usize; carrier];
    for (position, &point) in points.iter().enumerate() {
        projection[point] = blocks[position];
    }
    SetQuotient::new(projection).expect("blockwise projections hit every class")
}

pub fn random_partial_function(
    rng: &mut ChaCha8Rng,
    base: usize,
    density: f64,
) -> PartialFunction {
    let mut pairs = Vec::new();
    for x in 0..base {
        if rng.gen_bool(density) {
            pairs.push((x, rng.gen_range(0..base)));
        }
    }
    PartialFunction::new(base, pairs).expect("one value per point")
}

fn closure_attempts<T>(
    rng: &mut ChaCha8Rng,
    what: &str,
    mut attempt: impl FnMut(&mut ChaCha8Rng, f64) -> Result<T, ConcreteError>,
) -> T {
    // thin the seeds out as attempts fail, so a cap-bound closure exists
    for try_number in 0..64 {
        let density = 0.4 / (1.0 + try_number as f64 / 8.0);
        match attempt(rng, density) {
            Ok(value) => return value,
            Err(ConcreteError::ClosureCapExceeded { .. }) => continue,
            Err(e) => panic!("unexpected generation failure: {e}"),
        }
    }
    panic!("no {what} fit the element cap in 64 attempts");
}

/// A random concrete algebra: sparse seed functions closed under the two
/// basic operations, retried until the closure fits the cap.
pub fn random_concrete_algebra(
    rng: &mut ChaCha8Rng,
    max_base: usize,
    cap: usize,
) -> ConcreteAlgebra {
    closure_attempts(rng, "concrete algebra", |rng, density| {
        let base = rng.gen_range(1..=max_base.max(1));
        let seeds: Vec<PartialFunction> = (0..rng.gen_range(0..=2))
            .map(|_| random_partial_function(rng, base, density))
            .collect();
        ConcreteAlgebra::close_under_ops(base, seeds, &[], cap)
    })
}

/// A random closed subalgebra of the section algebra of `pi`: a few random
/// sections closed under the two basic operations.
pub fn random_section_subalgebra(
    rng: &mut ChaCha8Rng,
    sections: &SectionAlgebra,
    cap: usize,
) -> ConcreteAlgebra {
    closure_attempts(rng, "section subalgebra", |rng, _| {
        let count = rng.gen_range(0..=3.min(sections.concrete.len()));
        let seeds: Vec<PartialFunction> = (0..count)
            .map(|_| {
                sections.concrete.elements()[rng.gen_range(0..sections.concrete.len())].clone()
            })
            .collect();
        ConcreteAlgebra::close_under_ops(sections.concrete.base_size(), seeds, &[], cap)
    })
}

/// A random section algebra over a random quotient, capped by section
/// count.
pub fn random_section_algebra(
    rng: &mut ChaCha8Rng,
    max_carrier: usize,
    section_cap: usize,
) -> SectionAlgebra {
    loop {
        let pi = random_quotient(rng, max_carrier);
        if let Ok(sa) = g_object_with_cap(&pi, section_cap) {
            return sa;
        }
    }
}

/// A random morphism out of `source`, valid by construction: some source
/// classes are picked, each maps a random subset of its fiber bijectively
/// onto a fresh target fiber, and unreached extra classes pad the target.
pub fn random_morphism(rng: &mut ChaCha8Rng, source: &SetQuotient) -> QuotientMorphism {
    let chosen: Vec<usize> = (0..source.classes())
        .filter(|_| rng.gen_bool(0.7))
        .collect();
    let mut target_projection = Vec::new();
    let mut map = Vec::new();
    let mut next_class = 0usize;
    for &c in &chosen {
        let fiber = source.fiber(c);
        let image_size = rng.gen_range(1..=fiber.len());
        let mut picked = fiber.to_vec();
        picked.shuffle(rng);
        picked.truncate(image_size);
        for &x in &picked {
            map.push((x, target_projection.len()));
            target_projection.push(next_class);
        }
        next_class += 1;
    }
    // pad with classes outside the image
    for _ in 0..rng.gen_range(0..=1) {
        for _ in 0..rng.gen_range(1..=2) {
            target_projection.push(next_class);
        }
        next_class += 1;
    }
    let target = SetQuotient::new(target_projection).expect("every class gets a point");
    validate_morphism(source, &target, map).expect("constructed fiber bijections are valid")
}

/// A random relation with the compatibility property: sampled tuples,
/// repaired by dropping the later tuple of each violating pair.
pub fn random_relation(
    rng: &mut ChaCha8Rng,
    pi: &SetQuotient,
    arity: usize,
    name: &str,
) -> QuotientRelation {
    let mut relation = QuotientRelation {
        name: name.to_string(),
        arity,
        tuples: Default::default(),
    };
    if pi.carrier() > 0 {
        for _ in 0..rng.gen_range(0..=12) {
            let tuple: Vec<usize> = (0..arity)
                .map(|_| rng.gen_range(0..pi.carrier()))
                .collect();
            relation.tuples.insert(tuple);
        }
    }
    while let Some((_, tuple2)) = relation_compat_violation(pi, &relation)
        .expect("sampled tuples are in range")
    {
        relation.tuples.remove(&tuple2);
    }
    relation
}

/// A random poset with a random valid compatibility relation: edges sampled
/// upward (so the order is antisymmetric), compatibility repaired downward.
pub fn random_poset(rng: &mut ChaCha8Rng, size: usize) -> CompatibilityPoset {
    let mut le_pairs = Vec::new();
    for p in 0..size {
        for q in p + 1..size {
            if rng.gen_bool(0.35) {
                le_pairs.push((p, q));
            }
        }
    }
    // a throwaway all-compatible poset supplies the closed order
    let mut all = Vec::new();
    for p in 0..size {
        for q in p + 1..size {
            all.push((p, q));
        }
    }
    let order = CompatibilityPoset::new(size, &le_pairs, &all)
        .expect("upward edges are antisymmetric and total compatibility is downward closed");
    let mut compat_pairs: Vec<(usize, usize)> = all
        .into_iter()
        .filter(|_| rng.gen_bool(0.5))
        .collect();
    CompatibilityPoset::downward_close_compat(size, |a, b| order.leq(a, b), &mut compat_pairs);
    CompatibilityPoset::new(size, &le_pairs, &compat_pairs)
        .expect("downward-closed pairs validate")
}

/// The operations random operator algebras are closed under.
pub fn closure_catalog() -> Vec<Box<dyn ConcreteOperator>> {
    vec![
        Box::new(Compose),
        Box::new(DomainOp),
        Box::new(Fixset),
        Box::new(One),
        Box::new(RangeRestrict),
    ]
}

/// A random concrete algebra closed under the closure catalog, with the
/// catalog's operation tables.
pub fn random_operator_algebra(
    rng: &mut ChaCha8Rng,
    max_base: usize,
    cap: usize,
) -> (ConcreteAlgebra, Vec<OperatorTable>) {
    let catalog = closure_catalog();
    let refs: Vec<&dyn ConcreteOperator> = catalog.iter().map(|b| b.as_ref()).collect();
    let conc = closure_attempts(rng, "operator algebra", |rng, density| {
        let base = rng.gen_range(1..=max_base.max(1));
        let seeds: Vec<PartialFunction> = (0..rng.gen_range(0..=2))
            .map(|_| random_partial_function(rng, base, density))
            .collect();
        ConcreteAlgebra::close_under_ops(base, seeds, &refs, cap)
    });
    let tables = catalog
        .iter()
        .map(|op| {
            OperatorTable::from_concrete(&conc, op.as_ref())
                .expect("the algebra is closed under its own catalog")
        })
        .collect();
    (conc, tables)
}
