//! Posets carrying a compatibility relation, and their canonical embedding
//! into partial functions: order becomes pair inclusion, compatibility
//! becomes agreement on shared domain points.

use thiserror::Error;

use crate::pfun::PartialFunction;
use crate::util::BitSet;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum PosetError {
    #[error("pair ({0},{1}) out of range for size {2}")]
    PairOutOfRange(usize, usize, usize),
    #[error("order is not antisymmetric: {0} and {1} are below each other")]
    NotAntisymmetric(usize, usize),
    #[error(
        "compatibility is not downward closed: {p} ⌣ {q} but {p_down} ≤ {p}, {q_down} ≤ {q} are not compatible"
    )]
    NotDownwardClosed {
        p: usize,
        q: usize,
        p_down: usize,
        q_down: usize,
    },
}

/// A finite poset with a reflexive, symmetric, downward-closed
/// compatibility relation.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CompatibilityPoset {
    size: usize,
    below: Vec<BitSet>,
    compat: Vec<BitSet>,
}

impl CompatibilityPoset {
    /// Builds from generating pairs. The order is the reflexive-transitive
    /// closure of `leq_pairs` and must be antisymmetric; the compatibility
    /// relation is the reflexive-symmetric closure of `compat_pairs` and
    /// must already be downward closed.
    pub fn new(
        size: usize,
        leq_pairs: &[(usize, usize)],
        compat_pairs: &[(usize, usize)],
    ) -> Result<Self, PosetError> {
        for &(a, b) in leq_pairs.iter().chain(compat_pairs) {
            if a >= size || b >= size {
                return Err(PosetError::PairOutOfRange(a, b, size));
            }
        }
        let mut below = vec![BitSet::new(size); size];
        for p in 0..size {
            below[p].insert(p);
        }
        for &(a, b) in leq_pairs {
            below[b].insert(a);
        }
        // transitive closure, then antisymmetry
        loop {
            let mut changed = false;
            for b in 0..size {
                for a in below[b].clone().iter_ones() {
                    for c in below[a].clone().iter_ones() {
                        if !below[b].contains(c) {
                            below[b].insert(c);
                            changed = true;
                        }
                    }
                }
            }
            if !changed {
                break;
            }
        }
        for a in 0..size {
            for b in a + 1..size {
                if below[a].contains(b) && below[b].contains(a) {
                    return Err(PosetError::NotAntisymmetric(a, b));
                }
            }
        }
        let mut compat = vec![BitSet::new(size); size];
        for p in 0..size {
            compat[p].insert(p);
        }
        for &(a, b) in compat_pairs {
            compat[a].insert(b);
            compat[b].insert(a);
        }
        for p in 0..size {
            for q in compat[p].clone().iter_ones() {
                for p_down in below[p].iter_ones() {
                    for q_down in below[q].iter_ones() {
                        if !compat[p_down].contains(q_down) {
                            return Err(PosetError::NotDownwardClosed {
                                p,
                                q,
                                p_down,
                                q_down,
                            });
                        }
                    }
                }
            }
        }
        Ok(CompatibilityPoset {
            size,
            below,
            compat,
        })
    }

    pub fn size(&self) -> usize {
        self.size
    }

    pub fn leq(&self, a: usize, b: usize) -> bool {
        self.below[b].contains(a)
    }

    pub fn compatible(&self, a: usize, b: usize) -> bool {
        self.compat[a].contains(b)
    }

    /// Closes a symmetric relation downward over a given order; used by
    /// generators to repair sampled relations before the validating
    /// constructor sees them.
    pub fn downward_close_compat(
        size: usize,
        leq: impl Fn(usize, usize) -> bool,
        pairs: &mut Vec<(usize, usize)>,
    ) {
        let mut compat = vec![BitSet::new(size); size];
        for p in 0..size {
            compat[p].insert(p);
        }
        for &(a, b) in pairs.iter() {
            compat[a].insert(b);
            compat[b].insert(a);
        }
        loop {
            let mut changed = false;
            for p in 0..size {
                for q in compat[p].clone().iter_ones() {
                    for pd in (0..size).filter(|&pd| leq(pd, p)) {
                        for qd in (0..size).filter(|&qd| leq(qd, q)) {
                            if !compat[pd].contains(qd) {
                                compat[pd].insert(qd);
                                compat[qd].insert(pd);
                                changed = true;
                            }
                        }
                    }
                }
            }
            if !changed {
                break;
            }
        }
        pairs.clear();
        for p in 0..size {
            for q in compat[p].iter_ones() {
                if p <= q {
                    pairs.push((p, q));
                }
            }
        }
    }
}

/// The embedding of a compatibility poset into partial functions. Domain
/// points are the singletons `{p}` (encoded as `p`) followed by the
/// incompatible unordered pairs `{p,q}` in sorted order.
#[derive(Clone, Debug)]
pub struct PosetEmbedding {
    pub base_size: usize,
    /// the incompatible pairs `(p, q)`, `p < q`, in base-point order after
    /// the singletons
    pub pair_points: Vec<(usize, usize)>,
    pub images: Vec<PartialFunction>,
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum EmbedViolation {
    #[error("images of {0} and {1} coincide")]
    NotInjective(usize, usize),
    #[error("order not preserved and reflected at ({0},{1})")]
    OrderMismatch(usize, usize),
    #[error("compatibility not preserved and reflected at ({0},{1})")]
    CompatMismatch(usize, usize),
}

/// Embeds a poset with compatibility into partial functions:
/// `θ(p) = {({p'},p') : p' ≤ p} ∪ {({p',q},p') : p' ≤ p, p' incompatible q}`.
pub fn embed(poset: &CompatibilityPoset) -> PosetEmbedding {
    let n = poset.size();
    let mut pair_points = Vec::new();
    for p in 0..n {
        for q in p + 1..n {
            if !poset.compatible(p, q) {
                pair_points.push((p, q));
            }
        }
    }
    let pair_index = |p: usize, q: usize| -> usize {
        let key = (p.min(q), p.max(q));
        n + pair_points
            .binary_search(&key)
            .expect("incompatible pair is indexed")
    };
    let base_size = n + pair_points.len();
    let images = (0..n)
        .map(|p| {
            let mut pairs = Vec::new();
            for p_down in 0..n {
                if !poset.leq(p_down, p) {
                    continue;
                }
                pairs.push((p_down, p_down));
                for q in 0..n {
                    if !poset.compatible(p_down, q) {
                        pairs.push((pair_index(p_down, q), p_down));
                    }
                }
            }
            PartialFunction::new(base_size, pairs)
                .expect("downward closure keeps the image functional")
        })
        .collect();
    PosetEmbedding {
        base_size,
        pair_points,
        images,
    }
}

/// Checks that an embedding is injective and preserves and reflects both
/// the order (as pair inclusion) and compatibility (as agreement).
pub fn verify_embedding(
    poset: &CompatibilityPoset,
    emb: &PosetEmbedding,
) -> Result<(), EmbedViolation> {
    let n = poset.size();
    for p in 0..n {
        for q in 0..n {
            if p != q && emb.images[p] == emb.images[q] {
                return Err(EmbedViolation::NotInjective(p.min(q), p.max(q)));
            }
            if poset.leq(p, q) != emb.images[p].subset_of(&emb.images[q]) {
                return Err(EmbedViolation::OrderMismatch(p, q));
            }
            let images_compatible = emb.images[p]
                .compatible(&emb.images[q])
                .expect("images share a base");
            if poset.compatible(p, q) != images_compatible {
                return Err(EmbedViolation::CompatMismatch(p, q));
            }
        }
    }
    Ok(())
}

/// All partial orders on `size` labeled points, as generating pair lists.
/// Intended for exhaustive small-size sweeps.
pub fn enumerate_posets(size: usize) -> Vec<Vec<(usize, usize)>> {
    let off_diagonal: Vec<(usize, usize)> = (0..size)
        .flat_map(|a| (0..size).map(move |b| (a, b)))
        .filter(|&(a, b)| a != b)
        .collect();
    let m = off_diagonal.len();
    let mut out = Vec::new();
    for mask in 0u64..(1 << m) {
        let pairs: Vec<(usize, usize)> = (0..m)
            .filter(|&i| mask & (1 << i) != 0)
            .map(|i| off_diagonal[i])
            .collect();
        let holds = |a: usize, b: usize| a == b || pairs.contains(&(a, b));
        let antisymmetric = (0..size)
            .all(|a| (0..size).all(|b| a == b || !holds(a, b) || !holds(b, a)));
        let transitive = (0..size).all(|a| {
            (0..size).all(|b| {
                (0..size).all(|c| !holds(a, b) || !holds(b, c) || holds(a, c))
            })
        });
        if antisymmetric && transitive {
            out.push(pairs);
        }
    }
    out
}

/// All valid compatibility relations on a given poset, as generating pair
/// lists of off-diagonal pairs. Exhaustive, so only for small sizes.
pub fn enumerate_compat_relations(
    size: usize,
    leq_pairs: &[(usize, usize)],
) -> Vec<Vec<(usize, usize)>> {
    let unordered: Vec<(usize, usize)> = (0..size)
        .flat_map(|a| (a + 1..size).map(move |b| (a, b)))
        .collect();
    let m = unordered.len();
    let mut out = Vec::new();
    for mask in 0u64..(1 << m) {
        let pairs: Vec<(usize, usize)> = (0..m)
            .filter(|&i| mask & (1 << i) != 0)
            .map(|i| unordered[i])
            .collect();
        if CompatibilityPoset::new(size, leq_pairs, &pairs).is_ok() {
            out.push(pairs);
        }
    }
    out
}
