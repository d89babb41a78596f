//! Finite-model workbench for algebras of partial functions under relative
//! complement (`-`) and domain restriction (`▷`), their set-quotient duals,
//! compatible completions, and additive operators.
//!
//! The library is organized bottom-up:
//!
//! * [`pfun`] — partial functions on a finite base and the two operations.
//! * [`concrete`] — concrete algebras: finite sets of partial functions
//!   closed under the operations, with derived index tables.
//! * [`algebra`] — abstract algebras given by operation tables: axioms,
//!   order, atoms, domain classes, completeness predicates.
//! * [`compat_poset`] — posets with a compatibility relation and their
//!   embedding into partial functions.
//! * [`setq`] — set quotients (surjections onto a class set) and their
//!   morphisms.
//! * [`duality`] — the contravariant functors between algebras and set
//!   quotients, the unit and counit, triangle identities, naturality.
//! * [`completion`] — compatible completions, the dense-embedding lemma,
//!   uniqueness up to isomorphism, smallest/largest extension properties.
//! * [`operators`] — additive operators on algebras, dual relations on
//!   quotients, forth/back conditions, and the concrete operator catalog.
//! * [`oracle`] — independent brute-force checks: representation search,
//!   section enumeration, algebra isomorphism.
//! * [`files`] — plain-text file formats for algebras, quotients,
//!   morphisms, and posets.
//! * [`gen`] — seeded random instance generators.
//! * [`suites`] — the named check suites exposed by the CLI driver.

pub mod algebra;
pub mod compat_poset;
pub mod completion;
pub mod concrete;
pub mod duality;
pub mod files;
pub mod gen;
pub mod operators;
pub mod oracle;
pub mod pfun;
pub mod setq;
pub mod suites;
pub mod util;
