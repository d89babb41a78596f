//! Randomized identities at the level of raw partial functions and small
//! concrete closures: the five defining equations read concretely, the
//! compatibility characterizations, and the concrete readings of the two
//! orders.

use proptest::prelude::*;

use funalg::concrete::ConcreteAlgebra;
use funalg::duality::g_object;
use funalg::pfun::PartialFunction;
use funalg::setq::SetQuotient;

const BASE: usize = 4;

fn arb_pf() -> impl Strategy<Value = PartialFunction> {
    proptest::collection::btree_map(0..BASE, 0..BASE, 0..=BASE)
        .prop_map(|m| PartialFunction::new(BASE, m).expect("maps are functional"))
}

proptest! {
    #[test]
    fn difference_and_restriction_shrink(f in arb_pf(), g in arb_pf()) {
        prop_assert!(f.relative_complement(&g).unwrap().subset_of(&f));
        prop_assert!(f.domain_restriction(&g).unwrap().subset_of(&g));
    }

    #[test]
    fn difference_undoes_its_own_complement(f in arb_pf(), g in arb_pf()) {
        let g_minus_f = g.relative_complement(&f).unwrap();
        prop_assert_eq!(f.relative_complement(&g_minus_f).unwrap(), f);
    }

    #[test]
    fn difference_arguments_commute(f in arb_pf(), g in arb_pf(), h in arb_pf()) {
        let left = f
            .relative_complement(&g).unwrap()
            .relative_complement(&h).unwrap();
        let right = f
            .relative_complement(&h).unwrap()
            .relative_complement(&g).unwrap();
        prop_assert_eq!(left, right);
    }

    #[test]
    fn restriction_distributes_over_meet(f in arb_pf(), g in arb_pf(), h in arb_pf()) {
        let left = f
            .domain_restriction(&h).unwrap()
            .meet(&g.domain_restriction(&h).unwrap()).unwrap();
        let right = f
            .domain_restriction(&g).unwrap()
            .domain_restriction(&h).unwrap();
        prop_assert_eq!(left, right);
    }

    #[test]
    fn meets_restrict_to_themselves(f in arb_pf(), g in arb_pf()) {
        let m = f.meet(&g).unwrap();
        prop_assert_eq!(m.domain_restriction(&f).unwrap(), m.clone());
        prop_assert_eq!(m.domain_restriction(&g).unwrap(), m);
    }

    #[test]
    fn compatibility_is_union_functionality(f in arb_pf(), g in arb_pf()) {
        prop_assert_eq!(f.compatible(&g).unwrap(), f.union(&g).is_ok());
    }

    #[test]
    fn closures_satisfy_the_equations_and_read_back_concretely(
        seeds in proptest::collection::vec(arb_pf(), 1..3),
    ) {
        let conc = ConcreteAlgebra::close_under_ops(BASE, seeds.clone(), &[], 4096).unwrap();
        // difference and restriction only shrink, so the closure never
        // escapes the subfunctions of its seeds
        for e in conc.elements() {
            prop_assert!(seeds.iter().any(|s| e.subset_of(s)));
        }
        let a = conc.to_abstract();
        prop_assert!(a.check_axioms().is_pass());
        for i in 0..conc.len() {
            for j in 0..conc.len() {
                let fi = &conc.elements()[i];
                let fj = &conc.elements()[j];
                prop_assert_eq!(a.leq(i, j), fi.subset_of(fj));
                prop_assert_eq!(a.domain_leq(i, j), fi.domain().all(|x| fj.is_defined_at(x)));
            }
        }
    }

    #[test]
    fn section_algebra_size_is_the_fiber_product(
        labels in proptest::collection::vec(0..3usize, 1..6),
    ) {
        // dense relabeling turns an arbitrary label vector into a projection
        let mut next = 0;
        let mut seen = std::collections::BTreeMap::new();
        let projection: Vec<usize> = labels
            .iter()
            .map(|&l| {
                *seen.entry(l).or_insert_with(|| {
                    let class = next;
                    next += 1;
                    class
                })
            })
            .collect();
        let pi = SetQuotient::new(projection).unwrap();
        let expected: usize = pi.fiber_sizes().iter().map(|&s| s + 1).product();
        let sections = g_object(&pi).unwrap();
        prop_assert_eq!(sections.concrete.len(), expected);
    }
}
