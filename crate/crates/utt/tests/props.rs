//! Property tests for the proposition lattice and the frontier.

use proptest::prelude::*;

use utt::prop::{Atom, Frontier, Prop};

fn arb_prop() -> impl Strategy<Value = Prop> {
    proptest::collection::btree_set(0u32..16, 0..6)
        .prop_map(|s| Prop::from_atoms(s.into_iter().map(Atom)))
}

proptest! {
    #[test]
    fn meet_commutes(p in arb_prop(), q in arb_prop()) {
        prop_assert_eq!(p.meet(&q), q.meet(&p));
    }

    #[test]
    fn meet_associates(p in arb_prop(), q in arb_prop(), r in arb_prop()) {
        prop_assert_eq!(p.meet(&q).meet(&r), p.meet(&q.meet(&r)));
    }

    #[test]
    fn meet_idempotent_with_unit(p in arb_prop()) {
        prop_assert_eq!(p.meet(&p), p.clone());
        prop_assert_eq!(p.meet(&Prop::top()), p.clone());
        prop_assert!(Prop::top().entails(&Prop::top()));
    }

    #[test]
    fn entailment_is_meet_absorption(p in arb_prop(), q in arb_prop()) {
        prop_assert_eq!(p.entails(&q), p.meet(&q) == p);
        prop_assert!(p.meet(&q).entails(&p));
    }

    #[test]
    fn entailment_is_a_preorder(p in arb_prop(), q in arb_prop(), r in arb_prop()) {
        prop_assert!(p.entails(&p));
        if p.entails(&q) && q.entails(&r) {
            prop_assert!(p.entails(&r));
        }
        if p.entails(&q) && q.entails(&p) {
            prop_assert_eq!(p.clone(), q.clone());
        }
    }

    #[test]
    fn frontier_or_is_monotone(ps in proptest::collection::vec(arb_prop(), 0..6),
                               hyps in arb_prop()) {
        let mut f = Frontier::bottom();
        for p in &ps {
            f = f.or(p);
        }
        // true exactly when some disjunct is entailed
        let expect = ps.iter().any(|p| hyps.entails(p));
        prop_assert_eq!(f.is_true(&hyps), expect);
    }

    #[test]
    fn frontier_or_absorbs(p in arb_prop(), q in arb_prop(), hyps in arb_prop()) {
        // adding a disjunct twice, or a weaker one, never changes truth
        let f1 = Frontier::bottom().or(&p).or(&q);
        let f2 = Frontier::bottom().or(&p).or(&q).or(&p).or(&p.meet(&q));
        prop_assert_eq!(f1.is_true(&hyps), f2.is_true(&hyps));
    }
}
