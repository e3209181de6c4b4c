mod common;

use common::*;
use lcakit::{check_exact, decompose_cg_discrete, ExactVerdict, LcaObject};
use proptest::prelude::*;

proptest! {
    #[test]
    fn display_round_trips(seed in any::<u64>()) {
        let g = random_object(&mut rng(seed));
        let back: LcaObject = g.to_string().parse().unwrap();
        prop_assert_eq!(back, g);
    }

    #[test]
    fn dual_is_an_involution(seed in any::<u64>()) {
        let g = random_object(&mut rng(seed));
        prop_assert_eq!(g.dual().dual(), g);
    }

    #[test]
    fn dual_exchanges_predicates(seed in any::<u64>()) {
        let g = random_object(&mut rng(seed));
        let (a, b) = (g.predicates(), g.dual().predicates());
        prop_assert_eq!(a.is_compact, b.is_discrete);
        prop_assert_eq!(a.is_discrete, b.is_compact);
        prop_assert_eq!(a.is_compactly_generated, b.is_nss);
        prop_assert_eq!(a.is_nss, b.is_compactly_generated);
    }

    #[test]
    fn dual_commutes_with_sums(s1 in any::<u64>(), s2 in any::<u64>()) {
        let (a, b) = (random_object(&mut rng(s1)), random_object(&mut rng(s2)));
        prop_assert_eq!(a.sum(&b).dual(), a.dual().sum(&b.dual()));
    }

    #[test]
    fn cg_discrete_decomposition_is_exact(seed in any::<u64>()) {
        let g = random_object(&mut rng(seed));
        let d = decompose_cg_discrete(&g);
        prop_assert_eq!(&d.mid, &g);
        prop_assert!(d.sub.predicates().is_compactly_generated);
        prop_assert!(d.quot.predicates().is_discrete);
        prop_assert_eq!(check_exact(&d).unwrap(), ExactVerdict::Exact);
    }
}

#[test]
fn canonical_order() {
    let g: LcaObject = "Qp(5) + Z/4 + T + Pr(3)^2 + Z + R^2".parse().unwrap();
    assert_eq!(g.to_string(), "R^2 + Z + T + Z/4 + Pr(3)^2 + Qp(5)");
}
