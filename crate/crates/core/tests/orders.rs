use lcakit::arith::Int;
use lcakit::{
    builtin_order, classify_proj_inj, modulus, module_dual, opposite_order, validate_module, validate_order, Kind,
    LcaModule, Order, PadicKind, ProjInj,
};
use proptest::prelude::*;

fn names() -> impl Strategy<Value = String> {
    prop_oneof![
        Just("Z".to_string()),
        Just("Gamma3".to_string()),
        Just("Zx/x2".to_string()),
        (1usize..7).prop_map(|n| format!("ZC{n}")),
        (2usize..5).prop_map(|n| format!("ZD{n}")),
    ]
}

fn kinds() -> impl Strategy<Value = Kind> {
    prop_oneof![
        Just(Kind::R),
        Just(Kind::Z),
        Just(Kind::T),
        prop::sample::select(vec![2u64, 3, 5]).prop_map(|p| Kind::Padic(p, PadicKind::Qp)),
        prop::sample::select(vec![2u64, 3, 5]).prop_map(|p| Kind::Padic(p, PadicKind::Zp)),
    ]
}

fn group_ring(name: &str) -> bool {
    name.starts_with("ZC") || name.starts_with("ZD")
}

proptest! {
    #[test]
    fn opposite_is_an_involution_preserving_validity(name in names()) {
        let o = builtin_order(&name).unwrap();
        let report = validate_order(&o);
        prop_assert_eq!(report.is_valid(), name != "Zx/x2");
        let op = opposite_order(&o);
        prop_assert_eq!(validate_order(&op), report);
        prop_assert_eq!(opposite_order(&op), o.clone());
        prop_assert_eq!(op == o, o.is_commutative());
    }

    #[test]
    fn regular_modules_and_double_duals(name in names(), kind in kinds()) {
        let o = builtin_order(&name).unwrap();
        let m = LcaModule::regular(&o, kind).unwrap();
        prop_assert_eq!(validate_module(&m).unwrap(), None);
        let d = module_dual(&m);
        prop_assert_eq!(validate_module(&d).unwrap(), None);
        prop_assert_eq!(&d.order, &o.opposite());
        prop_assert_eq!(module_dual(&d), m);
    }

    #[test]
    fn group_elements_are_unimodular(name in names().prop_filter("group ring", |n| group_ring(n)), kind in kinds()) {
        let o = builtin_order(&name).unwrap();
        let m = LcaModule::regular(&o, kind).unwrap();
        for f in &m.action {
            prop_assert!(modulus(f).unwrap().is_one(), "{}", f);
        }
    }
}

#[test]
fn regular_projectivity() {
    let z = Order::integers();
    let class = |k| classify_proj_inj(&LcaModule::regular(&z, k).unwrap());
    assert_eq!(class(Kind::R), ProjInj::Both);
    assert_eq!(class(Kind::Z), ProjInj::Projective);
    assert_eq!(class(Kind::T), ProjInj::Injective);
    assert_eq!(class(Kind::Padic(3, PadicKind::Qp)), ProjInj::Neither);
}

#[test]
fn broken_actions_are_named() {
    let o = builtin_order("ZC2").unwrap();
    let mut m = LcaModule::regular(&o, Kind::Z).unwrap();
    m.action[1] = m.action[1].scale(&Int::from(2));
    assert!(validate_module(&m).unwrap().is_some());
}
