mod common;

use common::*;
use lcakit::{compose, modulus, LcaError, LcaMorphism, LcaObject};
use proptest::prelude::*;
use rand::Rng;

proptest! {
    #[test]
    fn matches_the_diagonal_oracle(seed in any::<u64>()) {
        let mut r = rng(seed);
        let g = random_object(&mut r);
        let a = random_automorphism(&mut r, &g, true);
        let m = modulus(&a.f).unwrap();
        prop_assert!(m.value() == &a.expected_modulus, "{}: {} vs {}", a.f, m, a.expected_modulus);
    }

    #[test]
    fn is_a_homomorphism(seed in any::<u64>()) {
        let mut r = rng(seed);
        let g = random_object(&mut r);
        let (a, b) = (random_automorphism(&mut r, &g, true), random_automorphism(&mut r, &g, true));
        let ab = modulus(&compose(&a.f, &b.f).unwrap()).unwrap();
        prop_assert!(ab.value() == &(&a.expected_modulus * &b.expected_modulus));
        let ba = modulus(&compose(&b.f, &a.f).unwrap()).unwrap();
        prop_assert!(ba == ab);
    }

    #[test]
    fn invariant_under_duality(seed in any::<u64>()) {
        let mut r = rng(seed);
        let g = random_object(&mut r);
        let a = random_automorphism(&mut r, &g, true);
        let m = modulus(&a.f.dual()).unwrap();
        prop_assert!(m.value() == &a.expected_modulus);
    }

    #[test]
    fn trivial_on_compact_and_discrete(seed in any::<u64>(), t in 0usize..3, z in 0usize..3, a in 0usize..2, fin in 1i64..7) {
        let mut r = rng(seed);
        let p = PRIMES[r.gen_range(0..PRIMES.len())];
        let f = LcaObject::finite(&[fin.into()]);
        let compact = LcaObject::torus(t).sum(&LcaObject::zp(p, a)).sum(&f);
        let discrete = LcaObject::lattice(z).sum(&LcaObject::pruefer(p, a)).sum(&f);
        prop_assert!(compact.predicates().is_compact && discrete.predicates().is_discrete);
        for h in [compact, discrete] {
            let f = random_automorphism(&mut r, &h, true).f;
            prop_assert!(modulus(&f).unwrap().is_one(), "{}", f);
        }
    }
}

#[test]
fn scalars() {
    let on = |g: LcaObject, n: i64, d: i64| modulus(&LcaMorphism::scalar(&g, &q(n, d)).unwrap()).unwrap();
    assert_eq!(on(LcaObject::real(2), -3, 2).value(), &q(9, 4));
    assert_eq!(on(LcaObject::qp(5, 1), 25, 3).value(), &q(1, 25));
    assert_eq!(on(LcaObject::qp(3, 2), 1, 3).value(), &q(9, 1));
}

#[test]
fn non_automorphisms_are_rejected() {
    let f = LcaMorphism::scalar(&LcaObject::lattice(1), &q(2, 1)).unwrap();
    assert!(matches!(modulus(&f), Err(LcaError::NotAnAutomorphism)));
}
