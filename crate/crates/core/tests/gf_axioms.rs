mod common;

use proptest::prelude::*;
use qdist::gf::{prime_power, GfError};
use qdist::{FFElem, FieldSpec};

#[test]
fn exhaustive_axioms_small_fields() {
    for q in [2, 3, 4, 5, 7, 8, 9, 16] {
        let f = FieldSpec::new(q, None).unwrap();
        assert_eq!(common::field_axiom_violations(&f), 0, "GF({q})");
    }
}

#[test]
fn frobenius_is_additive() {
    for q in [4, 8, 9, 16, 25, 27] {
        let f = FieldSpec::new(q, None).unwrap();
        let p = f.p() as u64;
        for a in f.elements() {
            for b in f.elements() {
                assert_eq!(
                    f.pow(f.add(a, b), p),
                    f.add(f.pow(a, p), f.pow(b, p)),
                    "GF({q})"
                );
            }
        }
    }
}

#[test]
fn multiplicative_group_is_cyclic() {
    for q in [4, 8, 9, 16, 27, 32, 49, 64, 81, 125, 128, 256] {
        let f = FieldSpec::new(q, None).unwrap();
        let has_generator = f.elements().skip(1).any(|g| {
            let mut x = g;
            let mut order = 1;
            while x != FFElem::ONE {
                x = f.mul(x, g);
                order += 1;
            }
            order == q - 1
        });
        assert!(has_generator, "GF({q})");
    }
}

#[test]
fn rejects_non_prime_powers() {
    for q in [0, 1, 6, 10, 12, 15, 18, 100] {
        assert!(
            matches!(FieldSpec::new(q, None), Err(GfError::NotPrimePower(_))),
            "{q}"
        );
    }
    assert!(matches!(
        FieldSpec::new(1 << 17, None),
        Err(GfError::OrderTooLarge(_))
    ));
    assert_eq!(prime_power(243), Some((3, 5)));
}

#[test]
fn reducible_modulus_rejected() {
    // x^2 + 1 = (x + 1)^2 over GF(2)
    assert!(matches!(
        FieldSpec::new(4, Some(&[1, 0, 1])),
        Err(GfError::ReducibleModulus(..))
    ));
    assert!(FieldSpec::new(4, Some(&[1, 1, 1])).is_ok());
}

fn big_field() -> impl Strategy<Value = FieldSpec> {
    prop::sample::select(vec![1024u32, 4096, 8192, 65536, 2187, 15625, 65521])
        .prop_map(|q| FieldSpec::new(q, None).unwrap())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn large_field_axioms(f in big_field(), a in any::<u32>(), b in any::<u32>(), c in any::<u32>()) {
        let q = f.q();
        let (a, b, c) = (FFElem((a % q) as u16), FFElem((b % q) as u16), FFElem((c % q) as u16));
        prop_assert_eq!(f.mul(a, f.add(b, c)), f.add(f.mul(a, b), f.mul(a, c)));
        prop_assert_eq!(f.mul(f.mul(a, b), c), f.mul(a, f.mul(b, c)));
        prop_assert_eq!(f.add(a, f.neg(a)), FFElem::ZERO);
        if !a.is_zero() {
            prop_assert_eq!(f.mul(a, f.inv(a).unwrap()), FFElem::ONE);
        }
        prop_assert_eq!(f.pow(a, q as u64), a);
    }
}
