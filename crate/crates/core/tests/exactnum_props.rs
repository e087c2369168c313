use ltwist::exactnum::{rat, CycloNum, Rat};
use proptest::prelude::*;

const ORDERS: &[u32] = &[1, 3, 4, 5, 7, 8, 12];
const BITS: u32 = 160;

fn elem_of(m: u32) -> impl Strategy<Value = CycloNum> {
    prop::collection::vec((0..m as i64, -5i64..=5, 1i64..=4), 0..4).prop_map(move |ts| {
        ts.into_iter()
            .fold(CycloNum::zero(), |acc, (e, n, d)| acc.add(&CycloNum::zeta_pow(m, e).scale(&rat(n, d))))
    })
}

fn elem() -> impl Strategy<Value = CycloNum> {
    prop::sample::select(ORDERS).prop_flat_map(elem_of)
}

fn close(a: &CycloNum, b: &ltwist::exactnum::BigComplex) -> bool {
    let d = a.embed(BITS).sub(b);
    d.log2_upper() < -(BITS as i64) + 16
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn ring_axioms(a in elem(), b in elem(), c in elem()) {
        prop_assert_eq!(a.add(&b), b.add(&a));
        prop_assert_eq!(a.mul(&b), b.mul(&a));
        prop_assert_eq!(a.add(&b).add(&c), a.add(&b.add(&c)));
        prop_assert_eq!(a.mul(&b).mul(&c), a.mul(&b.mul(&c)));
        prop_assert_eq!(a.mul(&b.add(&c)), a.mul(&b).add(&a.mul(&c)));
        prop_assert!(a.sub(&a).is_zero());
        prop_assert_eq!(a.mul(&CycloNum::one()), a.clone());
    }

    #[test]
    fn inverses(a in elem()) {
        prop_assume!(!a.is_zero());
        let inv = a.inv().unwrap();
        prop_assert_eq!(a.mul(&inv), CycloNum::one());
    }

    #[test]
    fn rational_round_trip(n in -1000i64..1000, d in 1i64..1000) {
        let r: Rat = rat(n, d);
        prop_assert_eq!(CycloNum::from_rat(r.clone()).is_rational(), Some(r));
    }

    #[test]
    fn promotion_preserves_value(a in elem_of(12)) {
        prop_assert_eq!(a.promote(24), a.clone());
        prop_assert_eq!(a.promote(36).sub(&a), CycloNum::zero());
    }

    #[test]
    fn text_round_trip(a in elem()) {
        prop_assert_eq!(CycloNum::parse(&a.to_text()).unwrap(), a);
    }

    #[test]
    fn embedding_is_a_homomorphism(a in elem(), b in elem()) {
        let (ea, eb) = (a.embed(BITS), b.embed(BITS));
        prop_assert!(close(&a.add(&b), &ea.add(&eb)));
        prop_assert!(close(&a.mul(&b), &ea.mul(&eb)));
        let c = a.conj().embed(BITS);
        prop_assert!(c.re.sub(&ea.re).log2_upper() < -(BITS as i64) + 16);
        prop_assert!(c.im.add(&ea.im).log2_upper() < -(BITS as i64) + 16);
    }
}

#[test]
fn root_of_unity_relations() {
    for m in [3u32, 4, 5, 8, 9, 12, 15] {
        let z = CycloNum::zeta(m);
        assert_eq!(z.pow(m), CycloNum::one());
        let s = (0..m as i64).fold(CycloNum::zero(), |acc, e| acc.add(&CycloNum::zeta_pow(m, e)));
        assert!(s.is_zero(), "sum of {m}-th roots");
    }
    assert_eq!(CycloNum::zeta_pow(4, 2), CycloNum::from_int(-1));
}
