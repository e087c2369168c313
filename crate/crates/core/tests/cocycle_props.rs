use ltwist::cocycle::{nullspace_dim, verify_line_recursion, QuadField, RingElem};
use proptest::prelude::*;

fn field() -> impl Strategy<Value = QuadField> {
    prop::sample::select(vec![0i64, -1, 2, 3, 5, -3, 13]).prop_map(|d| {
        if d == 0 {
            QuadField::rational()
        } else {
            QuadField::quadratic(d).unwrap()
        }
    })
}

fn ring() -> impl Strategy<Value = RingElem> {
    (-20i64..=20, -20i64..=20).prop_map(|(x, y)| RingElem::new(x, y))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(96))]

    #[test]
    fn ring_embedding_is_homomorphism(f in field(), p in ring(), q in ring()) {
        let (p, q) = if f.degree() == 1 { (RingElem::new(p.x, 0), RingElem::new(q.x, 0)) } else { (p, q) };
        prop_assert_eq!(f.embed(p.add(q)), f.add(&f.embed(p), &f.embed(q)));
        prop_assert_eq!(f.embed(f.ring_mul(p, q)), f.mul(&f.embed(p), &f.embed(q)));
        prop_assert_eq!(f.ring_mul(p, q), f.ring_mul(q, p));
        prop_assert!(p.add(p.neg()).is_zero());
    }
}

#[test]
fn dimension_is_monotone_and_stabilizes() {
    for f in [QuadField::rational(), QuadField::quadratic(2).unwrap(), QuadField::quadratic(5).unwrap()] {
        let dims: Vec<usize> = (3..=6).map(|h| nullspace_dim(f, h).unwrap().dimension).collect();
        assert!(dims.windows(2).all(|w| w[1] <= w[0]), "{}: {dims:?}", f.label());
        assert_eq!(*dims.last().unwrap(), 2, "{}", f.label());
        let r = nullspace_dim(f, 6).unwrap();
        assert!(r.contains_m && r.contains_m3 && r.passed, "{}", f.label());
    }
}

#[test]
fn line_recursion_and_interpolation() {
    for (f, h) in [(QuadField::rational(), 8), (QuadField::quadratic(2).unwrap(), 5), (QuadField::quadratic(5).unwrap(), 5)] {
        for seed in [0, 7] {
            let r = verify_line_recursion(f, h, seed).unwrap();
            assert!(r.passed && r.interpolation_ok, "{}: {:?}", f.label(), r.witness);
        }
    }
}
