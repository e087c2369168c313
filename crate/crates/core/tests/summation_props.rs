use ltwist::characters::{dirichlet_characters, PeriodicFn};
use ltwist::exactnum::{rat, CycloNum};
use ltwist::lvalues::{l_minus_one, l_zero};
use ltwist::summation::{
    inflate, inflated_form, limit_exact_mixed, limit_exact_periodic, limit_numeric, partial_sum, series, SeqSpec,
    Weight,
};
use ltwist::Error;
use proptest::prelude::*;

const TERMS: usize = 100_000;
const TOL: f64 = 1e-3;

fn mean_zero_fn() -> impl Strategy<Value = PeriodicFn> {
    (2usize..=12).prop_flat_map(|n| prop::collection::vec(-4i64..=4, n - 1)).prop_map(|mut v| {
        v.push(-v.iter().sum::<i64>());
        PeriodicFn::from_ints(&v)
    })
}

fn check_inflation(chi: &PeriodicFn) {
    for w in [Weight::Const, Weight::Linear] {
        let base = limit_exact_periodic(chi, w).unwrap();
        for k in 1..=5 {
            let (lin, cst) = inflated_form(chi, w, k);
            assert_eq!(limit_exact_mixed(&lin, &cst).unwrap(), base, "{chi:?} weight {w:?} k {k}");
        }
    }
}

#[test]
fn inflation_compatible_for_characters() {
    for n in 2..=12 {
        for chi in dirichlet_characters(n).into_iter().filter(|c| c.is_mean_zero()) {
            check_inflation(&chi);
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn inflation_compatible_for_mean_zero_functions(chi in mean_zero_fn()) {
        check_inflation(&chi);
    }

    #[test]
    fn inflate_repeats_terms(v in prop::collection::vec(-9i64..=9, 1..8), k in 1usize..4) {
        let s = SeqSpec::Explicit(v.iter().map(|&x| CycloNum::from_int(x)).collect());
        let t = inflate(s, k).unwrap().terms_exact(v.len() * k);
        for (i, x) in t.iter().enumerate() {
            prop_assert_eq!(x, &CycloNum::from_int(v[i / k]));
        }
    }
}

#[test]
fn inflation_rejects_zero() {
    assert!(inflate(SeqSpec::Explicit(vec![]), 0).is_err());
}

#[test]
fn averaging_preserves_genuine_limits() {
    let constant = SeqSpec::Periodic { chi: PeriodicFn::from_ints(&[2]), power: 0, shift: 1 };
    let geometric = partial_sum(SeqSpec::Explicit((0..60).map(|i| CycloNum::from_rat(rat(1, 1 << i.min(60)))).collect()));
    for (s, want) in [(constant, 2.0), (geometric, 2.0)] {
        for depth in 0..=2 {
            let r = limit_numeric(&s, depth, TERMS, TOL).unwrap();
            let v = r.numeric_value().unwrap();
            assert!((v.re - want).abs() < TOL && v.im.abs() < TOL, "{} depth {depth}: {v}", s.label());
        }
    }
}

#[test]
fn numeric_limits_match_special_values() {
    for n in 3..=15 {
        for chi in dirichlet_characters(n).into_iter().filter(|c| c.is_even() && c.is_mean_zero()) {
            for (w, depth, exact) in [(Weight::Const, 1, l_zero(&chi).unwrap()), (Weight::Linear, 2, l_minus_one(&chi).unwrap())] {
                let r = limit_numeric(&series(&chi, w), depth, TERMS, TOL).unwrap();
                let err = (r.numeric_value().unwrap() - exact.to_complex64()).norm();
                assert!(err < TOL, "modulus {n}, weight {w:?}: error {err}");
            }
        }
    }
}

#[test]
fn no_value_for_constant_ones() {
    let ones = partial_sum(SeqSpec::Periodic { chi: PeriodicFn::from_ints(&[1]), power: 0, shift: 1 });
    for depth in 0..=4 {
        match limit_numeric(&ones, depth, TERMS, TOL) {
            Err(Error::NoConvergence { .. }) => {}
            other => panic!("depth {depth}: {other:?}"),
        }
    }
}
