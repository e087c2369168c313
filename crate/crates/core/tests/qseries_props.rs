use ltwist::characters::even_twist_group;
use ltwist::exactnum::{rat, Rat};
use ltwist::fock::vacuum_energies;
use ltwist::qseries::{euler_check, jacobi_check, verify_eta_relation, verify_theta_quotient, PuiseuxSeries};
use proptest::prelude::*;

fn series() -> impl Strategy<Value = PuiseuxSeries> {
    (prop::collection::vec(-6i128..=6, 1..12), 8i64..20).prop_map(|(c, o)| PuiseuxSeries::from_integers(&c, o))
}

fn unit() -> impl Strategy<Value = PuiseuxSeries> {
    (prop::collection::vec(-6i128..=6, 0..10), 8i64..20).prop_map(|(mut c, o)| {
        c.insert(0, 1);
        PuiseuxSeries::from_integers(&c, o)
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn ring_laws(a in series(), b in series(), c in series()) {
        prop_assert_eq!(a.mul(&b).first_difference(&b.mul(&a)), None);
        prop_assert_eq!(a.mul(&b).mul(&c).first_difference(&a.mul(&b.mul(&c))), None);
        prop_assert_eq!(a.mul(&b.add(&c)).first_difference(&a.mul(&b).add(&a.mul(&c))), None);
        prop_assert!(a.sub(&a).valuation().is_none());
    }

    #[test]
    fn truncation_is_tracked(a in series(), b in series()) {
        let p = a.mul(&b);
        let want = a.order().min(b.order());
        prop_assert!(p.order() >= want);
        prop_assert_eq!(a.add(&b).order(), want);
    }

    #[test]
    fn inverse_round_trip(u in unit()) {
        let inv = u.inverse().unwrap();
        let one = PuiseuxSeries::one(&u.order());
        prop_assert_eq!(u.mul(&inv).first_difference(&one), None);
    }

    #[test]
    fn fractional_shift_and_substitution(a in series(), num in 1i64..5, den in 2i64..7) {
        let r: Rat = rat(num, den);
        let s = a.shift(&r);
        prop_assert_eq!(s.coeff(&r), a.coeff(&Rat::from_integer(0.into())));
        prop_assert_eq!(s.shift(&(-r.clone())).first_difference(&a), None);
        let sub = a.substitute(&r);
        prop_assert_eq!(sub.coeff(&r), a.coeff(&Rat::from_integer(1.into())));
    }
}

#[test]
fn identities_hold_at_every_order() {
    for order in [10, 25, 60, 120] {
        let e = euler_check(order);
        assert!(e.passed, "{}", e.detail);
        let (j, bi) = jacobi_check(order.min(40), 4);
        assert!(j.passed, "{}", j.detail);
        assert_eq!(bi.order(), order.min(40));
    }
}

#[test]
fn eta_relation() {
    for order in [20, 60] {
        let c = verify_eta_relation(order).unwrap();
        assert!(c.passed, "{}", c.detail);
    }
}

#[test]
fn theta_quotient_prefactor_is_minus_vacuum_energy() {
    for k in [1i64, 2, 3, 4, 5] {
        let g = even_twist_group((2 * k + 1) as u32).unwrap();
        for i in 1..=g.order() {
            let j = g.index_residue(i).unwrap() as i64;
            let r = verify_theta_quotient(k, j, 40).unwrap();
            assert!(r.check.passed && r.phases_cancel, "k={k} j={j}: {}", r.check.detail);
            let d = vacuum_energies(&g, i).unwrap().d.is_rational().unwrap();
            assert_eq!(r.prefactor_exponent, -d, "k={k} j={j}");
        }
    }
}
