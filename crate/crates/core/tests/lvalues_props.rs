use ltwist::characters::dirichlet_characters;
use ltwist::lvalues::{class_number_imag_quadratic, l_minus_one, l_minus_one_formula, l_special, l_zero};
use ltwist::report::reduced_form_count;

#[test]
fn special_values_agree() {
    for n in 3..=30u32 {
        for chi in dirichlet_characters(n).into_iter().filter(|c| c.is_mean_zero()) {
            assert_eq!(l_zero(&chi).unwrap(), l_special(1, &chi).unwrap(), "modulus {n}");
            let lm = l_minus_one(&chi).unwrap();
            assert_eq!(lm, l_special(2, &chi).unwrap(), "modulus {n}");
            assert_eq!(lm, l_minus_one_formula(&chi), "modulus {n}");
            if chi.is_odd() {
                assert!(lm.is_zero(), "L(-1) of an odd character mod {n}");
            } else {
                assert!(l_zero(&chi).unwrap().is_zero(), "L(0) of an even character mod {n}");
            }
        }
    }
}

#[test]
fn class_numbers_match_form_counts() {
    for q in (7..400u64).filter(|q| q % 4 == 3 && ltwist::characters::is_prime(*q)) {
        let h = class_number_imag_quadratic(q).unwrap();
        assert!(h > 0);
        assert_eq!(h, reduced_form_count(q), "q = {q}");
    }
}
