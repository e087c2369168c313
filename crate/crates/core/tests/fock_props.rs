use ltwist::characters::{even_twist_group, legendre_character};
use ltwist::fock::{
    build_l, fock_basis, qtrace, restricted_partition_counts, vacuum_energies, verify_adjoint, verify_twisted_bracket,
    FockState, TraceMode,
};
use ltwist::lvalues::l_minus_one;
use ltwist::exactnum::rat;
use proptest::prelude::*;

#[test]
fn operators_respect_grading() {
    let g = even_twist_group(5).unwrap();
    for chi in g.elements() {
        for n in -4..=4 {
            let op = build_l(chi, n, 20).unwrap();
            assert_eq!(op.degree_shift(), -n * chi.period() as i64);
            assert!(op.respects_grading(), "n = {n}");
        }
    }
}

#[test]
fn basis_is_graded_and_canonical() {
    let b = fock_basis(12, None).unwrap();
    assert_eq!(b.len(), (0..=12).map(|n| restricted_partition_counts(1, &[0], n)[n]).sum::<u64>() as usize);
    assert!(b.contains(&FockState::vacuum()));
    for s in &b {
        let p = s.parts();
        assert!(p.windows(2).all(|w| w[0] >= w[1]) || p.windows(2).all(|w| w[0] <= w[1]));
        assert_eq!(p.iter().sum::<u32>(), s.degree());
        assert_eq!(FockState::from_parts(&p).unwrap(), *s);
    }
}

#[test]
fn adjoint_relation() {
    let chis = [legendre_character(5), legendre_character(13), even_twist_group(7).unwrap().elements()[1].clone()];
    for chi in &chis {
        for n in (-3i64..=3).filter(|n| n.unsigned_abs() * chi.period() as u64 <= 16) {
            let r = verify_adjoint(chi, n, 16).unwrap();
            assert!(r.passed, "{}: {:?}", r.label, r.witness);
        }
    }
}

#[test]
fn vacuum_energies_sum() {
    for n in [3u32, 5, 7, 9, 11, 13] {
        let g = even_twist_group(n).unwrap();
        let half = l_minus_one(g.identity()).unwrap().scale(&rat(1, 2));
        for i in 1..=g.order() {
            let v = vacuum_energies(&g, i).unwrap();
            assert_eq!(v.c.add(&v.d), half, "modulus {n}, index {i}");
            if let Some(c) = &v.c_closed {
                assert_eq!(&v.c, c, "modulus {n}, index {i}");
            }
        }
    }
}

#[test]
fn traces_count_restricted_partitions() {
    for n in [3u32, 5, 7, 9] {
        let g = even_twist_group(n).unwrap();
        let cutoff = 2 * n + 6;
        for i in 1..=g.order() {
            let j = g.index_residue(i).unwrap();
            let kernel = qtrace(&g, i, TraceMode::Kernel, cutoff).unwrap();
            assert_eq!(kernel.coeffs, restricted_partition_counts(n, &[j, n - j], cutoff as usize));
            let id = g.identity();
            let allowed: Vec<u32> = (1..n).filter(|&r| r != j && r != n - j && !id.eval(r as i64).is_zero()).collect();
            let ch = qtrace(&g, i, TraceMode::Character, cutoff).unwrap();
            assert_eq!(ch.coeffs, restricted_partition_counts(n, &allowed, cutoff as usize), "modulus {n} index {i}");
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    #[test]
    fn twisted_brackets(m in -2i64..=2, n in -2i64..=2, a in 0usize..2, b in 0usize..2) {
        let g = even_twist_group(5).unwrap();
        let r = verify_twisted_bracket(&g, a, b, m, n, 30).unwrap();
        prop_assert!(r.passed, "{}: {:?}", r.label, r.witness);
    }
}
