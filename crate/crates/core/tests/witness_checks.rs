use num_bigint::BigInt;
use num_traits::One;
use proptest::prelude::*;

use precurse_core::automaton::b_closed_form;
use precurse_core::witness::{
    a_odd_mod4, embed_in_f2, free_return_count, free_return_count_with, same_parity, sanov_matrix, sl4_realize,
    two_sets_parity, verify_correspondence,
};
use precurse_core::words::{Generator, PairAlphabet, PairElement};
use precurse_core::DEFAULT_BUDGET;

fn all_letters() -> Vec<Generator> {
    let ab = PairAlphabet::standard();
    ab.x.letters().into_iter().chain(ab.y.letters()).collect()
}

fn pair() -> impl Strategy<Value = PairElement> {
    let all = all_letters();
    prop::collection::vec(0..all.len(), 0..12)
        .prop_map(move |ix| PairElement::from_letters(ix.into_iter().map(|i| all[i])).unwrap())
}

proptest! {
    #[test]
    fn realization_is_a_homomorphism(p in pair(), q in pair()) {
        let lhs = sl4_realize(&p.mul(&q));
        prop_assert_eq!(&lhs, &sl4_realize(&p).mul(&sl4_realize(&q)));
        prop_assert!(lhs.determinant().is_one());
        prop_assert!(sl4_realize(&p.mul(&p.invert())).is_identity());
    }

    #[test]
    fn blocks_come_from_the_f2_embedding(p in pair()) {
        let m = sl4_realize(&p);
        let x = sanov_matrix(&embed_in_f2(p.x_part())).unwrap();
        let y = sanov_matrix(&embed_in_f2(p.y_part())).unwrap();
        prop_assert_eq!(m, x.direct_sum(&y));
    }
}

/// Oracle: words over `2·rank` letters reduced with a stack.
fn exhaustive(rank: usize, n: usize) -> u64 {
    let letters = 2 * rank;
    let mut total = 0;
    for code in 0..(letters as u64).pow(n as u32) {
        let mut c = code;
        let mut stack: Vec<u64> = Vec::new();
        for _ in 0..n {
            let l = c % letters as u64;
            c /= letters as u64;
            if stack.last() == Some(&(l ^ 1)) {
                stack.pop();
            } else {
                stack.push(l);
            }
        }
        total += u64::from(stack.is_empty());
    }
    total
}

#[test]
fn tree_counts_match_enumeration() {
    for rank in 1..=3 {
        for n in 0..=7 {
            assert_eq!(free_return_count(rank, n), BigInt::from(exhaustive(rank, n)), "rank {rank} n {n}");
        }
    }
    assert_eq!(free_return_count_with(3, 0, false), BigInt::one());
    assert_eq!(free_return_count_with(3, 6, false), BigInt::from(0));
}

#[test]
fn both_generating_sets_share_parity() {
    for n in 0..=8 {
        let (a2, a) = two_sets_parity(n, DEFAULT_BUDGET).unwrap();
        assert!(same_parity(&a2, &a), "n={n}: {a2} vs {a}");
    }
}

#[test]
fn correspondence_through_length_twenty() {
    assert!(verify_correspondence(20, DEFAULT_BUDGET).unwrap());
}

#[test]
fn mod4_law_from_closed_form() {
    for m in 0..200u64 {
        assert_eq!(a_odd_mod4(m), ((2 * (2 * m + 1) * u64::from(b_closed_form(2 * m))) % 4) as u8);
        assert!(a_odd_mod4(m) == 0 || a_odd_mod4(m) == 2);
    }
}
