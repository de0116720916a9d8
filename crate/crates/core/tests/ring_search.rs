use num_bigint::BigInt;
use num_traits::{One, Zero};
use proptest::prelude::*;

use precurse_core::ring::{pruned_identity_count, PruneMode, PrunedSearch, RingElement, SearchOptions};
use precurse_core::witness::{witness_u, WitnessSet};
use precurse_core::words::{Generator, PairAlphabet, PairElement};

/// Oracle: sum over every sequence of `n` generators.
fn brute(gens: &[(PairElement, BigInt)], n: usize, target: &PairElement) -> BigInt {
    if n == 0 {
        return if target.is_identity() { BigInt::one() } else { BigInt::zero() };
    }
    let mut total = BigInt::zero();
    let mut idx = vec![0usize; n];
    loop {
        let mut p = PairElement::identity();
        let mut w = BigInt::one();
        for &i in &idx {
            p = p.mul(&gens[i].0);
            w *= &gens[i].1;
        }
        if p == *target {
            total += w;
        }
        let mut pos = 0;
        loop {
            if pos == n {
                return total;
            }
            idx[pos] += 1;
            if idx[pos] < gens.len() {
                break;
            }
            idx[pos] = 0;
            pos += 1;
        }
    }
}

fn letters() -> Vec<Generator> {
    let ab = PairAlphabet::free(3, 2);
    ab.x.letters().into_iter().chain(ab.y.letters()).collect()
}

fn element() -> impl Strategy<Value = PairElement> {
    let all = letters();
    prop::collection::vec(0..all.len(), 0..4)
        .prop_map(move |ix| PairElement::from_letters(ix.into_iter().map(|i| all[i])).unwrap())
}

fn gen_set() -> impl Strategy<Value = Vec<(PairElement, BigInt)>> {
    prop::collection::vec((element(), 1i64..4), 1..5)
        .prop_map(|v| v.into_iter().map(|(e, w)| (e, BigInt::from(w))).collect())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn pruned_count_matches_enumeration(gens in gen_set(), target in element(), n in 0usize..5) {
        let exact = pruned_identity_count(&gens, n, &target, &SearchOptions::default()).unwrap();
        prop_assert_eq!(&exact, &brute(&gens, n, &target));
        let length_only = SearchOptions { length_only: true, ..SearchOptions::default() };
        prop_assert_eq!(pruned_identity_count(&gens, n, &target, &length_only).unwrap(), exact.clone());
        let m4 = SearchOptions { modulus: Some(4), ..SearchOptions::default() };
        let reduced = pruned_identity_count(&gens, n, &target, &m4).unwrap();
        prop_assert_eq!(reduced, ((exact % 4) + 4) % 4);
    }

    #[test]
    fn ring_powers_match_enumeration(gens in gen_set(), n in 0usize..5) {
        let u = RingElement::from_terms(gens.clone(), None).unwrap();
        prop_assert_eq!(u.coeff_at_identity_pow(n, 1 << 20).unwrap(), brute(&gens, n, &PairElement::identity()));
    }
}

#[test]
fn witness_u_powers_agree_with_length_search() {
    let terms = WitnessSet::standard().u_terms();
    let mut search = PrunedSearch::new(&terms, &PairElement::identity(), &SearchOptions::default()).unwrap();
    assert_eq!(search.mode(), PruneMode::Length);
    let u = witness_u();
    for n in 0..=8 {
        assert_eq!(search.count(n).unwrap(), u.coeff_at_identity_pow(n, 1 << 24).unwrap(), "n={n}");
    }
    assert_eq!(search.count(8).unwrap(), BigInt::from(16));
}

#[test]
fn modes_chosen_for_the_witness_queries() {
    let s = WitnessSet::standard().s_terms();
    let u = WitnessSet::standard().u_terms();
    let ab = PairAlphabet::standard();
    let target = ab.parse_pair("s1^-1 s8").unwrap();
    let mode = |g: &[(PairElement, BigInt)], t: &PairElement, m: Option<u64>| {
        let opts = SearchOptions { modulus: m, ..SearchOptions::default() };
        PrunedSearch::new(g, t, &opts).unwrap().mode()
    };
    assert_eq!(mode(&s, &PairElement::identity(), None), PruneMode::Vanishing);
    assert_eq!(mode(&s, &target, None), PruneMode::Chain);
    assert_eq!(mode(&u, &PairElement::identity(), Some(4)), PruneMode::Cyclic);
}

#[test]
fn modular_mismatch_is_an_error() {
    let a = RingElement::one(Some(4)).unwrap();
    let b = RingElement::one(None).unwrap();
    assert!(a.add(&b).is_err());
    assert!(RingElement::one(Some(1)).is_err());
}
