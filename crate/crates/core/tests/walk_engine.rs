use std::collections::HashMap;

use num_bigint::BigInt;
use proptest::prelude::*;

use precurse_core::matrix::IntMatrix;
use precurse_core::walk::{
    asymptotic_report, backend_crosscheck, ln_rational, matrix_walk, return_counts, return_probability, walk,
    GeneratingSet, WalkGroupElement, DEFAULT_BALL_CAP,
};

fn symmetric_set() -> impl Strategy<Value = GeneratingSet> {
    prop::collection::vec((-1i64..=1, -2i64..=2, -2i64..=2, 1u64..3), 1..4).prop_map(|gens| {
        let mut elements = Vec::new();
        for (k, a, b, w) in gens {
            let g = WalkGroupElement::new(k, [a, b]);
            elements.push((g, w));
            elements.push((g.inverse().unwrap(), w));
        }
        GeneratingSet::new(elements, true).unwrap()
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn mass_and_symmetry(s in symmetric_set()) {
        let total = u128::from(s.total_weight());
        for (n, d) in walk(&s, 6, DEFAULT_BALL_CAP).unwrap().iter().enumerate() {
            prop_assert_eq!(d.mass(), total.pow(n as u32));
            prop_assert!(d.is_inversion_symmetric().unwrap());
        }
    }

    #[test]
    fn backends_agree_on_random_sets(s in symmetric_set()) {
        prop_assert!(backend_crosscheck(&s, 4).unwrap());
    }

    #[test]
    fn half_walk_pairing_matches_full_walk(s in symmetric_set()) {
        let full = walk(&s, 7, DEFAULT_BALL_CAP).unwrap();
        let a = return_counts(&s, 7, DEFAULT_BALL_CAP).unwrap();
        for (n, d) in full.iter().enumerate() {
            prop_assert_eq!(&a[n], &BigInt::from(d.identity_count()));
        }
    }
}

#[test]
fn matrix_walk_on_h_counts_pairs() {
    let e = GeneratingSet::h_standard();
    let steps = matrix_walk(&e.matrices().unwrap(), 2, DEFAULT_BALL_CAP).unwrap();
    assert_eq!(steps[1].len(), 6);
    assert_eq!(steps[2].get(&IntMatrix::identity(3)), Some(&6));
    let total: u64 = steps[2].values().sum();
    assert_eq!(total, 36);
}

#[test]
fn single_products_match_matrices() {
    let e = GeneratingSet::h_standard();
    let mats: HashMap<WalkGroupElement, IntMatrix> =
        e.elements.iter().map(|(g, _)| (*g, g.to_matrix().unwrap())).collect();
    let mut pairs = 0;
    for (g, _) in &e.elements {
        for (h, _) in &e.elements {
            assert_eq!(g.mul(h).unwrap().to_matrix().unwrap(), mats[g].mul(&mats[h]));
            pairs += 1;
        }
    }
    assert_eq!(pairs, 36);
}

#[test]
fn h_walk_report_has_three_residuals() {
    let e = GeneratingSet::h_standard();
    let a = return_counts(&e, 20, DEFAULT_BALL_CAP).unwrap();
    let p: Vec<f64> = return_probability(&a, 6).iter().map(|q| ln_rational(q).map_or(0.0, f64::exp)).collect();
    for i in (2..=20).step_by(2) {
        assert!(p[i] > 0.0, "p({i})");
    }
    let rep = asymptotic_report(&p).unwrap();
    assert_eq!(rep.fits.len(), 3);
    assert_eq!(rep.points, 10);
    assert!(rep.fits.iter().all(|f| f.residual.is_finite()));
}

#[test]
fn fixture_json_round_trip() {
    let v: serde_json::Value = serde_json::from_str(GeneratingSet::fixture_text()).unwrap();
    let s = GeneratingSet::from_fixture_json(&v).unwrap();
    assert!(s.symmetric);
    assert_eq!(s.total_weight(), 6);
    let bad: serde_json::Value = serde_json::from_str(r#"{"generators":[{"matrix":[[1,1,0],[0,1,0],[0,0,1]]}]}"#).unwrap();
    assert!(GeneratingSet::from_fixture_json(&bad).is_err());
}
