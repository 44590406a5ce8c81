use mdzv::formulas::{from_json, product_zeta, to_json};
use mdzv::shuffle::{enumerate_shuffles, shuffle_product, Origin};
use mdzv::{binomial, Combination, PairingStructure, Permutation, RefinedTerm};
use proptest::prelude::*;

fn depth_one() -> impl Strategy<Value = RefinedTerm> {
    (prop_oneof![Just("(1)"), Just("(12)")], 1u32..5, 1u32..5)
        .prop_map(|(p, a, b)| format!("{p}:{a},{b}").parse().unwrap())
}

fn depth_two() -> impl Strategy<Value = RefinedTerm> {
    (0usize..24, prop::collection::vec(1u32..4, 4)).prop_map(|(i, e)| {
        RefinedTerm::new(Permutation::all(4)[i].clone(), e).unwrap()
    })
}

proptest! {
    #[test]
    fn shuffle_counts_and_order(m in 0usize..8, n in 0usize..8) {
        let words: Vec<_> = enumerate_shuffles(m, n).collect();
        prop_assert_eq!(words.len() as u128, binomial((m + n) as u64, m as u64));
        for w in &words {
            prop_assert_eq!(w.iter().filter(|o| **o == Origin::Left).count(), m);
        }
        prop_assert!(words.windows(2).all(|p| p[0] < p[1]));
    }

    #[test]
    fn raw_product_conserves_count_and_weight(a in depth_one(), b in depth_one()) {
        let std4 = PairingStructure::standard(4).unwrap();
        let raw = shuffle_product(&a, &b, &std4, false).unwrap();
        let total = binomial((a.weight() + b.weight()) as u64, a.weight() as u64);
        prop_assert_eq!(raw.coefficient_sum() as u128, total);
        let simplified = shuffle_product(&a, &b, &std4, true).unwrap();
        prop_assert_eq!(simplified.coefficient_sum() as u128, total);
        for (t, _) in raw.iter() {
            prop_assert_eq!(t.weight(), a.weight() + b.weight());
            prop_assert!(*t.exponents().last().unwrap() >= 1);
        }
    }

    #[test]
    fn canonical_form_is_constant_on_cosets(t in depth_two(), h in 0usize..8) {
        let pairing = PairingStructure::standard(4).unwrap();
        let h = pairing.subgroup()[h].clone();
        let moved = RefinedTerm::new(t.order() * &h, t.exponents().to_vec()).unwrap();
        let canon = pairing.canonicalize(&t);
        prop_assert_eq!(pairing.canonicalize(&moved), canon.clone());
        prop_assert_eq!(pairing.canonicalize(&canon), canon);
    }

    #[test]
    fn json_round_trips(terms in prop::collection::vec((depth_two(), -50i64..50), 0..12)) {
        let pairing = PairingStructure::standard(4).unwrap();
        let mut c = Combination::new();
        for (t, k) in terms {
            c.add_term(t, k).unwrap();
        }
        let (back, p) = from_json(&to_json(&c, &pairing)).unwrap();
        prop_assert_eq!(back, c);
        prop_assert_eq!(p, pairing);
    }
}

#[test]
fn json_round_trips_full_product() {
    let pairing = PairingStructure::standard(4).unwrap();
    let c = product_zeta(2, 2).unwrap();
    let text = to_json(&c, &pairing);
    assert!(text.starts_with(r#"{"k":4,"pairing":[[1,2],[3,4]],"terms":[{"perm":"#));
    assert_eq!(from_json(&text).unwrap().0, c);
}
