mod common;

use dmflag::exterior::{
    complement_sign, contract, shuffle_sign, wedge, DualElement, ExteriorElement, Subset,
};
use dmflag::ring::PolyRing;
use proptest::prelude::*;

/// Sign of the permutation that sorts the concatenation of `a` and `b`, by counting inversions.
fn inversion_sign(seq: &[usize]) -> i32 {
    let mut inv = 0;
    for i in 0..seq.len() {
        for j in i + 1..seq.len() {
            if seq[i] > seq[j] {
                inv += 1;
            }
        }
    }
    if inv % 2 == 0 {
        1
    } else {
        -1
    }
}

#[test]
fn complement_sign_matches_brute_force_up_to_eight() {
    for n in 0..=8 {
        for s in Subset::all(n) {
            let mut seq = s.elements();
            seq.extend(Subset::full(n).minus(s).elements());
            assert_eq!(
                complement_sign(s, n),
                inversion_sign(&seq),
                "I = {s}, n = {n}"
            );
        }
    }
}

#[test]
fn complement_sign_small_cases() {
    assert_eq!(complement_sign(Subset::new(&[2, 3]), 4), 1);
    assert_eq!(complement_sign(Subset::new(&[2]), 3), -1);
    assert_eq!(complement_sign(Subset::new(&[2, 4]), 4), -1);
    assert_eq!(complement_sign(Subset::empty(), 5), 1);
}

fn subset(n: usize) -> impl Strategy<Value = Subset> {
    (0u64..(1 << n)).prop_map(|bits| Subset::from_bits(bits << 1))
}

fn random_element(seed: u64, n: usize, weight: Option<usize>) -> ExteriorElement {
    let mut rng = common::rng(seed);
    let r = PolyRing::standard(2, 0);
    let terms = Subset::all(n)
        .into_iter()
        .filter(|s| weight.is_none_or(|w| s.len() == w))
        .map(|s| (s, common::any_poly(&mut rng, &r, 1, 0.4)))
        .collect();
    ExteriorElement::from_terms(&r, n, terms).unwrap()
}

fn random_dual(seed: u64, n: usize, w: usize) -> DualElement {
    let mut rng = common::rng(seed);
    let r = PolyRing::standard(2, 0);
    let terms = Subset::of_size(n, w)
        .into_iter()
        .map(|s| (s, common::any_poly(&mut rng, &r, 1, 0.4)))
        .collect();
    DualElement::from_terms(&r, n, w, terms).unwrap()
}

proptest! {
    #[test]
    fn shuffle_sign_is_the_sorting_sign(a in subset(7), b in subset(7)) {
        let b = b.minus(a);
        let mut seq = a.elements();
        seq.extend(b.elements());
        prop_assert_eq!(shuffle_sign(a, b), inversion_sign(&seq));
    }

    #[test]
    fn wedge_is_associative(s1 in any::<u64>(), s2 in any::<u64>(), s3 in any::<u64>()) {
        let (a, b, c) = (random_element(s1, 4, None), random_element(s2, 4, None), random_element(s3, 4, None));
        let left = wedge(&wedge(&a, &b).unwrap(), &c).unwrap();
        let right = wedge(&a, &wedge(&b, &c).unwrap()).unwrap();
        prop_assert_eq!(left, right);
    }

    #[test]
    fn contraction_by_a_wedge_is_iterated_contraction(
        s1 in any::<u64>(), s2 in any::<u64>(), s3 in any::<u64>(), w1 in 1usize..3, w2 in 1usize..3,
    ) {
        let f = random_dual(s1, 5, w1);
        let g = random_dual(s2, 5, w2);
        let a = random_element(s3, 5, None);
        let lhs = contract(&f.wedge(&g).unwrap(), &a).unwrap();
        let rhs = contract(&g, &contract(&f, &a).unwrap()).unwrap();
        prop_assert_eq!(lhs, rhs);
    }

    #[test]
    fn contraction_matrix_agrees_with_contract(seed in any::<u64>(), w in 1usize..4, from in 0usize..5) {
        let f = random_dual(seed, 4, w);
        prop_assume!(from >= w && from <= 4);
        let m = f.contraction_matrix(from);
        let r = f.ring().clone();
        for (c, s) in Subset::of_size(4, from).into_iter().enumerate() {
            let img = contract(&f, &ExteriorElement::basis(&r, 4, s)).unwrap();
            for (row, t) in Subset::of_size(4, from - w).into_iter().enumerate() {
                prop_assert_eq!(m.get(row, c), &img.coefficient(t));
            }
        }
    }

    #[test]
    fn linear_contraction_squares_to_zero(seed in any::<u64>()) {
        let f = random_dual(seed, 5, 1);
        let a = random_element(seed ^ 1, 5, None);
        prop_assert!(contract(&f, &contract(&f, &a).unwrap()).unwrap().is_zero());
    }
}
