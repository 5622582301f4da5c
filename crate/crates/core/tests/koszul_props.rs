mod common;

use std::sync::Arc;

use dmflag::diffmod::{fold, homology_hilbert, DiffModError};
use dmflag::exterior::{DualElement, Subset};
use dmflag::koszul::{koszul_dm, KoszulData, KoszulError};
use dmflag::ring::{PolyRing, Polynomial};
use proptest::prelude::*;
use rand_chacha::ChaCha8Rng;

fn random_dual(
    rng: &mut ChaCha8Rng,
    ring: &Arc<PolyRing>,
    n: usize,
    w: usize,
    coef: impl Fn(&mut ChaCha8Rng) -> Polynomial,
) -> DualElement {
    let terms = Subset::of_size(n, w)
        .into_iter()
        .map(|s| (s, coef(rng)))
        .collect();
    DualElement::from_terms(ring, n, w, terms).unwrap()
}

/// Random Koszul data whose even-weight duals are decomposable, so they compose to zero.
fn char0_data(seed: u64, n: usize) -> KoszulData {
    let mut rng = common::rng(seed);
    let r = PolyRing::standard(3, 0);
    let mut data = KoszulData::new(&r, n).ungraded();
    let poly = |rng: &mut ChaCha8Rng| {
        common::any_poly(rng, &PolyRing::standard(3, 0), 2, 0.3)
            .map_into(&r)
            .unwrap()
    };
    let lin: Vec<DualElement> = (0..4)
        .map(|_| random_dual(&mut rng, &r, n, 1, poly))
        .collect();
    for w in (1..=n).step_by(2) {
        data = data.with_dual(random_dual(&mut rng, &r, n, w, poly));
    }
    if n >= 2 {
        data = data.with_dual(lin[0].wedge(&lin[1]).unwrap());
    }
    if n >= 4 {
        let f4 = lin[0]
            .wedge(&lin[1])
            .unwrap()
            .wedge(&lin[2])
            .unwrap()
            .wedge(&lin[3])
            .unwrap();
        data = data.with_dual(f4);
    }
    data
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(100))]

    #[test]
    fn arbitrary_duals_in_characteristic_two(seed in any::<u64>(), n in 1usize..=5) {
        let mut rng = common::rng(seed);
        let r = PolyRing::standard(3, 2);
        let mut data = KoszulData::new(&r, n).ungraded();
        for w in 1..=n {
            let rr = r.clone();
            data = data.with_dual(random_dual(&mut rng, &r, n, w, move |g| common::any_poly(g, &rr, 2, 0.3)));
        }
        let flag = koszul_dm(&data, 0);
        prop_assert!(flag.is_ok(), "{:?}", flag.err());
    }

    #[test]
    fn decomposable_even_duals_in_characteristic_zero(seed in any::<u64>(), n in 1usize..=5) {
        let data = char0_data(seed, n);
        let flag = koszul_dm(&data, 0);
        prop_assert!(flag.is_ok(), "{:?}", flag.err());
    }
}

#[test]
fn graded_koszul_modules_follow_the_twist_rule() {
    let mut rng = common::rng(7);
    let r = PolyRing::standard(3, 0);
    let k = common::koszul_vars(&r);
    for a in [0i64, 1] {
        let deg = |w: usize| w as i64 - (w as i64 - 1) * a;
        let rr = r.clone();
        let alpha = random_dual(&mut rng, &r, 3, 1, |g| common::homogeneous(g, &rr, 1, 0.7));
        let beta = random_dual(&mut rng, &r, 3, 1, |g| common::homogeneous(g, &rr, 1, 0.7));
        let mut data = KoszulData::new(&r, 3).with_dual(k.psi().clone());
        let f2 = alpha.wedge(&beta).unwrap();
        // alpha ∧ beta has coefficients of degree 2, which matches weight 2 only when a = 0
        if deg(2) == 2 {
            data = data.with_dual(f2);
        }
        data = data.with_dual(random_dual(&mut rng, &r, 3, 3, |g| {
            common::homogeneous(g, &rr, deg(3), 0.7)
        }));
        let flag = koszul_dm(&data, a).unwrap();
        assert!(flag.dm().is_graded());
        let expect: Vec<i64> = Subset::all(3)
            .iter()
            .map(|s| s.len() as i64 * (1 - a))
            .collect();
        assert_eq!(flag.dm().twists(), expect.as_slice());
    }
}

#[test]
fn only_f1_reproduces_the_fold() {
    for n in 1..=4 {
        let r = PolyRing::standard(n, 0);
        let k = common::koszul_vars(&r);
        let data = KoszulData::new(&r, n).with_dual(k.psi().clone());
        let flag = koszul_dm(&data, 0).unwrap();
        assert_eq!(flag, fold(k.complex(), 0));
        assert_eq!(homology_hilbert(flag.dm(), 4).unwrap().total(), 1);
    }
}

#[test]
fn a_nonvanishing_even_square_is_rejected_or_breaks_square_zero() {
    let r = PolyRing::standard(1, 0);
    let f2 = dmflag::exterior::parse_dual(&r, 4, "e{1,2} + e{3,4}", None).unwrap();
    let data = KoszulData::new(&r, 4).ungraded().with_dual(f2);
    assert_eq!(
        koszul_dm(&data, 0),
        Err(KoszulError::PreconditionViolated { i: 2, j: 2 })
    );
    let unchecked = dmflag::koszul::assemble(&data, 0);
    assert!(matches!(
        unchecked,
        Err(KoszulError::DiffMod(DiffModError::NotSquareZero { .. }))
    ));
    // the same data is fine in characteristic two
    let r2 = PolyRing::standard(1, 2);
    let f2 = dmflag::exterior::parse_dual(&r2, 4, "e{1,2} + e{3,4}", None).unwrap();
    assert!(koszul_dm(&KoszulData::new(&r2, 4).ungraded().with_dual(f2), 0).is_ok());
}
