mod common;

use dmflag::groebner::{buchberger, ideal_membership, normal_form, Membership};
use dmflag::ring::{Monomial, MonomialOrder, PolyRing, Polynomial};
use proptest::prelude::*;

/// Membership in a monomial ideal: every term is divisible by some generator.
fn monomial_oracle(p: &Polynomial, gens: &[Monomial]) -> bool {
    p.terms()
        .iter()
        .all(|(_, m)| gens.iter().any(|g| g.divides(m)))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn monomial_ideals_match_the_divisibility_oracle(
        gens in prop::collection::vec(prop::array::uniform3(0u32..3), 1..4),
        terms in prop::collection::vec((1i64..4, prop::array::uniform3(0u32..4)), 0..5),
    ) {
        let r = PolyRing::standard(3, 0);
        let gm: Vec<Monomial> = gens.iter().map(|e| Monomial::new(e.to_vec())).collect();
        let gp: Vec<Polynomial> = gm.iter().map(|m| Polynomial::monomial(&r, r.field().one(), m.clone())).collect();
        let p = Polynomial::from_terms(&r, terms.iter().map(|(c, e)| (r.field().from_i64(*c), Monomial::new(e.to_vec()))).collect());
        let got = ideal_membership(&p, &gp).unwrap();
        prop_assert_eq!(got.is_member(), monomial_oracle(&p, &gm));
    }

    #[test]
    fn combinations_are_members_with_verified_witnesses(seed in any::<u64>(), ch in prop::sample::select(vec![0u64, 3, 32003])) {
        let mut rng = common::rng(seed);
        let r = PolyRing::standard(3, ch);
        let gens: Vec<Polynomial> = (0..2).map(|_| common::homogeneous(&mut rng, &r, 2, 0.5)).collect();
        let p = gens.iter().fold(r.zero(), |acc, g| &acc + &(g * &common::homogeneous(&mut rng, &r, 1, 0.5)));
        match ideal_membership(&p, &gens).unwrap() {
            Membership::Member(w) => prop_assert_eq!(w.evaluate(&gens), p),
            Membership::NotMember(nf) => prop_assert!(false, "combination reported outside with remainder {}", nf),
        }
    }

    #[test]
    fn buchberger_output_is_a_reduced_groebner_basis(seed in any::<u64>(), lex in any::<bool>()) {
        let mut rng = common::rng(seed);
        let r = PolyRing::standard(3, 0);
        let gens: Vec<Polynomial> = (0..3).map(|_| common::any_poly(&mut rng, &r, 2, 0.4)).collect();
        prop_assume!(gens.iter().any(|g| !g.is_zero()));
        let order = if lex { MonomialOrder::Lex } else { MonomialOrder::Grevlex };
        let gb = buchberger(&gens, order).unwrap();
        prop_assert!(gb.is_groebner());
        prop_assert!(gb.transformation_is_consistent());
        for g in &gens {
            let (rem, _) = normal_form(g, &gb).unwrap();
            prop_assert!(rem.is_zero());
        }
    }
}

#[test]
fn linear_term_is_outside_the_square_ideal() {
    let r = PolyRing::standard(2, 0);
    let gens = vec![r.parse("x1^2").unwrap(), r.parse("x1*x2").unwrap()];
    match ideal_membership(&r.parse("x1").unwrap(), &gens).unwrap() {
        Membership::NotMember(nf) => assert_eq!(nf, r.parse("x1").unwrap()),
        Membership::Member(_) => panic!("x1 is not in (x1^2, x1 x2)"),
    }
}

#[test]
fn homogeneous_membership_has_homogeneous_cofactors() {
    let r = PolyRing::standard(2, 0);
    let gens = vec![r.var(0), r.var(1)];
    let p = r.parse("x1^2 + 3*x1*x2 - x2^2").unwrap();
    let Membership::Member(w) = ideal_membership(&p, &gens).unwrap() else {
        panic!("member expected")
    };
    for q in &w.cofactors {
        assert!(q.is_zero() || q.is_homogeneous_of(1));
    }
}
