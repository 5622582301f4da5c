//! Buchberger's algorithm with cofactor tracking and ideal membership witnesses.

use std::collections::BTreeSet;
use std::sync::Arc;

use crate::ring::{same_ring, Monomial, MonomialOrder, PolyRing, Polynomial, RingError, Scalar};

/// A reduced Gröbner basis together with the matrix expressing it in the input generators.
#[derive(Clone, Debug)]
pub struct GroebnerBasis {
    ring: Arc<PolyRing>,
    inputs: Vec<Polynomial>,
    basis: Vec<Polynomial>,
    /// `basis[k] = sum_j transformation[k][j] * inputs[j]`.
    transformation: Vec<Vec<Polynomial>>,
}

impl GroebnerBasis {
    pub fn ring(&self) -> &Arc<PolyRing> {
        &self.ring
    }

    pub fn generators(&self) -> &[Polynomial] {
        &self.basis
    }

    pub fn inputs(&self) -> &[Polynomial] {
        &self.inputs
    }

    pub fn transformation(&self) -> &[Vec<Polynomial>] {
        &self.transformation
    }

    pub fn order(&self) -> MonomialOrder {
        self.ring.order()
    }

    pub fn len(&self) -> usize {
        self.basis.len()
    }

    pub fn is_empty(&self) -> bool {
        self.basis.is_empty()
    }

    /// Every S-polynomial of basis pairs reduces to zero.
    pub fn is_groebner(&self) -> bool {
        for i in 0..self.basis.len() {
            for j in i + 1..self.basis.len() {
                let s = s_polynomial(&self.basis[i], &self.basis[j]);
                if !reduce(&s, &self.basis).0.is_zero() {
                    return false;
                }
            }
        }
        true
    }

    /// Checks the recorded combinations against the inputs.
    pub fn transformation_is_consistent(&self) -> bool {
        self.basis
            .iter()
            .zip(&self.transformation)
            .all(|(g, row)| &combine(&self.ring, row, &self.inputs) == g)
    }
}

/// Cofactors `q_i` with `p = sum q_i g_i` over the original generators.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MembershipWitness {
    pub cofactors: Vec<Polynomial>,
}

impl MembershipWitness {
    /// Recomputes `sum q_i g_i`.
    pub fn evaluate(&self, gens: &[Polynomial]) -> Polynomial {
        let ring = gens
            .first()
            .map(|g| g.ring().clone())
            .expect("nonempty generator list");
        combine(&ring, &self.cofactors, gens)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Membership {
    Member(MembershipWitness),
    NotMember(Polynomial),
}

impl Membership {
    pub fn is_member(&self) -> bool {
        matches!(self, Membership::Member(_))
    }
}

fn combine(ring: &Arc<PolyRing>, coeffs: &[Polynomial], gens: &[Polynomial]) -> Polynomial {
    let mut acc = ring.zero();
    for (q, g) in coeffs.iter().zip(gens) {
        if !q.is_zero() {
            acc = &acc + &(q * g);
        }
    }
    acc
}

fn check_rings(p: Option<&Polynomial>, gens: &[Polynomial]) -> Result<(), RingError> {
    let Some(first) = p.or(gens.first()) else {
        return Ok(());
    };
    if gens.iter().any(|g| !same_ring(g.ring(), first.ring())) {
        return Err(RingError::RingMismatch);
    }
    Ok(())
}

fn s_polynomial(f: &Polynomial, g: &Polynomial) -> Polynomial {
    let (fc, fm) = f.leading_term().unwrap();
    let (gc, gm) = g.leading_term().unwrap();
    let l = fm.lcm(gm);
    let a = f.mul_term(&fc.inverse(), &l.div(fm).unwrap());
    let b = g.mul_term(&gc.inverse(), &l.div(gm).unwrap());
    &a - &b
}

/// Full reduction of `p` by `basis`; returns the remainder and one cofactor per basis element.
fn reduce(p: &Polynomial, basis: &[Polynomial]) -> (Polynomial, Vec<Polynomial>) {
    let ring = p.ring().clone();
    let lts: Vec<(Scalar, Monomial)> = basis
        .iter()
        .map(|g| {
            g.leading_term()
                .map(|(c, m)| (c.inverse(), m.clone()))
                .unwrap()
        })
        .collect();
    let mut cof: Vec<Vec<(Scalar, Monomial)>> = vec![Vec::new(); basis.len()];
    let mut rem = Vec::new();
    let mut cur = p.clone();
    while let Some((c, m)) = cur.leading_term().cloned() {
        match lts.iter().position(|(_, lm)| lm.divides(&m)) {
            Some(k) => {
                let q = m.div(&lts[k].1).unwrap();
                let qc = &c * &lts[k].0;
                cur = &cur - &basis[k].mul_term(&qc, &q);
                cof[k].push((qc, q));
            }
            None => {
                cur = &cur - &Polynomial::monomial(&ring, c.clone(), m.clone());
                rem.push((c, m));
            }
        }
    }
    let cof = cof
        .into_iter()
        .map(|t| Polynomial::from_terms(&ring, t))
        .collect();
    (Polynomial::from_terms(&ring, rem), cof)
}

/// Computes the reduced Gröbner basis of `gens` under `order`.
///
/// Zero generators are ignored; an all-zero input gives the empty basis.
/// The result lives in the generators' ring re-sorted to `order`.
pub fn buchberger(gens: &[Polynomial], order: MonomialOrder) -> Result<GroebnerBasis, RingError> {
    check_rings(None, gens)?;
    let Some(first) = gens.first() else {
        return Err(RingError::InvalidRing("empty generator list".into()));
    };
    let ring = first.ring().with_order(order);
    let inputs: Vec<Polynomial> = gens
        .iter()
        .map(|g| g.map_into(&ring))
        .collect::<Result<_, _>>()?;
    let m = inputs.len();
    let unit_row = |j: usize, c: &Scalar| -> Vec<Polynomial> {
        (0..m)
            .map(|k| {
                if k == j {
                    Polynomial::constant(&ring, c.clone())
                } else {
                    ring.zero()
                }
            })
            .collect()
    };

    let mut basis: Vec<Polynomial> = Vec::new();
    let mut trans: Vec<Vec<Polynomial>> = Vec::new();
    let mut pairs: BTreeSet<(PairKey, usize, usize)> = BTreeSet::new();

    let add = |basis: &mut Vec<Polynomial>,
               trans: &mut Vec<Vec<Polynomial>>,
               pairs: &mut BTreeSet<(PairKey, usize, usize)>,
               g: Polynomial,
               row: Vec<Polynomial>| {
        let inv = g.leading_coeff().unwrap().inverse();
        let g = g.scale(&inv);
        let row: Vec<Polynomial> = row.iter().map(|q| q.scale(&inv)).collect();
        let k = basis.len();
        let gm = g.leading_monomial().unwrap().clone();
        for (i, h) in basis.iter().enumerate() {
            let hm = h.leading_monomial().unwrap();
            if hm.is_coprime(&gm) {
                continue;
            }
            pairs.insert((PairKey::new(&ring, hm.lcm(&gm)), i, k));
        }
        basis.push(g);
        trans.push(row);
    };

    for (j, g) in inputs.iter().enumerate() {
        if g.is_zero() {
            continue;
        }
        let (r, cof) = reduce(g, &basis);
        if r.is_zero() {
            continue;
        }
        let row = subtract_rows(&ring, &unit_row(j, &ring.field().one()), &cof, &trans);
        add(&mut basis, &mut trans, &mut pairs, r, row);
    }

    while let Some((_, i, j)) = pairs.pop_first() {
        let s = s_polynomial(&basis[i], &basis[j]);
        let (r, cof) = reduce(&s, &basis);
        if r.is_zero() {
            continue;
        }
        // the S-polynomial as a combination of basis[i] and basis[j]
        let (ic, im) = basis[i].leading_term().unwrap();
        let (jc, jm) = basis[j].leading_term().unwrap();
        let l = im.lcm(jm);
        let ai = Polynomial::monomial(&ring, ic.inverse(), l.div(im).unwrap());
        let aj = Polynomial::monomial(&ring, -&jc.inverse(), l.div(jm).unwrap());
        let srow: Vec<Polynomial> = (0..m)
            .map(|k| &(&ai * &trans[i][k]) + &(&aj * &trans[j][k]))
            .collect();
        let row = subtract_rows(&ring, &srow, &cof, &trans);
        add(&mut basis, &mut trans, &mut pairs, r, row);
    }

    let (basis, trans) = interreduce(&ring, basis, trans);
    let gb = GroebnerBasis {
        ring,
        inputs,
        basis,
        transformation: trans,
    };
    debug_assert!(gb.transformation_is_consistent());
    Ok(gb)
}

/// `row - sum_k cof[k] * trans[k]`.
fn subtract_rows(
    ring: &Arc<PolyRing>,
    row: &[Polynomial],
    cof: &[Polynomial],
    trans: &[Vec<Polynomial>],
) -> Vec<Polynomial> {
    let mut out = row.to_vec();
    for (c, t) in cof.iter().zip(trans) {
        if c.is_zero() {
            continue;
        }
        for (o, q) in out.iter_mut().zip(t) {
            if !q.is_zero() {
                *o = &*o - &(c * q);
            }
        }
    }
    debug_assert!(out.iter().all(|q| same_ring(q.ring(), ring)));
    out
}

/// Drops redundant leading terms and tail-reduces, keeping transformation rows in sync.
fn interreduce(
    ring: &Arc<PolyRing>,
    basis: Vec<Polynomial>,
    trans: Vec<Vec<Polynomial>>,
) -> (Vec<Polynomial>, Vec<Vec<Polynomial>>) {
    let mut keep: Vec<usize> = Vec::new();
    for i in 0..basis.len() {
        let mi = basis[i].leading_monomial().unwrap();
        let redundant = (0..basis.len()).any(|j| {
            if j == i {
                return false;
            }
            let mj = basis[j].leading_monomial().unwrap();
            // equal leading monomials: keep the earliest
            mj.divides(mi) && (mj != mi || j < i)
        });
        if !redundant {
            keep.push(i);
        }
    }
    let mut b: Vec<Polynomial> = keep.iter().map(|&i| basis[i].clone()).collect();
    let mut t: Vec<Vec<Polynomial>> = keep.iter().map(|&i| trans[i].clone()).collect();
    for k in 0..b.len() {
        let others: Vec<Polynomial> = (0..b.len())
            .filter(|&j| j != k)
            .map(|j| b[j].clone())
            .collect();
        let other_t: Vec<Vec<Polynomial>> = (0..b.len())
            .filter(|&j| j != k)
            .map(|j| t[j].clone())
            .collect();
        // the leading term is not divisible by the others, so only the tail changes
        let (r, cof) = reduce(&b[k], &others);
        t[k] = subtract_rows(ring, &t[k], &cof, &other_t);
        b[k] = r;
    }
    let mut idx: Vec<usize> = (0..b.len()).collect();
    idx.sort_by(|&x, &y| {
        ring.compare(
            b[x].leading_monomial().unwrap(),
            b[y].leading_monomial().unwrap(),
        )
    });
    (
        idx.iter().map(|&i| b[i].clone()).collect(),
        idx.iter().map(|&i| t[i].clone()).collect(),
    )
}

/// Pair key ordering by the lcm under the ring's monomial order (normal selection).
#[derive(Clone, Debug, PartialEq, Eq)]
struct PairKey {
    ring: Arc<PolyRing>,
    lcm: Monomial,
}

impl PairKey {
    fn new(ring: &Arc<PolyRing>, lcm: Monomial) -> PairKey {
        PairKey {
            ring: ring.clone(),
            lcm,
        }
    }
}

impl PartialOrd for PairKey {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for PairKey {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        self.ring.compare(&self.lcm, &other.lcm)
    }
}

/// Divides `p` by the basis: `p = sum cofactors[k] * basis[k] + remainder`.
///
/// No term of the remainder is divisible by a leading term of the basis.
pub fn normal_form(
    p: &Polynomial,
    gb: &GroebnerBasis,
) -> Result<(Polynomial, Vec<Polynomial>), RingError> {
    if p.ring().variables() != gb.ring.variables() || p.ring().field() != gb.ring.field() {
        return Err(RingError::RingMismatch);
    }
    let p = p.map_into(&gb.ring)?;
    if gb.basis.is_empty() {
        return Ok((p, Vec::new()));
    }
    Ok(reduce(&p, &gb.basis))
}

/// Decides whether `p` lies in the ideal generated by `gens`.
///
/// Member results carry cofactors over the original generators; the identity
/// `p = sum q_i g_i` is checked before returning. When `p` and all generators
/// are homogeneous, every cofactor is homogeneous of the complementary degree.
pub fn ideal_membership(p: &Polynomial, gens: &[Polynomial]) -> Result<Membership, RingError> {
    check_rings(Some(p), gens)?;
    let ring = p.ring().clone();
    if p.is_zero() {
        return Ok(Membership::Member(MembershipWitness {
            cofactors: vec![ring.zero(); gens.len()],
        }));
    }
    if gens.iter().all(|g| g.is_zero()) {
        return Ok(Membership::NotMember(p.clone()));
    }
    let gb = buchberger(gens, ring.order())?;
    let (r, cof) = normal_form(p, &gb)?;
    if !r.is_zero() {
        return Ok(Membership::NotMember(r.map_into(&ring)?));
    }
    let mut q: Vec<Polynomial> = vec![ring.zero(); gens.len()];
    for (c, row) in cof.iter().zip(&gb.transformation) {
        if c.is_zero() {
            continue;
        }
        for (qj, t) in q.iter_mut().zip(row) {
            if !t.is_zero() {
                *qj = &*qj + &(c * t);
            }
        }
    }
    if let Ok(dp) = p.homogeneous_degree() {
        let degs: Option<Vec<Option<i64>>> = gens
            .iter()
            .map(|g| {
                if g.is_zero() {
                    Some(None)
                } else {
                    g.homogeneous_degree().ok().map(Some)
                }
            })
            .collect();
        if let Some(degs) = degs {
            for (qj, dg) in q.iter_mut().zip(degs) {
                *qj = match dg {
                    Some(dg) => qj.homogeneous_component(dp - dg),
                    None => ring.zero(),
                };
            }
        }
    }
    let w = MembershipWitness { cofactors: q };
    assert_eq!(&w.evaluate(gens), p, "membership witness failed to verify");
    Ok(Membership::Member(w))
}
