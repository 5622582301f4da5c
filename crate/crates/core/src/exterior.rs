//! Exterior algebra on a free module of rank `n` and the contraction action of its dual.
//!
//! Basis elements `e_I` are indexed by subsets `I` of `{1, ..., n}`. The dual
//! basis element `e_S*` acts by left contraction:
//! `e_S* ⌟ e_I = sgn(S, I \ S) e_{I \ S}` when `S ⊆ I` and zero otherwise, where
//! `sgn(A, B)` is the sign of the shuffle that sorts the concatenation `A B`.

use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

use thiserror::Error;

use crate::matrix::PolyMatrix;
use crate::ring::{same_ring, PolyRing, Polynomial, RingError};

/// Largest supported rank.
pub const MAX_RANK: usize = 62;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum ExteriorError {
    #[error("index {0} is outside 1..={1}")]
    IndexOutOfRange(usize, usize),
    #[error("rank {0} exceeds the supported maximum")]
    RankTooLarge(usize),
    #[error("basis element {subset} does not have weight {weight}")]
    WeightMismatch { subset: Subset, weight: usize },
    #[error("operands live on different exterior algebras")]
    Mismatch,
    #[error("cannot parse dual element at byte {pos}: {msg}")]
    Parse { pos: usize, msg: String },
    #[error(transparent)]
    Ring(#[from] RingError),
}

/// A subset of `{1, ..., n}` stored as a bitmask (bit `k - 1` for element `k`).
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Default)]
pub struct Subset(u64);

impl Subset {
    pub fn empty() -> Subset {
        Subset(0)
    }

    /// Builds a subset from 1-based elements; duplicates are ignored.
    pub fn new(elems: &[usize]) -> Subset {
        let mut bits = 0u64;
        for &e in elems {
            assert!(
                (1..=MAX_RANK).contains(&e),
                "subset element {e} out of range"
            );
            bits |= 1 << (e - 1);
        }
        Subset(bits)
    }

    pub fn full(n: usize) -> Subset {
        assert!(n <= MAX_RANK);
        Subset(if n == 0 { 0 } else { u64::MAX >> (64 - n) })
    }

    pub fn from_bits(bits: u64) -> Subset {
        Subset(bits)
    }

    pub fn bits(self) -> u64 {
        self.0
    }

    /// Sorted 1-based elements.
    pub fn elements(self) -> Vec<usize> {
        (0..64)
            .filter(|k| self.0 >> k & 1 == 1)
            .map(|k| k + 1)
            .collect()
    }

    pub fn len(self) -> usize {
        self.0.count_ones() as usize
    }

    pub fn is_empty(self) -> bool {
        self.0 == 0
    }

    pub fn contains(self, e: usize) -> bool {
        (1..=64).contains(&e) && self.0 >> (e - 1) & 1 == 1
    }

    pub fn is_subset_of(self, other: Subset) -> bool {
        self.0 & !other.0 == 0
    }

    pub fn is_disjoint(self, other: Subset) -> bool {
        self.0 & other.0 == 0
    }

    pub fn union(self, other: Subset) -> Subset {
        Subset(self.0 | other.0)
    }

    pub fn minus(self, other: Subset) -> Subset {
        Subset(self.0 & !other.0)
    }

    /// Largest element, or 0 for the empty set.
    pub fn max_element(self) -> usize {
        64 - self.0.leading_zeros() as usize
    }

    /// All subsets of size `k` of `{1, ..., n}` in lexicographic order of their sorted lists.
    pub fn of_size(n: usize, k: usize) -> Vec<Subset> {
        let mut out = Vec::new();
        let mut cur = Vec::with_capacity(k);
        fn rec(start: usize, n: usize, k: usize, cur: &mut Vec<usize>, out: &mut Vec<Subset>) {
            if cur.len() == k {
                out.push(Subset::new(cur));
                return;
            }
            for e in start..=n {
                if n - e + 1 < k - cur.len() {
                    break;
                }
                cur.push(e);
                rec(e + 1, n, k, cur, out);
                cur.pop();
            }
        }
        rec(1, n, k, &mut cur, &mut out);
        out
    }

    /// All subsets of `{1, ..., n}`, by size and then lexicographically.
    pub fn all(n: usize) -> Vec<Subset> {
        (0..=n).flat_map(|k| Subset::of_size(n, k)).collect()
    }
}

impl Ord for Subset {
    fn cmp(&self, other: &Self) -> Ordering {
        self.len()
            .cmp(&other.len())
            .then_with(|| self.elements().cmp(&other.elements()))
    }
}

impl PartialOrd for Subset {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for Subset {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.elements().iter().map(|e| e.to_string()).collect();
        write!(f, "{{{}}}", parts.join(","))
    }
}

/// Sign of the permutation sorting the concatenation of two disjoint sorted lists.
pub fn shuffle_sign(a: Subset, b: Subset) -> i32 {
    debug_assert!(a.is_disjoint(b));
    // each element of b passes over the elements of a that exceed it
    let mut inversions = 0u32;
    let mut rest = b.0;
    while rest != 0 {
        let k = rest.trailing_zeros();
        let above = if k >= 63 { 0 } else { a.0 >> (k + 1) };
        inversions += above.count_ones();
        rest &= rest - 1;
    }
    if inversions.is_multiple_of(2) {
        1
    } else {
        -1
    }
}

/// The sign with `e_I ∧ e_{[n] \ I} = complement_sign(I, n) e_{[n]}`.
pub fn complement_sign(i: Subset, n: usize) -> i32 {
    assert!(
        i.is_subset_of(Subset::full(n)),
        "subset not contained in [n]"
    );
    shuffle_sign(i, Subset::full(n).minus(i))
}

fn signed(p: &Polynomial, s: i32) -> Polynomial {
    if s > 0 {
        p.clone()
    } else {
        -p
    }
}

fn accumulate(map: &mut BTreeMap<Subset, Polynomial>, key: Subset, p: Polynomial) {
    if p.is_zero() {
        return;
    }
    match map.remove(&key) {
        Some(old) => {
            let s = &old + &p;
            if !s.is_zero() {
                map.insert(key, s);
            }
        }
        None => {
            map.insert(key, p);
        }
    }
}

/// An element of the exterior algebra with polynomial coefficients.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ExteriorElement {
    ring: Arc<PolyRing>,
    n: usize,
    coeffs: BTreeMap<Subset, Polynomial>,
}

impl ExteriorElement {
    pub fn zero(ring: &Arc<PolyRing>, n: usize) -> ExteriorElement {
        assert!(n <= MAX_RANK);
        ExteriorElement {
            ring: ring.clone(),
            n,
            coeffs: BTreeMap::new(),
        }
    }

    /// The basis element `e_I`.
    pub fn basis(ring: &Arc<PolyRing>, n: usize, i: Subset) -> ExteriorElement {
        ExteriorElement::from_terms(ring, n, vec![(i, ring.one())]).expect("valid basis element")
    }

    pub fn from_terms(
        ring: &Arc<PolyRing>,
        n: usize,
        terms: Vec<(Subset, Polynomial)>,
    ) -> Result<ExteriorElement, ExteriorError> {
        if n > MAX_RANK {
            return Err(ExteriorError::RankTooLarge(n));
        }
        let mut coeffs = BTreeMap::new();
        for (s, p) in terms {
            if !s.is_subset_of(Subset::full(n)) {
                return Err(ExteriorError::IndexOutOfRange(s.max_element(), n));
            }
            if !same_ring(p.ring(), ring) {
                return Err(ExteriorError::Ring(RingError::RingMismatch));
            }
            accumulate(&mut coeffs, s, p);
        }
        Ok(ExteriorElement {
            ring: ring.clone(),
            n,
            coeffs,
        })
    }

    pub fn ring(&self) -> &Arc<PolyRing> {
        &self.ring
    }

    pub fn rank(&self) -> usize {
        self.n
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Subset, &Polynomial)> {
        self.coeffs.iter()
    }

    pub fn coefficient(&self, s: Subset) -> Polynomial {
        self.coeffs
            .get(&s)
            .cloned()
            .unwrap_or_else(|| self.ring.zero())
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// The exterior degree when all terms share it.
    pub fn homogeneous_weight(&self) -> Option<usize> {
        let mut it = self.coeffs.keys().map(|s| s.len());
        let first = it.next()?;
        it.all(|k| k == first).then_some(first)
    }

    pub fn add(&self, other: &ExteriorElement) -> ExteriorElement {
        let mut coeffs = self.coeffs.clone();
        for (s, p) in &other.coeffs {
            accumulate(&mut coeffs, *s, p.clone());
        }
        ExteriorElement {
            ring: self.ring.clone(),
            n: self.n,
            coeffs,
        }
    }

    pub fn scale(&self, c: &Polynomial) -> ExteriorElement {
        let mut coeffs = BTreeMap::new();
        for (s, p) in &self.coeffs {
            accumulate(&mut coeffs, *s, p * c);
        }
        ExteriorElement {
            ring: self.ring.clone(),
            n: self.n,
            coeffs,
        }
    }

    pub fn neg(&self) -> ExteriorElement {
        ExteriorElement {
            ring: self.ring.clone(),
            n: self.n,
            coeffs: self.coeffs.iter().map(|(s, p)| (*s, -p)).collect(),
        }
    }
}

/// `a ∧ b`.
pub fn wedge(a: &ExteriorElement, b: &ExteriorElement) -> Result<ExteriorElement, ExteriorError> {
    if a.n != b.n || !same_ring(&a.ring, &b.ring) {
        return Err(ExteriorError::Mismatch);
    }
    let mut coeffs = BTreeMap::new();
    for (i, p) in &a.coeffs {
        for (j, q) in &b.coeffs {
            if i.is_disjoint(*j) {
                accumulate(
                    &mut coeffs,
                    i.union(*j),
                    signed(&(p * q), shuffle_sign(*i, *j)),
                );
            }
        }
    }
    Ok(ExteriorElement {
        ring: a.ring.clone(),
        n: a.n,
        coeffs,
    })
}

/// An element of the `weight`-th exterior power of the dual module.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DualElement {
    ring: Arc<PolyRing>,
    n: usize,
    weight: usize,
    coeffs: BTreeMap<Subset, Polynomial>,
}

impl DualElement {
    pub fn zero(ring: &Arc<PolyRing>, n: usize, weight: usize) -> DualElement {
        assert!(n <= MAX_RANK);
        DualElement {
            ring: ring.clone(),
            n,
            weight,
            coeffs: BTreeMap::new(),
        }
    }

    /// The dual basis element `e_S*`.
    pub fn basis(ring: &Arc<PolyRing>, n: usize, s: Subset) -> DualElement {
        DualElement::from_terms(ring, n, s.len(), vec![(s, ring.one())])
            .expect("valid dual basis element")
    }

    pub fn from_terms(
        ring: &Arc<PolyRing>,
        n: usize,
        weight: usize,
        terms: Vec<(Subset, Polynomial)>,
    ) -> Result<DualElement, ExteriorError> {
        if n > MAX_RANK {
            return Err(ExteriorError::RankTooLarge(n));
        }
        let mut coeffs = BTreeMap::new();
        for (s, p) in terms {
            if !s.is_subset_of(Subset::full(n)) {
                return Err(ExteriorError::IndexOutOfRange(s.max_element(), n));
            }
            if s.len() != weight {
                return Err(ExteriorError::WeightMismatch { subset: s, weight });
            }
            if !same_ring(p.ring(), ring) {
                return Err(ExteriorError::Ring(RingError::RingMismatch));
            }
            accumulate(&mut coeffs, s, p);
        }
        Ok(DualElement {
            ring: ring.clone(),
            n,
            weight,
            coeffs,
        })
    }

    /// `sum_i c_i e_i*` for a weight-one element.
    pub fn linear(ring: &Arc<PolyRing>, coeffs: &[Polynomial]) -> DualElement {
        let n = coeffs.len();
        let terms = coeffs
            .iter()
            .enumerate()
            .map(|(k, p)| (Subset::new(&[k + 1]), p.clone()))
            .collect();
        DualElement::from_terms(ring, n, 1, terms).expect("valid linear form")
    }

    pub fn ring(&self) -> &Arc<PolyRing> {
        &self.ring
    }

    pub fn rank(&self) -> usize {
        self.n
    }

    pub fn weight(&self) -> usize {
        self.weight
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Subset, &Polynomial)> {
        self.coeffs.iter()
    }

    pub fn coefficient(&self, s: Subset) -> Polynomial {
        self.coeffs
            .get(&s)
            .cloned()
            .unwrap_or_else(|| self.ring.zero())
    }

    pub fn add(&self, other: &DualElement) -> Result<DualElement, ExteriorError> {
        if self.n != other.n || self.weight != other.weight || !same_ring(&self.ring, &other.ring) {
            return Err(ExteriorError::Mismatch);
        }
        let mut coeffs = self.coeffs.clone();
        for (s, p) in &other.coeffs {
            accumulate(&mut coeffs, *s, p.clone());
        }
        Ok(DualElement {
            ring: self.ring.clone(),
            n: self.n,
            weight: self.weight,
            coeffs,
        })
    }

    pub fn scale(&self, c: &Polynomial) -> DualElement {
        let mut coeffs = BTreeMap::new();
        for (s, p) in &self.coeffs {
            accumulate(&mut coeffs, *s, p * c);
        }
        DualElement {
            ring: self.ring.clone(),
            n: self.n,
            weight: self.weight,
            coeffs,
        }
    }

    /// Product in the exterior algebra of the dual, with the same shuffle signs as [`wedge`].
    pub fn wedge(&self, other: &DualElement) -> Result<DualElement, ExteriorError> {
        if self.n != other.n || !same_ring(&self.ring, &other.ring) {
            return Err(ExteriorError::Mismatch);
        }
        let mut coeffs = BTreeMap::new();
        for (i, p) in &self.coeffs {
            for (j, q) in &other.coeffs {
                if i.is_disjoint(*j) {
                    accumulate(
                        &mut coeffs,
                        i.union(*j),
                        signed(&(p * q), shuffle_sign(*i, *j)),
                    );
                }
            }
        }
        Ok(DualElement {
            ring: self.ring.clone(),
            n: self.n,
            weight: self.weight + other.weight,
            coeffs,
        })
    }

    /// Maps every coefficient into another ring by variable name.
    pub fn map_into(&self, target: &Arc<PolyRing>) -> Result<DualElement, ExteriorError> {
        let mut coeffs = BTreeMap::new();
        for (s, p) in &self.coeffs {
            accumulate(&mut coeffs, *s, p.map_into(target)?);
        }
        Ok(DualElement {
            ring: target.clone(),
            n: self.n,
            weight: self.weight,
            coeffs,
        })
    }

    /// Matrix of contraction from the `from`-th exterior power to the `(from - weight)`-th,
    /// with both bases in the order of [`Subset::of_size`].
    pub fn contraction_matrix(&self, from: usize) -> PolyMatrix {
        let src = Subset::of_size(self.n, from);
        let Some(to) = from.checked_sub(self.weight) else {
            return PolyMatrix::zero(&self.ring, 0, src.len());
        };
        let dst = Subset::of_size(self.n, to);
        let pos: BTreeMap<Subset, usize> = dst.iter().enumerate().map(|(k, s)| (*s, k)).collect();
        let mut m = PolyMatrix::zero(&self.ring, dst.len(), src.len());
        for (c, i) in src.iter().enumerate() {
            for (s, p) in &self.coeffs {
                if s.is_subset_of(*i) {
                    let rest = i.minus(*s);
                    m.set(pos[&rest], c, signed(p, shuffle_sign(*s, rest)));
                }
            }
        }
        m
    }
}

fn write_terms(
    f: &mut fmt::Formatter<'_>,
    ring: &Arc<PolyRing>,
    coeffs: &BTreeMap<Subset, Polynomial>,
) -> fmt::Result {
    if coeffs.is_empty() {
        return write!(f, "0");
    }
    for (k, (s, p)) in coeffs.iter().enumerate() {
        let (neg, body) = if p.nterms() == 1 && p.terms()[0].0.is_negative() {
            (true, -p)
        } else {
            (false, p.clone())
        };
        if k == 0 {
            if neg {
                write!(f, "-")?;
            }
        } else {
            write!(f, " {} ", if neg { '-' } else { '+' })?;
        }
        let basis = format!("e{s}");
        if body == ring.one() {
            write!(f, "{basis}")?;
        } else if body.nterms() == 1 {
            write!(f, "{body}*{basis}")?;
        } else {
            write!(f, "({body})*{basis}")?;
        }
    }
    Ok(())
}

impl fmt::Display for DualElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write_terms(f, &self.ring, &self.coeffs)
    }
}

impl fmt::Display for ExteriorElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write_terms(f, &self.ring, &self.coeffs)
    }
}

/// `f ⌟ a`, the left contraction of `a` by `f`.
pub fn contract(f: &DualElement, a: &ExteriorElement) -> Result<ExteriorElement, ExteriorError> {
    if f.n != a.n || !same_ring(&f.ring, &a.ring) {
        return Err(ExteriorError::Mismatch);
    }
    let mut coeffs = BTreeMap::new();
    for (s, p) in &f.coeffs {
        for (i, q) in &a.coeffs {
            if s.is_subset_of(*i) {
                let rest = i.minus(*s);
                accumulate(&mut coeffs, rest, signed(&(p * q), shuffle_sign(*s, rest)));
            }
        }
    }
    Ok(ExteriorElement {
        ring: a.ring.clone(),
        n: a.n,
        coeffs,
    })
}

/// Whether contracting by `g` and then by `f` is the zero operator.
pub fn dual_compose_is_zero(f: &DualElement, g: &DualElement) -> Result<bool, ExteriorError> {
    if f.n != g.n || !same_ring(&f.ring, &g.ring) {
        return Err(ExteriorError::Mismatch);
    }
    let k = f.weight + g.weight;
    if k > f.n {
        return Ok(true);
    }
    // only basis elements of exterior degree k can survive both contractions
    for i in Subset::of_size(f.n, k) {
        let e = ExteriorElement::basis(&f.ring, f.n, i);
        if !contract(f, &contract(g, &e)?)?.is_zero() {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Parses a dual element such as `x1*e{1} + x2*e{2}`, `e{1,3,4}` or `(x1 - x2)*e{1,2}`.
///
/// `weight` is needed only to type the zero element; otherwise it is inferred
/// and, if given, checked.
pub fn parse_dual(
    ring: &Arc<PolyRing>,
    n: usize,
    s: &str,
    weight: Option<usize>,
) -> Result<DualElement, ExteriorError> {
    let perr = |pos: usize, msg: &str| ExteriorError::Parse {
        pos,
        msg: msg.to_string(),
    };
    let bytes = s.as_bytes();
    let mut terms: Vec<(Subset, Polynomial)> = Vec::new();
    let mut pos = 0;
    let mut depth = 0i32;
    let mut start = 0;
    let mut pieces: Vec<(usize, usize)> = Vec::new();
    while pos < bytes.len() {
        match bytes[pos] {
            b'(' => depth += 1,
            b')' => depth -= 1,
            b'+' | b'-' if depth == 0 && pos > start && !s[start..pos].trim().is_empty() => {
                pieces.push((start, pos));
                start = pos;
            }
            _ => {}
        }
        pos += 1;
    }
    if depth != 0 {
        return Err(perr(s.len(), "unbalanced parentheses"));
    }
    pieces.push((start, s.len()));
    for (a, b) in pieces {
        let piece = s[a..b].trim();
        if piece.is_empty() {
            continue;
        }
        let (neg, body) = match piece.as_bytes()[0] {
            b'-' => (true, piece[1..].trim()),
            b'+' => (false, piece[1..].trim()),
            _ => (false, piece),
        };
        let Some(brace) = body.rfind("e{") else {
            if ring.parse(body).map(|p| p.is_zero()).unwrap_or(false) {
                continue;
            }
            return Err(perr(a, "term has no basis element e{...}"));
        };
        if !body.ends_with('}') {
            return Err(perr(b, "expected '}' at end of term"));
        }
        let inner = &body[brace + 2..body.len() - 1];
        let mut elems = Vec::new();
        for tok in inner.split(',').map(str::trim).filter(|t| !t.is_empty()) {
            let e: usize = tok.parse().map_err(|_| perr(a, "bad index in e{...}"))?;
            if e == 0 || e > n {
                return Err(ExteriorError::IndexOutOfRange(e, n));
            }
            if elems.contains(&e) {
                return Err(perr(a, "repeated index in e{...}"));
            }
            elems.push(e);
        }
        // indices may be listed in any order; reorder with the matching sign
        let mut sign = 1;
        for x in 0..elems.len() {
            for y in x + 1..elems.len() {
                if elems[x] > elems[y] {
                    sign = -sign;
                }
            }
        }
        let coef_src = body[..brace].trim_end();
        let coef = if coef_src.is_empty() {
            ring.one()
        } else {
            let c = coef_src
                .strip_suffix('*')
                .ok_or_else(|| perr(a, "expected '*' before e{...}"))?;
            ring.parse(c)?
        };
        let coef = if (sign < 0) != neg { -coef } else { coef };
        terms.push((Subset::new(&elems), coef));
    }
    let w = match (weight, terms.first()) {
        (Some(w), _) => w,
        (None, Some((s, _))) => s.len(),
        (None, None) => return Err(perr(0, "cannot infer the weight of an empty dual element")),
    };
    DualElement::from_terms(ring, n, w, terms)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn setup() -> (Arc<PolyRing>, usize) {
        (PolyRing::standard(4, 0), 4)
    }

    fn e(r: &Arc<PolyRing>, n: usize, s: &[usize]) -> ExteriorElement {
        ExteriorElement::basis(r, n, Subset::new(s))
    }

    #[test]
    fn wedge_examples() {
        let (r, n) = setup();
        assert_eq!(
            wedge(&e(&r, n, &[1]), &e(&r, n, &[2])).unwrap(),
            e(&r, n, &[1, 2])
        );
        assert_eq!(
            wedge(&e(&r, n, &[2]), &e(&r, n, &[1])).unwrap(),
            e(&r, n, &[1, 2]).neg()
        );
        assert!(wedge(&e(&r, n, &[1]), &e(&r, n, &[1])).unwrap().is_zero());
    }

    #[test]
    fn contraction_examples() {
        let (r, n) = setup();
        let e12 = e(&r, n, &[1, 2]);
        assert_eq!(
            contract(&DualElement::basis(&r, n, Subset::new(&[1])), &e12).unwrap(),
            e(&r, n, &[2])
        );
        assert_eq!(
            contract(&DualElement::basis(&r, n, Subset::new(&[2])), &e12).unwrap(),
            e(&r, n, &[1]).neg()
        );
        let psi = parse_dual(&r, n, "x1*e{1} + x2*e{2}", None).unwrap();
        let expect = e(&r, n, &[2])
            .scale(&r.var(0))
            .add(&e(&r, n, &[1]).scale(&r.var(1)).neg());
        assert_eq!(contract(&psi, &e12).unwrap(), expect);
    }

    #[test]
    fn complement_sign_examples() {
        assert_eq!(complement_sign(Subset::new(&[1, 2]), 4), 1);
        // (2,3,1,4) has two inversions
        assert_eq!(complement_sign(Subset::new(&[2, 3]), 4), 1);
        assert_eq!(complement_sign(Subset::new(&[2]), 3), -1);
        assert_eq!(complement_sign(Subset::new(&[2, 4]), 4), -1);
        assert_eq!(complement_sign(Subset::empty(), 5), 1);
    }

    #[test]
    fn generic_quadratic_dual_does_not_square_to_zero() {
        let r = PolyRing::new(&["x12", "x13", "x14", "x23", "x24", "x34"], 0).unwrap();
        let f2 = parse_dual(
            &r,
            4,
            "x12*e{1,2} + x13*e{1,3} + x14*e{1,4} + x23*e{2,3} + x24*e{2,4} + x34*e{3,4}",
            None,
        )
        .unwrap();
        assert!(!dual_compose_is_zero(&f2, &f2).unwrap());
        let top = contract(
            &f2,
            &contract(&f2, &ExteriorElement::basis(&r, 4, Subset::full(4))).unwrap(),
        )
        .unwrap();
        let pf = r.parse("x12*x34 - x13*x24 + x14*x23").unwrap();
        let c = top.coefficient(Subset::empty());
        assert!(
            c == pf.scale(&r.field().from_i64(2)) || c == pf.scale(&r.field().from_i64(-2)),
            "{c}"
        );
        let killed = parse_dual(&r, 4, "x23*e{2,3} + x24*e{2,4} + x34*e{3,4}", None).unwrap();
        assert!(dual_compose_is_zero(&killed, &killed).unwrap());
        let e1 = DualElement::basis(&r, 4, Subset::new(&[1]));
        assert!(dual_compose_is_zero(&e1, &e1).unwrap());
    }

    #[test]
    fn dual_parsing_and_printing() {
        let (r, n) = setup();
        let f = parse_dual(&r, n, "(x1 - x2)*e{1,2} - 3*e{3,4} + e{2,1}", None).unwrap();
        assert_eq!(f.weight(), 2);
        assert_eq!(
            f.coefficient(Subset::new(&[1, 2])),
            r.parse("x1 - x2 - 1").unwrap()
        );
        let printed = f.to_string();
        assert_eq!(parse_dual(&r, n, &printed, None).unwrap(), f);
        assert_eq!(
            parse_dual(&r, n, "0", Some(2)).unwrap(),
            DualElement::zero(&r, n, 2)
        );
        assert!(parse_dual(&r, n, "x1*e{5}", None).is_err());
        assert!(parse_dual(&r, n, "x1*e{1} + e{1,2}", None).is_err());
    }

    #[test]
    fn contraction_matrix_matches_contract() {
        let (r, n) = setup();
        let f = parse_dual(&r, n, "x1*e{1,2} + x3*e{2,4} - e{1,3}", None).unwrap();
        let m = f.contraction_matrix(3);
        for (c, i) in Subset::of_size(n, 3).into_iter().enumerate() {
            let img = contract(&f, &ExteriorElement::basis(&r, n, i)).unwrap();
            for (row, j) in Subset::of_size(n, 1).into_iter().enumerate() {
                assert_eq!(m.get(row, c), &img.coefficient(j));
            }
        }
    }
}
