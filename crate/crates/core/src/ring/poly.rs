use std::collections::HashMap;
use std::fmt;
use std::hash::{Hash, Hasher};
use std::ops::{Add, Mul, Neg, Sub};
use std::sync::Arc;

use super::{same_ring, Monomial, PolyRing, RingError, Scalar};

/// A polynomial in canonical form: nonzero coefficients, monomials strictly
/// decreasing under the ring's order.
#[derive(Clone, Debug)]
pub struct Polynomial {
    ring: Arc<PolyRing>,
    terms: Vec<(Scalar, Monomial)>,
}

impl PartialEq for Polynomial {
    fn eq(&self, other: &Self) -> bool {
        same_ring(&self.ring, &other.ring) && self.terms == other.terms
    }
}

impl Eq for Polynomial {}

impl Hash for Polynomial {
    fn hash<H: Hasher>(&self, state: &mut H) {
        self.terms.hash(state);
    }
}

impl Polynomial {
    pub fn zero(ring: &Arc<PolyRing>) -> Polynomial {
        Polynomial {
            ring: ring.clone(),
            terms: Vec::new(),
        }
    }

    pub fn one(ring: &Arc<PolyRing>) -> Polynomial {
        Polynomial::constant(ring, ring.field().one())
    }

    pub fn constant(ring: &Arc<PolyRing>, c: Scalar) -> Polynomial {
        Polynomial::monomial(ring, c, Monomial::one(ring.nvars()))
    }

    pub fn monomial(ring: &Arc<PolyRing>, c: Scalar, m: Monomial) -> Polynomial {
        assert_eq!(
            m.arity(),
            ring.nvars(),
            "monomial arity does not match ring"
        );
        if c.is_zero() {
            return Polynomial::zero(ring);
        }
        Polynomial {
            ring: ring.clone(),
            terms: vec![(c, m)],
        }
    }

    /// Builds a polynomial from arbitrary terms, combining duplicates and sorting.
    pub fn from_terms(ring: &Arc<PolyRing>, terms: Vec<(Scalar, Monomial)>) -> Polynomial {
        let mut acc: HashMap<Monomial, Scalar> = HashMap::with_capacity(terms.len());
        for (c, m) in terms {
            assert_eq!(
                m.arity(),
                ring.nvars(),
                "monomial arity does not match ring"
            );
            match acc.get_mut(&m) {
                Some(e) => *e = &*e + &c,
                None => {
                    acc.insert(m, c);
                }
            }
        }
        Polynomial::from_map(ring, acc)
    }

    fn from_map(ring: &Arc<PolyRing>, acc: HashMap<Monomial, Scalar>) -> Polynomial {
        let mut terms: Vec<(Scalar, Monomial)> = acc
            .into_iter()
            .filter(|(_, c)| !c.is_zero())
            .map(|(m, c)| (c, m))
            .collect();
        terms.sort_by(|a, b| ring.compare(&b.1, &a.1));
        Polynomial {
            ring: ring.clone(),
            terms,
        }
    }

    pub fn ring(&self) -> &Arc<PolyRing> {
        &self.ring
    }

    pub fn terms(&self) -> &[(Scalar, Monomial)] {
        &self.terms
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn nterms(&self) -> usize {
        self.terms.len()
    }

    pub fn is_constant(&self) -> bool {
        self.terms.iter().all(|(_, m)| m.is_one())
    }

    /// Coefficient of the monomial `1`.
    pub fn constant_term(&self) -> Scalar {
        match self.terms.last() {
            Some((c, m)) if m.is_one() => c.clone(),
            _ => self.ring.field().zero(),
        }
    }

    pub fn coefficient(&self, m: &Monomial) -> Scalar {
        self.terms
            .iter()
            .find(|(_, t)| t == m)
            .map(|(c, _)| c.clone())
            .unwrap_or_else(|| self.ring.field().zero())
    }

    pub fn leading_term(&self) -> Option<&(Scalar, Monomial)> {
        self.terms.first()
    }

    pub fn leading_monomial(&self) -> Option<&Monomial> {
        self.terms.first().map(|(_, m)| m)
    }

    pub fn leading_coeff(&self) -> Option<&Scalar> {
        self.terms.first().map(|(c, _)| c)
    }

    /// Weighted degree if all terms share it.
    pub fn homogeneous_degree(&self) -> Result<i64, RingError> {
        let w = self.ring.weights();
        let mut it = self.terms.iter().map(|(_, m)| m.weighted_degree(w));
        let d = it.next().ok_or(RingError::ZeroPolynomial)?;
        if it.all(|e| e == d) {
            Ok(d)
        } else {
            Err(RingError::NotHomogeneous)
        }
    }

    /// Zero counts as homogeneous of every degree.
    pub fn is_homogeneous_of(&self, deg: i64) -> bool {
        let w = self.ring.weights();
        self.terms.iter().all(|(_, m)| m.weighted_degree(w) == deg)
    }

    /// The part of `self` of weighted degree `deg`.
    pub fn homogeneous_component(&self, deg: i64) -> Polynomial {
        let w = self.ring.weights();
        Polynomial {
            ring: self.ring.clone(),
            terms: self
                .terms
                .iter()
                .filter(|(_, m)| m.weighted_degree(w) == deg)
                .cloned()
                .collect(),
        }
    }

    /// Maximal weighted degree of a term, `None` for zero.
    pub fn max_degree(&self) -> Option<i64> {
        let w = self.ring.weights();
        self.terms.iter().map(|(_, m)| m.weighted_degree(w)).max()
    }

    pub fn scale(&self, c: &Scalar) -> Polynomial {
        if c.is_zero() {
            return Polynomial::zero(&self.ring);
        }
        Polynomial {
            ring: self.ring.clone(),
            terms: self.terms.iter().map(|(a, m)| (a * c, m.clone())).collect(),
        }
    }

    /// `c * m * self`.
    pub fn mul_term(&self, c: &Scalar, m: &Monomial) -> Polynomial {
        if c.is_zero() {
            return Polynomial::zero(&self.ring);
        }
        // multiplying by a monomial preserves the order of terms
        Polynomial {
            ring: self.ring.clone(),
            terms: self.terms.iter().map(|(a, t)| (a * c, t.mul(m))).collect(),
        }
    }

    pub fn checked_add(&self, other: &Polynomial) -> Result<Polynomial, RingError> {
        self.check_ring(other)?;
        Ok(self.merge(other, false))
    }

    pub fn checked_sub(&self, other: &Polynomial) -> Result<Polynomial, RingError> {
        self.check_ring(other)?;
        Ok(self.merge(other, true))
    }

    pub fn checked_mul(&self, other: &Polynomial) -> Result<Polynomial, RingError> {
        self.check_ring(other)?;
        if self.is_zero() || other.is_zero() {
            return Ok(Polynomial::zero(&self.ring));
        }
        if other.terms.len() == 1 {
            let (c, m) = &other.terms[0];
            return Ok(self.mul_term(c, m));
        }
        if self.terms.len() == 1 {
            let (c, m) = &self.terms[0];
            return Ok(other.mul_term(c, m));
        }
        let mut acc: HashMap<Monomial, Scalar> =
            HashMap::with_capacity(self.terms.len() * other.terms.len());
        for (a, m) in &self.terms {
            for (b, n) in &other.terms {
                let mn = m.mul(n);
                let c = a * b;
                match acc.get_mut(&mn) {
                    Some(e) => *e = &*e + &c,
                    None => {
                        acc.insert(mn, c);
                    }
                }
            }
        }
        Ok(Polynomial::from_map(&self.ring, acc))
    }

    fn check_ring(&self, other: &Polynomial) -> Result<(), RingError> {
        if same_ring(&self.ring, &other.ring) {
            Ok(())
        } else {
            Err(RingError::RingMismatch)
        }
    }

    fn merge(&self, other: &Polynomial, subtract: bool) -> Polynomial {
        use std::cmp::Ordering::*;
        let ring = &self.ring;
        let mut out = Vec::with_capacity(self.terms.len() + other.terms.len());
        let (mut i, mut j) = (0, 0);
        let a = &self.terms;
        let b = &other.terms;
        while i < a.len() && j < b.len() {
            match ring.compare(&a[i].1, &b[j].1) {
                Greater => {
                    out.push(a[i].clone());
                    i += 1;
                }
                Less => {
                    let c = if subtract { -&b[j].0 } else { b[j].0.clone() };
                    out.push((c, b[j].1.clone()));
                    j += 1;
                }
                Equal => {
                    let c = if subtract {
                        &a[i].0 - &b[j].0
                    } else {
                        &a[i].0 + &b[j].0
                    };
                    if !c.is_zero() {
                        out.push((c, a[i].1.clone()));
                    }
                    i += 1;
                    j += 1;
                }
            }
        }
        out.extend(a[i..].iter().cloned());
        for t in &b[j..] {
            let c = if subtract { -&t.0 } else { t.0.clone() };
            out.push((c, t.1.clone()));
        }
        Polynomial {
            ring: ring.clone(),
            terms: out,
        }
    }

    pub fn pow(&self, e: u32) -> Polynomial {
        let mut acc = Polynomial::one(&self.ring);
        for _ in 0..e {
            acc = &acc * self;
        }
        acc
    }

    /// Re-expresses `self` in `target`, matching variables by name.
    pub fn map_into(&self, target: &Arc<PolyRing>) -> Result<Polynomial, RingError> {
        if same_ring(&self.ring, target) {
            return Ok(self.clone());
        }
        if self.ring.field() != target.field() {
            return Err(RingError::RingMismatch);
        }
        let mut idx = Vec::with_capacity(self.ring.nvars());
        for v in self.ring.variables() {
            idx.push(
                target
                    .var_index(v)
                    .ok_or_else(|| RingError::MissingVariable(v.clone()))?,
            );
        }
        let terms = self
            .terms
            .iter()
            .map(|(c, m)| {
                let mut e = vec![0; target.nvars()];
                for (k, &x) in m.exponents().iter().enumerate() {
                    e[idx[k]] += x;
                }
                (c.clone(), Monomial::new(e))
            })
            .collect();
        Ok(Polynomial::from_terms(target, terms))
    }

    /// Substitutes `values[i]` for the i-th variable; all values share one ring.
    pub fn substitute(
        &self,
        values: &[Polynomial],
        target: &Arc<PolyRing>,
    ) -> Result<Polynomial, RingError> {
        assert_eq!(values.len(), self.ring.nvars());
        if values.iter().any(|v| !same_ring(v.ring(), target))
            || self.ring.field() != target.field()
        {
            return Err(RingError::RingMismatch);
        }
        let mut acc = Polynomial::zero(target);
        for (c, m) in &self.terms {
            let mut t = Polynomial::constant(target, c.clone());
            for (k, &e) in m.exponents().iter().enumerate() {
                if e > 0 {
                    t = &t * &values[k].pow(e);
                }
            }
            acc = &acc + &t;
        }
        Ok(acc)
    }

    /// Exact quotient `self / d`, if `d` divides `self`.
    pub fn div_exact(&self, d: &Polynomial) -> Option<Polynomial> {
        assert!(same_ring(&self.ring, &d.ring));
        if d.is_zero() {
            return None;
        }
        if self.is_zero() {
            return Some(self.clone());
        }
        let (dc, dm) = d.leading_term().unwrap();
        let dinv = dc.inverse();
        let mut rem = self.clone();
        let mut quot = Vec::new();
        while let Some((c, m)) = rem.leading_term().cloned() {
            let q = m.div(dm)?;
            let qc = &c * &dinv;
            rem = &rem - &d.mul_term(&qc, &q);
            quot.push((qc, q));
        }
        Some(Polynomial::from_terms(&self.ring, quot))
    }

    /// Value at the origin is nonzero and it is constant.
    pub fn is_unit(&self) -> bool {
        !self.is_zero() && self.is_constant()
    }
}

impl Add for &Polynomial {
    type Output = Polynomial;
    /// Panics if the operands live in different rings; see [`Polynomial::checked_add`].
    fn add(self, rhs: &Polynomial) -> Polynomial {
        self.checked_add(rhs)
            .expect("ring mismatch in polynomial addition")
    }
}

impl Sub for &Polynomial {
    type Output = Polynomial;
    fn sub(self, rhs: &Polynomial) -> Polynomial {
        self.checked_sub(rhs)
            .expect("ring mismatch in polynomial subtraction")
    }
}

impl Mul for &Polynomial {
    type Output = Polynomial;
    fn mul(self, rhs: &Polynomial) -> Polynomial {
        self.checked_mul(rhs)
            .expect("ring mismatch in polynomial multiplication")
    }
}

impl Neg for &Polynomial {
    type Output = Polynomial;
    fn neg(self) -> Polynomial {
        Polynomial {
            ring: self.ring.clone(),
            terms: self.terms.iter().map(|(c, m)| (-c, m.clone())).collect(),
        }
    }
}

impl Neg for Polynomial {
    type Output = Polynomial;
    fn neg(self) -> Polynomial {
        -&self
    }
}

impl fmt::Display for Polynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        let vars = self.ring.variables();
        for (k, (c, m)) in self.terms.iter().enumerate() {
            let neg = c.is_negative();
            if k == 0 {
                if neg {
                    write!(f, "-")?;
                }
            } else {
                write!(f, " {} ", if neg { '-' } else { '+' })?;
            }
            let mag = c.abs_display();
            let mut factors: Vec<String> = Vec::new();
            if mag != "1" || m.is_one() {
                factors.push(mag);
            }
            for (i, &e) in m.exponents().iter().enumerate() {
                match e {
                    0 => {}
                    1 => factors.push(vars[i].clone()),
                    _ => factors.push(format!("{}^{}", vars[i], e)),
                }
            }
            write!(f, "{}", factors.join("*"))?;
        }
        Ok(())
    }
}
