//! Exact multivariate polynomial arithmetic over the rationals and prime fields.
//!
//! A [`PolyRing`] is shared behind an [`Arc`]; every [`Polynomial`] keeps a
//! handle to its ring so that arithmetic can check compatibility and so that
//! terms stay sorted under the ring's monomial order.

mod parse;
mod poly;
mod scalar;

use std::cmp::Ordering;
use std::collections::HashSet;
use std::fmt;
use std::sync::Arc;

use thiserror::Error;

pub use poly::Polynomial;
pub use scalar::{Field, Scalar, DEFAULT_PRIME};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum RingError {
    #[error("polynomials belong to different rings")]
    RingMismatch,
    #[error("polynomial is not homogeneous")]
    NotHomogeneous,
    #[error("degree of the zero polynomial is undefined")]
    ZeroPolynomial,
    #[error("invalid ring: {0}")]
    InvalidRing(String),
    #[error("parse error at byte {pos}: {msg}")]
    Parse { pos: usize, msg: String },
    #[error("variable {0} does not exist in the target ring")]
    MissingVariable(String),
}

/// Monomial order used to sort terms.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash)]
pub enum MonomialOrder {
    /// Weighted graded reverse lexicographic order.
    #[default]
    Grevlex,
    /// Pure lexicographic order with x1 > x2 > ... .
    Lex,
}

impl MonomialOrder {
    pub fn compare(self, a: &Monomial, b: &Monomial, weights: &[u32]) -> Ordering {
        debug_assert_eq!(a.arity(), b.arity());
        match self {
            MonomialOrder::Lex => a.exps.cmp(&b.exps),
            MonomialOrder::Grevlex => {
                let da = a.weighted_degree(weights);
                let db = b.weighted_degree(weights);
                da.cmp(&db).then_with(|| {
                    for (x, y) in a.exps.iter().zip(&b.exps).rev() {
                        if x != y {
                            // smaller power of the last differing variable wins
                            return y.cmp(x);
                        }
                    }
                    Ordering::Equal
                })
            }
        }
    }
}

/// Compares two monomials of the same arity under `order` with unit weights.
pub fn monomial_compare(a: &Monomial, b: &Monomial, order: MonomialOrder) -> Ordering {
    let w = vec![1; a.arity()];
    order.compare(a, b, &w)
}

/// Exponent vector of a monomial.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Monomial {
    exps: Vec<u32>,
}

impl Monomial {
    pub fn one(arity: usize) -> Monomial {
        Monomial {
            exps: vec![0; arity],
        }
    }

    pub fn new(exps: Vec<u32>) -> Monomial {
        Monomial { exps }
    }

    pub fn var(arity: usize, idx: usize) -> Monomial {
        let mut exps = vec![0; arity];
        exps[idx] = 1;
        Monomial { exps }
    }

    pub fn exponents(&self) -> &[u32] {
        &self.exps
    }

    pub fn arity(&self) -> usize {
        self.exps.len()
    }

    pub fn is_one(&self) -> bool {
        self.exps.iter().all(|&e| e == 0)
    }

    pub fn weighted_degree(&self, weights: &[u32]) -> i64 {
        self.exps
            .iter()
            .zip(weights)
            .map(|(&e, &w)| e as i64 * w as i64)
            .sum()
    }

    pub fn mul(&self, other: &Monomial) -> Monomial {
        Monomial {
            exps: self
                .exps
                .iter()
                .zip(&other.exps)
                .map(|(a, b)| a + b)
                .collect(),
        }
    }

    pub fn divides(&self, other: &Monomial) -> bool {
        self.exps.iter().zip(&other.exps).all(|(a, b)| a <= b)
    }

    /// `self / other`, if `other` divides `self`.
    pub fn div(&self, other: &Monomial) -> Option<Monomial> {
        if !other.divides(self) {
            return None;
        }
        Some(Monomial {
            exps: self
                .exps
                .iter()
                .zip(&other.exps)
                .map(|(a, b)| a - b)
                .collect(),
        })
    }

    pub fn lcm(&self, other: &Monomial) -> Monomial {
        Monomial {
            exps: self
                .exps
                .iter()
                .zip(&other.exps)
                .map(|(a, b)| *a.max(b))
                .collect(),
        }
    }

    pub fn is_coprime(&self, other: &Monomial) -> bool {
        self.exps
            .iter()
            .zip(&other.exps)
            .all(|(a, b)| *a == 0 || *b == 0)
    }
}

/// A polynomial ring `k[x_1, ..., x_n]` with a positive weight per variable.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct PolyRing {
    vars: Vec<String>,
    field: Field,
    weights: Vec<u32>,
    order: MonomialOrder,
}

impl PolyRing {
    /// Standard-graded ring over the field of characteristic `ch` with grevlex order.
    pub fn new<S: AsRef<str>>(vars: &[S], ch: u64) -> Result<Arc<PolyRing>, RingError> {
        let weights = vec![1; vars.len()];
        PolyRing::with_options(vars, ch, weights, MonomialOrder::Grevlex)
    }

    pub fn with_options<S: AsRef<str>>(
        vars: &[S],
        ch: u64,
        weights: Vec<u32>,
        order: MonomialOrder,
    ) -> Result<Arc<PolyRing>, RingError> {
        let vars: Vec<String> = vars.iter().map(|v| v.as_ref().to_string()).collect();
        let mut seen = HashSet::new();
        for v in &vars {
            if !is_identifier(v) {
                return Err(RingError::InvalidRing(format!("bad variable name {v:?}")));
            }
            if !seen.insert(v.as_str()) {
                return Err(RingError::InvalidRing(format!("duplicate variable {v}")));
            }
        }
        let field = Field::from_characteristic(ch).ok_or_else(|| {
            RingError::InvalidRing(format!("characteristic {ch} is not 0 or a prime"))
        })?;
        if weights.len() != vars.len() || weights.contains(&0) {
            return Err(RingError::InvalidRing(
                "weights must be positive, one per variable".into(),
            ));
        }
        Ok(Arc::new(PolyRing {
            vars,
            field,
            weights,
            order,
        }))
    }

    /// `k[x1, ..., xn]` with the usual variable names.
    pub fn standard(n: usize, ch: u64) -> Arc<PolyRing> {
        let vars: Vec<String> = (1..=n).map(|i| format!("x{i}")).collect();
        PolyRing::new(&vars, ch).expect("standard ring is valid")
    }

    pub fn variables(&self) -> &[String] {
        &self.vars
    }

    pub fn nvars(&self) -> usize {
        self.vars.len()
    }

    pub fn field(&self) -> Field {
        self.field
    }

    pub fn characteristic(&self) -> u64 {
        self.field.characteristic()
    }

    pub fn weights(&self) -> &[u32] {
        &self.weights
    }

    pub fn order(&self) -> MonomialOrder {
        self.order
    }

    pub fn var_index(&self, name: &str) -> Option<usize> {
        self.vars.iter().position(|v| v == name)
    }

    pub fn compare(&self, a: &Monomial, b: &Monomial) -> Ordering {
        self.order.compare(a, b, &self.weights)
    }

    /// Same ring with a different monomial order.
    pub fn with_order(self: &Arc<Self>, order: MonomialOrder) -> Arc<PolyRing> {
        if order == self.order {
            return self.clone();
        }
        let mut r = (**self).clone();
        r.order = order;
        Arc::new(r)
    }

    pub fn zero(self: &Arc<Self>) -> Polynomial {
        Polynomial::zero(self)
    }

    pub fn one(self: &Arc<Self>) -> Polynomial {
        Polynomial::one(self)
    }

    /// The variable with index `idx` (0-based).
    pub fn var(self: &Arc<Self>, idx: usize) -> Polynomial {
        Polynomial::monomial(self, self.field.one(), Monomial::var(self.nvars(), idx))
    }

    pub fn int(self: &Arc<Self>, v: i64) -> Polynomial {
        Polynomial::constant(self, self.field.from_i64(v))
    }

    /// Parses a polynomial in the ring's variables, e.g. `3*x1^2*x2 - x3`.
    pub fn parse(self: &Arc<Self>, s: &str) -> Result<Polynomial, RingError> {
        parse::parse_polynomial(self, s)
    }

    /// All monomials of weighted degree exactly `deg`, in decreasing order.
    pub fn monomials_of_degree(&self, deg: i64) -> Vec<Monomial> {
        let mut out = Vec::new();
        if deg < 0 {
            return out;
        }
        let n = self.nvars();
        let mut cur = vec![0u32; n];
        fn rec(i: usize, left: i64, w: &[u32], cur: &mut Vec<u32>, out: &mut Vec<Monomial>) {
            if i == w.len() {
                if left == 0 {
                    out.push(Monomial::new(cur.clone()));
                }
                return;
            }
            let wi = w[i] as i64;
            let mut e = 0;
            while e * wi <= left {
                cur[i] = e as u32;
                rec(i + 1, left - e * wi, w, cur, out);
                e += 1;
            }
            cur[i] = 0;
        }
        rec(0, deg, &self.weights, &mut cur, &mut out);
        out.sort_by(|a, b| self.compare(b, a));
        out
    }

    /// Dimension over k of the degree-`deg` piece.
    pub fn dim_of_degree(&self, deg: i64) -> usize {
        if deg < 0 {
            return 0;
        }
        // count compositions with weights by dynamic programming
        let d = deg as usize;
        let mut ways = vec![0usize; d + 1];
        ways[0] = 1;
        for &w in &self.weights {
            let w = w as usize;
            for t in w..=d {
                ways[t] += ways[t - w];
            }
        }
        ways[d]
    }

    /// True if every variable of `self` also occurs in `other` and the fields agree.
    pub fn embeds_into(&self, other: &PolyRing) -> bool {
        self.field == other.field && self.vars.iter().all(|v| other.var_index(v).is_some())
    }

    /// Extends the ring by fresh variables.
    pub fn extend<S: AsRef<str>>(&self, extra: &[S]) -> Result<Arc<PolyRing>, RingError> {
        let mut vars = self.vars.clone();
        let mut weights = self.weights.clone();
        for v in extra {
            vars.push(v.as_ref().to_string());
            weights.push(1);
        }
        PolyRing::with_options(&vars, self.characteristic(), weights, self.order)
    }
}

impl fmt::Display for PolyRing {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let k = match self.field {
            Field::Rational => "QQ".to_string(),
            Field::Prime(p) => format!("GF({p})"),
        };
        write!(f, "{}[{}]", k, self.vars.join(", "))
    }
}

fn is_identifier(s: &str) -> bool {
    let mut chars = s.chars();
    match chars.next() {
        Some(c) if c.is_ascii_alphabetic() || c == '_' => {}
        _ => return false,
    }
    chars.all(|c| c.is_ascii_alphanumeric() || c == '_')
}

/// Checks that two rings are the same, by pointer or by value.
pub(crate) fn same_ring(a: &Arc<PolyRing>, b: &Arc<PolyRing>) -> bool {
    Arc::ptr_eq(a, b) || a == b
}

#[cfg(test)]
mod tests {
    use super::*;

    fn m(e: &[u32]) -> Monomial {
        Monomial::new(e.to_vec())
    }

    #[test]
    fn grevlex_and_lex_examples() {
        assert_eq!(
            monomial_compare(&m(&[2, 0]), &m(&[1, 1]), MonomialOrder::Grevlex),
            Ordering::Greater
        );
        assert_eq!(
            monomial_compare(&m(&[0, 1]), &m(&[1, 0]), MonomialOrder::Lex),
            Ordering::Less
        );
        assert_eq!(
            monomial_compare(&m(&[1, 1]), &m(&[1, 1]), MonomialOrder::Grevlex),
            Ordering::Equal
        );
    }

    #[test]
    fn grevlex_breaks_ties_on_last_variable() {
        // x1*x3 < x2^2 in grevlex on three variables
        assert_eq!(
            monomial_compare(&m(&[1, 0, 1]), &m(&[0, 2, 0]), MonomialOrder::Grevlex),
            Ordering::Less
        );
        // while lex puts x1*x3 first
        assert_eq!(
            monomial_compare(&m(&[1, 0, 1]), &m(&[0, 2, 0]), MonomialOrder::Lex),
            Ordering::Greater
        );
    }

    #[test]
    fn ring_validation() {
        assert!(PolyRing::new(&["x", "x"], 0).is_err());
        assert!(PolyRing::new(&["x"], 6).is_err());
        assert!(PolyRing::new(&["1x"], 0).is_err());
        assert!(PolyRing::with_options(&["x"], 0, vec![0], MonomialOrder::Grevlex).is_err());
    }

    #[test]
    fn monomial_enumeration_matches_dimension() {
        let r = PolyRing::with_options(&["a", "b", "c"], 0, vec![1, 2, 3], MonomialOrder::Grevlex)
            .unwrap();
        for d in 0..12 {
            let ms = r.monomials_of_degree(d);
            assert_eq!(ms.len(), r.dim_of_degree(d));
            assert!(ms.iter().all(|mm| mm.weighted_degree(r.weights()) == d));
        }
        let s = PolyRing::standard(4, 0);
        assert_eq!(s.dim_of_degree(10), 286);
    }
}
