//! Degreewise homology of graded differential modules.
//!
//! In internal degree `t` the module is a finite-dimensional vector space
//! spanned by `m g_c` with `deg m = t - twist_c`. Homology there has dimension
//! `dim D_t - rank(d: D_t -> D_{t+a}) - rank(d: D_{t-a} -> D_t)`.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt;

use rayon::prelude::*;

use super::{DiffModError, DifferentialModule};
use crate::linalg::{self, SparseVec};
use crate::ring::{Monomial, Scalar};

/// Dimensions of homology in internal degrees `0..=max_deg`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct HilbertVector {
    pub dims: Vec<usize>,
    pub max_deg: i64,
}

impl HilbertVector {
    pub fn total(&self) -> usize {
        self.dims.iter().sum()
    }

    /// Componentwise sum of two vectors of the same length.
    pub fn add(&self, other: &HilbertVector) -> HilbertVector {
        assert_eq!(self.max_deg, other.max_deg);
        HilbertVector {
            dims: self
                .dims
                .iter()
                .zip(&other.dims)
                .map(|(a, b)| a + b)
                .collect(),
            max_deg: self.max_deg,
        }
    }
}

impl fmt::Display for HilbertVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.dims.iter().map(|d| d.to_string()).collect();
        write!(f, "({})", parts.join(","))
    }
}

/// The default certification bound `2 * sum |twists| + 2 * a + 4`, clamped at zero.
pub fn default_max_deg(d: &DifferentialModule) -> i64 {
    let s: i64 = d.twists().iter().map(|t| t.abs()).sum();
    (2 * s + 2 * d.degree() + 4).max(0)
}

/// Homology dimensions in degrees `0..=max_deg`.
pub fn homology_hilbert(
    d: &DifferentialModule,
    max_deg: i64,
) -> Result<HilbertVector, DiffModError> {
    if max_deg < 0 {
        return Ok(HilbertVector {
            dims: Vec::new(),
            max_deg,
        });
    }
    let m = homology_range(d, 0, max_deg)?;
    Ok(HilbertVector {
        dims: m.into_values().collect(),
        max_deg,
    })
}

/// Homology dimensions in every degree of `lo..=hi`.
///
/// Independent degrees are evaluated in parallel; the result does not depend
/// on scheduling.
pub fn homology_range(
    d: &DifferentialModule,
    lo: i64,
    hi: i64,
) -> Result<BTreeMap<i64, usize>, DiffModError> {
    if !d.is_graded() {
        return Err(DiffModError::UngradedInput);
    }
    let a = d.degree();
    let needed: BTreeSet<i64> = (lo..=hi).flat_map(|t| [t, t - a]).collect();
    let ranks: HashMap<i64, usize> = needed
        .into_par_iter()
        .map(|t| (t, rank_in_degree(d, t)))
        .collect::<Vec<_>>()
        .into_iter()
        .collect();
    Ok((lo..=hi)
        .map(|t| {
            let dim = dim_in_degree(d, t);
            let h = dim - ranks[&t] - ranks[&(t - a)];
            (t, h)
        })
        .collect())
}

fn dim_in_degree(d: &DifferentialModule, t: i64) -> usize {
    let ring = d.ring();
    d.twists().iter().map(|tw| ring.dim_of_degree(t - tw)).sum()
}

/// Rank of `d: D_t -> D_{t+a}` over the coefficient field.
fn rank_in_degree(d: &DifferentialModule, t: i64) -> usize {
    let ring = d.ring();
    let a = d.degree();
    let n = d.rank();
    let m = d.matrix();
    let mut target: HashMap<(usize, Monomial), usize> = HashMap::new();
    for r in 0..n {
        if (0..n).all(|c| m.get(r, c).is_zero()) {
            continue;
        }
        for mono in ring.monomials_of_degree(t + a - d.twists()[r]) {
            let k = target.len();
            target.insert((r, mono), k);
        }
    }
    if target.is_empty() {
        return 0;
    }
    let mut rows: Vec<SparseVec> = Vec::new();
    for c in 0..n {
        let col: Vec<(usize, &crate::ring::Polynomial)> = (0..n)
            .map(|r| (r, m.get(r, c)))
            .filter(|(_, p)| !p.is_zero())
            .collect();
        if col.is_empty() {
            continue;
        }
        for mono in ring.monomials_of_degree(t - d.twists()[c]) {
            let mut acc: BTreeMap<usize, Scalar> = BTreeMap::new();
            for (r, p) in &col {
                for (coef, pm) in p.terms() {
                    let idx = target[&(*r, pm.mul(&mono))];
                    let e = acc.entry(idx).or_insert_with(|| ring.field().zero());
                    *e = &*e + coef;
                }
            }
            let row = linalg::from_map(acc);
            if !row.is_empty() {
                rows.push(row);
            }
        }
    }
    linalg::rank(rows, target.len())
}
