//! Sparse exact linear algebra over a coefficient field.
//!
//! Vectors are sorted `(index, value)` lists with no explicit zeros.

use std::cmp::Reverse;
use std::collections::{BTreeMap, BinaryHeap, HashSet};

use crate::ring::{Field, Scalar};

pub type SparseVec = Vec<(usize, Scalar)>;

/// `a + c * b` for sparse vectors.
pub fn axpy(a: &SparseVec, c: &Scalar, b: &SparseVec) -> SparseVec {
    let mut out = Vec::with_capacity(a.len() + b.len());
    let (mut i, mut j) = (0, 0);
    while i < a.len() || j < b.len() {
        let take_a = j >= b.len() || (i < a.len() && a[i].0 < b[j].0);
        let take_b = i >= a.len() || (j < b.len() && b[j].0 < a[i].0);
        if take_a {
            out.push(a[i].clone());
            i += 1;
        } else if take_b {
            out.push((b[j].0, c * &b[j].1));
            j += 1;
        } else {
            let v = &a[i].1 + &(c * &b[j].1);
            if !v.is_zero() {
                out.push((a[i].0, v));
            }
            i += 1;
            j += 1;
        }
    }
    out
}

pub fn from_map(m: BTreeMap<usize, Scalar>) -> SparseVec {
    m.into_iter().filter(|(_, v)| !v.is_zero()).collect()
}

fn lookup(v: &SparseVec, idx: usize) -> Option<&Scalar> {
    v.binary_search_by_key(&idx, |(i, _)| *i)
        .ok()
        .map(|k| &v[k].1)
}

/// Rank of the matrix whose rows are `rows`, by Markowitz-style sparse elimination.
///
/// Pivot rows are taken shortest first and the pivot column is the one with
/// the fewest remaining entries, which keeps fill-in low on the structured
/// matrices produced by graded differentials.
pub fn rank(rows: Vec<SparseVec>, ncols: usize) -> usize {
    let mut rows: Vec<SparseVec> = rows;
    let mut alive = vec![true; rows.len()];
    let mut col_rows: Vec<HashSet<usize>> = vec![HashSet::new(); ncols];
    let mut heap = BinaryHeap::new();
    for (r, row) in rows.iter().enumerate() {
        if row.is_empty() {
            alive[r] = false;
            continue;
        }
        for (c, _) in row {
            col_rows[*c].insert(r);
        }
        heap.push(Reverse((row.len(), r)));
    }
    let mut rank = 0;
    while let Some(Reverse((len, r))) = heap.pop() {
        if !alive[r] || rows[r].len() != len {
            continue;
        }
        if rows[r].is_empty() {
            alive[r] = false;
            continue;
        }
        // choose the sparsest column of the pivot row
        let (pc, pv) = rows[r]
            .iter()
            .min_by_key(|(c, _)| col_rows[*c].len())
            .map(|(c, v)| (*c, v.clone()))
            .unwrap();
        let pivot = std::mem::take(&mut rows[r]);
        alive[r] = false;
        for (c, _) in &pivot {
            col_rows[*c].remove(&r);
        }
        rank += 1;
        let inv = pv.inverse();
        let others: Vec<usize> = col_rows[pc].iter().copied().collect();
        for o in others {
            let factor = -&(lookup(&rows[o], pc).unwrap() * &inv);
            let old = std::mem::take(&mut rows[o]);
            let new = axpy(&old, &factor, &pivot);
            for (c, _) in &old {
                col_rows[*c].remove(&o);
            }
            for (c, _) in &new {
                col_rows[*c].insert(o);
            }
            if new.is_empty() {
                alive[o] = false;
            } else {
                heap.push(Reverse((new.len(), o)));
            }
            rows[o] = new;
        }
    }
    rank
}

/// Outcome of adding an equation to an [`Echelon`] system.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Insert {
    Independent,
    Redundant,
    Inconsistent,
}

/// Incrementally maintained echelon form of a linear system `A x = b`.
///
/// Equations are inserted one at a time; each stored row has a distinct
/// leading column. The right-hand side lives in a virtual last column.
#[derive(Debug, Clone)]
pub struct Echelon {
    field: Field,
    nvars: usize,
    pivots: BTreeMap<usize, SparseVec>,
    inconsistent: bool,
}

impl Echelon {
    pub fn new(field: Field, nvars: usize) -> Echelon {
        Echelon {
            field,
            nvars,
            pivots: BTreeMap::new(),
            inconsistent: false,
        }
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    pub fn rank(&self) -> usize {
        self.pivots.len()
    }

    pub fn is_consistent(&self) -> bool {
        !self.inconsistent
    }

    /// Adds `lhs . x = rhs`.
    pub fn insert(&mut self, lhs: SparseVec, rhs: Scalar) -> Insert {
        let mut row = lhs;
        debug_assert!(row.iter().all(|(c, _)| *c < self.nvars));
        if !rhs.is_zero() {
            row.push((self.nvars, rhs));
        }
        loop {
            let Some((lead, lv)) = row.first().cloned() else {
                return Insert::Redundant;
            };
            if lead == self.nvars {
                self.inconsistent = true;
                return Insert::Inconsistent;
            }
            match self.pivots.get(&lead) {
                Some(p) => {
                    // stored pivots are normalised to leading coefficient one
                    let f = -&lv;
                    row = axpy(&row, &f, p);
                }
                None => {
                    let inv = lv.inverse();
                    let row: SparseVec = row.into_iter().map(|(c, v)| (c, &v * &inv)).collect();
                    self.pivots.insert(lead, row);
                    return Insert::Independent;
                }
            }
        }
    }

    /// One solution with all free variables set to zero.
    pub fn solve(&self) -> Option<Vec<Scalar>> {
        if self.inconsistent {
            return None;
        }
        let mut x = vec![self.field.zero(); self.nvars];
        for (&lead, row) in self.pivots.iter().rev() {
            let mut val = self.field.zero();
            for (c, v) in row.iter().skip(1) {
                if *c == self.nvars {
                    val = &val + v;
                } else {
                    val = &val - &(v * &x[*c]);
                }
            }
            x[lead] = val;
        }
        Some(x)
    }
}

/// Solves `A x = b` where `A` is given by sparse rows; `None` if inconsistent.
pub fn solve(
    field: Field,
    rows: &[SparseVec],
    rhs: &[Scalar],
    nvars: usize,
) -> Option<Vec<Scalar>> {
    let mut e = Echelon::new(field, nvars);
    for (r, b) in rows.iter().zip(rhs) {
        if e.insert(r.clone(), b.clone()) == Insert::Inconsistent {
            return None;
        }
    }
    e.solve()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(v: i64) -> Scalar {
        Field::Rational.from_i64(v)
    }

    fn dense_to_sparse(rows: &[Vec<i64>]) -> Vec<SparseVec> {
        rows.iter()
            .map(|r| {
                r.iter()
                    .enumerate()
                    .filter(|(_, v)| **v != 0)
                    .map(|(i, v)| (i, q(*v)))
                    .collect()
            })
            .collect()
    }

    /// Dense fraction-free oracle over i128 for small matrices.
    fn dense_rank(mut m: Vec<Vec<i128>>) -> usize {
        let mut rank = 0;
        let ncols = m.first().map_or(0, |r| r.len());
        for c in 0..ncols {
            let Some(p) = (rank..m.len()).find(|&r| m[r][c] != 0) else {
                continue;
            };
            m.swap(rank, p);
            for r in 0..m.len() {
                if r != rank && m[r][c] != 0 {
                    let (a, b) = (m[rank][c], m[r][c]);
                    let pivot = m[rank].clone();
                    for (x, &p) in m[r].iter_mut().zip(&pivot) {
                        *x = *x * a - p * b;
                    }
                    let g = m[r]
                        .iter()
                        .fold(0i128, |g, &v| num_integer::Integer::gcd(&g, &v));
                    if g > 1 {
                        for v in m[r].iter_mut() {
                            *v /= g;
                        }
                    }
                }
            }
            rank += 1;
        }
        rank
    }

    #[test]
    fn rank_matches_dense_oracle() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(7);
        for _ in 0..200 {
            let nr = rng.gen_range(1..8);
            let nc = rng.gen_range(1..8);
            let m: Vec<Vec<i64>> = (0..nr)
                .map(|_| {
                    (0..nc)
                        .map(|_| {
                            if rng.gen_bool(0.4) {
                                rng.gen_range(-3..=3)
                            } else {
                                0
                            }
                        })
                        .collect()
                })
                .collect();
            let dense: Vec<Vec<i128>> = m
                .iter()
                .map(|r| r.iter().map(|&v| v as i128).collect())
                .collect();
            assert_eq!(rank(dense_to_sparse(&m), nc), dense_rank(dense), "{m:?}");
        }
    }

    #[test]
    fn rank_mod_two_differs_from_rational() {
        let rows = vec![vec![(0, q(1)), (1, q(1))], vec![(0, q(1)), (1, q(-1))]];
        assert_eq!(rank(rows, 2), 2);
        let f = Field::Prime(2);
        let rows = vec![
            vec![(0, f.one()), (1, f.one())],
            vec![(0, f.one()), (1, f.from_i64(-1))],
        ];
        assert_eq!(rank(rows, 2), 1);
    }

    #[test]
    fn solve_and_detect_inconsistency() {
        let rows = dense_to_sparse(&[vec![1, 1, 0], vec![0, 1, 1]]);
        let x = solve(Field::Rational, &rows, &[q(3), q(5)], 3).unwrap();
        assert_eq!(&x[0] + &x[1], q(3));
        assert_eq!(&x[1] + &x[2], q(5));
        let rows = dense_to_sparse(&[vec![1, 1], vec![2, 2]]);
        assert!(solve(Field::Rational, &rows, &[q(1), q(3)], 2).is_none());
        assert!(solve(Field::Rational, &rows, &[q(1), q(2)], 2).is_some());
    }
}
