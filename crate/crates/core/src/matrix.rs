//! Dense matrices with polynomial entries.

use std::fmt;
use std::sync::Arc;

use crate::ring::{PolyRing, Polynomial, RingError};

/// A `rows x cols` matrix over a polynomial ring, stored row-major.
///
/// Throughout the crate matrices act on column vectors: column `c` holds the
/// image of the `c`-th basis element.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PolyMatrix {
    ring: Arc<PolyRing>,
    rows: usize,
    cols: usize,
    data: Vec<Polynomial>,
}

impl PolyMatrix {
    pub fn zero(ring: &Arc<PolyRing>, rows: usize, cols: usize) -> PolyMatrix {
        PolyMatrix {
            ring: ring.clone(),
            rows,
            cols,
            data: vec![ring.zero(); rows * cols],
        }
    }

    pub fn identity(ring: &Arc<PolyRing>, n: usize) -> PolyMatrix {
        let mut m = PolyMatrix::zero(ring, n, n);
        for i in 0..n {
            m.set(i, i, ring.one());
        }
        m
    }

    /// Builds a matrix from rows; every row must have the same length.
    pub fn from_rows(
        ring: &Arc<PolyRing>,
        rows: Vec<Vec<Polynomial>>,
    ) -> Result<PolyMatrix, RingError> {
        let nrows = rows.len();
        let ncols = rows.first().map_or(0, |r| r.len());
        let mut data = Vec::with_capacity(nrows * ncols);
        for r in rows {
            if r.len() != ncols {
                return Err(RingError::InvalidRing("ragged matrix rows".into()));
            }
            for p in r {
                if !Arc::ptr_eq(p.ring(), ring) && **p.ring() != **ring {
                    return Err(RingError::RingMismatch);
                }
                data.push(p);
            }
        }
        Ok(PolyMatrix {
            ring: ring.clone(),
            rows: nrows,
            cols: ncols,
            data,
        })
    }

    /// Parses rows of polynomial strings.
    pub fn parse<S: AsRef<str>>(
        ring: &Arc<PolyRing>,
        rows: &[Vec<S>],
    ) -> Result<PolyMatrix, RingError> {
        let parsed = rows
            .iter()
            .map(|r| {
                r.iter()
                    .map(|s| ring.parse(s.as_ref()))
                    .collect::<Result<Vec<_>, _>>()
            })
            .collect::<Result<Vec<_>, _>>()?;
        PolyMatrix::from_rows(ring, parsed)
    }

    pub fn ring(&self) -> &Arc<PolyRing> {
        &self.ring
    }

    pub fn nrows(&self) -> usize {
        self.rows
    }

    pub fn ncols(&self) -> usize {
        self.cols
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn get(&self, r: usize, c: usize) -> &Polynomial {
        &self.data[r * self.cols + c]
    }

    pub fn set(&mut self, r: usize, c: usize, p: Polynomial) {
        self.data[r * self.cols + c] = p;
    }

    pub fn row(&self, r: usize) -> &[Polynomial] {
        &self.data[r * self.cols..(r + 1) * self.cols]
    }

    pub fn column(&self, c: usize) -> Vec<Polynomial> {
        (0..self.rows).map(|r| self.get(r, c).clone()).collect()
    }

    pub fn entries(&self) -> impl Iterator<Item = (usize, usize, &Polynomial)> {
        self.data
            .iter()
            .enumerate()
            .map(move |(k, p)| (k / self.cols, k % self.cols, p))
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(|p| p.is_zero())
    }

    /// First nonzero entry in row-major order.
    pub fn first_nonzero(&self) -> Option<(usize, usize, &Polynomial)> {
        self.entries().find(|(_, _, p)| !p.is_zero())
    }

    pub fn mul(&self, other: &PolyMatrix) -> PolyMatrix {
        assert_eq!(self.cols, other.rows, "matrix dimensions do not match");
        let mut out = PolyMatrix::zero(&self.ring, self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.get(i, k);
                if a.is_zero() {
                    continue;
                }
                for j in 0..other.cols {
                    let b = other.get(k, j);
                    if b.is_zero() {
                        continue;
                    }
                    let idx = i * other.cols + j;
                    out.data[idx] = &out.data[idx] + &(a * b);
                }
            }
        }
        out
    }

    /// Applies the matrix to a column vector.
    pub fn apply(&self, v: &[Polynomial]) -> Vec<Polynomial> {
        assert_eq!(v.len(), self.cols);
        (0..self.rows)
            .map(|r| {
                let mut acc = self.ring.zero();
                for (c, x) in v.iter().enumerate() {
                    let a = self.get(r, c);
                    if !a.is_zero() && !x.is_zero() {
                        acc = &acc + &(a * x);
                    }
                }
                acc
            })
            .collect()
    }

    pub fn add(&self, other: &PolyMatrix) -> PolyMatrix {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        let data = self
            .data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| a + b)
            .collect();
        PolyMatrix {
            ring: self.ring.clone(),
            rows: self.rows,
            cols: self.cols,
            data,
        }
    }

    pub fn sub(&self, other: &PolyMatrix) -> PolyMatrix {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        let data = self
            .data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| a - b)
            .collect();
        PolyMatrix {
            ring: self.ring.clone(),
            rows: self.rows,
            cols: self.cols,
            data,
        }
    }

    pub fn neg(&self) -> PolyMatrix {
        let data = self.data.iter().map(|a| -a).collect();
        PolyMatrix {
            ring: self.ring.clone(),
            rows: self.rows,
            cols: self.cols,
            data,
        }
    }

    pub fn scale(&self, p: &Polynomial) -> PolyMatrix {
        let data = self.data.iter().map(|a| a * p).collect();
        PolyMatrix {
            ring: self.ring.clone(),
            rows: self.rows,
            cols: self.cols,
            data,
        }
    }

    pub fn transpose(&self) -> PolyMatrix {
        let mut out = PolyMatrix::zero(&self.ring, self.cols, self.rows);
        for (r, c, p) in self.entries() {
            out.set(c, r, p.clone());
        }
        out
    }

    /// Submatrix on the given row and column indices.
    pub fn select(&self, rows: &[usize], cols: &[usize]) -> PolyMatrix {
        let mut out = PolyMatrix::zero(&self.ring, rows.len(), cols.len());
        for (i, &r) in rows.iter().enumerate() {
            for (j, &c) in cols.iter().enumerate() {
                out.set(i, j, self.get(r, c).clone());
            }
        }
        out
    }

    /// Writes `block` at the given row and column indices.
    pub fn place(&mut self, rows: &[usize], cols: &[usize], block: &PolyMatrix) {
        assert_eq!((rows.len(), cols.len()), (block.rows, block.cols));
        for (i, &r) in rows.iter().enumerate() {
            for (j, &c) in cols.iter().enumerate() {
                self.set(r, c, block.get(i, j).clone());
            }
        }
    }

    /// Block diagonal sum.
    pub fn direct_sum(&self, other: &PolyMatrix) -> PolyMatrix {
        let mut out = PolyMatrix::zero(&self.ring, self.rows + other.rows, self.cols + other.cols);
        for (r, c, p) in self.entries() {
            out.set(r, c, p.clone());
        }
        for (r, c, p) in other.entries() {
            out.set(self.rows + r, self.cols + c, p.clone());
        }
        out
    }

    pub fn map_into(&self, target: &Arc<PolyRing>) -> Result<PolyMatrix, RingError> {
        let data = self
            .data
            .iter()
            .map(|p| p.map_into(target))
            .collect::<Result<Vec<_>, _>>()?;
        Ok(PolyMatrix {
            ring: target.clone(),
            rows: self.rows,
            cols: self.cols,
            data,
        })
    }

    /// Determinant by fraction-free (Bareiss) elimination.
    pub fn determinant(&self) -> Polynomial {
        assert!(self.is_square(), "determinant of a non-square matrix");
        let n = self.rows;
        if n == 0 {
            return self.ring.one();
        }
        let mut m: Vec<Vec<Polynomial>> = (0..n).map(|r| self.row(r).to_vec()).collect();
        let mut prev = self.ring.one();
        let mut negate = false;
        for k in 0..n - 1 {
            let Some(p) = (k..n).min_by_key(|&r| pivot_cost(&m[r][k])) else {
                return self.ring.zero();
            };
            if m[p][k].is_zero() {
                return self.ring.zero();
            }
            if p != k {
                m.swap(p, k);
                negate = !negate;
            }
            for i in k + 1..n {
                for j in k + 1..n {
                    let num = &(&m[i][j] * &m[k][k]) - &(&m[i][k] * &m[k][j]);
                    m[i][j] = num.div_exact(&prev).expect("Bareiss division is exact");
                }
                m[i][k] = self.ring.zero();
            }
            prev = m[k][k].clone();
        }
        let d = m[n - 1][n - 1].clone();
        if negate {
            -d
        } else {
            d
        }
    }

    /// Inverse over the polynomial ring, when the determinant is a nonzero constant.
    pub fn inverse(&self) -> Option<PolyMatrix> {
        if !self.is_square() {
            return None;
        }
        if let Some(inv) = self.inverse_by_unit_pivots() {
            return Some(inv);
        }
        let det = self.determinant();
        if !det.is_unit() {
            return None;
        }
        let dinv = det.constant_term().inverse();
        let n = self.rows;
        let mut adj = PolyMatrix::zero(&self.ring, n, n);
        for i in 0..n {
            for j in 0..n {
                let rows: Vec<usize> = (0..n).filter(|&r| r != i).collect();
                let cols: Vec<usize> = (0..n).filter(|&c| c != j).collect();
                let minor = self.select(&rows, &cols).determinant();
                let signed = if (i + j) % 2 == 0 { minor } else { -minor };
                adj.set(j, i, signed.scale(&dinv));
            }
        }
        Some(adj)
    }

    /// Gauss-Jordan elimination using only constant pivots.
    fn inverse_by_unit_pivots(&self) -> Option<PolyMatrix> {
        let n = self.rows;
        let mut a: Vec<Vec<Polynomial>> = (0..n).map(|r| self.row(r).to_vec()).collect();
        let mut b: Vec<Vec<Polynomial>> = (0..n)
            .map(|r| {
                (0..n)
                    .map(|c| {
                        if r == c {
                            self.ring.one()
                        } else {
                            self.ring.zero()
                        }
                    })
                    .collect()
            })
            .collect();
        for k in 0..n {
            let p = (k..n).find(|&r| a[r][k].is_unit())?;
            a.swap(p, k);
            b.swap(p, k);
            let inv = a[k][k].constant_term().inverse();
            for j in 0..n {
                a[k][j] = a[k][j].scale(&inv);
                b[k][j] = b[k][j].scale(&inv);
            }
            for i in 0..n {
                if i == k || a[i][k].is_zero() {
                    continue;
                }
                let f = a[i][k].clone();
                for j in 0..n {
                    if !a[k][j].is_zero() {
                        a[i][j] = &a[i][j] - &(&f * &a[k][j]);
                    }
                    if !b[k][j].is_zero() {
                        b[i][j] = &b[i][j] - &(&f * &b[k][j]);
                    }
                }
            }
        }
        PolyMatrix::from_rows(&self.ring, b).ok()
    }

    /// Square, ones on the diagonal, zeros below it.
    pub fn is_unitriangular(&self) -> bool {
        self.is_square()
            && self.entries().all(|(r, c, p)| {
                if r == c {
                    p == &self.ring.one()
                } else if r > c {
                    p.is_zero()
                } else {
                    true
                }
            })
    }
}

fn pivot_cost(p: &Polynomial) -> (bool, usize) {
    (p.is_zero(), p.nterms())
}

impl fmt::Display for PolyMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let cells: Vec<String> = self.data.iter().map(|p| p.to_string()).collect();
        let width = cells.iter().map(|s| s.len()).max().unwrap_or(1);
        for r in 0..self.rows {
            write!(f, "[")?;
            for c in 0..self.cols {
                if c > 0 {
                    write!(f, "  ")?;
                }
                write!(f, "{:>width$}", cells[r * self.cols + c])?;
            }
            writeln!(f, "]")?;
        }
        Ok(())
    }
}
