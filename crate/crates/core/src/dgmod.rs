//! DG-algebra axioms, DG-module structures over a complex, structure transport,
//! and a degreewise linear solver for module structures.
//!
//! A module structure on a differential module `D` over a complex `F` is a
//! morphism `p: F ⊠ D -> D`. It is stored as a [`ProductTable`] holding the image
//! of every generator `b ⊗ g` of the box product.

use std::collections::{BTreeMap, HashMap};
use std::sync::Arc;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::diffmod::{
    box_product, verify_isomorphism, ChainComplex, DiffModError, DifferentialModule,
};
use crate::exterior::{shuffle_sign, Subset};
use crate::koszul::KoszulComplex;
use crate::linalg::{self, Echelon, Insert};
use crate::matrix::PolyMatrix;
use crate::ring::{same_ring, Monomial, PolyRing, Polynomial, RingError, Scalar};

#[derive(Debug, Error, PartialEq, Eq)]
pub enum DgError {
    #[error("shape mismatch: {0}")]
    Shape(String),
    #[error("table entry for ({i},{basis},{generator}) is not homogeneous of degree {expected} in row {row}")]
    NotHomogeneous {
        i: usize,
        basis: usize,
        generator: usize,
        row: usize,
        expected: i64,
    },
    #[error("the map is not a verified isomorphism")]
    NotIsomorphism,
    #[error("the product table on the target is not a DG-module structure")]
    NotDgModule,
    #[error("differential module must be graded")]
    UngradedInput,
    #[error("bad table key {0:?}")]
    BadKey(String),
    #[error(transparent)]
    DiffMod(#[from] DiffModError),
    #[error(transparent)]
    Ring(#[from] RingError),
}

/// A multiplication `F_i x F_j -> F_{i+j}` on the basis of a complex.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AlgebraProduct {
    ring: Arc<PolyRing>,
    ranks: Vec<usize>,
    table: BTreeMap<(usize, usize, usize, usize), Vec<Polynomial>>,
}

impl AlgebraProduct {
    /// The zero product on a complex with the given ranks.
    pub fn zero(ring: &Arc<PolyRing>, ranks: Vec<usize>) -> AlgebraProduct {
        AlgebraProduct {
            ring: ring.clone(),
            ranks,
            table: BTreeMap::new(),
        }
    }

    /// Ring multiplication on `R` concentrated in degree zero.
    pub fn ring_multiplication(ring: &Arc<PolyRing>) -> AlgebraProduct {
        let mut p = AlgebraProduct::zero(ring, vec![1]);
        p.set(0, 0, 0, 0, vec![ring.one()]);
        p
    }

    /// The wedge product on the Koszul complex, in the size-then-lex basis of each `⋀^i`.
    pub fn koszul_wedge(k: &KoszulComplex) -> AlgebraProduct {
        let n = k.rank();
        let ring = k.ring().clone();
        let bases: Vec<Vec<Subset>> = (0..=n).map(|i| Subset::of_size(n, i)).collect();
        let position: HashMap<Subset, usize> = bases
            .iter()
            .flat_map(|b| b.iter().enumerate().map(|(k, s)| (*s, k)))
            .collect();
        let mut p = AlgebraProduct::zero(&ring, bases.iter().map(|b| b.len()).collect());
        for (i, bi) in bases.iter().enumerate() {
            for (j, bj) in bases.iter().enumerate().take(n + 1 - i) {
                for (x, s) in bi.iter().enumerate() {
                    for (y, t) in bj.iter().enumerate() {
                        if !s.is_disjoint(*t) {
                            continue;
                        }
                        let mut v = vec![ring.zero(); bases[i + j].len()];
                        v[position[&s.union(*t)]] = ring.int(shuffle_sign(*s, *t) as i64);
                        p.set(i, x, j, y, v);
                    }
                }
            }
        }
        p
    }

    pub fn ring(&self) -> &Arc<PolyRing> {
        &self.ring
    }

    pub fn ranks(&self) -> &[usize] {
        &self.ranks
    }

    pub fn set(&mut self, i: usize, x: usize, j: usize, y: usize, v: Vec<Polynomial>) {
        assert!(
            i + j < self.ranks.len() && v.len() == self.ranks[i + j],
            "product lands outside the complex"
        );
        self.table.insert((i, x, j, y), v);
    }

    /// `u_x * v_y` for basis elements of `F_i` and `F_j`; empty when `i + j` exceeds the length.
    pub fn mul_basis(&self, i: usize, x: usize, j: usize, y: usize) -> Vec<Polynomial> {
        if i + j >= self.ranks.len() {
            return Vec::new();
        }
        self.table
            .get(&(i, x, j, y))
            .cloned()
            .unwrap_or_else(|| vec![self.ring.zero(); self.ranks[i + j]])
    }

    /// Product of coordinate vectors `u in F_i`, `v in F_j`.
    pub fn mul(&self, i: usize, u: &[Polynomial], j: usize, v: &[Polynomial]) -> Vec<Polynomial> {
        if i + j >= self.ranks.len() {
            return Vec::new();
        }
        let mut out = vec![self.ring.zero(); self.ranks[i + j]];
        for (x, cu) in u.iter().enumerate().filter(|(_, c)| !c.is_zero()) {
            for (y, cv) in v.iter().enumerate().filter(|(_, c)| !c.is_zero()) {
                let c = cu * cv;
                for (o, e) in out.iter_mut().zip(self.mul_basis(i, x, j, y)) {
                    if !e.is_zero() {
                        *o = &*o + &(&c * &e);
                    }
                }
            }
        }
        out
    }

    /// Swaps the sign of one product, for building deliberately broken tables.
    pub fn negate_entry(&mut self, i: usize, x: usize, j: usize, y: usize) {
        let v: Vec<Polynomial> = self.mul_basis(i, x, j, y).iter().map(|p| -p).collect();
        self.set(i, x, j, y, v);
    }
}

/// Which DG-algebra axioms hold on all basis pairs (and triples, for associativity).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DgAlgebraReport {
    pub unital: bool,
    pub leibniz: bool,
    pub graded_commutative: bool,
    pub odd_squares_vanish: bool,
    pub associative: bool,
}

impl DgAlgebraReport {
    /// The required axioms; associativity is reported separately.
    pub fn is_dg_algebra(&self) -> bool {
        self.unital && self.leibniz && self.graded_commutative && self.odd_squares_vanish
    }
}

fn basis_vec(ring: &Arc<PolyRing>, rank: usize, k: usize) -> Vec<Polynomial> {
    (0..rank)
        .map(|r| if r == k { ring.one() } else { ring.zero() })
        .collect()
}

fn add_vec(a: &[Polynomial], b: &[Polynomial]) -> Vec<Polynomial> {
    if a.is_empty() {
        return b.to_vec();
    }
    if b.is_empty() {
        return a.to_vec();
    }
    a.iter().zip(b).map(|(x, y)| x + y).collect()
}

fn is_zero_vec(v: &[Polynomial]) -> bool {
    v.iter().all(|p| p.is_zero())
}

/// `d_i` applied to a coordinate vector of `F_i`; empty for `i = 0`.
fn apply_d(c: &ChainComplex, i: usize, v: &[Polynomial]) -> Vec<Polynomial> {
    if i == 0 {
        Vec::new()
    } else {
        c.differential(i).apply(v)
    }
}

/// Checks the DG-algebra axioms of `prod` on the complex `c`.
///
/// The unit is the first basis element of `F_0`, which must have rank one.
pub fn check_dg_algebra(
    c: &ChainComplex,
    prod: &AlgebraProduct,
) -> Result<DgAlgebraReport, DgError> {
    if prod.ranks() != c.ranks() || !same_ring(prod.ring(), c.ring()) {
        return Err(DgError::Shape(
            "product and complex disagree on ranks or ring".into(),
        ));
    }
    if c.ranks()[0] != 1 {
        return Err(DgError::Shape("F_0 must be free of rank one".into()));
    }
    let ring = c.ring();
    let ranks = c.ranks();
    let top = ranks.len();
    let sign = |k: usize| {
        if k.is_multiple_of(2) {
            ring.one()
        } else {
            -&ring.one()
        }
    };
    let scale =
        |s: &Polynomial, v: &[Polynomial]| -> Vec<Polynomial> { v.iter().map(|p| s * p).collect() };
    let mut rep = DgAlgebraReport {
        unital: true,
        leibniz: true,
        graded_commutative: true,
        odd_squares_vanish: true,
        associative: true,
    };
    for i in 0..top {
        for x in 0..ranks[i] {
            let u = basis_vec(ring, ranks[i], x);
            if prod.mul_basis(0, 0, i, x) != u || prod.mul_basis(i, x, 0, 0) != u {
                rep.unital = false;
            }
            if i % 2 == 1 && !is_zero_vec(&prod.mul_basis(i, x, i, x)) {
                rep.odd_squares_vanish = false;
            }
            for j in 0..top - i {
                for y in 0..ranks[j] {
                    let v = basis_vec(ring, ranks[j], y);
                    let uv = prod.mul_basis(i, x, j, y);
                    let vu = prod.mul_basis(j, y, i, x);
                    if uv != scale(&sign(i * j), &vu) {
                        rep.graded_commutative = false;
                    }
                    let lhs = apply_d(c, i + j, &uv);
                    let du_v = if i > 0 {
                        prod.mul(i - 1, &apply_d(c, i, &u), j, &v)
                    } else {
                        Vec::new()
                    };
                    let u_dv = if j > 0 {
                        prod.mul(i, &u, j - 1, &apply_d(c, j, &v))
                    } else {
                        Vec::new()
                    };
                    let rhs = add_vec(&du_v, &scale(&sign(i), &u_dv));
                    let same = if lhs.is_empty() || rhs.is_empty() {
                        is_zero_vec(&lhs) && is_zero_vec(&rhs)
                    } else {
                        lhs == rhs
                    };
                    if !same {
                        rep.leibniz = false;
                    }
                    for (k, &rk) in ranks.iter().enumerate().take(top - i - j) {
                        for z in 0..rk {
                            let w = basis_vec(ring, rk, z);
                            let left = prod.mul(i + j, &uv, k, &w);
                            let right = prod.mul(i, &u, j + k, &prod.mul_basis(j, y, k, z));
                            if left != right {
                                rep.associative = false;
                            }
                        }
                    }
                }
            }
        }
    }
    Ok(rep)
}

/// A module structure `p: F ⊠ D -> D`, keyed by `(i, basis index in F_i, generator of D)`.
///
/// Missing keys are zero.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ProductTable {
    ring: Arc<PolyRing>,
    ranks: Vec<usize>,
    rank_d: usize,
    entries: BTreeMap<(usize, usize, usize), Vec<Polynomial>>,
}

impl ProductTable {
    pub fn zero(ring: &Arc<PolyRing>, ranks: Vec<usize>, rank_d: usize) -> ProductTable {
        ProductTable {
            ring: ring.clone(),
            ranks,
            rank_d,
            entries: BTreeMap::new(),
        }
    }

    /// An empty table shaped for `F ⊠ D`.
    pub fn for_pair(c: &ChainComplex, d: &DifferentialModule) -> ProductTable {
        ProductTable::zero(d.ring(), c.ranks(), d.rank())
    }

    pub fn ring(&self) -> &Arc<PolyRing> {
        &self.ring
    }

    pub fn ranks(&self) -> &[usize] {
        &self.ranks
    }

    pub fn rank_d(&self) -> usize {
        self.rank_d
    }

    pub fn get(&self, i: usize, b: usize, g: usize) -> Vec<Polynomial> {
        self.entries
            .get(&(i, b, g))
            .cloned()
            .unwrap_or_else(|| vec![self.ring.zero(); self.rank_d])
    }

    pub fn set(&mut self, i: usize, b: usize, g: usize, v: Vec<Polynomial>) {
        assert!(
            i < self.ranks.len() && b < self.ranks[i] && g < self.rank_d && v.len() == self.rank_d
        );
        if is_zero_vec(&v) {
            self.entries.remove(&(i, b, g));
        } else {
            self.entries.insert((i, b, g), v);
        }
    }

    /// Parses entries given as coordinate strings, e.g. `set_str(1, 0, 2, &["x1", "0", "1", "0"])`.
    pub fn set_str(&mut self, i: usize, b: usize, g: usize, v: &[&str]) -> Result<(), DgError> {
        let v = v
            .iter()
            .map(|s| self.ring.parse(s))
            .collect::<Result<Vec<_>, _>>()?;
        if v.len() != self.rank_d {
            return Err(DgError::Shape(format!(
                "entry needs {} coordinates",
                self.rank_d
            )));
        }
        self.set(i, b, g, v);
        Ok(())
    }

    /// Nonzero entries in key order.
    pub fn entries(&self) -> impl Iterator<Item = (&(usize, usize, usize), &Vec<Polynomial>)> {
        self.entries.iter()
    }

    /// The matrix of `p` from the box product `F ⊠ D` to `D`.
    pub fn to_matrix(&self) -> PolyMatrix {
        let total: usize = self.ranks.iter().sum::<usize>() * self.rank_d;
        let mut m = PolyMatrix::zero(&self.ring, self.rank_d, total);
        for (&(i, b, g), v) in &self.entries {
            let col = self.box_index(i, b, g);
            for (r, p) in v.iter().enumerate() {
                m.set(r, col, p.clone());
            }
        }
        m
    }

    fn box_index(&self, i: usize, b: usize, g: usize) -> usize {
        (self.ranks[..i].iter().sum::<usize>() + b) * self.rank_d + g
    }
}

/// JSON form: `{"i,basis,gen": ["p_1", ..., "p_m"], ...}` with zero entries omitted.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct ProductTableJson(pub BTreeMap<String, Vec<String>>);

impl ProductTableJson {
    pub fn from_table(t: &ProductTable) -> ProductTableJson {
        ProductTableJson(
            t.entries()
                .map(|(&(i, b, g), v)| {
                    (
                        format!("{i},{b},{g}"),
                        v.iter().map(|p| p.to_string()).collect(),
                    )
                })
                .collect(),
        )
    }

    pub fn to_table(
        &self,
        c: &ChainComplex,
        d: &DifferentialModule,
    ) -> Result<ProductTable, DgError> {
        let mut t = ProductTable::for_pair(c, d);
        for (k, v) in &self.0 {
            let parts: Vec<usize> = k
                .split(',')
                .map(|s| s.trim().parse::<usize>())
                .collect::<Result<_, _>>()
                .map_err(|_| DgError::BadKey(k.clone()))?;
            let [i, b, g] = parts[..] else {
                return Err(DgError::BadKey(k.clone()));
            };
            if i >= t.ranks.len() || b >= t.ranks[i] || g >= t.rank_d {
                return Err(DgError::BadKey(k.clone()));
            }
            let refs: Vec<&str> = v.iter().map(|s| s.as_str()).collect();
            t.set_str(i, b, g, &refs)?;
        }
        Ok(t)
    }
}

fn check_pair(c: &ChainComplex, d: &DifferentialModule, p: &ProductTable) -> Result<(), DgError> {
    if !same_ring(c.ring(), d.ring()) || !same_ring(p.ring(), d.ring()) {
        return Err(DgError::Ring(RingError::RingMismatch));
    }
    if p.ranks() != c.ranks() || p.rank_d() != d.rank() {
        return Err(DgError::Shape(
            "table does not match the complex and module".into(),
        ));
    }
    Ok(())
}

/// Internal degree of the box generator `b ⊗ g` for `b` in `F_i`.
fn box_degree(c: &ChainComplex, d: &DifferentialModule, i: usize, b: usize, g: usize) -> i64 {
    c.modules()[i].twists()[b] - i as i64 * d.degree() + d.twists()[g]
}

fn check_table_homogeneous(
    c: &ChainComplex,
    d: &DifferentialModule,
    p: &ProductTable,
) -> Result<(), DgError> {
    if !d.is_graded() {
        return Ok(());
    }
    for (&(i, b, g), v) in p.entries() {
        let s = box_degree(c, d, i, b, g);
        for (row, e) in v.iter().enumerate() {
            let expected = s - d.twists()[row];
            if !e.is_zero() && !e.is_homogeneous_of(expected) {
                return Err(DgError::NotHomogeneous {
                    i,
                    basis: b,
                    generator: g,
                    row,
                    expected,
                });
            }
        }
    }
    Ok(())
}

/// First box generator at which `p` fails to intertwine the differentials or to be unital.
///
/// Only generators of internal degree at most `max_deg` are examined when a
/// bound is given.
pub fn module_defect(
    c: &ChainComplex,
    d: &DifferentialModule,
    p: &ProductTable,
    require_unit: bool,
    max_deg: Option<i64>,
) -> Result<Option<(usize, usize, usize)>, DgError> {
    check_pair(c, d, p)?;
    check_table_homogeneous(c, d, p)?;
    let boxed = box_product(c, d)?;
    let pm = p.to_matrix();
    let lhs = d.matrix().mul(&pm);
    let rhs = pm.mul(boxed.matrix());
    let ring = d.ring();
    for (i, m) in c.modules().iter().enumerate() {
        for b in 0..m.rank() {
            for g in 0..d.rank() {
                if max_deg.is_some_and(|t| box_degree(c, d, i, b, g) > t) {
                    continue;
                }
                let col = p.box_index(i, b, g);
                if (0..d.rank()).any(|r| lhs.get(r, col) != rhs.get(r, col)) {
                    return Ok(Some((i, b, g)));
                }
                if require_unit
                    && i == 0
                    && b == 0
                    && p.get(0, 0, g) != basis_vec(ring, d.rank(), g)
                {
                    return Ok(Some((i, b, g)));
                }
            }
        }
    }
    Ok(None)
}

/// True iff `p` is a unital morphism `F ⊠ D -> D`.
///
/// Equivalently `d(f x) = d(f) x + (-1)^i f d(x)` on generator pairs and `1 x = x`.
/// The unit is the first basis element of `F_0`.
pub fn check_dg_module(
    c: &ChainComplex,
    d: &DifferentialModule,
    p: &ProductTable,
) -> Result<bool, DgError> {
    Ok(module_defect(c, d, p, true, None)?.is_none())
}

/// The table `f · x = f ∧ x` on the fold of a Koszul complex.
pub fn fold_wedge_table(
    k: &KoszulComplex,
    fold_dm: &DifferentialModule,
) -> Result<ProductTable, DgError> {
    let n = k.rank();
    let wedge = AlgebraProduct::koszul_wedge(k);
    let ranks = k.complex().ranks();
    if fold_dm.rank() != ranks.iter().sum::<usize>() {
        return Err(DgError::Shape(
            "module is not the fold of this complex".into(),
        ));
    }
    let offsets: Vec<usize> = (0..=n + 1)
        .map(|i| ranks[..i.min(n + 1)].iter().sum())
        .collect();
    let mut t = ProductTable::zero(k.ring(), ranks.clone(), fold_dm.rank());
    for i in 0..=n {
        for b in 0..ranks[i] {
            for j in 0..=n - i {
                for y in 0..ranks[j] {
                    let prod = wedge.mul_basis(i, b, j, y);
                    let mut v = vec![k.ring().zero(); fold_dm.rank()];
                    for (o, e) in prod.into_iter().enumerate() {
                        v[offsets[i + j] + o] = e;
                    }
                    t.set(i, b, offsets[j] + y, v);
                }
            }
        }
    }
    Ok(t)
}

/// Transports a module structure along an isomorphism `phi: D -> D'`.
///
/// The result is `f · x = phi^{-1}(f · phi(x))`, asserted to be a DG-module structure on `D`.
pub fn transport_product(
    c: &ChainComplex,
    phi: &PolyMatrix,
    d: &DifferentialModule,
    d_prime: &DifferentialModule,
    p_prime: &ProductTable,
) -> Result<ProductTable, DgError> {
    if !verify_isomorphism(phi, d, d_prime)? {
        return Err(DgError::NotIsomorphism);
    }
    if !check_dg_module(c, d_prime, p_prime)? {
        return Err(DgError::NotDgModule);
    }
    let inv = phi.inverse().ok_or(DgError::NotIsomorphism)?;
    let mut out = ProductTable::for_pair(c, d);
    let ring = d.ring();
    for (i, m) in c.modules().iter().enumerate() {
        for b in 0..m.rank() {
            for g in 0..d.rank() {
                let mut acc = vec![ring.zero(); d.rank()];
                for (g2, coef) in phi.column(g).into_iter().enumerate() {
                    if coef.is_zero() {
                        continue;
                    }
                    for (a, e) in acc.iter_mut().zip(p_prime.get(i, b, g2)) {
                        *a = &*a + &(&coef * &e);
                    }
                }
                out.set(i, b, g, inv.apply(&acc));
            }
        }
    }
    assert!(
        check_dg_module(c, d, &out)?,
        "transported structure must be a DG-module structure"
    );
    Ok(out)
}

/// Options for [`solve_dg_module`].
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct SolveOptions {
    /// Impose `1 · x = x`. Without it the zero table is always a solution.
    pub unital: bool,
}

impl Default for SolveOptions {
    fn default() -> Self {
        SolveOptions { unital: true }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum DgSolveResult {
    /// A table satisfying every equation at box generators of degree at most the bound.
    Feasible(ProductTable),
    /// The smallest box-generator degree at which the accumulated system becomes inconsistent.
    Infeasible(i64),
}

impl DgSolveResult {
    pub fn is_feasible(&self) -> bool {
        matches!(self, DgSolveResult::Feasible(_))
    }
}

/// The largest internal degree of a box generator; equations above it do not exist.
pub fn box_max_degree(c: &ChainComplex, d: &DifferentialModule) -> i64 {
    let mut best = i64::MIN;
    for (i, m) in c.modules().iter().enumerate() {
        for b in 0..m.rank() {
            for g in 0..d.rank() {
                best = best.max(box_degree(c, d, i, b, g));
            }
        }
    }
    best
}

/// Searches for a module structure `p: F ⊠ D -> D` by exact linear algebra.
///
/// The unknowns are the coefficients of every `p(b ⊗ g)` in the monomial basis
/// of its forced degree. The equations are the intertwining identity at each
/// box generator, together with unitality when requested. They are added in
/// increasing degree of the box generator up to `max_deg`. The first degree at
/// which the system turns inconsistent is reported. A feasible table is checked
/// by [`module_defect`] up to the same bound; when the bound reaches
/// [`box_max_degree`] this is a full DG-module structure.
///
/// Associativity is quadratic in the unknowns and is not imposed.
pub fn solve_dg_module(
    c: &ChainComplex,
    d: &DifferentialModule,
    max_deg: i64,
    opts: SolveOptions,
) -> Result<DgSolveResult, DgError> {
    if !d.is_graded() {
        return Err(DgError::UngradedInput);
    }
    if !same_ring(c.ring(), d.ring()) {
        return Err(DgError::Ring(RingError::RingMismatch));
    }
    let ring = d.ring().clone();
    let nd = d.rank();
    let ranks = c.ranks();

    // unknowns: (generator, row, monomial)
    let mut gens: Vec<(usize, usize, usize)> = Vec::new();
    for (i, r) in ranks.iter().enumerate() {
        for b in 0..*r {
            for g in 0..nd {
                gens.push((i, b, g));
            }
        }
    }
    // one unknown per (box generator, target row, monomial)
    type Key = (usize, usize, usize);
    let mut unknowns: Vec<(Key, usize, Monomial)> = Vec::new();
    let mut first_unknown: HashMap<Key, Vec<(usize, usize, Monomial)>> = HashMap::new();
    for &(i, b, g) in &gens {
        let s = box_degree(c, d, i, b, g);
        let mut list = Vec::new();
        for row in 0..nd {
            for mono in ring.monomials_of_degree(s - d.twists()[row]) {
                list.push((unknowns.len(), row, mono.clone()));
                unknowns.push(((i, b, g), row, mono));
            }
        }
        first_unknown.insert((i, b, g), list);
    }

    let mut by_degree: BTreeMap<i64, Vec<(usize, usize, usize)>> = BTreeMap::new();
    for &(i, b, g) in &gens {
        by_degree
            .entry(box_degree(c, d, i, b, g))
            .or_default()
            .push((i, b, g));
    }

    let mut ech = Echelon::new(ring.field(), unknowns.len());
    let minus_one = -&ring.field().one();
    for (&s, group) in &by_degree {
        if s > max_deg {
            break;
        }
        for &(i, b, g) in group {
            let mut eqs: HashMap<(usize, Monomial), BTreeMap<usize, Scalar>> = HashMap::new();
            let mut add = |row: usize, mono: Monomial, u: usize, c: Scalar| {
                let cell = eqs
                    .entry((row, mono))
                    .or_default()
                    .entry(u)
                    .or_insert_with(|| ring.field().zero());
                *cell = &*cell + &c;
            };
            // d^D p(b ⊗ g)
            for (u, r2, mu) in &first_unknown[&(i, b, g)] {
                for row in 0..nd {
                    for (cf, m) in d.matrix().get(row, *r2).terms() {
                        add(row, m.mul(mu), *u, cf.clone());
                    }
                }
            }
            // - p(d^F(b) ⊗ g)
            if i >= 1 {
                let di = c.differential(i);
                for b2 in 0..di.nrows() {
                    for (cf, m) in di.get(b2, b).terms() {
                        for (u, row, mu) in &first_unknown[&(i - 1, b2, g)] {
                            add(*row, m.mul(mu), *u, &minus_one * cf);
                        }
                    }
                }
            }
            // - (-1)^i p(b ⊗ d^D g)
            for g2 in 0..nd {
                for (cf, m) in d.matrix().get(g2, g).terms() {
                    let cf = if i % 2 == 1 {
                        cf.clone()
                    } else {
                        &minus_one * cf
                    };
                    for (u, row, mu) in &first_unknown[&(i, b, g2)] {
                        add(*row, m.mul(mu), *u, cf.clone());
                    }
                }
            }
            let mut keys: Vec<_> = eqs.into_iter().collect();
            keys.sort_by(|x, y| {
                x.0 .0
                    .cmp(&y.0 .0)
                    .then_with(|| ring.compare(&x.0 .1, &y.0 .1))
            });
            for (_, row) in keys {
                if ech.insert(linalg::from_map(row), ring.field().zero()) == Insert::Inconsistent {
                    return Ok(DgSolveResult::Infeasible(s));
                }
            }
            if opts.unital && i == 0 && b == 0 {
                for (u, row, mu) in &first_unknown[&(i, b, g)] {
                    let target = if *row == g && mu.is_one() {
                        ring.field().one()
                    } else {
                        ring.field().zero()
                    };
                    if ech.insert(vec![(*u, ring.field().one())], target) == Insert::Inconsistent {
                        return Ok(DgSolveResult::Infeasible(s));
                    }
                }
            }
        }
    }
    let x = ech.solve().expect("consistent system has a solution");
    let mut table = ProductTable::for_pair(c, d);
    let mut acc: BTreeMap<(usize, usize, usize), Vec<Polynomial>> = BTreeMap::new();
    for ((key, row, mono), val) in unknowns.into_iter().zip(x) {
        if val.is_zero() {
            continue;
        }
        let v = acc.entry(key).or_insert_with(|| vec![ring.zero(); nd]);
        v[row] = &v[row] + &Polynomial::monomial(&ring, val, mono);
    }
    for ((i, b, g), v) in acc {
        if box_degree(c, d, i, b, g) <= max_deg {
            table.set(i, b, g, v);
        }
    }
    assert_eq!(
        module_defect(c, d, &table, opts.unital, Some(max_deg))?,
        None,
        "solver output must satisfy the equations it was given"
    );
    Ok(DgSolveResult::Feasible(table))
}
