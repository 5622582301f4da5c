//! Graded differential modules over a polynomial ring.
//!
//! A differential module is a free module `D` with a square-zero matrix `d`.
//! Matrices act on columns: column `c` lists the coordinates of `d(g_c)`.
//! Each generator carries an internal degree (its "twist"); a graded module of
//! degree `a` has entry `(r, c)` homogeneous of degree `twist_c + a - twist_r`.

mod homology;
mod json;

use std::sync::Arc;

use thiserror::Error;

use crate::matrix::PolyMatrix;
use crate::ring::{same_ring, PolyRing, Polynomial, RingError};

pub use homology::{default_max_deg, homology_hilbert, homology_range, HilbertVector};
pub use json::{ComplexJson, GeneratorJson, ModuleJson, ParsedModule, RingJson};

#[derive(Debug, Error, PartialEq, Eq)]
pub enum DiffModError {
    #[error("d^2 is nonzero at ({row}, {col}): {entry}")]
    NotSquareZero {
        row: usize,
        col: usize,
        entry: String,
    },
    #[error("entry ({row}, {col}) = {entry} is not homogeneous of degree {expected}")]
    NotHomogeneous {
        row: usize,
        col: usize,
        entry: String,
        expected: i64,
    },
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("homology requires a graded differential module")]
    UngradedInput,
    #[error("degree mismatch: {0} vs {1}")]
    DegreeMismatch(i64, i64),
    #[error("entry ({row}, {col}) violates the flag condition")]
    NotAFlag { row: usize, col: usize },
    #[error("d_{index} d_{next} is nonzero", next = .index + 1)]
    NotAComplex { index: usize },
    #[error("invalid JSON: {0}")]
    Json(String),
    #[error(transparent)]
    Ring(#[from] RingError),
}

/// A free module with one internal degree per generator.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GradedFreeModule {
    ring: Arc<PolyRing>,
    twists: Vec<i64>,
}

impl GradedFreeModule {
    pub fn new(ring: &Arc<PolyRing>, twists: Vec<i64>) -> GradedFreeModule {
        GradedFreeModule {
            ring: ring.clone(),
            twists,
        }
    }

    /// `rank` generators of degree zero.
    pub fn free(ring: &Arc<PolyRing>, rank: usize) -> GradedFreeModule {
        GradedFreeModule::new(ring, vec![0; rank])
    }

    pub fn ring(&self) -> &Arc<PolyRing> {
        &self.ring
    }

    pub fn twists(&self) -> &[i64] {
        &self.twists
    }

    pub fn rank(&self) -> usize {
        self.twists.len()
    }

    pub fn shifted(&self, t: i64) -> GradedFreeModule {
        GradedFreeModule::new(&self.ring, self.twists.iter().map(|x| x + t).collect())
    }
}

/// Checks that every nonzero entry of a map between graded modules has the right degree.
fn check_homogeneous(
    m: &PolyMatrix,
    src: &[i64],
    dst: &[i64],
    shift: i64,
) -> Result<(), DiffModError> {
    for (r, c, p) in m.entries() {
        let expected = src[c] + shift - dst[r];
        if !p.is_homogeneous_of(expected) {
            return Err(DiffModError::NotHomogeneous {
                row: r,
                col: c,
                entry: p.to_string(),
                expected,
            });
        }
    }
    Ok(())
}

fn check_ring(m: &PolyMatrix, ring: &Arc<PolyRing>) -> Result<(), DiffModError> {
    if same_ring(m.ring(), ring) {
        Ok(())
    } else {
        Err(DiffModError::Ring(RingError::RingMismatch))
    }
}

/// A free module with a square-zero endomorphism.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DifferentialModule {
    module: GradedFreeModule,
    matrix: PolyMatrix,
    degree: i64,
    graded: bool,
}

/// Validates and builds a differential module.
pub fn make_dm(
    module: GradedFreeModule,
    matrix: PolyMatrix,
    degree: i64,
    graded: bool,
) -> Result<DifferentialModule, DiffModError> {
    DifferentialModule::new(module, matrix, degree, graded)
}

impl DifferentialModule {
    pub fn new(
        module: GradedFreeModule,
        matrix: PolyMatrix,
        degree: i64,
        graded: bool,
    ) -> Result<DifferentialModule, DiffModError> {
        let n = module.rank();
        if matrix.nrows() != n || matrix.ncols() != n {
            return Err(DiffModError::DimensionMismatch(format!(
                "{}x{} matrix on a rank {n} module",
                matrix.nrows(),
                matrix.ncols()
            )));
        }
        check_ring(&matrix, module.ring())?;
        if graded {
            check_homogeneous(&matrix, module.twists(), module.twists(), degree)?;
        }
        let dm = DifferentialModule {
            module,
            matrix,
            degree,
            graded,
        };
        dm.check_square_zero()?;
        Ok(dm)
    }

    /// Re-asserts `d^2 = 0`, reporting the first nonzero entry of `d^2`.
    pub fn check_square_zero(&self) -> Result<(), DiffModError> {
        let sq = self.matrix.mul(&self.matrix);
        match sq.first_nonzero() {
            None => Ok(()),
            Some((row, col, p)) => Err(DiffModError::NotSquareZero {
                row,
                col,
                entry: p.to_string(),
            }),
        }
    }

    pub fn ring(&self) -> &Arc<PolyRing> {
        self.module.ring()
    }

    pub fn module(&self) -> &GradedFreeModule {
        &self.module
    }

    pub fn twists(&self) -> &[i64] {
        self.module.twists()
    }

    pub fn matrix(&self) -> &PolyMatrix {
        &self.matrix
    }

    pub fn degree(&self) -> i64 {
        self.degree
    }

    pub fn is_graded(&self) -> bool {
        self.graded
    }

    pub fn rank(&self) -> usize {
        self.module.rank()
    }

    /// Same data with the grading forgotten.
    pub fn ungraded(&self) -> DifferentialModule {
        DifferentialModule {
            graded: false,
            ..self.clone()
        }
    }

    /// Uniform shift of all generator degrees.
    pub fn twist(&self, t: i64) -> DifferentialModule {
        DifferentialModule {
            module: self.module.shifted(t),
            ..self.clone()
        }
    }

    /// Minimal when `d ⊗ k = 0`, i.e. no entry has a nonzero constant term.
    pub fn is_minimal(&self) -> bool {
        self.matrix
            .entries()
            .all(|(_, _, p)| p.constant_term().is_zero())
    }

    /// The same module over a larger ring, matching variables by name.
    pub fn base_change(&self, target: &Arc<PolyRing>) -> Result<DifferentialModule, DiffModError> {
        let matrix = self.matrix.map_into(target)?;
        let module = GradedFreeModule::new(target, self.twists().to_vec());
        DifferentialModule::new(module, matrix, self.degree, self.graded)
    }

    /// Transports the differential along an invertible `phi: self -> D'`, so the result has
    /// matrix `phi d phi^{-1}` on the same generators.
    pub fn conjugate(&self, phi: &PolyMatrix) -> Result<DifferentialModule, DiffModError> {
        let inv = phi.inverse().ok_or_else(|| {
            DiffModError::DimensionMismatch("change of basis is not invertible".into())
        })?;
        let m = phi.mul(&self.matrix).mul(&inv);
        DifferentialModule::new(self.module.clone(), m, self.degree, self.graded)
    }
}

/// Block-diagonal sum.
pub fn direct_sum(
    a: &DifferentialModule,
    b: &DifferentialModule,
) -> Result<DifferentialModule, DiffModError> {
    if !same_ring(a.ring(), b.ring()) {
        return Err(DiffModError::Ring(RingError::RingMismatch));
    }
    if a.degree != b.degree {
        return Err(DiffModError::DegreeMismatch(a.degree, b.degree));
    }
    let mut twists = a.twists().to_vec();
    twists.extend_from_slice(b.twists());
    DifferentialModule::new(
        GradedFreeModule::new(a.ring(), twists),
        a.matrix.direct_sum(&b.matrix),
        a.degree,
        a.graded && b.graded,
    )
}

/// Uniform shift of all generator degrees.
pub fn twist(d: &DifferentialModule, t: i64) -> DifferentialModule {
    d.twist(t)
}

/// A differential module with a flag level per generator such that `d` strictly lowers levels.
///
/// Block `A_{i,j}` has rows at level `j` and columns at level `i`; it can be
/// nonzero only when `j < i`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FreeFlag {
    dm: DifferentialModule,
    levels: Vec<usize>,
}

impl FreeFlag {
    pub fn new(dm: DifferentialModule, levels: Vec<usize>) -> Result<FreeFlag, DiffModError> {
        if levels.len() != dm.rank() {
            return Err(DiffModError::DimensionMismatch(format!(
                "{} flag levels for rank {}",
                levels.len(),
                dm.rank()
            )));
        }
        for (r, c, p) in dm.matrix().entries() {
            if !p.is_zero() && levels[r] >= levels[c] {
                return Err(DiffModError::NotAFlag { row: r, col: c });
            }
        }
        Ok(FreeFlag { dm, levels })
    }

    pub fn dm(&self) -> &DifferentialModule {
        &self.dm
    }

    pub fn into_dm(self) -> DifferentialModule {
        self.dm
    }

    pub fn levels(&self) -> &[usize] {
        &self.levels
    }

    /// Number of levels, i.e. one more than the top level.
    pub fn nlevels(&self) -> usize {
        self.levels.iter().max().map_or(0, |m| m + 1)
    }

    /// Generator indices at a level, in increasing order.
    pub fn level_indices(&self, level: usize) -> Vec<usize> {
        (0..self.levels.len())
            .filter(|&k| self.levels[k] == level)
            .collect()
    }

    /// Ranks of the levels.
    pub fn level_ranks(&self) -> Vec<usize> {
        (0..self.nlevels())
            .map(|l| self.level_indices(l).len())
            .collect()
    }

    /// The block `A_{i,j}`: the component of `d` from level `i` to level `j`.
    pub fn block(&self, i: usize, j: usize) -> PolyMatrix {
        self.dm
            .matrix()
            .select(&self.level_indices(j), &self.level_indices(i))
    }

    /// Replaces the differential, re-validating everything.
    pub fn with_matrix(&self, m: PolyMatrix) -> Result<FreeFlag, DiffModError> {
        let dm =
            DifferentialModule::new(self.dm.module.clone(), m, self.dm.degree, self.dm.graded)?;
        FreeFlag::new(dm, self.levels.clone())
    }
}

/// A chain complex `F_0 <- F_1 <- ... <- F_top` with `differentials[i - 1] = d_i: F_i -> F_{i-1}`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ChainComplex {
    ring: Arc<PolyRing>,
    modules: Vec<GradedFreeModule>,
    differentials: Vec<PolyMatrix>,
}

impl ChainComplex {
    /// Validates shapes, `d_i d_{i+1} = 0` and degree-zero homogeneity of every differential.
    pub fn new(
        ring: &Arc<PolyRing>,
        modules: Vec<GradedFreeModule>,
        differentials: Vec<PolyMatrix>,
    ) -> Result<ChainComplex, DiffModError> {
        if modules.is_empty() || differentials.len() + 1 != modules.len() {
            return Err(DiffModError::DimensionMismatch(format!(
                "{} modules need {} differentials, got {}",
                modules.len(),
                modules.len().saturating_sub(1),
                differentials.len()
            )));
        }
        for (i, d) in differentials.iter().enumerate() {
            let (src, dst) = (&modules[i + 1], &modules[i]);
            if d.nrows() != dst.rank() || d.ncols() != src.rank() {
                return Err(DiffModError::DimensionMismatch(format!(
                    "d_{} has the wrong shape",
                    i + 1
                )));
            }
            check_ring(d, ring)?;
            check_homogeneous(d, src.twists(), dst.twists(), 0)?;
        }
        for i in 1..differentials.len() {
            if !differentials[i - 1].mul(&differentials[i]).is_zero() {
                return Err(DiffModError::NotAComplex { index: i });
            }
        }
        Ok(ChainComplex {
            ring: ring.clone(),
            modules,
            differentials,
        })
    }

    pub fn ring(&self) -> &Arc<PolyRing> {
        &self.ring
    }

    pub fn modules(&self) -> &[GradedFreeModule] {
        &self.modules
    }

    pub fn differentials(&self) -> &[PolyMatrix] {
        &self.differentials
    }

    /// `d_i: F_i -> F_{i-1}` for `i >= 1`.
    pub fn differential(&self, i: usize) -> &PolyMatrix {
        &self.differentials[i - 1]
    }

    /// Index of the top module.
    pub fn length(&self) -> usize {
        self.modules.len() - 1
    }

    pub fn ranks(&self) -> Vec<usize> {
        self.modules.iter().map(|m| m.rank()).collect()
    }

    /// Offset of the first generator of `F_i` in the folded basis.
    pub fn offset(&self, i: usize) -> usize {
        self.modules[..i].iter().map(|m| m.rank()).sum()
    }
}

/// The fold of a complex as a degree-`a` differential module.
///
/// `F_i` is placed at flag level `i` with its generators shifted down by `i * a`,
/// which makes every differential homogeneous of degree `a`.
pub fn fold(c: &ChainComplex, a: i64) -> FreeFlag {
    let total = c.offset(c.modules.len());
    let mut twists = Vec::with_capacity(total);
    let mut levels = Vec::with_capacity(total);
    for (i, m) in c.modules.iter().enumerate() {
        twists.extend(m.twists().iter().map(|t| t - i as i64 * a));
        levels.extend(std::iter::repeat_n(i, m.rank()));
    }
    let mut mat = PolyMatrix::zero(&c.ring, total, total);
    for i in 1..c.modules.len() {
        let rows: Vec<usize> = (c.offset(i - 1)..c.offset(i)).collect();
        let cols: Vec<usize> = (c.offset(i)..c.offset(i + 1)).collect();
        mat.place(&rows, &cols, c.differential(i));
    }
    let dm = DifferentialModule::new(GradedFreeModule::new(&c.ring, twists), mat, a, true)
        .expect("the fold of a valid complex is a valid differential module");
    FreeFlag::new(dm, levels).expect("the fold is a flag")
}

/// Mapping cone of multiplication by `multiplier` on `source`.
///
/// The result lives over the multiplier's ring (the source is base-changed by
/// variable name) and has differential `[[-d, m], [0, d]]`. The second copy of
/// the generators is shifted so that `m` has the correct degree; a zero
/// multiplier is treated as having degree one.
pub fn mapping_cone(
    source: &DifferentialModule,
    multiplier: &Polynomial,
) -> Result<DifferentialModule, DiffModError> {
    let ring = multiplier.ring().clone();
    let src = if same_ring(source.ring(), &ring) {
        source.clone()
    } else {
        source.base_change(&ring)?
    };
    let mdeg = if multiplier.is_zero() {
        1
    } else if src.graded {
        multiplier.homogeneous_degree()?
    } else {
        multiplier.max_degree().unwrap_or(0)
    };
    let n = src.rank();
    let mut twists = src.twists().to_vec();
    twists.extend(src.twists().iter().map(|t| t + mdeg - src.degree));
    let first: Vec<usize> = (0..n).collect();
    let second: Vec<usize> = (n..2 * n).collect();
    let mut m = PolyMatrix::zero(&ring, 2 * n, 2 * n);
    m.place(&first, &first, &src.matrix.neg());
    m.place(&second, &second, &src.matrix);
    m.place(
        &first,
        &second,
        &PolyMatrix::identity(&ring, n).scale(multiplier),
    );
    DifferentialModule::new(
        GradedFreeModule::new(&ring, twists),
        m,
        src.degree,
        src.graded,
    )
}

/// The box product `F ⊠ D` with differential `d^F ⊗ 1 + (-1)^i 1 ⊗ d^D` on `F_i ⊗ D`.
///
/// Generators are the triples `(i, b, g)` ordered by level `i`, then basis
/// element `b` of `F_i`, then generator `g` of `D`; the degree of `(i, b, g)` is
/// `deg b - i a + deg g`.
pub fn box_product(
    c: &ChainComplex,
    d: &DifferentialModule,
) -> Result<DifferentialModule, DiffModError> {
    if !same_ring(c.ring(), d.ring()) {
        return Err(DiffModError::Ring(RingError::RingMismatch));
    }
    let ring = d.ring().clone();
    let nd = d.rank();
    let a = d.degree;
    let index = |i: usize, b: usize, g: usize| (c.offset(i) + b) * nd + g;
    let total = c.offset(c.modules.len()) * nd;
    let mut twists = vec![0; total];
    for (i, m) in c.modules.iter().enumerate() {
        for (b, tb) in m.twists().iter().enumerate() {
            for (g, tg) in d.twists().iter().enumerate() {
                twists[index(i, b, g)] = tb - i as i64 * a + tg;
            }
        }
    }
    let mut m = PolyMatrix::zero(&ring, total, total);
    for (i, fm) in c.modules.iter().enumerate() {
        let sign_neg = i % 2 == 1;
        for b in 0..fm.rank() {
            for g in 0..nd {
                let col = index(i, b, g);
                if i >= 1 {
                    let di = c.differential(i);
                    for b2 in 0..di.nrows() {
                        let e = di.get(b2, b);
                        if !e.is_zero() {
                            m.set(index(i - 1, b2, g), col, e.clone());
                        }
                    }
                }
                for g2 in 0..nd {
                    let e = d.matrix.get(g2, g);
                    if !e.is_zero() {
                        m.set(index(i, b, g2), col, if sign_neg { -e } else { e.clone() });
                    }
                }
            }
        }
    }
    DifferentialModule::new(GradedFreeModule::new(&ring, twists), m, a, d.graded)
}

/// Whether `phi: src -> dst` intertwines the differentials.
pub fn verify_morphism(
    phi: &PolyMatrix,
    src: &DifferentialModule,
    dst: &DifferentialModule,
) -> Result<bool, DiffModError> {
    if phi.nrows() != dst.rank() || phi.ncols() != src.rank() {
        return Err(DiffModError::DimensionMismatch(format!(
            "{}x{} map from rank {} to rank {}",
            phi.nrows(),
            phi.ncols(),
            src.rank(),
            dst.rank()
        )));
    }
    if !same_ring(phi.ring(), src.ring()) || !same_ring(phi.ring(), dst.ring()) {
        return Err(DiffModError::Ring(RingError::RingMismatch));
    }
    Ok(dst.matrix.mul(phi) == phi.mul(&src.matrix))
}

/// Whether `phi` is a morphism that is invertible over the ring.
pub fn verify_isomorphism(
    phi: &PolyMatrix,
    src: &DifferentialModule,
    dst: &DifferentialModule,
) -> Result<bool, DiffModError> {
    if !verify_morphism(phi, src, dst)? {
        return Ok(false);
    }
    Ok(phi.is_square() && phi.determinant().is_unit())
}
