//! Anchored free flags: anchoring checks, the fold criterion, diagonal cancellation
//! and the degree argument.
//!
//! A flag is anchored over a complex `F` when each first off-diagonal block
//! `A_{i,i-1}` equals `d_i`. For Koszul anchors the flag is isomorphic to the
//! fold of `F` exactly when every entry of every `A_{i,0}` lies in the ideal of
//! entries of `d_1`; [`fold_decision_ci`] decides this and, when it holds,
//! produces the change of basis by running [`cancel_diagonals`].

use std::collections::{BTreeMap, HashMap};
use std::sync::Arc;

use rayon::prelude::*;
use thiserror::Error;

use crate::diffmod::{
    fold, verify_isomorphism, ChainComplex, DiffModError, DifferentialModule, FreeFlag,
    GradedFreeModule,
};
use crate::groebner::{ideal_membership, Membership};
use crate::koszul::KoszulComplex;
use crate::linalg::{self, Echelon, Insert};
use crate::matrix::PolyMatrix;
use crate::ring::{same_ring, Monomial, PolyRing, Polynomial, RingError, Scalar};

#[derive(Debug, Error, PartialEq, Eq)]
pub enum FlagError {
    #[error("flag has {flag:?} generators per level but the anchor has {anchor:?}")]
    ShapeMismatch {
        flag: Vec<usize>,
        anchor: Vec<usize>,
    },
    #[error("flag is not anchored: block A_{{{level},{}}} differs from d_{level}", level - 1)]
    NotAnchored { level: usize },
    #[error(
        "entry {entry} of A_{{{level},0}} is not in the ideal of d_1 (normal form {normal_form})"
    )]
    MembershipFailure {
        level: usize,
        entry: String,
        normal_form: String,
    },
    #[error("block A_{{{i},{j}}} does not lift through d_{}", j + 1)]
    ExactnessFailure { i: usize, j: usize },
    #[error("flag has degree {flag} but degree {requested} was requested")]
    DegreeMismatch { flag: i64, requested: i64 },
    #[error("entry {entry} of A_{{{level},0}} sits in internal degree 0")]
    DegreeZeroEntry { level: usize, entry: String },
    #[error("flag must be graded")]
    Ungraded,
    #[error("anchor ring differs from the flag ring")]
    RingMismatch,
    #[error(transparent)]
    DiffMod(#[from] DiffModError),
    #[error(transparent)]
    Ring(#[from] RingError),
}

/// Verdict of the fold criterion.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum FoldDecision {
    /// `change_of_basis` maps the flag isomorphically onto the fold of the anchor.
    IsoToFold { change_of_basis: PolyMatrix },
    /// The first entry of some `A_{i,0}` outside the ideal of `d_1`, with its nonzero normal form.
    NotIso {
        level: usize,
        entry: Polynomial,
        normal_form: Polynomial,
    },
}

impl FoldDecision {
    pub fn is_iso(&self) -> bool {
        matches!(self, FoldDecision::IsoToFold { .. })
    }
}

/// Result of [`cancel_diagonals`].
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Cancellation {
    /// The flag with `A_{i,j} = 0` whenever `i - j >= 2`.
    pub result: FreeFlag,
    /// An isomorphism from the input flag to `result`, unitriangular with respect to the levels.
    pub change_of_basis: PolyMatrix,
}

/// Outcome of the degree argument.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum DegreeVerdict {
    /// Every `A_{i,0}` entry has nonzero degree, membership was verified and the isomorphism built.
    ForcedFold { change_of_basis: PolyMatrix },
    /// For `a = 2` the degree count leaves room for unit entries in `A_{2,0}`.
    Indeterminate,
}

fn check_shape(flag: &FreeFlag, anchor: &ChainComplex) -> Result<(), FlagError> {
    if !same_ring(flag.dm().ring(), anchor.ring()) {
        return Err(FlagError::RingMismatch);
    }
    let flag_ranks = flag.level_ranks();
    let anchor_ranks = anchor.ranks();
    if flag_ranks != anchor_ranks {
        return Err(FlagError::ShapeMismatch {
            flag: flag_ranks,
            anchor: anchor_ranks,
        });
    }
    Ok(())
}

/// True iff every first off-diagonal block `A_{i,i-1}` equals the anchor differential `d_i`.
pub fn anchored_check(flag: &FreeFlag, anchor: &ChainComplex) -> Result<bool, FlagError> {
    check_shape(flag, anchor)?;
    Ok((1..flag.nlevels()).all(|i| &flag.block(i, i - 1) == anchor.differential(i)))
}

fn first_unanchored(flag: &FreeFlag, anchor: &ChainComplex) -> Result<(), FlagError> {
    check_shape(flag, anchor)?;
    match (1..flag.nlevels()).find(|&i| &flag.block(i, i - 1) != anchor.differential(i)) {
        Some(level) => Err(FlagError::NotAnchored { level }),
        None => Ok(()),
    }
}

/// The fold of the anchor carried on the flag's own generator twists and grading.
fn fold_target(flag: &FreeFlag, anchor: &ChainComplex) -> Result<DifferentialModule, FlagError> {
    let f = fold(anchor, flag.dm().degree());
    let module = GradedFreeModule::new(flag.dm().ring(), flag.dm().twists().to_vec());
    Ok(DifferentialModule::new(
        module,
        f.dm().matrix().clone(),
        flag.dm().degree(),
        flag.dm().is_graded(),
    )?)
}

/// Checks every entry of `A_{i,0}` (`i >= 2`) for membership in the ideal of `d_1`.
///
/// Entries are tested in parallel; the reported failure is the first in
/// level order and then column order, independent of scheduling.
fn first_nonmember(
    flag: &FreeFlag,
    anchor: &ChainComplex,
) -> Result<Option<(usize, Polynomial, Polynomial)>, FlagError> {
    let gens = anchor.differential(1).row(0).to_vec();
    let mut entries = Vec::new();
    for i in 2..flag.nlevels() {
        let b = flag.block(i, 0);
        for r in 0..b.nrows() {
            for c in 0..b.ncols() {
                entries.push((i, b.get(r, c).clone()));
            }
        }
    }
    // (level, entry, normal form) for every entry outside the ideal
    type Failure = (usize, Polynomial, Polynomial);
    let verdicts: Vec<Result<Option<Failure>, RingError>> = entries
        .into_par_iter()
        .map(|(i, e)| {
            Ok(match ideal_membership(&e, &gens)? {
                Membership::Member(_) => None,
                Membership::NotMember(nf) => Some((i, e, nf)),
            })
        })
        .collect();
    for v in verdicts {
        if let Some(hit) = v? {
            return Ok(Some(hit));
        }
    }
    Ok(None)
}

/// Decides whether an anchored flag over a Koszul complex is isomorphic to its fold.
///
/// A `NotIso` verdict certifies that the criterion fails; it implies
/// non-isomorphism because the anchor resolves a complete intersection. Without
/// that hypothesis the criterion alone is not decisive, which is why the anchor
/// must be a [`KoszulComplex`].
pub fn fold_decision_ci(
    flag: &FreeFlag,
    anchor: &KoszulComplex,
) -> Result<FoldDecision, FlagError> {
    let complex = anchor.complex();
    first_unanchored(flag, complex)?;
    if complex.length() >= 1 && complex.modules()[0].rank() == 1 {
        if let Some((level, entry, normal_form)) = first_nonmember(flag, complex)? {
            return Ok(FoldDecision::NotIso {
                level,
                entry,
                normal_form,
            });
        }
    }
    let cancel = cancel_diagonals(flag, complex)?;
    let target = fold_target(flag, complex)?;
    assert_eq!(
        cancel.result.dm().matrix(),
        target.matrix(),
        "cancellation must land on the fold"
    );
    assert!(
        verify_isomorphism(&cancel.change_of_basis, flag.dm(), &target)?,
        "change of basis must be an isomorphism"
    );
    Ok(FoldDecision::IsoToFold {
        change_of_basis: cancel.change_of_basis,
    })
}

/// Solves `a h = v` for `h`, where `a` is homogeneous of degree zero from `col_twists` to `row_twists`.
///
/// The system splits by internal degree; each piece is a finite linear system
/// over the coefficient field. Returns `None` if some piece is inconsistent.
pub fn lift_through(
    a: &PolyMatrix,
    row_twists: &[i64],
    col_twists: &[i64],
    v: &[Polynomial],
) -> Option<Vec<Polynomial>> {
    let ring = a.ring().clone();
    let mut pieces: BTreeMap<i64, Vec<(usize, Scalar, Monomial)>> = BTreeMap::new();
    for (r, p) in v.iter().enumerate() {
        for (c, m) in p.terms() {
            let t = m.weighted_degree(ring.weights()) + row_twists[r];
            pieces.entry(t).or_default().push((r, c.clone(), m.clone()));
        }
    }
    let mut h = vec![ring.zero(); a.ncols()];
    for (t, rhs_terms) in pieces {
        let piece = lift_piece(&ring, a, col_twists, t, &rhs_terms)?;
        for (k, q) in piece.into_iter().enumerate() {
            h[k] = &h[k] + &q;
        }
    }
    Some(h)
}

fn lift_piece(
    ring: &Arc<PolyRing>,
    a: &PolyMatrix,
    col_twists: &[i64],
    t: i64,
    rhs_terms: &[(usize, Scalar, Monomial)],
) -> Option<Vec<Polynomial>> {
    let unknowns: Vec<(usize, Monomial)> = (0..a.ncols())
        .flat_map(|k| {
            ring.monomials_of_degree(t - col_twists[k])
                .into_iter()
                .map(move |m| (k, m))
        })
        .collect();
    // equations are indexed by (row, monomial) of the target
    let mut eq_index: HashMap<(usize, Monomial), usize> = HashMap::new();
    let mut equations: Vec<BTreeMap<usize, Scalar>> = Vec::new();
    let mut slot = |key: (usize, Monomial), eqs: &mut Vec<BTreeMap<usize, Scalar>>| -> usize {
        *eq_index.entry(key).or_insert_with(|| {
            eqs.push(BTreeMap::new());
            eqs.len() - 1
        })
    };
    for (u, (k, mono)) in unknowns.iter().enumerate() {
        for r in 0..a.nrows() {
            for (c, m) in a.get(r, *k).terms() {
                let e = slot((r, m.mul(mono)), &mut equations);
                let cell = equations[e].entry(u).or_insert_with(|| ring.field().zero());
                *cell = &*cell + c;
            }
        }
    }
    let mut rhs = vec![ring.field().zero(); equations.len()];
    for (r, c, m) in rhs_terms {
        let e = slot((*r, m.clone()), &mut equations);
        if e >= rhs.len() {
            rhs.resize(e + 1, ring.field().zero());
        }
        rhs[e] = &rhs[e] + c;
    }
    let mut ech = Echelon::new(ring.field(), unknowns.len());
    for (row, b) in equations.into_iter().zip(rhs) {
        if ech.insert(linalg::from_map(row), b) == Insert::Inconsistent {
            return None;
        }
    }
    let x = ech.solve()?;
    let mut h = vec![ring.zero(); a.ncols()];
    for ((k, mono), c) in unknowns.into_iter().zip(x) {
        if !c.is_zero() {
            h[k] = &h[k] + &Polynomial::monomial(ring, c, mono);
        }
    }
    Some(h)
}

/// Lift of every column of `b` through the anchor row `d_1`, using Gröbner cofactors.
fn lift_row_zero(level: usize, b: &PolyMatrix, d1: &PolyMatrix) -> Result<PolyMatrix, FlagError> {
    let gens = d1.row(0).to_vec();
    let mut h = PolyMatrix::zero(b.ring(), d1.ncols(), b.ncols());
    for c in 0..b.ncols() {
        match ideal_membership(b.get(0, c), &gens)? {
            Membership::Member(w) => {
                for (k, q) in w.cofactors.into_iter().enumerate() {
                    h.set(k, c, q);
                }
            }
            Membership::NotMember(nf) => {
                return Err(FlagError::MembershipFailure {
                    level,
                    entry: b.get(0, c).to_string(),
                    normal_form: nf.to_string(),
                })
            }
        }
    }
    Ok(h)
}

/// Conjugates an anchored flag until every block above the first off-diagonal vanishes.
///
/// Diagonals are cleared in increasing gap `i - j`, and within a gap in
/// increasing `i`. Clearing `A_{i,j}` uses a lift `H` with `d_{j+1} H = A_{i,j}`
/// and replaces the level-`i` generators `e` by `e - H e`. Lifts into level 0
/// come from Gröbner cofactors; higher lifts are exact linear solves, degree by
/// degree, through the anchor differential.
pub fn cancel_diagonals(flag: &FreeFlag, anchor: &ChainComplex) -> Result<Cancellation, FlagError> {
    first_unanchored(flag, anchor)?;
    let ring = flag.dm().ring().clone();
    let n = flag.dm().rank();
    let levels = flag.nlevels();
    let idx: Vec<Vec<usize>> = (0..levels).map(|l| flag.level_indices(l)).collect();
    let mut m = flag.dm().matrix().clone();
    let mut phi = PolyMatrix::identity(&ring, n);
    for gap in 2..levels {
        for i in gap..levels {
            let j = i - gap;
            let b = m.select(&idx[j], &idx[i]);
            if b.is_zero() {
                continue;
            }
            let h = if j == 0 && idx[0].len() == 1 {
                lift_row_zero(i, &b, anchor.differential(1))?
            } else {
                let d = anchor.differential(j + 1);
                let rt = anchor.modules()[j].twists();
                let ct = anchor.modules()[j + 1].twists();
                let mut h = PolyMatrix::zero(&ring, d.ncols(), b.ncols());
                for c in 0..b.ncols() {
                    let col = lift_through(d, rt, ct, &b.column(c)).ok_or(if j == 0 {
                        FlagError::MembershipFailure {
                            level: i,
                            entry: b
                                .column(c)
                                .iter()
                                .map(|p| p.to_string())
                                .collect::<Vec<_>>()
                                .join(", "),
                            normal_form: "no lift".into(),
                        }
                    } else {
                        FlagError::ExactnessFailure { i, j }
                    })?;
                    for (k, q) in col.into_iter().enumerate() {
                        h.set(k, c, q);
                    }
                }
                h
            };
            // P = I - X with X the lift placed at (level j+1, level i); X^2 = 0 so P^{-1} = I + X
            let mut x = PolyMatrix::zero(&ring, n, n);
            x.place(&idx[j + 1], &idx[i], &h);
            let p = PolyMatrix::identity(&ring, n).sub(&x);
            let p_inv = PolyMatrix::identity(&ring, n).add(&x);
            m = p_inv.mul(&m).mul(&p);
            phi = p_inv.mul(&phi);
            debug_assert!(m.select(&idx[j], &idx[i]).is_zero());
        }
    }
    let dm = DifferentialModule::new(
        flag.dm().module().clone(),
        m,
        flag.dm().degree(),
        flag.dm().is_graded(),
    )?;
    let result = flag.with_matrix(dm.matrix().clone())?;
    assert!(
        verify_isomorphism(&phi, flag.dm(), result.dm())?,
        "cancellation must be an isomorphism"
    );
    for gap in 2..levels {
        for i in gap..levels {
            assert!(
                result.block(i, i - gap).is_zero(),
                "block A_{{{i},{}}} survived cancellation",
                i - gap
            );
        }
    }
    Ok(Cancellation {
        result,
        change_of_basis: phi,
    })
}

/// True iff `phi` has ones on the diagonal and is otherwise supported on entries
/// from a higher flag level to a lower one.
pub fn is_level_unitriangular(phi: &PolyMatrix, levels: &[usize]) -> bool {
    let one = phi.ring().one();
    phi.entries().all(|(r, c, p)| {
        if r == c {
            *p == one
        } else {
            p.is_zero() || levels[r] < levels[c]
        }
    })
}

/// The degree argument for flags with homology `k` anchored over a Koszul complex.
///
/// When `a != 2` every `A_{i,0}` entry has nonzero internal degree, so it lies in
/// the maximal ideal; membership is then verified and the isomorphism to the fold
/// constructed. For `a = 2` the count permits unit entries in `A_{2,0}`.
pub fn degree_analysis(
    flag: &FreeFlag,
    anchor: &KoszulComplex,
    degree_a: i64,
) -> Result<DegreeVerdict, FlagError> {
    let dm = flag.dm();
    if !dm.is_graded() {
        return Err(FlagError::Ungraded);
    }
    if dm.degree() != degree_a {
        return Err(FlagError::DegreeMismatch {
            flag: dm.degree(),
            requested: degree_a,
        });
    }
    first_unanchored(flag, anchor.complex())?;
    if degree_a == 2 {
        return Ok(DegreeVerdict::Indeterminate);
    }
    let t = dm.twists();
    let top = flag.level_indices(0);
    for i in 2..flag.nlevels() {
        for &c in &flag.level_indices(i) {
            for &r in &top {
                let entry = dm.matrix().get(r, c);
                if !entry.is_zero() && t[c] + degree_a - t[r] == 0 {
                    return Err(FlagError::DegreeZeroEntry {
                        level: i,
                        entry: entry.to_string(),
                    });
                }
            }
        }
    }
    match fold_decision_ci(flag, anchor)? {
        FoldDecision::IsoToFold { change_of_basis } => {
            Ok(DegreeVerdict::ForcedFold { change_of_basis })
        }
        FoldDecision::NotIso {
            level,
            entry,
            normal_form,
        } => Err(FlagError::MembershipFailure {
            level,
            entry: entry.to_string(),
            normal_form: normal_form.to_string(),
        }),
    }
}
