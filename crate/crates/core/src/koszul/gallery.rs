//! Named example objects.

use std::collections::BTreeMap;
use std::sync::Arc;

use super::{
    assemble_blocks, generic_ring, generic_variable, small_rank_dm, specialize_generic_koszul,
    KoszulData, KoszulError,
};
use crate::diffmod::{DifferentialModule, FreeFlag, GradedFreeModule};
use crate::exterior::{parse_dual, Subset};
use crate::matrix::PolyMatrix;
use crate::ring::{PolyRing, Polynomial};

pub const GALLERY_IDS: &[&str] = &[
    "ex1.2",
    "ex3.3",
    "ex4.1",
    "ex4.6",
    "ex4.6-scaled",
    "ex5.4",
    "cor3.x-corner1",
    "smallrank-n<k>",
];

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum GalleryObject {
    Module(DifferentialModule),
    Flag(FreeFlag),
}

impl GalleryObject {
    pub fn dm(&self) -> &DifferentialModule {
        match self {
            GalleryObject::Module(d) => d,
            GalleryObject::Flag(f) => f.dm(),
        }
    }

    pub fn flag(&self) -> Option<&FreeFlag> {
        match self {
            GalleryObject::Module(_) => None,
            GalleryObject::Flag(f) => Some(f),
        }
    }
}

/// Looks up a gallery object. `f` is only used by `ex1.2`, whose corner entry it sets.
pub fn gallery(id: &str, f: Option<&str>, ch: u64) -> Result<GalleryObject, KoszulError> {
    if let Some(k) = id.strip_prefix("smallrank-n") {
        let n: usize = k
            .parse()
            .map_err(|_| KoszulError::UnknownGallery(id.to_string()))?;
        return Ok(GalleryObject::Module(small_rank_dm(n, ch)?));
    }
    let flag = match id {
        "ex1.2" => corner_flag(ch, f.unwrap_or("0"))?,
        "ex5.4" => corner_flag(ch, "x1^2 + x2^2")?,
        "ex3.3" => {
            let r = PolyRing::standard(2, ch);
            let m = PolyMatrix::parse(
                &r,
                &[
                    vec!["0", "x1^2", "x1*x2", "x1"],
                    vec!["0", "0", "0", "-x2"],
                    vec!["0", "0", "0", "x1"],
                    vec!["0", "0", "0", "0"],
                ],
            )?;
            square_flag(&r, vec![0, 0, 0, -1], m, 2, true)?
        }
        "cor3.x-corner1" => {
            let r = PolyRing::standard(2, ch);
            let m = PolyMatrix::parse(
                &r,
                &[
                    vec!["0", "x1", "x2", "1"],
                    vec!["0", "0", "0", "-x2"],
                    vec!["0", "0", "0", "x1"],
                    vec!["0", "0", "0", "0"],
                ],
            )?;
            square_flag(&r, vec![0, -1, -1, -2], m, 2, true)?
        }
        "ex4.1" => ex4_1(ch)?,
        "ex4.6" => ex4_6(ch, false)?,
        "ex4.6-scaled" => ex4_6(ch, true)?,
        _ => return Err(KoszulError::UnknownGallery(id.to_string())),
    };
    Ok(GalleryObject::Flag(flag))
}

/// Scaled variant of the four-variable example in which every `A_{i,0}` lies in the ideal of cubes.
pub fn ex4_6_scaled(ch: u64) -> Result<FreeFlag, KoszulError> {
    ex4_6(ch, true)
}

fn square_flag(
    r: &Arc<PolyRing>,
    twists: Vec<i64>,
    m: PolyMatrix,
    a: i64,
    graded: bool,
) -> Result<FreeFlag, KoszulError> {
    let dm = DifferentialModule::new(GradedFreeModule::new(r, twists), m, a, graded)?;
    Ok(FreeFlag::new(dm, vec![0, 1, 1, 2])?)
}

/// The rank-four flag over `k[x1, x2]` whose top-left corner is `f`; graded exactly when `f` is a quadric or zero.
fn corner_flag(ch: u64, f: &str) -> Result<FreeFlag, KoszulError> {
    let r = PolyRing::standard(2, ch);
    let fp = r.parse(f)?;
    let graded = fp.is_zero() || fp.homogeneous_degree().map(|d| d == 2).unwrap_or(false);
    let m = PolyMatrix::from_rows(
        &r,
        vec![
            vec![r.zero(), r.var(0), r.var(1), fp],
            vec![r.zero(), r.zero(), r.zero(), -&r.var(1)],
            vec![r.zero(), r.zero(), r.zero(), r.var(0)],
            vec![r.zero(); 4],
        ],
    )?;
    square_flag(&r, vec![0, 1, 1, 2], m, 0, graded)
}

fn ex4_1(ch: u64) -> Result<FreeFlag, KoszulError> {
    let r = generic_ring(4, ch)?;
    let one = Subset::new(&[1]);
    let asg: BTreeMap<Subset, Polynomial> = Subset::all(4)
        .into_iter()
        .filter(|s| !s.is_empty())
        .map(|s| {
            let v = if s.len() == 2 && one.is_subset_of(s) {
                r.zero()
            } else {
                r.var(r.var_index(&generic_variable(s)).expect("generic variable"))
            };
            (s, v)
        })
        .collect();
    specialize_generic_koszul(&r, 4, &asg, 0, true)
}

fn ex4_6(ch: u64, scaled: bool) -> Result<FreeFlag, KoszulError> {
    let r = PolyRing::standard(4, ch);
    let (f2, f3, a) = if scaled {
        (
            "x1*x2*x3^3*e{1,2} + x2^2*x3^3*e{3,4}",
            "2*x1*x3^6*e{1,3,4}",
            1,
        )
    } else {
        ("x1*x2*e{1,2} + x2^2*e{3,4}", "2*x1*e{1,3,4}", 4)
    };
    let mut data = KoszulData::new(&r, 4)
        .with_dual(parse_dual(
            &r,
            4,
            "x1^3*e{1} + x2^3*e{2} + x3^3*e{3} + x4^3*e{4}",
            None,
        )?)
        .with_dual(parse_dual(&r, 4, f2, None)?)
        .with_dual(parse_dual(&r, 4, f3, None)?);
    data.basis_degrees = Some(vec![3; 4]);
    // f_3 acts only from the top of level 3; the block A_{4,1} stays zero
    assemble_blocks(&data, a, |i, j| (i, j) != (4, 1))
}
