//! Koszul complexes, Koszul differential modules and the small-rank construction.

mod gallery;

use std::collections::BTreeMap;
use std::sync::Arc;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::diffmod::{
    mapping_cone, ChainComplex, DiffModError, DifferentialModule, FreeFlag, GradedFreeModule,
    RingJson,
};
use crate::exterior::{contract, parse_dual, DualElement, ExteriorElement, ExteriorError, Subset};
use crate::matrix::PolyMatrix;
use crate::ring::{same_ring, MonomialOrder, PolyRing, Polynomial, RingError};

pub use gallery::{ex4_6_scaled, gallery, GalleryObject, GALLERY_IDS};

#[derive(Debug, Error, PartialEq, Eq)]
pub enum KoszulError {
    #[error("f_{i} f_{j} is nonzero although both weights are even")]
    PreconditionViolated { i: usize, j: usize },
    #[error("relation f_{i} f_{j} = 0 fails: {witness}")]
    RelationViolated { i: usize, j: usize, witness: String },
    #[error("dual stored under weight {expected} has weight {got}")]
    WeightMismatch { expected: usize, got: usize },
    #[error("coefficient {0} of the linear form is not homogeneous")]
    NotHomogeneous(String),
    #[error("unknown gallery id {0:?}")]
    UnknownGallery(String),
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error(transparent)]
    DiffMod(#[from] DiffModError),
    #[error(transparent)]
    Exterior(#[from] ExteriorError),
    #[error(transparent)]
    Ring(#[from] RingError),
}

/// A chain complex known to be the Koszul complex of a linear form.
///
/// Procedures that rely on the anchor resolving a complete intersection take
/// this type, so the structural requirement is enforced by construction.
/// Regularity of the sequence itself is the caller's responsibility.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct KoszulComplex {
    complex: ChainComplex,
    psi: DualElement,
    basis_degrees: Vec<i64>,
}

impl KoszulComplex {
    pub fn complex(&self) -> &ChainComplex {
        &self.complex
    }

    pub fn psi(&self) -> &DualElement {
        &self.psi
    }

    pub fn ring(&self) -> &Arc<PolyRing> {
        self.complex.ring()
    }

    pub fn rank(&self) -> usize {
        self.psi.rank()
    }

    /// The sequence `psi(e_1), ..., psi(e_n)`.
    pub fn sequence(&self) -> Vec<Polynomial> {
        (1..=self.rank())
            .map(|j| self.psi.coefficient(Subset::new(&[j])))
            .collect()
    }

    /// Internal degree of each `e_j`.
    pub fn basis_degrees(&self) -> &[i64] {
        &self.basis_degrees
    }
}

/// Degrees of `e_j` read off from a linear form; zero coefficients count as degree one.
fn linear_form_degrees(psi: &DualElement) -> Result<Vec<i64>, KoszulError> {
    (1..=psi.rank())
        .map(|j| {
            let c = psi.coefficient(Subset::new(&[j]));
            if c.is_zero() {
                Ok(1)
            } else {
                c.homogeneous_degree()
                    .map_err(|_| KoszulError::NotHomogeneous(c.to_string()))
            }
        })
        .collect()
}

fn subset_degree(degrees: &[i64], s: Subset) -> i64 {
    s.elements().iter().map(|j| degrees[j - 1]).sum()
}

/// The Koszul complex of a weight-one dual element, with `⋀^i E` in homological degree `i`.
///
/// `e_I` sits in internal degree `sum_{j in I} deg psi(e_j)`.
pub fn koszul_complex(psi: &DualElement) -> Result<KoszulComplex, KoszulError> {
    if psi.weight() != 1 {
        return Err(KoszulError::WeightMismatch {
            expected: 1,
            got: psi.weight(),
        });
    }
    let n = psi.rank();
    let ring = psi.ring().clone();
    let degrees = linear_form_degrees(psi)?;
    let modules = (0..=n)
        .map(|i| {
            let twists = Subset::of_size(n, i)
                .into_iter()
                .map(|s| subset_degree(&degrees, s))
                .collect();
            GradedFreeModule::new(&ring, twists)
        })
        .collect();
    let diffs = (1..=n).map(|i| psi.contraction_matrix(i)).collect();
    let complex = ChainComplex::new(&ring, modules, diffs)?;
    Ok(KoszulComplex {
        complex,
        psi: psi.clone(),
        basis_degrees: degrees,
    })
}

/// Koszul complex on the given elements.
pub fn koszul_on(ring: &Arc<PolyRing>, seq: &[Polynomial]) -> Result<KoszulComplex, KoszulError> {
    koszul_complex(&DualElement::linear(ring, seq))
}

/// Koszul complex on the named variables, e.g. `["x1", "x2"]`.
pub fn koszul_on_variables<S: AsRef<str>>(
    ring: &Arc<PolyRing>,
    names: &[S],
) -> Result<KoszulComplex, KoszulError> {
    let seq = names
        .iter()
        .map(|v| {
            ring.var_index(v.as_ref())
                .map(|k| ring.var(k))
                .ok_or_else(|| {
                    KoszulError::Ring(RingError::MissingVariable(v.as_ref().to_string()))
                })
        })
        .collect::<Result<Vec<_>, _>>()?;
    koszul_on(ring, &seq)
}

/// Duals `f_1, f_2, ...` on a rank `n` exterior algebra; missing weights are zero.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct KoszulData {
    pub ring: Arc<PolyRing>,
    pub n: usize,
    pub duals: BTreeMap<usize, DualElement>,
    /// Internal degrees of `e_1, ..., e_n`; derived from `f_1` when absent.
    pub basis_degrees: Option<Vec<i64>>,
    pub graded: bool,
}

impl KoszulData {
    pub fn new(ring: &Arc<PolyRing>, n: usize) -> KoszulData {
        KoszulData {
            ring: ring.clone(),
            n,
            duals: BTreeMap::new(),
            basis_degrees: None,
            graded: true,
        }
    }

    pub fn with_dual(mut self, f: DualElement) -> KoszulData {
        self.duals.insert(f.weight(), f);
        self
    }

    pub fn ungraded(mut self) -> KoszulData {
        self.graded = false;
        self
    }

    pub fn dual(&self, weight: usize) -> DualElement {
        self.duals
            .get(&weight)
            .cloned()
            .unwrap_or_else(|| DualElement::zero(&self.ring, self.n, weight))
    }

    fn validate(&self) -> Result<(), KoszulError> {
        for (&w, f) in &self.duals {
            if f.weight() != w {
                return Err(KoszulError::WeightMismatch {
                    expected: w,
                    got: f.weight(),
                });
            }
            if f.rank() != self.n || !same_ring(f.ring(), &self.ring) {
                return Err(KoszulError::Exterior(ExteriorError::Mismatch));
            }
        }
        Ok(())
    }

    fn degrees(&self) -> Result<Vec<i64>, KoszulError> {
        match &self.basis_degrees {
            Some(d) if d.len() == self.n => Ok(d.clone()),
            Some(_) => Err(KoszulError::InvalidArgument(
                "one basis degree per e_j is required".into(),
            )),
            None => linear_form_degrees(&self.dual(1)),
        }
    }
}

/// First pair of even weights whose duals compose to a nonzero operator, with a witness.
fn even_pair_violation(data: &KoszulData) -> Result<Option<(usize, usize, String)>, KoszulError> {
    let even: Vec<&DualElement> = data
        .duals
        .values()
        .filter(|f| f.weight() % 2 == 0 && !f.is_zero())
        .collect();
    for (x, f) in even.iter().enumerate() {
        for g in &even[x..] {
            for (a, b) in [(f, g), (g, f)] {
                let k = a.weight() + b.weight();
                if k > data.n {
                    continue;
                }
                for s in Subset::of_size(data.n, k) {
                    let e = ExteriorElement::basis(&data.ring, data.n, s);
                    let img = contract(a, &contract(b, &e)?)?;
                    if !img.is_zero() {
                        let witness =
                            format!("f_{} f_{} sends e{s} to {}", a.weight(), b.weight(), img);
                        return Ok(Some((f.weight(), g.weight(), witness)));
                    }
                }
            }
        }
    }
    Ok(None)
}

/// The Koszul differential module `K(f_1, ..., f_n)` with `A_{i,j} = (-1)^{ij} f_{i-j}`.
///
/// Generators are the `e_I` ordered by size and then lexicographically, with
/// `e_I` at flag level `|I|`. In graded mode `e_I` has internal degree
/// `sum_{j in I} deg e_j - |I| a`, so `K(f_1)` is the fold of the Koszul complex.
/// Unless the characteristic is 2, even-weight duals must compose to zero.
pub fn koszul_dm(data: &KoszulData, degree_a: i64) -> Result<FreeFlag, KoszulError> {
    data.validate()?;
    if data.ring.characteristic() != 2 {
        if let Some((i, j, _)) = even_pair_violation(data)? {
            return Err(KoszulError::PreconditionViolated { i, j });
        }
    }
    assemble(data, degree_a)
}

/// Builds the Koszul-shaped matrix without the even-weight precondition.
///
/// Some data satisfy `d^2 = 0` through cancellation between mixed terms even
/// though an even dual squares to a nonzero operator; square-zero is still checked.
pub fn assemble(data: &KoszulData, degree_a: i64) -> Result<FreeFlag, KoszulError> {
    assemble_blocks(data, degree_a, |_, _| true)
}

/// Like [`assemble`], but only fills the blocks `A_{i,j}` for which `keep(i, j)` holds.
pub fn assemble_blocks(
    data: &KoszulData,
    degree_a: i64,
    keep: impl Fn(usize, usize) -> bool,
) -> Result<FreeFlag, KoszulError> {
    data.validate()?;
    let n = data.n;
    let basis = Subset::all(n);
    let offsets: Vec<usize> = (0..=n + 1)
        .map(|l| basis.iter().filter(|s| s.len() < l).count())
        .collect();
    let degrees = if data.graded {
        data.degrees()?
    } else {
        vec![0; n]
    };
    let twists: Vec<i64> = basis
        .iter()
        .map(|s| {
            if data.graded {
                subset_degree(&degrees, *s) - s.len() as i64 * degree_a
            } else {
                0
            }
        })
        .collect();
    let levels: Vec<usize> = basis.iter().map(|s| s.len()).collect();
    let mut m = PolyMatrix::zero(&data.ring, basis.len(), basis.len());
    for (&w, f) in &data.duals {
        if f.is_zero() || w == 0 {
            continue;
        }
        for i in w..=n {
            let j = i - w;
            if !keep(i, j) {
                continue;
            }
            let mut block = f.contraction_matrix(i);
            if (i * j) % 2 == 1 {
                block = block.neg();
            }
            let rows: Vec<usize> = (offsets[j]..offsets[j + 1]).collect();
            let cols: Vec<usize> = (offsets[i]..offsets[i + 1]).collect();
            m.place(&rows, &cols, &block);
        }
    }
    let dm = DifferentialModule::new(
        GradedFreeModule::new(&data.ring, twists),
        m,
        degree_a,
        data.graded,
    )?;
    Ok(FreeFlag::new(dm, levels)?)
}

/// Variable name for the generic coordinate `x_I`, e.g. `x134`.
pub fn generic_variable(s: Subset) -> String {
    let digits: Vec<String> = s.elements().iter().map(|e| e.to_string()).collect();
    format!("x{}", digits.join(""))
}

/// The ring `k[x_I : I nonempty]` with `x_I` of weight `|I|`, variables ordered by size then lexicographically.
pub fn generic_ring(n: usize, ch: u64) -> Result<Arc<PolyRing>, KoszulError> {
    if n == 0 || n > 9 {
        return Err(KoszulError::InvalidArgument(
            "generic rings are supported for 1 <= n <= 9".into(),
        ));
    }
    let subsets: Vec<Subset> = Subset::all(n)
        .into_iter()
        .filter(|s| !s.is_empty())
        .collect();
    let names: Vec<String> = subsets.iter().map(|s| generic_variable(*s)).collect();
    let weights: Vec<u32> = subsets.iter().map(|s| s.len() as u32).collect();
    Ok(PolyRing::with_options(
        &names,
        ch,
        weights,
        MonomialOrder::Grevlex,
    )?)
}

/// Substitutes values for the generic coordinates, checks the even-weight relations on the
/// specialized duals, and builds the Koszul differential module.
pub fn specialize_generic_koszul(
    ring: &Arc<PolyRing>,
    n: usize,
    assignment: &BTreeMap<Subset, Polynomial>,
    degree_a: i64,
    graded: bool,
) -> Result<FreeFlag, KoszulError> {
    let mut data = KoszulData::new(ring, n);
    data.graded = graded;
    for w in 1..=n {
        let terms = Subset::of_size(n, w)
            .into_iter()
            .map(|s| {
                assignment.get(&s).cloned().map(|p| (s, p)).ok_or_else(|| {
                    KoszulError::InvalidArgument(format!("no value for {}", generic_variable(s)))
                })
            })
            .collect::<Result<Vec<_>, _>>()?;
        data = data.with_dual(DualElement::from_terms(ring, n, w, terms)?);
    }
    if let Some((i, j, witness)) = even_pair_violation(&data)? {
        return Err(KoszulError::RelationViolated { i, j, witness });
    }
    if graded {
        // every e_j gets weight one, matching the generic grading deg x_I = |I|
        data.basis_degrees = Some(vec![1; n]);
    }
    koszul_dm(&data, degree_a)
}

/// A rank `2^(n-1)` degree-2 differential module over `k[x1, ..., xn]` with homology `k`.
///
/// The base case is `[[x1 x2, -x2^2], [x1^2, -x1 x2]]`; each further variable is
/// added by a mapping cone of multiplication by that variable.
pub fn small_rank_dm(n: usize, ch: u64) -> Result<DifferentialModule, KoszulError> {
    if n < 2 {
        return Err(KoszulError::InvalidArgument(
            "small_rank_dm needs n >= 2".into(),
        ));
    }
    let r2 = PolyRing::standard(2, ch);
    let m = PolyMatrix::parse(&r2, &[vec!["x1*x2", "-x2^2"], vec!["x1^2", "-x1*x2"]])?;
    let mut d = DifferentialModule::new(GradedFreeModule::free(&r2, 2), m, 2, true)?;
    for k in 3..=n {
        let rk = PolyRing::standard(k, ch);
        d = mapping_cone(&d, &rk.var(k - 1))?;
    }
    Ok(d)
}

/// JSON form of [`KoszulData`]: `{"ring": ..., "n": 4, "duals": {"1": "x1*e{1} + ...", ...}, "degree": 0}`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct KoszulDataJson {
    pub ring: RingJson,
    pub n: usize,
    pub duals: BTreeMap<String, String>,
    #[serde(default)]
    pub degree: i64,
    #[serde(default = "yes")]
    pub graded: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub basis_degrees: Option<Vec<i64>>,
}

fn yes() -> bool {
    true
}

impl KoszulDataJson {
    pub fn from_data(data: &KoszulData, degree: i64) -> KoszulDataJson {
        KoszulDataJson {
            ring: RingJson::from_ring(&data.ring),
            n: data.n,
            duals: data
                .duals
                .iter()
                .map(|(w, f)| (w.to_string(), f.to_string()))
                .collect(),
            degree,
            graded: data.graded,
            basis_degrees: data.basis_degrees.clone(),
        }
    }

    /// Parses into data plus the requested degree.
    pub fn to_data(&self, default_char: u64) -> Result<(KoszulData, i64), KoszulError> {
        let ring = self.ring.to_ring(default_char)?;
        let mut data = KoszulData::new(&ring, self.n);
        data.graded = self.graded;
        data.basis_degrees = self.basis_degrees.clone();
        for (w, s) in &self.duals {
            let w: usize = w
                .parse()
                .map_err(|_| KoszulError::InvalidArgument(format!("bad weight {w:?}")))?;
            data = data.with_dual(parse_dual(&ring, self.n, s, Some(w))?);
        }
        Ok((data, self.degree))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::diffmod::{fold, homology_hilbert};

    #[test]
    fn koszul_complex_two_variables() {
        let r = PolyRing::standard(2, 0);
        let k = koszul_on_variables(&r, &["x1", "x2"]).unwrap();
        assert_eq!(
            k.complex().differential(1),
            &PolyMatrix::parse(&r, &[vec!["x1", "x2"]]).unwrap()
        );
        assert_eq!(
            k.complex().differential(2),
            &PolyMatrix::parse(&r, &[vec!["-x2"], vec!["x1"]]).unwrap()
        );
        assert_eq!(k.complex().modules()[2].twists(), &[2]);
    }

    #[test]
    fn zero_form_gives_zero_differentials() {
        let r = PolyRing::standard(2, 0);
        let k = koszul_complex(&DualElement::zero(&r, 3, 1)).unwrap();
        assert!(k.complex().differentials().iter().all(|d| d.is_zero()));
    }

    #[test]
    fn three_variable_middle_map() {
        let r = PolyRing::standard(3, 0);
        let k = koszul_on_variables(&r, &["x1", "x2", "x3"]).unwrap();
        // columns e12, e13, e23; rows e1, e2, e3
        let expect = PolyMatrix::parse(
            &r,
            &[
                vec!["-x2", "-x3", "0"],
                vec!["x1", "0", "-x3"],
                vec!["0", "x1", "x2"],
            ],
        )
        .unwrap();
        assert_eq!(k.complex().differential(2), &expect);
    }

    #[test]
    fn k_of_f1_is_the_fold() {
        let r = PolyRing::standard(3, 0);
        let k = koszul_on_variables(&r, &["x1", "x2", "x3"]).unwrap();
        let data = KoszulData::new(&r, 3).with_dual(k.psi().clone());
        for a in [-1, 0, 2] {
            assert_eq!(koszul_dm(&data, a).unwrap(), fold(k.complex(), a));
        }
    }

    #[test]
    fn generic_pfaffian_obstruction() {
        let r = generic_ring(4, 0).unwrap();
        let mut data = KoszulData::new(&r, 4);
        for w in 1..=4 {
            let terms = Subset::of_size(4, w)
                .into_iter()
                .map(|s| (s, r.var(r.var_index(&generic_variable(s)).unwrap())))
                .collect();
            data = data.with_dual(DualElement::from_terms(&r, 4, w, terms).unwrap());
        }
        assert_eq!(
            koszul_dm(&data, 0),
            Err(KoszulError::PreconditionViolated { i: 2, j: 2 })
        );
    }

    #[test]
    fn pfaffian_one_specialization_is_rejected() {
        let r = PolyRing::standard(4, 0);
        let mut asg = BTreeMap::new();
        for s in Subset::all(4).into_iter().filter(|s| !s.is_empty()) {
            let v = match s.len() {
                2 if s == Subset::new(&[1, 2]) || s == Subset::new(&[3, 4]) => r.one(),
                2 => r.zero(),
                1 => r.var(s.elements()[0] - 1),
                _ => r.zero(),
            };
            asg.insert(s, v);
        }
        assert!(matches!(
            specialize_generic_koszul(&r, 4, &asg, 0, false),
            Err(KoszulError::RelationViolated { i: 2, j: 2, .. })
        ));
    }

    #[test]
    fn small_rank_base_and_growth() {
        let d2 = small_rank_dm(2, 0).unwrap();
        let r = d2.ring().clone();
        assert_eq!(
            d2.matrix(),
            &PolyMatrix::parse(&r, &[vec!["x1*x2", "-x2^2"], vec!["x1^2", "-x1*x2"]]).unwrap()
        );
        assert_eq!(
            homology_hilbert(&d2, 6).unwrap().dims,
            vec![0, 1, 0, 0, 0, 0, 0]
        );
        let d4 = small_rank_dm(4, 0).unwrap();
        assert_eq!(d4.rank(), 8);
        assert!(d4.is_minimal());
    }

    #[test]
    fn data_json_roundtrip() {
        let r = PolyRing::standard(3, 2);
        let data = KoszulData::new(&r, 3)
            .with_dual(parse_dual(&r, 3, "x1*e{1} + x2*e{2} + x3*e{3}", None).unwrap())
            .with_dual(parse_dual(&r, 3, "x1*x2*e{1,2} + e{2,3}", None).unwrap())
            .ungraded();
        let j = KoszulDataJson::from_data(&data, 0);
        let s = serde_json::to_string(&j).unwrap();
        let back: KoszulDataJson = serde_json::from_str(&s).unwrap();
        assert_eq!(back.to_data(0).unwrap().0, data);
    }
}
