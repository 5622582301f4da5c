//! JSON interchange for rings, differential modules, flags and complexes.
//!
//! ```json
//! {"ring": {"vars": ["x1", "x2"], "char": 0},
//!  "generators": [{"twist": 0, "flag_level": 0}, ...],
//!  "degree": 0, "graded": true,
//!  "matrix": [["0", "x1", ...], ...]}
//! ```

use std::sync::Arc;

use serde::{Deserialize, Serialize};

use super::{ChainComplex, DiffModError, DifferentialModule, FreeFlag, GradedFreeModule};
use crate::matrix::PolyMatrix;
use crate::ring::{MonomialOrder, PolyRing};

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RingJson {
    pub vars: Vec<String>,
    /// Characteristic; when absent the caller's default is used.
    #[serde(rename = "char", default, skip_serializing_if = "Option::is_none")]
    pub characteristic: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub weights: Option<Vec<u32>>,
}

impl RingJson {
    pub fn from_ring(r: &PolyRing) -> RingJson {
        let weights = if r.weights().iter().all(|&w| w == 1) {
            None
        } else {
            Some(r.weights().to_vec())
        };
        RingJson {
            vars: r.variables().to_vec(),
            characteristic: Some(r.characteristic()),
            weights,
        }
    }

    pub fn to_ring(&self, default_char: u64) -> Result<Arc<PolyRing>, DiffModError> {
        let weights = self
            .weights
            .clone()
            .unwrap_or_else(|| vec![1; self.vars.len()]);
        Ok(PolyRing::with_options(
            &self.vars,
            self.characteristic.unwrap_or(default_char),
            weights,
            MonomialOrder::Grevlex,
        )?)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct GeneratorJson {
    pub twist: i64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub flag_level: Option<usize>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ModuleJson {
    pub ring: RingJson,
    pub generators: Vec<GeneratorJson>,
    pub degree: i64,
    #[serde(default = "default_graded")]
    pub graded: bool,
    pub matrix: Vec<Vec<String>>,
}

fn default_graded() -> bool {
    true
}

/// A parsed module, with flag levels when every generator carries one.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ParsedModule {
    pub dm: DifferentialModule,
    pub levels: Option<Vec<usize>>,
}

impl ParsedModule {
    pub fn into_flag(self) -> Result<FreeFlag, DiffModError> {
        let levels = self
            .levels
            .ok_or_else(|| DiffModError::Json("generators carry no flag levels".into()))?;
        FreeFlag::new(self.dm, levels)
    }
}

fn matrix_strings(m: &PolyMatrix) -> Vec<Vec<String>> {
    (0..m.nrows())
        .map(|r| m.row(r).iter().map(|p| p.to_string()).collect())
        .collect()
}

fn parse_matrix(
    ring: &Arc<PolyRing>,
    rows: &[Vec<String>],
    nrows: usize,
    ncols: usize,
) -> Result<PolyMatrix, DiffModError> {
    if rows.len() != nrows || rows.iter().any(|r| r.len() != ncols) {
        return Err(DiffModError::Json(format!(
            "expected a {nrows}x{ncols} matrix"
        )));
    }
    if nrows == 0 || ncols == 0 {
        return Ok(PolyMatrix::zero(ring, nrows, ncols));
    }
    Ok(PolyMatrix::parse(ring, rows)?)
}

impl ModuleJson {
    pub fn from_dm(dm: &DifferentialModule) -> ModuleJson {
        ModuleJson::build(dm, None)
    }

    pub fn from_flag(flag: &FreeFlag) -> ModuleJson {
        ModuleJson::build(flag.dm(), Some(flag.levels()))
    }

    fn build(dm: &DifferentialModule, levels: Option<&[usize]>) -> ModuleJson {
        ModuleJson {
            ring: RingJson::from_ring(dm.ring()),
            generators: dm
                .twists()
                .iter()
                .enumerate()
                .map(|(k, t)| GeneratorJson {
                    twist: *t,
                    flag_level: levels.map(|l| l[k]),
                })
                .collect(),
            degree: dm.degree(),
            graded: dm.is_graded(),
            matrix: matrix_strings(dm.matrix()),
        }
    }

    /// Validates and converts; `default_char` applies when the ring omits `char`.
    pub fn to_module(&self, default_char: u64) -> Result<ParsedModule, DiffModError> {
        let ring = self.ring.to_ring(default_char)?;
        let n = self.generators.len();
        let matrix = parse_matrix(&ring, &self.matrix, n, n)?;
        let twists = self.generators.iter().map(|g| g.twist).collect();
        let dm = DifferentialModule::new(
            GradedFreeModule::new(&ring, twists),
            matrix,
            self.degree,
            self.graded,
        )?;
        let levels: Option<Vec<usize>> = self.generators.iter().map(|g| g.flag_level).collect();
        let levels = if n == 0 { None } else { levels };
        Ok(ParsedModule { dm, levels })
    }

    pub fn from_json_str(s: &str) -> Result<ModuleJson, DiffModError> {
        serde_json::from_str(s).map_err(|e| DiffModError::Json(e.to_string()))
    }

    pub fn to_json_string(&self) -> String {
        serde_json::to_string_pretty(self).expect("module JSON serializes")
    }
}

/// A chain complex: generator degrees of each module and the differentials `d_1, d_2, ...`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ComplexJson {
    pub ring: RingJson,
    pub modules: Vec<Vec<i64>>,
    pub differentials: Vec<Vec<Vec<String>>>,
}

impl ComplexJson {
    pub fn from_complex(c: &ChainComplex) -> ComplexJson {
        ComplexJson {
            ring: RingJson::from_ring(c.ring()),
            modules: c.modules().iter().map(|m| m.twists().to_vec()).collect(),
            differentials: c.differentials().iter().map(matrix_strings).collect(),
        }
    }

    pub fn to_complex(&self, default_char: u64) -> Result<ChainComplex, DiffModError> {
        let ring = self.ring.to_ring(default_char)?;
        let modules: Vec<GradedFreeModule> = self
            .modules
            .iter()
            .map(|t| GradedFreeModule::new(&ring, t.clone()))
            .collect();
        if self.differentials.len() + 1 != modules.len() {
            return Err(DiffModError::Json(
                "need one differential fewer than modules".into(),
            ));
        }
        let diffs = self
            .differentials
            .iter()
            .enumerate()
            .map(|(i, rows)| parse_matrix(&ring, rows, modules[i].rank(), modules[i + 1].rank()))
            .collect::<Result<Vec<_>, _>>()?;
        ChainComplex::new(&ring, modules, diffs)
    }

    pub fn from_json_str(s: &str) -> Result<ComplexJson, DiffModError> {
        serde_json::from_str(s).map_err(|e| DiffModError::Json(e.to_string()))
    }

    pub fn to_json_string(&self) -> String {
        serde_json::to_string_pretty(self).expect("complex JSON serializes")
    }
}
