//! `dmflag`: build, check and analyse differential modules from the command line.
//!
//! Exit status is 0 on success or a positive verdict, 1 on a failed check or a
//! negative verdict, and 2 on unreadable input.

use std::fs;
use std::io::{self, Read};
use std::process::ExitCode;
use std::sync::Arc;

use anyhow::{anyhow, bail, Context, Result};
use clap::{Parser, Subcommand};
use serde_json::{json, Value};

use dmflag::dgmod::{
    box_max_degree, check_dg_algebra, module_defect, solve_dg_module, AlgebraProduct,
    DgSolveResult, ProductTableJson, SolveOptions,
};
use dmflag::diffmod::{
    box_product, default_max_deg, fold, homology_hilbert, mapping_cone, ComplexJson, DiffModError,
    DifferentialModule, FreeFlag, ModuleJson, ParsedModule,
};
use dmflag::exterior::parse_dual;
use dmflag::flags::{
    cancel_diagonals, degree_analysis, fold_decision_ci, DegreeVerdict, FoldDecision,
};
use dmflag::koszul::{
    gallery, koszul_complex, koszul_dm, koszul_on, GalleryObject, KoszulComplex, KoszulDataJson,
};
use dmflag::matrix::PolyMatrix;
use dmflag::ring::PolyRing;

#[derive(Parser)]
#[command(
    name = "dmflag",
    version,
    about = "Differential modules, free flags and Koszul constructions"
)]
struct Cli {
    /// Default characteristic for inputs that do not state one (0 or a prime).
    #[arg(long = "char", env = "DMFLAG_CHAR", default_value_t = 0, global = true)]
    characteristic: u64,
    /// Worker threads for homology and solver work.
    #[arg(long, global = true)]
    jobs: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Validate a differential module or flag (square-zero, grading, flag shape).
    Check { input: Option<String> },
    /// Fold a chain complex into a flag of the given degree.
    Fold {
        input: Option<String>,
        #[arg(long, default_value_t = 0, allow_negative_numbers = true)]
        a: i64,
    },
    /// Homology dimensions in degrees 0..=max-deg.
    Homology {
        input: Option<String>,
        #[arg(long)]
        max_deg: Option<i64>,
    },
    /// Mapping cone of multiplication by a variable (added to the ring if new) or polynomial.
    Cone {
        input: Option<String>,
        #[arg(long)]
        var: String,
    },
    /// Box product of a complex with a differential module.
    Box {
        complex: String,
        module: Option<String>,
    },
    /// Koszul complex of a linear form such as "x1*e{1} + x2*e{2}".
    Koszul {
        #[arg(long)]
        psi: String,
        /// Comma-separated ring variables; defaults to x1..xn.
        #[arg(long)]
        vars: Option<String>,
        #[arg(long)]
        n: Option<usize>,
    },
    /// Koszul differential module from a JSON description of the duals.
    KoszulDm {
        #[arg(long)]
        duals: String,
        #[arg(long, allow_negative_numbers = true)]
        a: Option<i64>,
    },
    /// The small-rank degree-2 module over k[x1..xn].
    Smallrank {
        #[arg(long)]
        n: usize,
    },
    /// Print a named example.
    Gallery {
        id: String,
        #[arg(long)]
        f: Option<String>,
    },
    /// Decide whether an anchored flag is isomorphic to the fold of its Koszul anchor.
    FoldDecision {
        input: Option<String>,
        #[arg(long)]
        anchor: Option<String>,
    },
    /// Cancel all blocks above the first off-diagonal.
    Cancel {
        input: Option<String>,
        #[arg(long)]
        anchor: Option<String>,
    },
    /// Apply the degree argument to a flag of degree a.
    DegreeAnalysis {
        input: Option<String>,
        #[arg(long, allow_negative_numbers = true)]
        a: i64,
        #[arg(long)]
        anchor: Option<String>,
    },
    /// Check DG axioms: the Koszul wedge product (--n), or a module table (--table).
    DgCheck {
        input: Option<String>,
        #[arg(long)]
        n: Option<usize>,
        #[arg(long)]
        table: Option<String>,
        #[arg(long)]
        anchor: Option<String>,
        #[arg(long)]
        no_unit: bool,
    },
    /// Search for a DG-module structure over the Koszul anchor.
    DgSolve {
        input: Option<String>,
        #[arg(long)]
        gallery: Option<String>,
        #[arg(long)]
        anchor: Option<String>,
        #[arg(long, allow_negative_numbers = true)]
        max_deg: Option<i64>,
        #[arg(long)]
        no_unit: bool,
    },
    /// Write a gallery object (or a module file) as canonical JSON.
    Export {
        source: String,
        #[arg(long)]
        f: Option<String>,
        #[arg(short, long)]
        out: Option<String>,
    },
    /// Read module or complex JSON, validate it and print it canonically.
    Import { input: Option<String> },
}

enum Outcome {
    Ok(Value),
    Text(String),
    Negative(Value),
}

fn read_input(path: Option<&str>) -> Result<String> {
    match path {
        None | Some("-") => {
            let mut s = String::new();
            io::stdin()
                .read_to_string(&mut s)
                .context("reading stdin")?;
            Ok(s)
        }
        Some(p) => fs::read_to_string(p).with_context(|| format!("reading {p}")),
    }
}

/// Failures that mean "the object is invalid" rather than "the input is unreadable".
fn is_check_failure(e: &DiffModError) -> bool {
    matches!(
        e,
        DiffModError::NotSquareZero { .. }
            | DiffModError::NotHomogeneous { .. }
            | DiffModError::NotAFlag { .. }
            | DiffModError::NotAComplex { .. }
    )
}

fn parse_module(text: &str, ch: u64) -> Result<std::result::Result<ParsedModule, DiffModError>> {
    let j = ModuleJson::from_json_str(text).map_err(|e| anyhow!("{e}"))?;
    match j.to_module(ch) {
        Ok(m) => Ok(Ok(m)),
        Err(e) if is_check_failure(&e) => Ok(Err(e)),
        Err(e) => Err(anyhow!("{e}")),
    }
}

fn load_module(path: Option<&str>, ch: u64) -> Result<ParsedModule> {
    let text = read_input(path)?;
    parse_module(&text, ch)?.map_err(|e| anyhow!("invalid module: {e}"))
}

fn load_flag(path: Option<&str>, ch: u64) -> Result<FreeFlag> {
    load_module(path, ch)?
        .into_flag()
        .map_err(|e| anyhow!("{e}"))
}

fn load_complex(path: Option<&str>, ch: u64) -> Result<dmflag::diffmod::ChainComplex> {
    let text = read_input(path)?;
    ComplexJson::from_json_str(&text)
        .and_then(|c| c.to_complex(ch))
        .map_err(|e| anyhow!("{e}"))
}

/// `koszul:p1,p2,...` over the given ring; defaults to all ring variables.
fn parse_anchor(spec: Option<&str>, ring: &Arc<PolyRing>) -> Result<KoszulComplex> {
    let seq = match spec {
        None => (0..ring.nvars()).map(|k| ring.var(k)).collect(),
        Some(s) => {
            let body = s
                .strip_prefix("koszul:")
                .ok_or_else(|| anyhow!("anchor must look like koszul:x1,x2"))?;
            body.split(',')
                .map(|p| ring.parse(p.trim()).map_err(|e| anyhow!("{e}")))
                .collect::<Result<Vec<_>>>()?
        }
    };
    koszul_on(ring, &seq).map_err(|e| anyhow!("{e}"))
}

fn module_json(d: &DifferentialModule) -> Value {
    serde_json::to_value(ModuleJson::from_dm(d)).expect("serializable")
}

fn flag_json(f: &FreeFlag) -> Value {
    serde_json::to_value(ModuleJson::from_flag(f)).expect("serializable")
}

fn gallery_json(g: &GalleryObject) -> Value {
    match g {
        GalleryObject::Module(d) => module_json(d),
        GalleryObject::Flag(f) => flag_json(f),
    }
}

fn matrix_json(m: &PolyMatrix) -> Value {
    json!((0..m.nrows())
        .map(|r| m.row(r).iter().map(|p| p.to_string()).collect::<Vec<_>>())
        .collect::<Vec<_>>())
}

fn default_ring(vars: Option<&str>, n: Option<usize>, ch: u64) -> Result<Arc<PolyRing>> {
    match vars {
        Some(v) => {
            let names: Vec<&str> = v.split(',').map(|s| s.trim()).collect();
            PolyRing::new(&names, ch).map_err(|e| anyhow!("{e}"))
        }
        None => Ok(PolyRing::standard(
            n.ok_or_else(|| anyhow!("give --vars or --n"))?,
            ch,
        )),
    }
}

fn run(cli: Cli) -> Result<Outcome> {
    let ch = cli.characteristic;
    Ok(match cli.command {
        Command::Check { input } => {
            let text = read_input(input.as_deref())?;
            match parse_module(&text, ch)? {
                Ok(m) => {
                    let mut lines = vec!["square-zero: ok".to_string()];
                    lines.push(if m.dm.is_graded() {
                        format!("graded: ok (degree {})", m.dm.degree())
                    } else {
                        "graded: no".to_string()
                    });
                    if m.levels.is_some() {
                        match m.into_flag() {
                            Ok(f) => lines.push(format!("flag: ok (levels {:?})", f.level_ranks())),
                            Err(e) => {
                                return Ok(Outcome::Negative(
                                    json!({ "check": "failed", "reason": e.to_string() }),
                                ))
                            }
                        }
                    }
                    Outcome::Text(lines.join("\n"))
                }
                Err(e) => Outcome::Negative(json!({ "check": "failed", "reason": e.to_string() })),
            }
        }
        Command::Fold { input, a } => {
            Outcome::Ok(flag_json(&fold(&load_complex(input.as_deref(), ch)?, a)))
        }
        Command::Homology { input, max_deg } => {
            let m = load_module(input.as_deref(), ch)?;
            let bound = max_deg.unwrap_or_else(|| default_max_deg(&m.dm));
            let h = homology_hilbert(&m.dm, bound).map_err(|e| anyhow!("{e}"))?;
            Outcome::Ok(json!({ "max_deg": bound, "hilbert": h.dims }))
        }
        Command::Cone { input, var } => {
            let m = load_module(input.as_deref(), ch)?;
            let ring = m.dm.ring().clone();
            let target = if ring.var_index(&var).is_some()
                || var.parse::<i64>().is_ok()
                || !is_identifier(&var)
            {
                ring
            } else {
                ring.extend(&[var.as_str()]).map_err(|e| anyhow!("{e}"))?
            };
            let mult = target.parse(&var).map_err(|e| anyhow!("{e}"))?;
            Outcome::Ok(module_json(
                &mapping_cone(&m.dm, &mult).map_err(|e| anyhow!("{e}"))?,
            ))
        }
        Command::Box { complex, module } => {
            let c = load_complex(Some(&complex), ch)?;
            let m = load_module(module.as_deref(), ch)?;
            let d = m.dm.base_change(c.ring()).map_err(|e| anyhow!("{e}"))?;
            Outcome::Ok(module_json(
                &box_product(&c, &d).map_err(|e| anyhow!("{e}"))?,
            ))
        }
        Command::Koszul { psi, vars, n } => {
            let ring = default_ring(vars.as_deref(), n, ch)?;
            let rank = n.unwrap_or(ring.nvars());
            let form = parse_dual(&ring, rank, &psi, Some(1)).map_err(|e| anyhow!("{e}"))?;
            let k = koszul_complex(&form).map_err(|e| anyhow!("{e}"))?;
            Outcome::Ok(serde_json::to_value(ComplexJson::from_complex(
                k.complex(),
            ))?)
        }
        Command::KoszulDm { duals, a } => {
            let j: KoszulDataJson =
                serde_json::from_str(&read_input(Some(&duals))?).context("parsing duals JSON")?;
            let (data, deg) = j.to_data(ch).map_err(|e| anyhow!("{e}"))?;
            match koszul_dm(&data, a.unwrap_or(deg)) {
                Ok(f) => Outcome::Ok(flag_json(&f)),
                Err(e @ dmflag::koszul::KoszulError::PreconditionViolated { .. }) => {
                    Outcome::Negative(json!({ "error": e.to_string() }))
                }
                Err(e) => bail!("{e}"),
            }
        }
        Command::Smallrank { n } => Outcome::Ok(module_json(
            &dmflag::koszul::small_rank_dm(n, ch).map_err(|e| anyhow!("{e}"))?,
        )),
        Command::Gallery { id, f } => Outcome::Ok(gallery_json(
            &gallery(&id, f.as_deref(), ch).map_err(|e| anyhow!("{e}"))?,
        )),
        Command::FoldDecision { input, anchor } => {
            let flag = load_flag(input.as_deref(), ch)?;
            let k = parse_anchor(anchor.as_deref(), flag.dm().ring())?;
            match fold_decision_ci(&flag, &k).map_err(|e| anyhow!("{e}"))? {
                FoldDecision::IsoToFold { change_of_basis } => Outcome::Ok(
                    json!({ "verdict": "iso", "witness": matrix_json(&change_of_basis) }),
                ),
                FoldDecision::NotIso {
                    level,
                    entry,
                    normal_form,
                } => Outcome::Negative(json!({
                    "verdict": "not_iso",
                    "witness": { "level": level, "entry": entry.to_string(), "normal_form": normal_form.to_string() }
                })),
            }
        }
        Command::Cancel { input, anchor } => {
            let flag = load_flag(input.as_deref(), ch)?;
            let k = parse_anchor(anchor.as_deref(), flag.dm().ring())?;
            match cancel_diagonals(&flag, k.complex()) {
                Ok(c) => Outcome::Ok(
                    json!({ "flag": flag_json(&c.result), "change_of_basis": matrix_json(&c.change_of_basis) }),
                ),
                Err(
                    e @ (dmflag::flags::FlagError::MembershipFailure { .. }
                    | dmflag::flags::FlagError::ExactnessFailure { .. }),
                ) => Outcome::Negative(json!({ "error": e.to_string() })),
                Err(e) => bail!("{e}"),
            }
        }
        Command::DegreeAnalysis { input, a, anchor } => {
            let flag = load_flag(input.as_deref(), ch)?;
            let k = parse_anchor(anchor.as_deref(), flag.dm().ring())?;
            match degree_analysis(&flag, &k, a).map_err(|e| anyhow!("{e}"))? {
                DegreeVerdict::ForcedFold { change_of_basis } => Outcome::Ok(
                    json!({ "verdict": "forced_fold", "witness": matrix_json(&change_of_basis) }),
                ),
                DegreeVerdict::Indeterminate => Outcome::Ok(json!({ "verdict": "indeterminate" })),
            }
        }
        Command::DgCheck {
            input,
            n,
            table,
            anchor,
            no_unit,
        } => match (n, table) {
            (Some(n), None) => {
                let ring = PolyRing::standard(n, ch);
                let k = koszul_on(&ring, &(0..n).map(|i| ring.var(i)).collect::<Vec<_>>())
                    .map_err(|e| anyhow!("{e}"))?;
                let rep = check_dg_algebra(k.complex(), &AlgebraProduct::koszul_wedge(&k))
                    .map_err(|e| anyhow!("{e}"))?;
                let v = json!({
                    "unital": rep.unital, "leibniz": rep.leibniz, "graded_commutative": rep.graded_commutative,
                    "odd_squares_vanish": rep.odd_squares_vanish, "associative": rep.associative,
                    "dg_algebra": rep.is_dg_algebra()
                });
                if rep.is_dg_algebra() {
                    Outcome::Ok(v)
                } else {
                    Outcome::Negative(v)
                }
            }
            (None, Some(t)) => {
                let m = load_module(input.as_deref(), ch)?;
                let k = parse_anchor(anchor.as_deref(), m.dm.ring())?;
                let tj: ProductTableJson =
                    serde_json::from_str(&read_input(Some(&t))?).context("parsing table JSON")?;
                let table = tj
                    .to_table(k.complex(), &m.dm)
                    .map_err(|e| anyhow!("{e}"))?;
                match module_defect(k.complex(), &m.dm, &table, !no_unit, None)
                    .map_err(|e| anyhow!("{e}"))?
                {
                    None => Outcome::Ok(json!({ "dg_module": true })),
                    Some((i, b, g)) => {
                        Outcome::Negative(json!({ "dg_module": false, "first_failure": [i, b, g] }))
                    }
                }
            }
            _ => bail!("dg-check needs exactly one of --n or --table"),
        },
        Command::DgSolve {
            input,
            gallery: gid,
            anchor,
            max_deg,
            no_unit,
        } => {
            let dm = match gid {
                Some(id) => gallery(&id, None, ch)
                    .map_err(|e| anyhow!("{e}"))?
                    .dm()
                    .clone(),
                None => load_module(input.as_deref(), ch)?.dm,
            };
            let k = parse_anchor(anchor.as_deref(), dm.ring())?;
            let bound = max_deg.unwrap_or_else(|| box_max_degree(k.complex(), &dm));
            match solve_dg_module(k.complex(), &dm, bound, SolveOptions { unital: !no_unit })
                .map_err(|e| anyhow!("{e}"))?
            {
                DgSolveResult::Feasible(t) => {
                    Outcome::Ok(serde_json::to_value(ProductTableJson::from_table(&t))?)
                }
                DgSolveResult::Infeasible(t) => {
                    Outcome::Negative(json!({ "infeasible_at_degree": t }))
                }
            }
        }
        Command::Export { source, f, out } => {
            let v = match gallery(&source, f.as_deref(), ch) {
                Ok(g) => gallery_json(&g),
                Err(dmflag::koszul::KoszulError::UnknownGallery(_)) => {
                    let m = load_module(Some(&source), ch)?;
                    match m.levels.clone() {
                        Some(_) => flag_json(&m.into_flag().map_err(|e| anyhow!("{e}"))?),
                        None => module_json(&m.dm),
                    }
                }
                Err(e) => bail!("{e}"),
            };
            match out {
                Some(path) => {
                    fs::write(&path, serde_json::to_string_pretty(&v)? + "\n")
                        .with_context(|| format!("writing {path}"))?;
                    Outcome::Text(format!("wrote {path}"))
                }
                None => Outcome::Ok(v),
            }
        }
        Command::Import { input } => {
            let text = read_input(input.as_deref())?;
            let raw: Value = serde_json::from_str(&text).context("parsing JSON")?;
            if raw.get("differentials").is_some() {
                let c = ComplexJson::from_json_str(&text)
                    .and_then(|c| c.to_complex(ch))
                    .map_err(|e| anyhow!("{e}"))?;
                Outcome::Ok(serde_json::to_value(ComplexJson::from_complex(&c))?)
            } else {
                match parse_module(&text, ch)? {
                    Ok(m) => match m.levels.clone() {
                        Some(_) => {
                            Outcome::Ok(flag_json(&m.into_flag().map_err(|e| anyhow!("{e}"))?))
                        }
                        None => Outcome::Ok(module_json(&m.dm)),
                    },
                    Err(e) => {
                        Outcome::Negative(json!({ "check": "failed", "reason": e.to_string() }))
                    }
                }
            }
        }
    })
}

fn is_identifier(s: &str) -> bool {
    let mut chars = s.chars();
    matches!(chars.next(), Some(c) if c.is_ascii_alphabetic() || c == '_')
        && chars.all(|c| c.is_ascii_alphanumeric() || c == '_')
}

/// Writes the result; a closed pipe downstream is not an error of ours.
fn emit(text: &str, code: ExitCode) -> ExitCode {
    use std::io::Write;
    let mut out = std::io::stdout().lock();
    match writeln!(out, "{text}").and_then(|_| out.flush()) {
        Err(e) if e.kind() != std::io::ErrorKind::BrokenPipe => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
        _ => code,
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    if let Some(j) = cli.jobs {
        // a second initialisation only fails if a pool already exists, which is harmless
        let _ = rayon::ThreadPoolBuilder::new()
            .num_threads(j.max(1))
            .build_global();
    }
    match run(cli) {
        Ok(Outcome::Ok(v)) => emit(
            &serde_json::to_string_pretty(&v).expect("serializable"),
            ExitCode::SUCCESS,
        ),
        Ok(Outcome::Text(t)) => emit(&t, ExitCode::SUCCESS),
        Ok(Outcome::Negative(v)) => emit(
            &serde_json::to_string_pretty(&v).expect("serializable"),
            ExitCode::from(1),
        ),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
