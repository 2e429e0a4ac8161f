//! `orbits` — exact deciders for orbit equivalence of matrix tuples.
//!
//! Every decision command prints a self-contained JSON verdict document on
//! standard output (inputs echoed, certificate or witness embedded) and
//! diagnostics on standard error. Exit codes: 0 for a decided verdict,
//! 1 for usage or input errors, 2 when the outcome is inconclusive
//! (`Indeterminate`, `ProbablyInNullCone`, or nothing to re-validate).
//! All randomness derives from `--seed` (default 0); no system entropy.

use clap::{Parser, Subcommand, ValueEnum};
use orbits_cli::demos;
use orbits_cli::formats::{
    check_document, to_json, verdict_document, verdict_note, CheckDoc, DecomposeDoc, LinearizeDoc,
    TupleDoc, VerdictDoc, VerifyDoc,
};
use orbits_core::moddec::{decide_similarity, decompose, ChainOutcome, ModuleRep};
use orbits_core::nclin;
use orbits_core::{
    glr_equivalent, nullcone_member, similar, sl_equivalent, sl_equivalent_outside_nullcone,
    FieldDescriptor, MatrixTuple, NullconeOutcome, Verdict, Witness,
};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

#[derive(Parser)]
#[command(
    name = "orbits",
    about = "Exact deciders for orbit equivalence of matrix tuples, with auditable certificates",
    version
)]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Decide simultaneous similarity of two square tuples.
    Similar {
        a: PathBuf,
        b: PathBuf,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Decide left-right equivalence under pairs of invertible matrices.
    LrEquiv {
        a: PathBuf,
        b: PathBuf,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Decide left-right equivalence under determinant-one pairs.
    SlEquiv {
        a: PathBuf,
        b: PathBuf,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Use the blow-up determinant comparison, which requires both
        /// inputs outside the null cone; inputs that appear to lie inside
        /// yield the ProbablyInNullCone decision and exit code 2.
        #[arg(long)]
        outside_nullcone: bool,
    },
    /// Construct a rank-disparity witness pencil, or a similarity
    /// certificate if the tuples are similar.
    Witness {
        a: PathBuf,
        b: PathBuf,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Rank of a pencil evaluation — or of a matrix-polynomial evaluation,
    /// computed through linearization and the rank offset.
    PencilRank {
        /// Pencil file: a tuple document with m+1 matrices, constant first.
        #[arg(long, value_name = "L.json", conflicts_with = "ncpoly")]
        pencil: Option<PathBuf>,
        /// Matrix-polynomial expression, e.g. "[[x1*x2, 1],[0, x2]]".
        #[arg(long, value_name = "EXPR")]
        ncpoly: Option<String>,
        a: PathBuf,
    },
    /// Reduce a noncommutative matrix polynomial to a linear pencil.
    Linearize {
        expr: String,
        /// Number of letters x1…xM the expression may use.
        #[arg(short = 'm', long = "vars")]
        num_vars: usize,
        /// Ground field: Q, Qi, or Fp:<prime>.
        #[arg(long, default_value = "Q")]
        field: String,
    },
    /// Decompose the module of a tuple into indecomposable summands.
    Decompose {
        a: PathBuf,
        /// Treat the tuple as a Kronecker-quiver representation instead of
        /// a free-algebra module (allows rectangular tuples).
        #[arg(long)]
        quiver: bool,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Run a built-in fixture demo; prints one pass/fail line per check.
    Demo { which: DemoKind },
    /// Re-validate a stored verdict document without re-running the
    /// decision.
    Verify { doc: PathBuf },
}

#[derive(Clone, Copy, ValueEnum)]
enum DemoKind {
    /// Orbit-closure counterexample: pencil-rank domination without
    /// degeneration.
    Counterexample,
    /// The pair separated by a pencil but by no noncommutative polynomial.
    HadwinLarson,
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            // Help and version requests are not errors.
            if e.use_stderr() {
                eprint!("{e}");
                return ExitCode::from(1);
            }
            print!("{e}");
            return ExitCode::SUCCESS;
        }
    };
    match run(cli.cmd) {
        Ok(code) => code,
        Err(msg) => {
            eprintln!("error: {msg}");
            ExitCode::from(1)
        }
    }
}

fn read_tuple(path: &Path) -> Result<MatrixTuple, String> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| format!("cannot read {}: {e}", path.display()))?;
    let doc: TupleDoc = serde_json::from_str(&text)
        .map_err(|e| format!("{} is not a tuple document: {e}", path.display()))?;
    doc.to_tuple()
        .map_err(|e| format!("{}: {e}", path.display()))
}

fn read_pair(a: &Path, b: &Path) -> Result<(MatrixTuple, MatrixTuple), String> {
    Ok((read_tuple(a)?, read_tuple(b)?))
}

/// Prints the document and maps the verdict to the exit code contract.
fn emit(doc: &VerdictDoc, verdict: &Verdict) -> ExitCode {
    print!("{}", to_json(doc));
    if let Some(note) = verdict_note(verdict) {
        eprintln!("note: {note}");
    }
    match verdict {
        Verdict::Equivalent(_) | Verdict::NotEquivalent(_) => ExitCode::SUCCESS,
        Verdict::ProbablyInNullCone(_) | Verdict::Indeterminate(_) => ExitCode::from(2),
    }
}

fn run(cmd: Cmd) -> Result<ExitCode, String> {
    match cmd {
        Cmd::Similar { a, b, seed } => {
            let (ta, tb) = read_pair(&a, &b)?;
            let verdict = similar(&ta, &tb, seed).map_err(|e| e.to_string())?;
            Ok(emit(
                &verdict_document("similar", &ta, &tb, seed, &verdict),
                &verdict,
            ))
        }
        Cmd::LrEquiv { a, b, seed } => {
            let (ta, tb) = read_pair(&a, &b)?;
            let verdict = glr_equivalent(&ta, &tb, seed).map_err(|e| e.to_string())?;
            Ok(emit(
                &verdict_document("lr-equiv", &ta, &tb, seed, &verdict),
                &verdict,
            ))
        }
        Cmd::SlEquiv {
            a,
            b,
            seed,
            outside_nullcone,
        } => {
            let (ta, tb) = read_pair(&a, &b)?;
            let verdict = if outside_nullcone {
                match pair_nullcone_note(&ta, &tb, seed).map_err(|e| e.to_string())? {
                    Some(note) => Verdict::ProbablyInNullCone(note),
                    None => {
                        sl_equivalent_outside_nullcone(&ta, &tb, seed).map_err(|e| e.to_string())?
                    }
                }
            } else {
                sl_equivalent(&ta, &tb, seed).map_err(|e| e.to_string())?
            };
            Ok(emit(
                &verdict_document("sl-equiv", &ta, &tb, seed, &verdict),
                &verdict,
            ))
        }
        Cmd::Witness { a, b, seed } => {
            let (ta, tb) = read_pair(&a, &b)?;
            let verdict = match decide_similarity(&ta, &tb, seed).map_err(|e| e.to_string())? {
                ChainOutcome::Similar(p) => {
                    Verdict::Equivalent(orbits_core::Certificate::Similarity { p })
                }
                ChainOutcome::Witness {
                    pencil,
                    rank_a,
                    rank_b,
                } => Verdict::NotEquivalent(Witness::SimilarityPencil {
                    pencil,
                    rank_a,
                    rank_b,
                }),
                ChainOutcome::Indeterminate(note) => Verdict::Indeterminate(note),
            };
            Ok(emit(
                &verdict_document("witness", &ta, &tb, seed, &verdict),
                &verdict,
            ))
        }
        Cmd::PencilRank { pencil, ncpoly, a } => {
            let tuple = read_tuple(&a)?;
            let rank = match (pencil, ncpoly) {
                (Some(path), None) => {
                    let text = std::fs::read_to_string(&path)
                        .map_err(|e| format!("cannot read {}: {e}", path.display()))?;
                    let doc: TupleDoc = serde_json::from_str(&text)
                        .map_err(|e| format!("{} is not a pencil document: {e}", path.display()))?;
                    let l = doc.to_linear_pencil().map_err(|e| e.to_string())?;
                    l.evaluate(&tuple).map_err(|e| e.to_string())?.rank()
                }
                (None, Some(expr)) => {
                    let f = nclin::parse(&expr, tuple.len(), tuple.field())
                        .map_err(|e| e.to_string())?;
                    let lin = nclin::higman_linearize(&f).map_err(|e| e.to_string())?;
                    let full = lin
                        .pencil
                        .evaluate(&tuple)
                        .map_err(|e| e.to_string())?
                        .rank();
                    full - lin.offset * tuple.n()
                }
                _ => return Err("pass exactly one of --pencil or --ncpoly".into()),
            };
            println!("{rank}");
            Ok(ExitCode::SUCCESS)
        }
        Cmd::Linearize {
            expr,
            num_vars,
            field,
        } => {
            let fd = FieldDescriptor::from_name(&field).map_err(|e| e.to_string())?;
            let f = nclin::parse(&expr, num_vars, fd).map_err(|e| e.to_string())?;
            let lin = nclin::higman_linearize(&f).map_err(|e| e.to_string())?;
            let doc = LinearizeDoc {
                command: "linearize".into(),
                expression: expr,
                num_vars,
                field: fd.name(),
                pencil: TupleDoc::from_linear_pencil(&lin.pencil),
                offset: lin.offset,
            };
            print!("{}", to_json(&doc));
            Ok(ExitCode::SUCCESS)
        }
        Cmd::Decompose { a, quiver, seed } => {
            let tuple = read_tuple(&a)?;
            let module = if quiver {
                ModuleRep::quiver(tuple.clone())
            } else {
                ModuleRep::free(tuple.clone()).map_err(|e| e.to_string())?
            };
            let dec = decompose(&module, seed).map_err(|e| e.to_string())?;
            let doc = DecomposeDoc {
                command: "decompose".into(),
                inputs: vec![TupleDoc::from_tuple(&tuple)],
                seed,
                kind: if quiver {
                    "quiver".into()
                } else {
                    "free".into()
                },
                dimensions: dec.dims(),
                certified: dec.certified,
            };
            print!("{}", to_json(&doc));
            Ok(ExitCode::SUCCESS)
        }
        Cmd::Demo { which } => {
            let checks = match which {
                DemoKind::Counterexample => demos::counterexample_checks(),
                DemoKind::HadwinLarson => demos::hadwin_larson_checks(),
            };
            let mut all = true;
            for (i, c) in checks.iter().enumerate() {
                let status = if c.pass { "pass" } else { "fail" };
                println!("check {} ({}): {status} — {}", i + 1, c.name, c.detail);
                all &= c.pass;
            }
            println!(
                "{}",
                if all {
                    "all checks passed"
                } else {
                    "SOME CHECKS FAILED"
                }
            );
            Ok(if all {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(1)
            })
        }
        Cmd::Verify { doc } => {
            let text = std::fs::read_to_string(&doc)
                .map_err(|e| format!("cannot read {}: {e}", doc.display()))?;
            let vd: VerdictDoc = serde_json::from_str(&text)
                .map_err(|e| format!("{} is not a verdict document: {e}", doc.display()))?;
            let checks = check_document(&vd).map_err(|e| e.to_string())?;
            let (decision, code) = if checks.is_empty() {
                ("NothingToCheck", ExitCode::from(2))
            } else if checks.iter().all(|c: &CheckDoc| c.pass) {
                ("Valid", ExitCode::SUCCESS)
            } else {
                ("Invalid", ExitCode::from(1))
            };
            let out = VerifyDoc {
                command: "verify".into(),
                inputs: vec![doc.display().to_string()],
                seed: 0,
                decision: decision.into(),
                checks,
            };
            print!("{}", to_json(&out));
            Ok(code)
        }
    }
}

/// Probabilistic null-cone screen for the blow-up comparison mode: returns
/// the evidence note if either input appears to lie inside the cone.
fn pair_nullcone_note(
    a: &MatrixTuple,
    b: &MatrixTuple,
    seed: u64,
) -> orbits_core::Result<Option<String>> {
    for (side, tuple, salt) in [("left", a, 0x4e31), ("right", b, 0x4e32)] {
        if let NullconeOutcome::ProbablyYes(note) = nullcone_member(tuple, seed.wrapping_add(salt))?
        {
            return Ok(Some(format!("{side} input: {note}")));
        }
    }
    Ok(None)
}
