//! Stable JSON formats: matrix tuples, pencils, and self-contained verdict
//! documents with an independent re-validation routine.
//!
//! A tuple file stores scalars as strings in the field's own notation
//! (`"2/3"`, `"1+2i"`, `"57"`), so round-trips are exact. A pencil file is
//! the same shape with `m+1` matrices, the constant coefficient first; a
//! homogeneous (rectangular) pencil has `m` matrices. Verdict documents
//! fix their field order as `{command, inputs, seed, decision,
//! certificate?, witness?, ranks?, checks?}`.

use orbits_core::{
    Certificate, Error, FieldDescriptor, LinearPencil, Matrix, MatrixTuple, RectPencil, Result,
    Verdict, Witness,
};
use serde::{Deserialize, Serialize};

/// A matrix tuple (or pencil) on disk. `m` counts *variables*: a plain
/// tuple carries `m` matrices, a linear pencil `m+1` (constant term first),
/// a homogeneous rectangular pencil `m`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TupleDoc {
    pub field: String,
    pub m: usize,
    pub p: usize,
    pub q: usize,
    pub matrices: Vec<Vec<Vec<String>>>,
}

fn matrix_rows(m: &Matrix) -> Vec<Vec<String>> {
    (0..m.rows())
        .map(|i| (0..m.cols()).map(|j| m.at(i, j).to_string()).collect())
        .collect()
}

fn rows_to_matrix(
    field: FieldDescriptor,
    rows: &[Vec<String>],
    p: usize,
    q: usize,
) -> Result<Matrix> {
    if rows.len() != p || rows.iter().any(|r| r.len() != q) {
        return Err(Error::DimensionMismatch(format!(
            "matrix must be {p}×{q} as declared by the document header"
        )));
    }
    let mut m = Matrix::zeros(field, p, q);
    for (i, row) in rows.iter().enumerate() {
        for (j, text) in row.iter().enumerate() {
            m.set(i, j, field.parse_scalar(text)?);
        }
    }
    Ok(m)
}

impl TupleDoc {
    pub fn from_tuple(t: &MatrixTuple) -> TupleDoc {
        TupleDoc {
            field: t.field().name(),
            m: t.len(),
            p: t.p(),
            q: t.q(),
            matrices: t.iter().map(matrix_rows).collect(),
        }
    }

    pub fn to_tuple(&self) -> Result<MatrixTuple> {
        let field = FieldDescriptor::from_name(&self.field)?;
        if self.matrices.len() != self.m {
            return Err(Error::DimensionMismatch(format!(
                "document declares m = {} but lists {} matrices",
                self.m,
                self.matrices.len()
            )));
        }
        let mats = self
            .matrices
            .iter()
            .map(|rows| rows_to_matrix(field, rows, self.p, self.q))
            .collect::<Result<Vec<_>>>()?;
        Ok(MatrixTuple::new(field, self.p, self.q, mats))
    }

    /// Linear pencils list `m+1` square coefficients, the constant first.
    pub fn from_linear_pencil(l: &LinearPencil) -> TupleDoc {
        TupleDoc {
            field: l.field().name(),
            m: l.num_vars(),
            p: l.size(),
            q: l.size(),
            matrices: l.coefficients().iter().map(matrix_rows).collect(),
        }
    }

    pub fn to_linear_pencil(&self) -> Result<LinearPencil> {
        let field = FieldDescriptor::from_name(&self.field)?;
        if self.p != self.q {
            return Err(Error::NotSquare(format!(
                "{}×{} linear pencil",
                self.p, self.q
            )));
        }
        if self.matrices.len() != self.m + 1 {
            return Err(Error::DimensionMismatch(format!(
                "a linear pencil in {} variables lists {} matrices (constant term first), found {}",
                self.m,
                self.m + 1,
                self.matrices.len()
            )));
        }
        let mats = self
            .matrices
            .iter()
            .map(|rows| rows_to_matrix(field, rows, self.p, self.q))
            .collect::<Result<Vec<_>>>()?;
        Ok(LinearPencil::new(mats))
    }

    /// Homogeneous rectangular pencils list `m` coefficients.
    pub fn from_rect_pencil(l: &RectPencil) -> TupleDoc {
        TupleDoc {
            field: l.field().name(),
            m: l.num_vars(),
            p: l.rows(),
            q: l.cols(),
            matrices: l.coefficients().iter().map(matrix_rows).collect(),
        }
    }

    pub fn to_rect_pencil(&self) -> Result<RectPencil> {
        let field = FieldDescriptor::from_name(&self.field)?;
        if self.matrices.len() != self.m {
            return Err(Error::DimensionMismatch(format!(
                "a homogeneous pencil in {} variables lists {} matrices, found {}",
                self.m,
                self.m,
                self.matrices.len()
            )));
        }
        let mats = self
            .matrices
            .iter()
            .map(|rows| rows_to_matrix(field, rows, self.p, self.q))
            .collect::<Result<Vec<_>>>()?;
        Ok(RectPencil::new(field, self.p, self.q, mats))
    }
}

/// Evidence for an `Equivalent` decision.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct CertificateDoc {
    /// "similarity" | "left-right" | "left-right-det"
    pub kind: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub p: Option<Vec<Vec<String>>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub left: Option<Vec<Vec<String>>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub right: Option<Vec<Vec<String>>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub det_left: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub det_right: Option<String>,
}

/// Evidence for a `NotEquivalent` decision.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct WitnessDoc {
    /// "similarity-pencil" | "left-right-pencil" | "invariant"
    pub kind: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub pencil: Option<TupleDoc>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub name: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub value_a: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub value_b: Option<String>,
}

/// One named re-validation step and its outcome.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct CheckDoc {
    pub name: String,
    pub pass: bool,
}

/// A self-contained decision record: inputs echoed, evidence embedded.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct VerdictDoc {
    pub command: String,
    pub inputs: Vec<TupleDoc>,
    pub seed: u64,
    pub decision: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub certificate: Option<CertificateDoc>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub witness: Option<WitnessDoc>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub ranks: Option<[usize; 2]>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub checks: Option<Vec<CheckDoc>>,
}

fn certificate_doc(c: &Certificate) -> CertificateDoc {
    match c {
        Certificate::Similarity { p } => CertificateDoc {
            kind: "similarity".into(),
            p: Some(matrix_rows(p)),
            left: None,
            right: None,
            det_left: None,
            det_right: None,
        },
        Certificate::LeftRight { left, right } => CertificateDoc {
            kind: "left-right".into(),
            p: None,
            left: Some(matrix_rows(left)),
            right: Some(matrix_rows(right)),
            det_left: None,
            det_right: None,
        },
        Certificate::LeftRightDet {
            left,
            right,
            det_left,
            det_right,
        } => CertificateDoc {
            kind: "left-right-det".into(),
            p: None,
            left: Some(matrix_rows(left)),
            right: Some(matrix_rows(right)),
            det_left: Some(det_left.to_string()),
            det_right: Some(det_right.to_string()),
        },
    }
}

fn witness_doc(w: &Witness) -> (WitnessDoc, Option<[usize; 2]>) {
    match w {
        Witness::SimilarityPencil {
            pencil,
            rank_a,
            rank_b,
        } => (
            WitnessDoc {
                kind: "similarity-pencil".into(),
                pencil: Some(TupleDoc::from_linear_pencil(pencil)),
                name: None,
                value_a: None,
                value_b: None,
            },
            Some([*rank_a, *rank_b]),
        ),
        Witness::LeftRightPencil {
            pencil,
            rank_a,
            rank_b,
        } => (
            WitnessDoc {
                kind: "left-right-pencil".into(),
                pencil: Some(TupleDoc::from_rect_pencil(pencil)),
                name: None,
                value_a: None,
                value_b: None,
            },
            Some([*rank_a, *rank_b]),
        ),
        Witness::InvariantPair {
            name,
            value_a,
            value_b,
        } => (
            WitnessDoc {
                kind: "invariant".into(),
                pencil: None,
                name: Some(name.clone()),
                value_a: Some(value_a.clone()),
                value_b: Some(value_b.clone()),
            },
            None,
        ),
    }
}

/// Builds the document for a decision on `(a, b)`.
pub fn verdict_document(
    command: &str,
    a: &MatrixTuple,
    b: &MatrixTuple,
    seed: u64,
    verdict: &Verdict,
) -> VerdictDoc {
    let (decision, certificate, witness, ranks) = match verdict {
        Verdict::Equivalent(c) => ("Equivalent", Some(certificate_doc(c)), None, None),
        Verdict::NotEquivalent(w) => {
            let (wd, ranks) = witness_doc(w);
            ("NotEquivalent", None, Some(wd), ranks)
        }
        Verdict::ProbablyInNullCone(_) => ("ProbablyInNullCone", None, None, None),
        Verdict::Indeterminate(_) => ("Indeterminate", None, None, None),
    };
    VerdictDoc {
        command: command.to_string(),
        inputs: vec![TupleDoc::from_tuple(a), TupleDoc::from_tuple(b)],
        seed,
        decision: decision.to_string(),
        certificate,
        witness,
        ranks,
        checks: None,
    }
}

/// The human-facing note carried by inconclusive verdicts; emitted on
/// standard error, never inside the document.
pub fn verdict_note(verdict: &Verdict) -> Option<&str> {
    match verdict {
        Verdict::ProbablyInNullCone(note) | Verdict::Indeterminate(note) => Some(note),
        _ => None,
    }
}

/// Serialization used for all standard-output documents: pretty JSON with
/// a trailing newline, so identical documents are byte-identical.
pub fn to_json(doc: &impl Serialize) -> String {
    let mut s = serde_json::to_string_pretty(doc).expect("documents serialize infallibly");
    s.push('\n');
    s
}

fn err(msg: impl Into<String>) -> Error {
    Error::PreconditionViolation(msg.into())
}

/// Re-validates a verdict document from its own contents: certificates must
/// transform the echoed first input into the second, pencil witnesses must
/// reproduce their recorded ranks, invariant pairs must differ. Returns the
/// executed checks; `Err` means the document is structurally incomplete.
/// Decisions that embed no evidence (`ProbablyInNullCone`, `Indeterminate`)
/// yield an empty check list.
pub fn check_document(doc: &VerdictDoc) -> Result<Vec<CheckDoc>> {
    if doc.inputs.len() != 2 {
        return Err(err("verdict documents echo exactly two input tuples"));
    }
    let a = doc.inputs[0].to_tuple()?;
    let b = doc.inputs[1].to_tuple()?;
    let field = a.field();
    let mut checks = vec![CheckDoc {
        name: "inputs parse and share a field".into(),
        pass: b.field() == field && a.len() == b.len(),
    }];
    match doc.decision.as_str() {
        "Equivalent" => {
            let c = doc
                .certificate
                .as_ref()
                .ok_or_else(|| err("Equivalent without certificate"))?;
            match c.kind.as_str() {
                "similarity" => {
                    let rows =
                        c.p.as_ref()
                            .ok_or_else(|| err("similarity certificate lists no matrix"))?;
                    let p = rows_to_matrix(field, rows, b.p(), a.p())?;
                    checks.push(CheckDoc {
                        name: "certificate matrix is invertible".into(),
                        pass: p.invert().is_ok(),
                    });
                    let intertwines =
                        (0..a.len()).all(|i| p.mul(a.matrix(i)) == b.matrix(i).mul(&p));
                    checks.push(CheckDoc {
                        name: "certificate intertwines the tuples".into(),
                        pass: intertwines,
                    });
                }
                "left-right" | "left-right-det" => {
                    let lrows = c
                        .left
                        .as_ref()
                        .ok_or_else(|| err("certificate lists no left matrix"))?;
                    let rrows = c
                        .right
                        .as_ref()
                        .ok_or_else(|| err("certificate lists no right matrix"))?;
                    let left = rows_to_matrix(field, lrows, b.p(), a.p())?;
                    let right = rows_to_matrix(field, rrows, a.q(), b.q())?;
                    checks.push(CheckDoc {
                        name: "certificate matrices are invertible".into(),
                        pass: left.invert().is_ok() && right.invert().is_ok(),
                    });
                    let translates =
                        (0..a.len()).all(|i| left.mul(a.matrix(i)).mul(&right) == *b.matrix(i));
                    checks.push(CheckDoc {
                        name: "certificate translates the left tuple onto the right".into(),
                        pass: translates,
                    });
                    if c.kind == "left-right-det" {
                        let dl = c
                            .det_left
                            .as_ref()
                            .ok_or_else(|| err("determinant data missing"))?;
                        let dr = c
                            .det_right
                            .as_ref()
                            .ok_or_else(|| err("determinant data missing"))?;
                        let pass = left.det() == field.parse_scalar(dl)?
                            && right.det() == field.parse_scalar(dr)?;
                        checks.push(CheckDoc {
                            name: "recorded determinants match the matrices".into(),
                            pass,
                        });
                    }
                }
                other => return Err(err(format!("unknown certificate kind '{other}'"))),
            }
        }
        "NotEquivalent" => {
            let w = doc
                .witness
                .as_ref()
                .ok_or_else(|| err("NotEquivalent without witness"))?;
            match w.kind.as_str() {
                "similarity-pencil" | "left-right-pencil" => {
                    let pd = w
                        .pencil
                        .as_ref()
                        .ok_or_else(|| err("pencil witness lists no pencil"))?;
                    let ranks = doc
                        .ranks
                        .ok_or_else(|| err("pencil witness lists no ranks"))?;
                    let (ra, rb) = if w.kind == "similarity-pencil" {
                        let l = pd.to_linear_pencil()?;
                        (l.evaluate(&a)?.rank(), l.evaluate(&b)?.rank())
                    } else {
                        let l = pd.to_rect_pencil()?;
                        (l.evaluate(&a)?.rank(), l.evaluate(&b)?.rank())
                    };
                    checks.push(CheckDoc {
                        name: "recorded ranks match re-evaluation".into(),
                        pass: [ra, rb] == ranks,
                    });
                    checks.push(CheckDoc {
                        name: "pencil ranks differ".into(),
                        pass: ra != rb,
                    });
                }
                "invariant" => {
                    let va = w
                        .value_a
                        .as_ref()
                        .ok_or_else(|| err("invariant witness lists no values"))?;
                    let vb = w
                        .value_b
                        .as_ref()
                        .ok_or_else(|| err("invariant witness lists no values"))?;
                    checks.push(CheckDoc {
                        name: "invariant values differ".into(),
                        pass: va != vb,
                    });
                }
                other => return Err(err(format!("unknown witness kind '{other}'"))),
            }
        }
        "ProbablyInNullCone" | "Indeterminate" => {
            checks.clear();
        }
        other => return Err(err(format!("unknown decision '{other}'"))),
    }
    Ok(checks)
}

/// Output of `linearize`: the pencil, its variable count, and the rank
/// offset of the bordering construction.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct LinearizeDoc {
    pub command: String,
    pub expression: String,
    pub num_vars: usize,
    pub field: String,
    pub pencil: TupleDoc,
    pub offset: usize,
}

/// Output of `decompose`: summand dimensions and the certification flag.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct DecomposeDoc {
    pub command: String,
    pub inputs: Vec<TupleDoc>,
    pub seed: u64,
    pub kind: String,
    pub dimensions: Vec<usize>,
    pub certified: bool,
}

/// Output of `verify`: the checks executed against a stored document.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct VerifyDoc {
    pub command: String,
    pub inputs: Vec<String>,
    pub seed: u64,
    pub decision: String,
    pub checks: Vec<CheckDoc>,
}
