//! Noncommutative (matrix) polynomials: parsing, exact evaluation on matrix
//! tuples, and reduction to linear pencils by iterated bordering.
//!
//! The bordering identity
//! `[[I, f₁],[0, I]] · [[f₀+f₁f₂, 0],[0, I]] · [[I, 0],[−f₂, I]] = [[f₀, f₁],[−f₂, I]]`
//! lets one trade a degree-≥2 term `c·x_j·w′` of a matrix polynomial for one
//! extra bordered row and column, at the cost of a fixed rank offset of `n`
//! per step. Iterating until every entry is affine produces a pencil `L`
//! with `rank F(A) = rank L(A) − offset·n` for every square tuple `A`.
//!
//! # Text grammar
//!
//! ```text
//! input  := matrix | expr
//! matrix := '[' row (',' row)* ']'        row := '[' expr (',' expr)* ']'
//! expr   := ['-'] term (('+'|'-') term)*
//! term   := factor ('*' factor)*
//! factor := scalar | var | '(' expr ')'
//! var    := 'x' positive-integer          (x1 … xm)
//! scalar := digits ['/' digits] ['i'] | 'i'
//! ```
//!
//! Whitespace is insignificant. Parsing, printing, and re-parsing is
//! idempotent; printed output is canonical (terms in fixed word order, with
//! non-positive-literal coefficients parenthesized).

use std::collections::BTreeMap;
use std::fmt;

use crate::error::{Error, Result};
use crate::field::{FieldDescriptor, Scalar};
use crate::matrix::Matrix;
use crate::pencil::{LinearPencil, MatrixTuple};

/// A noncommutative polynomial: a finite scalar combination of words over
/// the alphabet `x₁, …, xₘ`. Words are stored as sequences of 0-based
/// variable indices; the empty word is the constant term. No zero
/// coefficients are stored.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct NcPoly {
    field: FieldDescriptor,
    terms: BTreeMap<Vec<u16>, Scalar>,
}

impl NcPoly {
    pub fn zero(field: FieldDescriptor) -> Self {
        NcPoly {
            field,
            terms: BTreeMap::new(),
        }
    }

    pub fn constant(c: Scalar) -> Self {
        let field = c.field();
        let mut p = NcPoly::zero(field);
        p.add_term(Vec::new(), c);
        p
    }

    /// The single letter `x_{idx}` (0-based index).
    pub fn var(field: FieldDescriptor, idx: u16) -> Self {
        let mut p = NcPoly::zero(field);
        p.add_term(vec![idx], field.one());
        p
    }

    /// A single scaled word.
    pub fn term(field: FieldDescriptor, word: Vec<u16>, coef: Scalar) -> Self {
        let mut p = NcPoly::zero(field);
        p.add_term(word, coef);
        p
    }

    pub fn field(&self) -> FieldDescriptor {
        self.field
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// Maximal word length, or `None` for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        self.terms.keys().map(Vec::len).max()
    }

    pub fn terms(&self) -> &BTreeMap<Vec<u16>, Scalar> {
        &self.terms
    }

    /// Coefficient of a word (zero if absent).
    pub fn coeff(&self, word: &[u16]) -> Scalar {
        self.terms
            .get(word)
            .cloned()
            .unwrap_or_else(|| self.field.zero())
    }

    /// Largest variable index used, or `None` if no letters occur.
    pub fn max_var(&self) -> Option<u16> {
        self.terms.keys().flat_map(|w| w.iter().copied()).max()
    }

    fn add_term(&mut self, word: Vec<u16>, coef: Scalar) {
        if coef.is_zero() {
            return;
        }
        match self.terms.get_mut(&word) {
            Some(existing) => {
                let sum = existing.add(&coef);
                if sum.is_zero() {
                    self.terms.remove(&word);
                } else {
                    *existing = sum;
                }
            }
            None => {
                self.terms.insert(word, coef);
            }
        }
    }

    pub fn add(&self, other: &NcPoly) -> NcPoly {
        let mut out = self.clone();
        for (w, c) in &other.terms {
            out.add_term(w.clone(), c.clone());
        }
        out
    }

    pub fn neg(&self) -> NcPoly {
        NcPoly {
            field: self.field,
            terms: self
                .terms
                .iter()
                .map(|(w, c)| (w.clone(), c.neg()))
                .collect(),
        }
    }

    pub fn sub(&self, other: &NcPoly) -> NcPoly {
        self.add(&other.neg())
    }

    /// Noncommutative product: words concatenate in order.
    pub fn mul(&self, other: &NcPoly) -> NcPoly {
        let mut out = NcPoly::zero(self.field);
        for (w1, c1) in &self.terms {
            for (w2, c2) in &other.terms {
                let mut w = w1.clone();
                w.extend_from_slice(w2);
                out.add_term(w, c1.mul(c2));
            }
        }
        out
    }

    pub fn scale(&self, s: &Scalar) -> NcPoly {
        if s.is_zero() {
            return NcPoly::zero(self.field);
        }
        NcPoly {
            field: self.field,
            terms: self
                .terms
                .iter()
                .map(|(w, c)| (w.clone(), c.mul(s)))
                .collect(),
        }
    }

    /// Evaluates the polynomial on a square tuple: each word becomes the
    /// corresponding product of tuple matrices, the empty word the identity.
    pub fn evaluate(&self, a: &MatrixTuple) -> Result<Matrix> {
        if !a.is_square() {
            return Err(Error::NotSquare(format!(
                "{}×{} tuple in polynomial evaluation",
                a.p(),
                a.q()
            )));
        }
        if a.field() != self.field {
            return Err(Error::FieldMismatch(self.field.name(), a.field().name()));
        }
        let n = a.n();
        let mut acc = Matrix::zeros(self.field, n, n);
        for (word, coef) in &self.terms {
            let mut prod = Matrix::identity(self.field, n);
            for &letter in word {
                if usize::from(letter) >= a.len() {
                    return Err(Error::UnknownVariable {
                        index: usize::from(letter) + 1,
                        max: a.len(),
                    });
                }
                prod = prod.mul(a.matrix(usize::from(letter)));
            }
            acc = acc.add(&prod.scale(coef));
        }
        Ok(acc)
    }
}

/// True when the scalar's display form is a bare unsigned literal
/// (digits, optional `/digits`, optional `i`) that can be re-read as one
/// token; anything else must be parenthesized when printed.
fn is_plain_literal(s: &str) -> bool {
    let body = s.strip_suffix('i').unwrap_or(s);
    if body.is_empty() {
        return s == "i";
    }
    let mut parts = body.splitn(2, '/');
    let num = parts.next().unwrap_or("");
    let den = parts.next();
    let all_digits = |t: &str| !t.is_empty() && t.bytes().all(|b| b.is_ascii_digit());
    all_digits(num) && den.map(all_digits).unwrap_or(true)
}

impl fmt::Display for NcPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        let mut first = true;
        for (word, coef) in &self.terms {
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            let coef_str = coef.to_string();
            let coef_part = if is_plain_literal(&coef_str) {
                coef_str
            } else {
                format!("({coef_str})")
            };
            if word.is_empty() {
                write!(f, "{coef_part}")?;
            } else {
                if !coef.is_one() {
                    write!(f, "{coef_part}*")?;
                }
                for (k, &letter) in word.iter().enumerate() {
                    if k > 0 {
                        write!(f, "*")?;
                    }
                    write!(f, "x{}", letter + 1)?;
                }
            }
        }
        Ok(())
    }
}

/// A matrix with noncommutative-polynomial entries, over a fixed variable
/// alphabet `x₁, …, xₘ`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct NcMatPoly {
    field: FieldDescriptor,
    num_vars: usize,
    rows: usize,
    cols: usize,
    entries: Vec<NcPoly>,
}

impl NcMatPoly {
    pub fn new(
        field: FieldDescriptor,
        num_vars: usize,
        rows: usize,
        cols: usize,
        entries: Vec<NcPoly>,
    ) -> Self {
        assert!(
            rows > 0 && cols > 0,
            "matrix polynomial must have positive shape"
        );
        assert_eq!(
            entries.len(),
            rows * cols,
            "entry count must equal rows*cols"
        );
        for e in &entries {
            assert_eq!(e.field(), field, "entries must share the field");
            if let Some(mv) = e.max_var() {
                assert!(
                    usize::from(mv) < num_vars,
                    "entry uses a variable beyond the alphabet"
                );
            }
        }
        NcMatPoly {
            field,
            num_vars,
            rows,
            cols,
            entries,
        }
    }

    /// Wraps a single polynomial as a 1×1 matrix.
    pub fn scalar(num_vars: usize, p: NcPoly) -> Self {
        NcMatPoly::new(p.field(), num_vars, 1, 1, vec![p])
    }

    pub fn field(&self) -> FieldDescriptor {
        self.field
    }

    pub fn num_vars(&self) -> usize {
        self.num_vars
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn entry(&self, i: usize, j: usize) -> &NcPoly {
        &self.entries[i * self.cols + j]
    }

    /// Maximal entry degree (`None` when every entry is zero).
    pub fn degree(&self) -> Option<usize> {
        self.entries.iter().filter_map(NcPoly::degree).max()
    }

    /// Evaluates entry-wise on a square tuple of matching length, producing
    /// the `rows·n × cols·n` block matrix.
    pub fn evaluate(&self, a: &MatrixTuple) -> Result<Matrix> {
        if a.len() != self.num_vars {
            return Err(Error::DimensionMismatch(format!(
                "matrix polynomial in {} variables evaluated on a tuple of {}",
                self.num_vars,
                a.len()
            )));
        }
        if !a.is_square() {
            return Err(Error::NotSquare(format!("{}×{} tuple", a.p(), a.q())));
        }
        let n = a.n();
        let mut out = Matrix::zeros(self.field, self.rows * n, self.cols * n);
        for i in 0..self.rows {
            for j in 0..self.cols {
                out.set_block(i * n, j * n, &self.entry(i, j).evaluate(a)?);
            }
        }
        Ok(out)
    }
}

impl fmt::Display for NcMatPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.rows == 1 && self.cols == 1 {
            return write!(f, "{}", self.entry(0, 0));
        }
        write!(f, "[")?;
        for i in 0..self.rows {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "[")?;
            for j in 0..self.cols {
                if j > 0 {
                    write!(f, ", ")?;
                }
                write!(f, "{}", self.entry(i, j))?;
            }
            write!(f, "]")?;
        }
        write!(f, "]")
    }
}

/// A pencil rank-equivalent to a matrix polynomial: for every square tuple
/// `A` of size `n`, `rank F(A) = rank L(A) − offset·n`.
#[derive(Clone, Debug)]
pub struct LinearizationResult {
    pub pencil: LinearPencil,
    /// `d′ − d`: one per bordering step; 0 iff the input was already affine.
    pub offset: usize,
}

/// Reduces a square matrix polynomial to a linear pencil by repeated
/// bordering. Each step takes the first (row-major) entry of maximal degree
/// ≥ 2, peels the leading letter off its first maximal-degree word
/// `c·x_j·w′`, and replaces `F` by `[[F − c·x_j·w′·E_rc, f₁],[−f₂, 1]]`
/// with `f₁ = c·x_j` in row r and `f₂ = w′` in column c. The weighted term
/// count `Σ max(deg−1, 0)` drops by exactly one per step, so the offset
/// equals that sum for the input. Deterministic: no randomness, fixed
/// scan order.
pub fn higman_linearize(f: &NcMatPoly) -> Result<LinearizationResult> {
    if f.rows != f.cols {
        return Err(Error::NotSquare(format!(
            "{}×{} matrix polynomial",
            f.rows, f.cols
        )));
    }
    let field = f.field;
    let mut cur = f.clone();
    let mut offset = 0usize;
    while let Some(dmax) = cur.degree() {
        if dmax <= 1 {
            break;
        }
        // First row-major entry achieving the maximal degree.
        let (r, c) = (0..cur.rows * cur.cols)
            .map(|k| (k / cur.cols, k % cur.cols))
            .find(|&(i, j)| cur.entry(i, j).degree() == Some(dmax))
            .expect("some entry has the maximal degree");
        // First maximal-degree word of that entry, in word order.
        let (word, coef) = cur
            .entry(r, c)
            .terms()
            .iter()
            .find(|(w, _)| w.len() == dmax)
            .map(|(w, c)| (w.clone(), c.clone()))
            .expect("entry has a word of maximal degree");
        let j = word[0];
        let tail = word[1..].to_vec();

        let d = cur.rows;
        let mut entries = Vec::with_capacity((d + 1) * (d + 1));
        for i in 0..d {
            for k in 0..d {
                let mut e = cur.entry(i, k).clone();
                if (i, k) == (r, c) {
                    e = e.sub(&NcPoly::term(field, word.clone(), coef.clone()));
                }
                entries.push(e);
            }
            // Bordered column: f₁ = c·x_j at row r.
            entries.push(if i == r {
                NcPoly::term(field, vec![j], coef.clone())
            } else {
                NcPoly::zero(field)
            });
        }
        // Bordered row: −f₂ = −w′ at column c, then the corner 1.
        for k in 0..d {
            entries.push(if k == c {
                NcPoly::term(field, tail.clone(), field.one().neg())
            } else {
                NcPoly::zero(field)
            });
        }
        entries.push(NcPoly::constant(field.one()));

        cur = NcMatPoly::new(field, cur.num_vars, d + 1, d + 1, entries);
        offset += 1;
    }

    // Affine now: read the coefficients off directly.
    let d = cur.rows;
    let mut mats = Vec::with_capacity(cur.num_vars + 1);
    mats.push(Matrix::from_fn(field, d, d, |i, j| {
        cur.entry(i, j).coeff(&[])
    }));
    for v in 0..cur.num_vars {
        mats.push(Matrix::from_fn(field, d, d, |i, j| {
            cur.entry(i, j).coeff(&[v as u16])
        }));
    }
    Ok(LinearizationResult {
        pencil: LinearPencil::new(mats),
        offset,
    })
}

// ---------------------------------------------------------------------------
// Parsing
// ---------------------------------------------------------------------------

#[derive(Clone, Debug, PartialEq)]
enum Tok {
    LBracket,
    RBracket,
    LParen,
    RParen,
    Comma,
    Plus,
    Minus,
    Star,
    /// Unsigned scalar literal, e.g. `3`, `2/5`, `3i`, `i`.
    Literal(String),
    /// 1-based variable index as written.
    Var(usize),
}

struct Lexer<'a> {
    src: &'a [u8],
    pos: usize,
    line: usize,
    col: usize,
}

#[derive(Clone, Debug)]
struct Spanned {
    tok: Tok,
    line: usize,
    col: usize,
}

impl<'a> Lexer<'a> {
    fn new(src: &'a str) -> Self {
        Lexer {
            src: src.as_bytes(),
            pos: 0,
            line: 1,
            col: 1,
        }
    }

    fn err(&self, msg: impl Into<String>) -> Error {
        Error::Parse {
            line: self.line,
            col: self.col,
            msg: msg.into(),
        }
    }

    fn bump(&mut self) -> u8 {
        let b = self.src[self.pos];
        self.pos += 1;
        if b == b'\n' {
            self.line += 1;
            self.col = 1;
        } else {
            self.col += 1;
        }
        b
    }

    fn tokenize(mut self) -> Result<Vec<Spanned>> {
        let mut out = Vec::new();
        while self.pos < self.src.len() {
            let (line, col) = (self.line, self.col);
            let b = self.src[self.pos];
            if b.is_ascii_whitespace() {
                self.bump();
                continue;
            }
            let tok = match b {
                b'[' => {
                    self.bump();
                    Tok::LBracket
                }
                b']' => {
                    self.bump();
                    Tok::RBracket
                }
                b'(' => {
                    self.bump();
                    Tok::LParen
                }
                b')' => {
                    self.bump();
                    Tok::RParen
                }
                b',' => {
                    self.bump();
                    Tok::Comma
                }
                b'+' => {
                    self.bump();
                    Tok::Plus
                }
                b'-' => {
                    self.bump();
                    Tok::Minus
                }
                b'*' => {
                    self.bump();
                    Tok::Star
                }
                b'x' => {
                    self.bump();
                    let start = self.pos;
                    while self.pos < self.src.len() && self.src[self.pos].is_ascii_digit() {
                        self.bump();
                    }
                    if start == self.pos {
                        return Err(self.err("expected a variable index after 'x'"));
                    }
                    let digits = std::str::from_utf8(&self.src[start..self.pos]).unwrap();
                    let idx: usize = digits
                        .parse()
                        .map_err(|_| self.err(format!("variable index '{digits}' is too large")))?;
                    Tok::Var(idx)
                }
                b'i' => {
                    self.bump();
                    Tok::Literal("i".into())
                }
                b'0'..=b'9' => {
                    let start = self.pos;
                    while self.pos < self.src.len() && self.src[self.pos].is_ascii_digit() {
                        self.bump();
                    }
                    if self.pos < self.src.len() && self.src[self.pos] == b'/' {
                        self.bump();
                        let dstart = self.pos;
                        while self.pos < self.src.len() && self.src[self.pos].is_ascii_digit() {
                            self.bump();
                        }
                        if dstart == self.pos {
                            return Err(self.err("expected digits after '/'"));
                        }
                    }
                    if self.pos < self.src.len() && self.src[self.pos] == b'i' {
                        self.bump();
                    }
                    Tok::Literal(
                        std::str::from_utf8(&self.src[start..self.pos])
                            .unwrap()
                            .to_string(),
                    )
                }
                other => {
                    return Err(self.err(format!("unexpected character '{}'", other as char)));
                }
            };
            out.push(Spanned { tok, line, col });
        }
        Ok(out)
    }
}

struct Parser {
    toks: Vec<Spanned>,
    pos: usize,
    field: FieldDescriptor,
    num_vars: usize,
    end_line: usize,
    end_col: usize,
}

impl Parser {
    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.pos).map(|s| &s.tok)
    }

    fn here(&self) -> (usize, usize) {
        self.toks
            .get(self.pos)
            .map(|s| (s.line, s.col))
            .unwrap_or((self.end_line, self.end_col))
    }

    fn err_here(&self, msg: impl Into<String>) -> Error {
        let (line, col) = self.here();
        Error::Parse {
            line,
            col,
            msg: msg.into(),
        }
    }

    fn advance(&mut self) -> Option<Spanned> {
        let t = self.toks.get(self.pos).cloned();
        if t.is_some() {
            self.pos += 1;
        }
        t
    }

    fn expect(&mut self, want: Tok, what: &str) -> Result<()> {
        match self.peek() {
            Some(t) if *t == want => {
                self.advance();
                Ok(())
            }
            _ => Err(self.err_here(format!("expected {what}"))),
        }
    }

    fn parse_expr(&mut self) -> Result<NcPoly> {
        let mut negate_first = false;
        if self.peek() == Some(&Tok::Minus) {
            self.advance();
            negate_first = true;
        }
        let mut acc = self.parse_term()?;
        if negate_first {
            acc = acc.neg();
        }
        loop {
            match self.peek() {
                Some(Tok::Plus) => {
                    self.advance();
                    let t = self.parse_term()?;
                    acc = acc.add(&t);
                }
                Some(Tok::Minus) => {
                    self.advance();
                    let t = self.parse_term()?;
                    acc = acc.sub(&t);
                }
                _ => return Ok(acc),
            }
        }
    }

    fn parse_term(&mut self) -> Result<NcPoly> {
        let mut acc = self.parse_factor()?;
        while self.peek() == Some(&Tok::Star) {
            self.advance();
            let f = self.parse_factor()?;
            acc = acc.mul(&f);
        }
        Ok(acc)
    }

    fn parse_factor(&mut self) -> Result<NcPoly> {
        let (line, col) = self.here();
        match self.advance().map(|s| s.tok) {
            Some(Tok::Literal(text)) => {
                let scalar = self.field.parse_scalar(&text).map_err(|e| Error::Parse {
                    line,
                    col,
                    msg: format!("bad scalar literal: {e}"),
                })?;
                Ok(NcPoly::constant(scalar))
            }
            Some(Tok::Var(idx)) => {
                if idx == 0 || idx > self.num_vars {
                    return Err(Error::UnknownVariable {
                        index: idx,
                        max: self.num_vars,
                    });
                }
                Ok(NcPoly::var(self.field, (idx - 1) as u16))
            }
            Some(Tok::LParen) => {
                let inner = self.parse_expr()?;
                self.expect(Tok::RParen, "')'")?;
                Ok(inner)
            }
            _ => Err(Error::Parse {
                line,
                col,
                msg: "expected a scalar, variable, or '('".into(),
            }),
        }
    }

    fn parse_row(&mut self) -> Result<Vec<NcPoly>> {
        self.expect(Tok::LBracket, "'[' starting a row")?;
        let mut row = vec![self.parse_expr()?];
        while self.peek() == Some(&Tok::Comma) {
            self.advance();
            row.push(self.parse_expr()?);
        }
        self.expect(Tok::RBracket, "']' ending a row")?;
        Ok(row)
    }

    fn parse_input(&mut self) -> Result<NcMatPoly> {
        if self.peek() == Some(&Tok::LBracket) {
            let (line, col) = self.here();
            self.advance();
            let mut rows = vec![self.parse_row()?];
            while self.peek() == Some(&Tok::Comma) {
                self.advance();
                rows.push(self.parse_row()?);
            }
            self.expect(Tok::RBracket, "']' ending the matrix")?;
            self.expect_end()?;
            let cols = rows[0].len();
            if rows.iter().any(|r| r.len() != cols) {
                return Err(Error::Parse {
                    line,
                    col,
                    msg: "rows have unequal lengths".into(),
                });
            }
            let nrows = rows.len();
            let entries: Vec<NcPoly> = rows.into_iter().flatten().collect();
            Ok(NcMatPoly::new(
                self.field,
                self.num_vars,
                nrows,
                cols,
                entries,
            ))
        } else {
            let e = self.parse_expr()?;
            self.expect_end()?;
            Ok(NcMatPoly::scalar(self.num_vars, e))
        }
    }

    fn expect_end(&mut self) -> Result<()> {
        if self.pos != self.toks.len() {
            return Err(self.err_here("unexpected trailing input"));
        }
        Ok(())
    }
}

/// Parses a matrix polynomial (or a bare expression, read as 1×1) over the
/// variables `x1 … x<num_vars>`. Errors carry 1-based line and column.
pub fn parse(text: &str, num_vars: usize, field: FieldDescriptor) -> Result<NcMatPoly> {
    let toks = Lexer::new(text).tokenize()?;
    let (end_line, end_col) = {
        let mut lx = Lexer::new(text);
        while lx.pos < lx.src.len() {
            lx.bump();
        }
        (lx.line, lx.col)
    };
    let mut p = Parser {
        toks,
        pos: 0,
        field,
        num_vars,
        end_line,
        end_col,
    };
    if p.toks.is_empty() {
        return Err(Error::Parse {
            line: 1,
            col: 1,
            msg: "empty input".into(),
        });
    }
    p.parse_input()
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::Rng;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    const Q: FieldDescriptor = FieldDescriptor::Rationals;

    fn f101() -> FieldDescriptor {
        FieldDescriptor::prime_field(101).unwrap()
    }

    #[test]
    fn parse_simple_expression() {
        let f = parse("x1*x2 - 2", 2, Q).unwrap();
        assert_eq!((f.rows(), f.cols()), (1, 1));
        let p = f.entry(0, 0);
        assert_eq!(p.terms().len(), 2);
        assert_eq!(p.coeff(&[0, 1]), Q.one());
        assert_eq!(p.coeff(&[]), Q.from_i64(-2));
        assert_eq!(p.degree(), Some(2));
    }

    #[test]
    fn parse_matrix_shape() {
        let f = parse("[[x1, 1],[0, x2*x1*x2]]", 2, Q).unwrap();
        assert_eq!((f.rows(), f.cols()), (2, 2));
        assert_eq!(f.entry(0, 0).coeff(&[0]), Q.one());
        assert_eq!(f.entry(0, 1).coeff(&[]), Q.one());
        assert!(f.entry(1, 0).is_zero());
        assert_eq!(f.entry(1, 1).coeff(&[1, 0, 1]), Q.one());
        assert_eq!(f.degree(), Some(3));
    }

    #[test]
    fn parse_expands_noncommutatively() {
        let f = parse("(x1+x2)*(x1-x2)", 2, Q).unwrap();
        let p = f.entry(0, 0);
        // x₁² − x₁x₂ + x₂x₁ − x₂²: the cross terms do not cancel.
        assert_eq!(p.coeff(&[0, 0]), Q.one());
        assert_eq!(p.coeff(&[0, 1]), Q.from_i64(-1));
        assert_eq!(p.coeff(&[1, 0]), Q.one());
        assert_eq!(p.coeff(&[1, 1]), Q.from_i64(-1));
        assert_eq!(p.terms().len(), 4);
    }

    #[test]
    fn parse_reports_positions_and_bad_variables() {
        match parse("x1 +", 2, Q) {
            Err(Error::Parse {
                line: 1, col: 5, ..
            }) => {}
            other => panic!("expected a parse error at 1:5, got {other:?}"),
        }
        match parse("x1 *\n 3x", 2, Q) {
            Err(Error::Parse { line: 2, .. }) => {}
            other => panic!("expected a parse error on line 2, got {other:?}"),
        }
        match parse("x3", 2, Q) {
            Err(Error::UnknownVariable { index: 3, max: 2 }) => {}
            other => panic!("expected an unknown-variable error, got {other:?}"),
        }
        match parse("x0", 2, Q) {
            Err(Error::UnknownVariable { index: 0, max: 2 }) => {}
            other => panic!("expected an unknown-variable error, got {other:?}"),
        }
        match parse("[[x1],[x1,x2]]", 2, Q) {
            Err(Error::Parse { msg, .. }) => assert!(msg.contains("unequal")),
            other => panic!("expected ragged-rows error, got {other:?}"),
        }
        assert!(parse("3i", 2, Q).is_err());
        assert!(parse("3i", 2, FieldDescriptor::GaussianRationals).is_ok());
    }

    #[test]
    fn print_parse_round_trip_is_identity() {
        let mut rng = ChaCha8Rng::seed_from_u64(20);
        for field in [Q, f101(), FieldDescriptor::GaussianRationals] {
            for _ in 0..25 {
                let mut p = NcPoly::zero(field);
                for _ in 0..rng.gen_range(0..5) {
                    let len = rng.gen_range(0..4);
                    let word: Vec<u16> = (0..len).map(|_| rng.gen_range(0..3u16)).collect();
                    p = p.add(&NcPoly::term(field, word, field.random_scalar(&mut rng, 5)));
                }
                let printed = p.to_string();
                let reparsed = parse(&printed, 3, field).unwrap();
                assert_eq!(
                    *reparsed.entry(0, 0),
                    p,
                    "round trip failed for '{printed}'"
                );
                assert_eq!(reparsed.entry(0, 0).to_string(), printed);
            }
        }
    }

    #[test]
    fn evaluate_words_and_constants() {
        let m = Matrix::from_i64_rows(Q, &[&[1, 2], &[3, 4]]);
        let a = MatrixTuple::new(Q, 2, 2, vec![m.clone()]);
        let f = parse("x1", 1, Q).unwrap();
        assert_eq!(f.evaluate(&a).unwrap(), m);

        let e12 = Matrix::basis(Q, 2, 2, 0, 1);
        let e21 = Matrix::basis(Q, 2, 2, 1, 0);
        let pair = MatrixTuple::new(Q, 2, 2, vec![e12, e21]);
        let g = parse("x1*x2", 2, Q).unwrap();
        assert_eq!(g.evaluate(&pair).unwrap(), Matrix::basis(Q, 2, 2, 0, 0));

        let c = parse("5", 1, Q).unwrap();
        assert_eq!(
            c.evaluate(&a).unwrap(),
            Matrix::identity(Q, 2).scale(&Q.from_i64(5))
        );
    }

    #[test]
    fn linearize_single_quadratic_word() {
        let f = parse("x1*x2", 2, Q).unwrap();
        let lin = higman_linearize(&f).unwrap();
        assert_eq!(lin.offset, 1);
        assert_eq!(lin.pencil.size(), 2);
        // Symbol matrix [[0, x1],[−x2, 1]].
        assert_eq!(
            *lin.pencil.t(0),
            Matrix::from_i64_rows(Q, &[&[0, 0], &[0, 1]])
        );
        assert_eq!(
            *lin.pencil.t(1),
            Matrix::from_i64_rows(Q, &[&[0, 1], &[0, 0]])
        );
        assert_eq!(
            *lin.pencil.t(2),
            Matrix::from_i64_rows(Q, &[&[0, 0], &[-1, 0]])
        );

        let mut rng = ChaCha8Rng::seed_from_u64(31);
        for _ in 0..20 {
            let n = rng.gen_range(1..=3);
            let a = MatrixTuple::random(Q, 2, n, n, &mut rng, 3);
            let direct = f.evaluate(&a).unwrap().rank();
            let via_pencil = lin.pencil.evaluate(&a).unwrap().rank();
            assert_eq!(direct, via_pencil - lin.offset * n);
        }
    }

    #[test]
    fn linearize_cubic_word_in_two_steps() {
        let f = parse("x1*x2*x3", 3, Q).unwrap();
        let lin = higman_linearize(&f).unwrap();
        assert_eq!(lin.offset, 2);
        assert_eq!(lin.pencil.size(), 3);
        let mut rng = ChaCha8Rng::seed_from_u64(32);
        for field in [Q, f101()] {
            for n in [2usize, 3] {
                for _ in 0..5 {
                    let f = parse("x1*x2*x3", 3, field).unwrap();
                    let lin = higman_linearize(&f).unwrap();
                    let a = MatrixTuple::random(field, 3, n, n, &mut rng, 3);
                    let direct = f.evaluate(&a).unwrap().rank();
                    let via = lin.pencil.evaluate(&a).unwrap().rank();
                    assert_eq!(direct, via - lin.offset * n);
                }
            }
        }
    }

    #[test]
    fn linearize_affine_input_is_itself() {
        let f = parse("[[x1, 1],[2, x2]]", 2, Q).unwrap();
        let lin = higman_linearize(&f).unwrap();
        assert_eq!(lin.offset, 0);
        assert_eq!(lin.pencil.size(), 2);
        assert_eq!(
            *lin.pencil.t(0),
            Matrix::from_i64_rows(Q, &[&[0, 1], &[2, 0]])
        );
        assert_eq!(
            *lin.pencil.t(1),
            Matrix::from_i64_rows(Q, &[&[1, 0], &[0, 0]])
        );
        assert_eq!(
            *lin.pencil.t(2),
            Matrix::from_i64_rows(Q, &[&[0, 0], &[0, 1]])
        );
    }

    #[test]
    fn linearize_offset_equals_weighted_word_count() {
        let mut rng = ChaCha8Rng::seed_from_u64(33);
        for _ in 0..20 {
            let d = rng.gen_range(1..=2);
            let mut entries = Vec::new();
            let mut expected_offset = 0usize;
            for _ in 0..d * d {
                let mut p = NcPoly::zero(Q);
                for _ in 0..rng.gen_range(0..3) {
                    let len = rng.gen_range(0..4);
                    let word: Vec<u16> = (0..len).map(|_| rng.gen_range(0..2u16)).collect();
                    p = p.add(&NcPoly::term(Q, word, Q.random_scalar(&mut rng, 3)));
                }
                expected_offset += p
                    .terms()
                    .keys()
                    .map(|w| w.len().saturating_sub(1))
                    .sum::<usize>();
                entries.push(p);
            }
            let f = NcMatPoly::new(Q, 2, d, d, entries);
            let lin = higman_linearize(&f).unwrap();
            assert_eq!(lin.offset, expected_offset);
            assert_eq!(lin.pencil.size(), d + expected_offset);
        }
    }

    #[test]
    fn linearize_rejects_rectangular_input() {
        let f = parse("[[x1, x2]]", 2, Q).unwrap();
        assert!(matches!(higman_linearize(&f), Err(Error::NotSquare(_))));
    }
}
