//! Modules attached to matrix tuples, in two flavors: a square tuple `C`
//! makes its column space a module over the free algebra on `m` letters
//! (letter `i` acts as `Cᵢ`); a rectangular tuple makes the pair of column
//! spaces a representation of the quiver with two vertices and `m` parallel
//! arrows. The module is what the tuple looks like up to base change, so
//! Hom spaces, endomorphism algebras, radicals, and indecomposable
//! decompositions of these modules drive every similarity decision here.
//!
//! The centerpiece, [`decide_similarity`], runs the radical-filtration
//! pipeline: starting from the direct sum of the two input modules it
//! iterates `L ↦ rad(End L)·L`, decomposes every module in the chain,
//! and tests each piece as a rank-disparity witness via
//! [`witness_from_module_sim`]. A rank gap proves the inputs are not
//! similar; otherwise an invertible intertwiner, found by seeded sampling,
//! certifies that they are.

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::field::FieldDescriptor;
use crate::matrix::{Matrix, SolveOutcome};
use crate::pencil::{witness_from_module_sim, LinearPencil, MatrixTuple};
use crate::poly::UniPoly;

/// Which algebra the tuple's module lives over.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ModuleKind {
    /// Square tuple `C ∈ Mat_n^m`: `𝕜^n` as a module over the free algebra.
    FreeAlgebra,
    /// Rectangular tuple `C ∈ Mat_{p,q}^m`: the pair `(𝕜^q, 𝕜^p)` as a
    /// representation of the two-vertex quiver with `m` arrows `𝕜^q → 𝕜^p`.
    KroneckerQuiver,
}

/// A module presented by the tuple that acts on it.
///
/// The underlying space has dimension `n` in the free-algebra case and
/// `q + p` in the quiver case, with the arrow-source coordinates first;
/// quiver endomorphisms are block-diagonal in that ordering.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ModuleRep {
    kind: ModuleKind,
    tuple: MatrixTuple,
}

impl ModuleRep {
    /// Free-algebra module of a square tuple.
    pub fn free(tuple: MatrixTuple) -> Result<Self> {
        if !tuple.is_square() {
            return Err(Error::NotSquare(format!(
                "{}×{} tuple for a free-algebra module",
                tuple.p(),
                tuple.q()
            )));
        }
        Ok(ModuleRep {
            kind: ModuleKind::FreeAlgebra,
            tuple,
        })
    }

    /// Quiver representation of a (possibly rectangular) tuple.
    pub fn quiver(tuple: MatrixTuple) -> Self {
        ModuleRep {
            kind: ModuleKind::KroneckerQuiver,
            tuple,
        }
    }

    pub fn kind(&self) -> ModuleKind {
        self.kind
    }

    pub fn tuple(&self) -> &MatrixTuple {
        &self.tuple
    }

    pub fn field(&self) -> FieldDescriptor {
        self.tuple.field()
    }

    /// Dimension of the underlying vector space.
    pub fn dimension(&self) -> usize {
        match self.kind {
            ModuleKind::FreeAlgebra => self.tuple.p(),
            ModuleKind::KroneckerQuiver => self.tuple.p() + self.tuple.q(),
        }
    }

    pub fn is_zero(&self) -> bool {
        self.dimension() == 0
    }
}

/// The endomorphism algebra of a module, with a basis of its radical.
///
/// Basis elements are square matrices of the module dimension; for quiver
/// modules they are block-diagonal `diag(P, Q)` with `P` on the source
/// coordinates and `Q` on the target coordinates.
#[derive(Clone, Debug)]
pub struct EndAlgebra {
    module: ModuleRep,
    basis: Vec<Matrix>,
    radical_basis: Vec<Matrix>,
}

impl EndAlgebra {
    pub fn module(&self) -> &ModuleRep {
        &self.module
    }

    pub fn basis(&self) -> &[Matrix] {
        &self.basis
    }

    pub fn radical_basis(&self) -> &[Matrix] {
        &self.radical_basis
    }

    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    pub fn radical_dim(&self) -> usize {
        self.radical_basis.len()
    }

    /// Dimension of the semisimple quotient End/rad.
    pub fn semisimple_dim(&self) -> usize {
        self.basis.len() - self.radical_basis.len()
    }
}

/// A direct-sum decomposition: summand modules with their embeddings
/// (full-column-rank matrices whose horizontal concatenation is invertible).
#[derive(Clone, Debug)]
pub struct Decomposition {
    pub summands: Vec<(ModuleRep, Matrix)>,
    /// True when every summand provably has local endomorphism ring, i.e.
    /// the list is a genuine indecomposable decomposition.
    pub certified: bool,
}

impl Decomposition {
    /// Summand dimensions in output order.
    pub fn dims(&self) -> Vec<usize> {
        self.summands.iter().map(|(m, _)| m.dimension()).collect()
    }
}

/// Outcome of the radical-chain similarity decision.
#[derive(Clone, Debug)]
pub enum ChainOutcome {
    /// An invertible `P` with `P·Aᵢ = Bᵢ·P` for all `i`.
    Similar(Matrix),
    /// A pencil whose evaluations on the two tuples have different ranks.
    Witness {
        pencil: LinearPencil,
        rank_a: usize,
        rank_b: usize,
    },
    /// Neither certificate was found within the search budget.
    Indeterminate(String),
}

fn check_compatible(c: &ModuleRep, a: &ModuleRep) -> Result<()> {
    if c.kind != a.kind {
        return Err(Error::DimensionMismatch(format!(
            "mixed module kinds {:?} and {:?}",
            c.kind, a.kind
        )));
    }
    if c.field() != a.field() {
        return Err(Error::FieldMismatch(c.field().name(), a.field().name()));
    }
    if c.tuple.len() != a.tuple.len() {
        return Err(Error::DimensionMismatch(format!(
            "tuples of length {} and {}",
            c.tuple.len(),
            a.tuple.len()
        )));
    }
    Ok(())
}

/// The linear system cutting out `Hom(module of C, module of A)`.
///
/// Free-algebra case (`C` of dimension `t`, `A` of dimension `n`): the
/// stacked blocks `I_t⊗Aᵢ − Cᵢᵗ⊗I_n`, shape `m·t·n × t·n`; the kernel is
/// the set of column-vectorized `P ∈ Mat_{n,t}` with `AᵢP = PCᵢ`.
///
/// Quiver case (`C ∈ Mat_{r,s}`, `A ∈ Mat_{p,q}`): the stacked blocks
/// `[I_s⊗Aᵢ | −Cᵢᵗ⊗I_p]`, shape `m·p·s × (qs + pr)`; the kernel holds
/// `(vec P, vec Q)` with `P ∈ Mat_{q,s}`, `Q ∈ Mat_{p,r}` and `AᵢP = QCᵢ`.
pub fn hom_matricization(c: &ModuleRep, a: &ModuleRep) -> Result<Matrix> {
    check_compatible(c, a)?;
    let field = c.field();
    let m = c.tuple.len();
    match c.kind {
        ModuleKind::FreeAlgebra => {
            let t = c.tuple.p();
            let n = a.tuple.p();
            let it = Matrix::identity(field, t);
            let imat = Matrix::identity(field, n);
            let mut out = Matrix::zeros(field, m * t * n, t * n);
            for i in 0..m {
                let block = it
                    .kron(a.tuple.matrix(i))
                    .sub(&c.tuple.matrix(i).transpose().kron(&imat));
                out.set_block(i * t * n, 0, &block);
            }
            Ok(out)
        }
        ModuleKind::KroneckerQuiver => {
            let (r, s) = (c.tuple.p(), c.tuple.q());
            let (p, q) = (a.tuple.p(), a.tuple.q());
            let is = Matrix::identity(field, s);
            let ip = Matrix::identity(field, p);
            let mut out = Matrix::zeros(field, m * p * s, q * s + p * r);
            for i in 0..m {
                out.set_block(i * p * s, 0, &is.kron(a.tuple.matrix(i)));
                out.set_block(
                    i * p * s,
                    q * s,
                    &c.tuple.matrix(i).transpose().kron(&ip).neg(),
                );
            }
            Ok(out)
        }
    }
}

/// `dim Hom(module of C, module of A)`: the nullity of [`hom_matricization`].
pub fn dim_hom(c: &ModuleRep, a: &ModuleRep) -> Result<usize> {
    let h = hom_matricization(c, a)?;
    Ok(h.cols() - h.rank())
}

/// Basis of `{P : AᵢP = PCᵢ}` for two free-algebra modules, as matrices
/// `P ∈ Mat_{dim A, dim C}` (maps from C's module to A's).
pub fn hom_basis_free(c: &ModuleRep, a: &ModuleRep) -> Result<Vec<Matrix>> {
    if c.kind != ModuleKind::FreeAlgebra || a.kind != ModuleKind::FreeAlgebra {
        return Err(Error::DimensionMismatch(
            "hom_basis_free requires free-algebra modules".into(),
        ));
    }
    let h = hom_matricization(c, a)?;
    let k = h.kernel_basis();
    let (t, n) = (c.tuple.p(), a.tuple.p());
    Ok((0..k.cols())
        .map(|j| Matrix::unvec_col(&k.column(j), n, t))
        .collect())
}

/// Basis of `{(P, Q) : AᵢP = QCᵢ}` for two quiver modules, with
/// `P ∈ Mat_{q_A, s_C}` on sources and `Q ∈ Mat_{p_A, r_C}` on targets.
pub fn hom_basis_quiver(c: &ModuleRep, a: &ModuleRep) -> Result<Vec<(Matrix, Matrix)>> {
    if c.kind != ModuleKind::KroneckerQuiver || a.kind != ModuleKind::KroneckerQuiver {
        return Err(Error::DimensionMismatch(
            "hom_basis_quiver requires quiver modules".into(),
        ));
    }
    let h = hom_matricization(c, a)?;
    let k = h.kernel_basis();
    let (r, s) = (c.tuple.p(), c.tuple.q());
    let (p, q) = (a.tuple.p(), a.tuple.q());
    Ok((0..k.cols())
        .map(|j| {
            let col = k.column(j);
            let pv = col.submatrix(0, q * s, 0, 1);
            let qv = col.submatrix(q * s, q * s + p * r, 0, 1);
            (Matrix::unvec_col(&pv, q, s), Matrix::unvec_col(&qv, p, r))
        })
        .collect())
}

/// Endomorphisms of a module as square matrices on its underlying space
/// (block-diagonal for quiver modules).
fn endomorphism_matrices(m: &ModuleRep) -> Result<Vec<Matrix>> {
    match m.kind {
        ModuleKind::FreeAlgebra => hom_basis_free(m, m),
        ModuleKind::KroneckerQuiver => {
            let pairs = hom_basis_quiver(m, m)?;
            Ok(pairs.into_iter().map(|(p, q)| p.direct_sum(&q)).collect())
        }
    }
}

/// Computes the endomorphism algebra with its radical.
///
/// The radical is cut out by the trace form on the acting matrices:
/// `rad = {x ∈ End : trace(x·y) = 0 for every basis element y}`. That
/// criterion is exact in characteristic 0 and over `𝔽_p` with `p` larger
/// than the module dimension; smaller primes are rejected.
pub fn end_algebra(m: &ModuleRep) -> Result<EndAlgebra> {
    let dim = m.dimension();
    if let FieldDescriptor::PrimeField(p) = m.field() {
        if (p as usize) <= dim {
            return Err(Error::CharacteristicTooSmall { p, needed: dim + 1 });
        }
    }
    let basis = endomorphism_matrices(m)?;
    let e = basis.len();
    let gram = Matrix::from_fn(m.field(), e, e, |i, j| basis[i].mul(&basis[j]).trace());
    let null = gram.kernel_basis();
    let mut radical_basis = Vec::with_capacity(null.cols());
    for j in 0..null.cols() {
        let mut r = Matrix::zeros(m.field(), dim, dim);
        for (i, b) in basis.iter().enumerate() {
            let coef = null.at(i, j).clone();
            if !coef.is_zero() {
                r = r.add(&b.scale(&coef));
            }
        }
        debug_assert!(
            is_nilpotent(&r),
            "trace-form radical produced a non-nilpotent element"
        );
        radical_basis.push(r);
    }
    Ok(EndAlgebra {
        module: m.clone(),
        basis,
        radical_basis,
    })
}

fn is_nilpotent(m: &Matrix) -> bool {
    let n = m.rows();
    let mut acc = m.clone();
    for _ in 0..n {
        if acc.is_zero() {
            return true;
        }
        acc = acc.mul(m);
    }
    acc.is_zero()
}

/// Columns of `m` forming a basis of its column space.
fn column_space_basis(m: &Matrix) -> Matrix {
    let (_, _, pivots) = m.rref_with_transform();
    let mut out = Matrix::zeros(m.field(), m.rows(), pivots.len());
    for (k, &j) in pivots.iter().enumerate() {
        for i in 0..m.rows() {
            out.set(i, k, m.at(i, j).clone());
        }
    }
    out
}

/// Compresses a square tuple to an invariant subspace with basis `u`
/// (full column rank, `Cᵢ·u ⊆ col u`), returning the induced tuple.
fn compress_free(tuple: &MatrixTuple, u: &Matrix) -> MatrixTuple {
    let d = u.cols();
    let mats = tuple
        .iter()
        .map(|ci| match u.solve(&ci.mul(u)).expect("compression solve") {
            SolveOutcome::Solution { particular, .. } => particular,
            SolveOutcome::Inconsistent => panic!("subspace is not invariant under the tuple"),
        })
        .collect();
    MatrixTuple::new(tuple.field(), d, d, mats)
}

/// Compresses a rectangular tuple to a graded subspace `(u1 on sources,
/// u2 on targets)` with `Cᵢ·u1 ⊆ col u2`.
fn compress_quiver(tuple: &MatrixTuple, u1: &Matrix, u2: &Matrix) -> MatrixTuple {
    let (r, s) = (u2.cols(), u1.cols());
    let mats = tuple
        .iter()
        .map(
            |ci| match u2.solve(&ci.mul(u1)).expect("compression solve") {
                SolveOutcome::Solution { particular, .. } => particular,
                SolveOutcome::Inconsistent => panic!("graded subspace is not invariant"),
            },
        )
        .collect();
    MatrixTuple::new(tuple.field(), r, s, mats)
}

/// The submodule spanned by the images of all radical endomorphisms, with
/// the induced action. Zero-dimensional exactly when the radical acts as
/// zero (in particular when `radical_basis` is empty).
pub fn radical_submodule(m: &ModuleRep, e: &EndAlgebra) -> ModuleRep {
    let field = m.field();
    let mlen = m.tuple.len();
    match m.kind {
        ModuleKind::FreeAlgebra => {
            let n = m.tuple.p();
            let mut stacked = Matrix::zeros(field, n, 0);
            for r in &e.radical_basis {
                stacked = stacked.hstack(r);
            }
            let u = column_space_basis(&stacked);
            if u.cols() == 0 {
                return ModuleRep {
                    kind: ModuleKind::FreeAlgebra,
                    tuple: MatrixTuple::zeros(field, mlen, 0, 0),
                };
            }
            ModuleRep {
                kind: ModuleKind::FreeAlgebra,
                tuple: compress_free(&m.tuple, &u),
            }
        }
        ModuleKind::KroneckerQuiver => {
            let (p, q) = (m.tuple.p(), m.tuple.q());
            let mut src = Matrix::zeros(field, q, 0);
            let mut tgt = Matrix::zeros(field, p, 0);
            for r in &e.radical_basis {
                src = src.hstack(&r.submatrix(0, q, 0, q));
                tgt = tgt.hstack(&r.submatrix(q, q + p, q, q + p));
            }
            let u1 = column_space_basis(&src);
            let u2 = column_space_basis(&tgt);
            ModuleRep {
                kind: ModuleKind::KroneckerQuiver,
                tuple: compress_quiver(&m.tuple, &u1, &u2),
            }
        }
    }
}

/// Splits the columns of a graded subspace basis into source-supported and
/// target-supported groups (every column of a kernel of a block-diagonal
/// map is supported in one block).
fn split_graded(k: &Matrix, q: usize) -> (Matrix, Matrix) {
    let field = k.field();
    let total = k.rows();
    let mut src_cols = Vec::new();
    let mut tgt_cols = Vec::new();
    for j in 0..k.cols() {
        let col = k.column(j);
        let in_src = (0..q).any(|i| !col.at(i, 0).is_zero());
        let in_tgt = (q..total).any(|i| !col.at(i, 0).is_zero());
        match (in_src, in_tgt) {
            (true, false) => src_cols.push(col),
            (false, true) => tgt_cols.push(col),
            (false, false) => {}
            (true, true) => panic!("subspace basis column straddles the grading"),
        }
    }
    let mut u1 = Matrix::zeros(field, q, src_cols.len());
    for (idx, col) in src_cols.iter().enumerate() {
        u1.set_block(0, idx, &col.submatrix(0, q, 0, 1));
    }
    let mut u2 = Matrix::zeros(field, total - q, tgt_cols.len());
    for (idx, col) in tgt_cols.iter().enumerate() {
        u2.set_block(0, idx, &col.submatrix(q, total, 0, 1));
    }
    (u1, u2)
}

/// Child module and embedding for an invariant subspace of `rep` given by
/// the columns of `k` (graded for quiver modules).
fn subspace_child(rep: &ModuleRep, k: &Matrix) -> (ModuleRep, Matrix) {
    match rep.kind {
        ModuleKind::FreeAlgebra => (
            ModuleRep {
                kind: ModuleKind::FreeAlgebra,
                tuple: compress_free(&rep.tuple, k),
            },
            k.clone(),
        ),
        ModuleKind::KroneckerQuiver => {
            let q = rep.tuple.q();
            let (u1, u2) = split_graded(k, q);
            let child = ModuleRep {
                kind: ModuleKind::KroneckerQuiver,
                tuple: compress_quiver(&rep.tuple, &u1, &u2),
            };
            // Re-order the basis source-first so it matches the child's
            // coordinate convention.
            let embed = u1
                .vstack(&Matrix::zeros(rep.field(), rep.tuple.p(), u1.cols()))
                .hstack(&Matrix::zeros(rep.field(), q, u2.cols()).vstack(&u2));
            (child, embed)
        }
    }
}

/// Minimal monic `g` with `g(φ)` inside the span of the radical basis,
/// i.e. the minimal polynomial of `φ` as an element of End/rad.
fn min_poly_mod_radical(phi: &Matrix, alg: &EndAlgebra) -> UniPoly {
    let field = phi.field();
    let n = phi.rows();
    let mut span = Matrix::zeros(field, n * n, 0);
    for r in &alg.radical_basis {
        span = span.hstack(&r.vec_col());
    }
    let mut power = Matrix::identity(field, n);
    let mut power_count = 0usize;
    loop {
        span = span.hstack(&power.vec_col());
        power_count += 1;
        power = power.mul(phi);
        let target = power.vec_col();
        if let SolveOutcome::Solution { particular, .. } =
            span.solve(&target).expect("membership solve")
        {
            // Power columns sit after the radical columns; coefficient of
            // φ^j is at radical_dim + j.
            let base = alg.radical_basis.len();
            let mut coeffs = vec![field.zero(); power_count + 1];
            for (j, c) in coeffs.iter_mut().enumerate().take(power_count) {
                *c = particular.at(base + j, 0).clone();
            }
            coeffs[power_count] = field.from_i64(-1);
            let g = UniPoly::new(field, coeffs).neg().make_monic();
            return g;
        }
        assert!(
            power_count <= n * n,
            "minimal polynomial search exceeded the dimension bound"
        );
    }
}

const SPLIT_BUDGET: usize = 64;
/// Coefficient bound for random endomorphism combinations.
const SPLIT_COEF_BOUND: i64 = 3;

/// Decomposes a module into (provably or putatively) indecomposable
/// summands.
///
/// At each node: if `dim(End/rad) = 1` the module is certified
/// indecomposable. Otherwise candidate endomorphisms φ — the End basis
/// first, then seeded random combinations, up to 64 — are examined. When
/// the minimal polynomial of φ has two coprime parts `f·g`, the exact
/// idempotent from the Bézout identity is polished by the cubic iteration
/// `e ← 3e² − 2e³` until `e² = e`, and the module splits as
/// `ker(1−e) ⊕ ker e`. When instead some φ has irreducible minimal
/// polynomial modulo the radical of degree `dim(End/rad)`, End/rad is a
/// field, which also certifies indecomposability. If the budget runs out
/// with neither, the node is kept whole and the result is marked
/// uncertified (possible over ℚ when End/rad is a noncommutative division
/// algebra, or under persistently unlucky factorizations).
pub fn decompose(m: &ModuleRep, seed: u64) -> Result<Decomposition> {
    let dim = m.dimension();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut summands = Vec::new();
    let mut certified = true;
    let root_embed = Matrix::identity(m.field(), dim);
    decompose_rec(
        m.clone(),
        root_embed,
        &mut rng,
        &mut summands,
        &mut certified,
    )?;
    debug_assert_eq!(
        summands.iter().map(|(s, _)| s.dimension()).sum::<usize>(),
        dim,
        "summand dimensions must add up"
    );
    if dim > 0 {
        let mut concat = Matrix::zeros(m.field(), dim, 0);
        for (_, e) in &summands {
            concat = concat.hstack(e);
        }
        debug_assert_eq!(
            concat.rank(),
            dim,
            "concatenated embedding must be invertible"
        );
    }
    Ok(Decomposition {
        summands,
        certified,
    })
}

fn decompose_rec(
    rep: ModuleRep,
    embed: Matrix,
    rng: &mut ChaCha8Rng,
    out: &mut Vec<(ModuleRep, Matrix)>,
    certified: &mut bool,
) -> Result<()> {
    if rep.is_zero() {
        return Ok(());
    }
    let alg = end_algebra(&rep)?;
    let ss = alg.semisimple_dim();
    if ss == 1 {
        out.push((rep, embed));
        return Ok(());
    }
    let field = rep.field();
    let dim = rep.dimension();
    for attempt in 0..SPLIT_BUDGET {
        let phi = if attempt < alg.basis.len() {
            alg.basis[attempt].clone()
        } else {
            let mut combo = Matrix::zeros(field, dim, dim);
            for b in &alg.basis {
                let c = field.random_scalar(rng, SPLIT_COEF_BOUND);
                if !c.is_zero() {
                    combo = combo.add(&b.scale(&c));
                }
            }
            combo
        };
        let mp = phi.min_poly();
        if mp.degree() == Some(0) {
            continue;
        }
        let (_, factors) = mp.factor(rng.gen())?;
        if factors.len() >= 2 {
            let (f, g) = coprime_split(&mp, &factors);
            let e = exact_idempotent(&phi, &f, &g, dim);
            let ident = Matrix::identity(field, dim);
            let k_im = ident.sub(&e).kernel_basis();
            let k_ker = e.kernel_basis();
            debug_assert!(
                k_im.cols() > 0 && k_ker.cols() > 0,
                "split produced a trivial part"
            );
            debug_assert_eq!(k_im.cols() + k_ker.cols(), dim);
            let (child_a, basis_a) = subspace_child(&rep, &k_im);
            let (child_b, basis_b) = subspace_child(&rep, &k_ker);
            decompose_rec(child_a, embed.mul(&basis_a), rng, out, certified)?;
            decompose_rec(child_b, embed.mul(&basis_b), rng, out, certified)?;
            return Ok(());
        }
        // The minimal polynomial is a prime power, so φ cannot split the
        // module — but it may certify that End/rad is a field.
        let g = min_poly_mod_radical(&phi, &alg);
        if g.degree() == Some(ss) {
            let (_, gf) = g.factor(rng.gen())?;
            if gf.len() == 1 && gf[0].1 == 1 {
                out.push((rep, embed));
                return Ok(());
            }
        }
    }
    *certified = false;
    out.push((rep, embed));
    Ok(())
}

/// Splits a factored polynomial into the first prime power and its
/// (coprime) complement.
fn coprime_split(mp: &UniPoly, factors: &[(UniPoly, u32)]) -> (UniPoly, UniPoly) {
    let mut f = UniPoly::one(mp.field());
    for _ in 0..factors[0].1 {
        f = f.mul(&factors[0].0);
    }
    let g = mp.make_monic().div_exact(&f);
    (f, g)
}

/// The projector onto `ker f(φ)` along `ker g(φ)` for coprime `f·g`
/// annihilating φ, made exactly idempotent by the cubic iteration.
fn exact_idempotent(phi: &Matrix, f: &UniPoly, g: &UniPoly, dim: usize) -> Matrix {
    let (d, _, v) = f.extended_gcd(g);
    debug_assert_eq!(d.degree(), Some(0), "split parts must be coprime");
    let scale = d.coeff(0).inv();
    let proj_poly = v.mul(g).scale(&scale);
    let mut e = phi.apply_poly(&proj_poly);
    let max_iters = usize::BITS as usize - dim.leading_zeros() as usize + 2;
    for _ in 0..max_iters {
        let e2 = e.mul(&e);
        if e2 == e {
            return e;
        }
        // e ← 3e² − 2e³
        let three = e2.scale(&phi.field().from_i64(3));
        let two = e2.mul(&e).scale(&phi.field().from_i64(2));
        e = three.sub(&two);
    }
    let e2 = e.mul(&e);
    assert_eq!(e2, e, "idempotent iteration failed to converge");
    e
}

/// Samples elements of `{P : P·Aᵢ = Bᵢ·P}` with random coordinates and
/// returns the first invertible one, if any.
pub fn sample_invertible_intertwiner<R: Rng + ?Sized>(
    a: &MatrixTuple,
    b: &MatrixTuple,
    attempts: usize,
    bound: i64,
    rng: &mut R,
) -> Result<Option<Matrix>> {
    let ma = ModuleRep::free(a.clone())?;
    let mb = ModuleRep::free(b.clone())?;
    let basis = hom_basis_free(&ma, &mb)?;
    if basis.is_empty() {
        return Ok(None);
    }
    let field = a.field();
    let n = b.n();
    for _ in 0..attempts {
        let mut p = Matrix::zeros(field, n, a.n());
        for bmat in &basis {
            let c = field.random_scalar(rng, bound);
            if !c.is_zero() {
                p = p.add(&bmat.scale(&c));
            }
        }
        if p.is_square() && p.invert().is_ok() {
            debug_assert!((0..a.len()).all(|i| p.mul(a.matrix(i)) == b.matrix(i).mul(&p)));
            return Ok(Some(p));
        }
    }
    Ok(None)
}

/// Number of intertwiner samples tried when hunting a similarity
/// certificate.
const INTERTWINER_SAMPLES: usize = 8;

/// Decides simultaneous similarity of two square tuples with certificates,
/// via the radical filtration of the direct-sum module.
///
/// The chain starts at the module of `A ⊕ B` and repeatedly passes to the
/// radical submodule of its endomorphism algebra. Candidate modules — the
/// two input modules, every chain module, and every summand of their
/// decompositions — are turned into pencils; the first rank disparity on
/// `(A, B)` is returned as a witness. If no candidate separates, seeded
/// sampling looks for an invertible intertwiner to certify similarity.
/// Both certificate kinds are verified before being returned.
pub fn decide_similarity(a: &MatrixTuple, b: &MatrixTuple, seed: u64) -> Result<ChainOutcome> {
    if a.field() != b.field() {
        return Err(Error::FieldMismatch(a.field().name(), b.field().name()));
    }
    if !a.is_square() || !b.is_square() {
        return Err(Error::NotSquare("similarity needs square tuples".into()));
    }
    if a.len() != b.len() || a.n() != b.n() {
        return Err(Error::DimensionMismatch(format!(
            "tuples {}×{}^{} vs {}×{}^{}",
            a.p(),
            a.q(),
            a.len(),
            b.p(),
            b.q(),
            b.len()
        )));
    }
    let field = a.field();
    let n = a.n();
    if n == 0 {
        return Ok(ChainOutcome::Similar(Matrix::identity(field, 0)));
    }

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut candidates: Vec<MatrixTuple> = vec![a.clone(), b.clone()];
    let mut chain = ModuleRep::free(a.direct_sum(b))?;
    let mut all_certified = true;
    while !chain.is_zero() {
        candidates.push(chain.tuple().clone());
        let dec = decompose(&chain, rng.gen())?;
        all_certified &= dec.certified;
        for (summand, _) in &dec.summands {
            candidates.push(summand.tuple().clone());
        }
        let alg = end_algebra(&chain)?;
        chain = radical_submodule(&chain, &alg);
    }

    for cand in &candidates {
        if cand.n() == 0 {
            continue;
        }
        let pencil = witness_from_module_sim(cand);
        let rank_a = pencil.evaluate(a)?.rank();
        let rank_b = pencil.evaluate(b)?.rank();
        if rank_a != rank_b {
            return Ok(ChainOutcome::Witness {
                pencil,
                rank_a,
                rank_b,
            });
        }
    }

    let bound = (2 * n as i64).max(4);
    if let Some(p) = sample_invertible_intertwiner(a, b, INTERTWINER_SAMPLES, bound, &mut rng)? {
        return Ok(ChainOutcome::Similar(p));
    }
    let note = if all_certified {
        format!(
            "no rank disparity among {} candidate pencils and no invertible intertwiner in {} samples",
            candidates.len(),
            INTERTWINER_SAMPLES
        )
    } else {
        format!(
            "decomposition was not fully certified; {} candidate pencils showed no rank disparity",
            candidates.len()
        )
    };
    Ok(ChainOutcome::Indeterminate(note))
}

#[cfg(test)]
mod tests {
    use super::*;

    const Q: FieldDescriptor = FieldDescriptor::Rationals;

    fn free(tuple: MatrixTuple) -> ModuleRep {
        ModuleRep::free(tuple).unwrap()
    }

    fn single(field: FieldDescriptor, rows: &[&[i64]]) -> MatrixTuple {
        MatrixTuple::from_matrices(vec![Matrix::from_i64_rows(field, rows)])
    }

    /// Independent nullity computation from the defining equations, with
    /// row-major unknowns (a different assembly than the library's).
    fn direct_dim_hom_free(c: &MatrixTuple, a: &MatrixTuple) -> usize {
        let (t, n) = (c.n(), a.n());
        let field = c.field();
        let mut eqs = Matrix::zeros(field, c.len() * n * t, n * t);
        let mut row = 0;
        for i in 0..c.len() {
            for u in 0..n {
                for v in 0..t {
                    // Σ_s P[u][s]·C[s][v] − Σ_r A[u][r]·P[r][v] = 0
                    for s in 0..t {
                        let cur = eqs.at(row, u * t + s).add(c.matrix(i).at(s, v));
                        eqs.set(row, u * t + s, cur);
                    }
                    for r in 0..n {
                        let cur = eqs.at(row, r * t + v).sub(a.matrix(i).at(u, r));
                        eqs.set(row, r * t + v, cur);
                    }
                    row += 1;
                }
            }
        }
        eqs.cols() - eqs.rank()
    }

    fn direct_dim_hom_quiver(c: &MatrixTuple, a: &MatrixTuple) -> usize {
        let (r, s) = (c.p(), c.q());
        let (p, q) = (a.p(), a.q());
        let field = c.field();
        let unknowns = q * s + p * r;
        let mut eqs = Matrix::zeros(field, c.len() * p * s, unknowns);
        let mut row = 0;
        for i in 0..c.len() {
            for u in 0..p {
                for v in 0..s {
                    // Σ_t Q[u][t]·C[t][v] − Σ_w A[u][w]·P[w][v] = 0,
                    // P row-major first, then Q row-major.
                    for t in 0..r {
                        let cur = eqs.at(row, q * s + u * r + t).add(c.matrix(i).at(t, v));
                        eqs.set(row, q * s + u * r + t, cur);
                    }
                    for w in 0..q {
                        let cur = eqs.at(row, w * s + v).sub(a.matrix(i).at(u, w));
                        eqs.set(row, w * s + v, cur);
                    }
                    row += 1;
                }
            }
        }
        eqs.cols() - eqs.rank()
    }

    #[test]
    fn matricization_trivial_fixtures() {
        let zero1 = free(single(Q, &[&[0]]));
        let h = hom_matricization(&zero1, &zero1).unwrap();
        assert_eq!((h.rows(), h.cols()), (1, 1));
        assert!(h.is_zero());
        assert_eq!(dim_hom(&zero1, &zero1).unwrap(), 1);

        let one_quiver = ModuleRep::quiver(single(Q, &[&[1]]));
        let h = hom_matricization(&one_quiver, &one_quiver).unwrap();
        assert_eq!((h.rows(), h.cols()), (1, 2));
        assert_eq!(h, Matrix::from_i64_rows(Q, &[&[1, -1]]));
        assert_eq!(dim_hom(&one_quiver, &one_quiver).unwrap(), 1);
    }

    #[test]
    fn dim_hom_matches_direct_assembly() {
        let mut rng = ChaCha8Rng::seed_from_u64(40);
        let e12 = Matrix::basis(Q, 3, 3, 0, 1);
        let e13 = Matrix::basis(Q, 3, 3, 0, 2);
        let a = MatrixTuple::from_matrices(vec![e12, e13]);
        let ma = free(a.clone());
        assert_eq!(dim_hom(&ma, &ma).unwrap(), direct_dim_hom_free(&a, &a));

        for _ in 0..10 {
            let c = MatrixTuple::random(Q, 2, 2, 2, &mut rng, 2);
            let x = MatrixTuple::random(Q, 2, 3, 3, &mut rng, 2);
            assert_eq!(
                dim_hom(&free(c.clone()), &free(x.clone())).unwrap(),
                direct_dim_hom_free(&c, &x)
            );
        }
        for _ in 0..10 {
            let c = MatrixTuple::random(Q, 2, 2, 3, &mut rng, 2);
            let x = MatrixTuple::random(Q, 2, 3, 2, &mut rng, 2);
            assert_eq!(
                dim_hom(&ModuleRep::quiver(c.clone()), &ModuleRep::quiver(x.clone())).unwrap(),
                direct_dim_hom_quiver(&c, &x)
            );
        }
    }

    #[test]
    fn dim_hom_small_fixtures() {
        // One-dimensional modules for distinct scalars admit no nonzero map.
        let ka = free(single(Q, &[&[2]]));
        let kb = free(single(Q, &[&[5]]));
        assert_eq!(dim_hom(&ka, &kb).unwrap(), 0);
        assert_eq!(dim_hom(&ka, &ka).unwrap(), 1);

        // Intertwiners of a single nilpotent Jordan block: aI + bN.
        let j2 = free(single(Q, &[&[0, 1], &[0, 0]]));
        assert_eq!(dim_hom(&j2, &j2).unwrap(), 2);

        // The identity is always a homomorphism.
        let mut rng = ChaCha8Rng::seed_from_u64(41);
        for _ in 0..5 {
            let m = free(MatrixTuple::random(Q, 2, 3, 3, &mut rng, 3));
            assert!(dim_hom(&m, &m).unwrap() >= 1);
        }
    }

    #[test]
    fn dim_hom_additive_over_direct_sum() {
        let mut rng = ChaCha8Rng::seed_from_u64(42);
        for _ in 0..10 {
            let c = free(MatrixTuple::random(Q, 2, 2, 2, &mut rng, 2));
            let x = MatrixTuple::random(Q, 2, 2, 2, &mut rng, 2);
            let y = MatrixTuple::random(Q, 2, 3, 3, &mut rng, 2);
            let sum = free(x.direct_sum(&y));
            assert_eq!(
                dim_hom(&c, &sum).unwrap(),
                dim_hom(&c, &free(x)).unwrap() + dim_hom(&c, &free(y)).unwrap()
            );
        }
    }

    #[test]
    fn end_algebra_jordan_block() {
        let j2 = free(single(Q, &[&[0, 1], &[0, 0]]));
        let alg = end_algebra(&j2).unwrap();
        assert_eq!(alg.dim(), 2);
        assert_eq!(alg.radical_dim(), 1);
        assert_eq!(alg.semisimple_dim(), 1);
        let r = &alg.radical_basis()[0];
        assert!(r.mul(r).is_zero());
        assert_eq!(r.rank(), 1);
    }

    #[test]
    fn end_algebra_simple_and_doubled() {
        let a = MatrixTuple::from_matrices(vec![
            Matrix::basis(Q, 2, 2, 0, 1),
            Matrix::basis(Q, 2, 2, 1, 0),
        ]);
        let m = free(a.clone());
        let alg = end_algebra(&m).unwrap();
        assert_eq!(alg.dim(), 1);
        assert_eq!(alg.radical_dim(), 0);

        let doubled = free(a.direct_sum(&a));
        let alg2 = end_algebra(&doubled).unwrap();
        assert_eq!(alg2.dim(), 4);
        assert_eq!(alg2.radical_dim(), 0);

        // Spot check: the basis spans an algebra (closed under products).
        let mut span = Matrix::zeros(Q, 16, 0);
        for b in alg2.basis() {
            span = span.hstack(&b.vec_col());
        }
        for x in alg2.basis() {
            for y in alg2.basis() {
                match span.solve(&x.mul(y).vec_col()).unwrap() {
                    SolveOutcome::Solution { .. } => {}
                    SolveOutcome::Inconsistent => panic!("basis product escaped the span"),
                }
            }
        }
    }

    #[test]
    fn end_algebra_rejects_small_characteristic() {
        let f2 = FieldDescriptor::prime_field(2).unwrap();
        let m = free(MatrixTuple::zeros(f2, 1, 3, 3));
        match end_algebra(&m) {
            Err(Error::CharacteristicTooSmall { p: 2, needed: 4 }) => {}
            other => panic!("expected characteristic guard, got {other:?}"),
        }
    }

    #[test]
    fn radical_submodule_fixtures() {
        // Semisimple module: radical submodule is zero.
        let simple = free(single(Q, &[&[2]]));
        let alg = end_algebra(&simple).unwrap();
        assert!(radical_submodule(&simple, &alg).is_zero());

        // J₂: the radical image is the span of e₁, with zero induced action.
        let j2 = free(single(Q, &[&[0, 1], &[0, 0]]));
        let alg = end_algebra(&j2).unwrap();
        let sub = radical_submodule(&j2, &alg);
        assert_eq!(sub.dimension(), 1);
        assert!(sub.tuple().matrix(0).is_zero());

        // The chain reaches zero in at most dim steps.
        let j23 = free(single(
            Q,
            &[
                &[0, 1, 0, 0, 0],
                &[0, 0, 0, 0, 0],
                &[0, 0, 0, 1, 0],
                &[0, 0, 0, 0, 1],
                &[0, 0, 0, 0, 0],
            ],
        ));
        let mut cur = j23;
        let mut steps = 0;
        while !cur.is_zero() {
            let alg = end_algebra(&cur).unwrap();
            let next = radical_submodule(&cur, &alg);
            assert!(next.dimension() < cur.dimension());
            cur = next;
            steps += 1;
            assert!(steps <= 5);
        }
    }

    #[test]
    fn radical_elements_are_nilpotent_of_module_degree() {
        let j3 = free(single(Q, &[&[0, 1, 0], &[0, 0, 1], &[0, 0, 0]]));
        let alg = end_algebra(&j3).unwrap();
        assert!(alg.radical_dim() > 0);
        for r in alg.radical_basis() {
            let mut acc = Matrix::identity(Q, 3);
            for _ in 0..3 {
                acc = acc.mul(r);
            }
            assert!(acc.is_zero());
        }
    }

    fn check_decomposition(m: &ModuleRep, dec: &Decomposition) {
        let dim = m.dimension();
        assert_eq!(dec.dims().iter().sum::<usize>(), dim);
        let mut concat = Matrix::zeros(m.field(), dim, 0);
        for (summand, embed) in &dec.summands {
            assert_eq!(
                embed.rank(),
                summand.dimension(),
                "embedding must have full column rank"
            );
            concat = concat.hstack(embed);
            // The summand tuple is the compression of the parent tuple.
            for (ci, si) in m.tuple().iter().zip(summand.tuple().iter()) {
                match m.kind() {
                    ModuleKind::FreeAlgebra => {
                        assert_eq!(ci.mul(embed), embed.mul(si));
                    }
                    ModuleKind::KroneckerQuiver => {
                        let q = m.tuple().q();
                        let (u1, u2) = (
                            embed.submatrix(0, q, 0, summand.tuple().q()),
                            embed.submatrix(
                                q,
                                q + m.tuple().p(),
                                summand.tuple().q(),
                                summand.tuple().q() + summand.tuple().p(),
                            ),
                        );
                        assert_eq!(ci.mul(&u1), u2.mul(si));
                    }
                }
            }
        }
        assert_eq!(concat.rank(), dim, "embeddings must assemble to a basis");
    }

    #[test]
    fn decompose_jordan_sum_into_blocks() {
        let j23 = free(single(
            Q,
            &[
                &[0, 1, 0, 0, 0],
                &[0, 0, 0, 0, 0],
                &[0, 0, 0, 1, 0],
                &[0, 0, 0, 0, 1],
                &[0, 0, 0, 0, 0],
            ],
        ));
        let dec = decompose(&j23, 7).unwrap();
        let mut dims = dec.dims();
        dims.sort();
        assert_eq!(dims, vec![2, 3]);
        assert!(dec.certified);
        check_decomposition(&j23, &dec);
    }

    #[test]
    fn decompose_trivial_square_splits_fully() {
        // The zero 2×2 tuple is two copies of the trivial module; End is the
        // full matrix algebra and basis idempotents split it.
        let m = free(single(Q, &[&[0, 0], &[0, 0]]));
        let dec = decompose(&m, 3).unwrap();
        assert_eq!(dec.dims(), vec![1, 1]);
        assert!(dec.certified);
        check_decomposition(&m, &dec);
    }

    #[test]
    fn decompose_certifies_simple_and_field_endomorphisms() {
        let simple = free(MatrixTuple::from_matrices(vec![
            Matrix::basis(Q, 2, 2, 0, 1),
            Matrix::basis(Q, 2, 2, 1, 0),
        ]));
        let dec = decompose(&simple, 11).unwrap();
        assert_eq!(dec.dims(), vec![2]);
        assert!(dec.certified);

        // Rotation by i: End is ℚ[x]/(x²+1), a field of dimension 2 — the
        // module is indecomposable with a non-split endomorphism field.
        let rot = free(single(Q, &[&[0, -1], &[1, 0]]));
        let dec = decompose(&rot, 12).unwrap();
        assert_eq!(dec.dims(), vec![2]);
        assert!(
            dec.certified,
            "field End/rad should be certified via the minimal polynomial"
        );
        check_decomposition(&rot, &dec);
    }

    #[test]
    fn decompose_seed_invariant_dimension_multiset() {
        let f101 = FieldDescriptor::prime_field(101).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(50);
        let x = MatrixTuple::random(f101, 2, 2, 2, &mut rng, 3);
        let m = free(x.direct_sum(&MatrixTuple::random(f101, 2, 2, 2, &mut rng, 3)));
        let mut reference: Option<Vec<usize>> = None;
        for seed in 0..3 {
            let dec = decompose(&m, seed).unwrap();
            check_decomposition(&m, &dec);
            let mut dims = dec.dims();
            dims.sort();
            match &reference {
                None => reference = Some(dims),
                Some(r) => assert_eq!(&dims, r, "summand dimensions must not depend on the seed"),
            }
        }
    }

    #[test]
    fn decompose_quiver_rank_one_map() {
        // diag(1,0) as a quiver representation: one two-dimensional
        // indecomposable plus a simple at each vertex.
        let m = ModuleRep::quiver(single(Q, &[&[1, 0], &[0, 0]]));
        let dec = decompose(&m, 21).unwrap();
        let mut dims = dec.dims();
        dims.sort();
        assert_eq!(dims, vec![1, 1, 2]);
        assert!(dec.certified);
        check_decomposition(&m, &dec);
    }

    #[test]
    fn decide_similarity_on_conjugate_tuples() {
        let mut rng = ChaCha8Rng::seed_from_u64(60);
        let a = MatrixTuple::random(Q, 2, 3, 3, &mut rng, 3);
        let g = loop {
            let cand = Matrix::random(Q, 3, 3, &mut rng, 3);
            if cand.invert().is_ok() {
                break cand;
            }
        };
        let b = a.conjugate(&g).unwrap();
        match decide_similarity(&a, &b, 1).unwrap() {
            ChainOutcome::Similar(p) => {
                assert!(p.invert().is_ok());
                for i in 0..a.len() {
                    assert_eq!(p.mul(a.matrix(i)), b.matrix(i).mul(&p));
                }
            }
            other => panic!("conjugate tuples must be declared similar, got {other:?}"),
        }
    }

    #[test]
    fn decide_similarity_separates_rank_disparity_pair() {
        let a = MatrixTuple::from_matrices(vec![
            Matrix::basis(Q, 3, 3, 0, 1),
            Matrix::basis(Q, 3, 3, 0, 2),
        ]);
        let b = MatrixTuple::from_matrices(vec![
            Matrix::basis(Q, 3, 3, 1, 0),
            Matrix::basis(Q, 3, 3, 2, 0),
        ]);
        match decide_similarity(&a, &b, 2).unwrap() {
            ChainOutcome::Witness {
                pencil,
                rank_a,
                rank_b,
            } => {
                assert_ne!(rank_a, rank_b);
                assert_eq!(pencil.evaluate(&a).unwrap().rank(), rank_a);
                assert_eq!(pencil.evaluate(&b).unwrap().rank(), rank_b);
            }
            other => panic!("expected a rank-disparity witness, got {other:?}"),
        }
    }

    #[test]
    fn decide_similarity_rejects_mismatched_inputs() {
        let a = MatrixTuple::zeros(Q, 2, 2, 2);
        let b = MatrixTuple::zeros(Q, 2, 3, 3);
        assert!(matches!(
            decide_similarity(&a, &b, 0),
            Err(Error::DimensionMismatch(_))
        ));
        let c = MatrixTuple::zeros(Q, 1, 2, 2);
        assert!(matches!(
            decide_similarity(&a, &c, 0),
            Err(Error::DimensionMismatch(_))
        ));
    }

    #[test]
    fn intertwiner_sampling_respects_hom_space() {
        let mut rng = ChaCha8Rng::seed_from_u64(61);
        // Non-similar tuples with zero Hom space in one direction: sampling
        // must return None rather than a bogus certificate.
        let ka = single(Q, &[&[2]]);
        let kb = single(Q, &[&[5]]);
        assert!(sample_invertible_intertwiner(&ka, &kb, 8, 4, &mut rng)
            .unwrap()
            .is_none());

        let a = MatrixTuple::random(Q, 2, 2, 2, &mut rng, 3);
        if let Some(p) = sample_invertible_intertwiner(&a, &a, 8, 4, &mut rng).unwrap() {
            for i in 0..a.len() {
                assert_eq!(p.mul(a.matrix(i)), a.matrix(i).mul(&p));
            }
        } else {
            panic!("a module always has invertible self-intertwiners (the identity)");
        }
    }
}
