//! Matrix tuples, linear-pencil evaluation, witness-pencil construction from
//! candidate modules, sampled rank-equality testing, and the spanning-subset
//! reduction for long tuples.
//!
//! Tensor order is fixed once and for all: a pencil `L = T₀ + Σ xᵢTᵢ`
//! evaluates on a tuple `A` as `I⊗T₀ + Σ Aᵢ⊗Tᵢ` — tuple factor on the left,
//! coefficient on the right. The opposite order is reachable by conjugating
//! with perfect-shuffle permutations ([`commutation_matrix`]), which is an
//! internal, tested lemma rather than a second convention.

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::field::{FieldDescriptor, Scalar};
use crate::matrix::Matrix;

/// A tuple `(A₁, …, Aₘ)` of matrices of one common shape `p×q`.
///
/// `m = 0` and zero dimensions are permitted internally — they arise as
/// terminal modules of radical filtrations and as one-vertex summands of
/// quiver decompositions — though the command-line interface only accepts
/// positive sizes.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MatrixTuple {
    field: FieldDescriptor,
    p: usize,
    q: usize,
    matrices: Vec<Matrix>,
}

impl MatrixTuple {
    pub fn new(field: FieldDescriptor, p: usize, q: usize, matrices: Vec<Matrix>) -> Self {
        for m in &matrices {
            assert_eq!(
                (m.rows(), m.cols()),
                (p, q),
                "all tuple entries must be p×q"
            );
            assert_eq!(m.field(), field, "all tuple entries must share the field");
        }
        MatrixTuple {
            field,
            p,
            q,
            matrices,
        }
    }

    /// Builds a tuple from a non-empty list, inferring the shape.
    pub fn from_matrices(matrices: Vec<Matrix>) -> Self {
        let first = matrices
            .first()
            .expect("from_matrices needs at least one matrix");
        MatrixTuple::new(first.field(), first.rows(), first.cols(), matrices)
    }

    pub fn zeros(field: FieldDescriptor, m: usize, p: usize, q: usize) -> Self {
        MatrixTuple::new(
            field,
            p,
            q,
            (0..m).map(|_| Matrix::zeros(field, p, q)).collect(),
        )
    }

    pub fn random<R: Rng + ?Sized>(
        field: FieldDescriptor,
        m: usize,
        p: usize,
        q: usize,
        rng: &mut R,
        bound: i64,
    ) -> Self {
        MatrixTuple::new(
            field,
            p,
            q,
            (0..m)
                .map(|_| Matrix::random(field, p, q, rng, bound))
                .collect(),
        )
    }

    pub fn field(&self) -> FieldDescriptor {
        self.field
    }

    /// Number of matrices in the tuple.
    pub fn len(&self) -> usize {
        self.matrices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.matrices.is_empty()
    }

    pub fn p(&self) -> usize {
        self.p
    }

    pub fn q(&self) -> usize {
        self.q
    }

    pub fn is_square(&self) -> bool {
        self.p == self.q
    }

    /// Side length of a square tuple.
    pub fn n(&self) -> usize {
        assert!(self.is_square(), "n() requires a square tuple");
        self.p
    }

    pub fn matrix(&self, i: usize) -> &Matrix {
        &self.matrices[i]
    }

    pub fn matrices(&self) -> &[Matrix] {
        &self.matrices
    }

    pub fn iter(&self) -> std::slice::Iter<'_, Matrix> {
        self.matrices.iter()
    }

    pub fn is_zero(&self) -> bool {
        self.matrices.iter().all(Matrix::is_zero)
    }

    /// The subtuple `(A_{i})_{i∈indices}`, in the given order.
    pub fn subset(&self, indices: &[usize]) -> MatrixTuple {
        MatrixTuple::new(
            self.field,
            self.p,
            self.q,
            indices.iter().map(|&i| self.matrices[i].clone()).collect(),
        )
    }

    /// Coordinate-wise direct sum `(Aᵢ ⊕ Bᵢ)ᵢ`.
    pub fn direct_sum(&self, other: &MatrixTuple) -> MatrixTuple {
        assert_eq!(self.len(), other.len(), "tuples must have the same length");
        assert_eq!(self.field, other.field, "tuples must share the field");
        MatrixTuple::new(
            self.field,
            self.p + other.p,
            self.q + other.q,
            self.matrices
                .iter()
                .zip(&other.matrices)
                .map(|(a, b)| a.direct_sum(b))
                .collect(),
        )
    }

    /// Simultaneous conjugation `(g·Aᵢ·g⁻¹)ᵢ`; fails when `g` is singular.
    pub fn conjugate(&self, g: &Matrix) -> Result<MatrixTuple> {
        assert!(self.is_square(), "conjugation requires a square tuple");
        let inv = g.invert()?;
        Ok(MatrixTuple::new(
            self.field,
            self.p,
            self.q,
            self.matrices.iter().map(|a| g.mul(a).mul(&inv)).collect(),
        ))
    }

    /// Left-right translate `(l·Aᵢ·r)ᵢ`.
    pub fn left_right(&self, l: &Matrix, r: &Matrix) -> MatrixTuple {
        MatrixTuple::new(
            self.field,
            l.rows(),
            r.cols(),
            self.matrices.iter().map(|a| l.mul(a).mul(r)).collect(),
        )
    }

    /// Scalar multiple `(λ·Aᵢ)ᵢ`.
    pub fn scale(&self, s: &Scalar) -> MatrixTuple {
        MatrixTuple::new(
            self.field,
            self.p,
            self.q,
            self.matrices.iter().map(|a| a.scale(s)).collect(),
        )
    }

    pub fn transpose_each(&self) -> MatrixTuple {
        MatrixTuple::new(
            self.field,
            self.q,
            self.p,
            self.matrices.iter().map(Matrix::transpose).collect(),
        )
    }

    pub fn conj_transpose_each(&self) -> MatrixTuple {
        MatrixTuple::new(
            self.field,
            self.q,
            self.p,
            self.matrices.iter().map(Matrix::conj_transpose).collect(),
        )
    }

    /// The `m·p × q` vertical stack `(A₁; …; Aₘ)`.
    pub fn vstack_all(&self) -> Matrix {
        let mut out = Matrix::zeros(self.field, self.len() * self.p, self.q);
        for (i, a) in self.matrices.iter().enumerate() {
            out.set_block(i * self.p, 0, a);
        }
        out
    }
}

/// An affine linear matrix pencil `L = T₀ + x₁T₁ + ⋯ + xₘTₘ` with square
/// coefficients of one common size.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LinearPencil {
    size: usize,
    /// `mats[0] = T₀`, `mats[i] = Tᵢ`.
    mats: Vec<Matrix>,
}

impl LinearPencil {
    /// Builds a pencil from `T₀, T₁, …, Tₘ` (at least the constant term).
    pub fn new(mats: Vec<Matrix>) -> Self {
        let first = mats
            .first()
            .expect("a pencil needs at least a constant term");
        let size = first.rows();
        for t in &mats {
            assert!(
                t.is_square() && t.rows() == size,
                "coefficients must be square, same size"
            );
            assert_eq!(
                t.field(),
                first.field(),
                "coefficients must share the field"
            );
        }
        LinearPencil { size, mats }
    }

    /// Coefficient size d′.
    pub fn size(&self) -> usize {
        self.size
    }

    /// Number of variables m (the constant term does not count).
    pub fn num_vars(&self) -> usize {
        self.mats.len() - 1
    }

    pub fn field(&self) -> FieldDescriptor {
        self.mats[0].field()
    }

    /// `t(0) = T₀`; `t(i) = Tᵢ`.
    pub fn t(&self, i: usize) -> &Matrix {
        &self.mats[i]
    }

    pub fn coefficients(&self) -> &[Matrix] {
        &self.mats
    }

    /// Evaluates `L(A) = I_n⊗T₀ + Σᵢ Aᵢ⊗Tᵢ` for a square tuple `A` of
    /// matching length; the result is square of size `n·d′`.
    pub fn evaluate(&self, a: &MatrixTuple) -> Result<Matrix> {
        if !a.is_square() {
            return Err(Error::NotSquare(format!(
                "{}×{} tuple in pencil evaluation",
                a.p(),
                a.q()
            )));
        }
        if a.field() != self.field() {
            return Err(Error::FieldMismatch(self.field().name(), a.field().name()));
        }
        if a.len() != self.num_vars() {
            return Err(Error::DimensionMismatch(format!(
                "pencil has {} variables but tuple has {} matrices",
                self.num_vars(),
                a.len()
            )));
        }
        let n = a.n();
        let mut acc = Matrix::identity(self.field(), n).kron(&self.mats[0]);
        for (i, ai) in a.iter().enumerate() {
            acc = acc.add(&ai.kron(&self.mats[i + 1]));
        }
        Ok(acc)
    }
}

/// A homogeneous rectangular pencil `x₁T₁ + ⋯ + xₘTₘ`: coefficients of one
/// common shape `r×c` and no constant term.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RectPencil {
    field: FieldDescriptor,
    r: usize,
    c: usize,
    mats: Vec<Matrix>,
}

impl RectPencil {
    pub fn new(field: FieldDescriptor, r: usize, c: usize, mats: Vec<Matrix>) -> Self {
        for t in &mats {
            assert_eq!(
                (t.rows(), t.cols()),
                (r, c),
                "coefficients must share the shape"
            );
            assert_eq!(t.field(), field, "coefficients must share the field");
        }
        RectPencil { field, r, c, mats }
    }

    pub fn field(&self) -> FieldDescriptor {
        self.field
    }

    pub fn num_vars(&self) -> usize {
        self.mats.len()
    }

    pub fn rows(&self) -> usize {
        self.r
    }

    pub fn cols(&self) -> usize {
        self.c
    }

    /// `t(i) = Tᵢ₊₁` (0-based; there is no constant term).
    pub fn t(&self, i: usize) -> &Matrix {
        &self.mats[i]
    }

    pub fn coefficients(&self) -> &[Matrix] {
        &self.mats
    }

    /// Evaluates `Σᵢ Aᵢ⊗Tᵢ`, a `p·r × q·c` matrix.
    pub fn evaluate(&self, a: &MatrixTuple) -> Result<Matrix> {
        if a.field() != self.field {
            return Err(Error::FieldMismatch(self.field.name(), a.field().name()));
        }
        if a.len() != self.num_vars() {
            return Err(Error::DimensionMismatch(format!(
                "homogeneous pencil has {} variables but tuple has {} matrices",
                self.num_vars(),
                a.len()
            )));
        }
        let mut acc = Matrix::zeros(self.field, a.p() * self.r, a.q() * self.c);
        for (i, ai) in a.iter().enumerate() {
            acc = acc.add(&ai.kron(&self.mats[i]));
        }
        Ok(acc)
    }
}

/// The perfect-shuffle (commutation) permutation `K_{a,b} ∈ Mat_{ab}` with
/// `K·e_{i·b+j} = e_{j·a+i}` for `i < a`, `j < b`. For `A ∈ Mat_{a₁,a₂}` and
/// `B ∈ Mat_{b₁,b₂}`,
/// `B⊗A = K_{a₁,b₁} · (A⊗B) · K_{a₂,b₂}ᵗ`,
/// so both tensor orders have equal ranks.
pub fn commutation_matrix(field: FieldDescriptor, a: usize, b: usize) -> Matrix {
    let mut k = Matrix::zeros(field, a * b, a * b);
    for i in 0..a {
        for j in 0..b {
            k.set(j * a + i, i * b + j, field.one());
        }
    }
    k
}

/// Builds the similarity-action witness pencil of a square candidate tuple
/// `C ∈ Mat_t^m`: size `m·t`, with
/// `T₀ = −Σⱼ (eⱼe₁ᵗ)⊗Cⱼᵗ` and `Tᵢ = (eᵢe₁ᵗ)⊗I_t`.
///
/// Contract: for every square tuple `X` of size `n` over the same field,
/// `rank L(X) = t·n − dimHom(M_C, M_X)`, so the pencil separates any two
/// tuples with different hom dimensions from `M_C`. Coefficients are kept at
/// size `m·t` (no zero-padding to the evaluated tuple's size): padding by
/// zero blocks never changes evaluation ranks.
pub fn witness_from_module_sim(c: &MatrixTuple) -> LinearPencil {
    assert!(c.is_square(), "candidate tuple must be square");
    assert!(
        !c.is_empty(),
        "candidate tuple must have at least one matrix"
    );
    let field = c.field();
    let (m, t) = (c.len(), c.n());
    let mut t0 = Matrix::zeros(field, m * t, m * t);
    for (j, cj) in c.iter().enumerate() {
        let unit = Matrix::basis(field, m, m, j, 0);
        t0 = t0.sub(&unit.kron(&cj.transpose()));
    }
    let mut mats = vec![t0];
    for i in 0..m {
        mats.push(Matrix::basis(field, m, m, i, 0).kron(&Matrix::identity(field, t)));
    }
    LinearPencil::new(mats)
}

/// Builds the left-right-action witness pencil of a candidate tuple
/// `C ∈ Mat_{r,s}^m`: with `(Qf, ·, rk)` the rank normal form of the stacked
/// `−Cᵢᵗ` blocks (an `ms×r` matrix), the coefficients are
/// `Tᵢ = rows rk…ms of Qf·(eᵢ⊗I_s)`, each of shape `(ms−rk)×s`.
///
/// Contract: for every `p×q` tuple `X` over the same field,
/// `rank(Σ Xᵢ⊗Tᵢ) = q·s − dimHom(N_C, N_X)`.
///
/// The contract requires the stacked block to have full column rank `r`
/// (otherwise the evaluation rank is off by `p·(r − rk)`); rank-deficient
/// stacks — the zero tuple, or any tuple whose columns do not span — are
/// rejected with [`Error::ZeroModule`]. Candidates with `r = 0` are fine:
/// they yield `Tᵢ = eᵢ⊗I_s` and the contract still holds.
pub fn witness_from_module_lr(c: &MatrixTuple) -> Result<RectPencil> {
    assert!(
        !c.is_empty(),
        "candidate tuple must have at least one matrix"
    );
    let field = c.field();
    let (m, r, s) = (c.len(), c.p(), c.q());
    let stacked = c.transpose_each().vstack_all().neg();
    debug_assert_eq!((stacked.rows(), stacked.cols()), (m * s, r));
    let (qf, _pf, rk) = stacked.rank_normal_form();
    if rk < r {
        return Err(Error::ZeroModule);
    }
    // Qf·(eᵢ⊗I_s) is exactly the i-th s-column slab of Qf.
    let mats = (0..m)
        .map(|i| qf.submatrix(rk, m * s, i * s, (i + 1) * s))
        .collect();
    Ok(RectPencil::new(field, m * s - rk, s, mats))
}

/// One sampled pencil whose evaluation ranks on the two tuples differ.
#[derive(Clone, Debug)]
pub struct RankViolation {
    pub pencil: LinearPencil,
    pub rank_a: usize,
    pub rank_b: usize,
}

/// Result of sampled rank-equality testing. An empty violation list is
/// evidence, not proof, that all pencil ranks agree.
#[derive(Clone, Debug)]
pub struct RankSampleReport {
    pub trials: usize,
    pub violations: Vec<RankViolation>,
}

/// Samples `trials` random pencils of sizes `1..=max_size` and reports every
/// pencil whose evaluation ranks on `A` and `B` differ. Deterministic in
/// `seed`.
///
/// Entries are drawn from the fixed small range {−3,…,3}, but each entry is
/// zeroed with probability 2/3. The bias is essential: a pencil with an
/// invertible constant term evaluates to full rank on *every* tuple, so
/// rank-disparity witnesses live on a proper subvariety that uniform dense
/// sampling misses almost surely; sparse sampling concentrates on the
/// degenerate stratum where witnesses exist.
pub fn rank_equality_sample(
    a: &MatrixTuple,
    b: &MatrixTuple,
    max_size: usize,
    trials: usize,
    seed: u64,
) -> RankSampleReport {
    assert_eq!(a.len(), b.len(), "tuples must have the same length");
    assert!(
        a.is_square() && b.is_square(),
        "sampled pencils act on square tuples"
    );
    assert!(max_size >= 1);
    let field = a.field();
    assert_eq!(field, b.field(), "tuples must share the field");
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut violations = Vec::new();
    for _ in 0..trials {
        let d = rng.gen_range(1..=max_size);
        let mats: Vec<Matrix> = (0..=a.len())
            .map(|_| {
                Matrix::from_fn(field, d, d, |_, _| {
                    if rng.gen_range(0..3) > 0 {
                        field.zero()
                    } else {
                        field.random_scalar(&mut rng, 3)
                    }
                })
            })
            .collect();
        let pencil = LinearPencil::new(mats);
        let rank_a = pencil.evaluate(a).expect("shapes agree").rank();
        let rank_b = pencil.evaluate(b).expect("shapes agree").rank();
        if rank_a != rank_b {
            violations.push(RankViolation {
                pencil,
                rank_a,
                rank_b,
            });
        }
    }
    RankSampleReport { trials, violations }
}

/// Greedily selects (in index order) the indices of a basis of
/// `span(A₁, …, Aₘ)`. The returned index list has at most `p·q` entries,
/// and every omitted matrix is a linear combination of the selected ones.
/// Indices are 0-based.
pub fn select_spanning_subset(a: &MatrixTuple) -> Vec<usize> {
    // Reduced vectors of already-selected matrices with their pivot positions.
    let mut reduced: Vec<(usize, Vec<Scalar>)> = Vec::new();
    let mut chosen = Vec::new();
    for (idx, mat) in a.iter().enumerate() {
        let mut v: Vec<Scalar> = Vec::with_capacity(a.p() * a.q());
        for j in 0..mat.cols() {
            for i in 0..mat.rows() {
                v.push(mat.at(i, j).clone());
            }
        }
        for (pivot, row) in &reduced {
            if v[*pivot].is_zero() {
                continue;
            }
            let f = v[*pivot].clone();
            for (x, y) in v.iter_mut().zip(row) {
                *x = x.sub(&f.mul(y));
            }
        }
        if let Some(pivot) = v.iter().position(|x| !x.is_zero()) {
            let inv = v[pivot].inv();
            for x in v.iter_mut() {
                *x = x.mul(&inv);
            }
            reduced.push((pivot, v));
            chosen.push(idx);
        }
    }
    chosen
}
