//! Dense exact matrices: rank, kernel, solve, determinant, inverse,
//! Kronecker products, direct sums, and rank normal form.
//!
//! Two independent elimination routes are maintained. Fraction-free
//! elimination (one-step Bareiss, after clearing row denominators) is the
//! default for rank and determinant over ℚ and ℚ[i], where it keeps every
//! intermediate entry an integer minor of the input; plain reduced echelon
//! with unit pivots is the default over 𝔽_p and backs kernels, solving, and
//! transforms everywhere. Pivots are always the first nonzero entry in scan
//! order, so all outputs are deterministic.

use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Zero};
use rand::Rng;

use crate::error::{Error, Result};
use crate::field::{FieldDescriptor, Scalar};
use crate::poly::UniPoly;

/// A dense row-major matrix over one of the supported fields.
///
/// Zero row or column counts are legal (they arise as kernels of injective
/// maps and as terminal modules in filtration chains).
#[derive(Clone, PartialEq, Eq)]
pub struct Matrix {
    field: FieldDescriptor,
    rows: usize,
    cols: usize,
    data: Vec<Scalar>,
}

/// Outcome of solving `M·x = b`: a particular solution together with a
/// kernel basis spanning the full affine solution space, or a proof-free
/// report that no solution exists.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum SolveOutcome {
    Solution { particular: Matrix, kernel: Matrix },
    Inconsistent,
}

impl Matrix {
    pub fn new(field: FieldDescriptor, rows: usize, cols: usize, data: Vec<Scalar>) -> Self {
        assert_eq!(data.len(), rows * cols, "entry count must equal rows*cols");
        Matrix {
            field,
            rows,
            cols,
            data,
        }
    }

    pub fn zeros(field: FieldDescriptor, rows: usize, cols: usize) -> Self {
        Matrix {
            field,
            rows,
            cols,
            data: vec![field.zero(); rows * cols],
        }
    }

    pub fn identity(field: FieldDescriptor, n: usize) -> Self {
        let mut m = Matrix::zeros(field, n, n);
        for i in 0..n {
            m.set(i, i, field.one());
        }
        m
    }

    pub fn from_fn(
        field: FieldDescriptor,
        rows: usize,
        cols: usize,
        mut f: impl FnMut(usize, usize) -> Scalar,
    ) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                data.push(f(i, j));
            }
        }
        Matrix::new(field, rows, cols, data)
    }

    /// The matrix unit `e_i e_jᵗ` of the given shape.
    pub fn basis(field: FieldDescriptor, rows: usize, cols: usize, i: usize, j: usize) -> Self {
        let mut m = Matrix::zeros(field, rows, cols);
        m.set(i, j, field.one());
        m
    }

    /// Fixture helper: builds a matrix from integer rows.
    pub fn from_i64_rows(field: FieldDescriptor, rows: &[&[i64]]) -> Self {
        let r = rows.len();
        let c = rows.first().map(|row| row.len()).unwrap_or(0);
        let mut data = Vec::with_capacity(r * c);
        for row in rows {
            assert_eq!(row.len(), c, "ragged rows");
            data.extend(row.iter().map(|&v| field.from_i64(v)));
        }
        Matrix::new(field, r, c, data)
    }

    /// Random matrix with entries drawn by the field's scalar sampler.
    pub fn random<R: Rng + ?Sized>(
        field: FieldDescriptor,
        rows: usize,
        cols: usize,
        rng: &mut R,
        bound: i64,
    ) -> Self {
        let data = (0..rows * cols)
            .map(|_| field.random_scalar(rng, bound))
            .collect();
        Matrix::new(field, rows, cols, data)
    }

    pub fn field(&self) -> FieldDescriptor {
        self.field
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn at(&self, i: usize, j: usize) -> &Scalar {
        debug_assert!(i < self.rows && j < self.cols);
        &self.data[i * self.cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: Scalar) {
        debug_assert!(i < self.rows && j < self.cols);
        self.data[i * self.cols + j] = v;
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(Scalar::is_zero)
    }

    pub fn is_identity(&self) -> bool {
        self.is_square()
            && (0..self.rows).all(|i| {
                (0..self.cols).all(|j| {
                    if i == j {
                        self.at(i, j).is_one()
                    } else {
                        self.at(i, j).is_zero()
                    }
                })
            })
    }

    pub fn transpose(&self) -> Matrix {
        Matrix::from_fn(self.field, self.cols, self.rows, |i, j| {
            self.at(j, i).clone()
        })
    }

    /// Conjugate transpose (plain transpose over fields without conjugation).
    pub fn conj_transpose(&self) -> Matrix {
        Matrix::from_fn(self.field, self.cols, self.rows, |i, j| {
            self.at(j, i).conj()
        })
    }

    pub fn add(&self, other: &Matrix) -> Matrix {
        self.check_same_shape(other);
        let data = self
            .data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| a.add(b))
            .collect();
        Matrix::new(self.field, self.rows, self.cols, data)
    }

    pub fn sub(&self, other: &Matrix) -> Matrix {
        self.check_same_shape(other);
        let data = self
            .data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| a.sub(b))
            .collect();
        Matrix::new(self.field, self.rows, self.cols, data)
    }

    pub fn neg(&self) -> Matrix {
        Matrix::new(
            self.field,
            self.rows,
            self.cols,
            self.data.iter().map(Scalar::neg).collect(),
        )
    }

    pub fn scale(&self, s: &Scalar) -> Matrix {
        Matrix::new(
            self.field,
            self.rows,
            self.cols,
            self.data.iter().map(|a| a.mul(s)).collect(),
        )
    }

    pub fn mul(&self, other: &Matrix) -> Matrix {
        assert_eq!(self.cols, other.rows, "inner dimensions must agree");
        assert_eq!(self.field, other.field, "fields must agree");
        let mut out = Matrix::zeros(self.field, self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.at(i, k);
                if a.is_zero() {
                    continue;
                }
                for j in 0..other.cols {
                    let b = other.at(k, j);
                    if b.is_zero() {
                        continue;
                    }
                    let v = out.at(i, j).add(&a.mul(b));
                    out.set(i, j, v);
                }
            }
        }
        out
    }

    pub fn trace(&self) -> Scalar {
        assert!(self.is_square(), "trace of a non-square matrix");
        let mut t = self.field.zero();
        for i in 0..self.rows {
            t = t.add(self.at(i, i));
        }
        t
    }

    pub fn hstack(&self, other: &Matrix) -> Matrix {
        assert_eq!(self.rows, other.rows, "row counts must agree");
        assert_eq!(self.field, other.field, "fields must agree");
        Matrix::from_fn(self.field, self.rows, self.cols + other.cols, |i, j| {
            if j < self.cols {
                self.at(i, j).clone()
            } else {
                other.at(i, j - self.cols).clone()
            }
        })
    }

    pub fn vstack(&self, other: &Matrix) -> Matrix {
        assert_eq!(self.cols, other.cols, "column counts must agree");
        assert_eq!(self.field, other.field, "fields must agree");
        Matrix::from_fn(self.field, self.rows + other.rows, self.cols, |i, j| {
            if i < self.rows {
                self.at(i, j).clone()
            } else {
                other.at(i - self.rows, j).clone()
            }
        })
    }

    /// The block `self[r0..r1, c0..c1]`.
    pub fn submatrix(&self, r0: usize, r1: usize, c0: usize, c1: usize) -> Matrix {
        assert!(r0 <= r1 && r1 <= self.rows && c0 <= c1 && c1 <= self.cols);
        Matrix::from_fn(self.field, r1 - r0, c1 - c0, |i, j| {
            self.at(r0 + i, c0 + j).clone()
        })
    }

    pub fn column(&self, j: usize) -> Matrix {
        self.submatrix(0, self.rows, j, j + 1)
    }

    /// Overwrites the block with top-left corner `(i0, j0)`.
    pub fn set_block(&mut self, i0: usize, j0: usize, block: &Matrix) {
        assert!(i0 + block.rows <= self.rows && j0 + block.cols <= self.cols);
        for i in 0..block.rows {
            for j in 0..block.cols {
                self.set(i0 + i, j0 + j, block.at(i, j).clone());
            }
        }
    }

    pub fn direct_sum(&self, other: &Matrix) -> Matrix {
        assert_eq!(self.field, other.field, "fields must agree");
        let mut out = Matrix::zeros(self.field, self.rows + other.rows, self.cols + other.cols);
        out.set_block(0, 0, self);
        out.set_block(self.rows, self.cols, other);
        out
    }

    /// Kronecker product: `(M⊗N)(i·r+k, j·c+l) = M(i,j)·N(k,l)` for N of
    /// shape r×c.
    pub fn kron(&self, other: &Matrix) -> Matrix {
        assert_eq!(self.field, other.field, "fields must agree");
        let (r, c) = (other.rows, other.cols);
        Matrix::from_fn(self.field, self.rows * r, self.cols * c, |i, j| {
            self.at(i / r, j / c).mul(other.at(i % r, j % c))
        })
    }

    /// Column-major vectorization: stacks the columns into one column.
    pub fn vec_col(&self) -> Matrix {
        Matrix::from_fn(self.field, self.rows * self.cols, 1, |k, _| {
            self.at(k % self.rows, k / self.rows).clone()
        })
    }

    /// Inverse of [`Matrix::vec_col`] for a vector of length rows·cols.
    pub fn unvec_col(v: &Matrix, rows: usize, cols: usize) -> Matrix {
        assert_eq!(v.cols, 1, "expected a column vector");
        assert_eq!(v.rows, rows * cols, "vector length must equal rows*cols");
        Matrix::from_fn(v.field, rows, cols, |i, j| v.at(j * rows + i, 0).clone())
    }

    fn check_same_shape(&self, other: &Matrix) {
        assert_eq!(self.field, other.field, "fields must agree");
        assert_eq!(
            (self.rows, self.cols),
            (other.rows, other.cols),
            "shapes must agree"
        );
    }

    // -----------------------------------------------------------------------
    // Elimination
    // -----------------------------------------------------------------------

    /// Exact rank. Over ℚ and ℚ[i] this runs fraction-free elimination on a
    /// denominator-cleared copy; over 𝔽_p it runs plain echelon reduction.
    pub fn rank(&self) -> usize {
        match self.field {
            FieldDescriptor::PrimeField(_) => self.rank_via_echelon(),
            _ => self.rank_via_fraction_free(),
        }
    }

    /// Rank by plain reduced echelon form (unit pivots). Kept public as the
    /// independent cross-check route for the fraction-free eliminator.
    pub fn rank_via_echelon(&self) -> usize {
        self.rref_with_transform().2.len()
    }

    /// Rank by one-step fraction-free (Bareiss) elimination with row
    /// denominators cleared first, so every intermediate entry over ℚ and
    /// ℚ[i] is an integer (resp. Gaussian-integer) minor of the input.
    pub fn rank_via_fraction_free(&self) -> usize {
        let (mut m, _) = self.cleared_rows();
        let mut prev = self.field.one();
        let mut rank = 0;
        for col in 0..m.cols {
            if rank == m.rows {
                break;
            }
            let Some(p) = (rank..m.rows).find(|&r| !m.at(r, col).is_zero()) else {
                continue;
            };
            m.swap_rows(rank, p);
            let pivot = m.at(rank, col).clone();
            for i in rank + 1..m.rows {
                let head = m.at(i, col).clone();
                for j in col + 1..m.cols {
                    let v = m
                        .at(i, j)
                        .mul(&pivot)
                        .sub(&head.mul(m.at(rank, j)))
                        .div(&prev);
                    m.set(i, j, v);
                }
                m.set(i, col, self.field.zero());
            }
            prev = pivot;
            rank += 1;
        }
        rank
    }

    fn swap_rows(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for j in 0..self.cols {
            self.data.swap(a * self.cols + j, b * self.cols + j);
        }
    }

    /// Scales each row by a positive integer clearing all denominators
    /// (identity over 𝔽_p); returns the scaled matrix and per-row factors.
    fn cleared_rows(&self) -> (Matrix, Vec<BigInt>) {
        if matches!(self.field, FieldDescriptor::PrimeField(_)) {
            return (self.clone(), vec![BigInt::one(); self.rows]);
        }
        let mut out = self.clone();
        let mut factors = Vec::with_capacity(self.rows);
        for i in 0..self.rows {
            let mut lcm = BigInt::one();
            for j in 0..self.cols {
                match self.at(i, j) {
                    Scalar::Rat(r) => lcm = lcm.lcm(r.denom()),
                    Scalar::Gauss(re, im) => {
                        lcm = lcm.lcm(re.denom());
                        lcm = lcm.lcm(im.denom());
                    }
                    Scalar::Mod(..) => unreachable!(),
                }
            }
            if !lcm.is_one() {
                let s = Scalar::Rat(BigRational::from(lcm.clone()));
                let s = if self.field == FieldDescriptor::GaussianRationals {
                    Scalar::Gauss(BigRational::from(lcm.clone()), BigRational::zero())
                } else {
                    s
                };
                for j in 0..self.cols {
                    let v = out.at(i, j).mul(&s);
                    out.set(i, j, v);
                }
            }
            factors.push(lcm);
        }
        (out, factors)
    }

    /// Reduced row echelon form with transform: returns `(R, T, pivots)`
    /// with `T` invertible, `T·M = R`, and `pivots` the pivot columns in
    /// increasing order. Pivot choice is the first nonzero entry in scan
    /// order.
    pub fn rref_with_transform(&self) -> (Matrix, Matrix, Vec<usize>) {
        let mut r = self.clone();
        let mut t = Matrix::identity(self.field, self.rows);
        let mut pivots = Vec::new();
        let mut pr = 0;
        for col in 0..self.cols {
            if pr == self.rows {
                break;
            }
            let Some(p) = (pr..self.rows).find(|&i| !r.at(i, col).is_zero()) else {
                continue;
            };
            r.swap_rows(pr, p);
            t.swap_rows(pr, p);
            let inv = r.at(pr, col).inv();
            for j in 0..self.cols {
                let v = r.at(pr, j).mul(&inv);
                r.set(pr, j, v);
            }
            for j in 0..self.rows {
                let v = t.at(pr, j).mul(&inv);
                t.set(pr, j, v);
            }
            for i in 0..self.rows {
                if i == pr || r.at(i, col).is_zero() {
                    continue;
                }
                let f = r.at(i, col).clone();
                for j in 0..self.cols {
                    let v = r.at(i, j).sub(&f.mul(r.at(pr, j)));
                    r.set(i, j, v);
                }
                for j in 0..self.rows {
                    let v = t.at(i, j).sub(&f.mul(t.at(pr, j)));
                    t.set(i, j, v);
                }
            }
            pivots.push(col);
            pr += 1;
        }
        (r, t, pivots)
    }

    /// Basis of the right kernel, as the columns of the returned matrix
    /// (shape cols × (cols − rank)).
    pub fn kernel_basis(&self) -> Matrix {
        let (r, _, pivots) = self.rref_with_transform();
        let rank = pivots.len();
        let free: Vec<usize> = (0..self.cols).filter(|c| !pivots.contains(c)).collect();
        let mut k = Matrix::zeros(self.field, self.cols, free.len());
        for (idx, &f) in free.iter().enumerate() {
            k.set(f, idx, self.field.one());
            for (row, &p) in pivots.iter().enumerate().take(rank) {
                k.set(p, idx, r.at(row, f).neg());
            }
        }
        debug_assert!(self.mul(&k).is_zero());
        k
    }

    /// Solves `M·x = b` (any number of right-hand columns). Returns a
    /// particular solution and the kernel basis of `M`, or `Inconsistent`.
    pub fn solve(&self, b: &Matrix) -> Result<SolveOutcome> {
        if b.rows != self.rows {
            return Err(Error::DimensionMismatch(format!(
                "solve: {} equation rows vs {} right-hand rows",
                self.rows, b.rows
            )));
        }
        if b.field != self.field {
            return Err(Error::FieldMismatch(self.field.name(), b.field.name()));
        }
        let (r, t, pivots) = self.rref_with_transform();
        let c = t.mul(b);
        for i in pivots.len()..self.rows {
            for j in 0..c.cols {
                if !c.at(i, j).is_zero() {
                    return Ok(SolveOutcome::Inconsistent);
                }
            }
        }
        let mut x = Matrix::zeros(self.field, self.cols, b.cols);
        for (row, &p) in pivots.iter().enumerate() {
            for j in 0..c.cols {
                x.set(p, j, c.at(row, j).clone());
            }
        }
        debug_assert_eq!(self.mul(&x), *b);
        let _ = r;
        Ok(SolveOutcome::Solution {
            particular: x,
            kernel: self.kernel_basis(),
        })
    }

    /// Determinant of a square matrix. Fraction-free elimination over ℚ and
    /// ℚ[i] (after clearing row denominators, dividing the cleared factors
    /// back out); plain elimination over 𝔽_p.
    pub fn det(&self) -> Scalar {
        assert!(self.is_square(), "determinant of a non-square matrix");
        let n = self.rows;
        if n == 0 {
            return self.field.one();
        }
        match self.field {
            FieldDescriptor::PrimeField(_) => self.det_plain(),
            _ => {
                let (m, factors) = self.cleared_rows();
                let d = m.det_fraction_free();
                let mut denom = BigInt::one();
                for f in &factors {
                    denom *= f;
                }
                let denom = if self.field == FieldDescriptor::GaussianRationals {
                    Scalar::Gauss(BigRational::from(denom), BigRational::zero())
                } else {
                    Scalar::Rat(BigRational::from(denom))
                };
                d.div(&denom)
            }
        }
    }

    fn det_fraction_free(&self) -> Scalar {
        let n = self.rows;
        let mut m = self.clone();
        let mut prev = self.field.one();
        let mut sign_flip = false;
        for k in 0..n {
            let Some(p) = (k..n).find(|&r| !m.at(r, k).is_zero()) else {
                return self.field.zero();
            };
            if p != k {
                m.swap_rows(k, p);
                sign_flip = !sign_flip;
            }
            let pivot = m.at(k, k).clone();
            for i in k + 1..n {
                let head = m.at(i, k).clone();
                for j in k + 1..n {
                    let v = m.at(i, j).mul(&pivot).sub(&head.mul(m.at(k, j))).div(&prev);
                    m.set(i, j, v);
                }
                m.set(i, k, self.field.zero());
            }
            prev = pivot;
        }
        let d = m.at(n - 1, n - 1).clone();
        if sign_flip {
            d.neg()
        } else {
            d
        }
    }

    fn det_plain(&self) -> Scalar {
        let n = self.rows;
        let mut m = self.clone();
        let mut det = self.field.one();
        for k in 0..n {
            let Some(p) = (k..n).find(|&r| !m.at(r, k).is_zero()) else {
                return self.field.zero();
            };
            if p != k {
                m.swap_rows(k, p);
                det = det.neg();
            }
            let pivot = m.at(k, k).clone();
            det = det.mul(&pivot);
            let inv = pivot.inv();
            for i in k + 1..n {
                let f = m.at(i, k).mul(&inv);
                if f.is_zero() {
                    continue;
                }
                for j in k..n {
                    let v = m.at(i, j).sub(&f.mul(m.at(k, j)));
                    m.set(i, j, v);
                }
            }
        }
        det
    }

    /// Exact inverse; fails on singular (or non-square) input.
    pub fn invert(&self) -> Result<Matrix> {
        if !self.is_square() {
            return Err(Error::NotSquare(format!("{}×{}", self.rows, self.cols)));
        }
        let (_, t, pivots) = self.rref_with_transform();
        if pivots.len() < self.rows {
            return Err(Error::SingularMatrix);
        }
        debug_assert!(self.mul(&t).is_identity());
        Ok(t)
    }

    /// Invertible `Q`, `P` with `Q·M·P = diag(I_r, 0)`, `r = rank(M)`.
    pub fn rank_normal_form(&self) -> (Matrix, Matrix, usize) {
        let (r, q, pivots) = self.rref_with_transform();
        let rank = pivots.len();
        let free: Vec<usize> = (0..self.cols).filter(|c| !pivots.contains(c)).collect();
        // Permutation sending position k to the k-th pivot (then free) column.
        let mut perm = Matrix::zeros(self.field, self.cols, self.cols);
        for (k, &c) in pivots.iter().chain(free.iter()).enumerate() {
            perm.set(c, k, self.field.one());
        }
        // After permuting, R·perm = [I_r, N; 0, 0]; clear N with a
        // block-unitriangular right factor.
        let rp = r.mul(&perm);
        let mut clear = Matrix::identity(self.field, self.cols);
        for i in 0..rank {
            for j in rank..self.cols {
                clear.set(i, j, rp.at(i, j).neg());
            }
        }
        let p = perm.mul(&clear);
        debug_assert!({
            let prod = q.mul(self).mul(&p);
            let mut expect = Matrix::zeros(self.field, self.rows, self.cols);
            for i in 0..rank {
                expect.set(i, i, self.field.one());
            }
            prod == expect
        });
        (q, p, rank)
    }

    // -----------------------------------------------------------------------
    // Polynomial interaction
    // -----------------------------------------------------------------------

    /// Evaluates `p(self)` by Horner's rule.
    pub fn apply_poly(&self, p: &UniPoly) -> Matrix {
        assert!(self.is_square(), "polynomial of a non-square matrix");
        assert_eq!(self.field, p.field(), "fields must agree");
        let mut acc = Matrix::zeros(self.field, self.rows, self.rows);
        for c in p.coeffs().iter().rev() {
            acc = acc.mul(self);
            for i in 0..self.rows {
                let v = acc.at(i, i).add(c);
                acc.set(i, i, v);
            }
        }
        acc
    }

    /// Monic minimal polynomial, by finding the first power that is a
    /// linear combination of the lower ones.
    pub fn min_poly(&self) -> UniPoly {
        assert!(
            self.is_square(),
            "minimal polynomial of a non-square matrix"
        );
        let n = self.rows;
        if n == 0 {
            return UniPoly::one(self.field);
        }
        let mut power = Matrix::identity(self.field, n);
        let mut stack = power.vec_col();
        loop {
            power = power.mul(self);
            let target = power.vec_col();
            if let SolveOutcome::Solution { particular, .. } =
                stack.solve(&target).expect("shapes agree by construction")
            {
                let k = stack.cols();
                let mut coeffs: Vec<Scalar> = (0..k).map(|j| particular.at(j, 0).neg()).collect();
                coeffs.push(self.field.one());
                let p = UniPoly::new(self.field, coeffs);
                debug_assert!(self.apply_poly(&p).is_zero());
                return p;
            }
            stack = stack.hstack(&target);
        }
    }
}

impl fmt::Display for Matrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[")?;
        for i in 0..self.rows {
            if i > 0 {
                write!(f, "; ")?;
            }
            for j in 0..self.cols {
                if j > 0 {
                    write!(f, ", ")?;
                }
                write!(f, "{}", self.at(i, j))?;
            }
        }
        write!(f, "]")
    }
}

impl fmt::Debug for Matrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}×{} {}", self.rows, self.cols, self)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    const Q: FieldDescriptor = FieldDescriptor::Rationals;

    fn f101() -> FieldDescriptor {
        FieldDescriptor::prime_field(101).unwrap()
    }

    #[test]
    fn rank_of_identity_and_zero() {
        assert_eq!(Matrix::identity(Q, 4).rank(), 4);
        assert_eq!(Matrix::zeros(Q, 3, 5).rank(), 0);
        assert_eq!(Matrix::zeros(Q, 0, 4).rank(), 0);
    }

    #[test]
    fn rank_of_carlson_first_coordinate() {
        // The 4×4 lower-triangular two-block shift matrix has rank 2.
        let b1 = Matrix::from_i64_rows(
            Q,
            &[&[0, 0, 0, 0], &[1, 0, 0, 0], &[0, 0, 0, 0], &[0, 0, 1, 0]],
        );
        assert_eq!(b1.rank(), 2);
        assert_eq!(b1.transpose().rank(), 2);
    }

    #[test]
    fn kernel_of_identity_is_empty() {
        let k = Matrix::identity(Q, 3).kernel_basis();
        assert_eq!((k.rows(), k.cols()), (3, 0));
    }

    #[test]
    fn kernel_of_row_of_ones() {
        let m = Matrix::from_i64_rows(Q, &[&[1, 1]]);
        let k = m.kernel_basis();
        assert_eq!((k.rows(), k.cols()), (2, 1));
        assert!(m.mul(&k).is_zero());
        // Proportional to (1, −1)ᵗ.
        assert_eq!(k.at(0, 0).neg(), *k.at(1, 0));
        assert!(!k.at(0, 0).is_zero());
    }

    #[test]
    fn kernel_of_zero_1x1_is_everything() {
        let m = Matrix::zeros(Q, 1, 1);
        assert_eq!(m.kernel_basis().cols(), 1);
    }

    #[test]
    fn solve_identity_and_inconsistent() {
        let b = Matrix::from_i64_rows(Q, &[&[5], &[-3]]);
        match Matrix::identity(Q, 2).solve(&b).unwrap() {
            SolveOutcome::Solution { particular, kernel } => {
                assert_eq!(particular, b);
                assert_eq!(kernel.cols(), 0);
            }
            SolveOutcome::Inconsistent => panic!("identity system must be solvable"),
        }
        let zero = Matrix::zeros(Q, 1, 1);
        let one = Matrix::from_i64_rows(Q, &[&[1]]);
        assert_eq!(zero.solve(&one).unwrap(), SolveOutcome::Inconsistent);
    }

    #[test]
    fn solve_rejects_mismatched_shapes() {
        let m = Matrix::identity(Q, 2);
        let b = Matrix::zeros(Q, 3, 1);
        assert!(matches!(m.solve(&b), Err(Error::DimensionMismatch(_))));
    }

    #[test]
    fn solve_scaled_trace_system() {
        // Stacked system [I; I]·x = [v; v] with v = vec(3·I₃) has the unique
        // solution x = v — the n=3 case of the scaling system with identity
        // coefficients.
        let n = 3;
        let id = Matrix::identity(Q, n * n);
        let m = id.vstack(&id);
        let v = Matrix::identity(Q, n)
            .scale(&Q.from_i64(n as i64))
            .vec_col();
        let b = v.vstack(&v);
        match m.solve(&b).unwrap() {
            SolveOutcome::Solution { particular, kernel } => {
                assert_eq!(particular, v);
                assert_eq!(kernel.cols(), 0);
                assert_eq!(
                    Matrix::unvec_col(&particular, n, n),
                    Matrix::identity(Q, n).scale(&Q.from_i64(3))
                );
            }
            SolveOutcome::Inconsistent => panic!("system is consistent"),
        }
    }

    #[test]
    fn kron_basics() {
        let i2 = Matrix::identity(Q, 2);
        let i3 = Matrix::identity(Q, 3);
        assert_eq!(i2.kron(&i3), Matrix::identity(Q, 6));

        let e11 = Matrix::basis(Q, 2, 2, 0, 0);
        let n = Matrix::from_i64_rows(Q, &[&[1, 2], &[3, 4]]);
        let k = e11.kron(&n);
        assert_eq!(k.submatrix(0, 2, 0, 2), n);
        assert!(k.submatrix(2, 4, 0, 4).is_zero());
        assert!(k.submatrix(0, 2, 2, 4).is_zero());
    }

    #[test]
    fn rank_normal_form_shapes() {
        // Invertible input: r = n and Q·M·P = I.
        let m = Matrix::from_i64_rows(Q, &[&[2, 1], &[1, 1]]);
        let (q, p, r) = m.rank_normal_form();
        assert_eq!(r, 2);
        assert!(q.mul(&m).mul(&p).is_identity());

        // Zero input: r = 0.
        let z = Matrix::zeros(Q, 2, 3);
        let (_, _, r) = z.rank_normal_form();
        assert_eq!(r, 0);

        // Random 3×5 of rank 2, built from two rank-one terms.
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let u1 = Matrix::random(Q, 3, 1, &mut rng, 3);
        let v1 = Matrix::random(Q, 1, 5, &mut rng, 3);
        let u2 = Matrix::random(Q, 3, 1, &mut rng, 3);
        let v2 = Matrix::random(Q, 1, 5, &mut rng, 3);
        let m = u1.mul(&v1).add(&u2.mul(&v2));
        let (q, p, r) = m.rank_normal_form();
        assert!(r <= 2);
        let prod = q.mul(&m).mul(&p);
        let mut expect = Matrix::zeros(Q, 3, 5);
        for i in 0..r {
            expect.set(i, i, Q.one());
        }
        assert_eq!(prod, expect);
    }

    #[test]
    fn det_identity_and_transpose() {
        assert!(Matrix::identity(Q, 4).det().is_one());
        let m = Matrix::from_i64_rows(Q, &[&[1, 2, 0], &[0, 1, 3], &[4, 0, 1]]);
        assert_eq!(m.det(), m.transpose().det());
        assert_eq!(m.det(), Q.from_i64(25));
    }

    #[test]
    fn det_of_limit_conjugator_at_small_times() {
        // The 5×5 conjugating family from the orbit-closure example has
        // determinant −t⁵: frozen at t=1 (−1) and t=2 (−32); the matrix is
        // singular in the limit t → 0.
        let p_at = |t: i64| {
            Matrix::from_i64_rows(
                Q,
                &[
                    &[1, 0, 0, 0, 0],
                    &[0, 1, 1, 0, 1],
                    &[0, 0, t * t, 0, 0],
                    &[0, 0, 0, t * t, 0],
                    &[0, t, -t, 0, 0],
                ],
            )
        };
        assert_eq!(p_at(1).det(), Q.from_i64(-1));
        assert_eq!(p_at(2).det(), Q.from_i64(-32));
    }

    #[test]
    fn invert_round_trips_and_rejects_singular() {
        let m = Matrix::from_i64_rows(Q, &[&[2, 1], &[1, 1]]);
        let inv = m.invert().unwrap();
        assert!(m.mul(&inv).is_identity());
        assert!(inv.mul(&m).is_identity());

        let s = Matrix::from_i64_rows(Q, &[&[1, 2], &[2, 4]]);
        assert!(matches!(s.invert(), Err(Error::SingularMatrix)));
        let rect = Matrix::zeros(Q, 2, 3);
        assert!(matches!(rect.invert(), Err(Error::NotSquare(_))));
    }

    #[test]
    fn direct_sum_places_blocks() {
        let a = Matrix::from_i64_rows(Q, &[&[1, 2], &[3, 4]]);
        let z1 = Matrix::zeros(Q, 1, 1);
        let s = a.direct_sum(&z1);
        assert_eq!((s.rows(), s.cols()), (3, 3));
        assert_eq!(s.submatrix(0, 2, 0, 2), a);
        assert!(s.submatrix(2, 3, 0, 3).is_zero());
        assert!(s.submatrix(0, 3, 2, 3).is_zero());
    }

    #[test]
    fn vectorization_round_trip_is_column_major() {
        let m = Matrix::from_i64_rows(Q, &[&[1, 2], &[3, 4]]);
        let v = m.vec_col();
        // Columns stacked: (1,3,2,4).
        let expect = Matrix::from_i64_rows(Q, &[&[1], &[3], &[2], &[4]]);
        assert_eq!(v, expect);
        assert_eq!(Matrix::unvec_col(&v, 2, 2), m);
    }

    #[test]
    fn elimination_routes_agree_on_random_matrices() {
        let mut rng = ChaCha8Rng::seed_from_u64(17);
        for field in [Q, FieldDescriptor::GaussianRationals, f101()] {
            for _ in 0..30 {
                let r = rng.gen_range(0..5);
                let c = rng.gen_range(0..5);
                let m = Matrix::random(field, r, c, &mut rng, 5);
                let rank = m.rank_via_fraction_free();
                assert_eq!(rank, m.rank_via_echelon());
                let k = m.kernel_basis();
                assert_eq!(k.cols(), c - rank);
                assert!(m.mul(&k).is_zero());
                assert_eq!(k.rank(), k.cols());
            }
        }
    }

    #[test]
    fn min_poly_of_jordan_block() {
        // Nilpotent 3×3 shift: minimal polynomial x³.
        let n = Matrix::from_i64_rows(Q, &[&[0, 0, 0], &[1, 0, 0], &[0, 1, 0]]);
        let p = n.min_poly();
        assert_eq!(p, UniPoly::from_i64_coeffs(Q, &[0, 0, 0, 1]));
        // Idempotent diag(1, 1, 0): minimal polynomial x² − x.
        let e = Matrix::from_i64_rows(Q, &[&[1, 0, 0], &[0, 1, 0], &[0, 0, 0]]);
        assert_eq!(e.min_poly(), UniPoly::from_i64_coeffs(Q, &[0, -1, 1]));
        assert!(e.apply_poly(&e.min_poly()).is_zero());
    }

    #[test]
    fn conj_transpose_conjugates_gaussian_entries() {
        let qi = FieldDescriptor::GaussianRationals;
        let i = qi.imaginary_unit().unwrap();
        let mut m = Matrix::zeros(qi, 1, 2);
        m.set(0, 0, i.clone());
        m.set(0, 1, qi.one().add(&i));
        let h = m.conj_transpose();
        assert_eq!((h.rows(), h.cols()), (2, 1));
        assert_eq!(*h.at(0, 0), i.neg());
        assert_eq!(*h.at(1, 0), qi.one().sub(&i));
    }
}
