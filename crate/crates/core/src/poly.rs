//! Exact univariate polynomials: gcd, squarefree decomposition, and full
//! irreducible factorization over every supported field.
//!
//! Factorization strategy by field:
//! * 𝔽_p — distinct-degree splitting followed by randomized equal-degree
//!   splitting; multiplicities recovered by trial division, so small
//!   characteristics need no special casing.
//! * ℚ — squarefree decomposition, reduction modulo a good prime, linear
//!   Hensel lifting, and subset recombination (degrees here are desk-scale).
//! * ℚ[i] — reduction to ℚ through the norm `f · f̄` after a shift that makes
//!   the norm squarefree; gcds with the rational factors split the input.

use std::cmp::Ordering;
use std::fmt;

use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::field::{FieldDescriptor, Scalar};

/// Largest degree accepted for factorization over ℚ and ℚ[i].
pub const FACTOR_DEGREE_BOUND: usize = 64;

/// A dense univariate polynomial, coefficients lowest-degree first, with no
/// trailing zero coefficients (the zero polynomial stores no coefficients).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct UniPoly {
    field: FieldDescriptor,
    coeffs: Vec<Scalar>,
}

impl UniPoly {
    pub fn new(field: FieldDescriptor, mut coeffs: Vec<Scalar>) -> Self {
        while coeffs.last().map(Scalar::is_zero).unwrap_or(false) {
            coeffs.pop();
        }
        UniPoly { field, coeffs }
    }

    pub fn zero(field: FieldDescriptor) -> Self {
        UniPoly {
            field,
            coeffs: Vec::new(),
        }
    }

    pub fn one(field: FieldDescriptor) -> Self {
        UniPoly::constant(field.one())
    }

    /// The monomial `x`.
    pub fn x(field: FieldDescriptor) -> Self {
        UniPoly::new(field, vec![field.zero(), field.one()])
    }

    pub fn constant(c: Scalar) -> Self {
        UniPoly::new(c.field(), vec![c])
    }

    /// `c · x^k`.
    pub fn monomial(c: Scalar, k: usize) -> Self {
        let field = c.field();
        let mut coeffs = vec![field.zero(); k];
        coeffs.push(c);
        UniPoly::new(field, coeffs)
    }

    /// Test/fixture helper: builds a polynomial from machine integers,
    /// lowest-degree coefficient first.
    pub fn from_i64_coeffs(field: FieldDescriptor, coeffs: &[i64]) -> Self {
        UniPoly::new(field, coeffs.iter().map(|&c| field.from_i64(c)).collect())
    }

    pub fn field(&self) -> FieldDescriptor {
        self.field
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Degree, or `None` for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    /// Coefficient of `x^k` (zero beyond the stored length).
    pub fn coeff(&self, k: usize) -> Scalar {
        self.coeffs
            .get(k)
            .cloned()
            .unwrap_or_else(|| self.field.zero())
    }

    pub fn coeffs(&self) -> &[Scalar] {
        &self.coeffs
    }

    /// Leading coefficient; panics on the zero polynomial.
    pub fn lc(&self) -> &Scalar {
        self.coeffs
            .last()
            .expect("leading coefficient of zero polynomial")
    }

    pub fn is_monic(&self) -> bool {
        self.coeffs.last().map(Scalar::is_one).unwrap_or(false)
    }

    pub fn add(&self, other: &UniPoly) -> UniPoly {
        let n = self.coeffs.len().max(other.coeffs.len());
        let coeffs = (0..n).map(|k| self.coeff(k).add(&other.coeff(k))).collect();
        UniPoly::new(self.field, coeffs)
    }

    pub fn sub(&self, other: &UniPoly) -> UniPoly {
        self.add(&other.neg())
    }

    pub fn neg(&self) -> UniPoly {
        UniPoly::new(self.field, self.coeffs.iter().map(Scalar::neg).collect())
    }

    pub fn mul(&self, other: &UniPoly) -> UniPoly {
        if self.is_zero() || other.is_zero() {
            return UniPoly::zero(self.field);
        }
        let mut coeffs = vec![self.field.zero(); self.coeffs.len() + other.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in other.coeffs.iter().enumerate() {
                coeffs[i + j] = coeffs[i + j].add(&a.mul(b));
            }
        }
        UniPoly::new(self.field, coeffs)
    }

    pub fn scale(&self, s: &Scalar) -> UniPoly {
        UniPoly::new(self.field, self.coeffs.iter().map(|c| c.mul(s)).collect())
    }

    pub fn make_monic(&self) -> UniPoly {
        if self.is_zero() || self.is_monic() {
            return self.clone();
        }
        self.scale(&self.lc().inv())
    }

    /// Euclidean division; panics when dividing by zero.
    pub fn div_rem(&self, divisor: &UniPoly) -> (UniPoly, UniPoly) {
        assert!(!divisor.is_zero(), "polynomial division by zero");
        let dlc_inv = divisor.lc().inv();
        let ddeg = divisor.degree().unwrap();
        let mut rem = self.coeffs.clone();
        if rem.len() <= ddeg {
            return (UniPoly::zero(self.field), self.clone());
        }
        let mut quot = vec![self.field.zero(); rem.len() - ddeg];
        for k in (ddeg..rem.len()).rev() {
            if rem[k].is_zero() {
                continue;
            }
            let q = rem[k].mul(&dlc_inv);
            for (j, dc) in divisor.coeffs.iter().enumerate() {
                let idx = k - ddeg + j;
                rem[idx] = rem[idx].sub(&q.mul(dc));
            }
            quot[k - ddeg] = q;
        }
        (
            UniPoly::new(self.field, quot),
            UniPoly::new(self.field, rem),
        )
    }

    pub fn rem(&self, divisor: &UniPoly) -> UniPoly {
        self.div_rem(divisor).1
    }

    /// Exact quotient; panics when the division leaves a remainder.
    pub fn div_exact(&self, divisor: &UniPoly) -> UniPoly {
        let (q, r) = self.div_rem(divisor);
        assert!(r.is_zero(), "inexact polynomial division");
        q
    }

    pub fn derivative(&self) -> UniPoly {
        let coeffs = self
            .coeffs
            .iter()
            .enumerate()
            .skip(1)
            .map(|(k, c)| c.mul(&self.field.from_i64(k as i64)))
            .collect();
        UniPoly::new(self.field, coeffs)
    }

    pub fn eval(&self, x: &Scalar) -> Scalar {
        let mut acc = self.field.zero();
        for c in self.coeffs.iter().rev() {
            acc = acc.mul(x).add(c);
        }
        acc
    }

    /// Substitutes `x ↦ a·x + b`.
    pub fn compose_linear(&self, a: &Scalar, b: &Scalar) -> UniPoly {
        let lin = UniPoly::new(self.field, vec![b.clone(), a.clone()]);
        let mut acc = UniPoly::zero(self.field);
        for c in self.coeffs.iter().rev() {
            acc = acc.mul(&lin).add(&UniPoly::constant(c.clone()));
        }
        acc
    }

    /// Applies coefficient-wise conjugation (identity over ℚ and 𝔽_p).
    pub fn conj_coeffs(&self) -> UniPoly {
        UniPoly::new(self.field, self.coeffs.iter().map(Scalar::conj).collect())
    }

    /// `self^e mod m` by binary exponentiation.
    pub fn pow_mod(&self, e: u64, m: &UniPoly) -> UniPoly {
        self.pow_mod_big(&BigUint::from(e), m)
    }

    pub fn pow_mod_big(&self, e: &BigUint, m: &UniPoly) -> UniPoly {
        let mut base = self.rem(m);
        let mut acc = UniPoly::one(self.field).rem(m);
        let bits = e.bits();
        for k in 0..bits {
            if e.bit(k) {
                acc = acc.mul(&base).rem(m);
            }
            base = base.mul(&base).rem(m);
        }
        acc
    }

    /// Monic greatest common divisor; `gcd(0, 0) = 0`.
    pub fn gcd(&self, other: &UniPoly) -> UniPoly {
        let mut a = self.clone();
        let mut b = other.clone();
        while !b.is_zero() {
            let r = a.rem(&b);
            a = b;
            b = r;
        }
        a.make_monic()
    }

    /// Extended Euclid: returns `(g, u, v)` with `u·self + v·other = g`,
    /// `g` the monic gcd.
    pub fn extended_gcd(&self, other: &UniPoly) -> (UniPoly, UniPoly, UniPoly) {
        let field = self.field;
        let (mut r0, mut r1) = (self.clone(), other.clone());
        let (mut u0, mut u1) = (UniPoly::one(field), UniPoly::zero(field));
        let (mut v0, mut v1) = (UniPoly::zero(field), UniPoly::one(field));
        while !r1.is_zero() {
            let (q, r) = r0.div_rem(&r1);
            (r0, r1) = (r1, r);
            (u0, u1) = (u1.clone(), u0.sub(&q.mul(&u1)));
            (v0, v1) = (v1.clone(), v0.sub(&q.mul(&v1)));
        }
        if r0.is_zero() {
            return (r0, u0, v0);
        }
        let s = r0.lc().inv();
        (r0.scale(&s), u0.scale(&s), v0.scale(&s))
    }

    /// Yun's squarefree decomposition: pairwise-coprime monic squarefree
    /// parts `gᵢ` with `f = lc · Π gᵢ^{mᵢ}`. Requires characteristic 0 or
    /// `p > deg f`.
    pub fn squarefree_decomposition(&self) -> Result<Vec<(UniPoly, u32)>> {
        if self.is_zero() {
            return Err(Error::PreconditionViolation(
                "squarefree decomposition of the zero polynomial".into(),
            ));
        }
        let deg = self.degree().unwrap();
        let p = self.field.characteristic();
        if p != 0 && (p as u128) <= deg as u128 {
            return Err(Error::CharacteristicTooSmall { p, needed: deg });
        }
        if deg == 0 {
            return Ok(Vec::new());
        }
        let f = self.make_monic();
        let df = f.derivative();
        let a = f.gcd(&df);
        let mut b = f.div_exact(&a);
        let mut d = df.div_exact(&a).sub(&b.derivative());
        let mut out = Vec::new();
        let mut i = 1u32;
        while b.degree().unwrap_or(0) > 0 {
            let g = b.gcd(&d);
            if g.degree().unwrap_or(0) > 0 {
                out.push((g.clone(), i));
            }
            b = b.div_exact(&g);
            d = d.div_exact(&g).sub(&b.derivative());
            i += 1;
        }
        Ok(out)
    }

    /// Full irreducible factorization: returns the leading unit and monic
    /// irreducible factors with multiplicities, sorted canonically, so that
    /// `unit · Π fᵢ^{mᵢ}` reproduces the input exactly. Randomized splitting
    /// draws from `seed` only; the sorted output is seed-independent.
    pub fn factor(&self, seed: u64) -> Result<(Scalar, Vec<(UniPoly, u32)>)> {
        if self.is_zero() {
            return Err(Error::PreconditionViolation(
                "factorization of the zero polynomial".into(),
            ));
        }
        let unit = self.lc().clone();
        let deg = self.degree().unwrap();
        if deg == 0 {
            return Ok((unit, Vec::new()));
        }
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut factors = match self.field {
            FieldDescriptor::PrimeField(_) => factor_fp(&self.make_monic(), &mut rng),
            FieldDescriptor::Rationals => {
                check_degree_bound(deg)?;
                factor_char_zero(&self.make_monic(), &mut rng, factor_squarefree_q)?
            }
            FieldDescriptor::GaussianRationals => {
                check_degree_bound(deg)?;
                factor_char_zero(&self.make_monic(), &mut rng, factor_squarefree_qi)?
            }
        };
        factors.sort_by(|a, b| cmp_poly(&a.0, &b.0));
        debug_assert!({
            let mut prod = UniPoly::constant(unit.clone());
            for (g, e) in &factors {
                for _ in 0..*e {
                    prod = prod.mul(g);
                }
            }
            prod == *self
        });
        Ok((unit, factors))
    }
}

impl fmt::Display for UniPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let mut first = true;
        for (k, c) in self.coeffs.iter().enumerate().rev() {
            if c.is_zero() {
                continue;
            }
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            match k {
                0 => write!(f, "{c}")?,
                _ => {
                    if c.is_one() {
                        write!(f, "x^{k}")?;
                    } else {
                        write!(f, "({c})*x^{k}")?;
                    }
                }
            }
        }
        Ok(())
    }
}

/// Canonical polynomial order: by degree, then coefficients from the top.
pub fn cmp_poly(a: &UniPoly, b: &UniPoly) -> Ordering {
    let da = a.coeffs.len();
    let db = b.coeffs.len();
    if da != db {
        return da.cmp(&db);
    }
    for k in (0..da).rev() {
        let c = a.coeffs[k].sort_cmp(&b.coeffs[k]);
        if c != Ordering::Equal {
            return c;
        }
    }
    Ordering::Equal
}

fn check_degree_bound(deg: usize) -> Result<()> {
    if deg > FACTOR_DEGREE_BOUND {
        Err(Error::DegreeLimitExceeded {
            degree: deg,
            bound: FACTOR_DEGREE_BOUND,
        })
    } else {
        Ok(())
    }
}

/// Characteristic-zero factorization driver: Yun, then the per-field
/// squarefree factorizer, merging multiplicities.
fn factor_char_zero(
    f: &UniPoly,
    rng: &mut ChaCha8Rng,
    squarefree: fn(&UniPoly, &mut ChaCha8Rng) -> Result<Vec<UniPoly>>,
) -> Result<Vec<(UniPoly, u32)>> {
    let mut out = Vec::new();
    for (part, mult) in f.squarefree_decomposition()? {
        for irr in squarefree(&part, rng)? {
            out.push((irr, mult));
        }
    }
    Ok(out)
}

// ---------------------------------------------------------------------------
// Factorization over 𝔽_p
// ---------------------------------------------------------------------------

/// Factors a monic polynomial over 𝔽_p. Distinct irreducible divisors are
/// found on squarefree parts; multiplicities come from trial division, which
/// stays correct for every prime (including p ≤ deg f).
fn factor_fp(f: &UniPoly, rng: &mut ChaCha8Rng) -> Vec<(UniPoly, u32)> {
    let mut distinct = distinct_irreducible_fp(f, rng);
    distinct.sort_by(cmp_poly);
    distinct.dedup();
    let mut out = Vec::new();
    for g in distinct {
        let mut mult = 0u32;
        let mut rem = f.clone();
        loop {
            let (q, r) = rem.div_rem(&g);
            if !r.is_zero() {
                break;
            }
            mult += 1;
            rem = q;
        }
        debug_assert!(mult > 0);
        out.push((g, mult));
    }
    out
}

/// All distinct monic irreducible divisors of a monic `f` over 𝔽_p.
fn distinct_irreducible_fp(f: &UniPoly, rng: &mut ChaCha8Rng) -> Vec<UniPoly> {
    let p = f.field().characteristic();
    if f.degree().unwrap_or(0) == 0 {
        return Vec::new();
    }
    let df = f.derivative();
    if df.is_zero() {
        // f = g(x^p) = g*(x)^p over 𝔽_p; descend to g*.
        let mut coeffs = Vec::new();
        for k in (0..f.coeffs().len()).step_by(p as usize) {
            coeffs.push(f.coeff(k));
        }
        return distinct_irreducible_fp(&UniPoly::new(f.field(), coeffs), rng);
    }
    let common = f.gcd(&df);
    let squarefree = f.div_exact(&common);
    let mut out = cantor_zassenhaus(&squarefree, rng);
    if common.degree().unwrap_or(0) > 0 {
        // Irreducibles whose multiplicity is divisible by p survive only here.
        out.extend(distinct_irreducible_fp(&common, rng));
    }
    out
}

/// Factors a monic squarefree polynomial over 𝔽_p into irreducibles:
/// distinct-degree splitting, then equal-degree splitting.
fn cantor_zassenhaus(f: &UniPoly, rng: &mut ChaCha8Rng) -> Vec<UniPoly> {
    let field = f.field();
    let p = field.characteristic();
    let x = UniPoly::x(field);
    let mut out = Vec::new();
    let mut rem = f.clone();
    let mut frob = x.rem(&rem);
    let mut d = 0usize;
    while rem.degree().unwrap_or(0) >= 2 * (d + 1) {
        d += 1;
        frob = frob.pow_mod(p, &rem);
        let g = frob.sub(&x).gcd(&rem);
        if g.degree().unwrap_or(0) > 0 {
            equal_degree_split(&g, d, rng, &mut out);
            rem = rem.div_exact(&g);
            frob = frob.rem(&rem);
        }
    }
    if rem.degree().unwrap_or(0) > 0 {
        out.push(rem.make_monic());
    }
    out
}

/// Splits a product of distinct irreducibles of known degree `d`.
fn equal_degree_split(g: &UniPoly, d: usize, rng: &mut ChaCha8Rng, out: &mut Vec<UniPoly>) {
    let deg = g.degree().unwrap();
    if deg == d {
        out.push(g.make_monic());
        return;
    }
    let field = g.field();
    let p = field.characteristic();
    for _attempt in 0..400 {
        let coeffs: Vec<Scalar> = (0..deg).map(|_| field.random_scalar(rng, 0)).collect();
        let r = UniPoly::new(field, coeffs);
        if r.degree().is_none() {
            continue;
        }
        let candidate = if p == 2 {
            // Trace map r + r² + r⁴ + … splits over 𝔽₂.
            let mut t = r.rem(g);
            let mut sq = r.rem(g);
            for _ in 1..(d as u64) {
                sq = sq.mul(&sq).rem(g);
                t = t.add(&sq);
            }
            t
        } else {
            let e = (BigUint::from(p).pow(d as u32) - BigUint::one()) / BigUint::from(2u32);
            r.pow_mod_big(&e, g).sub(&UniPoly::one(field))
        };
        let h = candidate.gcd(g);
        let hd = h.degree().unwrap_or(0);
        if hd > 0 && hd < deg {
            equal_degree_split(&h, d, rng, out);
            equal_degree_split(&g.div_exact(&h), d, rng, out);
            return;
        }
    }
    unreachable!("equal-degree splitting failed to find a splitter");
}

// ---------------------------------------------------------------------------
// Factorization over ℚ (Hensel lifting + recombination)
// ---------------------------------------------------------------------------

/// Integer polynomial, lowest degree first, trailing zeros trimmed.
type ZPoly = Vec<BigInt>;

fn zp_trim(mut v: ZPoly) -> ZPoly {
    while v.last().map(|c| c.is_zero()).unwrap_or(false) {
        v.pop();
    }
    v
}

fn zp_mul(a: &ZPoly, b: &ZPoly) -> ZPoly {
    if a.is_empty() || b.is_empty() {
        return Vec::new();
    }
    let mut out = vec![BigInt::zero(); a.len() + b.len() - 1];
    for (i, x) in a.iter().enumerate() {
        if x.is_zero() {
            continue;
        }
        for (j, y) in b.iter().enumerate() {
            out[i + j] += x * y;
        }
    }
    zp_trim(out)
}

fn zp_sub(a: &ZPoly, b: &ZPoly) -> ZPoly {
    let n = a.len().max(b.len());
    let zero = BigInt::zero();
    let out = (0..n)
        .map(|k| a.get(k).unwrap_or(&zero) - b.get(k).unwrap_or(&zero))
        .collect();
    zp_trim(out)
}

fn zp_scale(a: &ZPoly, s: &BigInt) -> ZPoly {
    zp_trim(a.iter().map(|c| c * s).collect())
}

/// Reduces every coefficient into the centered range `(-m/2, m/2]`.
fn zp_center(a: &ZPoly, m: &BigInt) -> ZPoly {
    let half = m / 2;
    zp_trim(
        a.iter()
            .map(|c| {
                let mut r = c.mod_floor(m);
                if r > half {
                    r -= m;
                }
                r
            })
            .collect(),
    )
}

/// Clears denominators of a monic ℚ-polynomial: returns the primitive
/// integer polynomial with positive leading coefficient.
fn q_to_primitive_z(f: &UniPoly) -> ZPoly {
    let mut lcm = BigInt::one();
    for c in f.coeffs() {
        lcm = lcm.lcm(c.as_rational().denom());
    }
    let ints: ZPoly = f
        .coeffs()
        .iter()
        .map(|c| {
            let r = c.as_rational() * BigRational::from(lcm.clone());
            debug_assert!(r.is_integer());
            r.to_integer()
        })
        .collect();
    let mut content = BigInt::zero();
    for c in &ints {
        content = content.gcd(c);
    }
    if content.is_zero() {
        return Vec::new();
    }
    let sign = if ints.last().unwrap().is_negative() {
        -&content
    } else {
        content
    };
    zp_trim(ints.iter().map(|c| c / &sign).collect())
}

fn z_to_q(f: &ZPoly) -> UniPoly {
    UniPoly::new(
        FieldDescriptor::Rationals,
        f.iter()
            .map(|c| Scalar::Rat(BigRational::from(c.clone())))
            .collect(),
    )
}

fn z_mod_p(f: &ZPoly, field: FieldDescriptor) -> UniPoly {
    let p = field.characteristic();
    let pb = BigInt::from(p);
    UniPoly::new(
        field,
        f.iter()
            .map(|c| {
                let r: u64 = c.mod_floor(&pb).try_into().unwrap();
                Scalar::Mod(r, p)
            })
            .collect(),
    )
}

fn fp_to_z_centered(f: &UniPoly) -> ZPoly {
    let p = f.field().characteristic();
    let half = p / 2;
    zp_trim(
        f.coeffs()
            .iter()
            .map(|c| match c {
                Scalar::Mod(v, _) => {
                    if *v > half {
                        BigInt::from(*v) - BigInt::from(p)
                    } else {
                        BigInt::from(*v)
                    }
                }
                _ => unreachable!(),
            })
            .collect(),
    )
}

/// Factors a monic squarefree ℚ-polynomial into monic irreducibles.
fn factor_squarefree_q(f: &UniPoly, rng: &mut ChaCha8Rng) -> Result<Vec<UniPoly>> {
    let deg = f.degree().unwrap();
    if deg == 1 {
        return Ok(vec![f.clone()]);
    }
    let primitive = q_to_primitive_z(f);
    let lc = primitive.last().unwrap().clone();

    // A prime is good when it misses the leading coefficient and keeps the
    // reduction squarefree.
    let (field_p, modular_factors) = {
        let mut found = None;
        let mut p = 1009u64;
        let mut tried = 0;
        while tried < 60 {
            if crate::field::is_prime_u64(p) {
                tried += 1;
                let fd = FieldDescriptor::PrimeField(p);
                if !(&lc % BigInt::from(p)).is_zero() {
                    let reduced = z_mod_p(&primitive, fd).make_monic();
                    if reduced.degree() == Some(deg)
                        && reduced.gcd(&reduced.derivative()).degree() == Some(0)
                    {
                        let mut factors = cantor_zassenhaus(&reduced, rng);
                        factors.sort_by(cmp_poly);
                        found = Some((fd, factors));
                        break;
                    }
                }
            }
            p += 2;
        }
        found.expect("no good prime found for factorization")
    };

    if modular_factors.len() == 1 {
        return Ok(vec![f.make_monic()]);
    }

    // Landau–Mignotte-style bound: coefficients of lc·(monic factor) are
    // below 2^{deg+2}·(deg+1)·‖f‖∞·|lc|; lift until p^K clears twice that.
    let p_big = BigInt::from(field_p.characteristic());
    let height = primitive.iter().map(|c| c.abs()).max().unwrap();
    let bound: BigInt =
        (BigInt::one() << (deg + 2)) * BigInt::from(deg as u64 + 1) * &height * lc.abs();
    let mut modulus = p_big.clone();
    let mut k = 1u32;
    while modulus <= bound {
        modulus *= &p_big;
        k += 1;
    }
    let lifted = hensel_lift_tree(&primitive, &modular_factors, field_p, k);
    let modulus = num_traits::pow::pow(p_big, k as usize);

    Ok(recombine(&primitive, lifted, &modulus))
}

/// Lifts the modular factorization `f ≡ lc · Π gᵢ (mod p)` to `mod p^k`,
/// returning monic factors mod p^k, by recursive binary splitting with a
/// linear two-factor lift at each node.
fn hensel_lift_tree(
    f: &ZPoly,
    factors: &[UniPoly],
    field_p: FieldDescriptor,
    k: u32,
) -> Vec<ZPoly> {
    let p_big = BigInt::from(field_p.characteristic());
    let modulus = num_traits::pow::pow(p_big.clone(), k as usize);
    if factors.len() == 1 {
        // f ≡ lc·g: the monic factor mod p^k is f normalized by lc.
        let lc = f.last().unwrap();
        let inv = mod_inverse_bigint(lc, &modulus);
        return vec![zp_center(
            &zp_scale(&zp_center(f, &modulus), &inv),
            &modulus,
        )];
    }
    let half = factors.len() / 2;
    let (left, right) = factors.split_at(half);
    let mut a_mod = UniPoly::constant(z_mod_p(f, field_p).lc().clone());
    for g in left {
        a_mod = a_mod.mul(g);
    }
    let mut b_mod = UniPoly::one(field_p);
    for g in right {
        b_mod = b_mod.mul(g);
    }
    let (a_lift, b_lift) = hensel_lift_pair(f, &a_mod, &b_mod, field_p, k);
    let mut out = hensel_lift_tree(&a_lift, left, field_p, k);
    out.extend(hensel_lift_tree(&b_lift, right, field_p, k));
    out
}

/// Linear Hensel lift of `f ≡ a·b (mod p)` with `b` monic and
/// `lc(a) ≡ lc(f)`: returns `(A, B)` with `f ≡ A·B (mod p^k)`, `B` monic,
/// `lc(A) = lc(f)` exactly.
fn hensel_lift_pair(
    f: &ZPoly,
    a_mod: &UniPoly,
    b_mod: &UniPoly,
    field_p: FieldDescriptor,
    k: u32,
) -> (ZPoly, ZPoly) {
    let p_big = BigInt::from(field_p.characteristic());
    let (g, u, v) = a_mod.extended_gcd(b_mod);
    assert_eq!(g.degree(), Some(0), "modular factors are not coprime");
    let (u, v) = (u.scale(&g.lc().inv()), v.scale(&g.lc().inv()));

    // Integer representatives; force lc(A) to the exact integer lc(f).
    let mut a = fp_to_z_centered(a_mod);
    let deg_a = a.len() - 1;
    a[deg_a] = f.last().unwrap().clone();
    let mut b = fp_to_z_centered(b_mod);

    let mut pj = p_big.clone();
    for _ in 1..k {
        let err = zp_sub(f, &zp_mul(&a, &b));
        let err_over: ZPoly = err.iter().map(|c| c / &pj).collect();
        let e_mod = z_mod_p(&zp_trim(err_over), field_p);
        if !e_mod.is_zero() {
            // σ·b + τ·a ≡ e (mod p) with deg σ < deg a, deg τ < deg b.
            let ve = v.mul(&e_mod);
            let (q, sigma) = ve.div_rem(a_mod);
            let tau = u.mul(&e_mod).add(&q.mul(b_mod));
            let sigma_z = zp_scale(&fp_to_z_centered(&sigma), &pj);
            let tau_z = zp_scale(&fp_to_z_centered(&tau.rem(b_mod)), &pj);
            a = zp_trim(zp_sub(&a, &zp_scale(&sigma_z, &-BigInt::one())));
            b = zp_trim(zp_sub(&b, &zp_scale(&tau_z, &-BigInt::one())));
        }
        pj *= &p_big;
    }
    debug_assert!(zp_center(&zp_sub(f, &zp_mul(&a, &b)), &pj).is_empty());
    (a, b)
}

/// Zassenhaus subset recombination of lifted modular factors.
fn recombine(primitive: &ZPoly, lifted: Vec<ZPoly>, modulus: &BigInt) -> Vec<UniPoly> {
    let mut remaining = z_to_q(primitive).make_monic();
    let mut pool: Vec<ZPoly> = lifted;
    let mut out = Vec::new();
    let mut size = 1usize;
    while 2 * size <= pool.len() {
        let mut found = None;
        for combo in combinations(pool.len(), size) {
            let lc_cur = q_to_primitive_z(&remaining).last().unwrap().clone();
            let mut cand = vec![lc_cur];
            for &i in &combo {
                cand = zp_center(&zp_mul(&cand, &pool[i]), modulus);
            }
            let cand_q = z_to_q(&cand);
            if cand_q.is_zero() {
                continue;
            }
            let cand_monic = cand_q.make_monic();
            let (quot, rem) = remaining.div_rem(&cand_monic);
            if rem.is_zero() {
                found = Some((combo, cand_monic, quot));
                break;
            }
        }
        match found {
            Some((combo, factor, quot)) => {
                out.push(factor);
                remaining = quot;
                for &i in combo.iter().rev() {
                    pool.remove(i);
                }
            }
            None => size += 1,
        }
    }
    if remaining.degree().unwrap_or(0) > 0 {
        out.push(remaining);
    }
    out
}

/// All ascending `size`-subsets of `0..n`.
fn combinations(n: usize, size: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut cur = Vec::new();
    fn rec(start: usize, n: usize, size: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == size {
            out.push(cur.clone());
            return;
        }
        for i in start..n {
            cur.push(i);
            rec(i + 1, n, size, cur, out);
            cur.pop();
        }
    }
    rec(0, n, size, &mut cur, &mut out);
    out
}

fn mod_inverse_bigint(a: &BigInt, m: &BigInt) -> BigInt {
    let e = a.extended_gcd(m);
    assert!(e.gcd.is_one(), "element not invertible modulo m");
    e.x.mod_floor(m)
}

// ---------------------------------------------------------------------------
// Factorization over ℚ[i] (norm reduction)
// ---------------------------------------------------------------------------

/// Embeds a ℚ-polynomial into ℚ[i].
fn q_poly_to_qi(f: &UniPoly) -> UniPoly {
    UniPoly::new(
        FieldDescriptor::GaussianRationals,
        f.coeffs()
            .iter()
            .map(|c| Scalar::Gauss(c.as_rational().clone(), BigRational::zero()))
            .collect(),
    )
}

/// Extracts the rational polynomial underneath a ℚ[i]-polynomial whose
/// imaginary parts all vanish.
fn qi_poly_to_q(f: &UniPoly) -> UniPoly {
    UniPoly::new(
        FieldDescriptor::Rationals,
        f.coeffs()
            .iter()
            .map(|c| match c {
                Scalar::Gauss(re, im) => {
                    assert!(im.is_zero(), "polynomial is not conjugation-invariant");
                    Scalar::Rat(re.clone())
                }
                _ => unreachable!(),
            })
            .collect(),
    )
}

/// Factors a monic squarefree ℚ[i]-polynomial by factoring the norm
/// `g·ḡ ∈ ℚ[x]` of a shifted copy `g(x) = f(x − s·i)`; when the norm is
/// squarefree, gcds against its rational irreducible factors give exactly
/// the irreducible factors of `g`.
fn factor_squarefree_qi(f: &UniPoly, rng: &mut ChaCha8Rng) -> Result<Vec<UniPoly>> {
    let field = f.field();
    let deg = f.degree().unwrap();
    if deg == 1 {
        return Ok(vec![f.clone()]);
    }
    let i_unit = field.imaginary_unit().unwrap();
    let one = field.one();
    for s in 0..(4 * deg * deg + 4) as i64 {
        let shift = i_unit.mul(&field.from_i64(s)).neg();
        let g = f.compose_linear(&one, &shift);
        let norm_qi = g.mul(&g.conj_coeffs());
        let norm = qi_poly_to_q(&norm_qi);
        if norm.gcd(&norm.derivative()).degree() != Some(0) {
            continue;
        }
        let mut remaining = g.clone();
        let mut out = Vec::new();
        for h in factor_squarefree_q(&norm.make_monic(), rng)? {
            if remaining.degree() == Some(0) {
                break;
            }
            let u = remaining.gcd(&q_poly_to_qi(&h));
            if u.degree().unwrap_or(0) > 0 {
                remaining = remaining.div_exact(&u);
                let back = i_unit.mul(&field.from_i64(s));
                out.push(u.compose_linear(&one, &back).make_monic());
            }
        }
        assert_eq!(
            out.iter().map(|u| u.degree().unwrap()).sum::<usize>(),
            deg,
            "norm factorization did not account for the full degree"
        );
        return Ok(out);
    }
    unreachable!("no shift made the norm squarefree");
}
